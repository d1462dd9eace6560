//! Worked examples: spin-1/2 in a magnetic field and a particle in a
//! time-dependent linear potential. Units with ħ = 1.

mod linear_potential;
mod spin;

pub use linear_potential::{
    classical_linear_potential, propagator_factors, quantum_linear_potential, ClassicalMotion,
    LinearPotentialDrive, MomentumWavefunction, PropagatorFactors, QuantumEvolution, ALIASING_TOL,
    U_ORDER, V_ORDER,
};
pub use spin::{covering_rotation, spin_evolution, MagneticDrive, SpinEvolution};
