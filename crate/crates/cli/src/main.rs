//! `lieflow`: command-line front end for the Lie-system solvers.

mod cmd;
mod input;
mod report;
mod spec;

use clap::{Args, Parser, Subcommand};
use report::{CliError, Report};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "lieflow",
    version,
    about = "Solve Lie systems through their group equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate ġg⁻¹ = −Σ b_α M_α in a matrix representation.
    SolveGroup(SolveGroupArgs),
    /// Canonical coordinates of the second kind.
    WeiNorman(WeiNormanArgs),
    /// Combine particular solutions through a superposition rule.
    Superpose(SuperposeArgs),
    /// Act with a group trajectory on an initial point.
    Propagate(PropagateArgs),
    /// Reduce the group equation along a particular solution.
    Reduce(ReduceArgs),
    /// Spin and linear-potential models.
    #[command(subcommand)]
    Physics(PhysicsCommand),
    /// Run a problem described by a JSON file.
    Run(RunArgs),
}

#[derive(Debug, Args, Clone)]
pub struct Output {
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON run report path.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct Coefficients {
    /// Comma-separated coefficients, one token per component: `1.5`,
    /// `cos[:a[:w]]`, `sin[:a[:w]]`, `poly:c0:c1:…`, or a `+` sum of these.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Sampled coefficients, CSV with columns `t,b0,b1,…`.
    #[arg(long, conflicts_with = "b")]
    pub b_file: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct Window {
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
}

#[derive(Debug, Args)]
pub struct SolveGroupArgs {
    /// Builtin tag (`sl2`, `so3`, `affine`, `h3`, `h4`, `gl<n>`) or JSON file.
    #[arg(long)]
    pub algebra: Option<String>,
    /// Builtin tag (`sl2-defining`, `su2-pauli`, …) or JSON file.
    #[arg(long)]
    pub rep: Option<String>,
    #[command(flatten)]
    pub coeffs: Coefficients,
    #[command(flatten)]
    pub window: Window,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct WeiNormanArgs {
    #[arg(long)]
    pub algebra: String,
    /// Factorization order, a permutation of `0..r` (default identity).
    #[arg(long)]
    pub order: Option<String>,
    /// Nested quadratures instead of RK4 on the coordinate system.
    #[arg(long)]
    pub quadrature: bool,
    /// Representation used to check the reconstruction against a direct solve.
    #[arg(long)]
    pub rep: Option<String>,
    #[command(flatten)]
    pub coeffs: Coefficients,
    #[command(flatten)]
    pub window: Window,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SuperposeArgs {
    /// `riccati`, `planar`, `linear` or `affine`.
    #[arg(long)]
    pub rule: String,
    /// Particular-solution CSV files (columns `t,x[,y]`), in rule order.
    #[arg(long, num_args = 1.., required = true)]
    pub solutions: Vec<PathBuf>,
    /// Comma-separated constants (`inf` allowed for Riccati).
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct PropagateArgs {
    /// Real group trajectory CSV.
    #[arg(long)]
    pub traj: PathBuf,
    /// `sl2-homography`, `affine-line` or `heisenberg-plane`.
    #[arg(long)]
    pub action: String,
    /// Initial point: `x`, `inf`, or `x,p` on the phase plane.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub coeffs: Coefficients,
    /// Particular solution CSV (columns `t,x` or `t,x,p`).
    #[arg(long)]
    pub solution: PathBuf,
    #[arg(long)]
    pub action: String,
    /// Section used for the lift (defaults to the action's base point 0).
    #[arg(long)]
    pub section: Option<String>,
    /// Subalgebra indices (defaults to the stabilizer of the base point).
    #[arg(long)]
    pub subgroup: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Subcommand)]
pub enum PhysicsCommand {
    /// Spin-1/2 in a magnetic field: SU(2) and SO(3) together.
    Spin(SpinArgs),
    /// Particle in a time-dependent linear potential.
    LinearPotential(LinearPotentialArgs),
}

#[derive(Debug, Args)]
pub struct SpinArgs {
    /// Field components B¹, B², B³ in the builtin grammar.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, conflicts_with = "b")]
    pub b_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub mu: f64,
    /// Initial spinor `re0,im0,re1,im1`.
    #[arg(long, default_value = "1,0,0,0", allow_hyphen_values = true)]
    pub psi0: String,
    #[command(flatten)]
    pub window: Window,
    /// Rotation trajectory CSV.
    #[arg(long)]
    pub rotation_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["classical", "quantum"]))]
pub struct LinearPotentialArgs {
    #[arg(long)]
    pub classical: bool,
    #[arg(long)]
    pub quantum: bool,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    /// Force f(t) as one builtin token, e.g. `const:1` or `cos:0.5:2+0.1`.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["f_file", "e0", "e", "omega"])]
    pub f: Option<String>,
    /// Sampled force, CSV with columns `t,f`.
    #[arg(long, conflicts_with_all = ["e0", "e", "omega"])]
    pub f_file: Option<PathBuf>,
    /// Charge for f = q(E0 + E cos ωt).
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub q: f64,
    #[arg(long = "E0", allow_hyphen_values = true)]
    pub e0: Option<f64>,
    #[arg(long = "E", allow_hyphen_values = true)]
    pub e: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub p0: f64,
    /// Initial wavefunction CSV (columns `p,re,im`).
    #[arg(long, conflicts_with = "gaussian")]
    pub psi0: Option<PathBuf>,
    /// Gaussian initial state `p0,sigma,x0` on the grid given by --n and --half-width.
    #[arg(long, allow_hyphen_values = true)]
    pub gaussian: Option<String>,
    #[arg(long, default_value_t = 512)]
    pub n: usize,
    #[arg(long, default_value_t = 20.0)]
    pub half_width: f64,
    #[command(flatten)]
    pub window: Window,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Problem description: `{"command": "solve-group", "b": "…", …}`.
    #[arg(long)]
    pub spec: PathBuf,
}

fn dispatch(command: Command) -> (String, Option<PathBuf>, Result<Report, CliError>) {
    let name = command_name(&command);
    match command {
        Command::SolveGroup(a) => (name, a.output.report.clone(), cmd::solve_group(&a)),
        Command::WeiNorman(a) => (name, a.output.report.clone(), cmd::wei_norman(&a)),
        Command::Superpose(a) => (name, a.output.report.clone(), cmd::superpose(&a)),
        Command::Propagate(a) => (name, a.output.report.clone(), cmd::propagate(&a)),
        Command::Reduce(a) => (name, a.output.report.clone(), cmd::reduce(&a)),
        Command::Physics(PhysicsCommand::Spin(a)) => (name, a.output.report.clone(), cmd::spin(&a)),
        Command::Physics(PhysicsCommand::LinearPotential(a)) => {
            (name, a.output.report.clone(), cmd::linear_potential(&a))
        }
        Command::Run(a) => match spec::load(&a.spec) {
            Ok(cli) => dispatch(cli.command),
            Err(e) => (name, None, Err(e)),
        },
    }
}

fn command_name(command: &Command) -> String {
    match command {
        Command::SolveGroup(_) => "solve-group",
        Command::WeiNorman(_) => "wei-norman",
        Command::Superpose(_) => "superpose",
        Command::Propagate(_) => "propagate",
        Command::Reduce(_) => "reduce",
        Command::Physics(PhysicsCommand::Spin(_)) => "physics spin",
        Command::Physics(PhysicsCommand::LinearPotential(_)) => "physics linear-potential",
        Command::Run(_) => "run",
    }
    .to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (name, report_path, outcome) = dispatch(cli.command);
    let (report, code) = match outcome {
        Ok(r) => (r, 0),
        Err(e) => {
            eprintln!("lieflow: {e}");
            (e.report(&name), e.exit_code())
        }
    };
    if let Some(path) = report_path {
        if let Err(e) = report.write(&path) {
            eprintln!("lieflow: {e}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code)
}
