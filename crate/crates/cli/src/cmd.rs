use crate::input::{
    load_algebra, load_curve, load_rep, parse_indices, parse_numbers, read_table, read_text,
    sample_pairs, sampled_curve, seed, write_output,
};
use crate::report::{CliError, Report};
use crate::{
    LinearPotentialArgs, PropagateArgs, ReduceArgs, SolveGroupArgs, SpinArgs, SuperposeArgs,
    WeiNormanArgs,
};
use lieflow_core::io::write_csv;
use lieflow_core::physics::{
    classical_linear_potential, propagator_factors, quantum_linear_potential, spin_evolution,
    LinearPotentialDrive, MagneticDrive, MomentumWavefunction,
};
use lieflow_core::reduction::lift_with_section;
use lieflow_core::wei_norman::{parse_order, wn_step_matrix};
use lieflow_core::{
    cross_ratio, fit_constants, quadrature_solve, reconstruct, reduce_and_solve,
    reduce_to_subgroup, solve_group_direct, solve_group_on_grid, solve_wei_norman, ActionKind,
    AnyRep, CanonicalCoords, CoefficientCurve, GroupTrajectory, HomogeneousAction, MatrixRep,
    Point, ProjectivePoint, Scalar, ScalarDrive, Section, SuperpositionRule,
};
use nalgebra::DMatrix;
use num_complex::Complex64;

const SAMPLED_PAIRS: usize = 16;

/// Drift of every invariant the representation's generators preserve.
fn record_group_invariants<T: Scalar>(rep: &MatrixRep<T>, gs: &[DMatrix<T>], report: &mut Report) {
    let props = rep.props();
    let n = rep.size();
    let id = DMatrix::<T>::identity(n, n);
    let worst = |f: &dyn Fn(&DMatrix<T>) -> f64| gs.iter().map(f).fold(0.0, f64::max);
    if props.special {
        report.invariant(
            "det_drift",
            worst(&|g| (g.determinant() - T::of_f64(1.0)).modulus()),
        );
    }
    if props.orthogonal {
        report.invariant(
            "orthogonality_drift",
            worst(&|g| (g.transpose() * g - &id).norm()),
        );
    }
    if props.unitary {
        report.invariant(
            "unitarity_drift",
            worst(&|g| (g.adjoint() * g - &id).norm()),
        );
    }
}

/// Rows of `g`; complex entries as `[re, im]`.
fn matrix_json<T: Scalar>(g: &DMatrix<T>) -> serde_json::Value {
    let entry = |z: T| {
        let (re, im) = z.parts();
        if T::IS_COMPLEX {
            serde_json::json!([re, im])
        } else {
            serde_json::json!(re)
        }
    };
    (0..g.nrows())
        .map(|i| (0..g.ncols()).map(|j| entry(g[(i, j)])).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .into()
}

fn solve_in<T: Scalar>(
    rep: &MatrixRep<T>,
    b: &CoefficientCurve,
    a: &SolveGroupArgs,
    report: &mut Report,
) -> Result<(), CliError> {
    let traj = solve_group_direct(rep, b, a.window.t_end, a.window.dt)?;
    write_output(&a.output.out, &traj.to_csv())?;
    report.set("steps", traj.len() - 1);
    report.set("size", rep.size());
    report.set("final", matrix_json(traj.last()));
    record_group_invariants(rep, &traj.gs, report);
    report.invariant("residual", traj.residual(rep, b)?);
    report.invariant("homomorphism", rep.homomorphism_violation());
    report.invariant("jacobi", rep.algebra().jacobi_violation());
    let seed = seed()?;
    let mut worst = 0.0f64;
    for (i, j) in sample_pairs(traj.len(), SAMPLED_PAIRS, seed) {
        let (gi, gj) = (&traj.gs[i], &traj.gs[j]);
        let lhs = rep.ad_group(&(gi * gj))?;
        let rhs = rep.ad_group(gi)? * rep.ad_group(gj)?;
        worst = worst.max((lhs - rhs).norm());
    }
    report.set("seed", seed);
    report.invariant("adjoint_composition", worst);
    Ok(())
}

pub fn solve_group(a: &SolveGroupArgs) -> Result<Report, CliError> {
    let rep = load_rep(a.algebra.as_deref(), a.rep.as_deref())?;
    let b = load_curve(&a.coeffs, rep.algebra().dim())?;
    let mut report = Report::new("solve-group");
    report.set("t_end", a.window.t_end);
    report.set("dt", a.window.dt);
    match &rep {
        AnyRep::Real(r) => solve_in(r, &b, a, &mut report)?,
        AnyRep::Complex(r) => solve_in(r, &b, a, &mut report)?,
    }
    Ok(report)
}

fn reconstruction_gap<T: Scalar>(
    rep: &MatrixRep<T>,
    b: &CoefficientCurve,
    coords: &CanonicalCoords,
) -> Result<f64, CliError> {
    let from_coords = reconstruct(rep, coords)?;
    let direct = solve_group_on_grid(rep, b, &coords.ts)?;
    Ok(from_coords.max_distance(&direct)?)
}

pub fn wei_norman(a: &WeiNormanArgs) -> Result<Report, CliError> {
    let alg = load_algebra(&a.algebra)?;
    let r = alg.dim();
    let order = match &a.order {
        Some(s) => parse_order(s, r)?,
        None => (0..r).collect(),
    };
    let b = load_curve(&a.coeffs, r)?;
    let (t_end, dt) = (a.window.t_end, a.window.dt);
    let coords = if a.quadrature {
        quadrature_solve(&alg, &order, &b, t_end, dt)?
    } else {
        solve_wei_norman(&alg, &order, &b, t_end, dt)?
    };
    write_output(&a.output.out, &coords.to_csv())?;

    let mut report = Report::new("wei-norman");
    report.set("method", if a.quadrature { "quadrature" } else { "rk4" });
    report.set("order", &order);
    report.set("t_end", t_end);
    report.set("dt", dt);
    report.set("final", coords.last());
    let mut min_det = f64::INFINITY;
    for v in &coords.vs {
        min_det = min_det.min(wn_step_matrix(&alg, &order, v)?.determinant().abs());
    }
    report.set("min_abs_det", min_det);

    let rep = match &a.rep {
        Some(tag) => Some(load_rep(Some(&a.algebra), Some(tag))?),
        None => AnyRep::builtin(&a.algebra).ok(),
    };
    if let Some(rep) = rep {
        let gap = match &rep {
            AnyRep::Real(r) => reconstruction_gap(r, &b, &coords)?,
            AnyRep::Complex(r) => reconstruction_gap(r, &b, &coords)?,
        };
        report.invariant("reconstruction_gap", gap);
    }
    Ok(report)
}

fn parse_rule(s: &str, dim: usize) -> Result<SuperpositionRule, CliError> {
    Ok(match s {
        "riccati" => SuperpositionRule::Riccati,
        "planar" | "planar-sl2" => SuperpositionRule::PlanarSl2,
        "linear" => SuperpositionRule::Linear { n: dim },
        "affine" => SuperpositionRule::Affine { n: dim },
        _ => return Err(CliError::spec(format!("unknown rule '{s}'"))),
    })
}

/// Point columns of a particular-solution table: everything except `t`,
/// and except the projective pair `p,q` written next to `x`.
fn point_columns(header: &[String]) -> Vec<usize> {
    let projective = header.iter().any(|h| h == "q");
    header
        .iter()
        .enumerate()
        .filter(|(_, h)| {
            h.as_str() != "t" && !(projective && (h.as_str() == "p" || h.as_str() == "q"))
        })
        .map(|(i, _)| i)
        .collect()
}

fn projective_at(
    table: &lieflow_core::io::Table,
    row: usize,
    col: usize,
) -> Result<ProjectivePoint, CliError> {
    let pos = |name: &str| table.header.iter().position(|h| h == name);
    let r = &table.rows[row];
    Ok(match (pos("p"), pos("q")) {
        (Some(p), Some(q)) => ProjectivePoint::new(r[p], r[q])?,
        _ if r[col].is_infinite() => ProjectivePoint::new(1.0, 0.0)?,
        _ => ProjectivePoint::finite(r[col]),
    })
}

fn projective_gap(a: ProjectivePoint, b: ProjectivePoint) -> f64 {
    let na = a.p().hypot(a.q());
    let nb = b.p().hypot(b.q());
    a.det(&b).abs() / (na * nb)
}

pub fn superpose(a: &SuperposeArgs) -> Result<Report, CliError> {
    let tables = a
        .solutions
        .iter()
        .map(|p| read_table(p))
        .collect::<Result<Vec<_>, _>>()?;
    let cols = point_columns(&tables[0].header);
    let rule = parse_rule(&a.rule, cols.len())?;
    if tables.len() != rule.arity() {
        return Err(CliError::spec(format!(
            "rule '{}' takes {} solutions, got {}",
            a.rule,
            rule.arity(),
            tables.len()
        )));
    }
    let k = parse_numbers(&a.k, "--k")?;
    if k.len() != rule.constants() {
        return Err(CliError::spec(format!(
            "rule '{}' takes {} constants",
            a.rule,
            rule.constants()
        )));
    }
    let ts: Vec<f64> = tables[0].rows.iter().map(|r| r[0]).collect();
    for (table, path) in tables.iter().zip(&a.solutions) {
        if table.header.first().map(String::as_str) != Some("t") {
            return Err(CliError::spec(format!(
                "{}: first column must be 't'",
                path.display()
            )));
        }
        let same = table.rows.len() == ts.len()
            && table
                .rows
                .iter()
                .zip(&ts)
                .all(|(r, t)| (r[0] - t).abs() <= 1e-12 * t.abs().max(1.0));
        if !same || point_columns(&table.header).len() != cols.len() {
            return Err(CliError::spec(format!(
                "{}: grid or columns differ from {}",
                path.display(),
                a.solutions[0].display()
            )));
        }
    }

    let mut report = Report::new("superpose");
    report.set("rule", &a.rule);
    report.set("k", &k);
    report.set("rows", ts.len());
    let mut rows = Vec::with_capacity(ts.len());
    let mut drift = 0.0f64;
    let csv = if rule == SuperpositionRule::Riccati {
        let kp = if k[0].is_infinite() {
            ProjectivePoint::new(1.0, 0.0)?
        } else {
            ProjectivePoint::finite(k[0])
        };
        for (n, &t) in ts.iter().enumerate() {
            let x: Vec<ProjectivePoint> = tables
                .iter()
                .map(|tb| projective_at(tb, n, cols[0]))
                .collect::<Result<_, _>>()?;
            let s = lieflow_core::superpose_riccati(x[0], x[1], x[2], kp)?;
            drift = drift.max(projective_gap(cross_ratio(s, x[0], x[1], x[2])?, kp));
            rows.push(vec![t, s.value(), s.p(), s.q()]);
        }
        let header: Vec<String> = ["t", "x", "p", "q"].iter().map(|s| s.to_string()).collect();
        write_csv(&header, &rows, &[])
    } else {
        for (n, &t) in ts.iter().enumerate() {
            let sols: Vec<Vec<f64>> = tables
                .iter()
                .map(|tb| cols.iter().map(|&c| tb.rows[n][c]).collect())
                .collect();
            let x = rule.apply(&sols, &k)?;
            let back = fit_constants(rule, &sols, &x)?;
            drift = drift.max(
                back.iter()
                    .zip(&k)
                    .map(|(u, v)| (u - v).abs())
                    .fold(0.0, f64::max),
            );
            let mut row = vec![t];
            row.extend(x);
            rows.push(row);
        }
        let mut header = vec!["t".to_string()];
        header.extend(cols.iter().map(|&c| tables[0].header[c].clone()));
        write_csv(&header, &rows, &[])
    };
    write_output(&a.output.out, &csv)?;
    report.invariant("constant_drift", drift);
    Ok(report)
}

fn point_gap(a: &Point, b: &Point) -> f64 {
    match (a, b) {
        (Point::Projective(x), Point::Projective(y)) => projective_gap(*x, *y),
        (Point::Line(x), Point::Line(y)) => (x - y).abs(),
        (Point::Plane(x), Point::Plane(y)) => (x[0] - y[0]).hypot(x[1] - y[1]),
        _ => f64::NAN,
    }
}

fn initial_point(action: &HomogeneousAction, s: &str) -> Result<Point, CliError> {
    let vals = parse_numbers(s, "--x0")?;
    if let (ActionKind::Sl2Homography, [x]) = (action.kind(), vals.as_slice()) {
        if x.is_infinite() {
            return Ok(Point::Projective(ProjectivePoint::new(1.0, 0.0)?));
        }
    }
    Ok(action.point(&vals)?)
}

pub fn propagate(a: &PropagateArgs) -> Result<Report, CliError> {
    let traj = GroupTrajectory::<f64>::from_csv(&read_text(&a.traj)?)
        .map_err(|e| CliError::spec(format!("{}: {e}", a.traj.display())))?;
    let action = HomogeneousAction::from_tag(&a.action)?;
    let x0 = initial_point(&action, &a.x0)?;
    let curve = action.propagate(&traj, &x0)?;
    write_output(&a.output.out, &curve.to_csv())?;

    let mut report = Report::new("propagate");
    report.set("action", action.kind().tag());
    report.set("points", curve.points.len());
    let at_inf = curve
        .points
        .iter()
        .filter(|p| matches!(p, Point::Projective(q) if q.is_infinite()))
        .count();
    report.set("points_at_infinity", at_inf);
    report.set("final", curve.points.last().and_then(|p| p.chart().ok()));
    let seed = seed()?;
    let mut worst = 0.0f64;
    for (i, j) in sample_pairs(traj.len(), SAMPLED_PAIRS, seed) {
        let (gi, gj) = (&traj.gs[i], &traj.gs[j]);
        let lhs = action.act(&(gi * gj), &x0)?;
        let rhs = action.act(gi, &action.act(gj, &x0)?)?;
        worst = worst.max(point_gap(&lhs, &rhs));
    }
    report.set("seed", seed);
    report.invariant("action_composition", worst);
    Ok(report)
}

pub fn reduce(a: &ReduceArgs) -> Result<Report, CliError> {
    let action = HomogeneousAction::from_tag(&a.action)?;
    let section = match &a.section {
        Some(s) => Section::from_tag(s)?,
        None => Section::for_action(action.kind()),
    };
    let rep = section.rep();
    if rep.size() != action.rep().size() || section.point_dim() != action.kind().chart_dim() {
        return Err(CliError::spec(format!(
            "section {section:?} does not belong to action {}",
            action.kind().tag()
        )));
    }
    let b = load_curve(&a.coeffs, rep.dim())?;
    let table = read_table(&a.solution)?;
    let names: &[&str] = if section.point_dim() == 2 {
        &["x", "p"]
    } else {
        &["x"]
    };
    let cols: Vec<Vec<f64>> = std::iter::once("t")
        .chain(names.iter().copied())
        .map(|n| {
            table.column(n).ok_or_else(|| {
                CliError::spec(format!("{}: missing column '{n}'", a.solution.display()))
            })
        })
        .collect::<Result<_, _>>()?;
    let ts = cols[0].clone();
    let values: Vec<Vec<f64>> = (0..ts.len())
        .map(|k| cols[1..].iter().map(|c| c[k]).collect())
        .collect();
    let indices = match &a.subgroup {
        Some(s) => parse_indices(s, "--subgroup")?,
        None => section.stabilizer(),
    };

    let g1 = lift_with_section(section, &ts, &values)?;
    let reduced = reduce_to_subgroup(&rep, &b, &g1, &indices)?;
    write_output(&a.output.out, &reduced.to_csv())?;

    let mut report = Report::new("reduce");
    report.set("section", format!("{section:?}"));
    report.set("subgroup", &indices);
    report.set("rows", ts.len());
    report.invariant("leakage", reduced.leakage);
    if g1.len() >= 3 && g1.len() % 2 == 1 {
        let full = reduce_and_solve(&rep, &b, &g1, &indices)?;
        let direct = solve_group_on_grid(&rep, &b, &full.g.ts)?;
        report.invariant("reassembly_gap", full.g.max_distance(&direct)?);
    }
    Ok(report)
}

fn bloch(psi: &[Complex64; 2]) -> [f64; 3] {
    let ab = psi[0].conj() * psi[1];
    [
        2.0 * ab.re,
        2.0 * ab.im,
        psi[0].norm_sqr() - psi[1].norm_sqr(),
    ]
}

pub fn spin(a: &SpinArgs) -> Result<Report, CliError> {
    let field = match (&a.b, &a.b_file) {
        (Some(s), _) => CoefficientCurve::parse(s)?,
        (None, Some(p)) => sampled_curve(p, 3)?,
        (None, None) => return Err(CliError::spec("field is required (--b or --b-file)")),
    };
    let drive = MagneticDrive::new(field, a.mu)?;
    let v = parse_numbers(&a.psi0, "--psi0")?;
    if v.len() != 4 {
        return Err(CliError::spec("--psi0 takes re0,im0,re1,im1"));
    }
    let psi0 = [Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])];
    let evo = spin_evolution(&drive, a.window.t_end, a.window.dt)?;
    let psis = evo.apply_to_spinor(psi0);

    let s0 = bloch(&psi0);
    let n0 = psi0[0].norm_sqr() + psi0[1].norm_sqr();
    let (mut norm_drift, mut bloch_gap) = (0.0f64, 0.0f64);
    let mut rows = Vec::with_capacity(psis.len());
    for ((t, psi), r) in evo.spinor.ts.iter().zip(&psis).zip(&evo.rotation.gs) {
        let s = bloch(psi);
        norm_drift = norm_drift.max((psi[0].norm_sqr() + psi[1].norm_sqr() - n0).abs());
        for (j, sj) in s.iter().enumerate() {
            let rs: f64 = (0..3).map(|k| r[(j, k)] * s0[k]).sum();
            bloch_gap = bloch_gap.max((sj - rs).abs());
        }
        rows.push(vec![
            *t, psi[0].re, psi[0].im, psi[1].re, psi[1].im, s[0], s[1], s[2],
        ]);
    }
    let header: Vec<String> = [
        "t", "psi0_re", "psi0_im", "psi1_re", "psi1_im", "sx", "sy", "sz",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    write_output(&a.output.out, &write_csv(&header, &rows, &[]))?;
    if let Some(path) = &a.rotation_out {
        write_output(&Some(path.clone()), &evo.rotation.to_csv())?;
    }

    let mut report = Report::new("physics spin");
    report.set("mu", a.mu);
    report.set("t_end", a.window.t_end);
    report.set("dt", a.window.dt);
    report.set("final_bloch", rows.last().map(|r| r[5..].to_vec()));
    report.invariant("unitarity", evo.unitarity_violation());
    report.invariant("orthogonality", evo.orthogonality_violation());
    report.invariant("covering", evo.covering_error()?);
    report.invariant("norm_drift", norm_drift);
    report.invariant("bloch_rotation", bloch_gap);
    Ok(report)
}

fn force_drive(a: &LinearPotentialArgs) -> Result<LinearPotentialDrive, CliError> {
    let curve = if let Some(f) = &a.f {
        CoefficientCurve::Builtin(vec![ScalarDrive::parse(f)?])
    } else if let Some(path) = &a.f_file {
        sampled_curve(path, 1)?
    } else if a.e0.is_some() || a.e.is_some() || a.omega.is_some() {
        return Ok(LinearPotentialDrive::cosine(
            a.m,
            a.q,
            a.e0.unwrap_or(0.0),
            a.e.unwrap_or(0.0),
            a.omega.unwrap_or(0.0),
        )?);
    } else {
        return Err(CliError::spec(
            "a force is required (--f, --f-file or --E0/--E/--omega)",
        ));
    };
    Ok(LinearPotentialDrive::new(curve, a.m)?)
}

pub fn linear_potential(a: &LinearPotentialArgs) -> Result<Report, CliError> {
    let drive = force_drive(a)?;
    let (t_end, dt) = (a.window.t_end, a.window.dt);
    let mut report = Report::new("physics linear-potential");
    report.set("mass", a.m);
    report.set("t_end", t_end);
    report.set("dt", dt);
    if a.classical {
        let motion = classical_linear_potential(&drive, a.x0, a.p0, t_end, dt)?;
        write_output(&a.output.out, &motion.to_csv())?;
        report.set("mode", "classical");
        report.set("final_x", motion.xs.last());
        report.set("final_p", motion.ps.last());
        report.invariant("i1_drift", motion.max_i1_drift());
        report.invariant("i2_drift", motion.max_i2_drift());
        return Ok(report);
    }

    let psi0 = match (&a.psi0, &a.gaussian) {
        (Some(path), _) => MomentumWavefunction::from_csv(&read_text(path)?)
            .map_err(|e| CliError::spec(format!("{}: {e}", path.display())))?,
        (None, g) => {
            let v = parse_numbers(g.as_deref().unwrap_or("0,1,0"), "--gaussian")?;
            if v.len() != 3 {
                return Err(CliError::spec("--gaussian takes p0,sigma,x0"));
            }
            MomentumWavefunction::gaussian(a.n, a.half_width, v[0], v[1], v[2])?
        }
    };
    let out = quantum_linear_potential(&drive, &psi0, t_end, dt)?;
    write_output(&a.output.out, &out.psi.to_csv())?;
    let factors = propagator_factors(&drive, t_end, dt)?;
    let (p_start, p_end) = (psi0.mean_momentum(), out.psi.mean_momentum());
    report.set("mode", "quantum");
    report.set("v", out.coords);
    report.set("u", factors.u.last());
    report.set("aliasing", out.aliasing);
    report.set("mean_momentum_initial", p_start);
    report.set("mean_momentum_final", p_end);
    report.invariant("norm_drift", (out.psi.norm() - psi0.norm()).abs());
    report.invariant("factorization_gap", factors.gap);
    // ⟨p⟩ moves by −∫f = v₂
    report.invariant("ehrenfest", (p_end - p_start - out.coords[1]).abs());
    Ok(report)
}
