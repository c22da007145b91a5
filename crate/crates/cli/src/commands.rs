use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde_json::{json, Value};

use pwh_core::identities::*;
use pwh_core::mellin::*;
use pwh_core::ortho::*;
use pwh_core::quadrature::*;
use pwh_core::spectral::*;

use crate::config::{Command, Function, RunConfig};
use crate::error::CliError;
use crate::output::{num, Check, Report, Table};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.command {
        Command::Eval => eval(cfg),
        Command::Gram => gram(cfg),
        Command::Norms => norms(cfg),
        Command::Spectral => spectral(cfg),
        Command::Parseval => parseval(cfg),
        Command::Identities => identities(cfg),
        Command::Mellin => mellin(cfg),
        Command::Boundary => boundary(cfg),
    }
}

fn last_index(cfg: &RunConfig, span: i64) -> i64 {
    cfg.n_max_or(cfg.params.n_min() + span)
}

fn eval(cfg: &RunConfig) -> Result<Report> {
    let pr = &cfg.params;
    let f: Box<dyn PiecewiseFn> = match cfg.function {
        Function::Phi => match cfg.p {
            Some(p) => Box::new(Phi::with_p(pr, p)?),
            None => Box::new(Phi::new(pr, pr.index(cfg.n.unwrap_or(pr.n_min()))?)?),
        },
        Function::Psi => Box::new(Psi::new(pr, cfg.s)?),
    };
    let rows: Vec<Vec<Value>> = cfg
        .grid
        .points()
        .par_iter()
        .map(|&x| match f.at(x) {
            Ok(v) => vec![num(x), num(v), json!("ok")],
            Err(e) => vec![num(x), Value::Null, json!(e.to_string())],
        })
        .collect();
    Ok(Report::from_table(Table { columns: vec!["x", "value", "status"], rows }))
}

fn gram(cfg: &RunConfig) -> Result<Report> {
    let pr = &cfg.params;
    let ps: Vec<f64> = pr.indices(last_index(cfg, 5)).iter().map(|i| i.p).collect();
    let g = gram_matrix(pr, &ps, &cfg.spec())?;
    let mut checks = vec![Check::new("orthogonality", g.max_off_rel, 0.0, g.max_off_rel, 1e-7)];
    for (k, &p) in ps.iter().enumerate() {
        let rel = (g.matrix[k][k] / g.closed_diag[k] - 1.0).abs();
        checks.push(Check::new(format!("norm p={p}"), g.matrix[k][k], g.closed_diag[k], rel, 1e-8));
    }
    let mut table = Table::new(vec!["m", "n", "p", "q", "value", "est_error"]);
    for m in 0..ps.len() {
        for n in 0..ps.len() {
            table.rows.push(vec![json!(m), json!(n), num(ps[m]), num(ps[n]), num(g.matrix[m][n]), num(g.est_error[m][n])]);
        }
    }
    let rows = |v: &Vec<Vec<f64>>| Value::Array(v.iter().map(|r| Value::Array(r.iter().map(|&x| num(x)).collect())).collect());
    let result = json!({
        "p": ps.iter().map(|&p| num(p)).collect::<Vec<_>>(),
        "matrix": rows(&g.matrix),
        "est_error": rows(&g.est_error),
        "closed_diag": g.closed_diag.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "max_off_rel": num(g.max_off_rel),
        "max_diag_rel": num(g.max_diag_rel),
        "checks": crate::output::checks_table(&checks).objects(),
    });
    Ok(Report { results: vec![result], table, failed: checks.iter().any(|c| !c.pass()) })
}

fn norms(cfg: &RunConfig) -> Result<Report> {
    let pr = &cfg.params;
    let spec = cfg.spec();
    let checks = pr
        .indices(last_index(cfg, 5))
        .par_iter()
        .map(|&idx| {
            let phi = Phi::new(pr, idx)?;
            let q = bilinear_pairing(pr, &phi, &phi, &spec)?.value;
            let closed = phi_norm_sq(pr, idx.p)?;
            Ok(Check::new(format!("norm p={}", idx.p), q, closed, (q / closed - 1.0).abs(), 1e-8))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report::suite("norms", checks))
}

fn s_grid(cfg: &RunConfig) -> Result<Vec<f64>> {
    Ok(uniform_grid(cfg.s_step.max(S_FLOOR), cfg.s_max, cfg.s_step)?)
}

/// Forward transform of ξ_μ next to its closed-form coefficients.
fn spectral(cfg: &RunConfig) -> Result<Report> {
    let pr = &cfg.params;
    let grid = s_grid(cfg)?;
    let d = forward_transform(pr, &Xi { mu: cfg.mu }, last_index(cfg, 20), &grid, &cfg.spec())?;
    let mut t = Table::new(vec!["kind", "n", "at", "value", "closed_form", "measure"]);
    for c in &d.coeffs {
        let cf = xi_discrete_coefficient(pr, cfg.mu, c.index.p)?;
        t.rows.push(vec![json!("discrete"), json!(c.index.n), num(c.index.p), num(c.value), num(cf), num(c.norm_sq)]);
    }
    if pr.theta != 0.0 {
        for (k, &s) in d.s_grid.iter().enumerate() {
            let cf = xi_continuous_coefficient(pr, cfg.mu, s)?;
            t.rows.push(vec![json!("continuous"), Value::Null, num(s), num(d.continuous[k]), num(cf), num(d.weights[k])]);
        }
    }
    Ok(Report::from_table(t))
}

fn parseval(cfg: &RunConfig) -> Result<Report> {
    let pr = &cfg.params;
    let f = Xi { mu: cfg.mu };
    let r = parseval_norm_check(pr, &f, last_index(cfg, 20), &s_grid(cfg)?, &cfg.spec())?;
    let inner = xi_inner(pr, cfg.mu, cfg.mu)?;
    let checks = vec![
        Check::rel("norm of xi by quadrature", r.lhs, inner, 1e-8),
        Check::new("parseval", r.lhs, r.rhs, r.residual, 1e-4),
    ];
    Ok(Report::suite("parseval", checks))
}

fn identities(cfg: &RunConfig) -> Result<Report> {
    let pr = cfg.params;
    let bp = BetaIdentityParams::new(pr, cfg.mu, cfg.nu)?;
    // the tail gates need looser quadrature targets than the default
    let beta = beta_lhs(&bp, BETA_N_MAX, BETA_S_MAX, &QuadratureSpec { tol: cfg.tol.max(1e-7), ..cfg.spec() })?;
    let dbw = dbw_integral_check([0.3, 0.4, 0.5], 2.0, &cfg.spec())?;
    let dougall = dougall_check(pr.alpha, [1.3, 1.4, 1.5], 200, &QuadratureSpec { tol: cfg.tol.max(1e-9), ..cfg.spec() })?;
    let checks = vec![
        Check::new("beta integral", beta.lhs, beta.rhs, beta.residual / beta.rhs.abs().max(1.0), 1e-5),
        Check::new("de branges-wilson", dbw.lhs, dbw.rhs, dbw.residual, 1e-6),
        Check::new("dougall", dougall.lhs, dougall.rhs, dougall.residual, 1e-8),
    ];
    Ok(Report::suite("identities", checks))
}

fn mellin(cfg: &RunConfig) -> Result<Report> {
    let pr = &cfg.params;
    let spec = cfg.spec();
    let mut checks = Vec::new();
    let cases = [
        (C::new(0.8, 0.0), C::new(0.3, 0.0), C::new(1.7, 0.0)),
        (C::new(0.6, 0.3), C::new(-0.2, 0.1), C::new(1.9, -0.4)),
    ];
    for (k, &(a, b, c)) in cases.iter().enumerate() {
        for x in [0.5, 2.0] {
            let v = barnes_main_integral(a, b, c, x, &spec)?;
            let cf = main_integral_closed_form(a, b, c, x)?;
            checks.push(Check::new(format!("main integral case {k} x={x}"), v.re, cf.re, (v - cf).norm() / cf.norm().max(1.0), 1e-7));
        }
    }
    let p = pr.theta + pr.n_min() as f64;
    let conv = convolution_check(pr, p, p + 1.0, &spec)?;
    checks.push(Check::new("convolution", conv.lhs, conv.rhs, conv.residual, 1e-6));
    let [a, b, c, d] = delta_parameters(pr, p, p + 1.45);
    let v = barnes_delta(a, b, c, d, &spec)?;
    let cf = delta_closed_form(a, b, c, d)?;
    checks.push(Check::new("delta integral", v.re, cf.re, (v - cf).norm() / cf.norm().max(1.0), 1e-7));
    for shift in [1.0, 2.0] {
        let [a, b, c, d] = delta_parameters(pr, p, p + shift);
        let v = barnes_delta(a, b, c, d, &spec)?;
        checks.push(Check::new(format!("delta vanishes q=p+{shift}"), v.re, 0.0, v.norm(), 1e-8));
    }
    Ok(Report::suite("mellin", checks))
}

/// Gluing at x = 1. A nonzero `perturb` moves p off θ + ℤ; the gluing checks then fail
/// while the measured defect is compared with its prediction.
fn boundary(cfg: &RunConfig) -> Result<Report> {
    let pr = &cfg.params;
    let mut checks = Vec::new();
    let mut prev: Option<LocalExpansion> = None;
    for idx in pr.indices(last_index(cfg, 5)) {
        let p = idx.p + cfg.perturb;
        let le = Phi::with_p(pr, p)?.local_expansion();
        let r = boundary_report(&le, pr);
        let worst = r.defect_a.abs().max(r.defect_b.abs()) / r.scale;
        checks.push(Check::new(format!("phi gluing n={}", idx.n), r.defect_a, 0.0, worst, BOUNDARY_TOL));
        if cfg.perturb != 0.0 && pr.theta != 0.0 {
            let pred = phi_gluing_defect(pr, p)?;
            checks.push(Check::new(format!("phi predicted defect n={}", idx.n), r.defect_a, pred, (r.defect_a - pred).abs() / r.scale, 1e-9));
        }
        if let Some(q) = prev {
            let sd = symmetry_defect_local(pr, &q, &le);
            checks.push(Check::new(format!("symmetry n={}", idx.n), sd, 0.0, sd.abs() / (q.scale() * le.scale()), 1e-9));
        }
        prev = Some(le);
    }
    if pr.theta != 0.0 {
        for s in [0.5, 1.0, 2.5] {
            let r = boundary_report(&Psi::new(pr, s)?.local_expansion(), pr);
            let worst = r.defect_a.abs().max(r.defect_b.abs()) / r.scale;
            checks.push(Check::new(format!("psi gluing s={s}"), r.defect_a, 0.0, worst, BOUNDARY_TOL));
        }
    }
    Ok(Report::suite("boundary", checks))
}
