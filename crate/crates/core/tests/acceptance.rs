//! Acceptance suite: one line per criterion, then a single assertion over all of them.
//!
//! Run with `cargo test --release --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use num_complex::Complex64 as C;
use pwh_core::identities::*;
use pwh_core::mellin::*;
use pwh_core::ortho::*;
use pwh_core::quadrature::*;
use pwh_core::spectral::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn points() -> [Params; 3] {
    [
        Params::new(0.3, 0.5, 0.25).unwrap(),
        Params::new(-0.4, 0.7, 0.6).unwrap(),
        Params::new(0.5, -0.3, 0.1).unwrap(),
    ]
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn c(x: f64) -> C {
    C::new(x, 0.0)
}

// 1 and 2 share the Gram matrices
fn gram_reports() -> (Vec<GramReport>, f64) {
    let t0 = Instant::now();
    let reps = points()
        .iter()
        .map(|pr| {
            let ps: Vec<f64> = (0..6).map(|m| pr.theta + m as f64).collect();
            gram_matrix(pr, &ps, &spec()).unwrap()
        })
        .collect();
    (reps, t0.elapsed().as_secs_f64())
}

fn c1_orthogonality(reps: &[GramReport], secs: f64) -> Outcome {
    let worst = reps.iter().map(|r| r.max_off_rel).fold(0.0, f64::max);
    outcome(worst < 1e-7 && secs < 60.0, format!("max |G_mn|/sqrt(G_mm G_nn) = {worst:.2e}, {secs:.1} s"))
}

fn c2_norms(reps: &[GramReport]) -> Outcome {
    let worst = reps.iter().map(|r| r.max_diag_rel).fold(0.0, f64::max);
    outcome(worst < 1e-8, format!("max relative diagonal error = {worst:.2e}"))
}

fn c3_jacobi_reduction() -> Outcome {
    let mut worst = 0.0f64;
    let mut right_nonzero = 0;
    for (a, b) in [(0.3, 0.5), (-0.4, 0.7), (0.5, -0.3)] {
        let pr = Params::new(a, b, 0.0).unwrap();
        for n in 0..=6u32 {
            let idx = pr.index(n as i64).unwrap();
            let cn = theta0_constant(&pr, n).unwrap();
            for k in 0..20 {
                let x = (k as f64 + 0.5) / 20.0;
                let want = cn * jacobi_eval(n, a, b, 2.0 * x - 1.0, JacobiFormula::One).unwrap();
                let got = phi_p(&pr, idx, x).unwrap();
                worst = worst.max((got - want).abs() / want.abs());
            }
            for x in [1.0 + 1e-6, 1.5, 2.0, 10.0, 1e6] {
                if phi_p(&pr, idx, x).unwrap() != 0.0 {
                    right_nonzero += 1;
                }
            }
        }
    }
    outcome(
        worst < 1e-10 && right_nonzero == 0,
        format!("max relative deviation = {worst:.2e}, nonzero samples on (1,inf) = {right_nonzero}"),
    )
}

fn c4_eigen() -> Outcome {
    let xs = [0.05, 0.2, 0.4, 0.6, 0.8, 0.95, 1.05, 1.3, 2.0, 3.5, 8.0, 40.0];
    let mut worst = 0.0f64;
    for pr in points() {
        for idx in pr.indices(6) {
            worst = worst.max(phi_eigen_residual(&pr, idx, &xs).unwrap());
        }
    }
    outcome(worst < 1e-5, format!("max |D Phi - lambda Phi|/(1+|Phi|) = {worst:.2e}"))
}

fn c5_gluing() -> Outcome {
    let mut worst_glue = 0.0f64;
    let mut all_pass = true;
    let mut worst_pred = 0.0f64;
    let mut perturbed_fail = true;
    for pr in points() {
        for idx in pr.indices(5) {
            let le = phi_p_local(&pr, idx).unwrap();
            let r = boundary_report(&le, &pr);
            all_pass &= r.pass;
            worst_glue = worst_glue.max(r.defect_a.abs().max(r.defect_b.abs()) / r.scale);
            // a shifted index leaves θ + ℤ and must fail by the predicted amount
            for d in [0.1, 0.37] {
                let le = Phi::with_p(&pr, idx.p + d).unwrap().local_expansion();
                let r = boundary_report(&le, &pr);
                let pred = phi_gluing_defect(&pr, idx.p + d).unwrap();
                perturbed_fail &= !r.pass;
                worst_pred = worst_pred.max((r.defect_a - pred).abs() / r.scale).max(r.defect_b.abs() / r.scale);
            }
        }
        for s in [0.3, 1.0, 2.5, 7.0] {
            let le = Psi::new(&pr, s).unwrap().local_expansion();
            let r = boundary_report(&le, &pr);
            all_pass &= r.pass;
            worst_glue = worst_glue.max(r.defect_a.abs().max(r.defect_b.abs()) / r.scale);
            let mut bad = le;
            bad.a_left += 1e-3 * r.scale;
            let rb = boundary_report(&bad, &pr);
            perturbed_fail &= !rb.pass;
            worst_pred = worst_pred.max((rb.defect_a - (r.defect_a - 1e-3 * r.scale)).abs() / r.scale);
        }
    }
    outcome(
        all_pass && perturbed_fail && worst_pred < 1e-6,
        format!("max relative gluing defect = {worst_glue:.2e}, perturbed vs predicted = {worst_pred:.2e}"),
    )
}

fn c6_cross_integrals() -> Outcome {
    let pr = points()[0];
    let sr = pr.sin_ratio().unwrap();
    let mut worst = 0.0f64;
    let mut worst_sum = 0.0f64;
    for (p, q) in [(0.25, 2.25), (-0.75, 1.25), (0.37, 1.81), (1.25, 3.25), (-0.3, 0.9)] {
        let f = Phi::with_p(&pr, p).unwrap();
        let g = Phi::with_p(&pr, q).unwrap();
        let r = bilinear_pairing(&pr, &f, &g, &spec()).unwrap();
        let x = cross_integral_x(&pr, p, q).unwrap();
        let y = cross_integral_y(&pr, p, q).unwrap();
        worst = worst.max(rel(r.left, x)).max(rel(r.right, y));
        if ((q - p) - (q - p).round()).abs() < 1e-12 {
            worst_sum = worst_sum.max((x + sr * y).abs());
        }
    }
    outcome(
        worst < 1e-8 && worst_sum < 1e-8,
        format!("max deviation from quadrature = {worst:.2e}, max |X + sY| on theta+Z = {worst_sum:.2e}"),
    )
}

fn c7_mellin_barnes() -> Outcome {
    let sp = spec();
    let mut main = 0.0f64;
    for (a, b, cc) in [(c(0.8), c(0.3), c(1.7)), (C::new(0.6, 0.3), C::new(-0.2, 0.1), C::new(1.9, -0.4))] {
        for x in [0.5, 2.0] {
            let num = barnes_main_integral(a, b, cc, x, &sp).unwrap();
            let cf = main_integral_closed_form(a, b, cc, x).unwrap();
            main = main.max((num - cf).norm() / cf.norm().max(1.0));
        }
    }
    let pr = points()[0];
    let conv = convolution_check(&pr, 0.25, 1.25, &sp).unwrap();
    let mut delta = 0.0f64;
    for (p, q) in [(0.25, 1.7), (0.4, 0.4), (1.1, 2.3)] {
        let [a, b, cc, d] = delta_parameters(&pr, p, q);
        let num = barnes_delta(a, b, cc, d, &sp).unwrap();
        let cf = delta_closed_form(a, b, cc, d).unwrap();
        delta = delta.max((num - cf).norm() / cf.norm().max(1.0));
    }
    let mut vanish = 0.0f64;
    for (p, q) in [(0.25, 1.25), (0.25, 2.25), (1.25, 0.25), (2.25, 0.25)] {
        let [a, b, cc, d] = delta_parameters(&pr, p, q);
        vanish = vanish.max(barnes_delta(a, b, cc, d, &sp).unwrap().norm());
    }
    outcome(
        main < 1e-7 && conv.residual < 1e-6 && delta < 1e-7 && vanish < 1e-8,
        format!(
            "main = {main:.2e}, convolution = {:.2e}, delta = {delta:.2e}, vanishing = {vanish:.2e}",
            conv.residual
        ),
    )
}

fn c8_parseval() -> Outcome {
    let pr = points()[0];
    let f = Xi { mu: 0.6 };
    let run = |n, s_max| {
        let grid = uniform_grid(0.05, s_max, 0.05).unwrap();
        parseval_norm_check(&pr, &f, n, &grid, &spec()).unwrap()
    };
    let r1 = run(20, 40.0);
    let r2 = run(40, 80.0);
    outcome(
        r1.residual < 1e-4 && r2.residual < r1.residual,
        format!("residual {:.2e} at (20, 40), {:.2e} at (40, 80)", r1.residual, r2.residual),
    )
}

fn c9_beta() -> Outcome {
    // the tail-uncertainty gate sits two orders below the criterion
    let sp = QuadratureSpec { tol: 1e-7, ..spec() };
    let mut worst = 0.0f64;
    for pr in [Params::new(0.3, 0.4, 0.25).unwrap(), Params::new(-0.4, 0.7, 0.6).unwrap()] {
        for mu in [0.1, 0.45, 0.9] {
            for nu in [0.0, 0.3, 0.75] {
                let bp = BetaIdentityParams::new(pr, mu, nu).unwrap();
                let r = beta_lhs(&bp, BETA_N_MAX, BETA_S_MAX, &sp).unwrap();
                worst = worst.max(r.residual / r.rhs.abs().max(1.0));
            }
        }
    }
    let dbw = dbw_integral_check([0.3, 0.4, 0.5], 2.0, &spec()).unwrap().residual;
    let dougall = dougall_check(0.2, [1.3, 1.4, 1.5], 200, &QuadratureSpec { tol: 1e-9, ..spec() }).unwrap().residual;

    // μ = θ − 1 with n_min = 0: every summand carries 1/Γ(1+μ−p) at a pole
    let pr = Params::new(0.3, -0.6, 0.6).unwrap();
    let bp = BetaIdentityParams::new(pr, pr.theta - 1.0, 0.2).unwrap();
    let max_term = (pr.n_min()..=200).map(|n| beta_summand(&bp, pr.theta + n as f64).unwrap().abs()).fold(0.0, f64::max);
    let r = beta_lhs(&bp, BETA_N_MAX, BETA_S_MAX, &sp).unwrap();
    let mu_ok = pr.n_min() == 0 && max_term == 0.0 && r.sum == 0.0 && r.residual < 1e-5;

    // θ → 0: the integral term shrinks monotonically and vanishes at θ = 0
    let ints: Vec<f64> = [1e-2, 1e-3, 1e-4, 0.0]
        .iter()
        .map(|&th| {
            let bp = BetaIdentityParams::new(Params::new(0.3, 0.4, th).unwrap(), 0.1, 0.2).unwrap();
            beta_lhs(&bp, BETA_N_MAX, BETA_S_MAX, &sp).unwrap().integral.abs()
        })
        .collect();
    let theta_ok = ints.windows(2).all(|w| w[1] < w[0]) && ints[3] == 0.0;

    outcome(
        worst < 1e-5 && dbw < 1e-6 && dougall < 1e-8 && mu_ok && theta_ok,
        format!(
            "beta grid = {worst:.2e}, dbw = {dbw:.2e}, dougall = {dougall:.2e}, mu=theta-1 sum = {:.1e} (residual {:.1e}), integral terms {:.1e} > {:.1e} > {:.1e} > {:.1e}",
            r.sum, r.residual, ints[0], ints[1], ints[2], ints[3]
        ),
    )
}

fn c10_spectrum() -> Outcome {
    let mut ok = true;
    let mut gap = f64::INFINITY;
    for pr in points() {
        let (dmax, thr, cmin) = spectrum_bounds(&pr, 200, &default_grid());
        ok &= dmax < thr && thr <= cmin;
        gap = gap.min(thr - dmax);
        // continuous λ = thr + s² down to the floor
        ok &= thr <= thr + S_FLOOR * S_FLOOR;
    }
    outcome(ok, format!("smallest gap between threshold and discrete spectrum = {gap:.3e}"))
}

#[test]
fn acceptance() {
    let (reps, secs) = gram_reports();
    let results = [
        ("1 orthogonality", c1_orthogonality(&reps, secs)),
        ("2 norms", c2_norms(&reps)),
        ("3 theta=0 reduction", c3_jacobi_reduction()),
        ("4 eigen-equation", c4_eigen()),
        ("5 boundary gluing", c5_gluing()),
        ("6 cross-integrals", c6_cross_integrals()),
        ("7 mellin/barnes", c7_mellin_barnes()),
        ("8 parseval", c8_parseval()),
        ("9 beta-integral", c9_beta()),
        ("10 spectrum dichotomy", c10_spectrum()),
    ];
    for (name, o) in &results {
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed: Vec<&str> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
