//! The mixed beta-integral obtained from Parseval for ξ_μ, ξ_ν, and its two degenerations.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ortho::Params;
use crate::quadrature::{integrate_half_line, CompensatedSum, QuadratureSpec};
use crate::special::{gamma_bracket_real, ln_abs_gamma_imag, ln_abs_gamma_reduced, ln_gamma, sin_pi};
use crate::spectral::trapezoid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaIdentityParams {
    pub params: Params,
    pub mu: f64,
    pub nu: f64,
}

impl BetaIdentityParams {
    pub fn new(params: Params, mu: f64, nu: f64) -> Result<Self> {
        if !(mu > -0.5 && nu > -0.5) {
            return Err(Error::InvalidParams(format!("need mu, nu > -1/2, got {mu}, {nu}")));
        }
        let bp = Self { params, mu, nu };
        beta_rhs(&bp)?;
        Ok(bp)
    }

    /// k with summand and integrand ~ const·x^{−k}.
    fn decay(&self) -> f64 {
        2.0 * self.mu + 2.0 * self.nu + 2.0 * self.params.alpha + 3.0
    }
}

/// Γ(β+1)Γ(α+μ+ν+1) / [Γ(α+β+μ+ν+2)Γ(μ+1)Γ(ν+1)Γ(α+μ+1)Γ(α+ν+1)].
pub fn beta_rhs(bp: &BetaIdentityParams) -> Result<f64> {
    let (a, b) = (bp.params.alpha, bp.params.beta);
    let (m, n) = (bp.mu, bp.nu);
    gamma_bracket_real(
        &[b + 1.0, a + m + n + 1.0],
        &[a + b + m + n + 2.0, m + 1.0, n + 1.0, a + m + 1.0, a + n + 1.0],
    )
}

/// The integrand of the continuous part without its constant:
/// |Γ(h+is)Γ((−α+β+1)/2+is)Γ(h+θ+is)Γ((−α−β+1)/2−θ+is) / (Γ(2is)Γ(μ+h+1+is)Γ(ν+h+1+is))|²,
/// h = (α+β+1)/2.
pub fn beta_integrand(bp: &BetaIdentityParams, s: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let (a, b, th) = (bp.params.alpha, bp.params.beta, bp.params.theta);
    let h = 0.5 * (a + b + 1.0);
    let lg = |x: f64| -> Result<f64> { Ok(ln_gamma(C::new(x, s))?.re) };
    let num = lg(h)? + lg(0.5 * (-a + b + 1.0))? + lg(h + th)? + lg(0.5 * (1.0 - a - b) - th)?;
    let den = ln_abs_gamma_imag(2.0 * s) + lg(bp.mu + h + 1.0)? + lg(bp.nu + h + 1.0)?;
    Ok((2.0 * (num - den)).exp())
}

/// Summand of the discrete part, pole-free:
/// (2p+α+β+1)Γ[p+α+β+1, p+β+1; p+α+β+μ+2, p+α+β+ν+2, p+α+1, p+1] / (Γ(1+μ−p)Γ(1+ν−p)).
pub fn beta_summand(bp: &BetaIdentityParams, p: f64) -> Result<f64> {
    let (a, b) = (bp.params.alpha, bp.params.beta);
    let (m, n) = (bp.mu, bp.nu);
    let g = gamma_bracket_real(
        &[p + a + b + 1.0, p + b + 1.0],
        &[p + a + b + m + 2.0, p + a + b + n + 2.0, p + a + 1.0, p + 1.0, 1.0 + m - p, 1.0 + n - p],
    )?;
    Ok((2.0 * p + a + b + 1.0) * g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaReport {
    /// Continuous part including its constant and tail correction.
    pub integral: f64,
    /// Discrete part including its tail correction.
    pub sum: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub integral_tail: f64,
    pub sum_tail: f64,
    /// Uncertainty of the two tail corrections.
    pub tail_uncertainty: f64,
}

/// Largest trapezoid step for the continuous part.
pub const BETA_STEP: f64 = 0.05;

/// Σ_{p>p_N} c·p^{−k} ≈ t_N·(p_N/(k−1) − 1/2), the integral analogue without the 1/2.
fn euler_tail(last: f64, x: f64, k: f64, discrete: bool) -> f64 {
    if last == 0.0 {
        return 0.0;
    }
    last * (x / (k - 1.0) - if discrete { 0.5 } else { 0.0 })
}

/// The integrand is even and analytic in a strip of half-width d set by the nearest gamma
/// pole; the trapezoid error is ~exp(−2πd/step), so the step is kept below 2πd/36.
pub fn beta_step(bp: &BetaIdentityParams) -> f64 {
    let (a, b, th) = (bp.params.alpha, bp.params.beta, bp.params.theta);
    let h = 0.5 * (a + b + 1.0);
    let d = [h, 0.5 * (-a + b + 1.0), h + th, 0.5 * (1.0 - a - b) - th]
        .iter()
        .map(|&x| if x >= 0.0 { x } else { (x.ceil() - x).min(x - x.floor()) })
        .fold(f64::INFINITY, f64::min)
        .max(1e-3);
    BETA_STEP.min(2.0 * PI * d / 36.0)
}

/// Left side: sin θπ sin(θ+α)π/(2π³)·∫₀^∞(integrand) + Σ_p summand, with the integral by
/// the trapezoid rule on [0, s_max] and the sum over n_min ≤ n ≤ n_max. Both tails are
/// added from the known power decay; the uncertainty is the change of the corrected
/// values between half and full truncation.
pub fn beta_lhs(bp: &BetaIdentityParams, n_max: i64, s_max: f64, spec: &QuadratureSpec) -> Result<BetaReport> {
    let pr = &bp.params;
    let k = bp.decay();
    if !(k > 1.0) {
        return Err(Error::Domain(format!("beta identity diverges: 2mu+2nu+2alpha+3 = {k} <= 1")));
    }
    if n_max < pr.n_min() + 2 {
        return Err(Error::InvalidParams(format!("n_max = {n_max} too close to n_min = {}", pr.n_min())));
    }
    let kint = sin_pi(pr.theta) * sin_pi(pr.theta + pr.alpha) / (2.0 * PI.powi(3));
    let (integral, integral_tail, int_unc) = if kint == 0.0 {
        (0.0, 0.0, 0.0)
    } else {
        let step = beta_step(bp);
        let n = 2 * (s_max / (2.0 * step)).ceil().max(1.0) as usize;
        let step = s_max / n as f64;
        let xs: Vec<f64> = (0..=n).map(|j| j as f64 * step).collect();
        let ys = xs.par_iter().map(|&s| beta_integrand(bp, s)).collect::<Result<Vec<_>>>()?;
        let est = |m: usize| {
            let t = euler_tail(ys[m], xs[m], k, false);
            (trapezoid(&xs[..=m], &ys[..=m]) + t, t)
        };
        let (full, t) = est(n);
        let (half, _) = est(n / 2);
        (kint * full, kint * t, (kint * (full - half)).abs())
    };
    let terms = (pr.n_min()..=n_max)
        .into_par_iter()
        .map(|n| beta_summand(bp, pr.theta + n as f64))
        .collect::<Result<Vec<_>>>()?;
    let est = |m: usize| {
        let mut acc = CompensatedSum::default();
        for t in &terms[..=m] {
            acc.add(*t);
        }
        let t = euler_tail(terms[m], pr.theta + (pr.n_min() + m as i64) as f64, k, true);
        (acc.value() + t, t)
    };
    let m = terms.len() - 1;
    let (sum, sum_tail) = est(m);
    let sum_unc = (sum - est(m / 2).0).abs();
    let unc = int_unc + sum_unc;
    if unc > spec.tol {
        return Err(Error::NoConvergence { what: "beta identity tails", iterations: n_max.max(0) as usize });
    }
    let lhs = integral + sum;
    let rhs = beta_rhs(bp)?;
    Ok(BetaReport {
        integral,
        sum,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        integral_tail,
        sum_tail,
        tail_uncertainty: unc,
    })
}

/// Default truncation for [`beta_lhs`].
pub const BETA_N_MAX: i64 = 4000;
pub const BETA_S_MAX: f64 = 400.0;

// ---------------------------------------------------------------------------
// De Branges–Wilson

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub est_error: f64,
}

/// Γ(b−a₁−a₂−a₃)ΠΓ(a_j+a_k)/ΠΓ(b−a_k).
pub fn dbw_closed_form(a: [f64; 3], b: f64) -> Result<f64> {
    gamma_bracket_real(
        &[b - a[0] - a[1] - a[2], a[0] + a[1], a[0] + a[2], a[1] + a[2]],
        &[b - a[0], b - a[1], b - a[2]],
    )
}

/// (1/2π)∫₀^∞ |Γ(a₁+is)Γ(a₂+is)Γ(a₃+is)/(Γ(2is)Γ(b+is))|² ds against its closed form.
pub fn dbw_integral_check(a: [f64; 3], b: f64, spec: &QuadratureSpec) -> Result<IdentityCheck> {
    if a.iter().any(|&x| !(x > 0.0)) || !(b > a.iter().sum::<f64>()) {
        return Err(Error::InvalidParams(format!("need a_k > 0 and b > a1+a2+a3, got {a:?}, b = {b}")));
    }
    let r = integrate_half_line(
        |s| {
            if s == 0.0 {
                return Ok(0.0);
            }
            // exponential parts cancel exactly; keep only reduced logs and the power of s
            let r = |x: f64| ln_abs_gamma_reduced(x, s);
            let num = r(a[0])? + r(a[1])? + r(a[2])?;
            let den = ln_abs_gamma_reduced(0.0, 2.0 * s)? + r(b)?;
            let pw = (a[0] + a[1] + a[2] - 1.5) * s.ln() + 0.5 * (2.0 * s).ln() - (b - 0.5) * s.ln();
            Ok((2.0 * (num - den + pw)).exp())
        },
        spec.tol,
        spec.level_max,
    )?;
    let lhs = r.value / (2.0 * PI);
    let rhs = dbw_closed_form(a, b)?;
    Ok(IdentityCheck { lhs, rhs, residual: (lhs - rhs).abs(), est_error: r.est_error / (2.0 * PI) })
}

// ---------------------------------------------------------------------------
// Dougall

/// sin 2πα/(2π)·Γ(a₁+a₂+a₃+a₄−3)/Π_{j<k}Γ(a_j+a_k−1), a₁ = α.
pub fn dougall_closed_form(alpha: f64, a: [f64; 3]) -> Result<f64> {
    let v = [alpha, a[0], a[1], a[2]];
    let mut den = Vec::with_capacity(6);
    for j in 0..4 {
        for k in j + 1..4 {
            den.push(v[j] + v[k] - 1.0);
        }
    }
    Ok(sin_pi(2.0 * alpha) / (2.0 * PI) * gamma_bracket_real(&[v.iter().sum::<f64>() - 3.0], &den)?)
}

/// (α+n)/Π_j Γ(a_j+α+n)Γ(a_j−α−n), a₁ = α.
pub fn dougall_term(alpha: f64, a: [f64; 3], n: i64) -> Result<f64> {
    let x = alpha + n as f64;
    let den: Vec<f64> = [alpha, a[0], a[1], a[2]].iter().flat_map(|&aj| [aj + x, aj - x]).collect();
    Ok(x * gamma_bracket_real(&[], &den)?)
}

/// Bilateral sum over |n| ≤ N (n and −n paired) against the closed form, with the tails
/// added from the power decay. The estimated error is the change of the corrected sum
/// between N/2 and N; above `spec.tol` the check reports NoConvergence.
pub fn dougall_check(alpha: f64, a: [f64; 3], n_max: i64, spec: &QuadratureSpec) -> Result<IdentityCheck> {
    let total: f64 = alpha + a.iter().sum::<f64>();
    // terms decay like |n|^{−(2Σa−5)}
    let k = 2.0 * total - 5.0;
    if !(k > 1.0) {
        return Err(Error::InvalidParams(format!("need a1+a2+a3+a4 > 3, got {total}")));
    }
    if (2.0 * alpha - (2.0 * alpha).round()).abs() < 1e-12 {
        return Err(Error::InvalidParams(format!("alpha = {alpha} is a half-integer")));
    }
    if n_max < 2 {
        return Err(Error::InvalidParams(format!("need N >= 2, got {n_max}")));
    }
    let pairs = (1..=n_max)
        .into_par_iter()
        .map(|n| Ok(dougall_term(alpha, a, n)? + dougall_term(alpha, a, -n)?))
        .collect::<Result<Vec<_>>>()?;
    let t0 = dougall_term(alpha, a, 0)?;
    let est = |m: usize| {
        let mut acc = CompensatedSum::default();
        acc.add(t0);
        for v in &pairs[..m] {
            acc.add(*v);
        }
        acc.value() + euler_tail(pairs[m - 1], m as f64, k, true)
    };
    let n = pairs.len();
    let lhs = est(n);
    let unc = (lhs - est(n / 2)).abs();
    if unc > spec.tol {
        return Err(Error::NoConvergence { what: "dougall sum tails", iterations: n });
    }
    let rhs = dougall_closed_form(alpha, a)?;
    Ok(IdentityCheck { lhs, rhs, residual: (lhs - rhs).abs(), est_error: unc })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_sample_point() {
        let bp = BetaIdentityParams::new(Params::new(0.3, 0.4, 0.25).unwrap(), 0.1, 0.2).unwrap();
        let spec = QuadratureSpec { tol: 1e-7, ..Default::default() };
        let r = beta_lhs(&bp, BETA_N_MAX, BETA_S_MAX, &spec).unwrap();
        assert!(r.residual < 1e-5, "{r:?}");
        assert!(r.residual < 1e-12 && r.tail_uncertainty < 1e-10, "{r:?}");
        let sw = BetaIdentityParams::new(bp.params, 0.2, 0.1).unwrap();
        assert_eq!(beta_rhs(&bp).unwrap(), beta_rhs(&sw).unwrap());
    }

    #[test]
    fn dbw() {
        let r = dbw_integral_check([0.3, 0.4, 0.5], 2.0, &QuadratureSpec::default()).unwrap();
        assert!(r.residual < 1e-9, "{r:?}");
        let r2 = dbw_closed_form([0.5, 0.3, 0.4], 2.0).unwrap();
        assert!((r.rhs - r2).abs() < 1e-14 * r2);
    }

    #[test]
    fn dougall() {
        let spec = QuadratureSpec { tol: 1e-9, ..Default::default() };
        let r = dougall_check(0.2, [1.3, 1.4, 1.5], 200, &spec).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
        assert!(dougall_check(0.2, [1.3, 1.4, 1.5], 200, &QuadratureSpec::default()).is_err());
    }
}
