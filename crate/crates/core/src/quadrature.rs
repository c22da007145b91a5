//! Double-exponential quadrature and the pairings {f, g}, ⟨f, g⟩.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ortho::{phi_norm_sq, Abscissa, Params, Phi, PiecewiseFn};
use crate::special::{gamma_bracket_real, rgamma_real, sin_pi};

/// Values the DE rules can integrate.
pub trait Scalar:
    Copy + Send + Sync + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
    fn finite(self) -> bool;
}

impl Scalar for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn add(&mut self, v: T) {
        let t = self.sum + v;
        if self.sum.magnitude() >= v.magnitude() {
            self.comp = self.comp + ((self.sum - t) + v);
        } else {
            self.comp = self.comp + ((v - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// The three double-exponential substitutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeKind {
    /// (0, 1): x = 1/(1+e^{−π sinh u})
    TanhSinh,
    /// (0, ∞): x = exp((π/2) sinh u)
    ExpSinh,
    /// (−∞, ∞): x = sinh((π/2) sinh u)
    SinhSinh,
}

/// A quadrature node: abscissa, its complement (1 − x for tanh-sinh, x otherwise)
/// and the Jacobian dx/du.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeNode {
    pub x: f64,
    pub xc: f64,
    pub w: f64,
}

impl DeKind {
    fn u_max(self) -> f64 {
        match self {
            // keeps both endpoint distances above ~1e-300
            DeKind::TanhSinh => 6.08,
            DeKind::ExpSinh | DeKind::SinhSinh => 6.7,
        }
    }

    pub fn node(self, u: f64) -> DeNode {
        let v = 0.5 * PI * u.sinh();
        let dv = 0.5 * PI * u.cosh();
        match self {
            DeKind::TanhSinh => {
                let x = 1.0 / (1.0 + (-2.0 * v).exp());
                let xc = 1.0 / (1.0 + (2.0 * v).exp());
                DeNode { x, xc, w: 2.0 * dv * x * xc }
            }
            DeKind::ExpSinh => {
                let x = v.exp();
                DeNode { x, xc: x, w: x * dv }
            }
            DeKind::SinhSinh => {
                let x = v.sinh();
                DeNode { x, xc: x, w: v.cosh() * dv }
            }
        }
    }
}

/// Result of a DE integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeResult<T> {
    pub value: T,
    /// |I_k − I_{k−1}| at the final level
    pub est_error: f64,
    pub levels: u32,
    pub evals: usize,
}

const H0: f64 = 0.5;
const MIN_LEVEL: u32 = 3;

/// Integrate `f(node)·node.w` over u ∈ ℝ with step halving until two successive levels
/// agree to `tol·max(1, |I|)`.
pub fn de_integrate<T, F>(kind: DeKind, f: F, tol: f64, level_max: u32) -> Result<DeResult<T>>
where
    T: Scalar,
    F: Fn(DeNode) -> Result<T> + Sync,
{
    let umax = kind.u_max();
    // nodes j·h with j ≡ 1 (mod 2), or every j when `all`
    let level = |h: f64, all: bool| -> Result<Vec<T>> {
        let jmax = (umax / h).floor() as i64;
        let js: Vec<i64> = (-jmax..=jmax).filter(|j| all || j.rem_euclid(2) == 1).collect();
        js.par_iter()
            .map(|&j| {
                let nd = kind.node(j as f64 * h);
                if nd.w == 0.0 {
                    return Ok(T::default());
                }
                let v = f(nd)?;
                if !v.finite() {
                    return Err(Error::Domain(format!("non-finite integrand at x = {:e}", nd.x)));
                }
                Ok(v * nd.w)
            })
            .collect()
    };
    let mut acc = CompensatedSum::<T>::default();
    let mut evals = 0;
    for v in level(H0, true)? {
        acc.add(v);
        evals += 1;
    }
    let mut prev = acc.value() * H0;
    let mut h = H0;
    for lv in 1..=level_max {
        h *= 0.5;
        for v in level(h, false)? {
            acc.add(v);
            evals += 1;
        }
        let cur = acc.value() * h;
        let err = (cur - prev).magnitude();
        if lv >= MIN_LEVEL && err <= tol * cur.magnitude().max(1.0) {
            return Ok(DeResult { value: cur, est_error: err, levels: lv, evals });
        }
        prev = cur;
    }
    Err(Error::NoConvergence { what: "double-exponential quadrature", iterations: level_max as usize })
}

/// ∫₀¹ g(x, 1−x) dx with the complement carried exactly.
pub fn integrate_unit<T: Scalar>(
    g: impl Fn(f64, f64) -> Result<T> + Sync,
    tol: f64,
    level_max: u32,
) -> Result<DeResult<T>> {
    de_integrate(DeKind::TanhSinh, |nd| g(nd.x, nd.xc), tol, level_max)
}

/// ∫₀^∞ g(x) dx.
pub fn integrate_half_line<T: Scalar>(
    g: impl Fn(f64) -> Result<T> + Sync,
    tol: f64,
    level_max: u32,
) -> Result<DeResult<T>> {
    de_integrate(DeKind::ExpSinh, |nd| g(nd.x), tol, level_max)
}

/// ∫_{−∞}^{∞} g(x) dx.
pub fn integrate_line<T: Scalar>(
    g: impl Fn(f64) -> Result<T> + Sync,
    tol: f64,
    level_max: u32,
) -> Result<DeResult<T>> {
    de_integrate(DeKind::SinhSinh, |nd| g(nd.x), tol, level_max)
}

// ---------------------------------------------------------------------------
// Pairings

/// Accuracy controls for the pairings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Target error, absolute for values below 1 and relative above.
    pub tol: f64,
    /// Upper end of the right-hand integral; `INFINITY` integrates the whole half-line
    /// through y = 1/x.
    pub x_max: f64,
    pub level_max: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { tol: 1e-11, x_max: f64::INFINITY, level_max: 9 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol >= 1e-12) {
            return Err(Error::InvalidParams(format!("need tol >= 1e-12, got {}", self.tol)));
        }
        if !(self.x_max > 1.0) {
            return Err(Error::InvalidParams(format!("need x_max > 1, got {}", self.x_max)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingResult {
    pub value: f64,
    pub est_error: f64,
    pub tail_bound: f64,
    /// ∫₀¹ f g (1−x)^α x^β dx
    pub left: f64,
    /// ∫₁^{x_max} f g (x−1)^α x^β dx, before the sine-ratio factor
    pub right: f64,
    /// Whether the Hermitian form is positive definite for these parameters.
    pub positive_definite: bool,
}

/// ∫₀¹ f g (1−x)^α x^β dx + [sin((α+θ)π)/sin θπ] ∫₁^∞ f g (x−1)^α x^β dx.
///
/// At θ = 0 only the first integral is taken.
pub fn bilinear_pairing(
    params: &Params,
    f: &dyn PiecewiseFn,
    g: &dyn PiecewiseFn,
    spec: &QuadratureSpec,
) -> Result<PairingResult> {
    spec.validate()?;
    let (al, be) = (params.alpha, params.beta);
    let (kf, kg) = (f.decay(), g.decay());
    let right_zero = matches!((kf, kg), (Some(a), _) | (_, Some(a)) if a == f64::INFINITY);
    let sr = params.sin_ratio();
    if let (Some(_), Some(a), Some(b)) = (sr, kf, kg) {
        if !right_zero && a + b - al - be - 1.0 <= 0.0 {
            return Err(Error::Domain(format!(
                "pairing diverges at infinity: decay {a} + {b} <= alpha + beta + 1"
            )));
        }
    }

    let left_job = || {
        integrate_unit(
            |x, t| {
                let at = Abscissa::Below { x, t };
                let w = t.powf(al) * x.powf(be);
                Ok(w * f.eval(at)? * g.eval(at)?)
            },
            spec.tol,
            spec.level_max,
        )
    };
    let right_job = || -> Result<Option<(DeResult<f64>, f64)>> {
        if sr.is_none() || right_zero {
            return Ok(None);
        }
        let y0 = if spec.x_max.is_finite() { 1.0 / spec.x_max } else { 0.0 };
        let span = 1.0 - y0;
        let half = 0.5 * (al + be + 2.0);
        let r = integrate_unit(
            |v, vc| {
                let y = y0 + span * v;
                let yc = span * vc; // 1 − y
                let t = yc / y;
                let w = span * yc.powf(al);
                Ok(w * f.eval_above_scaled(y, t, half)? * g.eval_above_scaled(y, t, half)?)
            },
            spec.tol,
            spec.level_max,
        )?;
        let tail = if spec.x_max.is_finite() { tail_bound(params, f, g, spec.x_max)? } else { 0.0 };
        Ok(Some((r, tail)))
    };
    let (left, right) = rayon::join(left_job, right_job);
    let left = left?;
    let right = right?;
    let (rv, re, tail) = match right {
        Some((r, tail)) => (r.value, r.est_error, tail),
        None => (0.0, 0.0, 0.0),
    };
    let s = sr.unwrap_or(0.0);
    Ok(PairingResult {
        value: left.value + s * rv,
        est_error: left.est_error + s.abs() * re,
        tail_bound: s.abs() * tail,
        left: left.value,
        right: rv,
        positive_definite: params.positive_definite(),
    })
}

fn tail_bound(params: &Params, f: &dyn PiecewiseFn, g: &dyn PiecewiseFn, x_max: f64) -> Result<f64> {
    let (Some(a), Some(b)) = (f.decay(), g.decay()) else {
        return Err(Error::Domain("a finite x_max needs declared decay rates".into()));
    };
    let k = a + b - params.alpha - params.beta - 1.0;
    let at = Abscissa::from_x(x_max)?;
    let v = (f.eval(at)? * g.eval(at)?).abs() * (x_max - 1.0).powf(params.alpha) * x_max.powf(params.beta);
    Ok(v * x_max / k)
}

/// Hermitian product ⟨f, g⟩; identical to the bilinear form for real-valued f, g.
pub fn hermitian_pairing(
    params: &Params,
    f: &dyn PiecewiseFn,
    g: &dyn PiecewiseFn,
    spec: &QuadratureSpec,
) -> Result<PairingResult> {
    bilinear_pairing(params, f, g, spec)
}

// ---------------------------------------------------------------------------
// Gram matrix

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub p: Vec<f64>,
    /// G[m][n] = {Φ_pm, Φ_pn}
    pub matrix: Vec<Vec<f64>>,
    pub est_error: Vec<Vec<f64>>,
    pub closed_diag: Vec<f64>,
    /// max over m ≠ n of |G_mn| / √|G_mm G_nn|
    pub max_off_rel: f64,
    /// max over m of |G_mm / closed − 1|
    pub max_diag_rel: f64,
}

/// {Φ_p, Φ_q} for all pairs from `ps`, each entry computed once and mirrored.
pub fn gram_matrix(params: &Params, ps: &[f64], spec: &QuadratureSpec) -> Result<GramReport> {
    let phis = ps.iter().map(|&p| Phi::with_p(params, p)).collect::<Result<Vec<_>>>()?;
    let k = ps.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|m| (m..k).map(move |n| (m, n))).collect();
    let vals = pairs
        .par_iter()
        .map(|&(m, n)| bilinear_pairing(params, &phis[m], &phis[n], spec))
        .collect::<Result<Vec<_>>>()?;
    let mut matrix = vec![vec![0.0; k]; k];
    let mut est_error = vec![vec![0.0; k]; k];
    for (&(m, n), r) in pairs.iter().zip(&vals) {
        matrix[m][n] = r.value;
        matrix[n][m] = r.value;
        est_error[m][n] = r.est_error + r.tail_bound;
        est_error[n][m] = est_error[m][n];
    }
    let closed_diag = ps.iter().map(|&p| phi_norm_sq(params, p)).collect::<Result<Vec<_>>>()?;
    let mut max_off_rel = 0.0f64;
    let mut max_diag_rel = 0.0f64;
    for m in 0..k {
        max_diag_rel = max_diag_rel.max((matrix[m][m] / closed_diag[m] - 1.0).abs());
        for n in 0..k {
            if m != n {
                max_off_rel = max_off_rel.max(matrix[m][n].abs() / (matrix[m][m] * matrix[n][n]).abs().sqrt());
            }
        }
    }
    Ok(GramReport { p: ps.to_vec(), matrix, est_error, closed_diag, max_off_rel, max_diag_rel })
}

// ---------------------------------------------------------------------------
// Closed-form cross integrals

fn a_pq(params: &Params, p: f64, q: f64) -> Result<f64> {
    let s = params.alpha + params.beta + 2.0;
    Ok(gamma_bracket_real(&[2.0 * p + s, 2.0 * q + s], &[])? / (p + q + s - 1.0))
}

fn b_pq(params: &Params, p: f64, q: f64) -> Result<f64> {
    let (a, b) = (params.alpha, params.beta);
    gamma_bracket_real(&[q + 1.0, p + a + 1.0], &[p + b + 1.0, q + a + b + 1.0])
}

fn check_cross(params: &Params, p: f64, q: f64) -> Result<()> {
    if !(p + q + params.alpha + params.beta + 1.0 > 0.0) {
        return Err(Error::Domain(format!("need p + q + alpha + beta + 1 > 0, got p = {p}, q = {q}")));
    }
    if (p - q).abs() < 1e-12 {
        return Err(Error::Domain("cross integrals need p != q; use the norm formula".into()));
    }
    Ok(())
}

/// ∫₀¹ Φ_p Φ_q x^β (1−x)^α dx in closed form (p ≠ q).
pub fn cross_integral_x(params: &Params, p: f64, q: f64) -> Result<f64> {
    check_cross(params, p, q)?;
    let (a, b) = (params.alpha, params.beta);
    let t1 = rgamma_real(p + b + 1.0)? * rgamma_real(q + a + b + 1.0)? * rgamma_real(-q)? * rgamma_real(-p - a)?;
    let t2 = rgamma_real(q + b + 1.0)? * rgamma_real(p + a + b + 1.0)? * rgamma_real(-p)? * rgamma_real(-q - a)?;
    Ok(PI * a_pq(params, p, q)? / ((q - p) * sin_pi(a)) * (t1 - t2))
}

/// The same integral written with sine factors; undefined when p or q is an integer.
pub fn cross_integral_x_sine_form(params: &Params, p: f64, q: f64) -> Result<f64> {
    check_cross(params, p, q)?;
    let a = params.alpha;
    let (sp, sq) = (sin_pi(p), sin_pi(q));
    if sp == 0.0 || sq == 0.0 {
        return Err(Error::Domain("sine form needs non-integer p, q".into()));
    }
    let pref = a_pq(params, p, q)? * sp * sq / (PI * (q - p) * sin_pi(a));
    Ok(pref * (sin_pi(a + p) / sp * b_pq(params, p, q)? - sin_pi(a + q) / sq * b_pq(params, q, p)?))
}

/// ∫₁^∞ Φ_p Φ_q x^β (x−1)^α dx in closed form (p ≠ q).
pub fn cross_integral_y(params: &Params, p: f64, q: f64) -> Result<f64> {
    check_cross(params, p, q)?;
    let a = params.alpha;
    let pref = a_pq(params, p, q)? * sin_pi(p) * sin_pi(q) / (PI * (q - p) * sin_pi(a));
    if pref == 0.0 {
        return Ok(0.0);
    }
    Ok(pref * (b_pq(params, q, p)? - b_pq(params, p, q)?))
}
