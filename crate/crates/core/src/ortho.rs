//! Jacobi polynomials, the piecewise family Φ_p, the continuous-spectrum functions Ψ_s
//! and the basis Λ(s, x) at infinity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp2f1::{self, f21_eval, f21_eval_t, kummer_1_over_x, kummer_at_1, pow_real, HypParams, TwoTerm};
use crate::special::{gamma_bracket_real, gamma_real, pole_index_real, sin_pi, sin_ratio, GammaBracket};

type C = Complex64;

/// Local expansions are used within this distance of x = 1.
pub const SWITCH_RADIUS: f64 = 0.3;
/// Smallest s at which Ψ_s is evaluated.
pub const S_FLOOR: f64 = 1e-6;
// two-term expansions cancelling by more than this fall back to the direct path
const LOCAL_COND: f64 = 1e3;

/// The parameter triple (α, β, θ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
}

impl Params {
    pub fn new(alpha: f64, beta: f64, theta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && theta.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(alpha > -1.0 && alpha < 1.0) {
            return Err(Error::InvalidParams(format!("need -1 < alpha < 1, got alpha = {alpha}")));
        }
        if alpha.abs() < 1e-9 {
            return Err(Error::InvalidParams("need alpha != 0 (logarithmic case)".into()));
        }
        if !(beta > -1.0) {
            return Err(Error::InvalidParams(format!("need beta > -1, got beta = {beta}")));
        }
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::InvalidParams(format!("need 0 <= theta < 1, got theta = {theta}")));
        }
        Ok(Self { alpha, beta, theta })
    }

    /// (α+β+1)/2
    pub fn h(&self) -> f64 {
        0.5 * (self.alpha + self.beta + 1.0)
    }

    /// sin((α+θ)π)/sin(θπ); `None` at θ = 0 where the right half-line carries no weight.
    pub fn sin_ratio(&self) -> Option<f64> {
        (self.theta != 0.0).then(|| sin_ratio(self.alpha, self.theta).expect("theta in (0,1)"))
    }

    /// Whether the Hermitian product is positive definite.
    pub fn positive_definite(&self) -> bool {
        self.sin_ratio().map_or(true, |r| r > 0.0)
    }

    /// β is a non-negative integer (degenerate gamma factors in some brackets).
    pub fn beta_degenerate(&self) -> bool {
        self.beta >= 0.0 && (self.beta - self.beta.round()).abs() < 1e-9
    }

    /// Least admissible n. At θ = 0 the family is the Jacobi system, so n ≥ 0.
    pub fn n_min(&self) -> i64 {
        let mut n = (-(self.alpha + self.beta + 1.0) / 2.0 - self.theta).floor() as i64 - 1;
        while 2.0 * (self.theta + n as f64) + self.alpha + self.beta + 1.0 <= 0.0 {
            n += 1;
        }
        if self.theta == 0.0 {
            n = n.max(0);
        }
        n
    }

    pub fn index(&self, n: i64) -> Result<SpectralIndex> {
        SpectralIndex::new(self, n)
    }

    /// Indices n_min..=n_max that are admissible.
    pub fn indices(&self, n_max: i64) -> Vec<SpectralIndex> {
        (self.n_min()..=n_max).filter_map(|n| self.index(n).ok()).collect()
    }
}

/// p = θ + n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralIndex {
    pub n: i64,
    pub p: f64,
}

impl SpectralIndex {
    pub fn new(params: &Params, n: i64) -> Result<Self> {
        let p = params.theta + n as f64;
        if n < params.n_min() {
            return Err(Error::InvalidParams(format!(
                "n = {n} below n_min = {} (need 2p+alpha+beta+1 > 0)",
                params.n_min()
            )));
        }
        if pole_index_real(1.0 + p + params.alpha).is_some() {
            return Err(Error::InvalidParams(format!("1 + p + alpha = 0 at p = {p}")));
        }
        Ok(Self { n, p })
    }
}

/// A point x > 0, x ≠ 1, with its distance to 1 carried exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Abscissa {
    /// 0 < x < 1, t = 1 − x
    Below { x: f64, t: f64 },
    /// x > 1 given through y = 1/x, t = x − 1
    Above { y: f64, t: f64 },
}

impl Abscissa {
    pub fn from_x(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
        if x == 1.0 {
            return Err(Error::SingularPoint(1.0));
        }
        if x <= 0.0 {
            return Err(Error::Domain(format!("need x > 0, got {x}")));
        }
        Ok(if x < 1.0 {
            Abscissa::Below { x, t: 1.0 - x }
        } else {
            Abscissa::Above { y: 1.0 / x, t: x - 1.0 }
        })
    }

    pub fn x(&self) -> f64 {
        match *self {
            Abscissa::Below { x, .. } => x,
            Abscissa::Above { t, .. } => 1.0 + t,
        }
    }

    /// |x − 1|
    pub fn dist(&self) -> f64 {
        match *self {
            Abscissa::Below { t, .. } | Abscissa::Above { t, .. } => t,
        }
    }
}

/// Coefficients of f = A·u + B·|1−x|^{−α}·v near x = 1 on each side, with u(1) = v(1) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalExpansion {
    pub a_left: f64,
    pub b_left: f64,
    pub a_right: f64,
    pub b_right: f64,
}

impl LocalExpansion {
    /// (B_left − B_right, A_right·sin((α+θ)π)/sin θπ − A_left) for θ ≠ 0.
    /// At θ = 0 the condition degenerates to B_left = B_right and A_right = 0.
    pub fn gluing_defects(&self, params: &Params) -> (f64, f64) {
        let db = self.b_left - self.b_right;
        let da = match params.sin_ratio() {
            Some(r) => self.a_right * r - self.a_left,
            None => self.a_right,
        };
        (db, da)
    }

    pub fn scale(&self) -> f64 {
        [self.a_left, self.b_left, self.a_right, self.b_right]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE)
    }
}

/// A real function on (0,1) ∪ (1,∞).
pub trait PiecewiseFn: Sync {
    fn eval(&self, at: Abscissa) -> Result<f64>;

    fn at(&self, x: f64) -> Result<f64> {
        self.eval(Abscissa::from_x(x)?)
    }

    /// f(x)·y^{−e} on (1,∞), y = 1/x. Override when y^{−e} alone would overflow.
    fn eval_above_scaled(&self, y: f64, t: f64, e: f64) -> Result<f64> {
        let v = self.eval(Abscissa::Above { y, t })?;
        Ok(if v == 0.0 { 0.0 } else { v * y.powf(-e) })
    }

    /// κ with f(x) = O(x^{−κ}) as x → ∞; `f64::INFINITY` if f vanishes on (1,∞).
    fn decay(&self) -> Option<f64> {
        None
    }

    /// Behaviour near x = 1, if known in closed form.
    fn local(&self) -> Option<LocalExpansion> {
        None
    }
}

/// Wraps a closure as a [`PiecewiseFn`].
pub struct FnPiecewise<F> {
    pub f: F,
    pub decay: Option<f64>,
    pub local: Option<LocalExpansion>,
}

impl<F: Fn(Abscissa) -> Result<f64> + Sync> FnPiecewise<F> {
    pub fn new(f: F) -> Self {
        Self { f, decay: None, local: None }
    }
}

impl<F: Fn(Abscissa) -> Result<f64> + Sync> PiecewiseFn for FnPiecewise<F> {
    fn eval(&self, at: Abscissa) -> Result<f64> {
        (self.f)(at)
    }
    fn decay(&self) -> Option<f64> {
        self.decay
    }
    fn local(&self) -> Option<LocalExpansion> {
        self.local
    }
}

/// The zero function.
pub struct Zero;

impl PiecewiseFn for Zero {
    fn eval(&self, _: Abscissa) -> Result<f64> {
        Ok(0.0)
    }
    fn decay(&self) -> Option<f64> {
        Some(f64::INFINITY)
    }
}

// ---------------------------------------------------------------------------
// Jacobi polynomials

/// Which of the three hypergeometric representations of P_n^{α,β} to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobiFormula {
    /// Γ(n+α+1)/(Γ(α+1)n!) F[−n, n+α+β+1; α+1; (1−y)/2]
    One,
    /// (−1)ⁿΓ(n+β+1)/(Γ(β+1)n!) F[−n, n+α+β+1; β+1; (1+y)/2]
    Two,
    /// (−1)ⁿΓ(n+β+1)/(Γ(β+1)n!) ((1−y)/2)^{−α} F[n+β+1, −α−n; β+1; (1+y)/2]
    Three,
}

pub fn jacobi_eval(n: u32, alpha: f64, beta: f64, y: f64, formula: JacobiFormula) -> Result<f64> {
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::InvalidParams("jacobi needs alpha, beta > -1".into()));
    }
    if !(-1.0..=1.0).contains(&y) {
        return Err(Error::Domain(format!("jacobi needs y in [-1, 1], got {y}")));
    }
    let nf = n as f64;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    match formula {
        JacobiFormula::One => {
            let k = gamma_bracket_real(&[nf + alpha + 1.0], &[alpha + 1.0, nf + 1.0])?;
            Ok(k * hyp2f1::f21_real(-nf, nf + alpha + beta + 1.0, alpha + 1.0, (1.0 - y) / 2.0)?)
        }
        JacobiFormula::Two => {
            let k = sign * gamma_bracket_real(&[nf + beta + 1.0], &[beta + 1.0, nf + 1.0])?;
            Ok(k * hyp2f1::f21_real(-nf, nf + alpha + beta + 1.0, beta + 1.0, (1.0 + y) / 2.0)?)
        }
        JacobiFormula::Three => {
            if y == 1.0 {
                return Err(Error::Domain("formula 3 is singular at y = 1".into()));
            }
            let k = sign * gamma_bracket_real(&[nf + beta + 1.0], &[beta + 1.0, nf + 1.0])?;
            let t = (1.0 - y) / 2.0;
            let hp = HypParams::real(nf + beta + 1.0, -alpha - nf, beta + 1.0);
            Ok(k * t.powf(-alpha) * f21_eval_t(&hp, t)?.re)
        }
    }
}

/// ∫₋₁¹ P_n² (1−y)^α (1+y)^β dy.
pub fn jacobi_norm_sq(n: u32, alpha: f64, beta: f64) -> Result<f64> {
    let nf = n as f64;
    let num = [nf + alpha + 1.0, nf + beta + 1.0];
    let v = if n == 0 {
        gamma_bracket_real(&num, &[alpha + beta + 2.0])?
    } else {
        gamma_bracket_real(&num, &[nf + 1.0, nf + alpha + beta + 1.0])? / (2.0 * nf + alpha + beta + 1.0)
    };
    Ok(2f64.powf(alpha + beta + 1.0) * v)
}

/// c_n with Φ_n(x) = c_n P_n^{α,β}(2x−1) on (0,1) when θ = 0.
pub fn theta0_constant(params: &Params, n: u32) -> Result<f64> {
    let nf = n as f64;
    let (a, b) = (params.alpha, params.beta);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * gamma_bracket_real(&[2.0 * nf + a + b + 2.0, nf + 1.0], &[nf + b + 1.0])?)
}

/// Closed-form {Φ_p, Φ_p}.
pub fn phi_norm_sq(params: &Params, p: f64) -> Result<f64> {
    let (a, b) = (params.alpha, params.beta);
    let g = 2.0 * p + a + b + 2.0;
    Ok(gamma_bracket_real(&[g, g, 1.0 + p + a, p + 1.0], &[p + b + 1.0, p + a + b + 1.0])?
        / (2.0 * p + a + b + 1.0))
}

// ---------------------------------------------------------------------------
// Φ_p

/// Φ_p(x): Γ(2p+α+β+2)/Γ(β+1)·F[−p, p+α+β+1; β+1; x] on (0,1) and
/// Γ(1+p+α)/Γ(−p)·F[p+α+1, p+α+β+1; 2p+α+β+2; 1/x]·x^{−α−β−p−1} on (1,∞).
#[derive(Debug, Clone)]
pub struct Phi {
    pub params: Params,
    pub p: f64,
    left_pref: f64,
    right_pref: f64,
    left_hp: HypParams,
    right_hp: HypParams,
    left_local: TwoTerm,
    right_local: Option<TwoTerm>,
}

impl Phi {
    pub fn new(params: &Params, idx: SpectralIndex) -> Result<Self> {
        Self::with_p(params, idx.p)
    }

    /// Φ_p for any real p (not necessarily in θ + ℤ) away from gamma poles.
    pub fn with_p(params: &Params, p: f64) -> Result<Self> {
        let (a, b) = (params.alpha, params.beta);
        let left_pref = gamma_bracket_real(&[2.0 * p + a + b + 2.0], &[b + 1.0])?;
        let right_pref = gamma_bracket_real(&[1.0 + p + a], &[-p])?;
        let left_hp = HypParams::real(-p, p + a + b + 1.0, b + 1.0);
        let right_hp = HypParams::real(p + a + b + 1.0, p + a + 1.0, 2.0 * p + a + b + 2.0);
        let left_local = kummer_at_1(&left_hp)?;
        let right_local = if right_pref == 0.0 { None } else { Some(kummer_1_over_x(&right_hp)?) };
        Ok(Self { params: *params, p, left_pref, right_pref, left_hp, right_hp, left_local, right_local })
    }

    fn right_exponent(&self) -> f64 {
        self.params.alpha + self.params.beta + self.p + 1.0
    }

    /// Evaluation without the local expansions: series / ODE continuation in x or 1/x.
    pub fn eval_direct(&self, at: Abscissa) -> Result<f64> {
        match at {
            Abscissa::Below { x, .. } => Ok(self.left_pref * hyp2f1_ode(&self.left_hp, x)?.re),
            Abscissa::Above { y, .. } => {
                if self.right_pref == 0.0 {
                    return Ok(0.0);
                }
                Ok(self.right_pref * y.powf(self.right_exponent()) * hyp2f1_ode(&self.right_hp, y)?.re)
            }
        }
    }

    /// Evaluation through the expansions at x = 1.
    pub fn eval_local(&self, at: Abscissa) -> Result<f64> {
        match at {
            Abscissa::Below { t, .. } => Ok(self.left_pref * self.left_local.eval(t)?.re),
            Abscissa::Above { t, .. } => match &self.right_local {
                None => Ok(0.0),
                Some(tt) => Ok(self.right_pref * tt.eval(-t)?.re),
            },
        }
    }

    pub fn local_expansion(&self) -> LocalExpansion {
        let l = &self.left_local;
        let (ar, br) = match &self.right_local {
            Some(r) => (self.right_pref * r.coef_reg.re, self.right_pref * r.coef_sing.re),
            None => (0.0, 0.0),
        };
        LocalExpansion {
            a_left: self.left_pref * l.coef_reg.re,
            b_left: self.left_pref * l.coef_sing.re,
            a_right: ar,
            b_right: br,
        }
    }
}

/// ₂F₁ through the near-0 series and ODE continuation only (no connection formulas).
pub fn hyp2f1_ode(hp: &HypParams, x: f64) -> Result<C> {
    if hp.terminating_degree().is_some() || x.abs() <= 0.5 {
        return f21_eval(hp, x);
    }
    hyp2f1::f21_eval_ode(hp, x)
}

impl PiecewiseFn for Phi {
    fn eval(&self, at: Abscissa) -> Result<f64> {
        match at {
            Abscissa::Below { x, t } => {
                if t < SWITCH_RADIUS {
                    Ok(self.left_pref * f21_eval_t(&self.left_hp, t)?.re)
                } else {
                    Ok(self.left_pref * f21_eval(&self.left_hp, x)?.re)
                }
            }
            Abscissa::Above { y, t } => {
                let Some(tt) = &self.right_local else { return Ok(0.0) };
                if t < SWITCH_RADIUS {
                    let (r, s) = tt.eval_parts(-t)?;
                    let v = r + s;
                    if r.norm() + s.norm() <= LOCAL_COND * v.norm() {
                        return Ok(self.right_pref * v.re);
                    }
                }
                Ok(self.right_pref * y.powf(self.right_exponent()) * f21_eval(&self.right_hp, y)?.re)
            }
        }
    }

    fn eval_above_scaled(&self, y: f64, t: f64, e: f64) -> Result<f64> {
        if self.right_local.is_none() {
            return Ok(0.0);
        }
        if t < SWITCH_RADIUS {
            return Ok(self.eval(Abscissa::Above { y, t })? * y.powf(-e));
        }
        Ok(self.right_pref * y.powf(self.right_exponent() - e) * f21_eval(&self.right_hp, y)?.re)
    }

    fn decay(&self) -> Option<f64> {
        Some(if self.right_pref == 0.0 { f64::INFINITY } else { self.right_exponent() })
    }

    fn local(&self) -> Option<LocalExpansion> {
        Some(self.local_expansion())
    }
}

/// Φ_p(x) for a spectral index.
pub fn phi_p(params: &Params, idx: SpectralIndex, x: f64) -> Result<f64> {
    Phi::new(params, idx)?.at(x)
}

/// Local (A, B) data of Φ_p at x = 1.
pub fn phi_p_local(params: &Params, idx: SpectralIndex) -> Result<LocalExpansion> {
    Ok(Phi::new(params, idx)?.local_expansion())
}

// ---------------------------------------------------------------------------
// Ψ_s and Λ(s, x)

/// Λ(s, x) = F[h+is, (α−β+1)/2+is; 1+2is; 1/x]·x^{−h−is}, h = (α+β+1)/2.
#[derive(Debug, Clone)]
pub struct Lambda {
    hp: HypParams,
    local: TwoTerm,
}

impl Lambda {
    pub fn new(params: &Params, s: f64) -> Result<Self> {
        let h = params.h();
        let hp = HypParams::new(
            C::new(h, s),
            C::new((params.alpha - params.beta + 1.0) / 2.0, s),
            C::new(1.0, 2.0 * s),
        );
        Ok(Self { hp, local: kummer_1_over_x(&hp)? })
    }

    pub fn eval(&self, y: f64, t: f64) -> Result<C> {
        self.eval_scaled(y, t, 0.0)
    }

    /// Λ·y^{−e}.
    pub fn eval_scaled(&self, y: f64, t: f64, e: f64) -> Result<C> {
        if t < SWITCH_RADIUS {
            let (r, s) = self.local.eval_parts(-t)?;
            let v = r + s;
            if r.norm() + s.norm() <= LOCAL_COND * v.norm() {
                return Ok(v * y.powf(-e));
            }
        }
        Ok(pow_real(y, self.hp.a - e) * f21_eval(&self.hp, y)?)
    }

    /// (U, V): Λ = U·u(x) + V·(x−1)^{−α}·v(x) near x = 1.
    pub fn local_coefficients(&self) -> (C, C) {
        (self.local.coef_reg, self.local.coef_sing)
    }
}

/// Λ(s, x) for x > 1.
pub fn lambda_basis(params: &Params, s: f64, x: f64) -> Result<C> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("lambda_basis needs x > 1, got {x}")));
    }
    Lambda::new(params, s)?.eval(1.0 / x, x - 1.0)
}

/// Ψ_s: Re F[h+is, h−is; β+1; x] on (0,1) and Re{C(s)·Λ(s,x)} on (1,∞).
#[derive(Debug, Clone)]
pub struct Psi {
    pub params: Params,
    pub s: f64,
    left_hp: HypParams,
    left_local: TwoTerm,
    lambda: Lambda,
    coef: C,
}

impl Psi {
    pub fn new(params: &Params, s: f64) -> Result<Self> {
        let s_abs = s.abs();
        if !s.is_finite() {
            return Err(Error::NonFinite);
        }
        if s_abs < S_FLOOR {
            return Err(Error::Pole(C::new(0.0, -2.0 * s)));
        }
        // Ψ_s = Ψ_{−s}; work with s > 0 throughout
        let s = s_abs;
        let (a, b, th) = (params.alpha, params.beta, params.theta);
        let h = params.h();
        let left_hp = HypParams::new(C::new(h, s), C::new(h, -s), C::new(b + 1.0, 0.0));
        let left_local = kummer_at_1(&left_hp)?;
        let lambda = Lambda::new(params, s)?;
        let k = 2.0 * gamma_real(b + 1.0)? / sin_pi(th + a);
        let g = GammaBracket::new(
            vec![C::new(0.0, -2.0 * s)],
            vec![C::new(h, -s), C::new((-a + b + 1.0) / 2.0, -s)],
        )
        .eval()?;
        let cosf = crate::special::cos_pi_c(C::new((a + b) / 2.0 + th, s));
        Ok(Self { params: *params, s, left_hp, left_local, lambda, coef: k * g * cosf })
    }

    /// The complex coefficient C(s) with Ψ_s = Re{C·Λ(s,·)} on (1,∞).
    pub fn coefficient(&self) -> C {
        self.coef
    }

    pub fn local_expansion(&self) -> LocalExpansion {
        let (u, v) = self.lambda.local_coefficients();
        LocalExpansion {
            a_left: self.left_local.coef_reg.re,
            b_left: self.left_local.coef_sing.re,
            a_right: (self.coef * u).re,
            b_right: (self.coef * v).re,
        }
    }

    /// Evaluation without the local expansions.
    pub fn eval_direct(&self, at: Abscissa) -> Result<f64> {
        match at {
            Abscissa::Below { x, .. } => Ok(hyp2f1_ode(&self.left_hp, x)?.re),
            Abscissa::Above { y, .. } => {
                let hp = &self.lambda.hp;
                Ok((self.coef * pow_real(y, hp.a) * hyp2f1_ode(hp, y)?).re)
            }
        }
    }
}

impl PiecewiseFn for Psi {
    fn eval(&self, at: Abscissa) -> Result<f64> {
        match at {
            Abscissa::Below { x, t } => {
                let v = if t < SWITCH_RADIUS {
                    f21_eval_t(&self.left_hp, t)?
                } else {
                    f21_eval(&self.left_hp, x)?
                };
                Ok(v.re)
            }
            Abscissa::Above { y, t } => Ok((self.coef * self.lambda.eval(y, t)?).re),
        }
    }

    fn eval_above_scaled(&self, y: f64, t: f64, e: f64) -> Result<f64> {
        Ok((self.coef * self.lambda.eval_scaled(y, t, e)?).re)
    }

    fn decay(&self) -> Option<f64> {
        Some(self.params.h())
    }

    fn local(&self) -> Option<LocalExpansion> {
        Some(self.local_expansion())
    }
}

pub fn psi_s(params: &Params, s: f64, x: f64) -> Result<f64> {
    Psi::new(params, s)?.at(x)
}

// ---------------------------------------------------------------------------
// ξ_μ

/// ξ_μ(x) = (1−x)^μ on (0,1), 0 on (1,∞).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Xi {
    pub mu: f64,
}

impl PiecewiseFn for Xi {
    fn eval(&self, at: Abscissa) -> Result<f64> {
        Ok(match at {
            Abscissa::Below { t, .. } => t.powf(self.mu),
            Abscissa::Above { .. } => 0.0,
        })
    }
    fn decay(&self) -> Option<f64> {
        Some(f64::INFINITY)
    }
}

pub fn xi_mu(mu: f64, x: f64) -> Result<f64> {
    Xi { mu }.at(x)
}
