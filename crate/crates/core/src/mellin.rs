//! Mellin transforms, Barnes-type contour integrals and the kernels K₁, K₂.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp2f1::{f21_eval, f21_eval_t, HypParams};
use crate::ortho::{Abscissa, Params, PiecewiseFn};
use crate::quadrature::{integrate_half_line, integrate_line, integrate_unit, QuadratureSpec};
use crate::special::{gamma_bracket_real, ln_gamma_mod, ln_gamma_ratio, GammaBracket};

const SWITCH_RADIUS: f64 = 0.3;

// ---------------------------------------------------------------------------
// Barnes kernels

/// Γ(shift + sign·s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaTerm {
    pub shift: C,
    pub sign: f64,
}

impl GammaTerm {
    pub fn plus(shift: impl Into<C>) -> Self {
        Self { shift: shift.into(), sign: 1.0 }
    }
    pub fn minus(shift: impl Into<C>) -> Self {
        Self { shift: shift.into(), sign: -1.0 }
    }
    fn arg(&self, s: C) -> C {
        self.shift + self.sign * s
    }
}

/// constant · Π Γ(num) / Π Γ(den) as a function of s, with a vertical contour
/// Re s = contour_re inside the strip (lo, hi) separating the two pole series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarnesKernel {
    pub constant: C,
    pub numerators: Vec<GammaTerm>,
    pub denominators: Vec<GammaTerm>,
    pub contour_re: f64,
    pub strip: (f64, f64),
}

/// Which path the contour integral took.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Contour {
    Vertical,
    /// The segment contour_re ± i·height, continued by two rays at angles ±angle.
    Rays { angle: f64, height: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourResult {
    pub value: C,
    pub est_error: f64,
    pub contour: Contour,
}

impl BarnesKernel {
    pub fn new(
        constant: C,
        numerators: Vec<GammaTerm>,
        denominators: Vec<GammaTerm>,
        strip: (f64, f64),
        contour_re: f64,
    ) -> Result<Self> {
        if !(strip.0 < strip.1) {
            return Err(Error::StripViolation(format!("empty strip ({}, {})", strip.0, strip.1)));
        }
        if !(strip.0 < contour_re && contour_re < strip.1) {
            return Err(Error::StripViolation(format!(
                "contour Re s = {contour_re} outside strip ({}, {})",
                strip.0, strip.1
            )));
        }
        Ok(Self { constant, numerators, denominators, contour_re, strip })
    }

    /// Same kernel on another line inside the strip.
    pub fn with_contour(&self, contour_re: f64) -> Result<Self> {
        Self::new(self.constant, self.numerators.clone(), self.denominators.clone(), self.strip, contour_re)
    }

    fn is_real(&self) -> bool {
        self.constant.im == 0.0
            && self.numerators.iter().chain(&self.denominators).all(|g| g.shift.im == 0.0)
    }

    /// ln of the gamma quotient (without the constant), modulo 2πi.
    ///
    /// Numerator and denominator terms with the same sign are paired so the ratio
    /// stays accurate far up the contour.
    pub fn ln_eval(&self, s: C) -> Result<C> {
        let mut acc = C::new(0.0, 0.0);
        for sign in [1.0, -1.0] {
            let nums: Vec<_> = self.numerators.iter().filter(|g| g.sign == sign).collect();
            let dens: Vec<_> = self.denominators.iter().filter(|g| g.sign == sign).collect();
            let k = nums.len().min(dens.len());
            for i in 0..k {
                acc += ln_gamma_ratio(sign * s, nums[i].shift, dens[i].shift)?;
            }
            for g in &nums[k..] {
                acc += ln_gamma_mod(g.arg(s))?;
            }
            for g in &dens[k..] {
                acc -= ln_gamma_mod(g.arg(s))?;
            }
        }
        Ok(acc)
    }

    pub fn eval(&self, s: C) -> Result<C> {
        Ok(self.constant * self.ln_eval(s)?.exp())
    }

    /// (1/2πi) ∫ kernel(s)·x^{−s} ds.
    ///
    /// For x ≠ 1 the line is bent into two rays (to the left for x < 1, to the right for
    /// x > 1) where x^{−s} decays exponentially; with complex data the rays leave the line
    /// above and below all poles. At x = 1 the vertical line is used.
    pub fn integrate(&self, x: f64, spec: &QuadratureSpec) -> Result<ContourResult> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("contour integral needs x > 0, got {x}")));
        }
        let lx = x.ln();
        let g0 = self.contour_re;
        let f = |s: C| -> Result<C> { Ok(self.constant * (self.ln_eval(s)? - s * lx).exp()) };
        if self.is_real() && x != 1.0 {
            let angle = if x < 1.0 { 0.75 * PI } else { 0.25 * PI };
            let dir = C::from_polar(1.0, angle);
            // lower ray is the conjugate of the upper one
            let r = integrate_half_line(|r| Ok((f(g0 + r * dir)? * dir).im), spec.tol, spec.level_max)?;
            return Ok(ContourResult {
                value: C::new(r.value / PI, 0.0),
                est_error: r.est_error / PI,
                contour: Contour::Rays { angle, height: 0.0 },
            });
        }
        if self.is_real() {
            let r = integrate_half_line(|t| Ok(f(C::new(g0, t))?.re), spec.tol, spec.level_max)?;
            return Ok(ContourResult {
                value: C::new(r.value / PI, 0.0),
                est_error: r.est_error / PI,
                contour: Contour::Vertical,
            });
        }
        if x == 1.0 {
            let r = integrate_line(|t| f(C::new(g0, t)), spec.tol, spec.level_max)?;
            return Ok(ContourResult {
                value: r.value / (2.0 * PI),
                est_error: r.est_error / (2.0 * PI),
                contour: Contour::Vertical,
            });
        }
        // complex data: the rays start above and below every pole, so bending sweeps none
        let height = 1.0 + self.numerators.iter().map(|g| g.shift.im.abs()).fold(0.0, f64::max);
        let angle = if x < 1.0 { 0.75 * PI } else { 0.25 * PI };
        let mid = integrate_unit(
            |u, _| f(C::new(g0, height * (2.0 * u - 1.0))).map(|v| v * 2.0 * height),
            spec.tol,
            spec.level_max,
        )?;
        let up = C::from_polar(1.0, angle);
        let down = up.conj();
        let rays = integrate_half_line(
            |r| Ok(f(C::new(g0, height) + r * up)? * up - f(C::new(g0, -height) + r * down)? * down),
            spec.tol,
            spec.level_max,
        )?;
        // ds = i dt on the segment
        let value = mid.value / (2.0 * PI) + rays.value / (2.0 * PI * C::i());
        Ok(ContourResult {
            value,
            est_error: (mid.est_error + rays.est_error) / (2.0 * PI),
            contour: Contour::Rays { angle, height },
        })
    }
}

// ---------------------------------------------------------------------------
// Numerical Mellin transform

/// ∫₀^∞ f(x) x^{s−1} dx for Re s inside `strip`.
pub fn mellin_numeric(f: &dyn PiecewiseFn, s: C, strip: (f64, f64), spec: &QuadratureSpec) -> Result<C> {
    if !(strip.0 < s.re && s.re < strip.1) {
        return Err(Error::StripViolation(format!(
            "Re s = {} outside convergence strip ({}, {})",
            s.re, strip.0, strip.1
        )));
    }
    let left = integrate_unit(
        |x, t| {
            let v = f.eval(Abscissa::Below { x, t })?;
            Ok(v * (s - 1.0).expf(x))
        },
        spec.tol,
        spec.level_max,
    )?;
    if f.decay() == Some(f64::INFINITY) {
        return Ok(left.value);
    }
    // x = 1/y: ∫₀¹ f(1/y) y^{−s−1} dy
    let right = integrate_unit(
        |y, yc| {
            let v = f.eval_above_scaled(y, yc / y, s.re + 1.0)?;
            Ok(v * C::from_polar(1.0, -s.im * y.ln()))
        },
        spec.tol,
        spec.level_max,
    )?;
    Ok(left.value + right.value)
}

// ---------------------------------------------------------------------------
// K₁, K₂

/// pref · z^{power} · F[a,b;c;z] with z = x on (0,1) or z = 1/x on (1,∞).
#[derive(Debug, Clone, Copy)]
struct Branch {
    pref: f64,
    power: f64,
    hp: HypParams,
}

impl Branch {
    /// Value times z^{−e}; `zc` = 1 − z.
    fn eval_scaled(&self, z: f64, zc: f64, e: f64) -> Result<f64> {
        if self.pref == 0.0 {
            return Ok(0.0);
        }
        let fz = if zc < SWITCH_RADIUS { f21_eval_t(&self.hp, zc)? } else { f21_eval(&self.hp, z)? };
        let pw = self.power - e;
        Ok(self.pref * if pw == 0.0 { 1.0 } else { z.powf(pw) } * fz.re)
    }
}

/// A function given by one hypergeometric branch on each side of x = 1.
#[derive(Debug, Clone, Copy)]
pub struct HypKernel {
    left: Branch,
    right: Branch,
    /// Mellin convergence strip.
    pub strip: (f64, f64),
}

impl PiecewiseFn for HypKernel {
    fn eval(&self, at: Abscissa) -> Result<f64> {
        match at {
            Abscissa::Below { x, t } => self.left.eval_scaled(x, t, 0.0),
            Abscissa::Above { y, t } => self.right.eval_scaled(y, t * y, 0.0),
        }
    }

    fn eval_above_scaled(&self, y: f64, t: f64, e: f64) -> Result<f64> {
        self.right.eval_scaled(y, t * y, e)
    }

    fn decay(&self) -> Option<f64> {
        Some(if self.right.pref == 0.0 { f64::INFINITY } else { self.right.power })
    }
}

/// K₁ = F[p+β+1, −p−α; β+1; x] on (0,1) and
/// Γ[β+1, p+α+1; −p, 2p+α+β+2]·x^{−β−p−1}·F[β+p+1, p+1; 2p+α+β+2; 1/x] on (1,∞).
pub fn kernel1(params: &Params, p: f64) -> Result<HypKernel> {
    let (a, b) = (params.alpha, params.beta);
    let left = Branch { pref: 1.0, power: 0.0, hp: HypParams::real(p + b + 1.0, -p - a, b + 1.0) };
    let right = Branch {
        pref: gamma_bracket_real(&[b + 1.0, p + a + 1.0], &[-p, 2.0 * p + a + b + 2.0])?,
        power: b + p + 1.0,
        hp: HypParams::real(b + p + 1.0, p + 1.0, 2.0 * p + a + b + 2.0),
    };
    Ok(HypKernel { left, right, strip: (0.0, b + p + 1.0) })
}

/// K₂ = x^{q+α}·F[q+α+β+1, q+α+1; 2q+α+β+2; x] on (0,1) and
/// Γ[2q+α+β+2, −α−q; q+1, β+1]·x^{−β−1}·F[q+α+β+1, −q; β+1; 1/x] on (1,∞).
pub fn kernel2(params: &Params, q: f64) -> Result<HypKernel> {
    let (a, b) = (params.alpha, params.beta);
    let left = Branch {
        pref: 1.0,
        power: q + a,
        hp: HypParams::real(q + a + b + 1.0, q + a + 1.0, 2.0 * q + a + b + 2.0),
    };
    let right = Branch {
        pref: gamma_bracket_real(&[2.0 * q + a + b + 2.0, -a - q], &[q + 1.0, b + 1.0])?,
        power: b + 1.0,
        hp: HypParams::real(q + a + b + 1.0, -q, b + 1.0),
    };
    Ok(HypKernel { left, right, strip: (-a - q, b + 1.0) })
}

pub fn kernel_k1(params: &Params, p: f64, x: f64) -> Result<f64> {
    kernel1(params, p)?.at(x)
}

pub fn kernel_k2(params: &Params, q: f64, x: f64) -> Result<f64> {
    kernel2(params, q)?.at(x)
}

/// 𝓚₁(s) = Γ[β+1, p+α+1; β+p+1]·Γ[s, β+p+1−s; s+p+α+1, β+1−s].
pub fn mellin_k1(params: &Params, p: f64) -> Result<BarnesKernel> {
    let (a, b) = (params.alpha, params.beta);
    let k = gamma_bracket_real(&[b + 1.0, p + a + 1.0], &[b + p + 1.0])?;
    let strip = (0.0, b + p + 1.0);
    BarnesKernel::new(
        C::new(k, 0.0),
        vec![GammaTerm::plus(0.0), GammaTerm::minus(b + p + 1.0)],
        vec![GammaTerm::plus(p + a + 1.0), GammaTerm::minus(b + 1.0)],
        strip,
        0.5 * (strip.0 + strip.1),
    )
}

/// 𝓚₂(s) = Γ[2q+α+β+2, −α−q; q+α+β+1]·Γ[s+α+q, β+1−s; s, q+β+2−s].
pub fn mellin_k2(params: &Params, q: f64) -> Result<BarnesKernel> {
    let (a, b) = (params.alpha, params.beta);
    let k = gamma_bracket_real(&[2.0 * q + a + b + 2.0, -a - q], &[q + a + b + 1.0])?;
    let strip = (-a - q, b + 1.0);
    BarnesKernel::new(
        C::new(k, 0.0),
        vec![GammaTerm::plus(a + q), GammaTerm::minus(b + 1.0)],
        vec![GammaTerm::plus(0.0), GammaTerm::minus(q + b + 2.0)],
        strip,
        0.5 * (strip.0 + strip.1),
    )
}

// ---------------------------------------------------------------------------
// Strips and the convolution theorem

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripReport {
    pub strip_k1: (f64, f64),
    pub strip_k2: (f64, f64),
    pub intersection_nonempty: bool,
    pub convolution_applicable: bool,
    /// Violated inequalities, by name.
    pub failing: Vec<String>,
}

impl StripReport {
    pub fn new(params: &Params, p: f64, q: f64) -> Self {
        let (a, b) = (params.alpha, params.beta);
        let checks = [
            ("beta + p + 1 > 0", b + p + 1.0),
            ("alpha + beta + q + 1 > 0", a + b + q + 1.0),
            ("beta + 1 > 0", b + 1.0),
            ("p + q + alpha + beta + 1 > 0", p + q + a + b + 1.0),
        ];
        let failing: Vec<String> =
            checks.iter().filter(|(_, v)| !(*v > 0.0)).map(|(n, _)| n.to_string()).collect();
        let strip_k1 = (0.0f64, b + p + 1.0);
        let strip_k2 = (-a - q, b + 1.0);
        let lo = f64::max(strip_k1.0, strip_k2.0);
        let hi = f64::min(strip_k1.1, strip_k2.1);
        let ok = failing.is_empty();
        Self { strip_k1, strip_k2, intersection_nonempty: ok && lo < hi, convolution_applicable: ok && lo < hi, failing }
    }

    pub fn intersection(&self) -> (f64, f64) {
        (self.strip_k1.0.max(self.strip_k2.0), self.strip_k1.1.min(self.strip_k2.1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionReport {
    /// ∫₀^∞ K₁(x)K₂(1/x) dx/x
    pub lhs: f64,
    /// (1/2πi)∫ 𝓚₁𝓚₂ ds
    pub rhs: f64,
    /// The same contour integral in closed form.
    pub closed_form: f64,
    pub residual: f64,
}

/// Checks (K₁∗K₂)(1) against the inverse Mellin transform of 𝓚₁𝓚₂ at 1.
pub fn convolution_check(params: &Params, p: f64, q: f64, spec: &QuadratureSpec) -> Result<ConvolutionReport> {
    let sr = StripReport::new(params, p, q);
    if !sr.convolution_applicable {
        return Err(Error::StripViolation(format!("strips do not intersect: {}", sr.failing.join(", "))));
    }
    let k1 = kernel1(params, p)?;
    let k2 = kernel2(params, q)?;
    // x ∈ (0,1) in both halves: K₁(x)K₂(1/x)/x and K₁(1/x)K₂(x)/x
    let lhs = integrate_unit(
        |x, xc| {
            let below = Abscissa::Below { x, t: xc };
            let u = k1.eval(below)? * k2.eval_above_scaled(x, xc / x, 1.0)?;
            let v = k1.eval_above_scaled(x, xc / x, 1.0)? * k2.eval(below)?;
            Ok(u + v)
        },
        spec.tol,
        spec.level_max,
    )?;
    let (lo, hi) = sr.intersection();
    let m1 = mellin_k1(params, p)?;
    let m2 = mellin_k2(params, q)?;
    let mut num = m1.numerators.clone();
    num.extend(m2.numerators.iter().copied());
    let mut den = m1.denominators.clone();
    den.extend(m2.denominators.iter().copied());
    let prod = BarnesKernel::new(m1.constant * m2.constant, num, den, (lo, hi), 0.5 * (lo + hi))?;
    let rhs = prod.integrate(1.0, spec)?.value.re;
    let (a, b) = (params.alpha, params.beta);
    let closed = (m1.constant * m2.constant).re
        * delta_closed_form(C::new(a + q, 0.0), C::new(b + p + 1.0, 0.0), C::new(1.0 + p + a, 0.0), C::new(q + b + 2.0, 0.0))?
            .re;
    Ok(ConvolutionReport { lhs: lhs.value, rhs, closed_form: closed, residual: (lhs.value - rhs).abs() })
}

// ---------------------------------------------------------------------------
// The Barnes integrals

/// Γ[c, 1−b; a]·Γ[s, a−s; s+1−b, c−s] on the line Re s = γ, 0 < γ < Re a.
pub fn main_integral_kernel(a: C, b: C, c: C, gamma: f64) -> Result<BarnesKernel> {
    let k = GammaBracket::new(vec![c, 1.0 - b], vec![a]).eval()?;
    BarnesKernel::new(
        k,
        vec![GammaTerm::plus(0.0), GammaTerm::minus(a)],
        vec![GammaTerm::plus(1.0 - b), GammaTerm::minus(c)],
        (0.0, a.re),
        gamma,
    )
}

fn check_main(a: C, b: C, c: C) -> Result<()> {
    if !((c - a - b).re > -1.0) {
        return Err(Error::Domain(format!("main integral needs Re(c-a-b) > -1, got {}", (c - a - b).re)));
    }
    if !(a.re > 0.0) {
        return Err(Error::StripViolation(format!("empty strip (0, Re a) with Re a = {}", a.re)));
    }
    Ok(())
}

/// (1/2πi)Γ[c,1−b;a] ∫ Γ[s, a−s; s+1−b, c−s] x^{−s} ds on Re s = Re a / 2.
pub fn barnes_main_integral(a: C, b: C, c: C, x: f64, spec: &QuadratureSpec) -> Result<C> {
    check_main(a, b, c)?;
    barnes_main_integral_on(a, b, c, x, 0.5 * a.re, spec)
}

/// As [`barnes_main_integral`] on the line Re s = gamma.
pub fn barnes_main_integral_on(a: C, b: C, c: C, x: f64, gamma: f64, spec: &QuadratureSpec) -> Result<C> {
    check_main(a, b, c)?;
    if x == 1.0 && !((c - a - b).re > 0.0) {
        return Err(Error::Domain("at x = 1 the integral needs Re(c-a-b) > 0".into()));
    }
    Ok(main_integral_kernel(a, b, c, gamma)?.integrate(x, spec)?.value)
}

/// F[a,b;c;x] for x < 1, x^{−a}Γ[c,1−b;c−a,1+a−b]·F[a,1+a−c;1+a−b;1/x] for x > 1,
/// and the common limit Γ[c, c−a−b; c−a, c−b] at x = 1.
pub fn main_integral_closed_form(a: C, b: C, c: C, x: f64) -> Result<C> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("need x > 0, got {x}")));
    }
    if x < 1.0 {
        return f21_eval(&HypParams::new(a, b, c), x);
    }
    if x == 1.0 {
        return GammaBracket::new(vec![c, c - a - b], vec![c - a, c - b]).eval();
    }
    let k = GammaBracket::new(vec![c, 1.0 - b], vec![c - a, 1.0 + a - b]).eval()?;
    let f = f21_eval(&HypParams::new(a, 1.0 + a - c, 1.0 + a - b), 1.0 / x)?;
    Ok(k * C::from(x).powc(-a) * f)
}

/// Kernel Γ[a+s, b−s; c+s, d−s], strip (−Re a, Re b).
pub fn delta_kernel(a: C, b: C, c: C, d: C, gamma: f64) -> Result<BarnesKernel> {
    BarnesKernel::new(
        C::new(1.0, 0.0),
        vec![GammaTerm::plus(a), GammaTerm::minus(b)],
        vec![GammaTerm::plus(c), GammaTerm::minus(d)],
        (-a.re, b.re),
        gamma,
    )
}

/// (1/2πi)∫ Γ[a+s, b−s; c+s, d−s] ds along Re s = (Re b − Re a)/2.
pub fn barnes_delta(a: C, b: C, c: C, d: C, spec: &QuadratureSpec) -> Result<C> {
    barnes_delta_on(a, b, c, d, 0.5 * (b.re - a.re), spec)
}

pub fn barnes_delta_on(a: C, b: C, c: C, d: C, gamma: f64, spec: &QuadratureSpec) -> Result<C> {
    if !((c + d - a - b).re > 1.0) {
        return Err(Error::Domain(format!("delta integral needs Re(c+d-a-b) > 1, got {}", (c + d - a - b).re)));
    }
    Ok(delta_kernel(a, b, c, d, gamma)?.integrate(1.0, spec)?.value)
}

/// Γ[a+b, c+d−a−b−1; c+d−1, c−a, d−b].
pub fn delta_closed_form(a: C, b: C, c: C, d: C) -> Result<C> {
    GammaBracket::new(vec![a + b, c + d - a - b - 1.0], vec![c + d - 1.0, c - a, d - b]).eval()
}

/// The delta-integral parameters (α+q, β+p+1, 1+p+α, q+β+2) attached to {Φ_p, Φ_q}.
pub fn delta_parameters(params: &Params, p: f64, q: f64) -> [C; 4] {
    let (a, b) = (params.alpha, params.beta);
    [C::new(a + q, 0.0), C::new(b + p + 1.0, 0.0), C::new(1.0 + p + a, 0.0), C::new(q + b + 2.0, 0.0)]
}

/// Γ(2p+α+β+2)Γ(q+1)Γ(p+α+1)Γ(2q+α+β+2) / (Γ(β+p+1)Γ(q+α+β+1)).
pub fn pairing_prefactor(params: &Params, p: f64, q: f64) -> Result<f64> {
    let (a, b) = (params.alpha, params.beta);
    gamma_bracket_real(
        &[2.0 * p + a + b + 2.0, q + 1.0, p + a + 1.0, 2.0 * q + a + b + 2.0],
        &[b + p + 1.0, q + a + b + 1.0],
    )
}

/// {Φ_p, Φ_q} as prefactor × numerical delta integral.
pub fn pairing_via_barnes(params: &Params, p: f64, q: f64, spec: &QuadratureSpec) -> Result<f64> {
    let [a, b, c, d] = delta_parameters(params, p, q);
    Ok(pairing_prefactor(params, p, q)? * barnes_delta(a, b, c, d, spec)?.re)
}

/// {Φ_p, Φ_q} = prefactor × sin((q−p)π)/(π(q−p)(p+q+α+β+1)).
pub fn pairing_closed_form(params: &Params, p: f64, q: f64) -> Result<f64> {
    let [a, b, c, d] = delta_parameters(params, p, q);
    Ok(pairing_prefactor(params, p, q)? * delta_closed_form(a, b, c, d)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ortho::{phi_norm_sq, Phi};
    use crate::special::gamma_real;

    fn spec() -> QuadratureSpec {
        QuadratureSpec { tol: 1e-12, ..Default::default() }
    }

    fn c(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn delta_unit_case() {
        let v = barnes_delta(c(1.0), c(1.0), c(2.0), c(2.0), &spec()).unwrap();
        assert!((v.re - 0.5).abs() < 1e-8, "{v}");
        assert!((delta_closed_form(c(1.0), c(1.0), c(2.0), c(2.0)).unwrap().re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn main_integral_branches() {
        let (a, b, cc) = (c(0.8), c(0.3), c(1.7));
        for x in [0.5, 2.0, 1.0] {
            let num = barnes_main_integral(a, b, cc, x, &spec()).unwrap();
            let cf = main_integral_closed_form(a, b, cc, x).unwrap();
            assert!((num - cf).norm() < 1e-9, "x={x}: {num} vs {cf}");
        }
    }

    #[test]
    fn mellin_simple() {
        let sp = spec();
        let ind = crate::ortho::Xi { mu: 0.0 };
        let v = mellin_numeric(&ind, c(2.0), (0.0, f64::INFINITY), &sp).unwrap();
        assert!((v.re - 0.5).abs() < 1e-13);
        assert!(mellin_numeric(&ind, c(-0.5), (0.0, f64::INFINITY), &sp).is_err());
    }

    #[test]
    fn kernel1_matches_mellin() {
        let pr = Params::new(0.3, 0.5, 0.25).unwrap();
        let p = 1.25;
        let k1 = kernel1(&pr, p).unwrap();
        let m = mellin_k1(&pr, p).unwrap();
        for s in [C::new(0.4, 0.0), C::new(1.1, 0.7)] {
            let num = mellin_numeric(&k1, s, k1.strip, &spec()).unwrap();
            let cf = m.eval(s).unwrap();
            assert!((num - cf).norm() < 1e-9 * cf.norm().max(1.0), "{s}: {num} {cf}");
        }
        let q = 2.25;
        let k2 = kernel2(&pr, q).unwrap();
        let m = mellin_k2(&pr, q).unwrap();
        let s = C::new(0.2, -0.4);
        let num = mellin_numeric(&k2, s, k2.strip, &spec()).unwrap();
        let cf = m.eval(s).unwrap();
        assert!((num - cf).norm() < 1e-9 * cf.norm().max(1.0), "{num} {cf}");
    }

    #[test]
    fn kernel1_is_phi_on_left() {
        let pr = Params::new(0.3, 0.5, 0.25).unwrap();
        let p = 1.25;
        let phi = Phi::with_p(&pr, p).unwrap();
        let k = gamma_real(1.5).unwrap() / gamma_real(2.0 * p + 2.8).unwrap();
        for x in [0.1, 0.5, 0.9] {
            let lhs = kernel_k1(&pr, p, x).unwrap();
            let rhs = (1.0f64 - x).powf(0.3) * phi.at(x).unwrap() * k;
            assert!((lhs - rhs).abs() < 1e-13 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn convolution_and_pairing() {
        let pr = Params::new(0.3, 0.5, 0.25).unwrap();
        let r = convolution_check(&pr, 0.25, 1.25, &spec()).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
        assert!((r.rhs - r.closed_form).abs() < 1e-9, "{r:?}");
        let n = pairing_closed_form(&pr, 1.25, 1.25).unwrap();
        assert!((n - phi_norm_sq(&pr, 1.25).unwrap()).abs() < 1e-12 * n);
        assert!(pairing_closed_form(&pr, 0.25, 2.25).unwrap().abs() < 1e-15);
    }

    #[test]
    fn strip_report() {
        let pr = Params::new(0.3, 0.5, 0.25).unwrap();
        let s = StripReport::new(&pr, 0.25, 1.25);
        assert!(s.convolution_applicable && s.failing.is_empty());
        let s = StripReport::new(&pr, -1.6, 0.25);
        assert_eq!(s.failing, vec!["beta + p + 1 > 0".to_string()]);
        assert!(convolution_check(&pr, -1.6, 0.25, &spec()).is_err());
    }
}
