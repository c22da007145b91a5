//! Gauss hypergeometric function ₂F₁ on the real line.
//!
//! Series near 0, the Kummer connection at 1, the 1/x connection, and a Taylor-series
//! continuation of the hypergeometric ODE for parameter ranges where the series
//! cancel badly (large |ab| or large |c−a−b|).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{pole_index, GammaBracket};

type C = Complex64;

const SERIES_TOL: f64 = 1e-16;
const MAX_TERMS: usize = 1_000_000;
// series whose largest term exceeds the sum by more than this are handed to the ODE path
const COND_LIMIT: f64 = 1e3;

fn c0() -> C {
    C::new(0.0, 0.0)
}
fn c1() -> C {
    C::new(1.0, 0.0)
}

/// Parameters (a, b; c) of F[a, b; c; x].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypParams {
    pub a: C,
    pub b: C,
    pub c: C,
}

impl HypParams {
    pub fn new(a: C, b: C, c: C) -> Self {
        Self { a, b, c }
    }

    pub fn real(a: f64, b: f64, c: f64) -> Self {
        Self::new(C::new(a, 0.0), C::new(b, 0.0), C::new(c, 0.0))
    }

    /// Degree of the polynomial when a or b is a non-positive integer.
    pub fn terminating_degree(&self) -> Option<u64> {
        match (pole_index(self.a), pole_index(self.b)) {
            (Some(m), Some(n)) => Some(m.min(n)),
            (Some(m), None) | (None, Some(m)) => Some(m),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for z in [self.a, self.b, self.c] {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        if let Some(m) = pole_index(self.c) {
            match self.terminating_degree() {
                Some(n) if n <= m => {}
                _ => return Err(Error::Pole(self.c)),
            }
        }
        Ok(())
    }

    /// c − a − b
    pub fn excess(&self) -> C {
        self.c - self.a - self.b
    }

    fn is_real(&self) -> bool {
        self.a.im == 0.0 && self.b.im == 0.0 && self.c.im == 0.0
    }

    // a, b with the terminating one snapped onto its exact integer
    fn snapped(&self) -> (C, C) {
        let snap = |z: C| match pole_index(z) {
            Some(m) => C::new(-(m as f64), 0.0),
            None => z,
        };
        (snap(self.a), snap(self.b))
    }
}

fn excess_is_integer(hp: &HypParams) -> Option<f64> {
    let e = hp.excess();
    (e.im.abs() < 1e-9 && (e.re - e.re.round()).abs() < 1e-9).then_some(e.re)
}

// Nested (Horner) form 1 + t₁x(1 + t₂x(1 + …)) of the terminating series.
fn polynomial(hp: &HypParams, n: u64, x: C) -> C {
    let (a, b) = hp.snapped();
    let mut acc = c1();
    for k in (0..n).rev() {
        let kf = k as f64;
        let r = (a + kf) * (b + kf) / ((hp.c + kf) * (kf + 1.0));
        acc = c1() + r * x * acc;
    }
    acc
}

// Returns (sum, largest |term|).
fn series_raw(hp: &HypParams, x: C) -> Result<(C, f64)> {
    let mut sum = c1();
    let mut term = c1();
    let mut max_term: f64 = 1.0;
    let mut small = 0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (hp.a + kf) * (hp.b + kf) / ((hp.c + kf) * (kf + 1.0)) * x;
        sum += term;
        let t = term.norm();
        max_term = max_term.max(t);
        if t <= SERIES_TOL * sum.norm() || t == 0.0 {
            small += 1;
            if small == 3 {
                return Ok((sum, max_term));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NoConvergence { what: "2F1 series", iterations: MAX_TERMS })
}

/// The defining power series ∑ (a)_k (b)_k / ((c)_k k!) x^k.
pub fn f21_series(hp: &HypParams, x: C) -> Result<C> {
    hp.validate()?;
    if let Some(n) = hp.terminating_degree() {
        return Ok(polynomial(hp, n, x));
    }
    if x.norm() >= 1.0 {
        return Err(Error::Domain(format!("series needs |x| < 1, got {x}")));
    }
    Ok(series_raw(hp, x)?.0)
}

/// (1−x)^{c−a−b} F[c−a, c−b; c; x].
pub fn euler_transform(hp: &HypParams, x: C) -> Result<C> {
    hp.validate()?;
    let t = HypParams::new(hp.c - hp.a, hp.c - hp.b, hp.c);
    let inner = if x.im == 0.0 && x.re < 1.0 {
        f21_eval(&t, x.re)?
    } else {
        f21_series(&t, x)?
    };
    Ok((c1() - x).powc(hp.excess()) * inner)
}

/// Two-term local expansion g₁·F[reg; w] + g₂·|w|^e·F[sing; w] in the variable w.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoTerm {
    pub coef_reg: C,
    pub reg: HypParams,
    pub coef_sing: C,
    pub sing: HypParams,
    pub exponent: C,
}

impl TwoTerm {
    /// Value and the sum of the two term magnitudes (for cancellation checks).
    pub fn eval_parts(&self, w: f64) -> Result<(C, C)> {
        let r = if self.coef_reg == c0() { c0() } else { self.coef_reg * f21_eval(&self.reg, w)? };
        let s = if self.coef_sing == c0() {
            c0()
        } else {
            self.coef_sing * pow_real(w.abs(), self.exponent) * f21_eval(&self.sing, w)?
        };
        Ok((r, s))
    }

    pub fn eval(&self, w: f64) -> Result<C> {
        let (r, s) = self.eval_parts(w)?;
        Ok(r + s)
    }
}

/// t^e for t > 0 and complex e.
pub fn pow_real(t: f64, e: C) -> C {
    if e.im == 0.0 {
        C::new(t.powf(e.re), 0.0)
    } else {
        (e * t.ln()).exp()
    }
}

/// Expansion of F[a,b;c;z] in w = 1−z:
/// Γ[c, c−a−b; c−a, c−b] F[a, b; a+b−c+1; w] + Γ[c, a+b−c; a, b] w^{c−a−b} F[c−a, c−b; c−a−b+1; w].
pub fn kummer_at_1(hp: &HypParams) -> Result<TwoTerm> {
    hp.validate()?;
    if let Some(e) = excess_is_integer(hp) {
        return Err(Error::LogarithmicCase(e));
    }
    let (a, b, c) = (hp.a, hp.b, hp.c);
    let e = hp.excess();
    Ok(TwoTerm {
        coef_reg: GammaBracket::new(vec![c, e], vec![c - a, c - b]).eval()?,
        reg: HypParams::new(a, b, 1.0 - e),
        coef_sing: GammaBracket::new(vec![c, -e], vec![a, b]).eval()?,
        sing: HypParams::new(c - a, c - b, 1.0 + e),
        exponent: e,
    })
}

/// Expansion of x^{−a} F[a,b;c;1/x] (x > 1) in w = 1−x:
/// Γ[c, c−a−b; c−a, c−b] F[a, a−c+1; a+b−c+1; w] + Γ[c, a+b−c; a, b] (x−1)^{c−a−b} F[c−b, 1−b; c−a−b+1; w].
pub fn kummer_1_over_x(hp: &HypParams) -> Result<TwoTerm> {
    hp.validate()?;
    if let Some(e) = excess_is_integer(hp) {
        return Err(Error::LogarithmicCase(e));
    }
    let (a, b, c) = (hp.a, hp.b, hp.c);
    let e = hp.excess();
    Ok(TwoTerm {
        coef_reg: GammaBracket::new(vec![c, e], vec![c - a, c - b]).eval()?,
        reg: HypParams::new(a, a - c + 1.0, 1.0 - e),
        coef_sing: GammaBracket::new(vec![c, -e], vec![a, b]).eval()?,
        sing: HypParams::new(c - b, 1.0 - b, 1.0 + e),
        exponent: e,
    })
}

/// F[a,b;c;z] through the Kummer connection at 1, with t = 1−z supplied exactly.
pub fn connect_at_1_t(hp: &HypParams, t: f64) -> Result<C> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("connection at 1 needs 0 < 1−z < 1, got {t}")));
    }
    kummer_at_1(hp)?.eval(t)
}

/// F[a,b;c;z] through the Kummer connection at 1.
pub fn connect_at_1(hp: &HypParams, z: f64) -> Result<C> {
    connect_at_1_t(hp, 1.0 - z)
}

/// F[a,b;c;1/x] for x > 1: the expansion in 1−x when x < 1.9, the series in 1/x beyond.
pub fn connect_1_over_x(hp: &HypParams, x: f64) -> Result<C> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(Error::Domain(format!("connect_1_over_x needs x > 1, got {x}")));
    }
    if x >= 1.9 {
        return f21_eval(hp, 1.0 / x);
    }
    let tt = kummer_1_over_x(hp)?;
    Ok(pow_real(x, hp.a) * tt.eval(1.0 - x)?)
}

/// F[a,b;c;x] for real x < 1, dispatching between series, Pfaff, the connection at 1
/// and ODE continuation. Terminating series are evaluated exactly for every x.
pub fn f21_eval(hp: &HypParams, x: f64) -> Result<C> {
    hp.validate()?;
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    if let Some(n) = hp.terminating_degree() {
        return Ok(polynomial(hp, n, C::new(x, 0.0)));
    }
    if x == 0.0 {
        return Ok(c1());
    }
    if x >= 1.0 {
        return Err(Error::Domain(format!(
            "f21_eval needs x < 1 (use connect_1_over_x for F at 1/x), got {x}"
        )));
    }
    if x < -0.7 {
        // Pfaff: (1−x)^{−a} F[a, c−b; c; x/(x−1)]
        let pf = HypParams::new(hp.a, hp.c - hp.b, hp.c);
        return Ok(pow_real(1.0 - x, -hp.a) * f21_eval(&pf, x / (x - 1.0))?);
    }
    if x <= 0.7 {
        return f21_small(hp, x);
    }
    near_one(hp, x, 1.0 - x)
}

/// Like [`f21_eval`] for z = 1 − t close to 1, with the complement t supplied exactly.
pub fn f21_eval_t(hp: &HypParams, t: f64) -> Result<C> {
    hp.validate()?;
    if let Some(n) = hp.terminating_degree() {
        return Ok(polynomial(hp, n, C::new(1.0 - t, 0.0)));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("f21_eval_t needs t > 0, got {t}")));
    }
    if t >= 0.3 {
        return f21_eval(hp, 1.0 - t);
    }
    near_one(hp, 1.0 - t, t)
}

fn near_one(hp: &HypParams, x: f64, t: f64) -> Result<C> {
    if excess_is_integer(hp).is_none() {
        let tt = kummer_at_1(hp)?;
        let (r, s) = tt.eval_parts(t)?;
        let v = r + s;
        if r.norm() + s.norm() <= COND_LIMIT * v.norm() {
            return Ok(v);
        }
    }
    ode_from_origin(hp, x)
}

/// F[a,b;c;x] for −1 < x < 1 by series near 0 plus ODE continuation only; an
/// evaluation path independent of the connection formulas.
pub fn f21_eval_ode(hp: &HypParams, x: f64) -> Result<C> {
    hp.validate()?;
    if let Some(n) = hp.terminating_degree() {
        return Ok(polynomial(hp, n, C::new(x, 0.0)));
    }
    if !(x > -1.0 && x < 1.0) {
        return Err(Error::Domain(format!("f21_eval_ode needs -1 < x < 1, got {x}")));
    }
    if x == 0.0 {
        return Ok(c1());
    }
    ode_from_origin(hp, x)
}

/// F'(x) = (ab/c) F[a+1, b+1; c+1; x].
pub fn f21_derivative(hp: &HypParams, x: f64) -> Result<C> {
    let d = HypParams::new(hp.a + 1.0, hp.b + 1.0, hp.c + 1.0);
    if hp.a * hp.b == c0() {
        return Ok(c0());
    }
    Ok(hp.a * hp.b / hp.c * f21_eval(&d, x)?)
}

// Series for |x| ≤ 0.7, handing ill-conditioned cases to the ODE.
fn f21_small(hp: &HypParams, x: f64) -> Result<C> {
    let (v, m) = series_raw(hp, C::new(x, 0.0))?;
    if m <= COND_LIMIT * v.norm() {
        return Ok(v);
    }
    ode_from_origin(hp, x)
}

// Start value near 0 where the series is benign, then integrate the ODE to x.
fn ode_from_origin(hp: &HypParams, x: f64) -> Result<C> {
    let scale = 1.0 + (hp.a * hp.b).norm() / hp.c.norm().max(1.0) + (hp.a + hp.b).norm() + 1.0 / hp.c.norm();
    let mut r0 = (0.25 / scale).min(x.abs());
    let dp = HypParams::new(hp.a + 1.0, hp.b + 1.0, hp.c + 1.0);
    let dfac = hp.a * hp.b / hp.c;
    for _ in 0..40 {
        let z0 = r0.copysign(x);
        let (y0, m0) = series_raw(hp, C::new(z0, 0.0))?;
        let (d0, m1) = series_raw(&dp, C::new(z0, 0.0))?;
        if m0 <= 10.0 * y0.norm().max(1e-300) && m1 <= 10.0 * d0.norm().max(1e-300) {
            if z0 == x {
                return Ok(y0);
            }
            return Ok(ode_continue(hp, z0, y0, dfac * d0, x)?.0);
        }
        r0 *= 0.25;
    }
    Err(Error::NoConvergence { what: "2F1 ODE start", iterations: 40 })
}

/// Taylor-series integration of z(1−z)y'' + (c − (a+b+1)z)y' − ab·y = 0 along the real
/// axis from z0 to z1 (same side of the singular points 0 and 1). Returns (y, y') at z1.
pub fn ode_continue(hp: &HypParams, z0: f64, y0: C, d0: C, z1: f64) -> Result<(C, C)> {
    let cross = |s: f64| (z0 - s) * (z1 - s) <= 0.0;
    if cross(0.0) || cross(1.0) {
        return Err(Error::Domain("ODE continuation would cross a singular point".into()));
    }
    let (a, b, c) = (hp.a, hp.b, hp.c);
    let ab = a * b;
    let s1 = a + b + 1.0;
    let mut z = z0;
    let mut y = y0;
    let mut d = d0;
    let mut steps = 0usize;
    while z != z1 {
        steps += 1;
        if steps > 200_000 {
            return Err(Error::NoConvergence { what: "2F1 ODE continuation", iterations: steps });
        }
        let p0 = z * (1.0 - z);
        let q0 = c - s1 * z;
        let dist = z.abs().min((1.0 - z).abs());
        let freq = (q0 / p0).norm() + (ab / p0).norm().sqrt();
        let hmax = (0.5 * dist).min(1.5 / freq.max(1e-300));
        let remaining = z1 - z;
        let h = if remaining.abs() <= hmax { remaining } else { hmax.copysign(remaining) };
        let (yn, dn) = taylor_step(hp, z, y, d, h)?;
        y = yn;
        d = dn;
        z = if remaining.abs() <= hmax { z1 } else { z + h };
    }
    Ok((y, d))
}

fn taylor_step(hp: &HypParams, z0: f64, y0: C, d0: C, h: f64) -> Result<(C, C)> {
    let (a, b, c) = (hp.a, hp.b, hp.c);
    let p0 = z0 * (1.0 - z0);
    let p1 = 1.0 - 2.0 * z0;
    let q0 = c - (a + b + 1.0) * z0;
    let q1 = -(a + b + 1.0);
    let r = -(a * b);
    // scaled coefficients u_k = y_k h^k
    let mut u0 = y0;
    let mut u1 = d0 * h;
    let mut val = u0 + u1;
    let mut der = u1;
    let mut quiet = 0;
    for k in 0..5000usize {
        let kf = k as f64;
        let num = (p1 * kf * (kf + 1.0) + q0 * (kf + 1.0)) * u1 * h
            + (-kf * (kf - 1.0) + q1 * kf + r) * u0 * (h * h);
        let u2 = -num / (p0 * (kf + 2.0) * (kf + 1.0));
        val += u2;
        der += u2 * (kf + 2.0);
        let mag = u2.norm() + u1.norm();
        if mag <= 1e-17 * (val.norm() + der.norm()) {
            quiet += 1;
            if quiet >= 2 {
                return Ok((val, der / h));
            }
        } else {
            quiet = 0;
        }
        u0 = u1;
        u1 = u2;
        if !val.re.is_finite() || !val.im.is_finite() {
            return Err(Error::NonFinite);
        }
    }
    Err(Error::NoConvergence { what: "2F1 Taylor step", iterations: 5000 })
}

/// Real value of F for real parameters; errors if the result carries an imaginary part.
pub fn f21_real(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    let hp = HypParams::real(a, b, c);
    debug_assert!(hp.is_real());
    Ok(f21_eval(&hp, x)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma_bracket_real;

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn series_basics() {
        let hp = HypParams::real(0.3, 0.4, 1.7);
        assert_eq!(f21_series(&hp, c0()).unwrap(), c1());
        let p = HypParams::real(-2.0, 3.0, 1.0);
        for x in [0.2, 0.9, 3.0] {
            let v = f21_series(&p, C::new(x, 0.0)).unwrap().re;
            assert!((v - (1.0 - 6.0 * x + 6.0 * x * x)).abs() < 1e-13);
        }
        // Gauss summation F[1,1;3;1] = 2 reached by the connection formula
        let g = HypParams::real(1.0, 1.0, 3.0);
        let v = f21_eval_t(&g, 1e-12).unwrap().re;
        assert!((v - 2.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn euler_and_connections() {
        let hp = HypParams::real(1.0, 1.0, 3.0);
        let lhs = euler_transform(&hp, C::new(0.5, 0.0)).unwrap();
        let rhs = f21_series(&hp, C::new(0.5, 0.0)).unwrap();
        assert!(close(lhs, rhs, 1e-13));
        let x = C::new(0.37, 0.0);
        let h2 = HypParams::real(0.3, -1.7, 2.2);
        let once = HypParams::new(h2.c - h2.a, h2.c - h2.b, h2.c);
        // the Euler map is an involution on parameters
        let twice = (1.0 - x).powc(h2.excess()) * euler_transform(&once, x).unwrap();
        assert!(close(twice, f21_series(&h2, x).unwrap(), 1e-12));

        let h3 = HypParams::real(0.5, 0.7, 1.4);
        for z in [0.05, 0.5, 0.75] {
            let a = connect_at_1(&h3, z).unwrap();
            let b = f21_series(&h3, C::new(z, 0.0)).unwrap();
            assert!(close(a, b, 1e-11), "{z}: {a} {b}");
        }
        let p = HypParams::real(-2.0, 3.0, 1.0);
        let v = connect_at_1(&HypParams::real(-2.0 + 1e-7, 3.0, 1.0), 0.9).unwrap();
        assert!((v - f21_series(&p, C::new(0.9, 0.0)).unwrap()).norm() < 1e-6);

        let tt = kummer_at_1(&h3).unwrap();
        let g1 = gamma_bracket_real(&[1.4, 0.2], &[0.9, 0.7]).unwrap();
        let g2 = gamma_bracket_real(&[1.4, -0.2], &[0.5, 0.7]).unwrap();
        assert!((tt.coef_reg.re - g1).abs() < 1e-13 * g1.abs());
        assert!((tt.coef_sing.re - g2).abs() < 1e-13 * g2.abs());
    }

    #[test]
    fn one_over_x() {
        let hp = HypParams::real(1.0, 1.0, 3.0);
        let a = connect_1_over_x(&hp, 2.0).unwrap();
        let b = f21_series(&hp, C::new(0.5, 0.0)).unwrap();
        assert!(close(a, b, 1e-12));
        let h = HypParams::real(0.45, 1.3, 2.05);
        for x in [1.05, 1.3, 1.8] {
            let a = connect_1_over_x(&h, x).unwrap();
            let b = f21_eval(&h, 1.0 / x).unwrap();
            assert!(close(a, b, 1e-11), "{x}: {a} {b}");
        }
        assert!((connect_1_over_x(&h, 1e12).unwrap() - 1.0).norm() < 1e-11);
    }

    #[test]
    fn dispatcher_regions() {
        let hp = HypParams::real(0.5, 0.7, 1.4);
        let a = f21_series(&hp, C::new(0.75, 0.0)).unwrap();
        let b = connect_at_1(&hp, 0.75).unwrap();
        assert!(close(a, b, 1e-11));
        // frozen from a 60-digit series evaluation
        let v = f21_eval(&hp, 0.99).unwrap().re;
        assert!((v - 2.050_976_690_753_802_6).abs() < 1e-12, "{v}");
        assert!(matches!(f21_eval(&hp, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn ode_path_matches_series() {
        // large |ab|: the series at 0.7 suffers cancellation
        let hp = HypParams::new(C::new(0.9, 30.0), C::new(0.9, -30.0), C::new(1.5, 0.0));
        let x = 0.3;
        let s = series_raw(&hp, C::new(x, 0.0)).unwrap().0;
        let o = ode_from_origin(&hp, x).unwrap();
        assert!(close(o, s, 1e-10), "{o} {s}");
    }

    #[test]
    fn negative_arguments() {
        let hp = HypParams::real(0.3, 1.1, 1.9);
        let a = f21_eval(&hp, -0.8).unwrap();
        let b = f21_series(&hp, C::new(-0.8, 0.0)).unwrap();
        assert!(close(a, b, 1e-12));
        let far = f21_eval(&hp, -7.0).unwrap().re;
        // frozen from an arbitrary-precision evaluator
        assert!((far - 0.643_186_416_193_394_4).abs() < 1e-12, "{far}");
    }

    #[test]
    fn pole_and_log_cases() {
        assert!(matches!(f21_series(&HypParams::real(0.5, 0.5, -2.0), C::new(0.1, 0.0)), Err(Error::Pole(_))));
        // terminates before the c pole
        assert!(f21_series(&HypParams::real(-1.0, 0.5, -2.0), C::new(0.1, 0.0)).is_ok());
        assert!(matches!(connect_at_1(&HypParams::real(0.5, 0.5, 2.0), 0.9), Err(Error::LogarithmicCase(_))));
    }
}
