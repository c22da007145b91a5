//! Gamma function, gamma brackets, Pochhammer symbols and sine ratios.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Arguments closer than this to a non-positive integer are treated as poles.
pub const POLE_EPS: f64 = 1e-9;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k (2k-1)) for k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

// Taylor coefficients of 1/Γ(1+z) at z = 0
const RGAMMA1P: [f64; 27] = [
    1.0,
    5.772_156_649_015_328_7e-1,
    -6.558_780_715_202_539e-1,
    -4.200_263_503_409_524e-2,
    1.665_386_113_822_914_8e-1,
    -4.219_773_455_554_433_4e-2,
    -9.621_971_527_876_973e-3,
    7.218_943_246_663_1e-3,
    -1.165_167_591_859_065_2e-3,
    -2.152_416_741_149_509_8e-4,
    1.280_502_823_881_162e-4,
    -2.013_485_478_078_824e-5,
    -1.250_493_482_142_670_6e-6,
    1.133_027_231_981_696e-6,
    -2.056_338_416_977_607e-7,
    6.116_095_104_481_416e-9,
    5.002_007_644_469_223e-9,
    -1.181_274_570_487_02e-9,
    1.043_426_711_691_100_5e-10,
    7.782_263_439_905_071e-12,
    -3.696_805_618_642_206e-12,
    5.100_370_287_454_476e-13,
    -2.058_326_053_566_506_6e-14,
    -5.348_122_539_423_018e-15,
    1.226_778_628_238_260_8e-15,
    -1.181_259_301_697_458_8e-16,
    1.186_692_254_751_600_4e-18,
];

/// Γ(x) by recurrence onto [0.5, 1.5) and a Taylor series there; a few ulp for |x| ≤ 30.
fn gamma_direct(x: f64) -> f64 {
    let n = (x - 0.5).floor();
    let z = x - n - 1.0; // in [-0.5, 0.5)
    let mut r = 0.0;
    for c in RGAMMA1P.iter().rev() {
        r = r * z + c;
    }
    let mut g = 1.0 / r; // Γ(1+z)
    if n >= 0.0 {
        for k in 1..=(n as i64) {
            g *= z + k as f64;
        }
    } else {
        for k in 0..((-n) as i64) {
            g /= z - k as f64;
        }
    }
    g
}

const DIRECT_RANGE: f64 = 30.0;

/// Index m if `z` lies within [`POLE_EPS`] of the pole at -m.
pub fn pole_index(z: Complex64) -> Option<u64> {
    if z.im.abs() > POLE_EPS || z.re > POLE_EPS {
        return None;
    }
    let r = z.re.round();
    ((z.re - r).abs() <= POLE_EPS).then(|| (-r) as u64)
}

pub fn pole_index_real(x: f64) -> Option<u64> {
    pole_index(Complex64::new(x, 0.0))
}

fn check_finite(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn stirling_tail(z: Complex64) -> Complex64 {
    let w = z.inv();
    let w2 = w * w;
    let mut acc = Complex64::new(0.0, 0.0);
    for c in STIRLING.iter().rev() {
        acc = acc * w2 + c;
    }
    acc * w
}

fn stirling(z: Complex64) -> Complex64 {
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + stirling_tail(z)
}

fn use_stirling(z: Complex64) -> bool {
    z.re >= 12.0 || (z.re > 0.0 && z.norm() >= 20.0)
}

/// Principal branch of log Γ(z).
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    check_finite(z)?;
    if pole_index(z).is_some() {
        return Err(Error::Pole(z));
    }
    if use_stirling(z) {
        return Ok(stirling(z));
    }
    // Shift upward: ln Γ(z) = ln Γ(z+n) − Σ ln(z+k), summing principal logs term by
    // term, which is the continuation of the real log-gamma cut along the negative axis.
    let n = (12.0 - z.re).ceil().max(1.0) as usize;
    let mut shift = Complex64::new(0.0, 0.0);
    for k in 0..n {
        shift += (z + k as f64).ln();
    }
    Ok(stirling(z + n as f64) - shift)
}

/// Γ(z) for complex argument.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(ln_gamma(z)?.exp())
}

/// 1/Γ(z); exact zero at the poles.
pub fn rgamma(z: Complex64) -> Result<Complex64> {
    check_finite(z)?;
    if pole_index(z).is_some() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok((-ln_gamma(z)?).exp())
}

/// (ln|Γ(x)|, sign Γ(x)) for real x.
pub fn ln_gamma_abs(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    if pole_index_real(x).is_some() {
        return Err(Error::Pole(Complex64::new(x, 0.0)));
    }
    if x >= 12.0 {
        return Ok((stirling(Complex64::new(x, 0.0)).re, 1.0));
    }
    let n = (12.0 - x).ceil() as usize;
    let mut sign = 1.0;
    let mut shift = 0.0;
    let mut prod = 1.0;
    for k in 0..n {
        let f = x + k as f64;
        if f < 0.0 {
            sign = -sign;
        }
        prod *= f.abs();
        if !(1e-150..=1e150).contains(&prod) || k % 16 == 15 {
            shift += prod.ln();
            prod = 1.0;
        }
    }
    shift += prod.ln();
    Ok((stirling(Complex64::new(x + n as f64, 0.0)).re - shift, sign))
}

/// Γ(x) for real x.
pub fn gamma_real(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    if pole_index_real(x).is_some() {
        return Err(Error::Pole(Complex64::new(x, 0.0)));
    }
    if x.abs() <= DIRECT_RANGE {
        return Ok(gamma_direct(x));
    }
    let (l, s) = ln_gamma_abs(x)?;
    Ok(s * l.exp())
}

/// 1/Γ(x) for real x; exact zero at the poles.
pub fn rgamma_real(x: f64) -> Result<f64> {
    if pole_index_real(x).is_some() {
        return Ok(0.0);
    }
    let (l, s) = ln_gamma_abs(x)?;
    Ok(s * (-l).exp())
}

/// sin(πx) with exact argument reduction, so sin_pi(n) = 0 for integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    (PI * r).sin()
}

/// cos(πx) with exact argument reduction.
pub fn cos_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if r.abs() == 0.5 {
        return 0.0;
    }
    (PI * r).cos()
}

/// cos(πz) for complex z.
pub fn cos_pi_c(z: Complex64) -> Complex64 {
    let y = PI * z.im;
    Complex64::new(cos_pi(z.re) * y.cosh(), -sin_pi(z.re) * y.sinh())
}

/// sin(πz) for complex z.
pub fn sin_pi_c(z: Complex64) -> Complex64 {
    let y = PI * z.im;
    Complex64::new(sin_pi(z.re) * y.cosh(), cos_pi(z.re) * y.sinh())
}

/// ln|cos(π(x + iy))|, stable for large |y|.
pub fn ln_abs_cos_pi(x: f64, y: f64) -> f64 {
    // |cos(π(x+iy))|² = cos²(πx) + sinh²(πy)
    let t = PI * y.abs();
    let c = cos_pi(x);
    if t > 20.0 {
        // sinh²(t) ≈ e^{2t}/4
        let base = t - std::f64::consts::LN_2;
        base + 0.5 * (1.0 + c * c * 4.0 * (-2.0 * t).exp()).ln()
    } else {
        0.5 * (c * c + t.sinh().powi(2)).ln()
    }
}

/// sin((α+θ)π)/sin(θπ).
///
/// For integer θ the ratio is only defined when α is an integer too, in which case
/// the limit cos(απ) is returned.
pub fn sin_ratio(alpha: f64, theta: f64) -> Result<f64> {
    if !alpha.is_finite() || !theta.is_finite() {
        return Err(Error::NonFinite);
    }
    let near_int = |v: f64| (v - v.round()).abs() < 1e-12;
    if near_int(theta) {
        if near_int(alpha) {
            return Ok(cos_pi(alpha.round()));
        }
        return Err(Error::Domain(format!(
            "sin_ratio undefined for integer theta = {theta} and non-integer alpha = {alpha}"
        )));
    }
    Ok(sin_pi(alpha + theta) / sin_pi(theta))
}

/// Rising factorial (a)_k.
pub fn pochhammer(a: Complex64, k: u64) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    for j in 0..k {
        p *= a + j as f64;
    }
    p
}

pub fn pochhammer_real(a: f64, k: u64) -> f64 {
    (0..k).fold(1.0, |p, j| p * (a + j as f64))
}

/// ln sin(πz) modulo 2πi, stable for large |Im z|.
pub fn ln_sin_pi_c(z: Complex64) -> Complex64 {
    if z.im.abs() < 5.0 {
        return sin_pi_c(z).ln();
    }
    if z.im < 0.0 {
        return ln_sin_pi_c(z.conj()).conj();
    }
    // sin(πz) = (i/2) e^{−iπz} (1 − e^{2iπz})
    let x = z.re - 2.0 * (z.re / 2.0).round();
    let e2 = Complex64::new(0.0, 2.0 * PI * x).exp() * (-2.0 * PI * z.im).exp();
    Complex64::new(-std::f64::consts::LN_2 + PI * z.im, PI / 2.0 - PI * x) + ln1p_c(-e2)
}

/// ln Γ(z) modulo 2πi; uses reflection in the left half-plane, so the cost does not
/// grow with |Re z|. Suitable wherever only exp(ln Γ) is needed.
pub fn ln_gamma_mod(z: Complex64) -> Result<Complex64> {
    check_finite(z)?;
    if pole_index(z).is_some() {
        return Err(Error::Pole(z));
    }
    if z.re >= 0.5 {
        return ln_gamma(z);
    }
    let ln_pi = PI.ln();
    Ok(Complex64::new(ln_pi, 0.0) - ln_sin_pi_c(z) - ln_gamma(1.0 - z)?)
}

/// ln Γ(z+a) − ln Γ(z+b) modulo 2πi, accurate when |z| is large compared with |a|, |b|.
pub fn ln_gamma_ratio(z: Complex64, a: Complex64, b: Complex64) -> Result<Complex64> {
    let scale = 1.0 + a.norm().max(b.norm());
    if z.norm() < 40.0 * scale {
        return Ok(ln_gamma_mod(z + a)? - ln_gamma_mod(z + b)?);
    }
    if z.re < 0.0 {
        // Γ(z+a)/Γ(z+b) = [sin π(z+b) / sin π(z+a)] · Γ(1−b−z)/Γ(1−a−z)
        let refl = ln_sin_pi_c(z + b) - ln_sin_pi_c(z + a);
        return Ok(refl + ln_gamma_ratio(-z, 1.0 - b, 1.0 - a)?);
    }
    let wa = z + a;
    let wb = z + b;
    let lz = z.ln();
    let main = (a - b) * lz + (wa - 0.5) * ln1p_c(a / z) - (wb - 0.5) * ln1p_c(b / z) - (a - b);
    Ok(main + stirling_tail(wa) - stirling_tail(wb))
}

/// ln(1+u) for complex u, accurate for small |u|.
pub fn ln1p_c(u: Complex64) -> Complex64 {
    let m = 2.0 * u.re + u.norm_sqr();
    Complex64::new(0.5 * m.ln_1p(), u.im.atan2(1.0 + u.re))
}

/// Quotient Γ[numerators; denominators] of gamma functions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GammaBracket {
    pub numerators: Vec<Complex64>,
    pub denominators: Vec<Complex64>,
}

impl GammaBracket {
    pub fn new(numerators: Vec<Complex64>, denominators: Vec<Complex64>) -> Self {
        Self { numerators, denominators }
    }

    pub fn real(numerators: &[f64], denominators: &[f64]) -> Self {
        let c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(c(numerators), c(denominators))
    }

    // Residue bookkeeping: near z = -m, Γ(z) ≈ (-1)^m / (m! (z+m)); the (z+m) factors
    // cancel pairwise when pole counts match.
    fn pole_factor(poles: &[u64]) -> (f64, f64) {
        let mut ln = 0.0;
        let mut sign = 1.0;
        for &m in poles {
            ln -= ln_factorial(m);
            if m % 2 == 1 {
                sign = -sign;
            }
        }
        (ln, sign)
    }

    fn split(v: &[Complex64]) -> (Vec<Complex64>, Vec<u64>) {
        let mut regular = Vec::with_capacity(v.len());
        let mut poles = Vec::new();
        for &z in v {
            match pole_index(z) {
                Some(m) => poles.push(m),
                None => regular.push(z),
            }
        }
        (regular, poles)
    }

    /// Value of the bracket; exact zero for uncancelled denominator poles.
    pub fn eval(&self) -> Result<Complex64> {
        for &z in self.numerators.iter().chain(&self.denominators) {
            check_finite(z)?;
        }
        let (num, num_poles) = Self::split(&self.numerators);
        let (den, den_poles) = Self::split(&self.denominators);
        if num_poles.len() > den_poles.len() {
            let z = self
                .numerators
                .iter()
                .copied()
                .find(|&z| pole_index(z).is_some())
                .unwrap_or_default();
            return Err(Error::Pole(z));
        }
        if num_poles.len() < den_poles.len() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let all_real = self.numerators.iter().chain(&self.denominators).all(|z| z.im == 0.0);
        let (lnn, sn) = Self::pole_factor(&num_poles);
        let (lnd, sd) = Self::pole_factor(&den_poles);
        if all_real
            && num.iter().chain(&den).all(|z| z.re.abs() <= DIRECT_RANGE)
            && num_poles.is_empty()
        {
            let mut v = 1.0;
            for z in &num {
                v *= gamma_direct(z.re);
            }
            for z in &den {
                v /= gamma_direct(z.re);
            }
            if v.is_finite() && v != 0.0 {
                return Ok(Complex64::new(v, 0.0));
            }
        }
        if all_real {
            let mut ln = lnn - lnd;
            let mut sign = sn * sd;
            for z in &num {
                let (l, s) = ln_gamma_abs(z.re)?;
                ln += l;
                sign *= s;
            }
            for z in &den {
                let (l, s) = ln_gamma_abs(z.re)?;
                ln -= l;
                sign *= s;
            }
            return Ok(Complex64::new(sign * ln.exp(), 0.0));
        }
        let mut ln = Complex64::new(lnn - lnd, 0.0);
        for &z in &num {
            ln += ln_gamma(z)?;
        }
        for &z in &den {
            ln -= ln_gamma(z)?;
        }
        Ok(ln.exp() * (sn * sd))
    }

    /// Real part of [`eval`](Self::eval) for brackets with real entries.
    pub fn eval_real(&self) -> Result<f64> {
        Ok(self.eval()?.re)
    }
}

/// ln|Γ(iy)| = ½ ln(π / (y sinh πy)), y ≠ 0.
pub fn ln_abs_gamma_imag(y: f64) -> f64 {
    let y = y.abs();
    let x = PI * y;
    // ln sinh x without overflow
    let ln_sinh = if x > 20.0 { x - std::f64::consts::LN_2 + (-(2.0 * x)).exp().ln_1p() } else { x.sinh().ln() };
    0.5 * (PI.ln() - y.ln() - ln_sinh)
}

/// ln|Γ(a+is)| + π|s|/2 − (a−½)ln|s|, bounded as |s| → ∞ and free of cancellation there.
pub fn ln_abs_gamma_reduced(a: f64, s: f64) -> Result<f64> {
    let s = s.abs();
    if a == 0.0 {
        // |Γ(is)|² = π/(s sinh πs)
        return Ok(0.5 * (2.0 * PI).ln() - 0.5 * (-(-2.0 * PI * s).exp_m1()).ln());
    }
    if s < 50.0 {
        return Ok(ln_gamma(Complex64::new(a, s))?.re + 0.5 * PI * s - (a - 0.5) * s.ln());
    }
    let z = Complex64::new(a, s);
    let w = z.inv();
    let w2 = w * w;
    let series = w * (1.0 / 12.0 - w2 * (1.0 / 360.0 - w2 * (1.0 / 1260.0 - w2 / 1680.0)));
    let r = (a - 0.5) * 0.5 * (a / s).powi(2).ln_1p() + s * (a / s).atan() - a;
    Ok(r + 0.5 * (2.0 * PI).ln() + series.re)
}

/// Shorthand for a real gamma bracket value.
pub fn gamma_bracket_real(num: &[f64], den: &[f64]) -> Result<f64> {
    GammaBracket::real(num, den).eval_real()
}

pub fn ln_factorial(m: u64) -> f64 {
    if m < 2 {
        return 0.0;
    }
    ln_gamma_abs(m as f64 + 1.0).map(|v| v.0).unwrap_or(f64::INFINITY)
}
