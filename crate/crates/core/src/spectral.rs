//! The operator D, boundary conditions at x = 1, and the spectral transform U.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ortho::{phi_norm_sq, LocalExpansion, Params, Phi, PiecewiseFn, Psi, SpectralIndex, S_FLOOR};
use crate::quadrature::{hermitian_pairing, QuadratureSpec};
use crate::special::{gamma_bracket_real, ln_abs_cos_pi, ln_abs_gamma_imag, ln_gamma, ln_gamma_abs, sin_pi};

// ---------------------------------------------------------------------------
// D = x(1−x) d²/dx² + (β+1−(α+β+2)x) d/dx

/// f, f', f'' at x by five-point central differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorSample {
    pub x: f64,
    pub f: f64,
    pub d1: f64,
    pub d2: f64,
    pub h: f64,
}

impl OperatorSample {
    /// Step max(1e-5, 1e-4|x−1|, 2e-3·d) capped at d/4, d the distance to the nearer of 0 and 1.
    pub fn new(f: &dyn PiecewiseFn, x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
        let d1 = (x - 1.0).abs();
        if !(x > 0.0) || d1 < 1e-12 {
            return Err(Error::SingularPoint(if x <= 0.0 { 0.0 } else { 1.0 }));
        }
        let d = d1.min(x);
        let h = f64::max(1e-5, 1e-4 * d1).max(2e-3 * d).min(0.25 * d);
        Self::with_step(f, x, h)
    }

    /// As [`OperatorSample::new`] with an explicit step; x ± 2h must stay on one piece.
    pub fn with_step(f: &dyn PiecewiseFn, x: f64, h: f64) -> Result<Self> {
        let d = (x - 1.0).abs().min(x);
        if !(h > 0.0 && 2.0 * h < d) {
            return Err(Error::Domain(format!("step {h} straddles a singular point near x = {x}")));
        }
        let v = [f.at(x - 2.0 * h)?, f.at(x - h)?, f.at(x)?, f.at(x + h)?, f.at(x + 2.0 * h)?];
        let d1 = (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h);
        let d2 = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h);
        Ok(Self { x, f: v[2], d1, d2, h })
    }

    pub fn apply_d(&self, params: &Params) -> f64 {
        let x = self.x;
        x * (1.0 - x) * self.d2 + (params.beta + 1.0 - (params.alpha + params.beta + 2.0) * x) * self.d1
    }
}

/// (D f)(x) by finite differences.
pub fn apply_d(params: &Params, f: &dyn PiecewiseFn, x: f64) -> Result<f64> {
    Ok(OperatorSample::new(f, x)?.apply_d(params))
}

/// |D f − λ f| at x, together with |f(x)|.
pub fn eigen_residual(params: &Params, f: &dyn PiecewiseFn, lambda: f64, x: f64) -> Result<(f64, f64)> {
    let s = OperatorSample::new(f, x)?;
    Ok(((s.apply_d(params) - lambda * s.f).abs(), s.f.abs()))
}

/// λ = −p(p+α+β+1).
pub fn lambda_of_p(params: &Params, p: f64) -> f64 {
    -p * (p + params.alpha + params.beta + 1.0)
}

pub fn lambda_of_p_c(params: &Params, p: C) -> C {
    -p * (p + params.alpha + params.beta + 1.0)
}

/// The root p of λ = −p(p+α+β+1) with Re p ≥ −(α+β+1)/2 (Im p ≥ 0 on the critical line).
pub fn p_of_lambda(params: &Params, lambda: f64) -> C {
    let h = 0.5 * (params.alpha + params.beta + 1.0);
    let disc = h * h - lambda;
    if disc >= 0.0 {
        C::new(-h + disc.sqrt(), 0.0)
    } else {
        C::new(-h, (-disc).sqrt())
    }
}

/// (α+β+1)²/4, the bottom of the continuous spectrum.
pub fn continuous_threshold(params: &Params) -> f64 {
    let h = 0.5 * (params.alpha + params.beta + 1.0);
    h * h
}

// ---------------------------------------------------------------------------
// Boundary behaviour at x = 1

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    /// B_left − B_right
    pub defect_b: f64,
    /// A_right·sin((α+θ)π)/sin θπ − A_left (at θ = 0: A_right·sin απ)
    pub defect_a: f64,
    pub scale: f64,
    pub pass: bool,
}

pub const BOUNDARY_TOL: f64 = 1e-9;

/// Tests the gluing condition on the local data at x = 1.
pub fn boundary_report(le: &LocalExpansion, params: &Params) -> BoundaryReport {
    let defect_b = le.b_left - le.b_right;
    let defect_a = match params.sin_ratio() {
        Some(r) => le.a_right * r - le.a_left,
        None => le.a_right * sin_pi(params.alpha),
    };
    let scale = le.scale();
    let pass = defect_b.abs() < BOUNDARY_TOL * scale && defect_a.abs() < BOUNDARY_TOL * scale;
    BoundaryReport { defect_b, defect_a, scale, pass }
}

pub fn boundary_check(le: &LocalExpansion, params: &Params) -> bool {
    boundary_report(le, params).pass
}

/// Predicted gluing defect of Φ_p when p − θ is not an integer:
/// B glues for every p and
/// A_right·sin((α+θ)π)/sin θπ − A_left = −Γ(2p+α+β+2)Γ(1+p+α) sin((θ−p)π) / (Γ(p+β+1)Γ(1+α) sin θπ).
pub fn phi_gluing_defect(params: &Params, p: f64) -> Result<f64> {
    let (a, b, th) = (params.alpha, params.beta, params.theta);
    if th == 0.0 {
        return Err(Error::Domain("gluing defect formula needs theta != 0".into()));
    }
    let g = gamma_bracket_real(&[2.0 * p + a + b + 2.0, 1.0 + p + a], &[p + b + 1.0, 1.0 + a])?;
    Ok(-g * sin_pi(th - p) / sin_pi(th))
}

/// lim_{ε→0} ({Df,g} − {f,Dg}) from the local data:
/// −α·[(A_L B̃_L − B_L Ã_L) − s·(A_R B̃_R − B_R Ã_R)], s = sin((α+θ)π)/sin θπ.
///
/// The contributions at 0 and ∞ are assumed to vanish.
pub fn symmetry_defect_local(params: &Params, f: &LocalExpansion, g: &LocalExpansion) -> f64 {
    let left = f.a_left * g.b_left - f.b_left * g.a_left;
    let right = f.a_right * g.b_right - f.b_right * g.a_right;
    let s = params.sin_ratio().unwrap_or(0.0);
    -params.alpha * (left - s * right)
}

pub fn symmetry_defect(params: &Params, f: &dyn PiecewiseFn, g: &dyn PiecewiseFn) -> Result<f64> {
    let (Some(lf), Some(lg)) = (f.local(), g.local()) else {
        return Err(Error::Domain("symmetry defect needs declared local expansions".into()));
    };
    Ok(symmetry_defect_local(params, &lf, &lg))
}

/// The one-sided boundary terms x^{β+1}|1−x|^{α+1}(f'g − fg') at 1 ∓ ε, combined with the
/// sine ratio, using finite-difference derivatives.
pub fn wronskian_boundary_term(params: &Params, f: &dyn PiecewiseFn, g: &dyn PiecewiseFn, eps: f64) -> Result<f64> {
    let side = |x: f64| -> Result<f64> {
        let h = 2e-3 * eps;
        let sf = OperatorSample::with_step(f, x, h)?;
        let sg = OperatorSample::with_step(g, x, h)?;
        let w = sf.d1 * sg.f - sf.f * sg.d1;
        Ok(x.powf(params.beta + 1.0) * (x - 1.0).abs().powf(params.alpha + 1.0) * w)
    };
    let l = side(1.0 - eps)?;
    let s = params.sin_ratio().unwrap_or(0.0);
    let r = if s == 0.0 { 0.0 } else { side(1.0 + eps)? };
    Ok(l + s * r)
}

// ---------------------------------------------------------------------------
// Plancherel weight and the transform U

/// w(s) = sin θπ sin((θ+α)π)/(2πΓ(β+1)²) ·
/// |Γ((α+β+1)/2−is)Γ((−α+β+1)/2−is) / (Γ(2is) cos(((α+β)/2+θ−is)π))|².
pub fn plancherel_weight(params: &Params, s: f64) -> Result<f64> {
    let (a, b, th) = (params.alpha, params.beta, params.theta);
    if !(s >= S_FLOOR) {
        return Err(Error::Domain(format!("plancherel weight needs s >= {S_FLOOR}, got {s}")));
    }
    if th == 0.0 {
        return Ok(0.0);
    }
    let k = sin_pi(th) * sin_pi(th + a);
    let (lg_b, _) = ln_gamma_abs(b + 1.0)?;
    let l1 = ln_gamma(C::new((a + b + 1.0) / 2.0, -s))?.re;
    let l2 = ln_gamma(C::new((-a + b + 1.0) / 2.0, -s))?.re;
    let l3 = ln_abs_gamma_imag(2.0 * s);
    let l4 = ln_abs_cos_pi((a + b) / 2.0 + th, -s);
    let ln_mod = 2.0 * (l1 + l2 - l3 - l4);
    Ok(k / (2.0 * PI) * (ln_mod - 2.0 * lg_b).exp())
}

/// Uniform grid s_floor, s_floor + step, … up to s_max.
pub fn uniform_grid(s_floor: f64, s_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(s_floor >= S_FLOOR && s_max > s_floor && step > 0.0) {
        return Err(Error::InvalidParams(format!(
            "bad grid: s_floor = {s_floor}, s_max = {s_max}, step = {step}"
        )));
    }
    let n = ((s_max - s_floor) / step).round() as usize;
    Ok((0..=n).map(|k| s_floor + k as f64 * step).collect())
}

/// Default continuous grid: step 0.05 from s_floor to 40.
pub fn default_grid() -> Vec<f64> {
    uniform_grid(0.05, 40.0, 0.05).expect("static grid")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteCoefficient {
    pub index: SpectralIndex,
    /// a(p) = ⟨f, Φ_p⟩
    pub value: f64,
    /// ⟨Φ_p, Φ_p⟩
    pub norm_sq: f64,
    pub est_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub coeffs: Vec<DiscreteCoefficient>,
    pub s_grid: Vec<f64>,
    /// F(s) = ⟨f, Ψ_s⟩ on the grid
    pub continuous: Vec<f64>,
    /// w(s) on the grid
    pub weights: Vec<f64>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|s| !(s.is_finite() && *s >= S_FLOOR)) {
        return Err(Error::InvalidParams(format!("grid values must be finite and >= {S_FLOOR}")));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParams("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// a(p) for n_min ≤ n ≤ n_max and F(s) on the grid, by quadrature.
pub fn forward_transform(
    params: &Params,
    f: &dyn PiecewiseFn,
    n_max: i64,
    s_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<SpectralData> {
    check_grid(s_grid)?;
    let coeffs = params
        .indices(n_max)
        .par_iter()
        .map(|&idx| {
            let phi = Phi::new(params, idx)?;
            let r = hermitian_pairing(params, f, &phi, spec)?;
            Ok(DiscreteCoefficient { index: idx, value: r.value, norm_sq: phi_norm_sq(params, idx.p)?, est_error: r.est_error })
        })
        .collect::<Result<Vec<_>>>()?;
    let (continuous, weights): (Vec<f64>, Vec<f64>) = if params.theta == 0.0 {
        (vec![0.0; s_grid.len()], vec![0.0; s_grid.len()])
    } else {
        s_grid
            .par_iter()
            .map(|&s| {
                let psi = Psi::new(params, s)?;
                Ok((hermitian_pairing(params, f, &psi, spec)?.value, plancherel_weight(params, s)?))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip()
    };
    Ok(SpectralData { coeffs, s_grid: s_grid.to_vec(), continuous, weights })
}

/// Trapezoid rule on a (possibly non-uniform) grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsevalReport {
    /// ⟨f, g⟩
    pub lhs: f64,
    /// Σ a(p) b(p) / ⟨Φ_p, Φ_p⟩
    pub discrete: f64,
    /// ∫ w(s) F(s) G(s) ds
    pub continuous: f64,
    pub rhs: f64,
    pub residual: f64,
    /// |last discrete term|, a proxy for the truncation of the sum
    pub last_term: f64,
}

/// [Uf, Ug]_V from two transforms on the same indices and grid.
pub fn v_product(fd: &SpectralData, gd: &SpectralData) -> Result<(f64, f64, f64)> {
    if fd.coeffs.len() != gd.coeffs.len() || fd.s_grid != gd.s_grid {
        return Err(Error::InvalidParams("transforms on different indices or grids".into()));
    }
    let terms: Vec<f64> = fd.coeffs.iter().zip(&gd.coeffs).map(|(a, b)| a.value * b.value / a.norm_sq).collect();
    let discrete = terms.iter().sum();
    let last = terms.last().map_or(0.0, |t| t.abs());
    // w(s)F(s)G(s) is even in s and vanishes at 0, so the panel [0, s_0] enters with value 0 at s = 0
    let mut xs = vec![0.0];
    xs.extend_from_slice(&fd.s_grid);
    let mut y = vec![0.0];
    y.extend((0..fd.s_grid.len()).map(|k| fd.weights[k] * fd.continuous[k] * gd.continuous[k]));
    Ok((discrete, trapezoid(&xs, &y), last))
}

pub fn parseval_check(
    params: &Params,
    f: &dyn PiecewiseFn,
    g: &dyn PiecewiseFn,
    n_max: i64,
    s_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<ParsevalReport> {
    let lhs = hermitian_pairing(params, f, g, spec)?.value;
    let fd = forward_transform(params, f, n_max, s_grid, spec)?;
    let gd = forward_transform(params, g, n_max, s_grid, spec)?;
    report(lhs, &fd, &gd)
}

/// [`parseval_check`] with g = f, transforming f once.
pub fn parseval_norm_check(
    params: &Params,
    f: &dyn PiecewiseFn,
    n_max: i64,
    s_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<ParsevalReport> {
    let lhs = hermitian_pairing(params, f, f, spec)?.value;
    let fd = forward_transform(params, f, n_max, s_grid, spec)?;
    report(lhs, &fd, &fd)
}

fn report(lhs: f64, fd: &SpectralData, gd: &SpectralData) -> Result<ParsevalReport> {
    let (discrete, continuous, last_term) = v_product(fd, gd)?;
    let rhs = discrete + continuous;
    Ok(ParsevalReport { lhs, discrete, continuous, rhs, residual: (lhs - rhs).abs(), last_term })
}

// ---------------------------------------------------------------------------
// Closed forms for ξ_μ

/// ⟨ξ_μ, Φ_p⟩ = Γ(2p+α+β+2)Γ(μ+α+1)Γ(μ+1) / (Γ(p+α+β+μ+2)Γ(μ+1−p)).
pub fn xi_discrete_coefficient(params: &Params, mu: f64, p: f64) -> Result<f64> {
    let (a, b) = (params.alpha, params.beta);
    gamma_bracket_real(&[2.0 * p + a + b + 2.0, mu + a + 1.0, mu + 1.0], &[p + a + b + mu + 2.0, mu + 1.0 - p])
}

/// ⟨ξ_μ, Ψ_s⟩ = Γ(β+1)Γ(μ+α+1)Γ(μ+1) / |Γ(μ+(α+β+3)/2+is)|².
pub fn xi_continuous_coefficient(params: &Params, mu: f64, s: f64) -> Result<f64> {
    let (a, b) = (params.alpha, params.beta);
    let lg = ln_gamma(C::new(mu + (a + b + 3.0) / 2.0, s))?.re;
    Ok(gamma_bracket_real(&[b + 1.0, mu + a + 1.0, mu + 1.0], &[])? * (-2.0 * lg).exp())
}

/// ⟨ξ_μ, ξ_ν⟩ = B(β+1, α+μ+ν+1).
pub fn xi_inner(params: &Params, mu: f64, nu: f64) -> Result<f64> {
    let (a, b) = (params.alpha, params.beta);
    gamma_bracket_real(&[b + 1.0, a + mu + nu + 1.0], &[a + b + mu + nu + 2.0])
}

/// max over xs of |DΦ_p − λ(p)Φ_p| / (1 + |Φ_p|).
pub fn phi_eigen_residual(params: &Params, idx: SpectralIndex, xs: &[f64]) -> Result<f64> {
    let phi = Phi::new(params, idx)?;
    let lam = lambda_of_p(params, idx.p);
    let mut worst = 0.0f64;
    for &x in xs {
        let (r, m) = eigen_residual(params, &phi, lam, x)?;
        worst = worst.max(r / (1.0 + m));
    }
    Ok(worst)
}

/// Discrete eigenvalues below the threshold and continuous ones above, as (max discrete,
/// threshold, min continuous).
pub fn spectrum_bounds(params: &Params, n_max: i64, s_grid: &[f64]) -> (f64, f64, f64) {
    let thr = continuous_threshold(params);
    let dmax = params.indices(n_max).iter().map(|i| lambda_of_p(params, i.p)).fold(f64::NEG_INFINITY, f64::max);
    let cmin = s_grid.iter().map(|s| thr + s * s).fold(f64::INFINITY, f64::min);
    (dmax, thr, cmin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ortho::{FnPiecewise, Xi};

    fn pr() -> Params {
        Params::new(0.3, 0.5, 0.25).unwrap()
    }

    #[test]
    fn constants_are_annihilated() {
        let one = FnPiecewise::new(|_| Ok(1.0));
        for x in [0.3, 1.7, 4.0] {
            assert!(apply_d(&pr(), &one, x).unwrap().abs() < 1e-12);
        }
        assert!(matches!(apply_d(&pr(), &one, 1.0), Err(Error::SingularPoint(_))));
    }

    #[test]
    fn eigen_equation() {
        let p = pr();
        for n in p.n_min()..=4 {
            let idx = p.index(n).unwrap();
            let r = phi_eigen_residual(&p, idx, &[0.3, 0.8, 1.7]).unwrap();
            assert!(r < 1e-6, "n={n}: {r}");
        }
    }

    #[test]
    fn lambda_round_trip() {
        let p = pr();
        assert_eq!(lambda_of_p(&p, 0.0), 0.0);
        for q in [-0.3, 0.25, 1.7, 6.0] {
            let back = p_of_lambda(&p, lambda_of_p(&p, q));
            assert!((back.re - q).abs() < 1e-13 && back.im == 0.0);
        }
        let h = 0.9;
        let lam = lambda_of_p_c(&p, C::new(-h, 2.0));
        assert!((lam.re - (h * h + 4.0)).abs() < 1e-13 && lam.im.abs() < 1e-13);
        let back = p_of_lambda(&p, lam.re);
        assert!((back - C::new(-h, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn gluing() {
        let p = pr();
        for n in -1..=4 {
            let phi = Phi::new(&p, p.index(n).unwrap()).unwrap();
            assert!(boundary_check(&phi.local_expansion(), &p), "n={n}");
        }
        for s in [0.3, 1.0, 4.0] {
            let psi = Psi::new(&p, s).unwrap();
            assert!(boundary_check(&psi.local_expansion(), &p));
        }
        for q in [0.6, 1.9] {
            let phi = Phi::with_p(&p, q).unwrap();
            let rep = boundary_report(&phi.local_expansion(), &p);
            assert!(!rep.pass);
            let want = phi_gluing_defect(&p, q).unwrap();
            assert!((rep.defect_a - want).abs() < 1e-10 * want.abs(), "{rep:?} {want}");
            assert!(rep.defect_b.abs() < 1e-9 * rep.scale);
        }
    }

    #[test]
    fn symmetry_defect_matches_wronskian() {
        let p = pr();
        let f = Phi::with_p(&p, 0.6).unwrap();
        let g = Phi::new(&p, p.index(1).unwrap()).unwrap();
        let d = symmetry_defect(&p, &f, &g).unwrap();
        assert!(d.abs() > 1e-3);
        let w = wronskian_boundary_term(&p, &f, &g, 1e-6).unwrap();
        assert!((w - d).abs() < 1e-3 * d.abs(), "{w} {d}");
        let g2 = Phi::new(&p, p.index(2).unwrap()).unwrap();
        assert!(symmetry_defect(&p, &g, &g2).unwrap().abs() < 1e-7);
    }

    #[test]
    fn weight_properties() {
        let p = pr();
        let w1 = plancherel_weight(&p, 1.0).unwrap();
        assert!(w1.is_finite() && w1 > 0.0);
        assert!(plancherel_weight(&p, 1e-5).unwrap() < 1e-6 * w1);
        assert!(plancherel_weight(&p, 0.0).is_err());
        let z = Params::new(0.3, 0.5, 0.0).unwrap();
        assert_eq!(plancherel_weight(&z, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn xi_coefficients_by_quadrature() {
        let p = pr();
        let spec = QuadratureSpec::default();
        let grid = [0.5, 2.0, 7.5];
        let d = forward_transform(&p, &Xi { mu: 0.6 }, 3, &grid, &spec).unwrap();
        for c in &d.coeffs {
            let want = xi_discrete_coefficient(&p, 0.6, c.index.p).unwrap();
            assert!((c.value - want).abs() < 1e-9 * (1.0 + want.abs()), "{c:?} {want}");
        }
        for (k, &s) in grid.iter().enumerate() {
            let want = xi_continuous_coefficient(&p, 0.6, s).unwrap();
            assert!((d.continuous[k] - want).abs() < 1e-9 * (1.0 + want.abs()), "{s}: {} {want}", d.continuous[k]);
        }
    }

    #[test]
    fn dichotomy() {
        let p = pr();
        let (d, t, c) = spectrum_bounds(&p, 20, &default_grid());
        assert!(d < t && t <= c);
    }
}
