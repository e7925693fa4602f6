//! Polynomial roots, residues, and principal values over the unit circle:
//! the half-residue contour formula (exact when the denominator splits over
//! the Gaussian rationals by circle class) and independent quadratures in the
//! angle variable.

use crate::numeric::{integrate, integrate_path, rational_approx, richardson, Quad};
use crate::trigfun::{gauss, gauss_i, gauss_int, gauss_to_c64, zeros_on_circle, LaurentPoly, RationalTrig, ZPoly};
use crate::{GaussRat, Rat};
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PvError {
    #[error("principal value undefined: pole of order {multiplicity} on the contour at angle {angle}")]
    PVUndefined { angle: f64, multiplicity: usize },
    #[error("pole at {location} has multiplicity {multiplicity}")]
    MultiplePole { location: Complex64, multiplicity: usize },
    #[error("root finding failed: {0}")]
    RootFindingFailure(String),
    #[error("polynomial degree {degree} exceeds cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },
    #[error("principal value quadrature does not converge (error estimate {estimate:e})")]
    PVDiverges { estimate: f64 },
    #[error("zero polynomial")]
    ZeroPolynomial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CircleClass {
    Inside,
    OnContour,
    Outside,
}

#[derive(Clone, Copy, Debug)]
pub struct RootConfig {
    pub tau_circle: f64,
    pub tau_cluster: f64,
    pub max_degree: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig { tau_circle: 1e-10, tau_cluster: 1e-8, max_degree: 1024 }
    }
}

#[derive(Clone, Debug)]
pub struct Root {
    pub location: Complex64,
    pub multiplicity: usize,
    pub class: CircleClass,
}

#[derive(Clone, Debug, Default)]
pub struct RootSet {
    pub roots: Vec<Root>,
    /// max |p(root)| / max |coeff| over the returned roots
    pub max_residual: f64,
    /// some root lies within 10·τ_circle of the circle without being on it
    pub borderline: bool,
}

impl RootSet {
    pub fn degree(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PvMethod {
    Residues,
    Quadrature,
}

#[derive(Clone, Debug, Serialize)]
pub struct PVResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub method: PvMethod,
    pub on_contour_poles: Vec<f64>,
    /// exact `value/π` when the residue path ran in exact arithmetic
    #[serde(skip)]
    pub exact_over_pi: Option<GaussRat>,
}

fn classify(z: Complex64, cfg: &RootConfig) -> (CircleClass, bool) {
    let d = z.norm() - 1.0;
    if d.abs() <= cfg.tau_circle {
        (CircleClass::OnContour, false)
    } else {
        let border = d.abs() <= 10.0 * cfg.tau_circle;
        (if d < 0.0 { CircleClass::Inside } else { CircleClass::Outside }, border)
    }
}

/// Simultaneous Aberth-Ehrlich iteration for a polynomial with simple roots,
/// followed by Newton polishing.
pub fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>, PvError> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(vec![]);
    }
    let lead = coeffs[n];
    let a: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    if n == 1 {
        return Ok(vec![-a[0]]);
    }
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in a.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    // Fujiwara-type radius bound for the starting circle
    let mut bound: f64 = 0.0;
    for (k, c) in a.iter().enumerate().take(n) {
        bound = bound.max(c.norm().powf(1.0 / (n - k) as f64));
    }
    let radius = (bound * 1.0).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut converged = false;
    for _ in 0..2000 {
        let mut maxc: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = eval(z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s += Complex64::new(1.0, 0.0) / (z[k] - z[j]);
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[k] -= w;
                maxc = maxc.max(w.norm() / z[k].norm().max(1.0));
            }
        }
        if maxc < 1e-15 {
            converged = true;
            break;
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*zk);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            *zk -= step;
        }
    }
    if !converged && z.iter().any(|r| !r.is_finite()) {
        return Err(PvError::RootFindingFailure("Aberth iteration did not converge".into()));
    }
    Ok(z)
}

/// Roots of a dense polynomial. Multiplicities come from the exact
/// square-free decomposition; each square-free factor is solved numerically.
pub fn find_roots_poly(p: &ZPoly, cfg: &RootConfig) -> Result<RootSet, PvError> {
    if p.is_zero() {
        return Err(PvError::ZeroPolynomial);
    }
    let deg = p.degree().unwrap();
    if deg > cfg.max_degree {
        return Err(PvError::DegreeOverflow { degree: deg, cap: cfg.max_degree });
    }
    let mut set = RootSet::default();
    if deg == 0 {
        return Ok(set);
    }
    let scale = p.max_abs().max(1e-300);
    for (factor, mult) in p.squarefree() {
        let rs = aberth(&factor.to_c64())?;
        for r in rs {
            let (class, border) = classify(r, cfg);
            set.borderline |= border;
            set.max_residual = set.max_residual.max(factor.eval(r).norm() / factor.max_abs().max(1e-300));
            set.roots.push(Root { location: r, multiplicity: mult, class });
        }
    }
    // merge numerically coincident roots (cannot happen across coprime factors
    // except through rounding; kept for inputs with nearly repeated roots)
    let mut merged: Vec<Root> = Vec::new();
    for r in set.roots.drain(..) {
        if let Some(m) = merged.iter_mut().find(|m| (m.location - r.location).norm() < cfg.tau_cluster) {
            m.multiplicity += r.multiplicity;
        } else {
            merged.push(r);
        }
    }
    set.roots = merged;
    let _ = scale;
    Ok(set)
}

/// Roots of the polynomial part of a Laurent polynomial (negative powers are
/// cleared by multiplying with `z^{-low}`).
pub fn find_roots(p: &LaurentPoly) -> Result<RootSet, PvError> {
    if p.is_zero() {
        return Err(PvError::ZeroPolynomial);
    }
    let low = p.low().unwrap();
    let q = if low < 0 { p.shift(-low) } else { p.clone() };
    let (s, poly) = q.to_poly();
    let mut full = poly;
    if s > 0 {
        let mut v = vec![GaussRat::zero(); s as usize];
        v.extend(full.c.iter().cloned());
        full = ZPoly::new(v);
    }
    find_roots_poly(&full, &RootConfig::default())
}

/// Rational function `N(z)/D(z)` in the z-plane.
#[derive(Clone, Debug)]
pub struct RationalZ {
    pub num: ZPoly,
    pub den: ZPoly,
}

impl RationalZ {
    pub fn new(num: ZPoly, den: ZPoly) -> Self {
        RationalZ { num, den }
    }
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }
    /// `f(z) = W(z)/(iz)` for a rational trigonometric integrand.
    pub fn from_angle_integrand(w: &RationalTrig) -> Self {
        let (n, d) = w.z_form();
        let iz = ZPoly::new(vec![GaussRat::zero(), gauss_i()]);
        RationalZ { num: n, den: d.mul(&iz) }
    }
}

/// `N(z0)/D'(z0)` at a simple root of `D`.
pub fn residue_simple(f: &RationalZ, z0: Complex64) -> Result<Complex64, PvError> {
    let roots = find_roots_poly(&f.den, &RootConfig::default())?;
    let near = roots
        .roots
        .iter()
        .min_by(|a, b| (a.location - z0).norm().partial_cmp(&(b.location - z0).norm()).unwrap());
    if let Some(r) = near {
        if (r.location - z0).norm() < 1e-6 && r.multiplicity > 1 {
            return Err(PvError::MultiplePole { location: z0, multiplicity: r.multiplicity });
        }
    }
    Ok(f.num.eval(z0) / f.den.derivative().eval(z0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContourMode {
    /// simple on-contour poles only
    Principal,
    /// Hadamard finite part; on-contour poles of any order
    FinitePart,
}

fn angle_of(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

fn round_gauss(z: Complex64, max_den: i64) -> Option<GaussRat> {
    let tol = 1e-9 * z.norm().max(1.0);
    let re = if z.re.abs() < tol { Some(Rat::zero()) } else { rational_approx(z.re, max_den, tol) }?;
    let im = if z.im.abs() < tol { Some(Rat::zero()) } else { rational_approx(z.im, max_den, tol) }?;
    Some(gauss(re, im))
}

/// Monic polynomial with the given roots, rounded to Gaussian rationals.
fn rounded_product(roots: &[Complex64]) -> Option<ZPoly> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut n = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, x) in c.iter().enumerate() {
            n[i + 1] += x;
            n[i] -= x * r;
        }
        c = n;
    }
    let g: Option<Vec<GaussRat>> = c.iter().map(|x| round_gauss(*x, 1_000_000)).collect();
    g.map(ZPoly::new)
}

struct ClassBlocks {
    inside: ZPoly,
    on: ZPoly,
    outside: ZPoly,
    on_angles: Vec<f64>,
    on_max_mult: usize,
}

/// Splits `d` exactly into its inside / on-circle / outside parts when every
/// square-free factor splits over the Gaussian rationals by circle class.
fn exact_class_split(d: &ZPoly, cfg: &RootConfig) -> Result<Option<ClassBlocks>, PvError> {
    let mut blocks = ClassBlocks {
        inside: ZPoly::one(),
        on: ZPoly::one(),
        outside: ZPoly::one(),
        on_angles: vec![],
        on_max_mult: 0,
    };
    let lead = d.lead();
    let mut check = ZPoly::new(vec![lead]);
    for (factor, mult) in d.squarefree() {
        let roots = aberth(&factor.to_c64())?;
        let mut by: [Vec<Complex64>; 3] = [vec![], vec![], vec![]];
        for r in roots {
            let (c, border) = classify(r, cfg);
            if border {
                return Ok(None);
            }
            let idx = match c {
                CircleClass::Inside => 0,
                CircleClass::OnContour => 1,
                CircleClass::Outside => 2,
            };
            if c == CircleClass::OnContour {
                blocks.on_angles.push(angle_of(r));
                blocks.on_max_mult = blocks.on_max_mult.max(mult);
            }
            by[idx].push(r);
        }
        let mut prod = ZPoly::one();
        let mut parts = Vec::new();
        for group in by.iter() {
            if group.is_empty() {
                parts.push(ZPoly::one());
                continue;
            }
            let q = match rounded_product(group) {
                Some(q) => q,
                None => return Ok(None),
            };
            prod = prod.mul(&q);
            parts.push(q);
        }
        if prod != factor.monic() {
            return Ok(None);
        }
        blocks.inside = blocks.inside.mul(&parts[0].pow(mult));
        blocks.on = blocks.on.mul(&parts[1].pow(mult));
        blocks.outside = blocks.outside.mul(&parts[2].pow(mult));
        check = check.mul(&factor.monic().pow(mult));
    }
    if check != *d {
        return Ok(None);
    }
    Ok(Some(blocks))
}

/// Sum of residues of the proper fraction `r/d` at the roots of the block `b`
/// (a factor of `d` coprime to `d/b`).
fn block_residue_sum(r: &ZPoly, d: &ZPoly, b: &ZPoly) -> Option<GaussRat> {
    let db = b.degree()?;
    if db == 0 {
        return Some(GaussRat::zero());
    }
    let (cof, rem) = d.divrem(b);
    debug_assert!(rem.is_zero());
    let inv = cof.inverse_mod(b)?;
    let c = r.mul(&inv).divrem(b).1;
    let top = if c.c.len() == db { c.c[db - 1].clone() } else { GaussRat::zero() };
    Some(top / b.lead())
}

fn exact_contour(f: &RationalZ, mode: ContourMode, cfg: &RootConfig) -> Result<Option<PVResult>, PvError> {
    let g = f.num.gcd(&f.den);
    let (num, den) = if g.degree().unwrap_or(0) > 0 {
        (f.num.divrem(&g).0, f.den.divrem(&g).0)
    } else {
        (f.num.clone(), f.den.clone())
    };
    let blocks = match exact_class_split(&den, cfg)? {
        Some(b) => b,
        None => return Ok(None),
    };
    if mode == ContourMode::Principal && blocks.on_max_mult > 1 {
        let a = blocks.on_angles.first().copied().unwrap_or(0.0);
        return Err(PvError::PVUndefined { angle: a, multiplicity: blocks.on_max_mult });
    }
    let (_, r) = num.divrem(&den);
    let s_in = match block_residue_sum(&r, &den, &blocks.inside) {
        Some(s) => s,
        None => return Ok(None),
    };
    let s_on = match block_residue_sum(&r, &den, &blocks.on) {
        Some(s) => s,
        None => return Ok(None),
    };
    // value = 2πi (S_in + S_on/2)  ⇒  value/π = 2i S_in + i S_on
    let over_pi = gauss_i() * (s_in * gauss_int(2) + s_on);
    let mut angles = blocks.on_angles;
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(Some(PVResult {
        value: gauss_to_c64(&over_pi) * PI,
        error_estimate: 0.0,
        method: PvMethod::Residues,
        on_contour_poles: angles,
        exact_over_pi: Some(over_pi),
    }))
}

/// Residue at a root of multiplicity `mult` by the trapezoid rule on a small
/// circle (spectrally accurate for meromorphic integrands).
fn residue_by_circle(f: &RationalZ, z0: Complex64, radius: f64) -> Complex64 {
    let n = 128;
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let w = Complex64::from_polar(radius, 2.0 * PI * (k as f64 + 0.5) / n as f64);
        s += f.eval(z0 + w) * w;
    }
    s / n as f64
}

fn numeric_contour(f: &RationalZ, mode: ContourMode, cfg: &RootConfig) -> Result<PVResult, PvError> {
    let g = f.num.gcd(&f.den);
    let f = if g.degree().unwrap_or(0) > 0 {
        RationalZ::new(f.num.divrem(&g).0, f.den.divrem(&g).0)
    } else {
        f.clone()
    };
    let roots = find_roots_poly(&f.den, cfg)?;
    let dd = f.den.derivative();
    let mut s_in = Complex64::new(0.0, 0.0);
    let mut s_on = Complex64::new(0.0, 0.0);
    let mut on = Vec::new();
    let mut mag: f64 = 0.0;
    for (i, r) in roots.roots.iter().enumerate() {
        if r.class == CircleClass::Outside {
            continue;
        }
        if r.class == CircleClass::OnContour {
            on.push(angle_of(r.location));
            if r.multiplicity > 1 && mode == ContourMode::Principal {
                return Err(PvError::PVUndefined { angle: angle_of(r.location), multiplicity: r.multiplicity });
            }
        }
        let res = if r.multiplicity == 1 {
            f.num.eval(r.location) / dd.eval(r.location)
        } else {
            let mut dist: f64 = 1.0;
            for (j, o) in roots.roots.iter().enumerate() {
                if i != j {
                    dist = dist.min((o.location - r.location).norm());
                }
            }
            residue_by_circle(&f, r.location, 0.3 * dist)
        };
        mag += res.norm();
        match r.class {
            CircleClass::Inside => s_in += res,
            _ => s_on += res,
        }
    }
    on.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let value = Complex64::new(0.0, 2.0 * PI) * (s_in + 0.5 * s_on);
    if roots.borderline {
        log::warn!("root within 10·τ_circle of the unit circle; residue classification is fragile");
    }
    Ok(PVResult {
        value,
        error_estimate: 2.0 * PI * mag * 1e-12 + roots.max_residual,
        method: PvMethod::Residues,
        on_contour_poles: on,
        exact_over_pi: None,
    })
}

/// `PV ∮ f dz` (or its finite part) by `2πi(Σ_in Res + ½ Σ_on Res)`.
pub fn contour_integral_z(f: &RationalZ, mode: ContourMode) -> Result<PVResult, PvError> {
    let cfg = RootConfig::default();
    if f.den.is_zero() {
        return Err(PvError::ZeroPolynomial);
    }
    if f.num.is_zero() {
        return Ok(PVResult {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            method: PvMethod::Residues,
            on_contour_poles: vec![],
            exact_over_pi: Some(GaussRat::zero()),
        });
    }
    if let Some(r) = exact_contour(f, mode, &cfg)? {
        return Ok(r);
    }
    numeric_contour(f, mode, &cfg)
}

/// `PV ∫_0^{2π} W(φ) dφ` via the residue formula after `z = e^{iφ}`. For real
/// `W` the imaginary part is checked and dropped.
pub fn pv_contour_integral(w: &RationalTrig) -> Result<PVResult, PvError> {
    contour_in_angle(w, ContourMode::Principal)
}

/// Hadamard finite part of `∫_0^{2π} W(φ) dφ` via residues.
pub fn fp_contour_integral(w: &RationalTrig) -> Result<PVResult, PvError> {
    contour_in_angle(w, ContourMode::FinitePart)
}

fn contour_in_angle(w: &RationalTrig, mode: ContourMode) -> Result<PVResult, PvError> {
    let f = RationalZ::from_angle_integrand(w);
    let mut r = contour_integral_z(&f, mode)?;
    if w.is_real() {
        if r.value.im.abs() > 1e-9 * r.value.norm().max(1.0) {
            log::warn!("real integrand produced imaginary part {:e}", r.value.im);
        }
        r.value = Complex64::new(r.value.re, 0.0);
        if let Some(e) = r.exact_over_pi.as_mut() {
            e.im = Rat::zero();
        }
    }
    Ok(r)
}

/// Symmetric-excision principal-value quadrature of a real integrand with
/// the listed simple poles on `[0, 2π)`, Richardson-extrapolated in the
/// excision radius.
pub fn pv_quadrature(w: &dyn Fn(f64) -> f64, poles: &[f64]) -> Result<PVResult, PvError> {
    let mut ps: Vec<f64> = poles.iter().map(|p| p.rem_euclid(2.0 * PI)).collect();
    ps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ps.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let tol = 1e-13;
    if ps.is_empty() {
        let q: Quad<f64, f64> = integrate(|x: f64| w(x), 0.0, 2.0 * PI, tol, tol, 4000);
        return Ok(PVResult {
            value: Complex64::new(q.value, 0.0),
            error_estimate: q.error,
            method: PvMethod::Quadrature,
            on_contour_poles: vec![],
            exact_over_pi: None,
        });
    }
    let n = ps.len();
    let mut half = Vec::with_capacity(n);
    for i in 0..n {
        let prev = if i == 0 { ps[n - 1] - 2.0 * PI } else { ps[i - 1] };
        let next = if i + 1 < n { ps[i + 1] } else { ps[0] + 2.0 * PI };
        half.push((0.45 * (ps[i] - prev).min(next - ps[i])).min(0.5));
    }
    let mut total = 0.0;
    let mut err = 0.0;
    for i in 0..n {
        let a = ps[i] + half[i];
        let next = if i + 1 < n { ps[i + 1] } else { ps[0] + 2.0 * PI };
        let b = next - if i + 1 < n { half[i + 1] } else { half[0] };
        if b > a {
            let q: Quad<f64, f64> = integrate(|x: f64| w(x), a, b, tol, tol, 4000);
            total += q.value;
            err += q.error;
        }
    }
    for i in 0..n {
        let c = ps[i];
        let h = half[i];
        let pair = |t: f64| w(c + t) + w(c - t);
        let levels = 8;
        let mut vals = Vec::with_capacity(levels);
        for k in 1..=levels {
            let delta = h * 0.5f64.powi(k as i32 + 2);
            let q: Quad<f64, f64> = integrate(pair, delta, h, tol, tol, 4000);
            vals.push(q.value);
        }
        let (v, e) = richardson(&vals, 2.0);
        total += v;
        err += e;
    }
    let scale = total.abs().max(1.0);
    if !total.is_finite() || err > 1e-4 * scale {
        return Err(PvError::PVDiverges { estimate: err });
    }
    Ok(PVResult {
        value: Complex64::new(total, 0.0),
        error_estimate: err,
        method: PvMethod::Quadrature,
        on_contour_poles: ps,
        exact_over_pi: None,
    })
}

/// Finite-part (and principal-value) quadrature for an integrand that
/// continues analytically off the real axis: the average of the integrals
/// along paths indented above and below every listed pole.
pub fn fp_quadrature_meromorphic(
    w: &dyn Fn(Complex64) -> Complex64,
    poles: &[f64],
    max_radius: f64,
) -> PVResult {
    let tol = 1e-13;
    let mut ps: Vec<f64> = poles.iter().map(|p| p.rem_euclid(2.0 * PI)).collect();
    ps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ps.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let real = |a: f64, b: f64| -> Quad<Complex64, f64> {
        integrate(|x: f64| w(Complex64::new(x, 0.0)), a, b, tol, tol, 4000)
    };
    if ps.is_empty() {
        let q = real(0.0, 2.0 * PI);
        return PVResult {
            value: q.value,
            error_estimate: q.error,
            method: PvMethod::Quadrature,
            on_contour_poles: vec![],
            exact_over_pi: None,
        };
    }
    let n = ps.len();
    let mut radius = Vec::with_capacity(n);
    for i in 0..n {
        let prev = if i == 0 { ps[n - 1] - 2.0 * PI } else { ps[i - 1] };
        let next = if i + 1 < n { ps[i + 1] } else { ps[0] + 2.0 * PI };
        radius.push((0.4 * (ps[i] - prev).min(next - ps[i])).min(max_radius));
    }
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for i in 0..n {
        let a = ps[i] + radius[i];
        let (next, rn) = if i + 1 < n { (ps[i + 1], radius[i + 1]) } else { (ps[0] + 2.0 * PI, radius[0]) };
        let q = real(a, next - rn);
        value += q.value;
        err += q.error;
    }
    for i in 0..n {
        let c = ps[i];
        let r = radius[i];
        let arc = |sign: f64| -> Quad<Complex64, f64> {
            integrate_path(
                |z| w(z),
                |t: f64| Complex64::new(c - r * t.cos(), sign * r * t.sin()),
                |t: f64| Complex64::new(r * t.sin(), sign * r * t.cos()),
                0.0,
                PI,
                tol,
            )
        };
        let up = arc(1.0);
        let down = arc(-1.0);
        value += (up.value + down.value) * 0.5;
        err += up.error + down.error;
    }
    PVResult { value, error_estimate: err, method: PvMethod::Quadrature, on_contour_poles: ps, exact_over_pi: None }
}

/// Quadrature oracle for a rational trigonometric integrand: the pole list
/// comes from the denominator's zeros and the indentation radius stays below
/// the distance of the remaining poles from the real axis.
pub fn quadrature_rational(w: &RationalTrig, mode: ContourMode) -> Result<PVResult, PvError> {
    let poles: Vec<(f64, usize)> = if w.den.max_harmonic() == 0 {
        vec![]
    } else {
        zeros_on_circle(&w.den).map_err(|e| PvError::RootFindingFailure(e.to_string()))?
    };
    if mode == ContourMode::Principal {
        if let Some(p) = poles.iter().find(|p| p.1 > 1) {
            return Err(PvError::PVUndefined { angle: p.0, multiplicity: p.1 });
        }
    }
    let mut off_axis = 1.0f64;
    if w.den.max_harmonic() > 0 {
        let (_, d) = crate::trigfun::trig_to_laurent(&w.den).to_poly();
        let rs = find_roots_poly(&d, &RootConfig::default())?;
        for r in rs.roots.iter().filter(|r| r.class != CircleClass::OnContour) {
            let dist = r.location.norm().ln().abs();
            off_axis = off_axis.min(0.5 * dist);
        }
    }
    let angles: Vec<f64> = poles.iter().map(|p| p.0).collect();
    let mut r = fp_quadrature_meromorphic(&|z| w.eval_at_angle(z), &angles, off_axis.max(1e-6));
    if w.is_real() {
        r.value = Complex64::new(r.value.re, 0.0);
    }
    Ok(r)
}

/// Exact fixed points of the circle that can carry characteristic directions
/// of rational fields: `±1`, `±i`.
pub fn exact_unit_point(angle: f64) -> Option<GaussRat> {
    let k = (angle / (PI / 2.0)).round();
    if (angle - k * PI / 2.0).abs() > 1e-12 {
        return None;
    }
    Some(match (k as i64).rem_euclid(4) {
        0 => gauss_int(1),
        1 => gauss_i(),
        2 => gauss_int(-1),
        _ => -gauss_i(),
    })
}

#[allow(dead_code)]
fn one_g() -> GaussRat {
    GaussRat::one()
}
