//! Weighted polar blow-up `x = ρ^p cos φ, y = ρ^q sin φ` and the resulting
//! cylinder field `Z = Θ ∂φ + R ∂ρ`, graded by powers of ρ.

use crate::newton::{quasi_degree, NewtonError, Poly2, PolyVectorField};
use crate::trigfun::{rat, SignClass, TrigError, TrigPoly};
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolarError {
    #[error("leading angular speed is {0:?} for these weights; not monodromic")]
    NotMonodromicForTheseWeights(SignClass),
    #[error(transparent)]
    Newton(#[from] NewtonError),
    #[error(transparent)]
    Trig(#[from] TrigError),
    #[error("inverse integrating factor is identically zero")]
    ZeroFactor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolarField {
    pub weights: (u32, u32),
    /// `Θ = Σ_j g[j] ρ^j`
    pub g: Vec<TrigPoly>,
    /// `R = Σ_j r[j] ρ^j`, with `r[0] = 0`
    pub r: Vec<TrigPoly>,
    pub removed_power: i64,
    pub cleared_positive_factor: TrigPoly,
    pub orientation_flipped: bool,
}

fn grade_get(v: &[TrigPoly], j: usize) -> TrigPoly {
    v.get(j).cloned().unwrap_or_else(TrigPoly::zero)
}

fn trim(mut v: Vec<TrigPoly>) -> Vec<TrigPoly> {
    while v.len() > 1 && v.last().map_or(false, |t| t.is_zero()) {
        v.pop();
    }
    v
}

impl PolarField {
    /// Field given directly by its graded coefficient lists (no orientation
    /// normalization is applied).
    pub fn from_parts(g: Vec<TrigPoly>, mut r: Vec<TrigPoly>) -> Self {
        if r.is_empty() {
            r.push(TrigPoly::zero());
        }
        r[0] = TrigPoly::zero();
        PolarField {
            weights: (1, 1),
            g: trim(g),
            r: trim(r),
            removed_power: 0,
            cleared_positive_factor: TrigPoly::one(),
            orientation_flipped: false,
        }
    }
    pub fn g_at(&self, j: usize) -> TrigPoly {
        grade_get(&self.g, j)
    }
    pub fn r_at(&self, j: usize) -> TrigPoly {
        grade_get(&self.r, j)
    }
    /// `n` with `Θ` of ρ-degree ≤ n−1 and `R` of ρ-degree ≤ n.
    pub fn top_index(&self) -> usize {
        let gd = self.g.iter().rposition(|t| !t.is_zero()).map_or(0, |j| j + 1);
        let rd = self.r.iter().rposition(|t| !t.is_zero()).unwrap_or(0);
        gd.max(rd).max(1)
    }
    pub fn theta(&self, phi: f64, rho: f64) -> f64 {
        horner(&self.g, phi, rho)
    }
    pub fn radial(&self, phi: f64, rho: f64) -> f64 {
        horner(&self.r, phi, rho)
    }
    pub fn g0(&self) -> &TrigPoly {
        &self.g[0]
    }
    /// `∂φΘ + ∂ρR` graded by ρ-power.
    pub fn divergence(&self) -> Vec<TrigPoly> {
        let n = self.g.len().max(self.r.len());
        let mut out = Vec::with_capacity(n);
        for b in 0..n {
            let t = self.g_at(b).differentiate().add(&self.r_at(b + 1).scale_rat(&rat(b as i64 + 1, 1)));
            out.push(t);
        }
        trim(out)
    }
    /// Cartesian velocity recovered from the cylinder field at `(φ, ρ)`.
    pub fn push_forward(&self, phi: f64, rho: f64) -> (f64, f64) {
        let (p, q) = (self.weights.0 as i32, self.weights.1 as i32);
        let d = self.cleared_positive_factor.eval(phi);
        let sgn = if self.orientation_flipped { -1.0 } else { 1.0 };
        let scale = sgn * rho.powi(self.removed_power as i32) / d;
        let phid = self.theta(phi, rho) * scale;
        let rhod = self.radial(phi, rho) * scale;
        let (c, s) = (phi.cos(), phi.sin());
        let xd = p as f64 * rho.powi(p - 1) * c * rhod - rho.powi(p) * s * phid;
        let yd = q as f64 * rho.powi(q - 1) * s * rhod + rho.powi(q) * c * phid;
        (xd, yd)
    }
}

fn horner(v: &[TrigPoly], phi: f64, rho: f64) -> f64 {
    let mut acc = 0.0;
    for t in v.iter().rev() {
        acc = acc * rho + t.eval(phi);
    }
    acc
}

/// Blow-up of `X` with weights `(p, q)`: the field is multiplied by the
/// positive factor `p cos²φ + q sin²φ`, divided by `ρ^r`, and reoriented so
/// that `G_0 ≥ 0`.
pub fn blow_up(x: &PolyVectorField, w: (u32, u32)) -> Result<PolarField, PolarError> {
    let r = quasi_degree(x, w)?;
    let (p, q) = w;
    let pp = x.p.weighted_polar(p, q);
    let qq = x.q.weighted_polar(p, q);
    let c = TrigPoly::cos();
    let s = TrigPoly::sin();
    let pr = rat(p as i64, 1);
    let qr = rat(q as i64, 1);
    // Θ·ρ^r = p c Σ_d Q_d ρ^{d−q} − q s Σ_d P_d ρ^{d−p}
    // R·ρ^r = c Σ_d P_d ρ^{d−p+1} + s Σ_d Q_d ρ^{d−q+1}
    let mut theta: BTreeMap<i64, TrigPoly> = BTreeMap::new();
    let mut radial: BTreeMap<i64, TrigPoly> = BTreeMap::new();
    let put = |m: &mut BTreeMap<i64, TrigPoly>, k: i64, t: TrigPoly| {
        let e = m.entry(k).or_insert_with(TrigPoly::zero);
        *e = e.add(&t);
    };
    for (d, t) in &qq {
        let d = *d as i64;
        put(&mut theta, d - q as i64 - r, c.mul(t).scale_rat(&pr));
        put(&mut radial, d - q as i64 + 1 - r, s.mul(t));
    }
    for (d, t) in &pp {
        let d = *d as i64;
        put(&mut theta, d - p as i64 - r, s.mul(t).scale_rat(&-qr.clone()));
        put(&mut radial, d - p as i64 + 1 - r, c.mul(t));
    }
    theta.retain(|_, t| !t.is_zero());
    radial.retain(|_, t| !t.is_zero());
    let low = theta.keys().next().copied().unwrap_or(0).min(radial.keys().next().map_or(0, |k| k - 1));
    if low < 0 {
        return Err(PolarError::Newton(NewtonError::InconsistentLeadingPart {
            p,
            q,
            detail: format!("negative ρ-power {low} after removing ρ^{r}"),
        }));
    }
    let gmax = theta.keys().last().copied().unwrap_or(0).max(0) as usize;
    let rmax = radial.keys().last().copied().unwrap_or(1).max(1) as usize;
    let mut g = vec![TrigPoly::zero(); gmax + 1];
    for (k, t) in theta {
        g[k as usize] = t;
    }
    let mut rr = vec![TrigPoly::zero(); rmax + 1];
    for (k, t) in radial {
        rr[k as usize] = t;
    }
    let cls = if g[0].is_zero() { SignClass::SignChanging } else { g[0].sign_on_circle()? };
    let flip = match cls {
        SignClass::Positive | SignClass::NonnegWithZeros => false,
        SignClass::Negative | SignClass::NonposWithZeros => true,
        SignClass::SignChanging => return Err(PolarError::NotMonodromicForTheseWeights(cls)),
    };
    if flip {
        g = g.iter().map(|t| t.neg()).collect();
        rr = rr.iter().map(|t| t.neg()).collect();
    }
    let d = c.mul(&c).scale_rat(&pr).add(&s.mul(&s).scale_rat(&qr));
    Ok(PolarField {
        weights: w,
        g: trim(g),
        r: trim(rr),
        removed_power: r,
        cleared_positive_factor: d,
        orientation_flipped: flip,
    })
}

pub fn characteristic_directions(z: &PolarField) -> Result<Vec<(f64, usize)>, TrigError> {
    if z.g[0].is_zero() {
        return Err(TrigError::ZeroInput);
    }
    if z.g[0].max_harmonic() == 0 {
        return Ok(vec![]);
    }
    z.g[0].zeros_on_circle()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", content = "witnesses")]
pub enum LambdaRisk {
    NoneDetected,
    /// `(φ, ρ, Θ)` sample points with `Θ ≤ 0`
    Suspected(Vec<(f64, f64, f64)>),
    Unknown(Vec<(f64, f64, f64)>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonodromyReport {
    pub omega_empty: bool,
    pub lambda_pq_risk: LambdaRisk,
    pub orientation_flipped: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct ProbeConfig {
    pub rho_max: f64,
    pub n_phi: usize,
    pub n_rho: usize,
    pub levels: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { rho_max: 1e-2, n_phi: 720, n_rho: 8, levels: 3 }
    }
}

/// Grid search for zeros of Θ off `ρ = 0`. Near each characteristic angle
/// the angular offsets are scaled like `ρ^k`, so curves tangent to the
/// circle at `Ω` are resolved.
pub fn lambda_pq_probe(z: &PolarField, cfg: &ProbeConfig) -> MonodromyReport {
    let omega = characteristic_directions(z).unwrap_or_default();
    let mut rhos = Vec::new();
    // each refinement level spans one decade below the previous one
    let total = cfg.n_rho * (cfg.levels + 1);
    for i in 0..total {
        rhos.push(cfg.rho_max * 10f64.powf(-(i as f64) / cfg.n_rho as f64));
    }
    let mut phis: Vec<f64> = (0..cfg.n_phi).map(|i| 2.0 * PI * (i as f64 + 0.5) / cfg.n_phi as f64).collect();
    let mut witnesses: Vec<(f64, f64, f64, usize)> = Vec::new();
    let offsets = [0.03, 0.1, 0.3, 1.0, 3.0, 10.0];
    // rounding floor of Θ: sign changes below it are not evidence
    let g_abs: Vec<f64> = z.g.iter().map(|t| t.terms().map(|(_, c)| crate::trigfun::rat_to_f64(&c.re).abs() + crate::trigfun::rat_to_f64(&c.im).abs()).sum::<f64>()).collect();
    let noise = |rho: f64| 64.0 * f64::EPSILON * g_abs.iter().rev().fold(0.0, |acc, c| acc * rho + c);
    for (li, &rho) in rhos.iter().enumerate() {
        let level = li / cfg.n_rho;
        let mut local = phis.clone();
        for (a, _) in &omega {
            local.push(*a);
            for k in 1..=4 {
                for t in offsets {
                    let d = t * rho.powi(k);
                    local.push(a + d);
                    local.push(a - d);
                }
            }
        }
        for &phi in &local {
            let th = z.theta(phi, rho);
            if th <= -noise(rho) || (th <= 0.0 && noise(rho) == 0.0) {
                witnesses.push((phi.rem_euclid(2.0 * PI), rho, th, level));
            }
        }
    }
    phis.clear();
    let risk = if witnesses.is_empty() {
        LambdaRisk::NoneDetected
    } else {
        let deepest = witnesses.iter().map(|w| w.3).max().unwrap();
        let levels_hit: std::collections::BTreeSet<usize> = witnesses.iter().map(|w| w.3).collect();
        let list: Vec<(f64, f64, f64)> = witnesses.iter().take(16).map(|w| (w.0, w.1, w.2)).collect();
        if deepest == cfg.levels && levels_hit.len() == cfg.levels + 1 {
            LambdaRisk::Suspected(list)
        } else {
            LambdaRisk::Unknown(list)
        }
    };
    MonodromyReport { omega_empty: omega.is_empty(), lambda_pq_risk: risk, orientation_flipped: z.orientation_flipped }
}

/// Finite Laurent series in ρ with trigonometric coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaurentSeries {
    pub coeffs: BTreeMap<i64, TrigPoly>,
}

impl LaurentSeries {
    pub fn new(coeffs: BTreeMap<i64, TrigPoly>) -> Self {
        let mut s = LaurentSeries { coeffs };
        s.coeffs.retain(|_, t| !t.is_zero());
        s
    }
    pub fn monomial(k: i64, t: TrigPoly) -> Self {
        LaurentSeries::new(BTreeMap::from([(k, t)]))
    }
    pub fn leading_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }
    pub fn top_exponent(&self) -> Option<i64> {
        self.coeffs.keys().last().copied()
    }
    pub fn coeff(&self, k: i64) -> TrigPoly {
        self.coeffs.get(&k).cloned().unwrap_or_else(TrigPoly::zero)
    }
    pub fn eval(&self, phi: f64, rho: f64) -> f64 {
        self.coeffs.iter().map(|(k, t)| t.eval(phi) * rho.powi(*k as i32)).sum()
    }
    pub fn d_rho(&self, phi: f64, rho: f64) -> f64 {
        self.coeffs.iter().map(|(k, t)| *k as f64 * t.eval(phi) * rho.powi(*k as i32 - 1)).sum()
    }
    pub fn d_phi(&self, phi: f64, rho: f64) -> f64 {
        self.coeffs.iter().map(|(k, t)| t.differentiate().eval(phi) * rho.powi(*k as i32)).sum()
    }
    pub fn scale_rat(&self, s: &crate::Rat) -> Self {
        LaurentSeries::new(self.coeffs.iter().map(|(k, t)| (*k, t.scale_rat(s))).collect())
    }
}

/// `v(ρ^p cos φ, ρ^q sin φ) / (ρ^r J)` multiplied by the cleared factor, which
/// reduces to `v(…)/ρ^{r+p+q−1}`.
pub fn cartesian_iif_to_polar(v: &Poly2, z: &PolarField) -> Result<LaurentSeries, PolarError> {
    if v.is_zero() {
        return Err(PolarError::ZeroFactor);
    }
    let (p, q) = z.weights;
    let shift = z.removed_power + p as i64 + q as i64 - 1;
    let graded = v.weighted_polar(p, q);
    let sign = if z.orientation_flipped { rat(-1, 1) } else { rat(1, 1) };
    Ok(LaurentSeries::new(graded.into_iter().map(|(d, t)| (d as i64 - shift, t.scale_rat(&sign))).collect()))
}

/// Coefficients of `Z(V) − V·div Z` for ρ-powers `N` in `orders`. Only orders
/// `N ≤ top exponent of V` are determined by a truncated series.
pub fn pde_residual(z: &PolarField, v: &LaurentSeries, orders: std::ops::RangeInclusive<i64>) -> BTreeMap<i64, TrigPoly> {
    let mut out = BTreeMap::new();
    let n = z.g.len().max(z.r.len()) as i64;
    let dv: BTreeMap<i64, TrigPoly> = v.coeffs.iter().map(|(k, t)| (*k, t.differentiate())).collect();
    for big_n in orders {
        let mut acc = TrigPoly::zero();
        for k in 0..=n {
            let gk = z.g_at(k as usize);
            if !gk.is_zero() {
                if let Some(d) = dv.get(&(big_n - k)) {
                    acc = acc.add(&gk.mul(d));
                }
                if let Some(t) = v.coeffs.get(&(big_n - k)) {
                    acc = acc.sub(&gk.differentiate().mul(t));
                }
            }
            let rk = z.r_at(k as usize);
            if !rk.is_zero() {
                if let Some(t) = v.coeffs.get(&(big_n + 1 - k)) {
                    let f = big_n + 1 - 2 * k;
                    if f != 0 {
                        acc = acc.add(&rk.mul(t).scale_rat(&rat(f, 1)));
                    }
                }
            }
        }
        out.insert(big_n, acc);
    }
    out
}

/// Pointwise `Z(V) − V·div Z` for an arbitrary smooth `V` given with its
/// partial derivatives.
pub fn pde_residual_pointwise(z: &PolarField, phi: f64, rho: f64, v: f64, v_phi: f64, v_rho: f64) -> f64 {
    let div: f64 = {
        let d = z.divergence();
        horner(&d, phi, rho)
    };
    z.theta(phi, rho) * v_phi + z.radial(phi, rho) * v_rho - v * div
}

/// `Θ(φ,ρ)` built from a Cartesian polynomial for tests and probes.
pub fn polar_of(poly: &Poly2, w: (u32, u32)) -> Vec<TrigPoly> {
    let m = poly.weighted_polar(w.0, w.1);
    let top = m.keys().last().copied().unwrap_or(0) as usize;
    let mut v = vec![TrigPoly::zero(); top + 1];
    for (k, t) in m {
        v[k as usize] = t;
    }
    v
}

pub fn is_zero_series(m: &BTreeMap<i64, TrigPoly>) -> bool {
    m.values().all(|t| t.is_zero())
}

#[allow(dead_code)]
fn _unused() -> bool {
    crate::Rat::zero().is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newton::rat_i;

    fn xy(c: i64, i: u32, j: u32) -> Poly2 {
        Poly2::monomial(rat_i(c), i, j)
    }

    fn toy(l: crate::Rat) -> PolyVectorField {
        let p = xy(-1, 0, 1).add(&Poly2::x().scale(&l));
        let q = xy(1, 1, 0).add(&Poly2::y().scale(&l));
        PolyVectorField::new(p, q).unwrap()
    }

    #[test]
    fn toy_blow_up() {
        let l = rat(1, 7);
        let z = blow_up(&toy(l.clone()), (1, 1)).unwrap();
        assert_eq!(z.g, vec![TrigPoly::one()]);
        assert_eq!(z.r_at(1), TrigPoly::constant(l.clone()));
        assert_eq!(z.removed_power, 0);
        assert!(characteristic_directions(&z).unwrap().is_empty());
        let d = z.divergence();
        assert_eq!(d, vec![TrigPoly::constant(l)]);
        assert_eq!(lambda_pq_probe(&z, &ProbeConfig::default()).lambda_pq_risk, LambdaRisk::NoneDetected);
    }

    #[test]
    fn divergence_example() {
        let g0 = TrigPoly::int(5).add(&TrigPoly::cos_k(2).scale_rat(&rat(3, 1)));
        let z = PolarField::from_parts(vec![g0], vec![TrigPoly::zero(), TrigPoly::zero(), TrigPoly::one()]);
        let d = z.divergence();
        assert_eq!(d[0], TrigPoly::sin_k(2).scale_rat(&rat(-6, 1)));
        assert_eq!(d[1], TrigPoly::int(2));
        let flat = PolarField::from_parts(vec![TrigPoly::one()], vec![]);
        assert!(flat.divergence().iter().all(|t| t.is_zero()));
    }

    #[test]
    fn artificial_zero_curve_is_suspected() {
        let s2 = TrigPoly::sin().pow(2);
        let z = PolarField::from_parts(vec![s2.neg(), TrigPoly::one()], vec![]);
        assert!(matches!(lambda_pq_probe(&z, &ProbeConfig::default()).lambda_pq_risk, LambdaRisk::Suspected(_)));
    }

    #[test]
    fn radial_iif_transform() {
        let x = toy(crate::Rat::zero());
        let z = blow_up(&x, (1, 1)).unwrap();
        let v = xy(1, 2, 0).add(&xy(1, 0, 2));
        let w = cartesian_iif_to_polar(&v, &z).unwrap();
        assert_eq!(w.leading_exponent(), Some(1));
        assert_eq!(w.coeff(1), TrigPoly::one());
        let one = cartesian_iif_to_polar(&Poly2::constant(rat(1, 1)), &z).unwrap();
        assert_eq!(one.leading_exponent(), Some(-1));
        assert!(is_zero_series(&pde_residual(&z, &w, -3..=4)));
    }
}
