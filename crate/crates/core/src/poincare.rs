//! Numeric return-map oracle on the cylinder, extraction of the leading
//! return-map coefficient, the integral invariant of a closed-form inverse
//! integrating factor, and the functional identity linking the two.

use crate::newton::Poly2;
use crate::numeric::{integrate, richardson, Dopri5, OdeFailure};
use crate::polar::{cartesian_iif_to_polar, characteristic_directions, is_zero_series, pde_residual, LaurentSeries, PolarError, PolarField};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoincareError {
    #[error("angular speed dropped below the floor near φ = {phi}, ρ = {rho}")]
    ThetaVanishedOnOrbit { phi: f64, rho: f64 },
    #[error("integration step limit reached")]
    StepLimit,
    #[error("integration step underflow")]
    StepUnderflow,
    #[error("integral invariant depends on the radius (spread {spread:e})")]
    RDependence { spread: f64 },
    #[error("candidate is not an inverse integrating factor: residual at order {order}")]
    NotInverseIntegratingFactor { order: i64 },
    #[error("no admissible radius: the candidate vanishes on every probed circle")]
    NoAdmissibleRadius,
    #[error("return map returned a non-positive value")]
    NonPositive,
    #[error("too few samples for extrapolation")]
    TooFewSamples,
    #[error(transparent)]
    Polar(#[from] PolarError),
}

/// Floor on the angular speed along an orbit.
pub const THETA_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReturnSample {
    pub rho0: f64,
    pub pi: f64,
    pub error_estimate: f64,
    pub steps: usize,
}

/// Integrates `dρ/dφ = R/Θ` over one turn from `ρ(0) = ρ0`.
pub fn return_map(z: &PolarField, rho0: f64) -> Result<ReturnSample, PoincareError> {
    return_map_tol(z, rho0, 1e-12)
}

pub fn return_map_tol(z: &PolarField, rho0: f64, rtol: f64) -> Result<ReturnSample, PoincareError> {
    let solver = Dopri5::new(rtol, rtol * 1e-3 * rho0);
    let bad = std::cell::Cell::new((0.0, 0.0));
    let out = solver.solve(
        |phi: f64, rho: f64| {
            let th = z.theta(phi, rho);
            if th < THETA_FLOOR {
                bad.set((phi, rho));
                None
            } else {
                Some(z.radial(phi, rho) / th)
            }
        },
        0.0,
        2.0 * PI,
        rho0,
    );
    match out {
        Ok(o) => {
            if o.y <= 0.0 {
                return Err(PoincareError::NonPositive);
            }
            Ok(ReturnSample { rho0, pi: o.y, error_estimate: o.error, steps: o.steps })
        }
        Err(OdeFailure::Guard) => {
            let (phi, rho) = bad.get();
            Err(PoincareError::ThetaVanishedOnOrbit { phi, rho })
        }
        Err(OdeFailure::StepLimit) => Err(PoincareError::StepLimit),
        Err(OdeFailure::StepUnderflow) => Err(PoincareError::StepUnderflow),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    Contracting,
    Expanding,
    IdentityToTolerance,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoincareEstimate {
    /// `log η₁` for the section `x > 0`
    pub log_eta1: f64,
    pub uncertainty: f64,
    pub classification: Classification,
    pub samples: Vec<ReturnSample>,
    /// `p·log(Π(ρ0)/ρ0)` along the ladder
    pub ladder: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    pub rho_start: f64,
    pub samples: usize,
    pub ratio: f64,
    pub rtol: f64,
    /// `|log η₁|` below this (and below the uncertainty bound) counts as identity
    pub identity_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { rho_start: 1e-2, samples: 5, ratio: 2.0, rtol: 1e-12, identity_tol: 1e-6 }
    }
}

/// Extrapolates `log(Π(ρ0)/ρ0)` to `ρ0 → 0` over a geometric ladder. The
/// value refers to the Cartesian section `x = ρ^p`, hence the factor `p`.
pub fn eta_from_oracle(z: &PolarField, cfg: &OracleConfig) -> PoincareEstimate {
    let p = z.weights.0 as f64;
    let rhos: Vec<f64> = (0..cfg.samples).map(|k| cfg.rho_start / cfg.ratio.powi(k as i32)).collect();
    let results: Vec<Result<ReturnSample, PoincareError>> = rhos.iter().map(|r| return_map_tol(z, *r, cfg.rtol)).collect();
    let samples: Vec<ReturnSample> = results.into_iter().flatten().collect();
    let ladder: Vec<f64> = samples.iter().map(|s| p * (s.pi / s.rho0).ln()).collect();
    if samples.len() < 4 || samples.len() != rhos.len() || ladder.iter().any(|x| !x.is_finite()) {
        return PoincareEstimate {
            log_eta1: ladder.last().copied().unwrap_or(f64::NAN),
            uncertainty: f64::INFINITY,
            classification: Classification::Unknown,
            samples,
            ladder,
        };
    }
    let (v, e) = richardson(&ladder, cfg.ratio);
    let e = e.max(1e-12);
    let classification = if v.abs() <= (3.0 * e).max(cfg.identity_tol) {
        Classification::IdentityToTolerance
    } else if v < 0.0 {
        Classification::Contracting
    } else {
        Classification::Expanding
    };
    PoincareEstimate { log_eta1: v, uncertainty: e, classification, samples, ladder }
}

/// A user-supplied inverse integrating factor.
#[derive(Clone, Debug, PartialEq)]
pub enum ClosedFormIIF {
    Polar(LaurentSeries),
    Cartesian(Poly2),
}

impl ClosedFormIIF {
    pub fn to_polar(&self, z: &PolarField) -> Result<LaurentSeries, PoincareError> {
        match self {
            ClosedFormIIF::Polar(s) => Ok(s.clone()),
            ClosedFormIIF::Cartesian(v) => Ok(cartesian_iif_to_polar(v, z)?),
        }
    }
}

/// Checks `Z(V) = V div Z` exactly in every ρ-order touched by `V`.
pub fn verify_iif(z: &PolarField, v: &LaurentSeries) -> Result<(), PoincareError> {
    let (Some(lo), Some(hi)) = (v.leading_exponent(), v.top_exponent()) else {
        return Err(PoincareError::NotInverseIntegratingFactor { order: 0 });
    };
    let n = z.top_index() as i64;
    let res = pde_residual(z, v, lo..=hi + n);
    if is_zero_series(&res) {
        Ok(())
    } else {
        let order = res.iter().find(|(_, t)| !t.is_zero()).map_or(0, |(k, _)| *k);
        Err(PoincareError::NotInverseIntegratingFactor { order })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GValue {
    pub value: f64,
    pub spread: f64,
    pub per_radius: Vec<(f64, f64)>,
    pub excluded: Vec<f64>,
}

/// `G(r) = ∮ (R/Θ)/(V/Θ) dφ` on the circle `ρ = r`, required to agree over
/// the radii.
pub fn g_of_r(z: &PolarField, v: &LaurentSeries, radii: &[f64]) -> Result<GValue, PoincareError> {
    let mut per = Vec::new();
    let mut excluded = Vec::new();
    // V may dip to O(r^k) in windows of width O(r^k) around the
    // characteristic angles: split the circle there
    let mut cuts: Vec<f64> = characteristic_directions(z).unwrap_or_default().into_iter().map(|w| w.0).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if cuts.is_empty() {
        cuts.push(0.0);
    }
    for &r in radii {
        let mut probe: Vec<f64> = (0..720).map(|k| 2.0 * PI * k as f64 / 720.0).collect();
        for w in &cuts {
            probe.extend([*w, w + r * r, w - r * r, w + r, w - r]);
        }
        let vals: Vec<f64> = probe.iter().map(|phi| v.eval(*phi, r)).collect();
        let vmax = vals.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let same_sign = vals.iter().all(|x| *x > 0.0) || vals.iter().all(|x| *x < 0.0);
        let vmin = vals.iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
        if !same_sign || vmin < 1e-13 * vmax {
            excluded.push(r);
            continue;
        }
        let f = |phi: f64| z.radial(phi, r) / v.eval(phi, r);
        let n = cuts.len();
        let mut total = 0.0;
        for i in 0..n {
            // symmetric pairs about each cut, up to the midpoint of the
            // shorter neighbouring gap, cancel the odd part of the peak
            let prev = if i == 0 { cuts[n - 1] - 2.0 * PI } else { cuts[i - 1] };
            let next = if i + 1 < n { cuts[i + 1] } else { cuts[0] + 2.0 * PI };
            let w = cuts[i];
            let (l, rr) = ((w - prev) / 2.0, (next - w) / 2.0);
            let h = l.min(rr);
            total += integrate(|t: f64| f(w + t) + f(w - t), 0.0, h, 1e-14, 1e-13, 4000).value;
            if rr > h {
                total += integrate(f, w + h, w + rr, 1e-14, 1e-13, 4000).value;
            }
            if l > h {
                total += integrate(f, w - l, w - h, 1e-14, 1e-13, 4000).value;
            }
        }
        per.push((r, total));
    }
    if per.is_empty() {
        return Err(PoincareError::NoAdmissibleRadius);
    }
    let lo = per.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    let hi = per.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    if spread > 1e-6 {
        return Err(PoincareError::RDependence { spread });
    }
    let value = per.iter().map(|x| x.1).sum::<f64>() / per.len() as f64;
    Ok(GValue { value, spread, per_radius: per, excluded })
}

pub const DEFAULT_RADII: [f64; 3] = [1e-1, 3e-2, 1e-2];

/// Behaviour of `V/Θ` on the section `φ = 0` (the positive `x` axis):
/// `V/Θ ≈ scale·ρ^exponent` as `ρ → 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectionScale {
    pub exponent: i64,
    pub scale: f64,
}

fn lowest_at_zero(terms: impl Iterator<Item = (i64, f64)>) -> Option<(i64, f64)> {
    let v: Vec<(i64, f64)> = terms.collect();
    let big = v.iter().fold(0.0f64, |a, t| a.max(t.1.abs()));
    v.into_iter().find(|t| t.1.abs() > 1e-12 * big.max(1e-300))
}

pub fn section_scale(z: &PolarField, v: &LaurentSeries) -> Option<SectionScale> {
    let (kv, a) = lowest_at_zero(v.coeffs.iter().map(|(k, t)| (*k, t.eval(0.0))))?;
    let (kt, b) = lowest_at_zero(z.g.iter().enumerate().map(|(k, t)| (k as i64, t.eval(0.0))))?;
    Some(SectionScale { exponent: kv - kt, scale: a / b })
}

/// Return-map reading from `G` on the section `x = ρ^p > 0`, in the
/// convention of `eta_from_oracle`: `log η₁ = p·c·G` for exponent 1 and
/// `η_m = c·G` above.
pub fn eta_from_g(z: &PolarField, v: &LaurentSeries, g: f64, tol: f64) -> Option<EtaReading> {
    let s = section_scale(z, v)?;
    let val = s.scale * g;
    Some(if s.exponent == 1 {
        eta_from_v(z.weights.0 as f64 * val, 1, tol)
    } else {
        eta_from_v(val, s.exponent, tol)
    })
}

/// Reading of the integral invariant for a leading exponent `m ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum EtaReading {
    /// `m = 1`, `η₁ = e^g ≠ 1`
    Focus { log_eta1: f64 },
    /// `m > 1`, `η_m = g ≠ 0`
    FocusOfMaximalOrder { m: i64, eta_m: f64 },
    Center,
}

pub fn eta_from_v(g: f64, m: i64, tol: f64) -> EtaReading {
    if g.abs() <= tol {
        EtaReading::Center
    } else if m == 1 {
        EtaReading::Focus { log_eta1: g }
    } else {
        EtaReading::FocusOfMaximalOrder { m, eta_m: g }
    }
}

/// Largest relative violation of `V̂(0, Π(x)) = V̂(0, x)·Π'(x)` with
/// `V̂ = V/Θ`, `Π'` by central differences with step `x/10`.
pub fn fundamental_equation_check(z: &PolarField, v: &LaurentSeries, samples: &[f64]) -> Result<f64, PoincareError> {
    let vhat = |rho: f64| v.eval(0.0, rho) / z.theta(0.0, rho);
    let mut worst: f64 = 0.0;
    for &x in samples {
        let h = x / 10.0;
        let px = return_map(z, x)?.pi;
        let pp = return_map(z, x + h)?.pi;
        let pm = return_map(z, x - h)?.pi;
        let dpi = (pp - pm) / (2.0 * h);
        let lhs = vhat(px);
        let rhs = vhat(x) * dpi;
        let rel = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300);
        worst = worst.max(rel);
    }
    Ok(worst)
}
