//! The singular periodic linear equation `G v' + P v + Q = 0` with `G ≥ 0`
//! vanishing at the characteristic angles: homogeneous factor, monodromy,
//! local exponents, divergence of the forcing integral and sampled solutions.

use super::ExpansionError;
use crate::numeric::integrate;
use crate::residue_pv::{find_roots_poly, pv_contour_integral, pv_quadrature, CircleClass, RationalZ, RootConfig};
use crate::trigfun::{RationalTrig, TrigPoly};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

const TAU: f64 = 2.0 * PI;

/// A number computed along the residue path and along the quadrature path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DualValue {
    pub residue: Option<f64>,
    pub quadrature: Option<f64>,
}

impl DualValue {
    pub fn value(&self) -> f64 {
        self.residue.or(self.quadrature).unwrap_or(f64::NAN)
    }
    pub fn discrepancy(&self) -> f64 {
        match (self.residue, self.quadrature) {
            (Some(a), Some(b)) => (a - b).abs(),
            _ => 0.0,
        }
    }
    /// `Some(true)` if both available paths exceed `tol`, `Some(false)` if all
    /// are below it, `None` if the paths disagree.
    pub fn nonzero(&self, tol: f64) -> Option<bool> {
        let v: Vec<bool> = [self.residue, self.quadrature].iter().flatten().map(|x| x.abs() > tol).collect();
        if v.is_empty() {
            None
        } else if v.iter().all(|b| *b) {
            Some(true)
        } else if v.iter().all(|b| !*b) {
            Some(false)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
struct PfTerm {
    a: Complex64,
    class: CircleClass,
    /// coefficients of `1/(z−a)^j`, `j = 1, 2, …`
    b: Vec<Complex64>,
}

/// Closed-form antiderivative `Re ∫ W dφ` of a rational trigonometric
/// function, from the partial fractions of `W(z)/(iz)`.
#[derive(Clone, Debug)]
pub struct Antiderivative {
    poly: Vec<Complex64>,
    terms: Vec<PfTerm>,
}

fn circle_eval(f: &dyn Fn(Complex64) -> Complex64, center: Complex64, eps: f64, power: i32) -> Complex64 {
    let n = 128;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let t = TAU * k as f64 / n as f64;
        let u = Complex64::from_polar(eps, t);
        acc += f(center + u) * u.powi(power);
    }
    acc / n as f64
}

impl Antiderivative {
    pub fn new(w: &RationalTrig) -> Result<Self, ExpansionError> {
        if w.is_zero() {
            return Ok(Antiderivative { poly: vec![], terms: vec![] });
        }
        let f = RationalZ::from_angle_integrand(w);
        let (quot, rem) = f.num.divrem(&f.den);
        let qc = quot.to_c64();
        let mut poly = vec![Complex64::new(0.0, 0.0); qc.len() + 1];
        for (k, c) in qc.iter().enumerate() {
            poly[k + 1] = c / (k as f64 + 1.0);
        }
        let roots = find_roots_poly(&f.den, &RootConfig::default())?;
        let rem_fn = |z: Complex64| rem.eval(z) / f.den.eval(z);
        let mut terms = Vec::new();
        for (i, r) in roots.roots.iter().enumerate() {
            let mut gap = f64::INFINITY;
            for (j, o) in roots.roots.iter().enumerate() {
                if i != j {
                    gap = gap.min((o.location - r.location).norm());
                }
            }
            let eps = (0.3 * gap).min(0.25);
            let b: Vec<Complex64> =
                (1..=r.multiplicity).map(|j| circle_eval(&rem_fn, r.location, eps, j as i32)).collect();
            terms.push(PfTerm { a: r.location, class: r.class, b });
        }
        Ok(Antiderivative { poly, terms })
    }

    fn term_value(t: &PfTerm, phi: f64, z: Complex64) -> Complex64 {
        let log = match t.class {
            CircleClass::Inside => Complex64::new(0.0, phi) + (Complex64::new(1.0, 0.0) - t.a / z).ln(),
            CircleClass::Outside => (-t.a).ln() + (Complex64::new(1.0, 0.0) - z / t.a).ln(),
            CircleClass::OnContour => Complex64::new((z - t.a).norm().ln(), 0.0),
        };
        let mut acc = t.b[0] * log;
        for (j, bj) in t.b.iter().enumerate().skip(1) {
            let jj = j as i32;
            acc -= bj / (jj as f64 * (z - t.a).powi(jj));
        }
        acc
    }

    fn eval_skip(&self, phi: f64, skip: Option<usize>) -> f64 {
        let z = Complex64::from_polar(1.0, phi);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.poly.iter().enumerate() {
            acc += c * z.powi(k as i32);
        }
        for (i, t) in self.terms.iter().enumerate() {
            if Some(i) != skip {
                acc += Self::term_value(t, phi, z);
            }
        }
        acc.re
    }

    /// `Re A(φ)`, continuous in `φ` away from on-circle poles.
    pub fn eval(&self, phi: f64) -> f64 {
        self.eval_skip(phi, None)
    }

    /// On-circle poles: `(angle, order, coefficient of 1/(z−a))`.
    pub fn on_circle(&self) -> Vec<(f64, usize, Complex64)> {
        self.terms
            .iter()
            .filter(|t| t.class == CircleClass::OnContour)
            .map(|t| (t.a.arg().rem_euclid(TAU), t.b.len(), t.b[0]))
            .collect()
    }

    fn term_at(&self, angle: f64) -> Option<usize> {
        self.terms
            .iter()
            .position(|t| t.class == CircleClass::OnContour && ang_dist(t.a.arg(), angle) < 1e-7)
    }

    /// Increment of `Re A` over one turn.
    pub fn period_increment(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.class == CircleClass::Inside)
            .map(|t| (t.b[0] * Complex64::new(0.0, TAU)).re)
            .sum()
    }
}

fn ang_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Reference angle in the middle of the largest gap between the given angles.
pub fn base_angle(omega: &[f64]) -> f64 {
    if omega.is_empty() {
        return 0.0;
    }
    let mut a: Vec<f64> = omega.iter().map(|x| x.rem_euclid(TAU)).collect();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut best = (0.0, a[0]);
    for i in 0..a.len() {
        let next = if i + 1 < a.len() { a[i + 1] } else { a[0] + TAU };
        let gap = next - a[i];
        if gap > best.0 {
            best = (gap, a[i] + gap / 2.0);
        }
    }
    best.1.rem_euclid(TAU)
}

/// Homogeneous part of `G v' + P v = 0`: `h = exp(−∫ P/G)`, with the
/// log-singular pieces at the zeros of `G` kept in closed form.
#[derive(Clone, Debug)]
pub struct SingularLinear {
    pub g: TrigPoly,
    pub p: TrigPoly,
    pub f: RationalTrig,
    /// zeros of `G` in `[0, 2π)`
    pub omega: Vec<f64>,
    /// local exponent `c` with `P/G ≈ c/(φ−ω)`; `h ≈ H·|φ−ω|^{−c}`
    pub exponents: Vec<f64>,
    pub scales: Vec<f64>,
    pub phi0: f64,
    /// `log h(φ+2π)/h(φ)`
    pub log_mu: DualValue,
    anti: Antiderivative,
    a0: f64,
}

impl SingularLinear {
    pub fn new(g: &TrigPoly, p: &TrigPoly) -> Result<Self, ExpansionError> {
        let omega: Vec<f64> = if g.max_harmonic() == 0 { vec![] } else { g.zeros_on_circle()?.into_iter().map(|z| z.0).collect() };
        let f = RationalTrig::new(p.clone(), g.clone())?;
        let anti = Antiderivative::new(&f)?;
        for (angle, order, _) in anti.on_circle() {
            if order > 1 {
                return Err(ExpansionError::NonSimplePole { angle, order });
            }
        }
        let phi0 = base_angle(&omega);
        let a0 = anti.eval(phi0);
        let mut exponents = Vec::new();
        let mut scales = Vec::new();
        for &w in &omega {
            let wu = unwrap(w, phi0);
            match anti.term_at(w) {
                Some(i) => {
                    exponents.push(anti.terms[i].b[0].re);
                    scales.push((-(anti.eval_skip(wu, Some(i)) - a0)).exp());
                }
                None => {
                    exponents.push(0.0);
                    scales.push((-(anti.eval(wu) - a0)).exp());
                }
            }
        }
        let residue = pv_contour_integral(&f).ok().map(|r| -r.value.re);
        let poles: Vec<f64> = anti.on_circle().iter().map(|x| x.0).collect();
        let quadrature = pv_quadrature(&|x| f.eval(x), &poles).ok().map(|r| -r.value.re);
        Ok(SingularLinear {
            g: g.clone(),
            p: p.clone(),
            f,
            omega,
            exponents,
            scales,
            phi0,
            log_mu: DualValue { residue, quadrature },
            anti,
            a0,
        })
    }

    /// `h(φ)` for `φ ∈ [φ0, φ0 + 2π)`.
    pub fn h(&self, phi: f64) -> f64 {
        (-(self.anti.eval(unwrap(phi, self.phi0)) - self.a0)).exp()
    }

    /// `log h(φ0 + 2π)/h(φ0)` from the closed form (a third path).
    pub fn log_mu_closed_form(&self) -> f64 {
        -self.anti.period_increment()
    }

    /// Guard half-widths around the characteristic angles.
    pub fn guards(&self) -> Vec<f64> {
        guard_widths(&self.omega)
    }
}

fn guard_widths(omega: &[f64]) -> Vec<f64> {
    let n = omega.len();
    (0..n)
        .map(|i| {
            let mut gap = TAU;
            for j in 0..n {
                if i != j {
                    gap = gap.min(ang_dist(omega[i], omega[j]));
                }
            }
            (0.25 * gap).min(0.1)
        })
        .collect()
}

pub(crate) fn unwrap(phi: f64, phi0: f64) -> f64 {
    phi0 + (phi - phi0).rem_euclid(TAU)
}

/// Local behaviour of the forcing integrand `q/h` at one characteristic angle.
#[derive(Clone, Debug, Serialize)]
pub struct LocalDivergence {
    pub angle: f64,
    /// exponent `e` with `∫_{|x|>δ} ≈ A δ^e` (`e = 0`: `A log(1/δ)`)
    pub exponent: f64,
    pub residue_amplitude: f64,
    pub fitted_exponent: Option<f64>,
    pub quadrature_amplitude: f64,
}

/// Laurent coefficients of `q(ω + x)` in `x` by a circle in the angle plane.
fn angle_laurent(q: &RationalTrig, omega: f64, eps: f64, n: i32) -> f64 {
    let f = |x: Complex64| q.eval_at_angle(Complex64::new(omega, 0.0) + x);
    circle_eval(&f, Complex64::new(0.0, 0.0), eps, -n).re
}

/// Pole-free radius around `ω` in the complex angle plane.
fn safe_radius(q: &RationalTrig, omega: f64, guard: f64) -> Result<f64, ExpansionError> {
    let mut r = guard;
    if q.den.max_harmonic() > 0 {
        let (_, d) = crate::trigfun::trig_to_laurent(&q.den).to_poly();
        let roots = find_roots_poly(&d, &RootConfig::default())?;
        for root in roots.roots {
            let a = root.location;
            if a.norm() < 1e-300 {
                continue;
            }
            let dist = Complex64::new(a.arg() - omega, -a.norm().ln());
            let dd = Complex64::new((dist.re + PI).rem_euclid(TAU) - PI, dist.im).norm();
            if dd > 1e-7 {
                r = r.min(0.4 * dd);
            }
        }
    }
    Ok(r.max(1e-4))
}

/// First Laurent order `n ≥ −s` of `q` at `ω` with a non-negligible
/// coefficient, and that coefficient.
fn leading_term(q: &RationalTrig, omega: f64, eps: f64) -> Option<(i32, f64)> {
    let s = if q.den.max_harmonic() == 0 {
        0
    } else {
        q.den
            .zeros_on_circle()
            .ok()?
            .into_iter()
            .find(|(a, _)| ang_dist(*a, omega) < 1e-7)
            .map_or(0, |z| z.1 as i32)
    };
    let scale = (0..=32).map(|k| q.eval(TAU * k as f64 / 32.0).abs()).fold(1e-300, f64::max);
    for n in -s..(-s + 6) {
        let a = angle_laurent(q, omega, eps, n);
        if a.abs() > 1e-9 * scale * eps.powi(-n.min(0)).max(1.0) {
            return Some((n, a));
        }
    }
    None
}

/// Divergence of `∫ q/h` at each characteristic angle, by the local
/// exponent and by an excision-quadrature fit.
pub fn forcing_divergence(lin: &SingularLinear, q: &RationalTrig) -> Result<Vec<LocalDivergence>, ExpansionError> {
    let mut out = Vec::new();
    let guards = lin.guards();
    for (k, &w) in lin.omega.iter().enumerate() {
        let c = lin.exponents[k];
        let eps = safe_radius(q, w, guards[k])?;
        let Some((n, a)) = leading_term(q, w, eps) else { continue };
        let e = c + n as f64 + 1.0;
        let lead = a / lin.scales[k];
        let residue_amplitude = if n % 2 != 0 || e > 1e-9 {
            0.0
        } else if e.abs() <= 1e-9 {
            2.0 * lead
        } else {
            2.0 * lead / (-e)
        };
        let wu = unwrap(w, lin.phi0);
        let g = |x: f64| {
            let phi = wu + x;
            q.eval(phi) / lin.h(phi)
        };
        let d0 = guards[k];
        let shell = |i: i32| {
            let hi = d0 * 0.5f64.powi(i);
            integrate(|t: f64| g(t) + g(-t), hi / 2.0, hi, 1e-14, 1e-12, 300).value
        };
        let (s1, s2) = (shell(7), shell(8));
        let (fitted_exponent, quadrature_amplitude) = if s1 == 0.0 || s2 == 0.0 || s2 / s1 <= 0.0 {
            (None, 0.0)
        } else {
            let ef = -(s2 / s1).log2();
            let d8 = d0 * 0.5f64.powi(8);
            if ef.abs() < 0.05 {
                (Some(0.0), s2 / 2f64.ln())
            } else if ef < 0.0 {
                (Some(ef), s2 / (d8.powf(ef) * (2f64.powf(-ef) - 1.0)))
            } else {
                (Some(ef), 0.0)
            }
        };
        out.push(LocalDivergence { angle: w, exponent: e, residue_amplitude, fitted_exponent, quadrature_amplitude });
    }
    Ok(out)
}

/// Homogeneous factor of a sampled coefficient.
#[derive(Clone, Debug)]
pub enum Homogeneous {
    Exact(TrigPoly),
    Singular(Arc<SingularLinear>),
}

impl Homogeneous {
    fn eval(&self, phi: f64) -> f64 {
        match self {
            Homogeneous::Exact(t) => t.eval(phi),
            Homogeneous::Singular(l) => l.h(phi),
        }
    }
}

/// Coefficient known by values: `v = hom·(K + J)`, `J(φ) = ∫_{φ0}^{φ} −q/hom`
/// with principal values across the characteristic angles, and the
/// derivative recovered from the equation.
#[derive(Clone, Debug)]
pub struct SampledCoefficient {
    pub g: TrigPoly,
    pub p: TrigPoly,
    pub q: TrigPoly,
    pub hom: Homogeneous,
    pub constant: f64,
    pub phi0: f64,
    pub omega: Vec<f64>,
    guards: Vec<f64>,
    integrand: Integrand,
    /// `(φ, J)` at φ0 and at the guard boundaries, in unwrapped order
    checkpoints: Vec<(f64, f64)>,
    /// `J(φ0 + 2π)`
    pub total: f64,
    /// `(φ, v, v')` on each arc
    pub samples: Vec<(f64, f64, f64)>,
}

#[derive(Clone, Debug)]
enum Integrand {
    Closed(Antiderivative),
    Numeric(RationalTrig),
}

impl SampledCoefficient {
    fn integrand(&self, phi: f64) -> f64 {
        match &self.integrand {
            Integrand::Numeric(q) => -q.eval(phi) / self.hom.eval(phi),
            Integrand::Closed(_) => unreachable!(),
        }
    }

    fn sorted_omega(&self) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> =
            self.omega.iter().zip(&self.guards).map(|(w, d)| (unwrap(*w, self.phi0), *d)).collect();
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        v
    }

    fn seg(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        integrate(|x: f64| self.integrand(x), a, b, 1e-13, 1e-11, 300).value
    }

    fn pair(&self, w: f64, d: f64) -> f64 {
        integrate(|t: f64| self.integrand(w + t) + self.integrand(w - t), 0.0, d, 1e-13, 1e-11, 300).value
    }

    fn build_checkpoints(&mut self) {
        if let Integrand::Closed(a) = &self.integrand {
            self.total = a.eval(self.phi0 + TAU) - a.eval(self.phi0);
            return;
        }
        let mut cps = vec![(self.phi0, 0.0)];
        let mut pos = self.phi0;
        let mut j = 0.0;
        for (w, d) in self.sorted_omega() {
            j += self.seg(pos, w - d);
            cps.push((w - d, j));
            j += self.pair(w, d);
            cps.push((w + d, j));
            pos = w + d;
        }
        j += self.seg(pos, self.phi0 + TAU);
        self.total = j;
        self.checkpoints = cps;
    }

    /// `J(φ)`.
    pub fn primitive(&self, phi: f64) -> f64 {
        let x = unwrap(phi, self.phi0);
        if let Integrand::Closed(a) = &self.integrand {
            return a.eval(x) - a.eval(self.phi0);
        }
        for (w, d) in self.sorted_omega() {
            if (x - w).abs() < d {
                let start = self.checkpoints.iter().find(|c| (c.0 - (w - d)).abs() < 1e-15).map_or(0.0, |c| c.1);
                return if x <= w {
                    start + self.seg(w - d, x)
                } else {
                    let t = x - w;
                    start + self.seg(w - d, w - t) + self.pair(w, t)
                };
            }
        }
        let cp = self.checkpoints.iter().rev().find(|c| c.0 <= x).copied().unwrap_or((self.phi0, 0.0));
        cp.1 + self.seg(cp.0, x)
    }

    pub fn eval(&self, phi: f64) -> f64 {
        let mut x = phi;
        if self.omega.iter().any(|w| ang_dist(*w, x) < 1e-12) {
            x += 1e-9;
        }
        self.hom.eval(x) * (self.constant + self.primitive(x))
    }

    /// Derivative from the equation `v' = −(P v + Q)/G`.
    pub fn derivative(&self, phi: f64) -> f64 {
        let v = self.eval(phi);
        -(self.p.eval(phi) * v + self.q.eval(phi)) / self.g.eval(phi)
    }

    fn fill_samples(&mut self, per_arc: usize) {
        let om = self.sorted_omega();
        let mut arcs = Vec::new();
        if om.is_empty() {
            arcs.push((self.phi0, self.phi0 + TAU));
        } else {
            for i in 0..om.len() {
                let (w, d) = om[i];
                let (nw, nd) = if i + 1 < om.len() { om[i + 1] } else { (om[0].0 + TAU, om[0].1) };
                arcs.push((w + d, nw - nd));
            }
        }
        let mut s = Vec::new();
        for (a, b) in arcs {
            for k in 0..per_arc {
                let t = (PI * (k as f64 + 0.5) / per_arc as f64).cos();
                let phi = 0.5 * (a + b) + 0.5 * (b - a) * t;
                s.push((phi.rem_euclid(TAU), self.eval(phi), self.derivative(phi)));
            }
        }
        s.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        self.samples = s;
    }
}

/// Unique periodic solution when the monodromy differs from one:
/// `K = μ I/(1 − μ)` with `I = J(φ0 + 2π)`.
pub fn sampled_unique(lin: Arc<SingularLinear>, q: &TrigPoly) -> Result<SampledCoefficient, ExpansionError> {
    let qr = RationalTrig::new(q.clone(), lin.g.clone())?;
    let mut sc = SampledCoefficient {
        g: lin.g.clone(),
        p: lin.p.clone(),
        q: q.clone(),
        hom: Homogeneous::Singular(lin.clone()),
        constant: 0.0,
        phi0: lin.phi0,
        omega: lin.omega.clone(),
        guards: lin.guards(),
        integrand: Integrand::Numeric(qr),
        checkpoints: vec![],
        total: 0.0,
        samples: vec![],
    };
    sc.build_checkpoints();
    let mu = lin.log_mu.value().exp();
    sc.constant = mu * sc.total / (1.0 - mu);
    sc.fill_samples(16);
    Ok(sc)
}

/// `v = v^h (C + w)` with `w' = −Q/(G v^h)` rational; `C = 0`.
pub fn sampled_with_closed_homogeneous(
    g: &TrigPoly,
    p: &TrigPoly,
    q: &TrigPoly,
    vh: &TrigPoly,
) -> Result<SampledCoefficient, ExpansionError> {
    let w = RationalTrig::new(q.neg(), g.mul(vh))?;
    let anti = Antiderivative::new(&w)?;
    let mut omega: Vec<f64> = if g.max_harmonic() == 0 { vec![] } else { g.zeros_on_circle()?.into_iter().map(|z| z.0).collect() };
    for (a, _, _) in anti.on_circle() {
        if !omega.iter().any(|w| ang_dist(*w, a) < 1e-7) {
            omega.push(a);
        }
    }
    let phi0 = base_angle(&omega);
    let guards = guard_widths(&omega);
    let mut sc = SampledCoefficient {
        g: g.clone(),
        p: p.clone(),
        q: q.clone(),
        hom: Homogeneous::Exact(vh.clone()),
        constant: 0.0,
        phi0,
        omega,
        guards,
        integrand: Integrand::Closed(anti),
        checkpoints: vec![],
        total: 0.0,
        samples: vec![],
    };
    sc.build_checkpoints();
    sc.fill_samples(16);
    Ok(sc)
}

/// Characteristic angles where `v^h (C + ∫W)` is unbounded for every `C`:
/// `(angle, pole order of W, zero order of v^h)`. Orders are exact, so no
/// cancellation near the angle is involved.
pub fn closed_homogeneous_blowup(w: &RationalTrig, vh: &TrigPoly, tol: f64) -> Result<Vec<(f64, usize, usize)>, ExpansionError> {
    if w.is_zero() || w.den.max_harmonic() == 0 {
        return Ok(vec![]);
    }
    let poles = w.den.zeros_on_circle()?;
    let zeros = if vh.max_harmonic() == 0 { vec![] } else { vh.zeros_on_circle()? };
    let anti = Antiderivative::new(w)?;
    let mut out = Vec::new();
    for (ang, ord) in poles {
        let a = zeros.iter().find(|z| ang_dist(z.0, ang) < 1e-7).map_or(0, |z| z.1);
        let log_coeff = anti.on_circle().into_iter().find(|t| ang_dist(t.0, ang) < 1e-7).map_or(0.0, |t| t.2.re);
        if ord >= 2 && ord - 1 > a || a == 0 && log_coeff.abs() > tol {
            out.push((ang, ord, a));
        }
    }
    Ok(out)
}

/// Log-log growth of `|v|` approaching each characteristic angle from both
/// sides between distances `1e-5` and `1e-7`. Returns the most negative slope.
pub fn growth_slope(v: &dyn Fn(f64) -> f64, omega: &[f64]) -> f64 {
    let mut worst = f64::INFINITY;
    for &w in omega {
        for side in [1.0, -1.0] {
            let pt = |d: f64| (d.ln(), v(w + side * d).abs().max(1e-300).ln());
            let (a, b) = (pt(1e-5), pt(1e-7));
            let big = b.1 > (1e-6f64).ln();
            if big {
                worst = worst.min((b.1 - a.1) / (b.0 - a.0));
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigfun::rat;

    #[test]
    fn antiderivative_of_cot_is_log_sin() {
        let c = TrigPoly::cos();
        let s = TrigPoly::sin();
        let w = RationalTrig::new(c, s).unwrap();
        let a = Antiderivative::new(&w).unwrap();
        for phi in [0.3, 1.0, 2.0, 4.0, 5.5] {
            let d = (a.eval(phi) - a.eval(1.0)) - ((phi as f64).sin().abs().ln() - 1f64.sin().ln());
            assert!(d.abs() < 1e-10, "{phi}: {d}");
        }
        assert!(a.period_increment().abs() < 1e-12);
    }

    #[test]
    fn homogeneous_factor_solves_equation() {
        // G = sin²φ, P = (1/2) sin 2φ·(−3) + sin²φ / 5
        let s = TrigPoly::sin();
        let c = TrigPoly::cos();
        let g = s.mul(&s);
        let p = s.mul(&c).scale_rat(&rat(-3, 1)).add(&g.scale_rat(&rat(1, 5)));
        let lin = SingularLinear::new(&g, &p).unwrap();
        assert_eq!(lin.omega.len(), 2);
        for (k, _) in lin.omega.iter().enumerate() {
            assert!((lin.exponents[k] + 3.0).abs() < 1e-9);
        }
        let lm = lin.log_mu;
        assert!((lm.residue.unwrap() + 2.0 * PI / 5.0).abs() < 1e-9);
        assert!((lm.quadrature.unwrap() + 2.0 * PI / 5.0).abs() < 1e-6);
        assert!((lin.log_mu_closed_form() + 2.0 * PI / 5.0).abs() < 1e-9);
        for phi in [0.4, 1.3, 2.9, 4.1] {
            let e = 1e-6;
            let hp = (lin.h(phi + e) - lin.h(phi - e)) / (2.0 * e);
            let r = g.eval(phi) * hp + p.eval(phi) * lin.h(phi);
            assert!(r.abs() < 1e-6 * lin.h(phi).abs().max(1.0), "{phi}: {r}");
        }
    }
}
