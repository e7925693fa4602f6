//! Laurent inverse integrating factors `V = Σ v_j(φ) ρ^j` of the cylinder
//! field: the leading-exponent constraint, ascending and descending
//! coefficient recursions, the periodic singular linear equation solved at
//! each step, and the verdict logic built on top.

pub mod exact;
pub mod lemma;

pub use exact::{normalize, solve_exact, Affine, Condition, ExactSolution};
pub use lemma::{DualValue, LocalDivergence, SampledCoefficient, SingularLinear};

use crate::newton::{compute_diagram, NewtonError, PolyVectorField};
use crate::poincare::{eta_from_g, g_of_r, section_scale, verify_iif, SectionScale, EtaReading, GValue, DEFAULT_RADII};
use crate::polar::{
    blow_up, characteristic_directions, lambda_pq_probe, LambdaRisk, LaurentSeries, MonodromyReport, PolarError,
    PolarField, ProbeConfig,
};
use crate::residue_pv::{fp_contour_integral, pv_contour_integral, pv_quadrature, quadrature_rational, ContourMode, PVResult, PvError};
use crate::trigfun::{rat, RationalTrig, TrigError, TrigPoly};
use crate::Rat;
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpansionError {
    #[error("leading equation degenerates: {0}")]
    LeadingDegenerate(String),
    #[error("harmonic degree bound {bound} exceeds cap {cap}")]
    HarmonicCap { bound: i64, cap: i64 },
    #[error("pole of order {order} at φ = {angle} in the linear coefficient")]
    NonSimplePole { angle: f64, order: usize },
    #[error(transparent)]
    Pv(#[from] PvError),
    #[error(transparent)]
    Trig(#[from] TrigError),
    #[error(transparent)]
    Polar(#[from] PolarError),
    #[error(transparent)]
    Newton(#[from] NewtonError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProcedureMode {
    Auto,
    AscendingOnly,
    DescendingOnly,
}

#[derive(Clone, Debug)]
pub struct ExpansionConfig {
    pub m_min: i64,
    pub m_max: i64,
    pub tol_zero: f64,
    /// tolerance applied to quadrature-path values
    pub tol_quadrature: f64,
    pub max_constants: usize,
    pub saturation_window: usize,
    /// number of coefficients computed past the leading one
    pub max_order: usize,
    pub harmonic_cap: i64,
    /// growth slope (log-log) beyond which a sampled coefficient is unbounded
    pub growth_slope: f64,
    pub radii: Vec<f64>,
    pub probe: ProbeConfig,
    pub mode: ProcedureMode,
    /// restrict to a single weight
    pub weights: Option<(u32, u32)>,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        ExpansionConfig {
            m_min: -8,
            m_max: 8,
            tol_zero: 1e-9,
            tol_quadrature: 1e-6,
            max_constants: 8,
            saturation_window: 3,
            max_order: 16,
            harmonic_cap: 64,
            growth_slope: -0.1,
            radii: DEFAULT_RADII.to_vec(),
            probe: ProbeConfig::default(),
            mode: ProcedureMode::Auto,
            weights: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    Ascending,
    Descending,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MStatus {
    Free,
    Fixed(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ObstructionKind {
    XiNonzero,
    MuNotOne,
    ZetaNonzero,
    Unbounded,
    NonPeriodicTerm,
    ConstantSystemInconsistent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionRecord {
    pub kind: ObstructionKind,
    pub index: i64,
    pub value: f64,
    pub error_estimate: f64,
    pub residue_value: Option<f64>,
    pub quadrature_value: Option<f64>,
    pub detail: String,
}

/// One coefficient `v_j`.
#[derive(Clone, Debug)]
pub enum CoefficientFn {
    Exact(Affine),
    Sampled(Arc<SampledCoefficient>),
}

impl CoefficientFn {
    pub fn eval(&self, phi: f64) -> f64 {
        match self {
            CoefficientFn::Exact(a) => a.base.eval(phi),
            CoefficientFn::Sampled(s) => s.eval(phi),
        }
    }
    pub fn exact(&self) -> Option<&Affine> {
        match self {
            CoefficientFn::Exact(a) => Some(a),
            CoefficientFn::Sampled(_) => None,
        }
    }
}

/// `G v' + P v + Q = 0` for one coefficient.
#[derive(Clone, Debug)]
pub struct PeriodicODE {
    pub leading: TrigPoly,
    pub linear_coeff: TrigPoly,
    pub forcing: Affine,
    pub index: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JumpRecord {
    pub residue: f64,
    pub quadrature: Option<f64>,
    pub exact_over_pi: Option<String>,
    pub homogeneous: String,
    pub constant_parts: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepLog {
    pub index: i64,
    pub outcome: String,
    pub closed_form: Option<String>,
    pub new_constants: usize,
    pub conditions: Vec<String>,
    pub log_mu: Option<DualValue>,
    pub jump: Option<JumpRecord>,
    pub divergence: Vec<LocalDivergence>,
    pub note: String,
    #[serde(skip)]
    pub homogeneous: Option<TrigPoly>,
}

impl StepLog {
    fn new(index: i64, outcome: &str) -> Self {
        StepLog {
            index,
            outcome: outcome.to_string(),
            closed_form: None,
            new_constants: 0,
            conditions: vec![],
            log_mu: None,
            jump: None,
            divergence: vec![],
            note: String::new(),
            homogeneous: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantInfo {
    pub introduced_at: i64,
    pub fixed: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "reason")]
pub enum Halt {
    Inadmissible { index: i64 },
    Obstruction { index: i64 },
    Saturated { index: i64 },
    Sampled { index: i64, note: String },
    Unresolved { index: i64, note: String },
    ConstantCap { index: i64 },
    MaxOrder { index: i64 },
    Error { message: String },
}

#[derive(Clone, Debug)]
pub struct ExpansionState {
    pub direction: Direction,
    pub m_status: MStatus,
    pub m: i64,
    pub coefficients: BTreeMap<i64, CoefficientFn>,
    pub constants: Vec<ConstantInfo>,
    pub obstructions: Vec<ObstructionRecord>,
    pub log: Vec<StepLog>,
    pub halted: Option<Halt>,
    run: usize,
}

impl ExpansionState {
    pub fn new(direction: Direction, m_status: MStatus, m: i64) -> Self {
        ExpansionState {
            direction,
            m_status,
            m,
            coefficients: BTreeMap::new(),
            constants: vec![],
            obstructions: vec![],
            log: vec![],
            halted: None,
            run: 0,
        }
    }

    pub fn exact_coefficients(&self) -> Option<BTreeMap<i64, Affine>> {
        self.coefficients.iter().map(|(k, c)| c.exact().map(|a| (*k, a.clone()))).collect()
    }

    /// The computed truncation with every carried constant set to zero.
    pub fn closed_form_series(&self) -> Option<LaurentSeries> {
        let ex = self.exact_coefficients()?;
        Some(LaurentSeries::new(ex.into_iter().map(|(k, a)| (k, a.drop_constants())).collect()))
    }

    pub fn coefficient(&self, j: i64) -> Option<&CoefficientFn> {
        self.coefficients.get(&j)
    }

    fn apply_condition(&mut self, c: &Condition) {
        for v in self.coefficients.values_mut() {
            if let CoefficientFn::Exact(a) = v {
                a.substitute(c);
            }
        }
        if let Some(ci) = self.constants.get_mut(c.constant) {
            ci.fixed = Some(c.to_string());
        }
    }

    fn next_index(&self) -> i64 {
        match self.direction {
            Direction::Ascending => self.coefficients.keys().last().map_or(self.m, |k| k + 1),
            Direction::Descending => self.coefficients.keys().next().map_or(self.m, |k| k - 1),
        }
    }
}

// ---------------------------------------------------------------------------
// ξ and the leading exponent

#[derive(Clone, Debug, Serialize)]
pub struct XiValue {
    pub value: f64,
    pub residue: PVResult,
    pub quadrature: Option<PVResult>,
    pub exact_over_pi: Option<String>,
}

/// Principal value of `∮ R_1/G_0`.
pub fn xi_pq(z: &PolarField) -> Result<XiValue, ExpansionError> {
    let w = RationalTrig::new(z.r_at(1), z.g0().clone())?;
    let residue = pv_contour_integral(&w)?;
    let poles: Vec<f64> = if w.den.max_harmonic() == 0 {
        vec![]
    } else {
        w.den.zeros_on_circle()?.into_iter().map(|p| p.0).collect()
    };
    let quadrature = pv_quadrature(&|x| w.eval(x), &poles).ok();
    Ok(XiValue {
        value: residue.value.re,
        exact_over_pi: residue.exact_over_pi.as_ref().map(|g| g.re.to_string()),
        residue,
        quadrature,
    })
}

/// `(m − 1) ξ = 0`: a nonzero `ξ` pins the ascending leading exponent to 1.
pub fn leading_constraint(xi: &XiValue, tol_zero: f64) -> MStatus {
    if xi.value.abs() > tol_zero {
        MStatus::Fixed(1)
    } else {
        MStatus::Free
    }
}

// ---------------------------------------------------------------------------
// recursions

/// Known part of the ρ^N coefficient of `Z(V) − V div Z`, summed over the
/// stored coefficients.
pub fn forcing(z: &PolarField, coeffs: &BTreeMap<i64, Affine>, order: i64) -> Affine {
    let nmax = z.g.len().max(z.r.len()) as i64;
    let mut acc = Affine::zero();
    for k in 0..=nmax {
        let gk = z.g_at(k as usize);
        if !gk.is_zero() {
            if let Some(v) = coeffs.get(&(order - k)) {
                acc = acc.add(&v.differentiate().mul_trig(&gk)).sub(&v.mul_trig(&gk.differentiate()));
            }
        }
        let rk = z.r_at(k as usize);
        if !rk.is_zero() {
            if let Some(v) = coeffs.get(&(order + 1 - k)) {
                let f = order + 1 - 2 * k;
                if f != 0 {
                    acc = acc.add(&v.mul_trig(&rk).scale_rat(&rat(f, 1)));
                }
            }
        }
    }
    acc
}

/// Leading and linear coefficients of the equation for `v_j`.
pub fn step_operator(z: &PolarField, dir: Direction, j: i64) -> Result<(TrigPoly, TrigPoly, i64), ExpansionError> {
    match dir {
        Direction::Ascending => {
            let g0 = z.g0().clone();
            let p = z.r_at(1).scale_rat(&rat(j - 1, 1)).sub(&g0.differentiate());
            Ok((g0, p, j))
        }
        Direction::Descending => {
            let n = z.top_index() as i64;
            let g = z.g_at((n - 1) as usize);
            let rn = z.r_at(n as usize);
            if g.is_zero() {
                return Err(ExpansionError::LeadingDegenerate(format!("top angular coefficient of order {} vanishes", n - 1)));
            }
            if rn.is_zero() {
                return Err(ExpansionError::LeadingDegenerate(format!("top radial coefficient of order {n} vanishes")));
            }
            let p = rn.scale_rat(&rat(j - n, 1)).sub(&g.differentiate());
            Ok((g, p, j + n - 1))
        }
    }
}

pub fn periodic_equation(z: &PolarField, dir: Direction, j: i64, coeffs: &BTreeMap<i64, Affine>) -> Result<PeriodicODE, ExpansionError> {
    let (g, p, order) = step_operator(z, dir, j)?;
    Ok(PeriodicODE { leading: g, linear_coeff: p, forcing: forcing(z, coeffs, order), index: j })
}

// ---------------------------------------------------------------------------
// the periodic equation

#[derive(Clone, Debug)]
pub enum LemmaOutcome {
    Exact { v: Affine, conditions: Vec<Condition>, nullspace: Vec<TrigPoly>, log: StepLog },
    Sampled { v: Arc<SampledCoefficient>, conditions: Vec<Condition>, log: StepLog },
    Obstruction { record: ObstructionRecord, log: StepLog },
    Unresolved { log: StepLog },
}

fn classify(d: &DualValue, cfg: &ExpansionConfig) -> Option<bool> {
    let r = d.residue.map(|x| x.abs() > cfg.tol_zero);
    let q = d.quadrature.map(|x| x.abs() > cfg.tol_quadrature);
    match (r, q) {
        (Some(a), Some(b)) if a == b => Some(a),
        (Some(true), Some(false)) => {
            // the quadrature tolerance is looser: accept when the residue
            // value is below it too
            if d.residue.unwrap().abs() <= cfg.tol_quadrature {
                None
            } else {
                Some(true)
            }
        }
        (Some(false), Some(true)) => None,
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        _ => None,
    }
}

fn unresolved(index: i64, note: String, mut log: StepLog) -> LemmaOutcome {
    log.outcome = "unresolved".into();
    log.note = note;
    let _ = index;
    LemmaOutcome::Unresolved { log }
}

/// Solves one recursion equation: exact trigonometric polynomial if one
/// exists, otherwise the singular-lemma analysis (monodromy, divergence of
/// the forcing integral, non-periodic jump).
pub fn solve_periodic_ode(eq: &PeriodicODE, cfg: &ExpansionConfig) -> Result<LemmaOutcome, ExpansionError> {
    let (g, p, q) = (&eq.leading, &eq.linear_coeff, &eq.forcing);
    let mut log = StepLog::new(eq.index, "exact");
    if let Some(sol) = solve_exact(g, p, q, cfg.harmonic_cap)? {
        if sol.nullspace.is_empty() {
            if let Ok(lin) = SingularLinear::new(g, p) {
                log.log_mu = Some(lin.log_mu);
                if classify(&lin.log_mu, cfg) == Some(false) && !lin.omega.is_empty() {
                    log.note = "monodromy one with no polynomial homogeneous solution; singular homogeneous direction not carried".into();
                }
            }
        }
        log.closed_form = Some(sol.particular.to_string());
        log.conditions = sol.conditions.iter().map(|c| c.to_string()).collect();
        log.new_constants = sol.nullspace.len();
        return Ok(LemmaOutcome::Exact { v: sol.particular, conditions: sol.conditions, nullspace: sol.nullspace, log });
    }
    let lin = match SingularLinear::new(g, p) {
        Ok(l) => Arc::new(l),
        Err(e @ ExpansionError::NonSimplePole { .. }) => return Ok(unresolved(eq.index, e.to_string(), log)),
        Err(e) => return Err(e),
    };
    log.log_mu = Some(lin.log_mu);
    match classify(&lin.log_mu, cfg) {
        None => Ok(unresolved(eq.index, "monodromy paths disagree".into(), log)),
        Some(true) => unique_case(eq, lin, cfg, log),
        Some(false) => monodromy_one_case(eq, cfg, log),
    }
}

fn unique_case(eq: &PeriodicODE, lin: Arc<SingularLinear>, cfg: &ExpansionConfig, mut log: StepLog) -> Result<LemmaOutcome, ExpansionError> {
    let g = &eq.leading;
    for (c, part) in &eq.forcing.parts {
        let qr = RationalTrig::new(part.clone(), g.clone())?;
        let d = lemma::forcing_divergence(&lin, &qr)?;
        if d.iter().any(|x| x.residue_amplitude.abs() > cfg.tol_zero || x.quadrature_amplitude.abs() > cfg.tol_quadrature) {
            return Ok(unresolved(eq.index, format!("divergence of the forcing integral depends on C{}", c + 1), log));
        }
    }
    let qr = RationalTrig::new(eq.forcing.base.clone(), g.clone())?;
    let div = lemma::forcing_divergence(&lin, &qr)?;
    log.divergence = div.clone();
    let worst = div.iter().max_by(|a, b| a.residue_amplitude.abs().partial_cmp(&b.residue_amplitude.abs()).unwrap());
    if let Some(d) = worst {
        let res_div = d.residue_amplitude.abs() > cfg.tol_zero;
        let quad_div = d.quadrature_amplitude.abs() > cfg.tol_quadrature;
        if res_div && quad_div {
            let agree = (d.residue_amplitude - d.quadrature_amplitude).abs() <= 1e-3 * d.residue_amplitude.abs();
            if !agree {
                return Ok(unresolved(eq.index, "divergence amplitudes disagree between paths".into(), log));
            }
            log.outcome = "obstruction".into();
            let record = ObstructionRecord {
                kind: ObstructionKind::ZetaNonzero,
                index: eq.index,
                value: d.residue_amplitude,
                error_estimate: (d.residue_amplitude - d.quadrature_amplitude).abs(),
                residue_value: Some(d.residue_amplitude),
                quadrature_value: Some(d.quadrature_amplitude),
                detail: format!(
                    "forcing integral diverges at φ = {:.12} with excision exponent {} (fitted {:?}); no principal value",
                    d.angle, d.exponent, d.fitted_exponent
                ),
            };
            return Ok(LemmaOutcome::Obstruction { record, log });
        }
        if res_div != quad_div {
            return Ok(unresolved(eq.index, "divergence detected on one path only".into(), log));
        }
    }
    let v = Arc::new(lemma::sampled_unique(lin, &eq.forcing.base)?);
    log.outcome = "sampled".into();
    log.note = if eq.forcing.depends_on_constants() {
        "unique periodic solution, sampled with carried constants set to zero".into()
    } else {
        "unique periodic solution, sampled".into()
    };
    Ok(LemmaOutcome::Sampled { v, conditions: vec![], log })
}

fn jump_of(w: &RationalTrig) -> Result<(f64, Option<f64>, Option<Rat>), ExpansionError> {
    let r = fp_contour_integral(w)?;
    let quad = quadrature_rational(w, ContourMode::FinitePart).ok().map(|x| x.value.re);
    Ok((r.value.re, quad, r.exact_over_pi.map(|g| g.re)))
}

fn monodromy_one_case(eq: &PeriodicODE, cfg: &ExpansionConfig, mut log: StepLog) -> Result<LemmaOutcome, ExpansionError> {
    let (g, p) = (&eq.leading, &eq.linear_coeff);
    let hom = solve_exact(g, p, &Affine::zero(), cfg.harmonic_cap)?.map(|s| s.nullspace).unwrap_or_default();
    let Some(vh) = hom.first().map(normalize) else {
        return Ok(unresolved(eq.index, "monodromy one without a polynomial homogeneous solution".into(), log));
    };
    log.homogeneous = Some(vh.clone());
    let gv = g.mul(&vh);
    let w0 = RationalTrig::new(eq.forcing.base.neg(), gv.clone())?;
    let (j0, j0q, j0x) = jump_of(&w0)?;
    let mut parts = Vec::new();
    for (c, t) in &eq.forcing.parts {
        let w = RationalTrig::new(t.neg(), gv.clone())?;
        parts.push((*c, jump_of(&w)?));
    }
    log.jump = Some(JumpRecord {
        residue: j0,
        quadrature: j0q,
        exact_over_pi: j0x.as_ref().map(|r| r.to_string()),
        homogeneous: vh.to_string(),
        constant_parts: parts.iter().map(|(c, j)| (*c, j.0)).collect(),
    });
    let mut conditions = Vec::new();
    if let Some((c, (jc, _, jcx))) = parts.iter().find(|(_, j)| j.0.abs() > cfg.tol_zero) {
        // the jump is affine in the constants: fix one of them exactly
        let (Some(jcx), Some(j0x)) = (jcx.clone(), j0x.clone()) else {
            return Ok(unresolved(eq.index, "jump depends on a constant but is not an exact multiple of π".into(), log));
        };
        let _ = jc;
        let mut coeffs = BTreeMap::new();
        for (l, (_, _, jlx)) in parts.iter().filter(|(l, _)| l != c) {
            let Some(jlx) = jlx.clone() else {
                return Ok(unresolved(eq.index, "jump coefficients are not exact multiples of π".into(), log));
            };
            if !jlx.is_zero() {
                coeffs.insert(*l, -(jlx / &jcx));
            }
        }
        let cond = Condition { constant: *c, offset: -(j0x / &jcx), coeffs };
        log.conditions.push(cond.to_string());
        conditions.push(cond);
    } else {
        let d = DualValue { residue: Some(j0), quadrature: j0q };
        match classify(&d, cfg) {
            Some(true) => {
                log.outcome = "obstruction".into();
                let record = ObstructionRecord {
                    kind: ObstructionKind::NonPeriodicTerm,
                    index: eq.index,
                    value: j0,
                    error_estimate: d.discrepancy(),
                    residue_value: Some(j0),
                    quadrature_value: j0q,
                    detail: format!("solution gains {j0:.12e}·({vh}) per turn"),
                };
                return Ok(LemmaOutcome::Obstruction { record, log });
            }
            None => return Ok(unresolved(eq.index, "jump paths disagree".into(), log)),
            Some(false) => {}
        }
    }
    let mut forcing = eq.forcing.clone();
    for c in &conditions {
        forcing.substitute(c);
    }
    let w = RationalTrig::new(forcing.base.neg(), gv)?;
    let bad = lemma::closed_homogeneous_blowup(&w, &vh, cfg.tol_zero)?;
    if let Some(&(ang, ord, a)) = bad.first() {
        log.outcome = "obstruction".into();
        let record = ObstructionRecord {
            kind: ObstructionKind::Unbounded,
            index: eq.index,
            value: (ord as f64) - 1.0 - a as f64,
            error_estimate: 0.0,
            residue_value: None,
            quadrature_value: None,
            detail: format!("integrand pole of order {ord} against a homogeneous zero of order {a} at φ = {ang:.12}"),
        };
        return Ok(LemmaOutcome::Obstruction { record, log });
    }
    let v = Arc::new(lemma::sampled_with_closed_homogeneous(g, p, &forcing.base, &vh)?);
    log.outcome = "sampled".into();
    log.note = "periodic family v^h·(C + w) with non-polynomial w".into();
    Ok(LemmaOutcome::Sampled { v, conditions, log })
}

/// Boundedness near the characteristic angles.
pub fn admissibility_check(v: &CoefficientFn, omega: &[f64], index: i64, cfg: &ExpansionConfig) -> Result<(), ObstructionRecord> {
    match v {
        CoefficientFn::Exact(_) => return Ok(()),
        CoefficientFn::Sampled(s) if matches!(s.hom, lemma::Homogeneous::Exact(_)) => return Ok(()),
        _ => {}
    }
    let slope = lemma::growth_slope(&|x| v.eval(x), omega);
    if slope < cfg.growth_slope {
        Err(ObstructionRecord {
            kind: ObstructionKind::Unbounded,
            index,
            value: slope,
            error_estimate: 0.0,
            residue_value: None,
            quadrature_value: Some(slope),
            detail: "log-log growth near a characteristic angle".into(),
        })
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// leading coefficient

#[derive(Clone, Debug)]
pub enum LeadingOutcome {
    Admissible { v: TrigPoly, extra: Vec<TrigPoly>, log: StepLog },
    Inadmissible { record: ObstructionRecord, log: StepLog },
    Unresolved { log: StepLog },
}

/// Does `G v' + P v = 0` have a bounded nonzero periodic solution for the
/// leading index `m`?
pub fn leading_admissibility(z: &PolarField, dir: Direction, m: i64, cfg: &ExpansionConfig) -> Result<LeadingOutcome, ExpansionError> {
    let (g, p, _) = step_operator(z, dir, m)?;
    let mut log = StepLog::new(m, "leading");
    let sol = solve_exact(&g, &p, &Affine::zero(), cfg.harmonic_cap)?.expect("homogeneous system is consistent");
    if let Some(first) = sol.nullspace.first() {
        let v = normalize(first);
        log.closed_form = Some(v.to_string());
        log.new_constants = sol.nullspace.len() - 1;
        return Ok(LeadingOutcome::Admissible { v, extra: sol.nullspace[1..].to_vec(), log });
    }
    let lin = match SingularLinear::new(&g, &p) {
        Ok(l) => l,
        Err(e @ ExpansionError::NonSimplePole { .. }) => {
            log.note = e.to_string();
            return Ok(LeadingOutcome::Unresolved { log });
        }
        Err(e) => return Err(e),
    };
    log.log_mu = Some(lin.log_mu);
    match classify(&lin.log_mu, cfg) {
        Some(true) => {
            let record = ObstructionRecord {
                kind: ObstructionKind::MuNotOne,
                index: m,
                value: lin.log_mu.value(),
                error_estimate: lin.log_mu.discrepancy(),
                residue_value: lin.log_mu.residue,
                quadrature_value: lin.log_mu.quadrature,
                detail: "only the zero periodic solution".into(),
            };
            Ok(LeadingOutcome::Inadmissible { record, log })
        }
        Some(false) => {
            if let Some((k, c)) = lin.exponents.iter().enumerate().find(|(_, c)| **c > 1e-9) {
                let record = ObstructionRecord {
                    kind: ObstructionKind::Unbounded,
                    index: m,
                    value: *c,
                    error_estimate: 0.0,
                    residue_value: Some(*c),
                    quadrature_value: None,
                    detail: format!("homogeneous solution grows like |φ − {:.12}|^(−{c})", lin.omega[k]),
                };
                Ok(LeadingOutcome::Inadmissible { record, log })
            } else {
                log.note = "bounded periodic leading coefficient that is not a trigonometric polynomial".into();
                Ok(LeadingOutcome::Unresolved { log })
            }
        }
        None => {
            log.note = "monodromy paths disagree".into();
            Ok(LeadingOutcome::Unresolved { log })
        }
    }
}

// ---------------------------------------------------------------------------
// driving the recursion

/// Runs one expansion from leading index `m` until it halts.
pub fn expand(z: &PolarField, dir: Direction, m: i64, m_status: MStatus, cfg: &ExpansionConfig) -> ExpansionState {
    let mut st = ExpansionState::new(dir, m_status, m);
    match leading_admissibility(z, dir, m, cfg) {
        Err(e) => {
            st.halted = Some(Halt::Error { message: e.to_string() });
            return st;
        }
        Ok(LeadingOutcome::Inadmissible { record, log }) => {
            st.log.push(log);
            st.obstructions.push(record);
            st.halted = Some(Halt::Inadmissible { index: m });
            return st;
        }
        Ok(LeadingOutcome::Unresolved { log }) => {
            let note = log.note.clone();
            st.log.push(log);
            st.halted = Some(Halt::Unresolved { index: m, note });
            return st;
        }
        Ok(LeadingOutcome::Admissible { v, extra, log }) => {
            let mut a = Affine::constant(v);
            for t in extra {
                a.parts.insert(st.constants.len(), t);
                st.constants.push(ConstantInfo { introduced_at: m, fixed: None });
            }
            st.coefficients.insert(m, CoefficientFn::Exact(a));
            st.log.push(log);
        }
    }
    let n = z.top_index() as i64;
    let omega: Vec<f64> = characteristic_directions(z).unwrap_or_default().into_iter().map(|x| x.0).collect();
    while st.halted.is_none() {
        let j = st.next_index();
        let depth = (j - m).abs();
        if depth as usize > cfg.max_order {
            st.halted = Some(Halt::MaxOrder { index: j });
            break;
        }
        if let Err(e) = step(z, &mut st, j, n, &omega, cfg) {
            st.halted = Some(Halt::Error { message: e.to_string() });
        }
    }
    st
}

fn step(z: &PolarField, st: &mut ExpansionState, j: i64, n: i64, omega: &[f64], cfg: &ExpansionConfig) -> Result<(), ExpansionError> {
    let coeffs = st.exact_coefficients().expect("recursion continues only from exact coefficients");
    let eq = periodic_equation(z, st.direction, j, &coeffs)?;
    let depth = (j - st.m).abs();
    match solve_periodic_ode(&eq, cfg)? {
        LemmaOutcome::Exact { mut v, conditions, nullspace, log } => {
            if st.constants.len() + nullspace.len() > cfg.max_constants {
                st.log.push(log);
                st.halted = Some(Halt::ConstantCap { index: j });
                return Ok(());
            }
            for c in &conditions {
                st.apply_condition(c);
                v.substitute(c);
            }
            for t in nullspace {
                v.parts.insert(st.constants.len(), t);
                st.constants.push(ConstantInfo { introduced_at: j, fixed: None });
            }
            st.coefficients.insert(j, CoefficientFn::Exact(v));
            st.log.push(log);
            if !conditions.is_empty() {
                st.run = 0;
            } else if depth >= n {
                st.run += 1;
            }
            if st.run >= cfg.saturation_window {
                st.halted = Some(Halt::Saturated { index: j });
            }
        }
        LemmaOutcome::Sampled { v, conditions, log } => {
            for c in &conditions {
                st.apply_condition(c);
            }
            let cf = CoefficientFn::Sampled(v);
            if let Err(rec) = admissibility_check(&cf, omega, j, cfg) {
                st.log.push(log);
                st.obstructions.push(rec);
                st.halted = Some(Halt::Obstruction { index: j });
                return Ok(());
            }
            let note = log.note.clone();
            st.coefficients.insert(j, cf);
            st.log.push(log);
            st.halted = Some(Halt::Sampled { index: j, note });
        }
        LemmaOutcome::Obstruction { record, log } => {
            st.log.push(log);
            st.obstructions.push(record);
            st.halted = Some(Halt::Obstruction { index: j });
        }
        LemmaOutcome::Unresolved { log } => {
            let note = log.note.clone();
            st.log.push(log);
            st.halted = Some(Halt::Unresolved { index: j, note });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// verdicts

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Center,
    Focus,
    MaximalOrderFocusCandidate,
    CenterByEssentialSingularity,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub basis: String,
    /// set when the verdict relies on the absence of zero-speed curves off
    /// the singular circle and the probe could not confirm it
    pub conditional: bool,
}

impl Verdict {
    fn new(outcome: Outcome, basis: impl Into<String>) -> Self {
        Verdict { outcome, basis: basis.into(), conditional: false }
    }
    pub fn is_decisive(&self) -> bool {
        matches!(self.outcome, Outcome::Center | Outcome::Focus | Outcome::CenterByEssentialSingularity)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AttemptSummary {
    pub direction: Direction,
    pub m: i64,
    pub m_status: MStatus,
    pub halted: Option<Halt>,
    pub obstructions: Vec<ObstructionRecord>,
    pub steps: Vec<StepLog>,
    pub constants: Vec<ConstantInfo>,
}

impl AttemptSummary {
    pub fn of(st: &ExpansionState) -> Self {
        AttemptSummary {
            direction: st.direction,
            m: st.m,
            m_status: st.m_status,
            halted: st.halted.clone(),
            obstructions: st.obstructions.clone(),
            steps: st.log.clone(),
            constants: st.constants.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormReport {
    pub series: BTreeMap<i64, String>,
    pub verified: bool,
    pub leading_exponent: i64,
    pub g: Option<GValue>,
    pub section: Option<SectionScale>,
    pub reading: Option<EtaReading>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightAnalysis {
    pub weights: (u32, u32),
    pub error: Option<String>,
    pub monodromy: Option<MonodromyReport>,
    pub characteristic_directions: Vec<f64>,
    pub xi: Option<XiValue>,
    pub m_status: Option<MStatus>,
    pub attempts: Vec<AttemptSummary>,
    pub closed_form: Option<ClosedFormReport>,
    pub verdict: Verdict,
    #[serde(skip)]
    pub polar: Option<PolarField>,
    #[serde(skip)]
    pub states: Vec<ExpansionState>,
}

fn series_strings(v: &LaurentSeries) -> BTreeMap<i64, String> {
    v.coeffs.iter().map(|(k, t)| (*k, t.to_string())).collect()
}

/// Turns a saturated expansion into a verdict through the integral
/// invariant of the truncated series.
fn resolve_saturated(z: &PolarField, st: &ExpansionState, risky: bool, cfg: &ExpansionConfig) -> (Verdict, Option<ClosedFormReport>) {
    let Some(v) = st.closed_form_series() else {
        return (Verdict::new(Outcome::MaximalOrderFocusCandidate, "saturated expansion without closed form"), None);
    };
    let m = v.leading_exponent().unwrap_or(st.m);
    let verified = verify_iif(z, &v).is_ok();
    let mut rep = ClosedFormReport { series: series_strings(&v), verified, leading_exponent: m, g: None, section: None, reading: None };
    if !verified {
        return (
            Verdict::new(Outcome::MaximalOrderFocusCandidate, "expansion saturated; truncated series is not an exact inverse integrating factor"),
            Some(rep),
        );
    }
    if m <= 0 {
        let mut vd = Verdict::new(Outcome::Center, "inverse integrating factor with non-positive leading exponent constructed");
        vd.conditional = risky;
        return (vd, Some(rep));
    }
    let g = match g_of_r(z, &v, &cfg.radii) {
        Ok(g) => g,
        Err(e) => {
            return (Verdict::new(Outcome::MaximalOrderFocusCandidate, format!("closed form found; integral invariant failed: {e}")), Some(rep));
        }
    };
    let Some(reading) = eta_from_g(z, &v, g.value, 1e-8) else {
        return (Verdict::new(Outcome::MaximalOrderFocusCandidate, "closed form found; no section for the invariant"), Some(rep));
    };
    rep.section = section_scale(z, &v);
    rep.g = Some(g);
    rep.reading = Some(reading);
    let mut vd = match reading {
        EtaReading::Center => Verdict::new(Outcome::Center, "inverse integrating factor constructed; integral invariant vanishes"),
        EtaReading::Focus { .. } => Verdict::new(Outcome::Focus, "inverse integrating factor constructed; integral invariant gives η₁ ≠ 1"),
        EtaReading::FocusOfMaximalOrder { .. } => {
            Verdict::new(Outcome::Focus, "inverse integrating factor constructed; focus of maximal order with η_m ≠ 0")
        }
    };
    vd.conditional = risky;
    (vd, Some(rep))
}

/// Order in which free leading exponents are tried.
pub fn scan_order(m_min: i64, m_max: i64) -> Vec<i64> {
    let mut v = Vec::new();
    if (m_min..=m_max).contains(&1) {
        v.push(1);
    }
    v.extend((2..=m_max).filter(|m| *m >= m_min));
    if (m_min..=m_max).contains(&0) {
        v.push(0);
    }
    v.extend((m_min..=-1).rev().filter(|m| *m <= m_max));
    v
}

enum ScanResult {
    Decided(Verdict, Option<ClosedFormReport>),
    AllObstructed,
    Open(String),
}

fn scan(
    z: &PolarField,
    dir: Direction,
    order: &[i64],
    m_status: MStatus,
    risky: bool,
    cfg: &ExpansionConfig,
    wa: &mut WeightAnalysis,
) -> ScanResult {
    let mut open = Vec::new();
    for &m in order {
        let st = expand(z, dir, m, m_status, cfg);
        wa.attempts.push(AttemptSummary::of(&st));
        let halted = st.halted.clone();
        wa.states.push(st);
        let st = wa.states.last().unwrap();
        match halted {
            Some(Halt::Inadmissible { .. }) | Some(Halt::Obstruction { .. }) => continue,
            Some(Halt::Saturated { .. }) => {
                let (v, rep) = resolve_saturated(z, st, risky, cfg);
                return ScanResult::Decided(v, rep);
            }
            Some(h) => open.push(format!("m = {m}: {}", serde_json::to_string(&h).unwrap_or_default())),
            None => open.push(format!("m = {m}: not halted")),
        }
    }
    if open.is_empty() {
        ScanResult::AllObstructed
    } else {
        ScanResult::Open(open.join("; "))
    }
}

/// The full procedure for one weight vector.
pub fn analyze_weight(x: &PolyVectorField, w: (u32, u32), cfg: &ExpansionConfig) -> WeightAnalysis {
    let mut wa = WeightAnalysis {
        weights: w,
        error: None,
        monodromy: None,
        characteristic_directions: vec![],
        xi: None,
        m_status: None,
        attempts: vec![],
        closed_form: None,
        verdict: Verdict::new(Outcome::Undecided, "not analysed"),
        polar: None,
        states: vec![],
    };
    let z = match blow_up(x, w) {
        Ok(z) => z,
        Err(e) => {
            wa.error = Some(e.to_string());
            wa.verdict = Verdict::new(Outcome::Undecided, format!("blow-up failed: {e}"));
            return wa;
        }
    };
    let mono = lambda_pq_probe(&z, &cfg.probe);
    let risky = mono.lambda_pq_risk != LambdaRisk::NoneDetected;
    wa.monodromy = Some(mono);
    wa.characteristic_directions = characteristic_directions(&z).unwrap_or_default().into_iter().map(|x| x.0).collect();
    wa.polar = Some(z.clone());
    let xi = match xi_pq(&z) {
        Ok(x) => x,
        Err(e) => {
            wa.error = Some(e.to_string());
            wa.verdict = Verdict::new(Outcome::Undecided, format!("principal value of R_1/G_0 unavailable: {e}"));
            return wa;
        }
    };
    let ms = leading_constraint(&xi, cfg.tol_zero);
    wa.xi = Some(xi);
    wa.m_status = Some(ms);
    let desc_order: Vec<i64> = (cfg.m_min..=cfg.m_max).rev().collect();
    if cfg.mode == ProcedureMode::DescendingOnly {
        let (v, rep) = match scan(&z, Direction::Descending, &desc_order, MStatus::Free, risky, cfg, &mut wa) {
            ScanResult::Decided(v, r) => (v, r),
            ScanResult::AllObstructed => (Verdict::new(Outcome::Undecided, "every descending leading index obstructed"), None),
            ScanResult::Open(s) => (Verdict::new(Outcome::Undecided, format!("descending expansion unresolved: {s}")), None),
        };
        wa.verdict = v;
        wa.closed_form = rep;
        return wa;
    }
    match ms {
        MStatus::Fixed(m) => {
            let st = expand(&z, Direction::Ascending, m, ms, cfg);
            wa.attempts.push(AttemptSummary::of(&st));
            let verdict = match &st.halted {
                Some(Halt::Obstruction { index }) | Some(Halt::Inadmissible { index }) => {
                    let kind = st.obstructions.last().map(|o| format!("{:?}", o.kind)).unwrap_or_default();
                    Verdict::new(
                        Outcome::Focus,
                        format!("no ascending Laurent inverse integrating factor with the forced leading exponent {m}: {kind} at index {index}"),
                    )
                }
                Some(Halt::Saturated { .. }) => {
                    let (v, rep) = resolve_saturated(&z, &st, risky, cfg);
                    wa.closed_form = rep;
                    v
                }
                other => Verdict::new(Outcome::Undecided, format!("ascending expansion halted: {}", serde_json::to_string(other).unwrap_or_default())),
            };
            wa.states.push(st);
            wa.verdict = verdict;
        }
        MStatus::Free => {
            let order = scan_order(cfg.m_min, cfg.m_max);
            match scan(&z, Direction::Ascending, &order, ms, risky, cfg, &mut wa) {
                ScanResult::Decided(v, rep) => {
                    wa.verdict = v;
                    wa.closed_form = rep;
                }
                ScanResult::Open(s) => {
                    wa.verdict = Verdict::new(Outcome::Undecided, format!("ascending expansions unresolved: {s}"));
                }
                ScanResult::AllObstructed => {
                    if cfg.mode == ProcedureMode::AscendingOnly {
                        wa.verdict = Verdict::new(Outcome::Undecided, "every ascending leading exponent in the window is obstructed");
                    } else {
                        match scan(&z, Direction::Descending, &desc_order, MStatus::Free, risky, cfg, &mut wa) {
                            ScanResult::Decided(v, rep) => {
                                wa.verdict = v;
                                wa.closed_form = rep;
                            }
                            ScanResult::AllObstructed => {
                                let mut v = Verdict::new(
                                    Outcome::CenterByEssentialSingularity,
                                    format!(
                                        "no ascending or descending Laurent inverse integrating factor for m in [{}, {}]; any inverse integrating factor has an essential singularity (window heuristic)",
                                        cfg.m_min, cfg.m_max
                                    ),
                                );
                                v.conditional = risky;
                                wa.verdict = v;
                            }
                            ScanResult::Open(s) => {
                                wa.verdict = Verdict::new(Outcome::Undecided, format!("descending expansions unresolved: {s}"));
                            }
                        }
                    }
                }
            }
        }
    }
    wa
}

#[derive(Clone, Debug, Serialize)]
pub struct ProcedureReport {
    pub weights: Vec<WeightAnalysis>,
    pub verdict: Verdict,
}

/// Runs the procedure for every weight vector of the Newton diagram (or the
/// configured one) and combines the verdicts.
pub fn run_procedure(x: &PolyVectorField, cfg: &ExpansionConfig) -> Result<ProcedureReport, ExpansionError> {
    let ws = match cfg.weights {
        Some(w) => vec![w],
        None => compute_diagram(x)?.weights,
    };
    let analyses: Vec<WeightAnalysis> = ws.iter().map(|w| analyze_weight(x, *w, cfg)).collect();
    let decisive: Vec<&Verdict> = analyses.iter().map(|a| &a.verdict).filter(|v| v.is_decisive()).collect();
    let verdict = if decisive.is_empty() {
        analyses
            .iter()
            .map(|a| a.verdict.clone())
            .find(|v| v.outcome == Outcome::MaximalOrderFocusCandidate)
            .unwrap_or_else(|| {
                let reasons: Vec<String> = analyses.iter().map(|a| format!("{:?}: {}", a.weights, a.verdict.basis)).collect();
                Verdict::new(Outcome::Undecided, reasons.join(" | "))
            })
    } else {
        let center_like = |o: Outcome| matches!(o, Outcome::Center | Outcome::CenterByEssentialSingularity);
        let first = decisive[0].clone();
        if decisive.iter().any(|v| center_like(v.outcome) != center_like(first.outcome)) {
            Verdict::new(Outcome::Undecided, "weights disagree")
        } else {
            first
        }
    };
    Ok(ProcedureReport { weights: analyses, verdict })
}

#[cfg(test)]
mod tests;
