//! Input language, orchestration of the full analysis and reports.

mod syntax;
mod text;

pub use syntax::{parse_program, Expr, InputError, Pos, Program, Stmt, KEYWORDS};

use crate::expansion::{run_procedure, ExpansionConfig, ObstructionRecord, Outcome, ProcedureMode, Verdict, WeightAnalysis};
use crate::newton::{compute_diagram, Poly2, PolyVectorField};
use crate::poincare::{eta_from_g, eta_from_oracle, g_of_r, verify_iif, Classification, EtaReading, GValue, OracleConfig};
use crate::polar::{blow_up, cartesian_iif_to_polar};
use crate::Rat;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

pub const SCHEMA: &str = "monodromic/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Auto,
    AscendingOnly,
    DescendingOnly,
    OracleOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sweep {
    pub name: String,
    #[serde(serialize_with = "ser_rat")]
    pub from: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub to: Rat,
    pub steps: u32,
}

impl Sweep {
    /// `steps` equally spaced values including both ends; one step gives
    /// `from` alone, zero steps an empty sweep.
    pub fn values(&self) -> Vec<Rat> {
        match self.steps {
            0 => vec![],
            1 => vec![self.from.clone()],
            n => {
                let h = (&self.to - &self.from) / Rat::from_integer((n - 1).into());
                (0..n).map(|k| &self.from + &h * Rat::from_integer(k.into())).collect()
            }
        }
    }
}

/// Tolerances, caps and optional stages.
#[derive(Clone, Debug)]
pub struct Settings {
    pub expansion: ExpansionConfig,
    /// `None` skips the return-map oracle outside `Mode::OracleOnly`
    pub oracle: Option<OracleConfig>,
    /// `|G|` below this reads as a center
    pub g_tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { expansion: ExpansionConfig::default(), oracle: Some(OracleConfig::default()), g_tol: 1e-8 }
    }
}

#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub source: String,
    pub program: Program,
    pub dx: Expr,
    pub dy: Expr,
    pub params: BTreeMap<String, Rat>,
    /// the field at the bound parameters; `None` when a sweep supplies one
    pub field: Option<PolyVectorField>,
    pub weights: Option<(u32, u32)>,
    pub mode: Mode,
    pub closed_form: Option<Expr>,
    pub sweep: Option<Sweep>,
    pub settings: Settings,
}

fn eval(e: &Expr, env: &BTreeMap<String, Rat>, pos: Pos) -> Result<Poly2, InputError> {
    Ok(match e {
        Expr::Int(n) => Poly2::constant(Rat::from_integer(n.clone())),
        Expr::Var(v) if v == "x" => Poly2::x(),
        Expr::Var(v) if v == "y" => Poly2::y(),
        Expr::Var(v) => match env.get(v) {
            Some(r) => Poly2::constant(r.clone()),
            None => return Err(InputError::Unbound { name: v.clone(), pos }),
        },
        Expr::Neg(a) => eval(a, env, pos)?.neg(),
        Expr::Add(a, b) => eval(a, env, pos)?.add(&eval(b, env, pos)?),
        Expr::Sub(a, b) => eval(a, env, pos)?.sub(&eval(b, env, pos)?),
        Expr::Mul(a, b) => eval(a, env, pos)?.mul(&eval(b, env, pos)?),
        Expr::Div(a, b) => {
            let d = eval(b, env, pos)?;
            if d.terms().any(|(&(i, j), _)| i + j > 0) {
                return Err(InputError::NonPolynomial { pos, message: format!("division by `{b}`, which depends on x or y") });
            }
            let c = d.coeff(0, 0);
            if c.is_zero() {
                return Err(InputError::NonPolynomial { pos, message: format!("division by `{b}`, which is zero") });
            }
            eval(a, env, pos)?.scale(&(Rat::from_integer(1.into()) / c))
        }
        Expr::Pow(a, n) => {
            if *n > 64 {
                return Err(InputError::NonPolynomial { pos, message: format!("exponent {n} exceeds 64") });
            }
            eval(a, env, pos)?.pow(*n)
        }
    })
}

/// Parses and validates an input text.
pub fn parse_input(text: &str) -> Result<ProblemSpec, InputError> {
    let program = parse_program(text)?;
    let end = Pos { line: text.lines().count().max(1), col: 1, offset: text.len() };
    let mut dx = None;
    let mut dy = None;
    let mut v = None;
    let mut weights = None;
    let mut sweep: Option<(Sweep, Pos)> = None;
    let mut params = BTreeMap::new();
    let dup = |pos: Pos, what: &str| InputError::Invalid { pos, message: format!("{what} given twice") };
    for (s, &pos) in program.stmts.iter().zip(&program.positions) {
        match s {
            Stmt::Dx(e) if dx.is_none() => dx = Some((e.clone(), pos)),
            Stmt::Dy(e) if dy.is_none() => dy = Some((e.clone(), pos)),
            Stmt::V(e) if v.is_none() => v = Some((e.clone(), pos)),
            Stmt::Weights(p, q) if weights.is_none() => {
                if *p == 0 || *q == 0 {
                    return Err(InputError::Invalid { pos, message: "weights must be positive".into() });
                }
                weights = Some((*p, *q));
            }
            Stmt::Sweep { name, from, to, steps } if sweep.is_none() => {
                sweep = Some((Sweep { name: name.clone(), from: from.clone(), to: to.clone(), steps: *steps }, pos))
            }
            Stmt::Param(n, r) => {
                if params.insert(n.clone(), r.clone()).is_some() {
                    return Err(dup(pos, &format!("parameter `{n}`")));
                }
            }
            Stmt::Dx(_) => return Err(dup(pos, "dx")),
            Stmt::Dy(_) => return Err(dup(pos, "dy")),
            Stmt::V(_) => return Err(dup(pos, "V")),
            Stmt::Weights(..) => return Err(dup(pos, "weights")),
            Stmt::Sweep { .. } => return Err(dup(pos, "sweep")),
        }
    }
    let (dx, dx_pos) = dx.ok_or(InputError::Invalid { pos: end, message: "missing `dx = …;`".into() })?;
    let (dy, dy_pos) = dy.ok_or(InputError::Invalid { pos: end, message: "missing `dy = …;`".into() })?;
    let mut env = params.clone();
    if let Some((sw, pos)) = &sweep {
        if params.contains_key(&sw.name) {
            return Err(InputError::Invalid { pos: *pos, message: format!("`{}` is both bound and swept", sw.name) });
        }
        env.insert(sw.name.clone(), sw.from.clone());
    }
    let p = eval(&dx, &env, dx_pos)?;
    let q = eval(&dy, &env, dy_pos)?;
    if let Some((e, pos)) = &v {
        eval(e, &env, *pos)?;
    }
    let field = if sweep.is_some() {
        None
    } else {
        let x = PolyVectorField::new(p, q).map_err(|e| InputError::Invalid { pos: dx_pos, message: e.to_string() })?;
        Some(x.with_params(params.clone()))
    };
    let mut settings = Settings::default();
    settings.expansion.weights = weights;
    Ok(ProblemSpec {
        source: text.to_string(),
        program,
        dx,
        dy,
        params,
        field,
        weights,
        mode: Mode::Auto,
        closed_form: v.map(|x| x.0),
        sweep: sweep.map(|x| x.0),
        settings,
    })
}

impl ProblemSpec {
    pub fn set_mode(&mut self, mode: Mode) {
        self.mode = mode;
        self.settings.expansion.mode = match mode {
            Mode::AscendingOnly => ProcedureMode::AscendingOnly,
            Mode::DescendingOnly => ProcedureMode::DescendingOnly,
            Mode::Auto | Mode::OracleOnly => ProcedureMode::Auto,
        };
    }
    pub fn set_weights(&mut self, w: Option<(u32, u32)>) {
        self.weights = w;
        self.settings.expansion.weights = w;
    }
    fn env(&self, sample: Option<&Rat>) -> BTreeMap<String, Rat> {
        let mut env = self.params.clone();
        if let (Some(sw), Some(v)) = (&self.sweep, sample) {
            env.insert(sw.name.clone(), v.clone());
        }
        env
    }
    /// The vector field with the sweep parameter (if any) set to `sample`.
    pub fn field_at(&self, sample: Option<&Rat>) -> Result<PolyVectorField, String> {
        let env = self.env(sample);
        let p = eval(&self.dx, &env, Pos::default()).map_err(|e| e.to_string())?;
        let q = eval(&self.dy, &env, Pos::default()).map_err(|e| e.to_string())?;
        Ok(PolyVectorField::new(p, q).map_err(|e| e.to_string())?.with_params(env))
    }
}

fn ser_rat<S: serde::Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// A numeric value with the method that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measured {
    pub value: f64,
    pub error_estimate: f64,
    pub method: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictReport {
    pub verdict: &'static str,
    pub basis: String,
    pub conditional: bool,
}

impl From<&Verdict> for VerdictReport {
    fn from(v: &Verdict) -> Self {
        VerdictReport { verdict: outcome_name(v.outcome), basis: v.basis.clone(), conditional: v.conditional }
    }
}

pub fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Center => "center",
        Outcome::Focus => "focus",
        Outcome::MaximalOrderFocusCandidate => "maximal-order-focus-candidate",
        Outcome::CenterByEssentialSingularity => "center-by-essential-singularity",
        Outcome::Undecided => "undecided",
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub weights: (u32, u32),
    pub log_eta1: Measured,
    pub classification: Classification,
    pub ladder: Vec<f64>,
}

/// Check of the user-supplied `V` at one weight.
#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormCheck {
    pub weights: (u32, u32),
    pub leading_exponent: Option<i64>,
    pub verified: bool,
    pub error: Option<String>,
    pub g: Option<GValue>,
    pub reading: Option<EtaReading>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleParam {
    pub name: String,
    pub exact: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleReport {
    pub parameter: Option<SampleParam>,
    pub verdict: Option<VerdictReport>,
    pub weights: Vec<WeightAnalysis>,
    pub oracle: Option<OracleReport>,
    pub closed_form: Vec<ClosedFormCheck>,
    pub error: Option<String>,
}

impl SampleReport {
    /// First obstruction recorded, scanning weights and attempts in order.
    pub fn leading_obstruction(&self) -> Option<&ObstructionRecord> {
        self.weights.iter().flat_map(|w| &w.attempts).flat_map(|a| &a.obstructions).next()
    }
    /// `log η₁` from the oracle, else from an integral-invariant reading.
    pub fn log_eta1(&self) -> Option<Measured> {
        if let Some(o) = &self.oracle {
            if o.log_eta1.value.is_finite() {
                return Some(o.log_eta1.clone());
            }
        }
        let from_cf = self.closed_form.iter().filter_map(|c| Some((c.reading?, c.g.as_ref()?.spread)));
        let from_engine = self
            .weights
            .iter()
            .filter_map(|w| w.closed_form.as_ref())
            .filter_map(|c| Some((c.reading?, c.g.as_ref()?.spread)));
        from_cf.chain(from_engine).find_map(|(r, spread)| match r {
            EtaReading::Focus { log_eta1 } => Some(Measured { value: log_eta1, error_estimate: spread, method: "integral-invariant" }),
            EtaReading::Center => Some(Measured { value: 0.0, error_estimate: spread, method: "integral-invariant" }),
            EtaReading::FocusOfMaximalOrder { .. } => None,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub value: String,
    pub verdict: Option<&'static str>,
    pub obstruction: Option<ObstructionBrief>,
    pub log_eta1: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionBrief {
    pub kind: crate::expansion::ObstructionKind,
    pub index: i64,
    pub value: f64,
    pub error_estimate: f64,
}

/// Consecutive sweep samples between which `quantity` changes sign.
#[derive(Clone, Debug, Serialize)]
pub struct Bracket {
    pub quantity: &'static str,
    pub lower: String,
    pub upper: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldSummary {
    pub dx: String,
    pub dy: String,
    pub params: BTreeMap<String, String>,
    pub closed_form: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub field: FieldSummary,
    pub mode: Mode,
    pub weights_override: Option<(u32, u32)>,
    pub sweep: Option<Sweep>,
    pub samples: Vec<SampleReport>,
    pub table: Vec<SweepRow>,
    pub brackets: Vec<Bracket>,
}

impl Report {
    /// Every sample ended in an error (and there was at least one).
    pub fn all_failed(&self) -> bool {
        !self.samples.is_empty() && self.samples.iter().all(|s| s.error.is_some())
    }
}

fn oracle_report(x: &PolyVectorField, w: (u32, u32), cfg: &OracleConfig) -> Result<OracleReport, String> {
    let z = blow_up(x, w).map_err(|e| e.to_string())?;
    let est = eta_from_oracle(&z, cfg);
    Ok(OracleReport {
        weights: w,
        log_eta1: Measured { value: est.log_eta1, error_estimate: est.uncertainty, method: "return-map-richardson" },
        classification: est.classification,
        ladder: est.ladder,
    })
}

fn check_closed_form(x: &PolyVectorField, v: &Poly2, w: (u32, u32), settings: &Settings) -> ClosedFormCheck {
    let mut out = ClosedFormCheck { weights: w, leading_exponent: None, verified: false, error: None, g: None, reading: None };
    let run = |out: &mut ClosedFormCheck| -> Result<(), String> {
        let z = blow_up(x, w).map_err(|e| e.to_string())?;
        let s = cartesian_iif_to_polar(v, &z).map_err(|e| e.to_string())?;
        out.leading_exponent = s.leading_exponent();
        verify_iif(&z, &s).map_err(|e| e.to_string())?;
        out.verified = true;
        let g = g_of_r(&z, &s, &settings.expansion.radii).map_err(|e| e.to_string())?;
        out.reading = eta_from_g(&z, &s, g.value, settings.g_tol);
        out.g = Some(g);
        Ok(())
    };
    if let Err(e) = run(&mut out) {
        out.error = Some(e);
    }
    out
}

fn analyze_sample(spec: &ProblemSpec, sample: Option<&Rat>) -> SampleReport {
    let parameter = match (&spec.sweep, sample) {
        (Some(sw), Some(v)) => Some(SampleParam { name: sw.name.clone(), exact: v.to_string(), value: v.to_f64().unwrap_or(f64::NAN) }),
        _ => None,
    };
    let mut rep = SampleReport { parameter, verdict: None, weights: vec![], oracle: None, closed_form: vec![], error: None };
    let x = match spec.field_at(sample) {
        Ok(x) => x,
        Err(e) => {
            rep.error = Some(e);
            return rep;
        }
    };
    let weights = match spec.weights {
        Some(w) => vec![w],
        None => match compute_diagram(&x) {
            Ok(d) => d.weights,
            Err(e) => {
                rep.error = Some(e.to_string());
                return rep;
            }
        },
    };
    if spec.mode != Mode::OracleOnly {
        match run_procedure(&x, &spec.settings.expansion) {
            Ok(r) => {
                rep.verdict = Some(VerdictReport::from(&r.verdict));
                rep.weights = r.weights;
            }
            Err(e) => rep.error = Some(e.to_string()),
        }
    }
    let oracle = match (spec.mode, &spec.settings.oracle) {
        (Mode::OracleOnly, cfg) => Some(cfg.unwrap_or_default()),
        (_, cfg) => *cfg,
    };
    if let (Some(cfg), Some(&w)) = (oracle, weights.first()) {
        match oracle_report(&x, w, &cfg) {
            Ok(o) => rep.oracle = Some(o),
            Err(e) => {
                if rep.error.is_none() && spec.mode == Mode::OracleOnly {
                    rep.error = Some(e);
                }
            }
        }
    }
    if let Some(e) = &spec.closed_form {
        match eval(e, &spec.env(sample), Pos::default()) {
            Ok(v) => rep.closed_form = weights.iter().map(|&w| check_closed_form(&x, &v, w, &spec.settings)).collect(),
            Err(err) => rep.error = Some(err.to_string()),
        }
    }
    rep
}

fn row(s: &SampleReport) -> SweepRow {
    SweepRow {
        value: s.parameter.as_ref().map_or_else(String::new, |p| p.exact.clone()),
        verdict: s.verdict.as_ref().map(|v| v.verdict),
        obstruction: s.leading_obstruction().map(|o| ObstructionBrief {
            kind: o.kind,
            index: o.index,
            value: o.value,
            error_estimate: o.error_estimate,
        }),
        log_eta1: s.log_eta1().map(|m| m.value),
        error: s.error.clone(),
    }
}

fn brackets(rows: &[SweepRow]) -> Vec<Bracket> {
    let mut out = Vec::new();
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let changes = |x: Option<f64>, y: Option<f64>| matches!((x, y), (Some(x), Some(y)) if x * y < 0.0);
        if changes(a.log_eta1, b.log_eta1) {
            out.push(Bracket { quantity: "log_eta1", lower: a.value.clone(), upper: b.value.clone() });
        }
        let ob = |r: &SweepRow| r.obstruction.as_ref().map(|o| (o.kind, o.index, o.value));
        if let (Some(x), Some(y)) = (ob(a), ob(b)) {
            if x.0 == y.0 && x.1 == y.1 && x.2 * y.2 < 0.0 {
                out.push(Bracket { quantity: "obstruction", lower: a.value.clone(), upper: b.value.clone() });
            }
        }
    }
    out
}

/// Runs every sample on the global rayon pool.
pub fn run(spec: &ProblemSpec) -> Report {
    let samples: Vec<SampleReport> = match &spec.sweep {
        None => vec![analyze_sample(spec, None)],
        Some(sw) => sw.values().par_iter().map(|v| analyze_sample(spec, Some(v))).collect(),
    };
    let table: Vec<SweepRow> = if spec.sweep.is_some() { samples.iter().map(row).collect() } else { vec![] };
    let brackets = brackets(&table);
    Report {
        schema: SCHEMA,
        field: FieldSummary {
            dx: spec.dx.to_string(),
            dy: spec.dy.to_string(),
            params: spec.params.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
            closed_form: spec.closed_form.as_ref().map(|e| e.to_string()),
        },
        mode: spec.mode,
        weights_override: spec.weights,
        sweep: spec.sweep.clone(),
        samples,
        table,
        brackets,
    }
}

/// Runs on a dedicated pool of `jobs` workers.
pub fn run_with_jobs(spec: &ProblemSpec, jobs: usize) -> Result<Report, rayon::ThreadPoolBuildError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    Ok(pool.install(|| run(spec)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

pub fn emit_report(r: &Report, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s.into_bytes()
        }
        ReportFormat::Text => text::render(r).into_bytes(),
    }
}

#[cfg(test)]
mod tests;
