//! Human-readable report: field, then per weight ξ, the coefficient chain
//! and the verdict, then oracle and closed-form checks.

use super::{Report, SampleReport};
use crate::expansion::{Halt, WeightAnalysis};
use std::fmt::Write;

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |v| format!("{v:.10}"))
}

fn weight(out: &mut String, w: &WeightAnalysis) {
    let _ = writeln!(out, "  weights ({}, {})", w.weights.0, w.weights.1);
    if let Some(e) = &w.error {
        let _ = writeln!(out, "    error: {e}");
    }
    if let Some(m) = &w.monodromy {
        let _ = writeln!(out, "    monodromy: omega empty {}, zero-speed curves {:?}", m.omega_empty, m.lambda_pq_risk);
    }
    if !w.characteristic_directions.is_empty() {
        let dirs: Vec<String> = w.characteristic_directions.iter().map(|a| format!("{a:.6}")).collect();
        let _ = writeln!(out, "    characteristic directions: {}", dirs.join(", "));
    }
    if let Some(x) = &w.xi {
        let quad = x.quadrature.as_ref().map(|q| q.value.re);
        let _ = writeln!(
            out,
            "    xi = {:.12} (residues {:.12} ± {:.1e}, quadrature {}){}",
            x.value,
            x.residue.value.re,
            x.residue.error_estimate,
            opt(quad),
            x.exact_over_pi.as_ref().map_or_else(String::new, |e| format!(", exactly ({e})·pi"))
        );
    }
    if let Some(m) = &w.m_status {
        let _ = writeln!(out, "    leading index: {m:?}");
    }
    for a in &w.attempts {
        let halt = match &a.halted {
            Some(Halt::Error { message }) => format!("error: {message}"),
            Some(h) => format!("{h:?}"),
            None => "running".into(),
        };
        let _ = writeln!(out, "    {:?} expansion, m = {}: {}", a.direction, a.m, halt);
        for s in &a.steps {
            let _ = write!(out, "      v[{}]: {}", s.index, s.outcome);
            if let Some(c) = &s.closed_form {
                let _ = write!(out, " = {c}");
            }
            let _ = writeln!(out);
            for c in &s.conditions {
                let _ = writeln!(out, "        condition: {c}");
            }
            if let Some(j) = &s.jump {
                let _ = writeln!(out, "        jump: residues {:.12}, quadrature {}", j.residue, opt(j.quadrature));
            }
            if !s.note.is_empty() {
                let _ = writeln!(out, "        note: {}", s.note);
            }
        }
        for o in &a.obstructions {
            let _ = writeln!(
                out,
                "      obstruction {:?} at index {}: {:.10} ± {:.1e} (residues {}, quadrature {}) {}",
                o.kind,
                o.index,
                o.value,
                o.error_estimate,
                opt(o.residue_value),
                opt(o.quadrature_value),
                o.detail
            );
        }
    }
    if let Some(c) = &w.closed_form {
        let _ = writeln!(out, "    closed form (verified {}), leading exponent {}", c.verified, c.leading_exponent);
        for (k, t) in &c.series {
            let _ = writeln!(out, "      rho^{k}: {t}");
        }
        if let Some(g) = &c.g {
            let _ = writeln!(out, "      G = {:.12} (spread {:.1e})", g.value, g.spread);
        }
        if let Some(r) = &c.reading {
            let _ = writeln!(out, "      reading: {r:?}");
        }
    }
    let _ = writeln!(out, "    verdict: {} ({})", super::outcome_name(w.verdict.outcome), w.verdict.basis);
}

fn sample(out: &mut String, s: &SampleReport) {
    if let Some(p) = &s.parameter {
        let _ = writeln!(out, "sample {} = {}", p.name, p.exact);
    }
    for w in &s.weights {
        weight(out, w);
    }
    if let Some(o) = &s.oracle {
        let _ = writeln!(
            out,
            "  oracle at weights ({}, {}): log eta1 = {:.10} ± {:.1e} ({:?})",
            o.weights.0, o.weights.1, o.log_eta1.value, o.log_eta1.error_estimate, o.classification
        );
    }
    for c in &s.closed_form {
        let _ = write!(out, "  supplied V at weights ({}, {}): verified {}", c.weights.0, c.weights.1, c.verified);
        if let Some(g) = &c.g {
            let _ = write!(out, ", G = {:.12} ± {:.1e}", g.value, g.spread);
        }
        if let Some(r) = &c.reading {
            let _ = write!(out, ", {r:?}");
        }
        if let Some(e) = &c.error {
            let _ = write!(out, ", error: {e}");
        }
        let _ = writeln!(out);
    }
    if let Some(v) = &s.verdict {
        let cond = if v.conditional { " [conditional]" } else { "" };
        let _ = writeln!(out, "  verdict: {}{} ({})", v.verdict, cond, v.basis);
    }
    if let Some(e) = &s.error {
        let _ = writeln!(out, "  error: {e}");
    }
}

pub fn render(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "schema {}", r.schema);
    let _ = writeln!(out, "dx = {}", r.field.dx);
    let _ = writeln!(out, "dy = {}", r.field.dy);
    for (k, v) in &r.field.params {
        let _ = writeln!(out, "param {k} = {v}");
    }
    if let Some(v) = &r.field.closed_form {
        let _ = writeln!(out, "V = {v}");
    }
    let _ = writeln!(out, "mode {:?}", r.mode);
    for s in &r.samples {
        sample(&mut out, s);
    }
    if let Some(sw) = &r.sweep {
        let _ = writeln!(out, "sweep {} from {} to {} ({} samples)", sw.name, sw.from, sw.to, sw.steps);
        for row in &r.table {
            let ob = row.obstruction.as_ref().map_or_else(|| "-".into(), |o| format!("{:?}@{} {:.6e}", o.kind, o.index, o.value));
            let _ = writeln!(
                out,
                "  {:>10}  {:<32}  {:<36}  log eta1 {}{}",
                row.value,
                row.verdict.unwrap_or("-"),
                ob,
                opt(row.log_eta1),
                row.error.as_ref().map_or_else(String::new, |e| format!("  error: {e}"))
            );
        }
        for b in &r.brackets {
            let _ = writeln!(out, "  sign change of {} between {} and {}", b.quantity, b.lower, b.upper);
        }
    }
    out
}
