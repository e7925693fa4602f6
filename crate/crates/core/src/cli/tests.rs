use super::*;
use crate::fixtures::sources;

#[test]
fn parses_corpus() {
    for src in [
        sources::LINEAR_CENTER,
        sources::LINEAR_FOCUS,
        sources::DEGREE7_BALANCED,
        sources::DEGREE7_SWEEP,
        sources::SEMI_HOM35_CENTER,
        sources::OCTIC_IIF,
    ] {
        let s = parse_input(src).unwrap();
        let again = parse_program(&s.program.to_string()).unwrap();
        assert_eq!(again, s.program);
    }
}

#[test]
fn fields_match_fixtures() {
    use crate::fixtures::*;
    use crate::trigfun::rat;
    let s = parse_input(sources::DEGREE7_BALANCED).unwrap();
    assert_eq!(s.field.unwrap(), degree7_family(&rat(-31, 25)));
    let s = parse_input(sources::SEMI_HOM35_CENTER).unwrap();
    assert_eq!(s.field.unwrap(), semi_hom35_line(&rat(-3, 2)).field().with_params(s.params.clone()));
    let s = parse_input(sources::OCTIC_IIF).unwrap();
    assert_eq!(s.field.unwrap(), octic_iif_family(&rat(2, 1), &rat(1, 1), &rat(1, 3), &rat(1, 1)));
    assert_eq!(s.weights, Some((1, 1)));
}

#[test]
fn syntax_error_position() {
    let e = parse_input("dx = -y +;").unwrap_err();
    assert!(matches!(e, InputError::Syntax { .. }));
    assert_eq!(e.pos(), Pos { line: 1, col: 10, offset: 9 });
    let e = parse_input("dx = -y;\ndy = x + 2.5*y;").unwrap_err();
    assert_eq!((e.pos().line, e.pos().col), (2, 11));
}

#[test]
fn semantic_errors() {
    assert!(matches!(parse_input("dx = -y + b*x; dy = x;"), Err(InputError::Unbound { ref name, .. }) if name == "b"));
    assert!(matches!(parse_input("dx = -y/x; dy = x;"), Err(InputError::NonPolynomial { .. })));
    assert!(matches!(parse_input("dx = -y^-1; dy = x;"), Err(InputError::NonPolynomial { .. })));
    assert!(matches!(parse_input("dx = -y; dy = x; dx = y;"), Err(InputError::Invalid { .. })));
    assert!(matches!(parse_input("dx = -y;"), Err(InputError::Invalid { .. })));
    assert!(matches!(parse_input("dx = 1 - y; dy = x;"), Err(InputError::Invalid { .. })));
    assert!(matches!(parse_input("dx = -y; dy = x; param x = 1;"), Err(InputError::Invalid { .. })));
}

#[test]
fn sweep_values() {
    let s = parse_input(sources::DEGREE7_SWEEP).unwrap();
    let v: Vec<String> = s.sweep.unwrap().values().iter().map(|r| r.to_string()).collect();
    assert_eq!(v, ["-1", "-1/2", "0", "1/2"]);
    assert!(s.field.is_none());
}

fn quick(src: &str) -> ProblemSpec {
    let mut s = parse_input(src).unwrap();
    s.settings.oracle = None;
    s
}

#[test]
fn linear_center_report() {
    let r = run(&quick(sources::LINEAR_CENTER));
    assert_eq!(r.samples.len(), 1);
    let v = r.samples[0].verdict.as_ref().unwrap();
    assert_eq!(v.verdict, "center");
    let json = String::from_utf8(emit_report(&r, ReportFormat::Json)).unwrap();
    let val: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(val["schema"], "monodromic/1");
    assert_eq!(val["samples"][0]["verdict"]["verdict"], "center");
    let text = String::from_utf8(emit_report(&r, ReportFormat::Text)).unwrap();
    assert!(text.contains("verdict: center"));
}

#[test]
fn empty_sweep_is_valid_json() {
    let r = run(&quick("dx = -y + l*x; dy = x + l*y; sweep l from 0 to 1 steps 0;"));
    let val: serde_json::Value = serde_json::from_slice(&emit_report(&r, ReportFormat::Json)).unwrap();
    assert_eq!(val["samples"], serde_json::json!([]));
    assert!(!r.all_failed());
}

#[test]
fn poisoned_sample_is_isolated() {
    let r = run(&quick("dx = -a*y + a*x/10; dy = a*x + a*y/10; sweep a from -1 to 1 steps 3;"));
    assert_eq!(r.samples.len(), 3);
    assert!(r.samples[0].error.is_none() && r.samples[2].error.is_none());
    assert!(r.samples[1].error.is_some());
    assert_eq!(r.samples[0].verdict.as_ref().unwrap().verdict, "focus");
    assert_eq!(r.samples[2].verdict.as_ref().unwrap().verdict, "focus");
}

#[test]
fn sweep_brackets_log_eta() {
    let r = run(&quick("dx = -y + l*x; dy = x + l*y; sweep l from -1/5 to 1/5 steps 2;"));
    assert_eq!(r.brackets.len(), 1);
    assert_eq!(r.brackets[0].quantity, "log_eta1");
    let l = r.table[0].log_eta1.unwrap();
    assert!((l + 0.4 * std::f64::consts::PI).abs() < 1e-8, "{l}");
}

#[test]
fn deterministic_json() {
    let s = quick(sources::LINEAR_FOCUS);
    let a = emit_report(&run(&s), ReportFormat::Json);
    let b = emit_report(&run_with_jobs(&s, 3).unwrap(), ReportFormat::Json);
    assert_eq!(a, b);
}
