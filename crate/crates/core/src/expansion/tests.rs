use super::*;
use crate::fixtures::*;
use crate::polar::cartesian_iif_to_polar;
use std::f64::consts::PI;

fn linear(l: Rat) -> PolarField {
    blow_up(&linear_rotation(&l), (1, 1)).unwrap()
}

#[test]
fn xi_of_linear_rotation() {
    for (n, d) in [(0, 1), (1, 10), (-3, 7)] {
        let xi = xi_pq(&linear(rat(n, d))).unwrap();
        let want = 2.0 * PI * n as f64 / d as f64;
        assert!((xi.value - want).abs() < 1e-12, "{} vs {want}", xi.value);
        let st = leading_constraint(&xi, 1e-10);
        assert_eq!(st, if n == 0 { MStatus::Free } else { MStatus::Fixed(1) });
    }
}

#[test]
fn step_operator_of_linear_rotation() {
    let z = linear(rat(1, 3));
    for m in -2..5 {
        let (g, p, _) = step_operator(&z, Direction::Ascending, m).unwrap();
        assert_eq!(g, TrigPoly::one());
        assert_eq!(p, TrigPoly::constant(rat(m - 1, 3)));
    }
}

#[test]
fn scan_prefers_one_then_positive() {
    assert_eq!(scan_order(-2, 3), vec![1, 2, 3, 0, -1, -2]);
    assert_eq!(scan_order(2, 4), vec![2, 3, 4]);
    assert_eq!(scan_order(-1, 0), vec![0, -1]);
}

#[test]
fn linear_verdicts() {
    let cfg = ExpansionConfig::default();
    let c = run_procedure(&linear_rotation(&rat(0, 1)), &cfg).unwrap();
    assert_eq!(c.verdict.outcome, Outcome::Center);
    let f = run_procedure(&linear_rotation(&rat(1, 10)), &cfg).unwrap();
    assert_eq!(f.verdict.outcome, Outcome::Focus);
    let cf = f.weights[0].closed_form.as_ref().unwrap();
    assert!(cf.verified);
    // V = ρ², the return map is ρ ↦ e^{2π l} ρ
    let Some(EtaReading::Focus { log_eta1 }) = cf.reading else { panic!("{:?}", cf.reading) };
    assert!((log_eta1 - 2.0 * PI / 10.0).abs() < 1e-8, "{log_eta1}");
}

#[test]
fn ascending_series_is_proportional_to_known_factor() {
    let x = octic_iif_family(&rat(2, 1), &rat(1, 1), &rat(1, 3), &rat(1, 1));
    let z = blow_up(&x, (1, 1)).unwrap();
    let known = cartesian_iif_to_polar(&octic_iif(), &z).unwrap();
    let lo = known.leading_exponent().unwrap();
    let cfg = ExpansionConfig { max_order: 4, ..Default::default() };
    let st = expand(&z, Direction::Ascending, lo, MStatus::Fixed(lo), &cfg);
    let got = st.closed_form_series().expect("exact coefficients");
    let lead = got.coeff(lo);
    assert!(!lead.is_zero());
    // fix the scale from one harmonic of the leading coefficient
    let (k, c) = known.coeff(lo).terms().map(|(k, c)| (*k, c.clone())).next().unwrap();
    let s = c / lead.coeff(k);
    assert!(st.coefficients.len() >= 5);
    for j in lo..lo + 5 {
        assert_eq!(got.coeff(j).scale(&s), known.coeff(j), "coefficient {j}");
    }
}

