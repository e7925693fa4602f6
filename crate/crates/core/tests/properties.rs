use monodromic::cli::{parse_program, Expr, Program, Stmt};
use monodromic::expansion::{forcing, step_operator, Affine, Direction};
use monodromic::fixtures::{octic_iif, octic_iif_family};
use monodromic::newton::{compute_diagram, quasi_degree, Poly2, PolyVectorField};
use monodromic::polar::{blow_up, cartesian_iif_to_polar, pde_residual, LaurentSeries};
use monodromic::residue_pv::{contour_integral_z, find_roots_poly, pv_contour_integral, quadrature_rational, ContourMode, RationalZ, RootConfig};
use monodromic::trigfun::{gauss, laurent_to_trig, rat, trig_to_laurent, ZPoly};
use monodromic::{Complex64, PolarField, Rat, RationalTrig, TrigPoly};
use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn trig(max_h: i64) -> impl Strategy<Value = TrigPoly> {
    proptest::collection::vec((small_rat(), small_rat()), 1..=(max_h as usize + 1)).prop_map(|cs| {
        cs.iter().enumerate().fold(TrigPoly::zero(), |acc, (k, (a, b))| {
            let k = k as i64;
            let t = TrigPoly::cos_k(k).scale_rat(a);
            let t = if k > 0 { t.add(&TrigPoly::sin_k(k).scale_rat(b)) } else { t };
            acc.add(&t)
        })
    })
}

/// Complex coefficients in the exponential basis; generally not real.
fn complex_trig(max_h: i64) -> impl Strategy<Value = TrigPoly> {
    proptest::collection::vec(((-max_h..=max_h), small_rat(), small_rat()), 1..8)
        .prop_map(|ts| TrigPoly::from_terms(ts.into_iter().map(|(k, a, b)| (k, gauss(a, b)))))
}

fn l1(t: &TrigPoly) -> f64 {
    t.terms().map(|(_, c)| monodromic::trigfun::gauss_to_c64(c).norm()).sum()
}

fn poly2(max_deg: u32) -> impl Strategy<Value = Poly2> {
    proptest::collection::vec(((0..=max_deg), (0..=max_deg), -4i64..=4), 1..6).prop_map(move |ts| {
        Poly2::from_terms(ts.into_iter().filter(|(i, j, _)| i + j >= 1 && i + j <= max_deg).map(|(i, j, c)| ((i, j), rat(c, 1))))
    })
}

// ---------------------------------------------------------------------------
// trigonometric polynomials

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laurent_round_trip(t in complex_trig(12)) {
        prop_assert_eq!(laurent_to_trig(&trig_to_laurent(&t)), t);
    }

    #[test]
    fn laurent_homomorphism(a in complex_trig(6), b in complex_trig(6)) {
        prop_assert_eq!(trig_to_laurent(&a.mul(&b)), trig_to_laurent(&a).mul(&trig_to_laurent(&b)));
    }

    #[test]
    fn derivative_matches_finite_difference(t in trig(6), phis in proptest::collection::vec(0.0..2.0 * PI, 64)) {
        let d = t.differentiate();
        let h = 1e-5;
        for p in phis {
            let fd = (t.eval(p + h) - t.eval(p - h)) / (2.0 * h);
            prop_assert!((fd - d.eval(p)).abs() < 1e-8 * (1.0 + d.eval(p).abs()).max(t.eval(p).abs()), "{} vs {}", fd, d.eval(p));
        }
    }

    #[test]
    fn real_polynomials_evaluate_real(t in trig(8), num in 0i64..24) {
        prop_assert!(t.is_real_exact());
        let z = t.eval_complex(PI * num as f64 / 12.0);
        prop_assert!(z.im.abs() < 1e-14 * (1.0 + z.re.abs()));
        let w = t.eval_complex(0.123);
        prop_assert!(w.im.abs() < 1e-14 * (1.0 + w.re.abs()));
    }

    #[test]
    fn product_rule(a in trig(4), b in trig(4)) {
        let lhs = a.mul(&b).differentiate();
        let rhs = a.differentiate().mul(&b).add(&a.mul(&b.differentiate()));
        prop_assert_eq!(lhs, rhs);
    }
}

// ---------------------------------------------------------------------------
// principal values

fn gauss_small() -> impl Strategy<Value = (i64, i64)> {
    (-5i64..=5, -5i64..=5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Denominators with simple zeros at ±arccos(c) and a second factor without
    /// zeros on the circle.
    #[test]
    fn pv_residues_match_quadrature(num in trig(6), c in -9i64..=9, k in 2i64..=5, h in 1i64..=3) {
        prop_assume!(!num.is_zero());
        let den = TrigPoly::cos().sub(&TrigPoly::constant(rat(c, 10))).mul(&TrigPoly::int(k).add(&TrigPoly::cos_k(h)));
        let Ok(w) = RationalTrig::new(num, den) else { return Ok(()) };
        let a = pv_contour_integral(&w).unwrap();
        let b = quadrature_rational(&w, ContourMode::Principal).unwrap();
        prop_assert!((a.value.re - b.value.re).abs() < 1e-6 * (1.0 + a.value.re.abs()), "{} vs {}", a.value.re, b.value.re);
        prop_assert!(a.value.im.abs() < 1e-9);
    }

    #[test]
    fn residue_theorem(poles in proptest::collection::vec(gauss_small(), 2..5), num in proptest::collection::vec(gauss_small(), 1..3)) {
        // poles z_k = (a + b i)/8, strictly inside; numerator degree ≤ #poles − 2
        let zs: Vec<(Rat, Rat)> = poles.iter().map(|&(a, b)| (rat(a, 8), rat(b, 8))).collect();
        let zf: Vec<Complex64> = poles.iter().map(|&(a, b)| Complex64::new(a as f64 / 8.0, b as f64 / 8.0)).collect();
        for i in 0..zf.len() {
            for j in 0..i {
                prop_assume!((zf[i] - zf[j]).norm() > 1e-9);
            }
        }
        let nc: Vec<(i64, i64)> = num.into_iter().take(zs.len() - 1).collect();
        let nump = ZPoly::new(nc.iter().map(|&(a, b)| gauss(rat(a, 1), rat(b, 1))).collect());
        prop_assume!(!nump.is_zero());
        let den = zs.iter().fold(ZPoly::one(), |acc, (a, b)| acc.mul(&ZPoly::new(vec![gauss(-a.clone(), -b.clone()), gauss(rat(1, 1), rat(0, 1))])));
        let f = RationalZ::new(nump.clone(), den);
        let got = contour_integral_z(&f, ContourMode::Principal).unwrap().value;
        let n_at = |z: Complex64| nc.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &(a, b)| acc * z + Complex64::new(a as f64, b as f64));
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, zk) in zf.iter().enumerate() {
            let d: Complex64 = zf.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, zj)| zk - zj).product();
            sum += n_at(*zk) / d;
        }
        let expect = Complex64::new(0.0, 2.0 * PI) * sum;
        // periodic trapezoid rule on the circle
        let n = 4096;
        let quad: Complex64 = (0..n)
            .map(|k| {
                let z = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
                f.eval(z) * Complex64::new(0.0, 1.0) * z
            })
            .sum::<Complex64>()
            * (2.0 * PI / n as f64);
        prop_assert!((got - expect).norm() < 1e-8 * (1.0 + expect.norm()), "{} vs {}", got, expect);
        prop_assert!((quad - expect).norm() < 1e-6 * (1.0 + expect.norm()), "{} vs {}", quad, expect);
    }

    #[test]
    fn roots_are_certified(cs in proptest::collection::vec(gauss_small(), 2..14)) {
        let p = ZPoly::new(cs.iter().map(|&(a, b)| gauss(rat(a, 1), rat(b, 1))).collect());
        prop_assume!(p.degree().unwrap_or(0) >= 1 && p.squarefree().len() == 1 && p.squarefree()[0].1 == 1);
        let rs = find_roots_poly(&p, &RootConfig::default()).unwrap();
        let scale = p.max_abs();
        let cs = p.to_c64();
        for r in &rs.roots {
            let z = r.location;
            let res = p.eval(z).norm();
            // absolute bound where residues are taken; relative backward error everywhere
            if z.norm() <= 2.0 {
                prop_assert!(res < 1e-10 * scale, "|p({})| = {}", z, res);
            }
            let mag: f64 = cs.iter().enumerate().map(|(k, c)| c.norm() * z.norm().powi(k as i32)).sum();
            prop_assert!(res <= 1e-13 * mag, "backward error at {}: {}", z, res / mag);
        }
        prop_assert_eq!(rs.degree(), p.degree().unwrap());
    }
}

// ---------------------------------------------------------------------------
// Newton diagram and blow-up

fn field() -> impl Strategy<Value = PolyVectorField> {
    (poly2(6), poly2(6)).prop_filter_map("zero field", |(p, q)| PolyVectorField::new(p, q).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diagram_weights_coprime_and_ordered(x in field()) {
        let Ok(d) = compute_diagram(&x) else { return Ok(()) };
        for &(p, q) in &d.weights {
            prop_assert_eq!(p.gcd(&q), 1);
        }
        let ratios: Vec<f64> = d.edges.iter().map(|e| e.q as f64 / e.p as f64).collect();
        let diffs: Vec<f64> = ratios.windows(2).map(|w| w[1] - w[0]).collect();
        prop_assert!(diffs.iter().all(|d| *d > 0.0) || diffs.iter().all(|d| *d < 0.0), "{:?}", ratios);
    }

    #[test]
    fn blow_up_consistency(x in field(), w in prop::sample::select(vec![(1u32, 1u32), (1, 2), (1, 3), (2, 3)])) {
        let Ok(z) = blow_up(&x, w) else { return Ok(()) };
        prop_assert_eq!(z.removed_power, quasi_degree(&x, w).unwrap());
        prop_assert!(z.r_at(0).is_zero());
        if w == (1, 1) {
            let n = x.degree() as usize - z.removed_power as usize;
            prop_assert!(z.g.len() <= n, "G has {} grades, degree {}", z.g.len(), x.degree());
            prop_assert!(z.r.len() <= n + 1);
        }
        // orbit equation: dρ/dφ from the Cartesian field equals R/Θ
        let (p, q) = (w.0 as i32, w.1 as i32);
        for k in 0..20 {
            let phi = 0.3 + 0.31 * k as f64;
            let rho = 10f64.powf(-1.0 - 3.0 * (k as f64 / 20.0));
            let (c, s) = (phi.cos(), phi.sin());
            let (xd, yd) = x.eval(rho.powi(p) * c, rho.powi(q) * s);
            let num = rho * (xd * rho.powi(q) * c + yd * rho.powi(p) * s);
            let den = p as f64 * c * yd * rho.powi(p) - q as f64 * s * xd * rho.powi(q);
            let (rr, th) = (z.radial(phi, rho), z.theta(phi, rho));
            if den.abs() < 1e-200 || th.abs() < 1e-300 {
                continue;
            }
            let (a, b) = (num / den, rr / th);
            // harmonic-basis evaluation loses digits where the grades nearly cancel
            let cond = |ts: &[TrigPoly], v: f64| ts.iter().enumerate().map(|(k, t)| l1(t) * rho.powi(k as i32)).sum::<f64>() / v.abs();
            let tol = 1e-10 + 1e-15 * (cond(&z.g, th) + cond(&z.r, rr));
            prop_assert!((a - b).abs() <= tol * a.abs().max(b.abs()) + 1e-300, "φ = {}, ρ = {}: {} vs {}", phi, rho, a, b);
        }
    }

    #[test]
    fn known_factor_has_zero_residual(l1 in 1i64..6, l2 in -4i64..5, mu in small_rat(), aa in small_rat()) {
        let x = octic_iif_family(&rat(l1, 1), &rat(l2, 1), &mu, &aa);
        prop_assume!(x.iif_residual(&octic_iif()).is_zero());
        let Ok(z) = blow_up(&x, (1, 1)) else { return Ok(()) };
        let v = cartesian_iif_to_polar(&octic_iif(), &z).unwrap();
        let lo = v.leading_exponent().unwrap();
        let res = pde_residual(&z, &v, lo..=v.top_exponent().unwrap());
        prop_assert!(res.values().all(TrigPoly::is_zero));
    }
}

// ---------------------------------------------------------------------------
// expansion recursion

fn polar_field() -> impl Strategy<Value = PolarField> {
    (1usize..4).prop_flat_map(|n| {
        (proptest::collection::vec(trig(3), n), proptest::collection::vec(trig(3), n + 1)).prop_map(|(g, r)| PolarField::from_parts(g, r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recursion_matches_residual(z in polar_field(), j in -3i64..5, descending in any::<bool>(), cs in proptest::collection::vec(trig(2), 8)) {
        let dir = if descending { Direction::Descending } else { Direction::Ascending };
        let Ok((g, p, order)) = step_operator(&z, dir, j) else { return Ok(()) };
        let n = z.top_index() as i64;
        let span: Vec<i64> = if descending { (j..=j + n).collect() } else { (j - n - 1..=j).collect() };
        let coeffs: BTreeMap<i64, TrigPoly> = span.iter().zip(cs.iter().cycle()).map(|(k, t)| (*k, t.clone())).collect();
        let others = coeffs.iter().filter(|(k, _)| **k != j).map(|(k, t)| (*k, Affine::constant(t.clone()))).collect();
        let vj = &coeffs[&j];
        let lhs = g.mul(&vj.differentiate()).add(&p.mul(vj)).add(&forcing(&z, &others, order).base);
        let full = pde_residual(&z, &LaurentSeries::new(coeffs.clone()), order..=order);
        prop_assert_eq!(lhs, full.get(&order).cloned().unwrap_or_else(TrigPoly::zero));
    }
}

// ---------------------------------------------------------------------------
// input language

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..1000).prop_map(|n| Expr::Int(BigInt::from(n))),
        prop::sample::select(vec!["x", "y", "a", "k_1"]).prop_map(|s| Expr::Var(s.to_string())),
    ];
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            (inner, 0u32..5).prop_map(|(a, n)| Expr::Pow(Box::new(a), n)),
        ]
    })
}

fn stmt() -> impl Strategy<Value = Stmt> {
    prop_oneof![
        expr().prop_map(Stmt::Dx),
        expr().prop_map(Stmt::Dy),
        expr().prop_map(Stmt::V),
        (prop::sample::select(vec!["a", "k_1", "mu2"]), small_rat()).prop_map(|(n, r)| Stmt::Param(n.into(), r)),
        (1u32..9, 1u32..9).prop_map(|(p, q)| Stmt::Weights(p, q)),
        (small_rat(), small_rat(), 0u32..20).prop_map(|(from, to, steps)| Stmt::Sweep { name: "a".into(), from, to, steps }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_parse_round_trip(stmts in proptest::collection::vec(stmt(), 0..8)) {
        let p = Program { positions: vec![Default::default(); stmts.len()], stmts };
        let text = p.to_string();
        let q = parse_program(&text).unwrap();
        prop_assert_eq!(&q, &p);
        prop_assert_eq!(q.to_string(), text);
    }

    #[test]
    fn parser_never_panics(s in "[-+*/^();=, xyadpramwehtsV0-9\n]{0,60}") {
        let _ = parse_program(&s);
    }
}
