//! Bundled vector-field families used by the examples, the CLI corpus and
//! the tests.

use crate::newton::{Poly2, PolyVectorField};
use crate::trigfun::rat;
use crate::Rat;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

fn m(c: Rat, i: u32, j: u32) -> Poly2 {
    Poly2::monomial(c, i, j)
}

fn mi(c: i64, i: u32, j: u32) -> Poly2 {
    Poly2::monomial(rat(c, 1), i, j)
}

fn named(x: PolyVectorField, params: &[(&str, &Rat)]) -> PolyVectorField {
    let map: BTreeMap<String, Rat> = params.iter().map(|(n, v)| (n.to_string(), (*v).clone())).collect();
    x.with_params(map)
}

/// `ẋ = −y + l x, ẏ = x + l y`.
pub fn linear_rotation(l: &Rat) -> PolyVectorField {
    let p = mi(-1, 0, 1).add(&m(l.clone(), 1, 0));
    let q = mi(1, 1, 0).add(&m(l.clone(), 0, 1));
    named(PolyVectorField::new(p, q).unwrap(), &[("l", l)])
}

/// `ẋ = x y² − y³ + a x⁵, ẏ = 2x⁷ − x⁴ y + 4 x y² + y³`; monodromic for
/// `32 − (1+3a)² > 0`.
pub fn degree7_family(a: &Rat) -> PolyVectorField {
    let p = mi(1, 1, 2).add(&mi(-1, 0, 3)).add(&m(a.clone(), 5, 0));
    let q = mi(2, 7, 0).add(&mi(-1, 4, 1)).add(&mi(4, 1, 2)).add(&mi(1, 0, 3));
    named(PolyVectorField::new(p, q).unwrap(), &[("a", a)])
}

/// Coefficients of the cubic–quintic semi-homogeneous family
/// `ẋ = −y³ + a21 x² y + a12 x y²`, `ẏ = x⁵ + b41 x⁴y + b32 x³y² + b23 x²y³ + b14 x y⁴ + b05 y⁵`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiHom35 {
    pub a12: Rat,
    pub a21: Rat,
    pub b41: Rat,
    pub b32: Rat,
    pub b23: Rat,
    pub b14: Rat,
    pub b05: Rat,
}

impl SemiHom35 {
    pub fn field(&self) -> PolyVectorField {
        let p = mi(-1, 0, 3).add(&m(self.a21.clone(), 2, 1)).add(&m(self.a12.clone(), 1, 2));
        let q = mi(1, 5, 0)
            .add(&m(self.b41.clone(), 4, 1))
            .add(&m(self.b32.clone(), 3, 2))
            .add(&m(self.b23.clone(), 2, 3))
            .add(&m(self.b14.clone(), 1, 4))
            .add(&m(self.b05.clone(), 0, 5));
        named(
            PolyVectorField::new(p, q).unwrap(),
            &[
                ("a12", &self.a12),
                ("a21", &self.a21),
                ("b41", &self.b41),
                ("b32", &self.b32),
                ("b23", &self.b23),
                ("b14", &self.b14),
                ("b05", &self.b05),
            ],
        )
    }
    /// Monodromy requires `a12² + 4 a21 < 0`.
    pub fn discriminant(&self) -> Rat {
        &self.a12 * &self.a12 + rat(4, 1) * &self.a21
    }
    /// The polynomial whose vanishing (for leading exponent ≠ 3) is forced by
    /// periodicity of the third coefficient.
    pub fn l1(&self) -> Rat {
        let (a, b) = (&self.a12, &self.a21);
        let p = |x: &Rat, k: usize| num_traits::pow(x.clone(), k);
        let r = |n: i64| rat(n, 1);
        p(a, 5) + r(5) * p(a, 3) * b + r(5) * a * p(b, 2) - r(2) * p(b, 5) * &self.b05 + a * p(b, 4) * &self.b14
            - p(a, 2) * p(b, 3) * &self.b23
            - r(2) * p(b, 4) * &self.b23
            + p(a, 3) * p(b, 2) * &self.b32
            + r(3) * a * p(b, 3) * &self.b32
            - p(a, 4) * b * &self.b41
            - r(4) * p(a, 2) * p(b, 2) * &self.b41
            - r(2) * p(b, 3) * &self.b41
    }
}

/// One-parameter line inside the semi-homogeneous family:
/// `ẋ = −y³ − 2x²y − 2xy²`, `ẏ = x⁵ + x⁴y + a x³y² + (2a−1)/2 x²y³ − x y⁴`.
pub fn semi_hom35_line(a: &Rat) -> SemiHom35 {
    SemiHom35 {
        a12: rat(-2, 1),
        a21: rat(-2, 1),
        b41: Rat::one(),
        b32: a.clone(),
        b23: (rat(2, 1) * a - Rat::one()) / rat(2, 1),
        b14: rat(-1, 1),
        b05: Rat::zero(),
    }
}

/// Family with the polynomial inverse integrating factor
/// `(x²+y²)(x⁶+3y²)`:
/// `ẋ = l1 (x⁶+3y²)(−y+μx) + l2 (x²+y²)(y + A x³)`,
/// `ẏ = l1 (x⁶+3y²)(x+μy) + l2 (x²+y²)(−x⁵ + 3A x² y)`.
pub fn octic_iif_family(l1: &Rat, l2: &Rat, mu: &Rat, aa: &Rat) -> PolyVectorField {
    let f = mi(1, 6, 0).add(&mi(3, 0, 2));
    let r2 = mi(1, 2, 0).add(&mi(1, 0, 2));
    let p = f
        .mul(&mi(-1, 0, 1).add(&m(mu.clone(), 1, 0)))
        .scale(l1)
        .add(&r2.mul(&mi(1, 0, 1).add(&m(aa.clone(), 3, 0))).scale(l2));
    let q = f
        .mul(&mi(1, 1, 0).add(&m(mu.clone(), 0, 1)))
        .scale(l1)
        .add(&r2.mul(&mi(-1, 5, 0).add(&m(aa * rat(3, 1), 2, 1))).scale(l2));
    named(PolyVectorField::new(p, q).unwrap(), &[("l1", l1), ("l2", l2), ("mu", mu), ("A", aa)])
}

pub fn octic_iif() -> Poly2 {
    mi(1, 2, 0).add(&mi(1, 0, 2)).mul(&mi(1, 6, 0).add(&mi(3, 0, 2)))
}

/// Input-language sources for the bundled corpus.
pub mod sources {
    pub const LINEAR_CENTER: &str = "dx = -y + l*x;\ndy = x + l*y;\nparam l = 0;\n";
    pub const LINEAR_FOCUS: &str = "dx = -y + l*x;\ndy = x + l*y;\nparam l = 1/10;\n";
    pub const DEGREE7_BALANCED: &str =
        "dx = x*y^2 - y^3 + a*x^5;\ndy = 2*x^7 - x^4*y + 4*x*y^2 + y^3;\nparam a = -31/25;\n";
    pub const DEGREE7_SWEEP: &str =
        "dx = x*y^2 - y^3 + a*x^5;\ndy = 2*x^7 - x^4*y + 4*x*y^2 + y^3;\nsweep a from -1 to 1/2 steps 4;\n";
    pub const SEMI_HOM35_CENTER: &str =
        "dx = -y^3 - 2*x^2*y - 2*x*y^2;\ndy = x^5 + x^4*y + a*x^3*y^2 + (2*a - 1)/2*x^2*y^3 - x*y^4;\nparam a = -3/2;\n";
    pub const OCTIC_IIF: &str = "dx = l1*(x^6 + 3*y^2)*(-y + mu*x) + l2*(x^2 + y^2)*(y + A*x^3);\n\
dy = l1*(x^6 + 3*y^2)*(x + mu*y) + l2*(x^2 + y^2)*(-x^5 + 3*A*x^2*y);\n\
param l1 = 2; param l2 = 1; param mu = 1/3; param A = 1;\n\
weights = (1,1);\nV = (x^2 + y^2)*(x^6 + 3*y^2);\n";
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newton::{compute_diagram, quasi_degree};

    #[test]
    fn line_l1_is_linear_in_a() {
        for k in -5..=5 {
            let a = rat(k, 3);
            assert_eq!(semi_hom35_line(&a).l1(), rat(8, 1) * (rat(3, 1) + rat(2, 1) * &a));
        }
    }

    #[test]
    fn weight_sets() {
        let w = |x: &PolyVectorField| {
            let mut v = compute_diagram(x).unwrap().weights;
            v.sort();
            v
        };
        assert_eq!(w(&degree7_family(&rat(-31, 25))), vec![(1, 1), (1, 3)]);
        assert_eq!(w(&semi_hom35_line(&rat(1, 1)).field()), vec![(1, 1), (1, 2)]);
        assert_eq!(w(&linear_rotation(&rat(1, 5))), vec![(1, 1)]);
        assert_eq!(w(&octic_iif_family(&rat(2, 1), &rat(1, 1), &rat(1, 3), &rat(1, 1))), vec![(1, 1), (1, 3)]);
        assert_eq!(quasi_degree(&degree7_family(&rat(0, 1)), (1, 1)).unwrap(), 2);
    }

    #[test]
    fn octic_factor_is_inverse_integrating_factor() {
        for (l1, l2, mu, aa) in [(2, 1, 1, 1), (5, -3, -2, 7), (1, 0, 0, 0)] {
            let x = octic_iif_family(&rat(l1, 1), &rat(l2, 1), &rat(mu, 1), &rat(aa, 1));
            assert!(x.iif_residual(&octic_iif()).is_zero());
        }
    }
}
