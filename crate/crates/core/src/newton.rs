//! Bivariate polynomials, polynomial vector fields, Newton diagrams and the
//! quasihomogeneous degree of the leading part.

use crate::trigfun::{rat_to_f64, TrigPoly};
use crate::Rat;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NewtonError {
    #[error("vector field is identically zero")]
    ZeroField,
    #[error("origin is not a singular point (constant term present)")]
    NotSingular,
    #[error("weight ({0},{1}) is not coprime")]
    NotCoprime(u32, u32),
    #[error("leading part inconsistent for weight ({p},{q}): {detail}")]
    InconsistentLeadingPart { p: u32, q: u32, detail: String },
}

/// Sparse bivariate polynomial `Σ c_{ij} x^i y^j` over the rationals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), Rat>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }
    pub fn constant(c: Rat) -> Self {
        Poly2::monomial(c, 0, 0)
    }
    pub fn x() -> Self {
        Poly2::monomial(Rat::one(), 1, 0)
    }
    pub fn y() -> Self {
        Poly2::monomial(Rat::one(), 0, 1)
    }
    pub fn monomial(c: Rat, i: u32, j: u32) -> Self {
        let mut p = Poly2::zero();
        p.add_term(i, j, c);
        p
    }
    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Rat)>>(it: I) -> Self {
        let mut p = Poly2::zero();
        for ((i, j), c) in it {
            p.add_term(i, j, c);
        }
        p
    }
    fn add_term(&mut self, i: u32, j: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rat)> {
        self.terms.iter()
    }
    pub fn coeff(&self, i: u32, j: u32) -> Rat {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }
    pub fn add(&self, o: &Poly2) -> Poly2 {
        let mut r = self.clone();
        for ((i, j), c) in &o.terms {
            r.add_term(*i, *j, c.clone());
        }
        r
    }
    pub fn neg(&self) -> Poly2 {
        Poly2 { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
    pub fn sub(&self, o: &Poly2) -> Poly2 {
        self.add(&o.neg())
    }
    pub fn scale(&self, s: &Rat) -> Poly2 {
        if s.is_zero() {
            return Poly2::zero();
        }
        Poly2 { terms: self.terms.iter().map(|(k, c)| (*k, c * s)).collect() }
    }
    pub fn mul(&self, o: &Poly2) -> Poly2 {
        let mut r = Poly2::zero();
        for ((i, j), a) in &self.terms {
            for ((k, l), b) in &o.terms {
                r.add_term(i + k, j + l, a * b);
            }
        }
        r
    }
    pub fn pow(&self, n: u32) -> Poly2 {
        let mut r = Poly2::constant(Rat::one());
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }
    pub fn dx(&self) -> Poly2 {
        Poly2::from_terms(
            self.terms.iter().filter(|((i, _), _)| *i > 0).map(|((i, j), c)| ((i - 1, *j), c * Rat::from_integer((*i).into()))),
        )
    }
    pub fn dy(&self) -> Poly2 {
        Poly2::from_terms(
            self.terms.iter().filter(|((_, j), _)| *j > 0).map(|((i, j), c)| ((*i, j - 1), c * Rat::from_integer((*j).into()))),
        )
    }
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|((i, j), c)| rat_to_f64(c) * x.powi(*i as i32) * y.powi(*j as i32)).sum()
    }
    pub fn eval_exact(&self, x: &Rat, y: &Rat) -> Rat {
        let mut s = Rat::zero();
        for ((i, j), c) in &self.terms {
            s += c * num_traits::pow(x.clone(), *i as usize) * num_traits::pow(y.clone(), *j as usize);
        }
        s
    }

    /// `P(ρ^p cos φ, ρ^q sin φ)` graded by the power of ρ.
    pub fn weighted_polar(&self, p: u32, q: u32) -> BTreeMap<u32, TrigPoly> {
        let mut out: BTreeMap<u32, TrigPoly> = BTreeMap::new();
        let mut cache: BTreeMap<(u32, u32), TrigPoly> = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            let mono = cache.entry((*i, *j)).or_insert_with(|| TrigPoly::cs_monomial(*i, *j)).clone();
            let d = p * i + q * j;
            let e = out.entry(d).or_insert_with(TrigPoly::zero);
            *e = e.add(&mono.scale_rat(c));
        }
        out.retain(|_, t| !t.is_zero());
        out
    }
}

fn fmt_rat_coeff(c: &Rat, first: bool, has_mono: bool) -> String {
    let neg = c.is_negative();
    let a = c.abs();
    let sign = match (first, neg) {
        (true, true) => "-".to_string(),
        (true, false) => String::new(),
        (false, true) => " - ".to_string(),
        (false, false) => " + ".to_string(),
    };
    if a.is_one() && has_mono {
        sign
    } else if has_mono {
        format!("{sign}{a}*")
    } else {
        format!("{sign}{a}")
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut keys: Vec<_> = self.terms.keys().collect();
        keys.sort_by_key(|(i, j)| (i + j, std::cmp::Reverse(*i)));
        for k in keys {
            let (i, j) = *k;
            let c = &self.terms[k];
            let mut mono = Vec::new();
            match i {
                0 => {}
                1 => mono.push("x".to_string()),
                _ => mono.push(format!("x^{i}")),
            }
            match j {
                0 => {}
                1 => mono.push("y".to_string()),
                _ => mono.push(format!("y^{j}")),
            }
            write!(f, "{}{}", fmt_rat_coeff(c, first, !mono.is_empty()), mono.join("*"))?;
            first = false;
        }
        Ok(())
    }
}

/// `X = P ∂x + Q ∂y` with exact coefficients; `params` records the bindings
/// that produced the coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyVectorField {
    pub p: Poly2,
    pub q: Poly2,
    pub params: BTreeMap<String, Rat>,
}

impl PolyVectorField {
    pub fn new(p: Poly2, q: Poly2) -> Result<Self, NewtonError> {
        if p.is_zero() && q.is_zero() {
            return Err(NewtonError::ZeroField);
        }
        if !p.coeff(0, 0).is_zero() || !q.coeff(0, 0).is_zero() {
            return Err(NewtonError::NotSingular);
        }
        Ok(PolyVectorField { p, q, params: BTreeMap::new() })
    }
    pub fn with_params(mut self, params: BTreeMap<String, Rat>) -> Self {
        self.params = params;
        self
    }
    pub fn degree(&self) -> u32 {
        self.p.total_degree().unwrap_or(0).max(self.q.total_degree().unwrap_or(0))
    }
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        (self.p.eval(x, y), self.q.eval(x, y))
    }
    /// `∂P/∂x + ∂Q/∂y`
    pub fn divergence(&self) -> Poly2 {
        self.p.dx().add(&self.q.dy())
    }
    /// `X(v) − v·div X`, zero exactly when `v` is an inverse integrating factor.
    pub fn iif_residual(&self, v: &Poly2) -> Poly2 {
        self.p.mul(&v.dx()).add(&self.q.mul(&v.dy())).sub(&v.mul(&self.divergence()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub p: u32,
    pub q: u32,
    pub start: (i64, i64),
    pub end: (i64, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonDiagram {
    pub support: BTreeSet<(i64, i64)>,
    pub edges: Vec<Edge>,
    pub weights: Vec<(u32, u32)>,
}

impl NewtonDiagram {
    pub fn has_weight(&self, w: (u32, u32)) -> bool {
        self.weights.contains(&w)
    }
}

/// Support points of a vector field: `x^i y^j` in `P` gives `(i−1, j)`,
/// in `Q` gives `(i, j−1)`.
pub fn support(x: &PolyVectorField) -> BTreeSet<(i64, i64)> {
    let mut s = BTreeSet::new();
    for ((i, j), _) in x.p.terms() {
        s.insert((*i as i64 - 1, *j as i64));
    }
    for ((i, j), _) in x.q.terms() {
        s.insert((*i as i64, *j as i64 - 1));
    }
    s
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

pub fn compute_diagram(x: &PolyVectorField) -> Result<NewtonDiagram, NewtonError> {
    if x.p.is_zero() && x.q.is_zero() {
        return Err(NewtonError::ZeroField);
    }
    let support = support(x);
    let pts: Vec<(i64, i64)> = support.iter().cloned().collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= 0 {
            hull.pop();
        }
        hull.push(pt);
    }
    let mut edges = Vec::new();
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let dy = a.1 - b.1;
        let dx = b.0 - a.0;
        if dy <= 0 {
            break;
        }
        let g = dy.gcd(&dx);
        edges.push(Edge { p: (dy / g) as u32, q: (dx / g) as u32, start: a, end: b });
    }
    let mut weights: Vec<(u32, u32)> = Vec::new();
    for e in &edges {
        if !weights.contains(&(e.p, e.q)) {
            weights.push((e.p, e.q));
        }
    }
    Ok(NewtonDiagram { support, edges, weights })
}

/// The `(p,q)`-quasihomogeneous degree `r` of the leading part: the least
/// weighted degree `p·a + q·b` over support points `(a, b)`.
pub fn quasi_degree(x: &PolyVectorField, w: (u32, u32)) -> Result<i64, NewtonError> {
    let (p, q) = w;
    if p.gcd(&q) != 1 {
        return Err(NewtonError::NotCoprime(p, q));
    }
    let s = support(x);
    let r = s
        .iter()
        .map(|(a, b)| p as i64 * a + q as i64 * b)
        .min()
        .ok_or(NewtonError::ZeroField)?;
    // leading monomials of P sit at weighted degree p + r, of Q at q + r
    let lp = x.p.terms().map(|((i, j), _)| (p * i + q * j) as i64).min();
    let lq = x.q.terms().map(|((i, j), _)| (p * i + q * j) as i64).min();
    let ok = lp.map_or(true, |d| d >= p as i64 + r) && lq.map_or(true, |d| d >= q as i64 + r);
    if !ok {
        return Err(NewtonError::InconsistentLeadingPart { p, q, detail: format!("r = {r}") });
    }
    Ok(r)
}

/// Weighted-homogeneous degree of a polynomial's lowest part.
pub fn lowest_weighted_degree(v: &Poly2, w: (u32, u32)) -> Option<u32> {
    v.terms().map(|((i, j), _)| w.0 * i + w.1 * j).min()
}

pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

pub fn rat_to_i64(r: &Rat) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn xy(c: i64, i: u32, j: u32) -> Poly2 {
        Poly2::monomial(rat_i(c), i, j)
    }

    fn toy(l: Rat) -> PolyVectorField {
        let p = xy(-1, 0, 1).add(&Poly2::x().scale(&l));
        let q = xy(1, 1, 0).add(&Poly2::y().scale(&l));
        PolyVectorField::new(p, q).unwrap()
    }

    #[test]
    fn toy_weights_and_degree() {
        let x = toy(Rat::new(1.into(), 3.into()));
        let d = compute_diagram(&x).unwrap();
        assert_eq!(d.weights, vec![(1, 1)]);
        assert_eq!(quasi_degree(&x, (1, 1)).unwrap(), 0);
    }

    #[test]
    fn display_and_arith() {
        let p = xy(1, 1, 2).sub(&xy(1, 0, 3)).add(&Poly2::monomial(Rat::new((-31).into(), 25.into()), 5, 0));
        assert_eq!(p.to_string(), "x*y^2 - y^3 - 31/25*x^5");
        let s = Poly2::x().add(&Poly2::y());
        assert_eq!(s.pow(2).coeff(1, 1), rat_i(2));
        assert_eq!(s.pow(3).dx().coeff(0, 2), rat_i(3));
    }

    #[test]
    fn radial_iif_of_linear_center() {
        let x = toy(Rat::zero());
        let v = xy(1, 2, 0).add(&xy(1, 0, 2));
        assert!(x.iif_residual(&v).is_zero());
    }
}
