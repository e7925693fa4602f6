//! Exact trigonometric polynomials over the Gaussian rationals, their image
//! under `z = e^{iφ}` as Laurent polynomials, and quotients of them.

use crate::{GaussRat, Rat};
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

pub const DEFAULT_HARMONIC_CAP: i64 = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrigError {
    #[error("division by an identically zero trigonometric polynomial")]
    DivisionByZero,
    #[error("operation undefined for the zero polynomial")]
    ZeroInput,
    #[error("harmonic support {found} exceeds cap {cap}")]
    HarmonicCapExceeded { cap: i64, found: i64 },
    #[error("root finding failed: {0}")]
    RootFinding(String),
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn gauss(re: Rat, im: Rat) -> GaussRat {
    Complex::new(re, im)
}

pub fn gauss_int(n: i64) -> GaussRat {
    Complex::new(Rat::from_integer(n.into()), Rat::zero())
}

pub fn gauss_i() -> GaussRat {
    Complex::new(Rat::zero(), Rat::one())
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // huge numerators/denominators: scale through the integer parts
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn gauss_to_c64(g: &GaussRat) -> Complex64 {
    Complex64::new(rat_to_f64(&g.re), rat_to_f64(&g.im))
}

fn is_gzero(g: &GaussRat) -> bool {
    g.re.is_zero() && g.im.is_zero()
}

// ---------------------------------------------------------------------------
// Dense polynomials in z

/// Dense polynomial `Σ c[i] z^i` over the Gaussian rationals, trimmed so the
/// leading coefficient is nonzero (the zero polynomial is empty).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ZPoly {
    pub c: Vec<GaussRat>,
}

impl ZPoly {
    pub fn new(mut c: Vec<GaussRat>) -> Self {
        while c.last().map(is_gzero).unwrap_or(false) {
            c.pop();
        }
        ZPoly { c }
    }
    pub fn zero() -> Self {
        ZPoly { c: vec![] }
    }
    pub fn one() -> Self {
        ZPoly { c: vec![gauss_int(1)] }
    }
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }
    pub fn lead(&self) -> GaussRat {
        self.c.last().cloned().unwrap_or_else(GaussRat::zero)
    }
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead();
        ZPoly::new(self.c.iter().map(|x| x / &l).collect())
    }
    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let mut v = vec![GaussRat::zero(); n];
        for (i, x) in self.c.iter().enumerate() {
            v[i] = &v[i] + x;
        }
        for (i, x) in o.c.iter().enumerate() {
            v[i] = &v[i] + x;
        }
        ZPoly::new(v)
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&gauss_int(-1)))
    }
    pub fn scale(&self, s: &GaussRat) -> Self {
        ZPoly::new(self.c.iter().map(|x| x * s).collect())
    }
    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return ZPoly::zero();
        }
        let mut v = vec![GaussRat::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if is_gzero(a) {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                v[i + j] = &v[i + j] + a * b;
            }
        }
        ZPoly::new(v)
    }
    pub fn pow(&self, k: usize) -> Self {
        let mut r = ZPoly::one();
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }
    pub fn derivative(&self) -> Self {
        ZPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, x)| x * gauss_int(i as i64))
                .collect(),
        )
    }
    /// Euclidean division: `self = q·d + r` with `deg r < deg d`.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.c.len() - 1;
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (ZPoly::zero(), self.clone());
        }
        let mut q = vec![GaussRat::zero(); r.len() - dd];
        let inv = GaussRat::one() / d.lead();
        for k in (0..q.len()).rev() {
            let coef = &r[k + dd] * &inv;
            if !is_gzero(&coef) {
                for (j, dj) in d.c.iter().enumerate() {
                    r[k + j] = &r[k + j] - &coef * dj;
                }
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (ZPoly::new(q), ZPoly::new(r))
    }
    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }
    /// Inverse of `self` modulo `m` (requires coprimality).
    pub fn inverse_mod(&self, m: &Self) -> Option<Self> {
        // extended Euclid tracking the coefficient of `self`
        let (mut r0, mut r1) = (m.clone(), self.divrem(m).1);
        let (mut s0, mut s1) = (ZPoly::zero(), ZPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        if r0.degree() != Some(0) {
            return None;
        }
        let inv = GaussRat::one() / r0.lead();
        Some(s0.scale(&inv).divrem(m).1)
    }
    /// Yun square-free decomposition: returns `(factor, multiplicity)` pairs
    /// with monic, pairwise coprime, square-free factors.
    pub fn squarefree(&self) -> Vec<(ZPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.divrem(&a0).0;
        let mut c = df.divrem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.divrem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.divrem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for x in self.c.iter().rev() {
            acc = acc * z + gauss_to_c64(x);
        }
        acc
    }
    pub fn eval_exact(&self, z: &GaussRat) -> GaussRat {
        let mut acc = GaussRat::zero();
        for x in self.c.iter().rev() {
            acc = acc * z + x;
        }
        acc
    }
    /// Taylor shift: coefficients of `self(z0 + t)` in powers of `t`.
    pub fn taylor_at(&self, z0: &GaussRat) -> ZPoly {
        let mut c = self.c.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let add = &c[j + 1] * z0;
                c[j] = &c[j] + add;
            }
        }
        ZPoly::new(c)
    }
    pub fn to_c64(&self) -> Vec<Complex64> {
        self.c.iter().map(gauss_to_c64).collect()
    }
    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|x| gauss_to_c64(x).norm()).fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// Laurent polynomials

/// Finite Laurent polynomial `Σ c_n z^n` with Gaussian-rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, GaussRat>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }
    pub fn monomial(c: GaussRat, n: i64) -> Self {
        let mut l = LaurentPoly::zero();
        l.add_term(n, c);
        l
    }
    pub fn from_terms<I: IntoIterator<Item = (i64, GaussRat)>>(it: I) -> Self {
        let mut l = LaurentPoly::zero();
        for (n, c) in it {
            l.add_term(n, c);
        }
        l
    }
    fn add_term(&mut self, n: i64, c: GaussRat) {
        if is_gzero(&c) {
            return;
        }
        let e = self.coeffs.entry(n).or_insert_with(GaussRat::zero);
        *e = &*e + c;
        if is_gzero(e) {
            self.coeffs.remove(&n);
        }
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn coeff(&self, n: i64) -> GaussRat {
        self.coeffs.get(&n).cloned().unwrap_or_else(GaussRat::zero)
    }
    pub fn terms(&self) -> impl Iterator<Item = (&i64, &GaussRat)> {
        self.coeffs.iter()
    }
    pub fn low(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }
    pub fn high(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (n, c) in &o.coeffs {
            r.add_term(*n, c.clone());
        }
        r
    }
    pub fn neg(&self) -> Self {
        self.scale(&gauss_int(-1))
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn scale(&self, s: &GaussRat) -> Self {
        LaurentPoly::from_terms(self.coeffs.iter().map(|(n, c)| (*n, c * s)))
    }
    pub fn mul(&self, o: &Self) -> Self {
        let mut r = LaurentPoly::zero();
        for (n, a) in &self.coeffs {
            for (m, b) in &o.coeffs {
                r.add_term(n + m, a * b);
            }
        }
        r
    }
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(n, c)| (n + k, c.clone())).collect() }
    }
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(n, c)| gauss_to_c64(c) * z.powi(*n as i32))
            .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
    }
    /// Splits as `z^shift · P(z)` with `P(0) ≠ 0`.
    pub fn to_poly(&self) -> (i64, ZPoly) {
        match self.low() {
            None => (0, ZPoly::zero()),
            Some(lo) => {
                let hi = self.high().unwrap();
                let mut v = vec![GaussRat::zero(); (hi - lo + 1) as usize];
                for (n, c) in &self.coeffs {
                    v[(n - lo) as usize] = c.clone();
                }
                (lo, ZPoly::new(v))
            }
        }
    }
    pub fn from_poly(shift: i64, p: &ZPoly) -> Self {
        LaurentPoly::from_terms(p.c.iter().enumerate().map(|(i, c)| (i as i64 + shift, c.clone())))
    }
}

// ---------------------------------------------------------------------------
// Trigonometric polynomials

/// `Σ c_k e^{ikφ}` with Gaussian-rational coefficients and a reality flag.
#[derive(Clone, Debug)]
pub struct TrigPoly {
    coeffs: BTreeMap<i64, GaussRat>,
    real: bool,
}

impl PartialEq for TrigPoly {
    fn eq(&self, o: &Self) -> bool {
        self.coeffs == o.coeffs
    }
}
impl Eq for TrigPoly {}

impl Default for TrigPoly {
    fn default() -> Self {
        TrigPoly::zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum SignClass {
    Positive,
    Negative,
    NonnegWithZeros,
    NonposWithZeros,
    SignChanging,
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly { coeffs: BTreeMap::new(), real: true }
    }
    pub fn constant(c: Rat) -> Self {
        let mut t = TrigPoly::zero();
        t.add_term(0, Complex::new(c, Rat::zero()));
        t
    }
    pub fn int(n: i64) -> Self {
        TrigPoly::constant(Rat::from_integer(n.into()))
    }
    pub fn one() -> Self {
        TrigPoly::int(1)
    }
    /// `cos(kφ)`.
    pub fn cos_k(k: i64) -> Self {
        if k == 0 {
            return TrigPoly::one();
        }
        let h = gauss(rat(1, 2), Rat::zero());
        TrigPoly::from_terms_real(vec![(k, h.clone()), (-k, h)])
    }
    /// `sin(kφ)`.
    pub fn sin_k(k: i64) -> Self {
        if k == 0 {
            return TrigPoly::zero();
        }
        TrigPoly::from_terms_real(vec![(k, gauss(Rat::zero(), rat(-1, 2))), (-k, gauss(Rat::zero(), rat(1, 2)))])
    }
    pub fn cos() -> Self {
        TrigPoly::cos_k(1)
    }
    pub fn sin() -> Self {
        TrigPoly::sin_k(1)
    }
    /// `cos^a φ · sin^b φ`.
    pub fn cs_monomial(a: u32, b: u32) -> Self {
        TrigPoly::cos().pow(a).mul(&TrigPoly::sin().pow(b))
    }
    fn from_terms_real(terms: Vec<(i64, GaussRat)>) -> Self {
        let mut t = TrigPoly::zero();
        for (k, c) in terms {
            t.add_term(k, c);
        }
        t.real = t.is_real_exact();
        t
    }
    /// Builds from arbitrary coefficients; the reality flag is computed.
    pub fn from_terms<I: IntoIterator<Item = (i64, GaussRat)>>(it: I) -> Self {
        TrigPoly::from_terms_real(it.into_iter().collect())
    }
    fn add_term(&mut self, k: i64, c: GaussRat) {
        if is_gzero(&c) {
            return;
        }
        let e = self.coeffs.entry(k).or_insert_with(GaussRat::zero);
        *e = &*e + c;
        if is_gzero(e) {
            self.coeffs.remove(&k);
        }
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn is_real(&self) -> bool {
        self.real
    }
    /// Exact check of `c_{-k} = conj(c_k)`.
    pub fn is_real_exact(&self) -> bool {
        self.coeffs.iter().all(|(k, c)| self.coeff(-k) == c.conj())
    }
    pub fn coeff(&self, k: i64) -> GaussRat {
        self.coeffs.get(&k).cloned().unwrap_or_else(GaussRat::zero)
    }
    /// Pointwise complex conjugate for real `φ`.
    pub fn conj(&self) -> Self {
        TrigPoly::from_terms(self.coeffs.iter().map(|(k, c)| (-k, c.conj())))
    }
    pub fn real_part(&self) -> Self {
        let mut r = self.add(&self.conj()).scale_rat(&rat(1, 2));
        r.real = true;
        r
    }
    pub fn imag_part(&self) -> Self {
        let mut r = self.sub(&self.conj()).scale(&gauss(Rat::zero(), rat(-1, 2)));
        r.real = true;
        r
    }
    pub fn terms(&self) -> impl Iterator<Item = (&i64, &GaussRat)> {
        self.coeffs.iter()
    }
    /// Largest |k| in the support (0 for constants and zero).
    pub fn max_harmonic(&self) -> i64 {
        self.coeffs.keys().map(|k| k.abs()).max().unwrap_or(0)
    }
    pub fn check_cap(&self, cap: i64) -> Result<(), TrigError> {
        let h = self.max_harmonic();
        if h > cap {
            Err(TrigError::HarmonicCapExceeded { cap, found: h })
        } else {
            Ok(())
        }
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (k, c) in &o.coeffs {
            r.add_term(*k, c.clone());
        }
        r.real = self.real && o.real;
        r
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> Self {
        self.scale_rat(&Rat::from_integer((-1).into()))
    }
    pub fn scale_rat(&self, s: &Rat) -> Self {
        let g = Complex::new(s.clone(), Rat::zero());
        let mut r = self.scale(&g);
        r.real = self.real;
        r
    }
    pub fn scale(&self, s: &GaussRat) -> Self {
        let mut r = TrigPoly::zero();
        for (k, c) in &self.coeffs {
            r.add_term(*k, c * s);
        }
        r.real = if s.im.is_zero() { self.real } else { r.is_real_exact() };
        r
    }
    pub fn mul(&self, o: &Self) -> Self {
        let mut r = TrigPoly::zero();
        for (k, a) in &self.coeffs {
            for (l, b) in &o.coeffs {
                r.add_term(k + l, a * b);
            }
        }
        r.real = self.real && o.real;
        r
    }
    pub fn pow(&self, n: u32) -> Self {
        let mut r = TrigPoly::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        r
    }
    /// Exact d/dφ: `Σ ik c_k e^{ikφ}`.
    pub fn differentiate(&self) -> Self {
        let mut r = TrigPoly::zero();
        for (k, c) in &self.coeffs {
            r.add_term(*k, c * Complex::new(Rat::zero(), Rat::from_integer((*k).into())));
        }
        r.real = self.real;
        r
    }
    /// Value at a real angle (real part when the polynomial is real).
    pub fn eval(&self, phi: f64) -> f64 {
        self.eval_complex(phi).re
    }
    /// Complex value at a real angle.
    pub fn eval_complex(&self, phi: f64) -> Complex64 {
        self.eval_at_angle(Complex64::new(phi, 0.0))
    }
    /// Value at a complex angle `φ` (analytic continuation).
    pub fn eval_at_angle(&self, phi: Complex64) -> Complex64 {
        let z = (Complex64::i() * phi).exp();
        self.eval_z(z)
    }
    /// Value of the Laurent image at `z`.
    pub fn eval_z(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &self.coeffs {
            acc += gauss_to_c64(c) * z.powi(*k as i32);
        }
        acc
    }
    /// Value at `φ = (num/den)·π`, as a float.
    pub fn eval_pi_multiple(&self, num: i64, den: i64) -> f64 {
        self.eval(PI * num as f64 / den as f64)
    }
    /// Evaluates exactly at `z = e^{iφ}` when that point is Gaussian rational.
    pub fn eval_exact_z(&self, z: &GaussRat) -> GaussRat {
        let zinv = GaussRat::one() / z;
        let mut acc = GaussRat::zero();
        for (k, c) in &self.coeffs {
            let p = if *k >= 0 { pow_g(z, *k as u32) } else { pow_g(&zinv, (-k) as u32) };
            acc = acc + c * p;
        }
        acc
    }
    /// Mean value over one period (the constant coefficient).
    pub fn mean(&self) -> GaussRat {
        self.coeff(0)
    }
    pub fn zeros_on_circle(&self) -> Result<Vec<(f64, usize)>, TrigError> {
        zeros_on_circle(self)
    }
    pub fn sign_on_circle(&self) -> Result<SignClass, TrigError> {
        sign_on_circle(self)
    }
}

pub(crate) fn pow_g(z: &GaussRat, n: u32) -> GaussRat {
    let mut r = GaussRat::one();
    for _ in 0..n {
        r = r * z;
    }
    r
}

macro_rules! binop {
    ($tr:ident, $f:ident, $ty:ty) => {
        impl $tr<&$ty> for &$ty {
            type Output = $ty;
            fn $f(self, o: &$ty) -> $ty {
                <$ty>::$f(self, o)
            }
        }
    };
}
binop!(Add, add, TrigPoly);
binop!(Sub, sub, TrigPoly);
binop!(Mul, mul, TrigPoly);
binop!(Add, add, LaurentPoly);
binop!(Sub, sub, LaurentPoly);
binop!(Mul, mul, LaurentPoly);

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        TrigPoly::neg(self)
    }
}

fn fmt_gauss(g: &GaussRat) -> String {
    if g.im.is_zero() {
        format!("{}", g.re)
    } else if g.re.is_zero() {
        format!("{}i", g.im)
    } else {
        format!("({}{}{}i)", g.re, if g.im.is_negative() { "" } else { "+" }, g.im)
    }
}

impl fmt::Display for TrigPoly {
    /// Prints in the real basis `a_0 + Σ a_k cos kφ + b_k sin kφ` when real.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.real {
            let c0 = self.coeff(0).re;
            if !c0.is_zero() {
                parts.push(format!("{}", c0));
            }
            for k in 1..=self.max_harmonic() {
                let c = self.coeff(k);
                let a = &c.re * Rat::from_integer(2.into());
                let b = -&c.im * Rat::from_integer(2.into());
                if !a.is_zero() {
                    parts.push(format!("{}*cos({}φ)", a, k));
                }
                if !b.is_zero() {
                    parts.push(format!("{}*sin({}φ)", b, k));
                }
            }
        } else {
            for (k, c) in &self.coeffs {
                parts.push(format!("{}*e^({}iφ)", fmt_gauss(c), k));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// `e^{ikφ} ↦ z^k`.
pub fn trig_to_laurent(t: &TrigPoly) -> LaurentPoly {
    LaurentPoly::from_terms(t.coeffs.iter().map(|(k, c)| (*k, c.clone())))
}

/// Inverse of [`trig_to_laurent`]; the reality flag is recomputed.
pub fn laurent_to_trig(l: &LaurentPoly) -> TrigPoly {
    TrigPoly::from_terms(l.terms().map(|(k, c)| (*k, c.clone())))
}

/// Zeros of `t` on `[0, 2π)` with multiplicities: unit-modulus roots of the
/// z-form numerator, multiplicities from exact square-free decomposition.
pub fn zeros_on_circle(t: &TrigPoly) -> Result<Vec<(f64, usize)>, TrigError> {
    if t.is_zero() {
        return Err(TrigError::ZeroInput);
    }
    let (_, p) = trig_to_laurent(t).to_poly();
    let roots = crate::residue_pv::find_roots_poly(&p, &Default::default())
        .map_err(|e| TrigError::RootFinding(e.to_string()))?;
    let mut out: Vec<(f64, usize)> = roots
        .roots
        .iter()
        .filter(|r| r.class == crate::residue_pv::CircleClass::OnContour)
        .map(|r| {
            let mut a = r.location.arg();
            if a < 0.0 {
                a += 2.0 * PI;
            }
            if a >= 2.0 * PI - 1e-15 {
                a = 0.0;
            }
            (a, r.multiplicity)
        })
        .collect();
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(out)
}

/// Sign classification over the circle, certified by the zero set plus one
/// sample inside every arc between consecutive zeros.
pub fn sign_on_circle(t: &TrigPoly) -> Result<SignClass, TrigError> {
    if t.is_zero() {
        return Ok(SignClass::NonnegWithZeros);
    }
    let zeros = zeros_on_circle(t)?;
    if zeros.is_empty() {
        return Ok(if t.eval(0.0) > 0.0 { SignClass::Positive } else { SignClass::Negative });
    }
    let n = zeros.len();
    let mut pos = false;
    let mut neg = false;
    for i in 0..n {
        let a = zeros[i].0;
        let b = if i + 1 < n { zeros[i + 1].0 } else { zeros[0].0 + 2.0 * PI };
        let v = t.eval(0.5 * (a + b));
        if v > 0.0 {
            pos = true;
        } else {
            neg = true;
        }
    }
    Ok(match (pos, neg) {
        (true, false) => SignClass::NonnegWithZeros,
        (false, true) => SignClass::NonposWithZeros,
        _ => SignClass::SignChanging,
    })
}

// ---------------------------------------------------------------------------
// Rational trigonometric functions

/// Quotient `num/den` of trigonometric polynomials, reduced by the exact gcd
/// of their z-forms.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalTrig {
    pub num: TrigPoly,
    pub den: TrigPoly,
    real: bool,
}

impl RationalTrig {
    pub fn new(num: TrigPoly, den: TrigPoly) -> Result<Self, TrigError> {
        if den.is_zero() {
            return Err(TrigError::DivisionByZero);
        }
        let real = num.is_real() && den.is_real();
        let mut r = RationalTrig { num, den, real };
        r.reduce();
        Ok(r)
    }
    pub fn from_trig(t: TrigPoly) -> Self {
        let real = t.is_real();
        RationalTrig { num: t, den: TrigPoly::one(), real }
    }
    pub fn is_real(&self) -> bool {
        self.real
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    /// Divides out the common polynomial factor of the z-forms and rebalances
    /// the powers of z so the denominator stays centred when possible.
    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = TrigPoly::one();
            return;
        }
        let (sn, pn) = trig_to_laurent(&self.num).to_poly();
        let (sd, pd) = trig_to_laurent(&self.den).to_poly();
        let g = pn.gcd(&pd);
        let (mut pn, mut pd) = (pn, pd);
        if g.degree().unwrap_or(0) > 0 {
            pn = pn.divrem(&g).0;
            pd = pd.divrem(&g).0;
        }
        // normalise so the denominator is real when a centring unit exists
        let dd = pd.degree().unwrap_or(0) as i64;
        let mut shift = sd;
        if dd % 2 == 0 {
            shift = -dd / 2;
        }
        let delta = shift - sd;
        let mut num = laurent_to_trig(&LaurentPoly::from_poly(sn + delta, &pn));
        let mut den = laurent_to_trig(&LaurentPoly::from_poly(sd + delta, &pd));
        if !den.is_real_exact() && dd % 2 == 0 {
            // try a scalar unit u with u·den real: compare the extreme coefficients
            let hi = den.coeff(dd / 2);
            let lo = den.coeff(-dd / 2);
            if !is_gzero(&hi) && !is_gzero(&lo) {
                // want u·hi = conj(u·lo)  ⇒  u/conj(u) = conj(lo)/hi; try u = conj(hi) + lo
                let u = hi.conj() + &lo;
                let cand = if is_gzero(&u) { gauss_i() * hi.conj() - gauss_i() * &lo } else { u };
                if !is_gzero(&cand) {
                    let d2 = den.scale(&cand);
                    if d2.is_real_exact() {
                        num = num.scale(&cand);
                        den = d2;
                    }
                }
            }
        }
        self.num = num;
        self.den = den;
        if self.den.coeffs.len() == 1 {
            // monomial denominator: fold into the numerator
            let (k, c) = self.den.coeffs.iter().next().map(|(k, c)| (*k, c.clone())).unwrap();
            let inv = GaussRat::one() / c;
            self.num = laurent_to_trig(&trig_to_laurent(&self.num).shift(-k).scale(&inv));
            self.den = TrigPoly::one();
        }
    }
    pub fn eval(&self, phi: f64) -> f64 {
        self.eval_complex(phi).re
    }
    pub fn eval_complex(&self, phi: f64) -> Complex64 {
        self.eval_at_angle(Complex64::new(phi, 0.0))
    }
    pub fn eval_at_angle(&self, phi: Complex64) -> Complex64 {
        let z = (Complex64::i() * phi).exp();
        self.num.eval_z(z) / self.den.eval_z(z)
    }
    pub fn add(&self, o: &Self) -> Self {
        let n = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        let d = self.den.mul(&o.den);
        let mut r = RationalTrig::new(n, d).expect("nonzero denominators");
        r.real = self.real && o.real;
        r
    }
    pub fn neg(&self) -> Self {
        RationalTrig { num: self.num.neg(), den: self.den.clone(), real: self.real }
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &Self) -> Self {
        let mut r = RationalTrig::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero denominators");
        r.real = self.real && o.real;
        r
    }
    pub fn div(&self, o: &Self) -> Result<Self, TrigError> {
        if o.num.is_zero() {
            return Err(TrigError::DivisionByZero);
        }
        let mut r = RationalTrig::new(self.num.mul(&o.den), self.den.mul(&o.num))?;
        r.real = self.real && o.real;
        Ok(r)
    }
    pub fn scale_rat(&self, s: &Rat) -> Self {
        RationalTrig { num: self.num.scale_rat(s), den: self.den.clone(), real: self.real }
    }
    pub fn differentiate(&self) -> Self {
        let n = self.num.differentiate().mul(&self.den).sub(&self.num.mul(&self.den.differentiate()));
        let d = self.den.mul(&self.den);
        let mut r = RationalTrig::new(n, d).expect("nonzero denominator");
        r.real = self.real;
        r
    }
    /// If the denominator is a constant, the exact trigonometric polynomial.
    pub fn as_trig(&self) -> Option<TrigPoly> {
        if self.den.max_harmonic() == 0 && !self.den.is_zero() {
            let inv = GaussRat::one() / self.den.coeff(0);
            let mut t = self.num.scale(&inv);
            t.real = self.real || t.is_real_exact();
            Some(t)
        } else {
            None
        }
    }
    /// The function `W(φ)` rewritten as `N(z)/D(z)` with polynomial N, D.
    pub fn z_form(&self) -> (ZPoly, ZPoly) {
        let (sn, pn) = trig_to_laurent(&self.num).to_poly();
        let (sd, pd) = trig_to_laurent(&self.den).to_poly();
        let s = sn - sd;
        if s >= 0 {
            (pn.mul(&ZPoly::new(monomial_vec(s as usize))), pd)
        } else {
            (pn, pd.mul(&ZPoly::new(monomial_vec((-s) as usize))))
        }
    }
}

fn monomial_vec(n: usize) -> Vec<GaussRat> {
    let mut v = vec![GaussRat::zero(); n + 1];
    v[n] = gauss_int(1);
    v
}

impl fmt::Display for RationalTrig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == TrigPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}
