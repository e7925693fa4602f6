//! Exact trigonometric-polynomial solutions of `G v' + P v + Q = 0` with `Q`
//! affine in carried constants.

use super::ExpansionError;
use crate::trigfun::{gauss, rat_to_f64, TrigPoly};
use crate::{GaussRat, Rat};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

fn gz(g: &GaussRat) -> bool {
    g.re.is_zero() && g.im.is_zero()
}

/// `base + Σ_i C_i · parts[i]` in the carried constants `C_i`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Affine {
    pub base: TrigPoly,
    pub parts: BTreeMap<usize, TrigPoly>,
}

impl Affine {
    pub fn zero() -> Self {
        Affine::default()
    }
    pub fn constant(t: TrigPoly) -> Self {
        Affine { base: t, parts: BTreeMap::new() }
    }
    fn clean(mut self) -> Self {
        self.parts.retain(|_, t| !t.is_zero());
        self
    }
    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.parts.values().all(|t| t.is_zero())
    }
    pub fn depends_on_constants(&self) -> bool {
        self.parts.values().any(|t| !t.is_zero())
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.base = r.base.add(&o.base);
        for (k, t) in &o.parts {
            let e = r.parts.entry(*k).or_insert_with(TrigPoly::zero);
            *e = e.add(t);
        }
        r.clean()
    }
    pub fn neg(&self) -> Self {
        self.map(|t| t.neg())
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn map<F: Fn(&TrigPoly) -> TrigPoly>(&self, f: F) -> Self {
        Affine { base: f(&self.base), parts: self.parts.iter().map(|(k, t)| (*k, f(t))).collect() }.clean()
    }
    pub fn mul_trig(&self, t: &TrigPoly) -> Self {
        self.map(|x| x.mul(t))
    }
    pub fn scale_rat(&self, s: &Rat) -> Self {
        self.map(|x| x.scale_rat(s))
    }
    pub fn differentiate(&self) -> Self {
        self.map(|x| x.differentiate())
    }
    pub fn real_part(&self) -> Self {
        self.map(|x| x.real_part())
    }
    pub fn max_harmonic(&self) -> i64 {
        self.parts.values().map(|t| t.max_harmonic()).max().unwrap_or(0).max(self.base.max_harmonic())
    }
    /// Replaces `C_idx` by `offset + Σ coeffs[l] C_l`.
    pub fn substitute(&mut self, c: &Condition) {
        if let Some(t) = self.parts.remove(&c.constant) {
            self.base = self.base.add(&t.scale_rat(&c.offset));
            for (l, a) in &c.coeffs {
                let e = self.parts.entry(*l).or_insert_with(TrigPoly::zero);
                *e = e.add(&t.scale_rat(a));
            }
            self.parts.retain(|_, t| !t.is_zero());
        }
    }
    /// Sets the listed constants to zero.
    pub fn drop_constants(&self) -> TrigPoly {
        self.base.clone()
    }
    pub fn eval(&self, phi: f64, consts: &BTreeMap<usize, f64>) -> f64 {
        let mut v = self.base.eval(phi);
        for (k, t) in &self.parts {
            if let Some(c) = consts.get(k) {
                v += c * t.eval(phi);
            }
        }
        v
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        for (k, t) in &self.parts {
            write!(f, " + C{}·({})", k + 1, t)?;
        }
        Ok(())
    }
}

/// Linear condition `C_constant = offset + Σ coeffs[l] C_l` on carried
/// constants.
#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    pub constant: usize,
    pub offset: Rat,
    pub coeffs: BTreeMap<usize, Rat>,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{} = {}", self.constant + 1, self.offset)?;
        for (l, a) in &self.coeffs {
            write!(f, " + ({})·C{}", a, l + 1)?;
        }
        Ok(())
    }
}

/// Reduced row echelon form in place; pivots are searched only among the
/// first `ncoef` columns. Returns the pivot column of each leading row.
pub(crate) fn rref(m: &mut [Vec<GaussRat>], ncoef: usize) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncoef {
        if r >= rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !gz(&m[i][col])) else { continue };
        m.swap(r, pr);
        let inv = GaussRat::one() / m[r][col].clone();
        for x in m[r].iter_mut() {
            if !gz(x) {
                *x = &*x * &inv;
            }
        }
        let prow = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || gz(&row[col]) {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(prow.iter()) {
                if !gz(p) {
                    *x = &*x - &f * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Exact solution set of `G v' + P v + Q = 0` within trigonometric
/// polynomials of bounded degree.
#[derive(Clone, Debug)]
pub struct ExactSolution {
    pub particular: Affine,
    pub conditions: Vec<Condition>,
    /// Real basis of the homogeneous solutions.
    pub nullspace: Vec<TrigPoly>,
    pub harmonic_bound: i64,
}

fn positive_integer(g: &GaussRat) -> Option<i64> {
    if !g.im.is_zero() || !g.re.is_integer() || !g.re.is_positive() {
        return None;
    }
    g.re.to_integer().try_into().ok()
}

/// Degree bound for trigonometric-polynomial solutions: beyond the forcing
/// degree, only a resonant degree `K` with `iK G_h + P_h = 0` can occur at
/// the top harmonic.
pub fn harmonic_bound(g: &TrigPoly, p: &TrigPoly, hq: i64) -> i64 {
    let hg = g.max_harmonic();
    let h = hg.max(p.max_harmonic());
    let i = gauss(Rat::zero(), Rat::one());
    let mut kres = 0;
    for sign in [1i64, -1] {
        let gc = g.coeff(sign * h);
        if gz(&gc) {
            continue;
        }
        let pc = p.coeff(sign * h);
        let k = if sign == 1 { &i * pc / gc } else { -(&i * pc) / gc };
        if let Some(k) = positive_integer(&k) {
            kres = kres.max(k);
        }
    }
    (hq - hg).max(kres).max(0) + 2
}

fn real_row(g: &[GaussRat], take_im: bool) -> Vec<GaussRat> {
    g.iter()
        .map(|x| gauss(if take_im { x.im.clone() } else { x.re.clone() }, Rat::zero()))
        .collect()
}

fn as_rat(g: &GaussRat) -> Rat {
    g.re.clone()
}

/// Solves `G v' + P v + Q = 0` for `v` a trigonometric polynomial, treating
/// the carried constants of `Q` as unknowns too. Returns `None` when no such
/// solution exists for any value of the constants.
pub fn solve_exact(g: &TrigPoly, p: &TrigPoly, q: &Affine, cap: i64) -> Result<Option<ExactSolution>, ExpansionError> {
    let k = harmonic_bound(g, p, q.max_harmonic());
    if k > cap {
        return Err(ExpansionError::HarmonicCap { bound: k, cap });
    }
    let h = g.max_harmonic().max(p.max_harmonic()).max(q.max_harmonic() - k).max(0);
    let nh = (2 * k + 1) as usize;
    let consts: Vec<usize> = q.parts.keys().copied().collect();
    let ncoef = nh + consts.len();
    let nrows = (2 * (k + h) + 1) as usize;
    let row_of = |l: i64| (l + k + h) as usize;
    let mut m = vec![vec![GaussRat::zero(); ncoef + 1]; nrows];
    for kk in -k..=k {
        let col = (kk + k) as usize;
        let ik = gauss(Rat::zero(), Rat::from_integer(kk.into()));
        for (a, ga) in g.terms() {
            m[row_of(a + kk)][col] += ga * &ik;
        }
        for (b, pb) in p.terms() {
            m[row_of(b + kk)][col] += pb.clone();
        }
    }
    for (ci, c) in consts.iter().enumerate() {
        for (l, x) in q.parts[c].terms() {
            m[row_of(*l)][nh + ci] += x.clone();
        }
    }
    for (l, x) in q.base.terms() {
        m[row_of(*l)][ncoef] -= x.clone();
    }
    let pivots = rref(&mut m, ncoef);
    let rank = pivots.len();
    if m[rank..].iter().any(|row| !gz(&row[ncoef])) {
        return Ok(None);
    }
    // conditions on constants: rows whose pivot is a constant column, split
    // into real equations
    let mut crow: Vec<Vec<GaussRat>> = Vec::new();
    for (r, &pc) in pivots.iter().enumerate() {
        if pc >= nh {
            let eq: Vec<GaussRat> = m[r][nh..].to_vec();
            crow.push(real_row(&eq, false));
            crow.push(real_row(&eq, true));
        }
    }
    let mut conditions = Vec::new();
    if !crow.is_empty() {
        let nc = consts.len();
        let cp = rref(&mut crow, nc);
        if crow[cp.len()..].iter().any(|row| !gz(&row[nc])) {
            return Ok(None);
        }
        for (r, &pc) in cp.iter().enumerate() {
            let mut coeffs = BTreeMap::new();
            for l in 0..nc {
                if l != pc && !gz(&crow[r][l]) {
                    coeffs.insert(consts[l], -as_rat(&crow[r][l]));
                }
            }
            conditions.push(Condition { constant: consts[pc], offset: as_rat(&crow[r][nc]), coeffs });
        }
    }
    let to_trig = |v: &[GaussRat]| TrigPoly::from_terms(v.iter().enumerate().map(|(i, c)| (i as i64 - k, c.clone())));
    let mut base = vec![GaussRat::zero(); nh];
    let mut parts: BTreeMap<usize, Vec<GaussRat>> = BTreeMap::new();
    let is_pivot: Vec<bool> = (0..ncoef).map(|c| pivots.contains(&c)).collect();
    for (r, &pc) in pivots.iter().enumerate() {
        if pc >= nh {
            continue;
        }
        base[pc] = m[r][ncoef].clone();
        for (ci, c) in consts.iter().enumerate() {
            let e = &m[r][nh + ci];
            if !gz(e) {
                parts.entry(*c).or_insert_with(|| vec![GaussRat::zero(); nh])[pc] = -e.clone();
            }
        }
    }
    let mut particular = Affine {
        base: to_trig(&base),
        parts: parts.iter().map(|(c, v)| (*c, to_trig(v))).collect(),
    }
    .clean();
    for c in &conditions {
        particular.substitute(c);
    }
    let particular = particular.real_part();
    let mut candidates = Vec::new();
    for f in (0..nh).filter(|&c| !is_pivot[c]) {
        let mut v = vec![GaussRat::zero(); nh];
        v[f] = GaussRat::one();
        for (r, &pc) in pivots.iter().enumerate() {
            if pc < nh {
                v[pc] = -m[r][f].clone();
            }
        }
        let t = to_trig(&v);
        candidates.push(t.real_part());
        candidates.push(t.imag_part());
    }
    let nullspace = independent_subset(candidates, k);
    Ok(Some(ExactSolution { particular, conditions, nullspace, harmonic_bound: k }))
}

/// Greedy exact rank filter.
fn independent_subset(cands: Vec<TrigPoly>, k: i64) -> Vec<TrigPoly> {
    let nh = (2 * k + 1) as usize;
    let mut kept: Vec<TrigPoly> = Vec::new();
    let mut rows: Vec<Vec<GaussRat>> = Vec::new();
    for t in cands {
        if t.is_zero() {
            continue;
        }
        let v: Vec<GaussRat> = (-k..=k).map(|i| t.coeff(i)).collect();
        let mut trial = rows.clone();
        trial.push(v.clone());
        let mut work = trial.clone();
        if rref(&mut work, nh).len() > rows.len() {
            rows = trial;
            kept.push(t);
        }
    }
    kept
}

/// Scales `t` so its constant term (or else its lowest nonnegative harmonic
/// cosine coefficient) is one.
pub fn normalize(t: &TrigPoly) -> TrigPoly {
    let c0 = t.coeff(0);
    if !gz(&c0) {
        return t.scale(&(GaussRat::one() / c0));
    }
    for k in 1..=t.max_harmonic() {
        let c = t.coeff(k);
        if !c.re.is_zero() {
            return t.scale_rat(&(Rat::one() / (c.re * Rat::from_integer(2.into()))));
        }
        if !c.im.is_zero() {
            return t.scale_rat(&(Rat::one() / (-c.im * Rat::from_integer(2.into()))));
        }
    }
    t.clone()
}

pub fn rat_f64(r: &Rat) -> f64 {
    rat_to_f64(r)
}
