//! Generic numeric kernels: adaptive Gauss-Kronrod quadrature (real and along
//! complex paths), Richardson extrapolation, an adaptive Dormand-Prince
//! integrator, and rational reconstruction of floats.

use crate::scalar::Real;
use num_complex::Complex;
use num_rational::BigRational;
use num_bigint::BigInt;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod panel on `[a,b]` for a function with values in a
/// field `V` (real or complex). Returns (kronrod, |kronrod - gauss|).
fn gk15<T: Real, V, F>(f: &F, a: T, b: T) -> (V, T)
where
    V: Copy + std::ops::Add<Output = V> + std::ops::Sub<Output = V> + std::ops::Mul<T, Output = V> + Norm<T>,
    F: Fn(T) -> V,
{
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let fc = f(mid);
    let mut rk = fc * T::lit(WGK[7]);
    let mut rg = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        let s = f1 + f2;
        rk = rk + s * T::lit(WGK[j]);
        if j % 2 == 1 {
            rg = rg + s * T::lit(WG[j / 2]);
        }
    }
    let k = rk * half;
    let g = rg * half;
    (k, (k - g).norm_of())
}

pub trait Norm<T> {
    fn norm_of(&self) -> T;
}
impl<T: Real> Norm<T> for T {
    fn norm_of(&self) -> T {
        self.abs()
    }
}
impl<T: Real> Norm<T> for Complex<T> {
    fn norm_of(&self) -> T {
        self.norm()
    }
}

/// Result of an adaptive quadrature.
#[derive(Clone, Copy, Debug)]
pub struct Quad<V, T> {
    pub value: V,
    pub error: T,
    pub evaluations: usize,
}

/// Adaptive Gauss-Kronrod on `[a,b]` (global bisection by largest error).
pub fn integrate<T: Real, V, F>(f: F, a: T, b: T, abs_tol: T, rel_tol: T, max_panels: usize) -> Quad<V, T>
where
    V: Copy + std::ops::Add<Output = V> + std::ops::Sub<Output = V> + std::ops::Mul<T, Output = V> + Norm<T>,
    F: Fn(T) -> V,
{
    let mut panels: Vec<(T, T, V, T)> = Vec::new();
    let (v, e) = gk15(&f, a, b);
    panels.push((a, b, v, e));
    let mut evals = 15usize;
    loop {
        let mut total = panels[0].2;
        let mut err = panels[0].3;
        for p in panels.iter().skip(1) {
            total = total + p.2;
            err = err + p.3;
        }
        let tol = abs_tol.max(rel_tol * total.norm_of());
        if err <= tol || panels.len() >= max_panels {
            return Quad { value: total, error: err, evaluations: evals };
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0usize, T::zero()), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (pa, pb, _, _) = panels.swap_remove(idx);
        let pm = (pa + pb) * T::lit(0.5);
        if pm <= pa || pm >= pb {
            // interval exhausted in floating point
            let (v, _) = gk15(&f, pa, pb);
            panels.push((pa, pb, v, T::zero()));
            continue;
        }
        let (v1, e1) = gk15(&f, pa, pm);
        let (v2, e2) = gk15(&f, pm, pb);
        evals += 30;
        panels.push((pa, pm, v1, e1));
        panels.push((pm, pb, v2, e2));
    }
}

/// Real-valued convenience wrapper.
pub fn integrate_real<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> Quad<T, T> {
    integrate(f, a, b, tol, tol, 4000)
}

/// Integral of `f(γ(t)) γ'(t)` for a path `γ: [a,b] → ℂ`.
pub fn integrate_path<T: Real, F, G, D>(f: F, gamma: G, dgamma: D, a: T, b: T, tol: T) -> Quad<Complex<T>, T>
where
    F: Fn(Complex<T>) -> Complex<T>,
    G: Fn(T) -> Complex<T>,
    D: Fn(T) -> Complex<T>,
{
    integrate(|t: T| f(gamma(t)) * dgamma(t), a, b, tol, tol, 4000)
}

/// Richardson extrapolation of `values[k] ≈ A(h0 / ratio^k)` assuming an error
/// expansion in integer powers of `h` starting at `h^1`. Returns the best
/// estimate and the last difference as its error.
pub fn richardson<T: Real>(values: &[T], ratio: T) -> (T, T) {
    let n = values.len();
    assert!(n > 0);
    if n == 1 {
        return (values[0], T::infinity());
    }
    let mut table: Vec<Vec<T>> = vec![values.to_vec()];
    let mut best = values[n - 1];
    let mut err = (values[n - 1] - values[n - 2]).abs();
    for order in 1..n {
        let prev = &table[order - 1];
        let factor = ratio.powi(order as i32);
        let next: Vec<T> = (1..prev.len())
            .map(|k| (factor * prev[k] - prev[k - 1]) / (factor - T::one()))
            .collect();
        if next.len() >= 2 {
            let e = (next[next.len() - 1] - next[next.len() - 2]).abs();
            if e < err {
                err = e;
                best = next[next.len() - 1];
            }
        } else if next.len() == 1 && order == n - 1 {
            let e = (next[0] - best).abs();
            if e < err {
                best = next[0];
                err = e.max(T::epsilon());
            }
        }
        table.push(next);
    }
    (best, err)
}

/// Outcome of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct OdeOutcome<T> {
    pub y: T,
    pub steps: usize,
    pub error: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OdeFailure {
    StepLimit,
    StepUnderflow,
    Guard,
}

/// Adaptive Dormand-Prince 5(4) integrator for a scalar equation.
#[derive(Clone, Copy, Debug)]
pub struct Dopri5<T> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
    pub h_min: T,
}

impl<T: Real> Dopri5<T> {
    pub fn new(rtol: T, atol: T) -> Self {
        Dopri5 { rtol, atol, max_steps: 2_000_000, h_min: T::lit(1e-15) }
    }

    /// Integrates `y' = f(t, y)` from `t0` to `t1`. `f` returns `None` to
    /// signal a guard violation (abort).
    pub fn solve<F>(&self, f: F, t0: T, t1: T, y0: T) -> Result<OdeOutcome<T>, OdeFailure>
    where
        F: Fn(T, T) -> Option<T>,
    {
        let c = |x: f64| T::lit(x);
        let (a21, a31, a32) = (c(1.0 / 5.0), c(3.0 / 40.0), c(9.0 / 40.0));
        let (a41, a42, a43) = (c(44.0 / 45.0), c(-56.0 / 15.0), c(32.0 / 9.0));
        let (a51, a52, a53, a54) = (c(19372.0 / 6561.0), c(-25360.0 / 2187.0), c(64448.0 / 6561.0), c(-212.0 / 729.0));
        let (a61, a62, a63, a64, a65) =
            (c(9017.0 / 3168.0), c(-355.0 / 33.0), c(46732.0 / 5247.0), c(49.0 / 176.0), c(-5103.0 / 18656.0));
        let (b1, b3, b4, b5, b6) = (c(35.0 / 384.0), c(500.0 / 1113.0), c(125.0 / 192.0), c(-2187.0 / 6784.0), c(11.0 / 84.0));
        let (e1, e3, e4, e5, e6, e7) = (
            c(71.0 / 57600.0),
            c(-71.0 / 16695.0),
            c(71.0 / 1920.0),
            c(-17253.0 / 339200.0),
            c(22.0 / 525.0),
            c(-1.0 / 40.0),
        );
        let dir = if t1 >= t0 { T::one() } else { -T::one() };
        let span = (t1 - t0).abs();
        let mut t = t0;
        let mut y = y0;
        let mut h = span * c(1e-3);
        let mut steps = 0usize;
        let mut err_acc = T::zero();
        let mut k1 = f(t, y).ok_or(OdeFailure::Guard)?;
        while (t1 - t) * dir > T::zero() {
            if steps >= self.max_steps {
                return Err(OdeFailure::StepLimit);
            }
            let remaining = (t1 - t).abs();
            if h > remaining {
                h = remaining;
            }
            let hs = h * dir;
            let k2 = f(t + hs * c(0.2), y + hs * a21 * k1).ok_or(OdeFailure::Guard)?;
            let k3 = f(t + hs * c(0.3), y + hs * (a31 * k1 + a32 * k2)).ok_or(OdeFailure::Guard)?;
            let k4 = f(t + hs * c(0.8), y + hs * (a41 * k1 + a42 * k2 + a43 * k3)).ok_or(OdeFailure::Guard)?;
            let k5 = f(t + hs * c(8.0 / 9.0), y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4))
                .ok_or(OdeFailure::Guard)?;
            let k6 = f(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5))
                .ok_or(OdeFailure::Guard)?;
            let y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            let k7 = f(t + hs, y_new).ok_or(OdeFailure::Guard)?;
            let err = (hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)).abs();
            let scale = self.atol + self.rtol * y.abs().max(y_new.abs());
            let ratio = err / scale;
            steps += 1;
            if ratio <= T::one() || h <= self.h_min {
                if ratio > T::one() && h <= self.h_min {
                    return Err(OdeFailure::StepUnderflow);
                }
                t = t + hs;
                y = y_new;
                k1 = k7;
                err_acc = err_acc + err;
            }
            let fac = if ratio == T::zero() {
                c(5.0)
            } else {
                (c(0.9) * ratio.powf(c(-0.2))).min(c(5.0)).max(c(0.2))
            };
            h = (h * fac).max(self.h_min);
        }
        Ok(OdeOutcome { y, steps, error: err_acc })
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions). Returns `None` if no convergent is within `tol`.
pub fn rational_approx(x: f64, max_den: i64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if ((h1 as f64) / (k1 as f64) - x).abs() <= tol {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 != 0 && ((h1 as f64) / (k1 as f64) - x).abs() <= tol {
        Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)))
    } else {
        None
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on Legendre polynomials).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_integrates_sine() {
        let q = integrate_real(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-13);
        assert!((q.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn kronrod_in_f32() {
        let q = integrate_real(|x: f32| x * x, 0.0f32, 1.0f32, 1e-6);
        assert!((q.value - 1.0 / 3.0).abs() < 1e-5);
    }

    #[test]
    fn richardson_removes_linear_error() {
        let vals: Vec<f64> = (0..5).map(|k| 1.0 + 0.3 * 0.5f64.powi(k) + 0.1 * 0.25f64.powi(k)).collect();
        let (v, _) = richardson(&vals, 2.0);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dopri_exponential() {
        let out = Dopri5::new(1e-12, 1e-14).solve(|_, y: f64| Some(0.5 * y), 0.0, 2.0, 1.0).unwrap();
        assert!((out.y - 1f64.exp()).abs() < 1e-10);
    }

    #[test]
    fn rational_reconstruction() {
        let r = rational_approx(-31.0 / 25.0, 1000, 1e-12).unwrap();
        assert_eq!(r, BigRational::new((-31).into(), 25.into()));
        assert!(rational_approx(std::f64::consts::PI, 100, 1e-12).is_none());
    }

    #[test]
    fn legendre_weights() {
        let (x, w) = gauss_legendre(20);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((s - 0.4).abs() < 1e-13);
    }
}
