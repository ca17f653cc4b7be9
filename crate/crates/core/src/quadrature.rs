//! Gauss–Legendre rules and panelled adaptive Gauss–Kronrod integration of
//! complex vector-valued integrands.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cabs, czero, Real};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
///
/// Computed in double precision by Newton iteration on the three-term
/// recurrence, then converted.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let (x, w) = gauss_legendre_f64(n);
    (x.into_iter().map(T::lit).collect(), w.into_iter().map(T::lit).collect())
}

fn gauss_legendre_f64(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                z
            } else {
                p1
            };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped affinely onto `[a, b]`.
pub fn gauss_legendre_on<T: Real>(n: usize, a: T, b: T) -> (Vec<T>, Vec<T>) {
    let (x, w) = gauss_legendre::<T>(n);
    let half = (b - a) * T::lit(0.5);
    let mid = (b + a) * T::lit(0.5);
    (x.into_iter().map(|xi| mid + half * xi).collect(), w.into_iter().map(|wi| wi * half).collect())
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// One 15-point Kronrod evaluation; returns the integral and the
/// Kronrod–Gauss difference as an error estimate.
fn gk15<T: Real, const K: usize, F>(f: &F, a: T, b: T) -> ([Complex<T>; K], T)
where
    F: Fn(T) -> [Complex<T>; K],
{
    let half = (b - a) * T::lit(0.5);
    let mid = (b + a) * T::lit(0.5);
    let mut kr = [czero::<T>(); K];
    let mut ga = [czero::<T>(); K];
    for j in 0..8 {
        let wk = T::lit(WGK[j]);
        let wg = if j % 2 == 1 { Some(T::lit(WG[j / 2])) } else { None };
        let pts: &[T] = if j == 7 { &[T::zero()] } else { &[T::lit(XGK[j]), -T::lit(XGK[j])] };
        for &x in pts {
            let fx = f(mid + half * x);
            for c in 0..K {
                kr[c] += fx[c] * wk;
                if let Some(g) = wg {
                    ga[c] += fx[c] * g;
                }
            }
        }
    }
    let mut err = T::zero();
    for c in 0..K {
        kr[c] *= half;
        ga[c] *= half;
        err = err.max(cabs(kr[c] - ga[c]));
    }
    (kr, err)
}

/// Adaptive integration of a vector integrand over `[a, b]` by bisection
/// until each accepted piece meets its share of `tol`.
pub fn adaptive<T: Real, const K: usize, F>(f: &F, a: T, b: T, tol: T, max_pieces: usize) -> Result<[Complex<T>; K]>
where
    F: Fn(T) -> [Complex<T>; K],
{
    let len = (b - a).abs();
    let mut total = [czero::<T>(); K];
    if len == T::zero() {
        return Ok(total);
    }
    let mut stack = vec![(a, b)];
    let mut pieces = 0usize;
    let mut worst = T::zero();
    let min_len = len * T::eps() * T::lit(64.0);
    while let Some((lo, hi)) = stack.pop() {
        pieces += 1;
        let (val, err) = gk15(f, lo, hi);
        let share = tol * ((hi - lo) / len).abs();
        let accept = err <= share || (hi - lo).abs() <= min_len;
        if accept || pieces > max_pieces {
            if !accept {
                worst = worst.max(err);
            }
            for c in 0..K {
                total[c] += val[c];
            }
        } else {
            let m = (lo + hi) * T::lit(0.5);
            stack.push((m, hi));
            stack.push((lo, m));
        }
    }
    if pieces > max_pieces && worst > tol {
        return Err(Error::QuadratureNonconvergence { tol: tol.as_f64(), estimate: worst.as_f64(), panels: pieces });
    }
    Ok(total)
}

/// Integrates over `[a, b]` split into equal panels no wider than
/// `max_width`, each handled by [`adaptive`].
pub fn panelled<T: Real, const K: usize, F>(f: &F, a: T, b: T, max_width: T, tol: T) -> Result<[Complex<T>; K]>
where
    F: Fn(T) -> [Complex<T>; K],
{
    let len = b - a;
    let mut n = 1usize;
    if max_width > T::zero() && max_width.is_finite() {
        let q = (len / max_width).ceil().as_f64();
        n = q.max(1.0) as usize;
    }
    let h = len / T::from_usize_lossy(n);
    let mut total = [czero::<T>(); K];
    let per = tol / T::from_usize_lossy(n);
    for p in 0..n {
        let lo = a + h * T::from_usize_lossy(p);
        let hi = if p + 1 == n { b } else { lo + h };
        let v = adaptive(f, lo, hi, per, 4000)?;
        for c in 0..K {
            total[c] += v[c];
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        for n in 1..12 {
            let (x, w) = gauss_legendre::<f64>(n);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn legendre_nodes_ascending() {
        let (x, _) = gauss_legendre::<f64>(7);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(x[3], 0.0);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let f = |x: f64| [Complex::new(x.cos(), -x.sin())];
        let v = panelled(&f, 0.0, 30.0, 0.5, 1e-12).unwrap();
        let exact = Complex::new(30f64.sin(), 30f64.cos() - 1.0);
        assert!((v[0] - exact).norm() < 1e-11);
    }

    #[test]
    fn adaptive_f32() {
        let f = |x: f32| [Complex::new(x * x, 0.0)];
        let v = adaptive(&f, 0.0f32, 1.0, 1e-5, 100).unwrap();
        assert!((v[0].re - 1.0 / 3.0).abs() < 1e-6);
    }
}
