use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::Result;
use crate::linalg::hermitian_eigen;
use crate::quadrature::gauss_legendre_on;
use crate::scalar::{cplx, czero, Real};
use crate::spectral::{BcfSamples, SpectralDensity, Statistics};

use super::lsq::design;
use super::nelder_mead::minimize;
use super::nnls::nnls;
use super::{fit_error, ExponentialFit, FitReport};

/// Settings for [`fit_positive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositiveOptions<T> {
    /// Range of `Im z` over which initial frequencies are spread.
    pub window: (T, T),
    /// Objective-evaluation budget of the outer search.
    pub max_evals: usize,
    /// Projected-gradient iterations of the matrix-weight inner solve.
    pub inner_iters: usize,
}

impl<T: Real> PositiveOptions<T> {
    pub fn new(window: (T, T)) -> Self {
        Self { window, max_evals: 2000, inner_iters: 400 }
    }

    /// Window matching the occupation range probed by `statistics`.
    pub fn for_density(j: &SpectralDensity<T>, statistics: Statistics) -> Self {
        let (lo, hi) = j.effective_support();
        let window = match statistics {
            Statistics::Boson => (lo, hi),
            Statistics::FermionGreater => (lo.max(T::zero()), hi),
            Statistics::FermionLesser => (-(hi.min(T::zero())), -lo),
        };
        Self::new(window)
    }
}

/// Exponential fit with nonnegative scalar or PSD matrix weights.
///
/// Exponents are optimized by Nelder–Mead with `Re z = p^2`; weights for
/// fixed exponents come from nonnegative least squares (one site) or a
/// PSD-projected gradient solve (several sites).
pub fn fit_positive<T: Real>(
    samples: &BcfSamples<T>,
    n_exp: usize,
    opts: &PositiveOptions<T>,
) -> Result<(ExponentialFit<T>, FitReport<T>)> {
    if n_exp == 0 {
        let fit = ExponentialFit::empty(samples.statistics);
        let rep = fit_error(&fit, samples);
        return Ok((fit, rep));
    }
    let (lo, hi) = opts.window;
    let width = (hi - lo).abs().max(T::eps());
    let (nodes, _) = gauss_legendre_on::<T>(n_exp, lo, hi);
    let re0 = T::lit(0.1) * width / T::from_usize_lossy(n_exp);
    let mut x0: Vec<T> = vec![re0.sqrt(); n_exp];
    x0.extend(nodes.iter().copied());
    let mut steps: Vec<T> = vec![re0.sqrt() * T::lit(0.5); n_exp];
    steps.extend(std::iter::repeat_n(width / T::from_usize_lossy(4 * n_exp), n_exp));

    let ns = samples.n_sites();
    let inner = |z: &[Complex<T>]| -> Vec<DMatrix<Complex<T>>> {
        if ns == 1 {
            scalar_weights(samples, z)
        } else {
            psd_weights(samples, z, opts.inner_iters)
        }
    };
    let objective = |x: &[T]| -> T {
        let z = exponents_of(x);
        let fit = ExponentialFit::new(z.clone(), inner(&z), samples.statistics);
        fit_error(&fit, samples).fit_error
    };
    let best = minimize(objective, &x0, &steps, opts.max_evals, T::lit(1e-13).max(T::eps()));
    let z = exponents_of(&best.x);
    let w = inner(&z);

    let mut order: Vec<usize> = (0..n_exp).collect();
    order.sort_by(|&a, &b| (z[a].im, z[a].re).partial_cmp(&(z[b].im, z[b].re)).unwrap_or(std::cmp::Ordering::Equal));
    let fit = ExponentialFit::new(order.iter().map(|&k| z[k]).collect(), order.iter().map(|&k| w[k].clone()).collect(), samples.statistics);
    let mut rep = fit_error(&fit, samples);
    rep.evaluations = best.evaluations;
    if best.stalled {
        rep.warnings.push(format!("optimizer stopped at the {}-evaluation budget; returning best iterate", opts.max_evals));
    }
    Ok((fit, rep))
}

fn exponents_of<T: Real>(x: &[T]) -> Vec<Complex<T>> {
    let n = x.len() / 2;
    (0..n).map(|k| cplx(x[k] * x[k], x[n + k])).collect()
}

fn scalar_weights<T: Real>(samples: &BcfSamples<T>, z: &[Complex<T>]) -> Vec<DMatrix<Complex<T>>> {
    let a = design(&samples.times, z);
    let m = a.nrows();
    let stacked = DMatrix::from_fn(2 * m, z.len(), |r, k| if r < m { a[(r, k)].re } else { a[(r - m, k)].im });
    let c = samples.series(0, 0);
    let b = DVector::from_fn(2 * m, |r, _| if r < m { c[r].re } else { c[r - m].im });
    let w = nnls(&stacked, &b);
    w.iter().map(|&v| DMatrix::from_element(1, 1, cplx(v, T::zero()))).collect()
}

/// Hermitian part of `m` with negative eigenvalues clipped to zero.
pub(crate) fn project_psd<T: Real>(m: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    let h = (m + m.adjoint()) * cplx(T::lit(0.5), T::zero());
    let n = m.nrows();
    let mut out = DMatrix::from_element(n, n, czero());
    let Ok((vals, vecs)) = hermitian_eigen(&h) else {
        return out;
    };
    for (i, &lam) in vals.iter().enumerate() {
        if lam > T::zero() {
            let v = vecs.column(i);
            out += v * v.adjoint() * cplx(lam, T::zero());
        }
    }
    out
}

/// Accelerated projected gradient for PSD weights at fixed exponents.
fn psd_weights<T: Real>(samples: &BcfSamples<T>, z: &[Complex<T>], iters: usize) -> Vec<DMatrix<Complex<T>>> {
    let k = z.len();
    let ns = samples.n_sites();
    let a = design(&samples.times, z);
    let gram = a.adjoint() * &a;
    let lmax = hermitian_eigen(&gram).map(|(e, _)| e.iter().fold(T::zero(), |m, &v| m.max(v))).unwrap_or(T::zero());
    if !(lmax > T::zero()) {
        return vec![DMatrix::from_element(ns, ns, czero()); k];
    }
    let step = cplx(T::one() / lmax, T::zero());
    let b: Vec<DMatrix<Complex<T>>> = (0..k)
        .map(|kk| samples.values.iter().enumerate().fold(DMatrix::from_element(ns, ns, czero()), |acc, (t, c)| acc + c * a[(t, kk)].conj()))
        .collect();
    let grad = |w: &[DMatrix<Complex<T>>], kk: usize| -> DMatrix<Complex<T>> {
        let mut g = -b[kk].clone();
        for (l, wl) in w.iter().enumerate() {
            g += wl * gram[(kk, l)];
        }
        g
    };
    let mut w: Vec<DMatrix<Complex<T>>> = vec![DMatrix::from_element(ns, ns, czero()); k];
    let mut y = w.clone();
    let mut theta = T::one();
    for _ in 0..iters {
        let next: Vec<_> = (0..k).map(|kk| project_psd(&(&y[kk] - grad(&y, kk) * step))).collect();
        let theta_next = (T::one() + (T::one() + T::lit(4.0) * theta * theta).sqrt()) * T::lit(0.5);
        let mom = cplx((theta - T::one()) / theta_next, T::zero());
        let change: T = (0..k).map(|kk| (&next[kk] - &w[kk]).norm()).fold(T::zero(), |s, v| s + v);
        y = (0..k).map(|kk| &next[kk] + (&next[kk] - &w[kk]) * mom).collect();
        w = next;
        theta = theta_next;
        let size: T = w.iter().map(|m| m.norm()).fold(T::zero(), |s, v| s + v);
        if change <= T::eps() * T::lit(10.0) * size.max(T::eps()) {
            break;
        }
    }
    w
}
