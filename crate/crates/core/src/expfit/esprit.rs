use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{cln, Real};
use crate::spectral::BcfSamples;

use super::reduced_signal;

/// Relative singular-value floor below which the Hankel matrix is treated
/// as rank deficient.
pub const RANK_TOL: f64 = 1e-14;

/// ESPRIT exponents of the (reduced) sampled correlation function.
pub fn esprit_exponents<T: Real>(samples: &BcfSamples<T>, n_exp: usize) -> Result<Vec<Complex<T>>> {
    esprit_signal(&reduced_signal(samples), samples.dt, n_exp, true)
}

/// ESPRIT on a uniformly sampled scalar signal.
///
/// With `strict`, a Hankel matrix whose `n_exp`-th singular value falls
/// below the rank floor is an error; otherwise only the numerically
/// supported modes are returned.
pub fn esprit_signal<T: Real>(c: &[Complex<T>], dt: T, n_exp: usize, strict: bool) -> Result<Vec<Complex<T>>> {
    let n = c.len();
    if n < 2 * n_exp + 1 {
        return Err(Error::TooFewSamples { needed: 2 * n_exp + 1, got: n });
    }
    if n_exp == 0 {
        return Ok(vec![]);
    }
    let rows = n.div_ceil(2);
    let cols = n - rows + 1;
    let h = DMatrix::from_fn(rows, cols, |a, b| c[a + b]);
    let svd = linalg::svd(&h)?;
    let s0 = svd.s[0];
    let floor = T::lit(RANK_TOL).max(T::eps() * T::lit(10.0));
    let s_last = svd.s[n_exp - 1];
    if strict && !(s_last > floor * s0) {
        let ratio = if s0 > T::zero() { (s_last / s0).as_f64() } else { 0.0 };
        return Err(Error::RankDeficient { index: n_exp, ratio });
    }
    let n_exp = svd.s.iter().take(n_exp).filter(|&&s| s > floor * s0).count();
    if n_exp == 0 {
        return Ok(vec![]);
    }
    let us = svd.u.columns(0, n_exp);
    let u1 = us.rows(0, rows - 1).into_owned();
    let u2 = us.rows(1, rows - 1).into_owned();
    let w = linalg::lstsq(&u1, &u2, T::eps())?;
    let lambda = linalg::eigenvalues(&w)?;
    let nyquist = T::pi() / dt - T::lit(1e-9);
    let mut z = Vec::with_capacity(n_exp);
    for k in 0..n_exp {
        let zk = -cln(lambda[k]) / dt;
        if zk.im.abs() >= nyquist {
            return Err(Error::Aliasing { z_im: zk.im.as_f64(), dt: dt.as_f64() });
        }
        z.push(zk);
    }
    z.sort_by(|a, b| (a.im, a.re).partial_cmp(&(b.im, b.re)).unwrap_or(std::cmp::Ordering::Equal));
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cexp;

    fn signal(terms: &[(Complex<f64>, Complex<f64>)], dt: f64, n: usize) -> Vec<Complex<f64>> {
        (0..n).map(|a| terms.iter().map(|&(w, z)| w * cexp(-z * (a as f64 * dt))).sum()).collect()
    }

    #[test]
    fn single_exponent() {
        let z0 = Complex::new(1.0, 2.0);
        let c = signal(&[(Complex::new(2.0, 0.0), z0)], 0.05, 200);
        let z = esprit_signal(&c, 0.05, 1, true).unwrap();
        assert!((z[0] - z0).norm() < 1e-10);
    }

    #[test]
    fn constant_signal_gives_zero() {
        let c = vec![Complex::new(1.0, 0.0); 50];
        let z = esprit_signal(&c, 0.1, 1, true).unwrap();
        assert!(z[0].norm() < 1e-12);
    }

    #[test]
    fn over_requesting_modes_is_rank_deficient() {
        let c = signal(&[(Complex::new(1.0, 0.0), Complex::new(1.0, 0.0))], 0.05, 100);
        assert!(matches!(esprit_signal(&c, 0.05, 3, true), Err(Error::RankDeficient { .. })));
        let z = esprit_signal(&c, 0.05, 3, false).unwrap();
        assert_eq!(z.len(), 1);
        assert!((z[0] - Complex::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn too_few_samples() {
        let c = vec![Complex::new(1.0, 0.0); 4];
        assert!(matches!(esprit_signal(&c, 0.1, 2, true), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn aliased_frequency_reported() {
        // Im z = pi/dt sits exactly on the Nyquist limit
        let dt = 0.1;
        let c = signal(&[(Complex::new(1.0, 0.0), Complex::new(0.2, std::f64::consts::PI / dt))], dt, 60);
        assert!(matches!(esprit_signal(&c, dt, 1, true), Err(Error::Aliasing { .. })));
    }
}
