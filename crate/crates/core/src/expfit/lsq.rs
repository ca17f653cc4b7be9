use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigen;
use crate::scalar::{cabs, cexp, Real};
use crate::spectral::BcfSamples;

/// Condition number of the equilibrated design matrix above which a
/// warning is attached to the solution.
pub const ILL_CONDITIONED: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct LsqSolution<T: Real> {
    pub weights: Vec<DMatrix<Complex<T>>>,
    /// 2-norm condition number of the column-equilibrated design matrix.
    pub condition: T,
    pub warnings: Vec<String>,
}

/// Design matrix `A_{ak} = exp(-z_k t_a)`.
pub(crate) fn design<T: Real>(times: &[T], z: &[Complex<T>]) -> DMatrix<Complex<T>> {
    DMatrix::from_fn(times.len(), z.len(), |a, k| cexp(-z[k] * times[a]))
}

/// Entrywise least-squares weights for fixed exponents.
///
/// Solved through the normal equations of the column-equilibrated design
/// matrix, followed by one step of iterative refinement.
pub fn lsq_weights<T: Real>(samples: &BcfSamples<T>, exponents: &[Complex<T>]) -> Result<LsqSolution<T>> {
    let k = exponents.len();
    let ns = samples.n_sites();
    for i in 0..k {
        for j in 0..i {
            if !(cabs(exponents[i] - exponents[j]) > T::lit(1e-12)) {
                return Err(Error::InvalidInput(format!("exponents {j} and {i} coincide")));
            }
        }
    }
    if k == 0 {
        return Ok(LsqSolution { weights: vec![], condition: T::one(), warnings: vec![] });
    }
    let a = design(&samples.times, exponents);
    let scale: Vec<T> = (0..k).map(|c| a.column(c).norm()).collect();
    let mut ae = a.clone();
    for (c, &s) in scale.iter().enumerate() {
        ae.column_mut(c).unscale_mut(s);
    }
    let rhs = DMatrix::from_fn(samples.len(), ns * ns, |t, e| samples.values[t][(e / ns, e % ns)]);
    let aeh = ae.adjoint();
    let gram = &aeh * &ae;

    let (eig, _) = hermitian_eigen(&gram)?;
    let (lo, hi) = eig.iter().fold((T::max_value().unwrap(), T::zero()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let condition = if lo > T::zero() { (hi / lo).sqrt() } else { T::max_value().unwrap() };
    let mut warnings = vec![];
    if condition.as_f64() > ILL_CONDITIONED {
        warnings.push(format!("least-squares design matrix is ill-conditioned (cond = {:.3e})", condition.as_f64()));
    }

    let solve = |b: &DMatrix<Complex<T>>| -> Result<DMatrix<Complex<T>>> {
        if let Some(ch) = gram.clone().cholesky() {
            Ok(ch.solve(b))
        } else {
            gram.clone().lu().solve(b).ok_or_else(|| Error::Linalg("singular normal equations".into()))
        }
    };
    let mut y = solve(&(&aeh * &rhs))?;
    let resid = &rhs - &ae * &y;
    y += solve(&(&aeh * resid))?;

    let weights = (0..k).map(|c| DMatrix::from_fn(ns, ns, |i, j| y[(c, i * ns + j)] / scale[c])).collect();
    Ok(LsqSolution { weights, condition, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Statistics;

    #[test]
    fn recovers_single_weight() {
        let z = Complex::new(1.0, 2.0);
        let s = BcfSamples::from_scalar_fn(0.05, 200, Statistics::Boson, |t| cexp(-z * t) * 2.0);
        let sol = lsq_weights(&s, &[z]).unwrap();
        assert!((sol.weights[0][(0, 0)] - Complex::new(2.0, 0.0)).norm() < 1e-12);
        assert!(sol.warnings.is_empty());
    }

    #[test]
    fn coincident_exponents_rejected() {
        let s = BcfSamples::from_scalar_fn(0.1, 10, Statistics::Boson, |_| Complex::new(1.0, 0.0));
        let z = Complex::new(1.0, 0.0);
        assert!(lsq_weights(&s, &[z, z]).is_err());
    }
}
