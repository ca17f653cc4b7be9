//! Dense factorizations routed through faer in double precision.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{c64_of, c_from64, Real};

type C64 = faer::c64;

fn to_faer<T: Real>(m: &DMatrix<Complex<T>>) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| c64_of(m[(i, j)]))
}

fn from_faer<T: Real>(m: faer::MatRef<'_, C64>) -> DMatrix<Complex<T>> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| c_from64(m[(i, j)]))
}

/// Thin singular value decomposition `A = U diag(s) V^dagger`, singular
/// values in nonincreasing order.
pub(crate) struct Svd<T: Real> {
    pub u: DMatrix<Complex<T>>,
    pub s: Vec<T>,
    pub v: DMatrix<Complex<T>>,
}

pub(crate) fn svd<T: Real>(a: &DMatrix<Complex<T>>) -> Result<Svd<T>> {
    let f = to_faer(a).thin_svd().map_err(|e| Error::Linalg(format!("{e:?}")))?;
    let s = f.S().column_vector().iter().map(|x| T::lit(x.re)).collect();
    Ok(Svd { u: from_faer(f.U()), s, v: from_faer(f.V()) })
}

/// Minimum-norm least-squares solution of `A X = B`, discarding singular
/// values below `rcond * s_max`.
pub(crate) fn lstsq<T: Real>(a: &DMatrix<Complex<T>>, b: &DMatrix<Complex<T>>, rcond: T) -> Result<DMatrix<Complex<T>>> {
    let Svd { u, s, v } = svd(a)?;
    let smax = s.first().copied().unwrap_or(T::zero());
    let mut ub = u.adjoint() * b;
    for (k, &sk) in s.iter().enumerate() {
        let inv = if sk > rcond * smax && sk > T::zero() { T::one() / sk } else { T::zero() };
        ub.row_mut(k).iter_mut().for_each(|x| *x *= inv);
    }
    Ok(v * ub)
}

/// Real counterpart of [`lstsq`].
pub(crate) fn lstsq_real<T: Real>(a: &DMatrix<T>, b: &nalgebra::DVector<T>, rcond: T) -> Result<nalgebra::DVector<T>> {
    let ac = a.map(|x| Complex::new(x, T::zero()));
    let bc = DMatrix::from_iterator(b.len(), 1, b.iter().map(|&x| Complex::new(x, T::zero())));
    let x = lstsq(&ac, &bc, rcond)?;
    Ok(nalgebra::DVector::from_iterator(x.nrows(), x.iter().map(|c| c.re)))
}

/// Eigenvalues (nondecreasing) and eigenvectors of a Hermitian matrix.
pub(crate) fn hermitian_eigen<T: Real>(h: &DMatrix<Complex<T>>) -> Result<(Vec<T>, DMatrix<Complex<T>>)> {
    let f = to_faer(h).self_adjoint_eigen(faer::Side::Lower).map_err(|e| Error::Linalg(format!("{e:?}")))?;
    let e = f.S().column_vector().iter().map(|x| T::lit(x.re)).collect();
    Ok((e, from_faer(f.U())))
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues<T: Real>(m: &DMatrix<Complex<T>>) -> Result<Vec<Complex<T>>> {
    let ev = to_faer(m).eigenvalues().map_err(|e| Error::Linalg(format!("{e:?}")))?;
    Ok(ev.into_iter().map(c_from64::<T>).collect())
}
