//! Lawson–Hanson active-set nonnegative least squares.

use nalgebra::{DMatrix, DVector};

use crate::linalg::lstsq_real;
use crate::scalar::Real;

/// Solves `min ||A x - b||` subject to `x >= 0`.
pub fn nnls<T: Real>(a: &DMatrix<T>, b: &DVector<T>) -> DVector<T> {
    let n = a.ncols();
    let mut x = DVector::<T>::zeros(n);
    let mut passive = vec![false; n];
    let tol = T::eps() * T::lit(10.0) * a.norm() * b.norm().max(T::one());
    let subsolve = |passive: &[bool]| -> DVector<T> {
        let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
        let mut s = DVector::<T>::zeros(n);
        if idx.is_empty() {
            return s;
        }
        let ap = DMatrix::from_fn(a.nrows(), idx.len(), |r, c| a[(r, idx[c])]);
        let Ok(sol) = lstsq_real(&ap, b, T::eps()) else {
            return s;
        };
        for (c, &j) in idx.iter().enumerate() {
            s[j] = sol[c];
        }
        s
    };
    for _outer in 0..(3 * n + 3) {
        let w = a.tr_mul(&(b - a * &x));
        let cand = (0..n).filter(|&j| !passive[j] && w[j] > tol).max_by(|&i, &j| w[i].partial_cmp(&w[j]).unwrap());
        let Some(j) = cand else { break };
        passive[j] = true;
        let mut s = subsolve(&passive);
        for _inner in 0..(3 * n + 3) {
            if (0..n).all(|i| !passive[i] || s[i] > T::zero()) {
                break;
            }
            let mut alpha = T::one();
            for i in 0..n {
                if passive[i] && s[i] <= T::zero() {
                    alpha = alpha.min(x[i] / (x[i] - s[i]));
                }
            }
            x += (&s - &x) * alpha;
            for i in 0..n {
                if passive[i] && x[i] <= tol {
                    passive[i] = false;
                    x[i] = T::zero();
                }
            }
            s = subsolve(&passive);
        }
        x = s;
    }
    x.iter_mut().for_each(|v| *v = v.max(T::zero()));
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_optimum_inside_orthant() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0f64, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let x = nnls(&a, &b);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn clamps_negative_component() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0f64, 0.0, 0.0, 1.0]);
        let b = DVector::from_vec(vec![-1.0, 2.0]);
        let x = nnls(&a, &b);
        assert_eq!(x[0], 0.0);
        assert!((x[1] - 2.0).abs() < 1e-12);
    }
}
