//! Compressed sparse row matrices over complex scalars, with the handful of
//! operations needed to assemble superoperators.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::scalar::{czero, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct Csr<T: Real> {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<Complex<T>>,
}

impl<T: Real> Csr<T> {
    /// Assembles from unordered triplets, summing duplicates and dropping
    /// exact zeros.
    pub fn from_triplets(nrows: usize, ncols: usize, mut trip: Vec<(usize, usize, Complex<T>)>) -> Self {
        trip.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(trip.len());
        let mut data: Vec<Complex<T>> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trip {
            if last == Some((r, c)) {
                *data.last_mut().unwrap() += v;
                continue;
            }
            indices.push(c);
            data.push(v);
            indptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        Self { nrows, ncols, indptr, indices, data }.pruned()
    }

    fn pruned(self) -> Self {
        let zero = czero::<T>();
        if self.data.iter().all(|&v| v != zero) {
            return self;
        }
        Self::from_triplets(self.nrows, self.ncols, self.triplets().into_iter().filter(|t| t.2 != zero).collect())
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, indptr: vec![0; nrows + 1], indices: vec![], data: vec![] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![Complex::new(T::one(), T::zero()); n])
    }

    pub fn diagonal(d: &[Complex<T>]) -> Self {
        let n = d.len();
        Self::from_triplets(n, n, d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
    }

    pub fn from_dense(m: &DMatrix<Complex<T>>) -> Self {
        let mut t = vec![];
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)] != czero() {
                    t.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), t)
    }

    pub fn to_dense(&self) -> DMatrix<Complex<T>> {
        let mut m = DMatrix::from_element(self.nrows, self.ncols, czero());
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn triplets(&self) -> Vec<(usize, usize, Complex<T>)> {
        let mut out = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            for p in self.indptr[r]..self.indptr[r + 1] {
                out.push((r, self.indices[p], self.data[p]));
            }
        }
        out
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= c);
        out.pruned()
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.triplets().into_iter().map(|(r, c, v)| (c, r, v)).collect())
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut t = self.triplets();
        t.extend(other.triplets());
        Self::from_triplets(self.nrows, self.ncols, t)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut t = vec![];
        for r in 0..self.nrows {
            for p in self.indptr[r]..self.indptr[r + 1] {
                let (k, a) = (self.indices[p], self.data[p]);
                for q in other.indptr[k]..other.indptr[k + 1] {
                    t.push((r, other.indices[q], a * other.data[q]));
                }
            }
        }
        Self::from_triplets(self.nrows, other.ncols, t)
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut t = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, a) in self.triplets() {
            for (r2, c2, b) in other.triplets() {
                t.push((r1 * other.nrows + r2, c1 * other.ncols + c2, a * b));
            }
        }
        Self::from_triplets(self.nrows * other.nrows, self.ncols * other.ncols, t)
    }

    /// `y = A x`
    pub fn matvec_into(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        for r in 0..self.nrows {
            let mut acc = czero();
            for p in self.indptr[r]..self.indptr[r + 1] {
                acc += self.data[p] * x[self.indices[p]];
            }
            y[r] = acc;
        }
    }

    pub fn matvec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = vec![czero(); self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    /// `x^T A` as a dense row.
    pub fn vecmat(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = vec![czero(); self.ncols];
        for r in 0..self.nrows {
            for p in self.indptr[r]..self.indptr[r + 1] {
                y[self.indices[p]] += x[r] * self.data[p];
            }
        }
        y
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(crate::scalar::cabs(*v)))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        self.data.iter().fold(T::zero(), |s, v| s + v.norm_sqr()).sqrt()
    }
}

/// Bosonic annihilation operator truncated at `n_max` quanta.
pub fn annihilation<T: Real>(n_max: usize) -> Csr<T> {
    let t = (1..=n_max).map(|n| (n - 1, n, Complex::new(T::from_usize_lossy(n).sqrt(), T::zero()))).collect();
    Csr::from_triplets(n_max + 1, n_max + 1, t)
}

/// Embeds `op` acting on factor `site` of a tensor product with the given
/// factor dimensions.
pub fn embed<T: Real>(op: &Csr<T>, site: usize, dims: &[usize]) -> Csr<T> {
    let left: usize = dims[..site].iter().product();
    let right: usize = dims[site + 1..].iter().product();
    Csr::identity(left).kron(op).kron(&Csr::identity(right))
}

/// `vec(A X B) = (B^T (x) A) vec(X)` for column stacking.
pub fn sandwich<T: Real>(a: &Csr<T>, b: &Csr<T>) -> Csr<T> {
    b.transpose().kron(a)
}

/// Left multiplication `X -> A X`.
pub fn spre<T: Real>(a: &Csr<T>) -> Csr<T> {
    Csr::identity(a.nrows).kron(a)
}

/// Right multiplication `X -> X B`.
pub fn spost<T: Real>(b: &Csr<T>) -> Csr<T> {
    b.transpose().kron(&Csr::identity(b.nrows))
}
