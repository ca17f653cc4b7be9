use nalgebra::DMatrix;
use num_complex::Complex;

use crate::quadrature::gauss_legendre_on;
use crate::scalar::{cis, cplx, czero, Real};
use crate::spectral::{SpectralDensity, Statistics};

use super::ExponentialFit;

/// Finite set of bath modes with frequencies `omega_k` and site couplings
/// `g_{jk}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBath<T: Real> {
    pub frequencies: Vec<T>,
    /// `n_sites x n_modes`
    pub couplings: DMatrix<Complex<T>>,
}

impl<T: Real> DiscreteBath<T> {
    pub fn n_modes(&self) -> usize {
        self.frequencies.len()
    }

    /// `sum_k g_k g_k^dagger exp(-i omega_k t)`
    pub fn bcf(&self, t: T) -> DMatrix<Complex<T>> {
        let ns = self.couplings.nrows();
        let mut out = DMatrix::from_element(ns, ns, czero());
        for (k, &w) in self.frequencies.iter().enumerate() {
            let g = self.couplings.column(k);
            out += g * g.adjoint() * cis(-w * t);
        }
        out
    }

    /// The same bath as an undamped exponential sum, `z_k = i omega_k`.
    pub fn to_fit(&self) -> ExponentialFit<T> {
        let z = self.frequencies.iter().map(|&w| cplx(T::zero(), w)).collect();
        let w = (0..self.n_modes())
            .map(|k| {
                let g = self.couplings.column(k);
                g * g.adjoint()
            })
            .collect();
        ExponentialFit::new(z, w, Statistics::Boson)
    }
}

/// Gauss–Legendre discretization over the (effective) support of `j`.
pub fn discretize_hamiltonian<T: Real>(j: &SpectralDensity<T>, n_modes: usize) -> DiscreteBath<T> {
    let (lo, hi) = j.effective_support();
    discretize_window(j, n_modes, lo, hi)
}

/// Gauss–Legendre discretization restricted to `[lo, hi]`.
pub fn discretize_window<T: Real>(j: &SpectralDensity<T>, n_modes: usize, lo: T, hi: T) -> DiscreteBath<T> {
    let (x, w) = gauss_legendre_on(n_modes, lo, hi);
    let ns = j.n_sites();
    let mut couplings = DMatrix::from_element(ns, n_modes, czero());
    for k in 0..n_modes {
        let g = j.factor(x[k]);
        let sw = w[k].sqrt();
        for s in 0..ns {
            couplings[(s, k)] = g[s] * sw;
        }
    }
    DiscreteBath { frequencies: x, couplings }
}
