//! Exponential-sum fits of sampled correlation functions.
//!
//! Three routes are offered: complex weights from ESPRIT exponents plus
//! linear least squares ([`fit_complex`]), nonnegative / positive
//! semidefinite weights from a constrained local search ([`fit_positive`]),
//! and a Gauss–Legendre discretization of the spectral density
//! ([`discretize_hamiltonian`]).

mod discrete;
mod esprit;
mod lsq;
pub mod nelder_mead;
pub mod nnls;
mod positive;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{c64_of, c_from64, cabs, cexp, czero, Real};
use crate::spectral::{BcfSamples, SpectralDensity, Statistics};

pub use discrete::{discretize_hamiltonian, discretize_window, DiscreteBath};
pub use esprit::{esprit_exponents, esprit_signal};
pub use lsq::{lsq_weights, LsqSolution, ILL_CONDITIONED};
pub use positive::{fit_positive, PositiveOptions};

/// Exponents below this real part count as growing and are rejected.
pub const GROWTH_TOL: f64 = 1e-10;

/// `C(t) ~ sum_k W_k exp(-z_k t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialFit<T: Real> {
    pub exponents: Vec<Complex<T>>,
    pub weights: Vec<DMatrix<Complex<T>>>,
    pub statistics: Statistics,
}

impl<T: Real> ExponentialFit<T> {
    pub fn new(exponents: Vec<Complex<T>>, weights: Vec<DMatrix<Complex<T>>>, statistics: Statistics) -> Self {
        assert_eq!(exponents.len(), weights.len(), "one weight per exponent");
        Self { exponents, weights, statistics }
    }

    /// Single-site fit from scalar weights.
    pub fn scalar(exponents: Vec<Complex<T>>, weights: Vec<Complex<T>>, statistics: Statistics) -> Self {
        let w = weights.into_iter().map(|w| DMatrix::from_element(1, 1, w)).collect();
        Self::new(exponents, w, statistics)
    }

    pub fn empty(statistics: Statistics) -> Self {
        Self { exponents: vec![], weights: vec![], statistics }
    }

    pub fn n_exp(&self) -> usize {
        self.exponents.len()
    }

    pub fn n_sites(&self) -> Option<usize> {
        self.weights.first().map(|w| w.nrows())
    }

    pub fn evaluate(&self, t: T, n_sites: usize) -> DMatrix<Complex<T>> {
        let mut out = DMatrix::from_element(n_sites, n_sites, czero());
        for (z, w) in self.exponents.iter().zip(&self.weights) {
            out += w * cexp(-*z * t);
        }
        out
    }

    /// Smallest real part among the exponents.
    pub fn min_decay(&self) -> Option<T> {
        self.exponents.iter().map(|z| z.re).reduce(|a, b| a.min(b))
    }
}

/// Quality of a fit on its sampling grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitReport<T> {
    /// `dt * sqrt(sum over grid and entries of |residual|^2)`
    pub fit_error: T,
    pub max_abs_error: T,
    pub n_exp: usize,
    /// Growing exponents removed before the final weights were computed.
    pub dropped: usize,
    pub evaluations: usize,
    pub warnings: Vec<String>,
}

/// Scores `fit` against `samples`.
pub fn fit_error<T: Real>(fit: &ExponentialFit<T>, samples: &BcfSamples<T>) -> FitReport<T> {
    let ns = samples.n_sites();
    let mut sq = T::zero();
    let mut worst = T::zero();
    for (t, c) in samples.times.iter().zip(&samples.values) {
        let r = c - fit.evaluate(*t, ns);
        for e in r.iter() {
            let a = cabs(*e);
            sq += a * a;
            worst = worst.max(a);
        }
    }
    FitReport { fit_error: samples.dt * sq.sqrt(), max_abs_error: worst, n_exp: fit.n_exp(), ..Default::default() }
}

/// Scalar signal used to locate exponents: the single entry, or the sum of
/// all entries for matrix-valued samples.
pub(crate) fn reduced_signal<T: Real>(samples: &BcfSamples<T>) -> Vec<Complex<T>> {
    if samples.n_sites() == 1 {
        samples.series(0, 0)
    } else {
        samples.entry_sum()
    }
}

/// ESPRIT exponents followed by least-squares complex weights. Exponents
/// with `Re z < -1e-10` are dropped and the weights recomputed.
pub fn fit_complex<T: Real>(samples: &BcfSamples<T>, n_exp: usize) -> Result<(ExponentialFit<T>, FitReport<T>)> {
    if n_exp == 0 {
        let fit = ExponentialFit::empty(samples.statistics);
        let rep = fit_error(&fit, samples);
        return Ok((fit, rep));
    }
    let all = esprit_exponents(samples, n_exp)?;
    let keep: Vec<_> = all.iter().copied().filter(|z| z.re >= -T::lit(GROWTH_TOL)).collect();
    let dropped = all.len() - keep.len();
    let sol = lsq_weights(samples, &keep)?;
    let fit = ExponentialFit::new(keep, sol.weights, samples.statistics);
    let mut rep = fit_error(&fit, samples);
    rep.dropped = dropped;
    rep.warnings = sol.warnings;
    if dropped > 0 {
        rep.warnings.push(format!("dropped {dropped} growing exponent(s) and refitted"));
    }
    Ok((fit, rep))
}

/// The three ways of producing `n_exp` bath terms compared throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMethod {
    /// Complex weights, [`fit_complex`].
    QuasiLindblad,
    /// Nonnegative weights, [`fit_positive`].
    Lorentzian,
    /// Undamped Gauss–Legendre modes, [`discretize_hamiltonian`] (bosons only).
    Discrete,
}

impl FitMethod {
    pub const ALL: [FitMethod; 3] = [FitMethod::QuasiLindblad, FitMethod::Lorentzian, FitMethod::Discrete];

    pub fn as_str(self) -> &'static str {
        match self {
            FitMethod::QuasiLindblad => "quasi-lindblad",
            FitMethod::Lorentzian => "lorentzian",
            FitMethod::Discrete => "discrete",
        }
    }
}

/// Fits `samples` of the correlation function of `j` with `method`.
pub fn fit_with<T: Real>(
    method: FitMethod,
    j: &SpectralDensity<T>,
    samples: &BcfSamples<T>,
    n_exp: usize,
) -> Result<(ExponentialFit<T>, FitReport<T>)> {
    match method {
        FitMethod::QuasiLindblad => fit_complex(samples, n_exp),
        FitMethod::Lorentzian => fit_positive(samples, n_exp, &PositiveOptions::for_density(j, samples.statistics)),
        FitMethod::Discrete => {
            if samples.statistics != Statistics::Boson {
                return Err(Error::InvalidInput("discrete baths are only offered for bosonic correlation functions".into()));
            }
            let fit = discretize_hamiltonian(j, n_exp).to_fit();
            let rep = fit_error(&fit, samples);
            Ok((fit, rep))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FitJson {
    statistics: Statistics,
    exponents: Vec<[f64; 2]>,
    weights: Vec<Vec<[f64; 2]>>,
    fit_error: f64,
}

impl<T: Real> ExponentialFit<T> {
    /// JSON document with row-major weight entries.
    pub fn to_json(&self, fit_error: T) -> serde_json::Value {
        let pair = |z: Complex<T>| {
            let z = c64_of(z);
            [z.re, z.im]
        };
        let doc = FitJson {
            statistics: self.statistics,
            exponents: self.exponents.iter().map(|&z| pair(z)).collect(),
            weights: self.weights.iter().map(|w| w.transpose().iter().map(|&e| pair(e)).collect()).collect(),
            fit_error: fit_error.as_f64(),
        };
        serde_json::to_value(doc).expect("plain data serializes")
    }

    /// Inverse of [`ExponentialFit::to_json`]; returns the stored fit error too.
    pub fn from_json(v: &serde_json::Value) -> std::result::Result<(Self, T), serde_json::Error> {
        let doc: FitJson = serde_json::from_value(v.clone())?;
        let c = |p: &[f64; 2]| c_from64::<T>(Complex::new(p[0], p[1]));
        let weights = doc
            .weights
            .iter()
            .map(|w| {
                let n = (w.len() as f64).sqrt().round() as usize;
                DMatrix::from_row_iterator(n, n, w.iter().map(c))
            })
            .collect();
        let fit = ExponentialFit::new(doc.exponents.iter().map(c).collect(), weights, doc.statistics);
        Ok((fit, T::lit(doc.fit_error)))
    }
}
