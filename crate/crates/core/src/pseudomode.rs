//! Quasi-Lindblad pseudomode models built from exponential fits.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expfit::ExponentialFit;
use crate::linalg;
use crate::scalar::{c64_of, c_from64, cabs, cexp, ci, cone, cplx, csqrt, czero, Real};
use crate::spectral::Statistics;

/// Relative singular-value cutoff when splitting a matrix weight into
/// rank-one sub-modes.
pub const SUBMODE_CUTOFF: f64 = 1e-12;

/// Damped auxiliary modes `z_k = gamma_k + i E_k` (lesser baths store
/// `gamma_k - i E_k`) coupled through `V` and `M` (`n_sites x n_modes`).
#[derive(Debug, Clone, PartialEq)]
pub struct PseudomodeModel<T: Real> {
    pub z: Vec<Complex<T>>,
    pub v: DMatrix<Complex<T>>,
    pub m: DMatrix<Complex<T>>,
    pub statistics: Statistics,
    pub kappa: Vec<Complex<T>>,
}

/// Splits a weight `w` into `(v, m)` with `v - i m = kappa sqrt(w)` and
/// `v + i m = conj(sqrt(w)) / conj(kappa)`.
pub fn gauge_single<T: Real>(w: Complex<T>, kappa: Complex<T>) -> (Complex<T>, Complex<T>) {
    let r = csqrt(w);
    let a = r * kappa;
    let b = r.conj() / kappa.conj();
    let half = cplx(T::lit(0.5), T::zero());
    ((a + b) * half, ci::<T>() * (a - b) * half)
}

/// The gauge with the smallest `|m|`: `v = Re sqrt(w)`, `m = -Im sqrt(w)`.
pub fn gauge_min_m<T: Real>(w: Complex<T>) -> (T, T) {
    let r = csqrt(w);
    (r.re, -r.im)
}

impl<T: Real> PseudomodeModel<T> {
    pub fn n_sites(&self) -> usize {
        self.v.nrows()
    }

    pub fn n_modes(&self) -> usize {
        self.z.len()
    }

    /// Single-site model with one mode per `(z, w)` pair in the given gauge.
    pub fn scalar(z: &[Complex<T>], w: &[Complex<T>], kappa: &[Complex<T>], statistics: Statistics) -> Self {
        let fit = ExponentialFit::scalar(z.to_vec(), w.to_vec(), statistics);
        from_fit(&fit, kappa).expect("scalar fits are always decomposable")
    }

    /// `gamma_k = Re z_k`
    pub fn gamma(&self) -> Vec<T> {
        self.z.iter().map(|z| z.re).collect()
    }

    /// Mode energies `E_k` (sign convention folded in for lesser baths).
    pub fn energies(&self) -> Vec<T> {
        match self.statistics {
            Statistics::FermionLesser => self.z.iter().map(|z| -z.im).collect(),
            _ => self.z.iter().map(|z| z.im).collect(),
        }
    }

    /// `V - i M`
    pub fn left(&self) -> DMatrix<Complex<T>> {
        &self.v - &self.m * ci::<T>()
    }

    /// `V + i M`
    pub fn right(&self) -> DMatrix<Complex<T>> {
        &self.v + &self.m * ci::<T>()
    }

    pub fn with_v(mut self, v: DMatrix<Complex<T>>) -> Self {
        self.v = v;
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pair = |z: &Complex<T>| {
            let z = c64_of(*z);
            [z.re, z.im]
        };
        let mat = |m: &DMatrix<Complex<T>>| (0..m.nrows()).map(|i| m.row(i).iter().map(pair).collect()).collect();
        serde_json::to_value(ModelJson {
            statistics: self.statistics,
            z: self.z.iter().map(pair).collect(),
            v: mat(&self.v),
            m: mat(&self.m),
            kappa: self.kappa.iter().map(pair).collect(),
        })
        .expect("plain data serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: ModelJson = serde_json::from_value(value.clone()).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let c = |p: &[f64; 2]| c_from64::<T>(Complex::new(p[0], p[1]));
        let mat = |rows: &Vec<Vec<[f64; 2]>>| -> Result<DMatrix<Complex<T>>> {
            let n = doc.z.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(Error::DimensionMismatch("coupling rows must have one entry per mode".into()));
            }
            Ok(DMatrix::from_row_iterator(rows.len(), n, rows.iter().flatten().map(c)))
        };
        Ok(Self {
            z: doc.z.iter().map(c).collect(),
            v: mat(&doc.v)?,
            m: mat(&doc.m)?,
            statistics: doc.statistics,
            kappa: doc.kappa.iter().map(c).collect(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    statistics: Statistics,
    z: Vec<[f64; 2]>,
    #[serde(rename = "V")]
    v: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "M")]
    m: Vec<Vec<[f64; 2]>>,
    kappa: Vec<[f64; 2]>,
}

/// Converts a fit into pseudomodes. `kappa` holds one gauge factor per fit
/// term; an empty slice means `kappa = 1` throughout.
///
/// Matrix weights are split by singular value decomposition into rank-one
/// sub-modes sharing the exponent of their parent term.
pub fn from_fit<T: Real>(fit: &ExponentialFit<T>, kappa: &[Complex<T>]) -> Result<PseudomodeModel<T>> {
    let n_exp = fit.n_exp();
    if !kappa.is_empty() && kappa.len() != n_exp {
        return Err(Error::DimensionMismatch(format!("{} gauge factors for {} terms", kappa.len(), n_exp)));
    }
    let kap = |k: usize| if kappa.is_empty() { cone::<T>() } else { kappa[k] };
    if (0..n_exp).any(|k| cabs(kap(k)) == T::zero()) {
        return Err(Error::InvalidInput("gauge factors must be nonzero".into()));
    }
    let ns = fit.n_sites().unwrap_or(1);
    let lesser = fit.statistics == Statistics::FermionLesser;
    let target = |k: usize| if lesser { fit.weights[k].map(|c| c.conj()) } else { fit.weights[k].clone() };

    // (exponent, kappa, left column, right column) per sub-mode
    let mut modes: Vec<(T, Complex<T>, Complex<T>, Vec<Complex<T>>, Vec<Complex<T>>)> = vec![];
    for k in 0..n_exp {
        let w = target(k);
        let kk = kap(k);
        if ns == 1 {
            let r = csqrt(w[(0, 0)]);
            modes.push((cabs(w[(0, 0)]), fit.exponents[k], kk, vec![r * kk], vec![r.conj() / kk.conj()]));
            continue;
        }
        let svd = linalg::svd(&w)?;
        let smax = svd.s[0];
        for (s, &sig) in svd.s.iter().enumerate() {
            if !(sig > T::lit(SUBMODE_CUTOFF) * smax) {
                continue;
            }
            let ucol: Vec<Complex<T>> = svd.u.column(s).iter().copied().collect();
            let vcol: Vec<Complex<T>> = svd.v.column(s).iter().copied().collect();
            let big = ucol.iter().copied().fold(czero::<T>(), |best, c| if cabs(c) > cabs(best) { c } else { best });
            let phase = big.conj() / cabs(big);
            let root = sig.sqrt();
            let a = ucol.iter().map(|c| *c * phase * root * kk).collect();
            let b = vcol.iter().map(|c| *c * phase * root / kk.conj()).collect();
            modes.push((smax, fit.exponents[k], kk, a, b));
        }
    }
    // stable sort keeps sub-mode order within each parent term
    modes.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));

    let nm = modes.len();
    let half = cplx(T::lit(0.5), T::zero());
    let mut v = DMatrix::from_element(ns, nm, czero());
    let mut m = DMatrix::from_element(ns, nm, czero());
    for (n, (_, _, _, a, b)) in modes.iter().enumerate() {
        for j in 0..ns {
            v[(j, n)] = (a[j] + b[j]) * half;
            m[(j, n)] = ci::<T>() * (a[j] - b[j]) * half;
        }
    }
    Ok(PseudomodeModel {
        z: modes.iter().map(|x| x.1).collect(),
        v,
        m,
        statistics: fit.statistics,
        kappa: modes.iter().map(|x| x.2).collect(),
    })
}

/// Closed-form correlation function of the model.
pub fn model_bcf<T: Real>(model: &PseudomodeModel<T>, t: T) -> DMatrix<Complex<T>> {
    let (l, r) = (model.left(), model.right());
    let mut l = if model.statistics == Statistics::FermionLesser { l.map(|c| c.conj()) } else { l };
    for (k, z) in model.z.iter().enumerate() {
        let e = cexp(-*z * t);
        l.column_mut(k).iter_mut().for_each(|x| *x *= e);
    }
    match model.statistics {
        Statistics::FermionLesser => l * r.transpose(),
        _ => l * r.adjoint(),
    }
}

/// The dissipator coefficient matrix `[[0, M], [M^dagger, Gamma]]` and
/// whether it is positive semidefinite (true exactly when `M = 0`).
pub fn lindbladian_gamma_tilde<T: Real>(model: &PseudomodeModel<T>) -> (DMatrix<Complex<T>>, bool) {
    let ns = model.n_sites();
    let nm = model.n_modes();
    let mut g = DMatrix::from_element(ns + nm, ns + nm, czero());
    g.view_mut((0, ns), (ns, nm)).copy_from(&model.m);
    g.view_mut((ns, 0), (nm, ns)).copy_from(&model.m.adjoint());
    for (k, z) in model.z.iter().enumerate() {
        g[(ns + k, ns + k)] = cplx(z.re, T::zero());
    }
    let scale = g.norm().max(T::one());
    let min_eig = linalg::hermitian_eigen(&g).map(|(e, _)| e[0]).unwrap_or(-T::max_value().unwrap());
    (g, min_eig >= -T::lit(1e-12) * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_examples() {
        let (v, m) = gauge_single(Complex::new(1.0, 0.0), Complex::new(2.0, 0.0));
        assert!((v - Complex::new(1.25, 0.0)).norm() < 1e-15);
        assert!((m - Complex::new(0.0, 0.75)).norm() < 1e-15);
        let (v, m) = gauge_min_m(Complex::new(-1.0f64, 0.0));
        assert!(v.abs() < 1e-15 && (m + 1.0).abs() < 1e-15);
        let (v, m) = gauge_single(Complex::new(4.0, 0.0), Complex::new(1.0, 0.0));
        assert_eq!((v, m), (Complex::new(2.0, 0.0), Complex::new(0.0, 0.0)));
    }

    #[test]
    fn negative_real_weight_still_factorizes() {
        let w = Complex::new(-3.0f64, 0.0);
        let (v, m) = gauge_single(w, Complex::new(0.7, 0.2));
        let a = v - Complex::<f64>::i() * m;
        let bc = v.conj() - Complex::<f64>::i() * m.conj();
        let err: f64 = (a * bc - w).norm();
        assert!(err < 1e-14);
    }

    #[test]
    fn tilde_gamma_flags_nonzero_m() {
        let model = PseudomodeModel::scalar(&[Complex::new(1.0f64, 0.0)], &[Complex::new(4.0, 0.0)], &[], Statistics::Boson);
        assert!(lindbladian_gamma_tilde(&model).1);
        let mut bad = model.clone();
        bad.m[(0, 0)] = Complex::new(0.5, 0.0);
        let (g, cp) = lindbladian_gamma_tilde(&bad);
        assert!(!cp);
        let e = g.symmetric_eigenvalues();
        let lo = e.iter().cloned().fold(f64::MAX, f64::min);
        assert!((lo - (1.0 - 2f64.sqrt()) / 2.0).abs() < 1e-14);
    }
}
