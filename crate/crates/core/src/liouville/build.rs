use nalgebra::DMatrix;
use num_complex::Complex;

use super::ops::{annihilation, embed, sandwich, spost, spre, Csr};
use crate::error::{Error, Result};
use crate::pseudomode::{lindbladian_gamma_tilde, PseudomodeModel};
use crate::scalar::{ci, cplx, czero, Real};
use crate::spectral::Statistics;

/// Largest superoperator dimension `D^2` accepted by default.
pub const DEFAULT_DIM_CAP: usize = 4_000_000;

/// Occupation cutoff per pseudomode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockTruncation {
    pub n_max: Vec<usize>,
}

impl FockTruncation {
    pub fn uniform(n_max: usize, n_modes: usize) -> Self {
        Self { n_max: vec![n_max; n_modes] }
    }
}

/// Column-stacked generator together with the pieces it was built from.
#[derive(Debug, Clone)]
pub struct Liouvillian<T: Real> {
    /// Factor dimensions: system first, then one entry per mode.
    pub dims: Vec<usize>,
    pub generator: Csr<T>,
    pub h_aux: Csr<T>,
    pub gamma_tilde: DMatrix<Complex<T>>,
    /// `S_1..S_{N_S}, d_1..d_{N_A}` embedded in the full space.
    pub f_ops: Vec<Csr<T>>,
}

impl<T: Real> Liouvillian<T> {
    /// Hilbert-space dimension `D`.
    pub fn hilbert_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn dim(&self) -> usize {
        self.generator.nrows
    }

    /// `|| vec(I)^dagger L ||`, which vanishes for trace-preserving generators.
    pub fn trace_defect(&self) -> T {
        let d = self.hilbert_dim();
        let mut id = vec![czero::<T>(); d * d];
        for i in 0..d {
            id[i * d + i] = cplx(T::one(), T::zero());
        }
        self.generator.vecmat(&id).iter().fold(T::zero(), |s, v| s + v.norm_sqr()).sqrt()
    }
}

/// Builds `-i[H_aux, .] + sum_pq 2 Gt_pq (F_q . F_p^dagger - {F_p^dagger F_q, .}/2)`.
pub fn build_liouvillian<T: Real>(
    h_s: &DMatrix<Complex<T>>,
    s_ops: &[DMatrix<Complex<T>>],
    model: &PseudomodeModel<T>,
    trunc: &FockTruncation,
) -> Result<Liouvillian<T>> {
    build_liouvillian_capped(h_s, s_ops, model, trunc, DEFAULT_DIM_CAP)
}

pub fn build_liouvillian_capped<T: Real>(
    h_s: &DMatrix<Complex<T>>,
    s_ops: &[DMatrix<Complex<T>>],
    model: &PseudomodeModel<T>,
    trunc: &FockTruncation,
    cap: usize,
) -> Result<Liouvillian<T>> {
    if model.statistics != Statistics::Boson {
        return Err(Error::InvalidInput("Fock-space generators need a bosonic model".into()));
    }
    let ds = h_s.nrows();
    if h_s.ncols() != ds || s_ops.iter().any(|s| s.nrows() != ds || s.ncols() != ds) {
        return Err(Error::DimensionMismatch("system operators must share the shape of H_S".into()));
    }
    if s_ops.len() != model.n_sites() {
        return Err(Error::DimensionMismatch(format!("{} coupling operators for {} sites", s_ops.len(), model.n_sites())));
    }
    let nm = model.n_modes();
    if trunc.n_max.len() != nm || trunc.n_max.iter().any(|&n| n < 1) {
        return Err(Error::InvalidInput(format!("need one cutoff >= 1 per mode ({nm} modes)")));
    }
    let mut dims = vec![ds];
    dims.extend(trunc.n_max.iter().map(|n| n + 1));
    let d = dims.iter().try_fold(1usize, |a, &b| a.checked_mul(b));
    let d2 = d.and_then(|d| d.checked_mul(d)).unwrap_or(usize::MAX);
    if d2 > cap {
        return Err(Error::DimensionOverflow { dim: d2, cap });
    }
    let d = d.unwrap();

    let sys: Vec<Csr<T>> = s_ops.iter().map(|s| embed(&Csr::from_dense(s), 0, &dims)).collect();
    let modes: Vec<Csr<T>> = (0..nm).map(|k| embed(&annihilation(trunc.n_max[k]), k + 1, &dims)).collect();

    let mut h = embed(&Csr::from_dense(h_s), 0, &dims);
    let energies = model.energies();
    for k in 0..nm {
        let dk = &modes[k];
        let num = dk.adjoint().matmul(dk);
        h = h.add(&num.scale(cplx(energies[k], T::zero())));
        for (j, sj) in sys.iter().enumerate() {
            let v = model.v[(j, k)];
            let a = dk.scale(v).add(&dk.adjoint().scale(v.conj()));
            h = h.add(&sj.matmul(&a));
        }
    }
    let mi = -ci::<T>();
    let mut gen = spre(&h).scale(mi).add(&spost(&h).scale(ci()));

    let (gt, _) = lindbladian_gamma_tilde(model);
    let f_ops: Vec<Csr<T>> = sys.iter().chain(modes.iter()).cloned().collect();
    let half = cplx(T::lit(0.5), T::zero());
    for p in 0..f_ops.len() {
        let fpd = f_ops[p].adjoint();
        for q in 0..f_ops.len() {
            let g = gt[(p, q)];
            if g == czero() {
                continue;
            }
            let prod = fpd.matmul(&f_ops[q]);
            let term = sandwich(&f_ops[q], &fpd).add(&spre(&prod).scale(-half)).add(&spost(&prod).scale(-half));
            gen = gen.add(&term.scale(g * T::lit(2.0)));
        }
    }
    debug_assert_eq!(gen.nrows, d * d);
    Ok(Liouvillian { dims, generator: gen, h_aux: h, gamma_tilde: gt, f_ops })
}
