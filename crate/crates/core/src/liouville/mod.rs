//! Truncated-Fock quasi-Lindblad generators for bosonic pseudomodes, their
//! time evolution and spectra, plus small stability models.

mod bloch;
mod build;
mod dephasing;
mod effective;
pub mod ops;
mod propagate;
mod spectrum;

pub use bloch::bloch_stability;
pub use build::{build_liouvillian, build_liouvillian_capped, FockTruncation, Liouvillian, DEFAULT_DIM_CAP};
pub use dephasing::dephasing_reference;
pub use effective::effective_liouvillian;
pub use propagate::{converge_in_truncation, partial_trace_system, product_state, propagate, propagate_with, Trajectory};
pub use spectrum::{dense_eigenvalues, spectrum, spectrum_capped, Parity, Spectrum, DENSE_CAP};

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::Result;
use crate::pseudomode::{gauge_single, PseudomodeModel};
use crate::scalar::{cplx, Real};
use crate::spectral::Statistics;

/// Pauli matrices.
pub fn sigma_x<T: Real>() -> DMatrix<Complex<T>> {
    let (o, z) = (cplx(T::one(), T::zero()), cplx(T::zero(), T::zero()));
    DMatrix::from_row_slice(2, 2, &[z, o, o, z])
}

pub fn sigma_y<T: Real>() -> DMatrix<Complex<T>> {
    let (i, z) = (cplx(T::zero(), T::one()), cplx(T::zero(), T::zero()));
    DMatrix::from_row_slice(2, 2, &[z, -i, i, z])
}

pub fn sigma_z<T: Real>() -> DMatrix<Complex<T>> {
    let (o, z) = (cplx(T::one(), T::zero()), cplx(T::zero(), T::zero()));
    DMatrix::from_row_slice(2, 2, &[o, z, z, -o])
}

/// Weight and exponent of the single-mode instability benchmark.
pub const BENCH_W: (f64, f64) = (50.0, -2.5);
pub const BENCH_DELTA: f64 = 4.0;

/// One pseudomode with `C(t) = w exp(-t)` and `w = 50 - 2.5i`, in gauge `kappa`.
pub fn benchmark_model<T: Real>(kappa: Complex<T>) -> PseudomodeModel<T> {
    let w = cplx(T::lit(BENCH_W.0), T::lit(BENCH_W.1));
    let (v, m) = gauge_single(w, kappa);
    PseudomodeModel {
        z: vec![cplx(T::one(), T::zero())],
        v: DMatrix::from_element(1, 1, v),
        m: DMatrix::from_element(1, 1, m),
        statistics: Statistics::Boson,
        kappa: vec![kappa],
    }
}

/// Outcome of [`instability_benchmark`].
#[derive(Debug, Clone)]
pub struct BenchmarkRun<T: Real> {
    pub trajectory: Trajectory<T>,
    /// `P_1(t) = <1| rho_S(t) |1>`
    pub population: Vec<T>,
    pub spectrum: Spectrum<T>,
}

/// Spin coupled through `sigma_z` to the benchmark pseudomode with
/// `H_S = Delta sigma_x / 2`, started in `|1><1|` with the mode in vacuum,
/// propagated on `t_grid`.
pub fn instability_benchmark<T: Real>(kappa: Complex<T>, n_max: usize, t_grid: &[T]) -> Result<BenchmarkRun<T>> {
    instability_benchmark_with(kappa, n_max, t_grid, sigma_x::<T>() * cplx(T::lit(BENCH_DELTA / 2.0), T::zero()), true)
}

/// [`instability_benchmark`] with an arbitrary system Hamiltonian; the
/// trajectory is skipped when `t_grid` is empty and the spectrum when
/// `with_spectrum` is false.
pub fn instability_benchmark_with<T: Real>(
    kappa: Complex<T>,
    n_max: usize,
    t_grid: &[T],
    h_s: DMatrix<Complex<T>>,
    with_spectrum: bool,
) -> Result<BenchmarkRun<T>> {
    let model = benchmark_model(kappa);
    let l = build_liouvillian(&h_s, &[sigma_z()], &model, &FockTruncation::uniform(n_max, 1))?;
    let spectrum =
        if with_spectrum { spectrum(&l, Some(&Parity::spin_flip(&l.dims)))? } else { Spectrum { eigenvalues: vec![], max_re: T::zero() } };
    let mut rho_s = DMatrix::from_element(2, 2, cplx(T::zero(), T::zero()));
    rho_s[(1, 1)] = cplx(T::one(), T::zero());
    let rho0 = product_state(&rho_s, &l.dims);
    let opts = crate::ode::OdeOptions::new(T::lit(1e-9)).with_blowup(T::lit(1e12));
    let trajectory = if t_grid.is_empty() { Trajectory::empty() } else { propagate_with(&l, &rho0, t_grid, &[], &opts)? };
    let population = trajectory.reduced.iter().map(|r| r[(1, 1)].re).collect();
    Ok(BenchmarkRun { trajectory, population, spectrum })
}
