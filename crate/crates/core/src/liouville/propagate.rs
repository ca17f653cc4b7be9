use nalgebra::DMatrix;
use num_complex::Complex;

use super::build::Liouvillian;
use crate::error::{Error, Result};
use crate::ode::{integrate, OdeOptions};
use crate::scalar::{cabs, cplx, czero, Real};

/// Reduced dynamics sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub reduced: Vec<DMatrix<Complex<T>>>,
    /// Named expectation values, one entry per recorded time.
    pub observables: Vec<(String, Vec<Complex<T>>)>,
    /// `|Tr rho(t) - 1|` of the full state.
    pub trace_drift: Vec<T>,
    /// Largest `||rho - rho^dagger||_max` of the full state seen so far.
    pub hermiticity_defect: T,
    /// Set when the run was stopped because the state blew up.
    pub diverged_at: Option<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn empty() -> Self {
        Self { times: vec![], reduced: vec![], observables: vec![], trace_drift: vec![], hermiticity_defect: T::zero(), diverged_at: None }
    }

    pub fn observable(&self, name: &str) -> Option<&[Complex<T>]> {
        self.observables.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

/// `rho_S (x) |0><0|` for every mode.
pub fn product_state<T: Real>(rho_s: &DMatrix<Complex<T>>, dims: &[usize]) -> DMatrix<Complex<T>> {
    let db: usize = dims[1..].iter().product();
    let ds = dims[0];
    let mut rho = DMatrix::from_element(ds * db, ds * db, czero());
    for a in 0..ds {
        for b in 0..ds {
            rho[(a * db, b * db)] = rho_s[(a, b)];
        }
    }
    rho
}

/// Traces out every mode of a column-stacked full state.
pub fn partial_trace_system<T: Real>(vec_rho: &[Complex<T>], dims: &[usize]) -> DMatrix<Complex<T>> {
    let ds = dims[0];
    let db: usize = dims[1..].iter().product();
    let d = ds * db;
    DMatrix::from_fn(ds, ds, |a, b| {
        let mut acc = czero();
        for k in 0..db {
            acc += vec_rho[(b * db + k) * d + a * db + k];
        }
        acc
    })
}

/// [`propagate_with`] at relative tolerance `1e-9`.
pub fn propagate<T: Real>(
    l: &Liouvillian<T>,
    rho0: &DMatrix<Complex<T>>,
    t_grid: &[T],
    observables: &[(&str, DMatrix<Complex<T>>)],
) -> Result<Trajectory<T>> {
    propagate_with(l, rho0, t_grid, observables, &OdeOptions::new(T::lit(1e-9)))
}

/// Integrates `d vec(rho)/dt = L vec(rho)` and records the reduced state
/// and the expectation values of system operators on `t_grid`.
pub fn propagate_with<T: Real>(
    l: &Liouvillian<T>,
    rho0: &DMatrix<Complex<T>>,
    t_grid: &[T],
    observables: &[(&str, DMatrix<Complex<T>>)],
    opts: &OdeOptions<T>,
) -> Result<Trajectory<T>> {
    let d = l.hilbert_dim();
    if rho0.nrows() != d || rho0.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "initial state is {}x{}, generator acts on dimension {d}",
            rho0.nrows(),
            rho0.ncols()
        )));
    }
    let y0: Vec<Complex<T>> = rho0.iter().copied().collect();
    let mut traj = Trajectory::empty();
    traj.observables = observables.iter().map(|(n, _)| (n.to_string(), vec![])).collect();
    let stats = integrate(
        |_, y, dy| l.generator.matvec_into(y, dy),
        &y0,
        t_grid,
        opts,
        |i, y| {
            let rs = partial_trace_system(y, &l.dims);
            let tr = (0..d).fold(czero::<T>(), |s, k| s + y[k * d + k]);
            traj.times.push(t_grid[i]);
            traj.trace_drift.push(cabs(tr - cplx(T::one(), T::zero())));
            let mut herm = T::zero();
            for r in 0..d {
                for c in 0..r {
                    herm = herm.max(cabs(y[c * d + r] - y[r * d + c].conj()));
                }
            }
            traj.hermiticity_defect = traj.hermiticity_defect.max(herm);
            for (slot, (_, op)) in traj.observables.iter_mut().zip(observables) {
                slot.1.push((op * &rs).trace());
            }
            traj.reduced.push(rs);
        },
    )?;
    traj.diverged_at = stats.diverged_at;
    Ok(traj)
}

/// Runs `run(n)` for `n = n_start, n_start + step, ...` until two
/// successive results differ by less than `tol` in max norm; returns the
/// accepted cutoff and its result.
pub fn converge_in_truncation<T: Real, F>(n_start: usize, step: usize, n_limit: usize, tol: T, mut run: F) -> Result<(usize, Vec<T>)>
where
    F: FnMut(usize) -> Result<Vec<T>>,
{
    let mut n = n_start;
    let mut prev = run(n)?;
    while n + step <= n_limit {
        let next = run(n + step)?;
        let diff = prev.iter().zip(&next).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
        if diff < tol {
            return Ok((n, prev));
        }
        n += step;
        prev = next;
    }
    Err(Error::InvalidInput(format!("observables not converged to {tol} in truncation up to {n_limit}")))
}
