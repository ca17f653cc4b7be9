use nalgebra::DMatrix;
use num_complex::Complex;

use super::ops::{annihilation, spost, spre, Csr};
use crate::error::{Error, Result};
use crate::pseudomode::PseudomodeModel;
use crate::scalar::{ci, cplx, Real};

/// Bath-only generator acting on the `(s, s')` block of the state when the
/// system Hamiltonian is dropped and the coupling operator is diagonal
/// with eigenvalues `s`, `s'`:
///
/// `-i[E d^dag d, .] + D_A - i s A . + i s' . A
///  + ((2s' - s) M d - s M* d^dag) . + . (-s' M d + (2s - s') M* d^dag)`
///
/// with `A = V d + V* d^dag` and `D_A` the damping of mode `k`.
pub fn effective_liouvillian<T: Real>(model: &PseudomodeModel<T>, s: T, s_prime: T, k: usize, n_max: usize) -> Result<DMatrix<Complex<T>>> {
    if model.n_sites() != 1 {
        return Err(Error::InvalidInput("effective generator needs a single coupling operator".into()));
    }
    if k >= model.n_modes() {
        return Err(Error::DimensionMismatch(format!("mode {k} of {}", model.n_modes())));
    }
    let c = |x: T| cplx(x, T::zero());
    let d = annihilation::<T>(n_max);
    let dd = d.adjoint();
    let num = dd.matmul(&d);
    let (v, m) = (model.v[(0, k)], model.m[(0, k)]);
    let gamma = model.z[k].re;
    let energy = model.energies()[k];
    let a = d.scale(v).add(&dd.scale(v.conj()));
    let i = ci::<T>();
    let two = T::lit(2.0);

    let mut gen = spre(&num).scale(-i * energy).add(&spost(&num).scale(i * energy));
    // damping 2 gamma (d . d^dag - {d^dag d, .}/2)
    let damp = super::ops::sandwich(&d, &dd).add(&spre(&num).scale(c(-T::lit(0.5)))).add(&spost(&num).scale(c(-T::lit(0.5))));
    gen = gen.add(&damp.scale(c(two * gamma)));
    gen = gen.add(&spre(&a).scale(-i * s)).add(&spost(&a).scale(i * s_prime));
    let left: Csr<T> = d.scale(m * (two * s_prime - s)).add(&dd.scale(-m.conj() * s));
    let right: Csr<T> = d.scale(-m * s_prime).add(&dd.scale(m.conj() * (two * s - s_prime)));
    gen = gen.add(&spre(&left)).add(&spost(&right));
    Ok(gen.to_dense())
}
