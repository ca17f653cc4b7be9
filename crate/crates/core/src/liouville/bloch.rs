use nalgebra::Matrix3;

use crate::scalar::Real;

/// Generator `2 [[g_z, 0, nu], [0, g_z - g_x, 0], [-nu, 0, -g_x]]` of the
/// three-component toy model and whether all its eigenvalues have real
/// part `<= 1e-12`.
pub fn bloch_stability<T: Real>(gamma_x: T, gamma_z: T, nu: T) -> (Matrix3<T>, bool) {
    let two = T::lit(2.0);
    let z = T::zero();
    let m = Matrix3::new(gamma_z, z, nu, z, gamma_z - gamma_x, z, -nu, z, -gamma_x) * two;
    let stable = m.complex_eigenvalues().iter().all(|e| e.re <= T::lit(1e-12));
    (m, stable)
}
