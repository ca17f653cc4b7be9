use crate::error::Result;
use crate::scalar::{cplx, Real};
use crate::spectral::{integrate_profile, SpectralDensity, Window};

/// `<sigma_x(t)>` of a spin with `H_S = omega0 sigma_z / 2` coupled through
/// `sigma_z` to a zero-temperature bath, starting from `|+>`:
/// `cos(omega0 t) exp(-4 int J(w) (1 - cos wt) / w^2 dw)`.
pub fn dephasing_reference<T: Real>(j: &SpectralDensity<T>, omega0: T, t: T) -> Result<T> {
    if t == T::zero() {
        return Ok(T::one());
    }
    let tiny = T::eps().sqrt();
    let [g] = integrate_profile(j, t, Window::All, |w| {
        // (1 - cos wt)/w^2 = 2 sin^2(wt/2)/w^2, stable near w = 0
        let val = if w.abs() < tiny { t * t * T::lit(0.5) } else { T::lit(2.0) * (w * t * T::lit(0.5)).sin().powi(2) / (w * w) };
        [cplx(val, T::zero())]
    })?;
    Ok((omega0 * t).cos() * (-T::lit(4.0) * g.re).exp())
}
