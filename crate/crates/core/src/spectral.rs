//! Spectral densities and their zero-temperature bath correlation functions.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::panelled;
use crate::scalar::{cis, cplx, czero, Real};

/// Absolute tolerance of every correlation-function quadrature.
pub const BCF_TOL: f64 = 1e-10;

/// Frequency window on which a semicircular density is nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Support {
    /// `[0, W]`
    Positive,
    /// `[-W, W]`
    Symmetric,
}

/// Which occupation window a correlation function integrates over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Statistics {
    #[serde(rename = "boson-zeroT")]
    Boson,
    #[serde(rename = "fermion-greater")]
    FermionGreater,
    #[serde(rename = "fermion-lesser")]
    FermionLesser,
}

impl Statistics {
    pub fn as_str(self) -> &'static str {
        match self {
            Statistics::Boson => "boson-zeroT",
            Statistics::FermionGreater => "fermion-greater",
            Statistics::FermionLesser => "fermion-lesser",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralDensity<T> {
    /// `J = (alpha/2) omega_c^{1-s} omega^s exp(-omega/omega_c)` on `[0, inf)`.
    Subohmic { alpha: T, s: T, omega_c: T },
    /// `J = (gamma/pi) sqrt(1 - omega^2/W^2)` on its support.
    Semicircular { gamma: T, width: T, support: Support },
    /// Two sites sharing a semicircular bath with relative phase
    /// `r(omega) = exp(-i omega / 2W)`.
    TwoSite { gamma: T, width: T, support: Support },
}

impl<T: Real> SpectralDensity<T> {
    pub fn subohmic(alpha: T, s: T, omega_c: T) -> Result<Self> {
        if !(alpha > T::zero() && s > T::zero() && s < T::one() && omega_c > T::zero()) {
            return Err(Error::InvalidInput(format!("subohmic needs alpha > 0, 0 < s < 1, omega_c > 0 (got {alpha}, {s}, {omega_c})")));
        }
        Ok(Self::Subohmic { alpha, s, omega_c })
    }

    pub fn semicircular(gamma: T, width: T, support: Support) -> Result<Self> {
        check_semi(gamma, width)?;
        Ok(Self::Semicircular { gamma, width, support })
    }

    pub fn two_site(gamma: T, width: T, support: Support) -> Result<Self> {
        check_semi(gamma, width)?;
        Ok(Self::TwoSite { gamma, width, support })
    }

    pub fn n_sites(&self) -> usize {
        match self {
            Self::TwoSite { .. } => 2,
            _ => 1,
        }
    }

    /// Lower and upper edge of the support (`+inf` for the subohmic tail).
    pub fn support(&self) -> (T, T) {
        match *self {
            Self::Subohmic { .. } => (T::zero(), T::max_value().unwrap_or_else(|| T::lit(f64::MAX))),
            Self::Semicircular { width, support, .. } | Self::TwoSite { width, support, .. } => match support {
                Support::Positive => (T::zero(), width),
                Support::Symmetric => (-width, width),
            },
        }
    }

    /// Finite window used to place initial guesses and discretization
    /// nodes; the subohmic tail is cut at `10 omega_c`.
    pub fn effective_support(&self) -> (T, T) {
        match *self {
            Self::Subohmic { omega_c, .. } => (T::zero(), omega_c * T::lit(10.0)),
            _ => self.support(),
        }
    }

    /// Slowest expected decay rate (`omega_c` or `gamma`).
    pub fn characteristic_rate(&self) -> T {
        match *self {
            Self::Subohmic { omega_c, .. } => omega_c,
            Self::Semicircular { gamma, .. } | Self::TwoSite { gamma, .. } => gamma,
        }
    }

    /// Scalar profile `J(omega)`; for two sites this is the common factor
    /// multiplying `[[1, r], [r*, 1]]`.
    pub fn profile(&self, omega: T) -> T {
        match *self {
            Self::Subohmic { alpha, s, omega_c } => {
                if omega <= T::zero() {
                    T::zero()
                } else {
                    alpha * T::lit(0.5) * omega_c.powf(T::one() - s) * omega.powf(s) * (-omega / omega_c).exp()
                }
            }
            Self::Semicircular { gamma, width, .. } | Self::TwoSite { gamma, width, .. } => {
                let (lo, hi) = self.support();
                if omega < lo || omega > hi {
                    return T::zero();
                }
                let x = omega / width;
                gamma / T::pi() * (T::one() - x * x).max(T::zero()).sqrt()
            }
        }
    }

    /// Unit-modulus channel vector `u(omega)` with `J = profile * u u^dagger`.
    fn channel(&self, omega: T) -> [Complex<T>; 2] {
        match *self {
            Self::TwoSite { width, .. } => [cplx(T::one(), T::zero()), cis(omega / (T::lit(2.0) * width))],
            _ => [cplx(T::one(), T::zero()), czero()],
        }
    }

    /// Rank-one factor `g(omega)` with `J_{jj'} = g_j conj(g_j')`.
    pub fn factor(&self, omega: T) -> Vec<Complex<T>> {
        let sq = self.profile(omega).sqrt();
        let u = self.channel(omega);
        u[..self.n_sites()].iter().map(|c| c * sq).collect()
    }

    /// The (possibly matrix-valued) spectral density at `omega`.
    pub fn evaluate(&self, omega: T) -> DMatrix<Complex<T>> {
        let g = self.factor(omega);
        let n = g.len();
        DMatrix::from_fn(n, n, |i, j| g[i] * g[j].conj())
    }

    /// Closed-form zero-temperature correlation function of the subohmic
    /// density, `(alpha/2) Gamma(1+s) omega_c^2 (1 + i omega_c t)^{-(1+s)}`.
    pub fn subohmic_bcf_exact(&self, t: T) -> Option<Complex<T>> {
        match *self {
            Self::Subohmic { alpha, s, omega_c } => {
                let pre = alpha.as_f64() * 0.5 * libm::tgamma(1.0 + s.as_f64()) * omega_c.as_f64().powi(2);
                let base = Complex::new(1.0, omega_c.as_f64() * t.as_f64());
                let v = base.powc(Complex::new(-(1.0 + s.as_f64()), 0.0)) * pre;
                Some(cplx(T::lit(v.re), T::lit(v.im)))
            }
            _ => None,
        }
    }

    /// Scales the density by `c > 0`.
    pub fn scaled(&self, c: T) -> Self {
        match *self {
            Self::Subohmic { alpha, s, omega_c } => Self::Subohmic { alpha: alpha * c, s, omega_c },
            Self::Semicircular { gamma, width, support } => Self::Semicircular { gamma: gamma * c, width, support },
            Self::TwoSite { gamma, width, support } => Self::TwoSite { gamma: gamma * c, width, support },
        }
    }
}

fn check_semi<T: Real>(gamma: T, width: T) -> Result<()> {
    if gamma > T::zero() && width > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("semicircular needs gamma > 0 and width > 0 (got {gamma}, {width})")))
    }
}

/// Frequency sub-window and sign of the phase for each statistics.
#[derive(Clone, Copy)]
pub(crate) enum Window {
    All,
    PositiveFreq,
    NegativeFreq,
}

fn tol_for<T: Real>() -> T {
    T::lit(BCF_TOL).max(T::eps() * T::lit(1e4))
}

/// Integrates `J(omega) f(omega)` over `window`, where `f` oscillates no
/// faster than `exp(i rate omega)`.
pub(crate) fn integrate_profile<T: Real, const K: usize, F>(
    j: &SpectralDensity<T>,
    rate: T,
    window: Window,
    f: F,
) -> Result<[Complex<T>; K]>
where
    F: Fn(T) -> [Complex<T>; K],
{
    let tol = tol_for::<T>();
    let quarter = T::FRAC_PI_4();
    let weighted = |omega: T, weight: T| -> [Complex<T>; K] {
        let mut v = f(omega);
        v.iter_mut().for_each(|c| *c *= weight);
        v
    };
    match *j {
        SpectralDensity::Subohmic { s, omega_c, .. } => {
            if matches!(window, Window::NegativeFreq) {
                return Ok([czero(); K]);
            }
            let omega_max = omega_c * (T::lit(40.0) + s * (T::one() / tol).ln());
            let width = if rate > T::zero() { quarter / rate } else { omega_max };
            let h = width.min(omega_max).min(omega_c);
            // first panel in v with omega = h v^2 removes the omega^s cusp
            let head = |v: T| {
                let omega = h * v * v;
                weighted(omega, j.profile(omega) * T::lit(2.0) * h * v)
            };
            let mut out = panelled(&head, T::zero(), T::one(), T::one(), tol * T::lit(0.5))?;
            let body = |omega: T| weighted(omega, j.profile(omega));
            let rest = panelled(&body, h, omega_max, width, tol * T::lit(0.5))?;
            for c in 0..K {
                out[c] += rest[c];
            }
            Ok(out)
        }
        SpectralDensity::Semicircular { gamma, width, support } | SpectralDensity::TwoSite { gamma, width, support } => {
            let half_pi = T::FRAC_PI_2();
            let (lo, hi) = match (support, window) {
                (Support::Positive, Window::NegativeFreq) => return Ok([czero(); K]),
                (Support::Positive, _) => (T::zero(), half_pi),
                (Support::Symmetric, Window::All) => (-half_pi, half_pi),
                (Support::Symmetric, Window::PositiveFreq) => (T::zero(), half_pi),
                (Support::Symmetric, Window::NegativeFreq) => (-half_pi, T::zero()),
            };
            let theta_rate = rate * width;
            let dtheta = if theta_rate > T::zero() { quarter / theta_rate } else { hi - lo };
            let pref = gamma * width / T::pi();
            let g = |theta: T| {
                let c = theta.cos();
                weighted(width * theta.sin(), pref * c * c)
            };
            panelled(&g, lo, hi, dtheta, tol)
        }
    }
}

/// Integrates `sum_ij u_i conj(u_j) J(omega) exp(-i sign omega t)` over a
/// window and packs the entries `[00, 01, 10, 11]`.
fn bcf_raw<T: Real>(j: &SpectralDensity<T>, t: T, window: Window, sign: T) -> Result<[Complex<T>; 4]> {
    let extra = match *j {
        SpectralDensity::TwoSite { width, .. } => T::one() / (T::lit(2.0) * width),
        _ => T::zero(),
    };
    integrate_profile(j, t + extra, window, |omega| {
        let u = j.channel(omega);
        let ph = cis(-sign * omega * t);
        [ph * u[0] * u[0].conj(), ph * u[0] * u[1].conj(), ph * u[1] * u[0].conj(), ph * u[1] * u[1].conj()]
    })
}

fn to_matrix<T: Real>(n: usize, raw: [Complex<T>; 4], transpose: bool) -> DMatrix<Complex<T>> {
    if n == 1 {
        return DMatrix::from_element(1, 1, raw[0]);
    }
    let m = DMatrix::from_row_slice(2, 2, &raw);
    if transpose {
        m.transpose()
    } else {
        m
    }
}

/// `C(t) = int J(omega) exp(-i omega t) d omega` over the whole support.
pub fn bcf_boson_zero_t<T: Real>(j: &SpectralDensity<T>, t: T) -> Result<DMatrix<Complex<T>>> {
    check_time(t)?;
    Ok(to_matrix(j.n_sites(), bcf_raw(j, t, Window::All, T::one())?, false))
}

/// Fermionic correlation at zero temperature: the greater function
/// integrates the empty `omega > 0` window with `exp(-i omega t)`, the
/// lesser one integrates the filled `omega < 0` window of `J^T` with
/// `exp(+i omega t)`.
pub fn bcf_fermion<T: Real>(j: &SpectralDensity<T>, t: T, which: Statistics) -> Result<DMatrix<Complex<T>>> {
    check_time(t)?;
    let n = j.n_sites();
    match which {
        Statistics::FermionGreater => Ok(to_matrix(n, bcf_raw(j, t, Window::PositiveFreq, T::one())?, false)),
        Statistics::FermionLesser => Ok(to_matrix(n, bcf_raw(j, t, Window::NegativeFreq, -T::one())?, true)),
        Statistics::Boson => bcf_boson_zero_t(j, t),
    }
}

fn check_time<T: Real>(t: T) -> Result<()> {
    if t >= T::zero() && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("correlation time must be finite and >= 0, got {t}")))
    }
}

/// Correlation function on a uniform grid starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BcfSamples<T: Real> {
    pub dt: T,
    pub times: Vec<T>,
    pub values: Vec<DMatrix<Complex<T>>>,
    pub statistics: Statistics,
}

impl<T: Real> BcfSamples<T> {
    /// Wraps precomputed values taken at `t_a = a dt`.
    pub fn new(dt: T, values: Vec<DMatrix<Complex<T>>>, statistics: Statistics) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::InvalidInput("sampling step must be positive".into()));
        }
        let n = values.first().map_or(0, |m| m.nrows());
        if values.iter().any(|m| m.nrows() != n || m.ncols() != n) {
            return Err(Error::DimensionMismatch("all samples must share one square shape".into()));
        }
        let times = (0..values.len()).map(|a| dt * T::from_usize_lossy(a)).collect();
        Ok(Self { dt, times, values, statistics })
    }

    /// Samples a scalar function on `n` grid points.
    pub fn from_scalar_fn(dt: T, n: usize, statistics: Statistics, f: impl Fn(T) -> Complex<T>) -> Self {
        let values = (0..n).map(|a| DMatrix::from_element(1, 1, f(dt * T::from_usize_lossy(a)))).collect();
        Self::new(dt, values, statistics).expect("valid scalar grid")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n_sites(&self) -> usize {
        self.values.first().map_or(0, |m| m.nrows())
    }

    /// Entry `(i, j)` as a time series.
    pub fn series(&self, i: usize, j: usize) -> Vec<Complex<T>> {
        self.values.iter().map(|m| m[(i, j)]).collect()
    }

    /// Sum over all matrix entries at each time.
    pub fn entry_sum(&self) -> Vec<Complex<T>> {
        self.values.iter().map(|m| m.iter().fold(czero(), |a, &b| a + b)).collect()
    }

    /// Copy with every value multiplied by `c`.
    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self { values: self.values.iter().map(|m| m * c).collect(), ..self.clone() }
    }
}

/// Samples the correlation function of `j` on `n_samples` points of `[0, t_max]`.
pub fn sample_bcf<T: Real>(j: &SpectralDensity<T>, t_max: T, n_samples: usize, statistics: Statistics) -> Result<BcfSamples<T>> {
    if n_samples < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n_samples });
    }
    if !(t_max > T::zero()) {
        return Err(Error::InvalidInput("t_max must be positive".into()));
    }
    let dt = t_max / T::from_usize_lossy(n_samples - 1);
    let values = (0..n_samples).map(|a| bcf_fermion(j, dt * T::from_usize_lossy(a), statistics)).collect::<Result<Vec<_>>>()?;
    BcfSamples::new(dt, values, statistics)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn semi() -> SpectralDensity<f64> {
        SpectralDensity::semicircular(1.0, 10.0, Support::Positive).unwrap()
    }

    #[test]
    fn profile_values() {
        assert!((semi().profile(0.0) - 1.0 / std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(semi().profile(-1.0), 0.0);
        assert_eq!(semi().profile(11.0), 0.0);
        let sub = SpectralDensity::subohmic(1.0, 0.5, 1.0).unwrap();
        assert_eq!(sub.profile(0.0), 0.0);
    }

    #[test]
    fn two_site_at_zero_frequency() {
        let j = SpectralDensity::two_site(1.0, 10.0, Support::Positive).unwrap();
        let m = j.evaluate(0.0);
        let j0 = 1.0 / std::f64::consts::PI;
        for v in m.iter() {
            assert!((v - Complex::new(j0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(SpectralDensity::subohmic(1.0, 1.5, 1.0).is_err());
        assert!(SpectralDensity::semicircular(-1.0, 1.0, Support::Positive).is_err());
    }

    #[test]
    fn semicircle_area() {
        let c0 = bcf_boson_zero_t(&semi(), 0.0).unwrap();
        assert!((c0[(0, 0)].re - 2.5).abs() < 1e-12);
    }

    #[test]
    fn negative_time_rejected() {
        assert!(bcf_boson_zero_t(&semi(), -1.0).is_err());
    }
}
