//! Gaussian (noninteracting) fermionic impurity dynamics.
//!
//! The one-particle reduced density matrix `P_pq = <c_q^dagger c_p>` of
//! the impurity plus both pseudomode baths obeys `P' = X P + P X^dagger + Y`.
//! Modes are ordered impurity sites first, then the greater bath `A1`,
//! then the lesser bath `A2`.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::expfit::{discretize_window, fit_with, FitMethod};
use crate::linalg::{eigenvalues, hermitian_eigen};
use crate::ode::{integrate, OdeOptions};
use crate::pseudomode::{from_fit, PseudomodeModel};
use crate::scalar::{cabs, ci, cis, cone, cplx, czero, Real};
use crate::spectral::{sample_bcf, SpectralDensity, Statistics};

#[derive(Debug, Clone, PartialEq)]
pub struct FermiSetup<T: Real> {
    pub h_s: DMatrix<Complex<T>>,
    pub model_greater: PseudomodeModel<T>,
    pub model_lesser: PseudomodeModel<T>,
    pub p0_impurity: DMatrix<Complex<T>>,
}

impl<T: Real> FermiSetup<T> {
    pub fn new(
        h_s: DMatrix<Complex<T>>,
        model_greater: PseudomodeModel<T>,
        model_lesser: PseudomodeModel<T>,
        p0_impurity: DMatrix<Complex<T>>,
    ) -> Result<Self> {
        let ns = h_s.nrows();
        if h_s.ncols() != ns || p0_impurity.shape() != (ns, ns) {
            return Err(Error::DimensionMismatch(format!(
                "impurity blocks must be {ns}x{ns}, got {:?} and {:?}",
                h_s.shape(),
                p0_impurity.shape()
            )));
        }
        for (name, m) in [("greater", &model_greater), ("lesser", &model_lesser)] {
            if m.n_modes() > 0 && m.n_sites() != ns {
                return Err(Error::DimensionMismatch(format!("{name} bath couples to {} sites, impurity has {ns}", m.n_sites())));
            }
        }
        let tol = T::lit(1e-10) * h_s.norm().max(T::one());
        if (&h_s - h_s.adjoint()).norm() > tol {
            return Err(Error::InvalidInput("impurity Hamiltonian must be Hermitian".into()));
        }
        if (&p0_impurity - p0_impurity.adjoint()).norm() > T::lit(1e-10) {
            return Err(Error::InvalidInput("initial impurity density matrix must be Hermitian".into()));
        }
        let (occ, _) = hermitian_eigen(&p0_impurity)?;
        if occ.iter().any(|&e| e < -T::lit(1e-10) || e > T::one() + T::lit(1e-10)) {
            return Err(Error::InvalidInput("initial occupations must lie in [0, 1]".into()));
        }
        Ok(Self { h_s, model_greater, model_lesser, p0_impurity })
    }

    /// Spinless sites with on-site energy `eps` and no hopping.
    pub fn uniform(
        n_sites: usize,
        eps: T,
        model_greater: PseudomodeModel<T>,
        model_lesser: PseudomodeModel<T>,
        occupied: &[usize],
    ) -> Result<Self> {
        let h = DMatrix::from_diagonal_element(n_sites, n_sites, cplx(eps, T::zero()));
        let mut p0 = DMatrix::from_element(n_sites, n_sites, czero());
        for &j in occupied {
            if j >= n_sites {
                return Err(Error::InvalidInput(format!("occupied site {j} out of range")));
            }
            p0[(j, j)] = cone();
        }
        Self::new(h, model_greater, model_lesser, p0)
    }

    pub fn n_sites(&self) -> usize {
        self.h_s.nrows()
    }

    /// Impurity block from `p0_impurity`, empty greater bath, filled lesser bath.
    pub fn initial_state(&self) -> DMatrix<Complex<T>> {
        let (ns, n1, n2) = (self.n_sites(), self.model_greater.n_modes(), self.model_lesser.n_modes());
        let mut p = DMatrix::from_element(ns + n1 + n2, ns + n1 + n2, czero());
        p.view_mut((0, 0), (ns, ns)).copy_from(&self.p0_impurity);
        for k in 0..n2 {
            p[(ns + n1 + k, ns + n1 + k)] = cone();
        }
        p
    }

    /// Copy with both coupling matrices `V` multiplied by `scale`.
    pub fn with_scaled_v(&self, scale: T) -> Self {
        let mut out = self.clone();
        out.model_greater.v *= cplx(scale, T::zero());
        out.model_lesser.v *= cplx(scale, T::zero());
        out
    }
}

/// Uncoupled levels at energy `eps` (sites in `occupied` filled) quenched
/// against greater and lesser baths fitted to `j` with `n_exp` terms each.
/// Both correlation functions are sampled `n_samples` times on `[0, t_fit]`.
pub fn quench_setup<T: Real>(
    j: &SpectralDensity<T>,
    eps: T,
    occupied: &[usize],
    n_exp: usize,
    method: FitMethod,
    t_fit: T,
    n_samples: usize,
) -> Result<FermiSetup<T>> {
    let model = |stats| -> Result<PseudomodeModel<T>> {
        let samples = sample_bcf(j, t_fit, n_samples, stats)?;
        let (fit, _) = fit_with(method, j, &samples, n_exp)?;
        from_fit(&fit, &[])
    };
    FermiSetup::uniform(j.n_sites(), eps, model(Statistics::FermionGreater)?, model(Statistics::FermionLesser)?, occupied)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSystem<T: Real> {
    pub x: DMatrix<Complex<T>>,
    pub y: DMatrix<Complex<T>>,
    pub n_sites: usize,
    pub n_greater: usize,
    pub n_lesser: usize,
}

impl<T: Real> LyapunovSystem<T> {
    pub fn dim(&self) -> usize {
        self.x.nrows()
    }

    /// `X P + P X^dagger + Y`
    pub fn rhs(&self, p: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
        &self.x * p + p * self.x.adjoint() + &self.y
    }

    pub fn residual(&self, p: &DMatrix<Complex<T>>) -> T {
        self.rhs(p).iter().fold(T::zero(), |m, c| m.max(cabs(*c)))
    }
}

pub fn build_xy<T: Real>(setup: &FermiSetup<T>) -> Result<LyapunovSystem<T>> {
    let ns = setup.n_sites();
    let (g, l) = (&setup.model_greater, &setup.model_lesser);
    for m in [g, l] {
        if m.v.shape() != m.m.shape() || m.v.ncols() != m.n_modes() || (m.n_modes() > 0 && m.v.nrows() != ns) {
            return Err(Error::DimensionMismatch("pseudomode couplings do not match the impurity and mode counts".into()));
        }
    }
    if g.statistics == Statistics::FermionLesser || l.statistics == Statistics::FermionGreater {
        return Err(Error::InvalidInput("greater and lesser models are swapped".into()));
    }
    let (n1, n2) = (g.n_modes(), l.n_modes());
    let n = ns + n1 + n2;
    let i = ci::<T>();
    let two = cplx(T::lit(2.0), T::zero());
    let mut x = DMatrix::from_element(n, n, czero());
    let mut y = DMatrix::from_element(n, n, czero());

    x.view_mut((0, 0), (ns, ns)).copy_from(&(-&setup.h_s * i));
    let mut couple = |off: usize, v: &DMatrix<Complex<T>>, m: &DMatrix<Complex<T>>, z: &[Complex<T>], conj_z: bool| {
        let k = z.len();
        x.view_mut((0, off), (ns, k)).copy_from(&(-(v * i) - m));
        x.view_mut((off, 0), (k, ns)).copy_from(&(-(v.adjoint() * i) - m.adjoint()));
        for (q, zq) in z.iter().enumerate() {
            x[(off + q, off + q)] = -if conj_z { zq.conj() } else { *zq };
        }
    };
    couple(ns, &g.v, &g.m, &g.z, false);
    couple(ns + n1, &l.v, &l.m, &l.z, true);

    let off = ns + n1;
    y.view_mut((0, off), (ns, n2)).copy_from(&(&l.m * two));
    y.view_mut((off, 0), (n2, ns)).copy_from(&(l.m.adjoint() * two));
    for (q, zq) in l.z.iter().enumerate() {
        y[(off + q, off + q)] = cplx(T::lit(2.0) * zq.re, T::zero());
    }
    Ok(LyapunovSystem { x, y, n_sites: ns, n_greater: n1, n_lesser: n2 })
}

/// Impurity occupations (and optionally full one-particle density
/// matrices) on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationTrajectory<T: Real> {
    pub times: Vec<T>,
    /// `occupations[i][j] = <n_j(times[i])>`
    pub occupations: Vec<Vec<T>>,
    pub states: Vec<DMatrix<Complex<T>>>,
    pub hermiticity_defect: T,
    pub diverged_at: Option<T>,
}

impl<T: Real> OccupationTrajectory<T> {
    pub fn site(&self, j: usize) -> Vec<T> {
        self.occupations.iter().map(|o| o[j]).collect()
    }

    /// Largest occupation deviation over all sites and common times.
    pub fn max_error(&self, reference: &Self) -> T {
        self.occupations
            .iter()
            .zip(&reference.occupations)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (*x - *y).abs()))
            .fold(T::zero(), |m, e| m.max(e))
    }

    /// Occupation deviation at the last common time.
    pub fn final_error(&self, reference: &Self) -> T {
        let n = self.occupations.len().min(reference.occupations.len());
        if n == 0 {
            return T::zero();
        }
        let (a, b) = (&self.occupations[n - 1], &reference.occupations[n - 1]);
        a.iter().zip(b).fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovOptions<T> {
    pub rtol: T,
    pub keep_states: bool,
    pub blowup: Option<T>,
}

impl<T: Real> Default for LyapunovOptions<T> {
    fn default() -> Self {
        Self { rtol: T::lit(1e-10), keep_states: false, blowup: None }
    }
}

pub fn propagate_lyapunov<T: Real>(sys: &LyapunovSystem<T>, p0: &DMatrix<Complex<T>>, grid: &[T]) -> Result<OccupationTrajectory<T>> {
    propagate_lyapunov_with(sys, p0, grid, &LyapunovOptions::default())
}

pub fn propagate_lyapunov_with<T: Real>(
    sys: &LyapunovSystem<T>,
    p0: &DMatrix<Complex<T>>,
    grid: &[T],
    opts: &LyapunovOptions<T>,
) -> Result<OccupationTrajectory<T>> {
    let n = sys.dim();
    if p0.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!("initial state is {:?}, system is {n}x{n}", p0.shape())));
    }
    let xa = sys.x.adjoint();
    let rhs = |_: T, y: &[Complex<T>], dy: &mut [Complex<T>]| {
        let p = DMatrix::from_column_slice(n, n, y);
        let d = &sys.x * &p + &p * &xa + &sys.y;
        dy.copy_from_slice(d.as_slice());
    };
    let mut ode = OdeOptions::new(opts.rtol);
    ode.blowup = opts.blowup;
    let mut out =
        OccupationTrajectory { times: vec![], occupations: vec![], states: vec![], hermiticity_defect: T::zero(), diverged_at: None };
    let stats = integrate(rhs, p0.as_slice(), grid, &ode, |k, y| {
        let p = DMatrix::from_column_slice(n, n, y);
        out.times.push(grid[k]);
        out.occupations.push((0..sys.n_sites).map(|j| p[(j, j)].re).collect());
        let defect = (&p - p.adjoint()).iter().fold(T::zero(), |m, c| m.max(cabs(*c)));
        out.hermiticity_defect = out.hermiticity_defect.max(defect);
        if opts.keep_states {
            out.states.push(p);
        }
    })?;
    out.diverged_at = stats.diverged_at;
    Ok(out)
}

/// Solves `X P + P X^dagger + Y = 0` through the column-stacked system
/// `(I (x) X + conj(X) (x) I) vec P = -vec Y`.
pub fn fixed_point<T: Real>(sys: &LyapunovSystem<T>) -> Result<DMatrix<Complex<T>>> {
    let n = sys.dim();
    let id = DMatrix::<Complex<T>>::identity(n, n);
    let a = id.kronecker(&sys.x) + sys.x.map(|c| c.conj()).kronecker(&id);
    let b = nalgebra::DVector::from_iterator(n * n, sys.y.iter().map(|c| -*c));
    let sol = a.lu().solve(&b).ok_or_else(|| Error::Linalg("Lyapunov operator is singular".into()))?;
    Ok(DMatrix::from_column_slice(n, n, sol.as_slice()))
}

/// Largest real part of the spectrum of `X`; stable when strictly negative.
pub fn x_stability<T: Real>(sys: &LyapunovSystem<T>) -> Result<(T, bool)> {
    let ev = eigenvalues(&sys.x)?;
    let max_re = ev.iter().fold(-T::max_value().unwrap(), |m, e| m.max(e.re));
    Ok((max_re, max_re < T::zero()))
}

/// `(scale, max Re lambda(X))` with both `V` matrices scaled.
pub fn stability_sweep<T: Real>(template: &FermiSetup<T>, scales: &[T]) -> Result<Vec<(T, T)>> {
    scales
        .iter()
        .map(|&s| {
            let sys = build_xy(&template.with_scaled_v(s))?;
            Ok((s, x_stability(&sys)?.0))
        })
        .collect()
}

/// Unitary evolution of the impurity coupled to a Gauss–Legendre
/// discretized bath, half the modes on each side of zero frequency.
/// Negative-frequency modes start filled.
pub fn exact_reference<T: Real>(
    j: &SpectralDensity<T>,
    h_s: &DMatrix<Complex<T>>,
    p0_impurity: &DMatrix<Complex<T>>,
    n_modes: usize,
    grid: &[T],
) -> Result<OccupationTrajectory<T>> {
    let ns = h_s.nrows();
    if j.n_sites() != ns || p0_impurity.shape() != (ns, ns) {
        return Err(Error::DimensionMismatch(format!("density has {} sites, impurity has {ns}", j.n_sites())));
    }
    if n_modes < 2 || !n_modes.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("mode count must be even and positive, got {n_modes}")));
    }
    let (lo, hi) = j.effective_support();
    if !(lo < T::zero() && hi > T::zero()) {
        return Err(Error::InvalidInput("the reference needs a support straddling zero frequency".into()));
    }
    let half = n_modes / 2;
    let neg = discretize_window(j, half, lo, T::zero());
    let pos = discretize_window(j, half, T::zero(), hi);
    let n = ns + n_modes;
    let mut h = DMatrix::from_element(n, n, czero());
    h.view_mut((0, 0), (ns, ns)).copy_from(h_s);
    for (b, bath) in [&neg, &pos].into_iter().enumerate() {
        for k in 0..half {
            let q = ns + b * half + k;
            h[(q, q)] = cplx(bath.frequencies[k], T::zero());
            for s in 0..ns {
                h[(s, q)] = bath.couplings[(s, k)];
                h[(q, s)] = bath.couplings[(s, k)].conj();
            }
        }
    }
    let mut p0 = DMatrix::from_element(n, n, czero());
    p0.view_mut((0, 0), (ns, ns)).copy_from(p0_impurity);
    for k in 0..half {
        p0[(ns + k, ns + k)] = cone();
    }
    let (e, v) = hermitian_eigen(&h)?;
    let va = v.adjoint();
    let top = v.rows(0, ns).into_owned();

    let mut out =
        OccupationTrajectory { times: vec![], occupations: vec![], states: vec![], hermiticity_defect: T::zero(), diverged_at: None };
    for &t in grid {
        let mut r = top.clone();
        for (c, &ec) in e.iter().enumerate() {
            let ph = cis(-ec * t);
            r.column_mut(c).iter_mut().for_each(|x| *x *= ph);
        }
        let u = r * &va;
        let p = &u * &p0 * u.adjoint();
        out.times.push(t);
        out.occupations.push((0..ns).map(|s| p[(s, s)].re).collect());
    }
    Ok(out)
}
