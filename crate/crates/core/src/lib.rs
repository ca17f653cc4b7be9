//! Quasi-Lindblad pseudomode toolkit.
//!
//! Bath correlation functions are compressed into complex-weighted
//! exponential sums ([`expfit`]), turned into damped auxiliary modes
//! ([`pseudomode`]) and simulated either as a spin-boson master equation
//! ([`liouville`]) or as a Gaussian fermionic impurity ([`fermi_gauss`]).
//!
//! Everything numeric is generic over [`Real`]; the aliases below fix the
//! scalar to `f64` for everyday use.

pub mod error;
pub mod expfit;
pub mod fermi_gauss;
pub mod linalg;
pub mod liouville;
pub mod ode;
pub mod pseudomode;
pub mod quadrature;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type C64 = num_complex::Complex<f64>;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type SpectralDensityF64 = spectral::SpectralDensity<f64>;
pub type BcfSamplesF64 = spectral::BcfSamples<f64>;
pub type ExponentialFitF64 = expfit::ExponentialFit<f64>;
pub type PseudomodeModelF64 = pseudomode::PseudomodeModel<f64>;
pub type LiouvillianF64 = liouville::Liouvillian<f64>;
pub type TrajectoryF64 = liouville::Trajectory<f64>;
pub type FermiSetupF64 = fermi_gauss::FermiSetup<f64>;
pub type LyapunovSystemF64 = fermi_gauss::LyapunovSystem<f64>;
