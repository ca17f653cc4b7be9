use num_complex::Complex;
use qlpm::spectral::{bcf_boson_zero_t, bcf_fermion, sample_bcf, SpectralDensity, Statistics, Support};

fn subohmic() -> SpectralDensity<f64> {
    SpectralDensity::subohmic(1.0, 0.5, 1.0).unwrap()
}

fn closed_form(t: f64) -> Complex<f64> {
    0.5 * 0.886_226_925_452_758 * Complex::new(1.0, t).powf(-1.5)
}

#[test]
fn densities_at_zero_frequency() {
    assert_eq!(subohmic().evaluate(0.0)[(0, 0)], Complex::new(0.0, 0.0));
    let semi = SpectralDensity::semicircular(1.0, 10.0, Support::Positive).unwrap();
    assert!((semi.evaluate(0.0)[(0, 0)].re - std::f64::consts::FRAC_1_PI).abs() < 1e-15);
    let two = SpectralDensity::two_site(1.0, 10.0, Support::Symmetric).unwrap();
    let m = two.evaluate(0.0);
    for e in m.iter() {
        assert!((e.re - std::f64::consts::FRAC_1_PI).abs() < 1e-15 && e.im.abs() < 1e-15);
    }
}

#[test]
fn out_of_support_is_zero() {
    let semi = SpectralDensity::semicircular(1.0, 10.0, Support::Positive).unwrap();
    assert_eq!(semi.evaluate(-1.0)[(0, 0)].norm(), 0.0);
    assert_eq!(semi.evaluate(10.5)[(0, 0)].norm(), 0.0);
    assert_eq!(subohmic().evaluate(-3.0)[(0, 0)].norm(), 0.0);
}

#[test]
fn invalid_parameters_rejected() {
    assert!(SpectralDensity::subohmic(1.0, 1.5, 1.0).is_err());
    assert!(SpectralDensity::subohmic(-1.0, 0.5, 1.0).is_err());
    assert!(SpectralDensity::semicircular(1.0, 0.0, Support::Positive).is_err());
    assert!(SpectralDensity::two_site(0.0, 10.0, Support::Symmetric).is_err());
}

#[test]
fn evaluate_is_hermitian_psd() {
    let two = SpectralDensity::two_site(1.0, 10.0, Support::Symmetric).unwrap();
    for k in 0..=200 {
        let w = -12.0 + 0.12 * k as f64;
        let m = two.evaluate(w);
        assert!((&m - m.adjoint()).norm() < 1e-15);
        let ev = m.symmetric_eigenvalues();
        assert!(ev.iter().all(|&e| e >= -1e-12));
    }
}

#[test]
fn zero_time_values() {
    let semi = SpectralDensity::semicircular(1.0, 10.0, Support::Positive).unwrap();
    assert!((bcf_boson_zero_t(&semi, 0.0).unwrap()[(0, 0)] - Complex::new(2.5, 0.0)).norm() < 1e-10);
    assert!((bcf_boson_zero_t(&subohmic(), 0.0).unwrap()[(0, 0)] - Complex::new(0.443113, 0.0)).norm() < 1e-6);
}

#[test]
fn subohmic_matches_closed_form() {
    let j = subohmic();
    for k in 0..=40 {
        let t = 0.5 * k as f64;
        let c = bcf_boson_zero_t(&j, t).unwrap()[(0, 0)];
        assert!((c - closed_form(t)).norm() < 1e-9, "t = {t}");
        assert!((j.subohmic_bcf_exact(t).unwrap() - closed_form(t)).norm() < 1e-13);
    }
}

#[test]
fn sampled_subohmic_matches_closed_form() {
    let s = sample_bcf(&subohmic(), 20.0, 400, Statistics::Boson).unwrap();
    assert_eq!(s.len(), 400);
    for (t, v) in s.times.iter().zip(&s.values) {
        assert!((v[(0, 0)] - closed_form(*t)).norm() < 1e-9);
    }
}

#[test]
fn fermionic_windows() {
    let j = SpectralDensity::semicircular(1.0, 10.0, Support::Symmetric).unwrap();
    let g = bcf_fermion(&j, 0.0, Statistics::FermionGreater).unwrap()[(0, 0)];
    let l = bcf_fermion(&j, 0.0, Statistics::FermionLesser).unwrap()[(0, 0)];
    assert!((g - Complex::new(2.5, 0.0)).norm() < 1e-10);
    assert!((l - Complex::new(2.5, 0.0)).norm() < 1e-10);
    assert!((g + l.conj() - Complex::new(5.0, 0.0)).norm() < 1e-10);
    let full = bcf_boson_zero_t(&j, 0.0).unwrap()[(0, 0)];
    assert!((full - Complex::new(5.0, 0.0)).norm() < 1e-10);
}

#[test]
fn sample_grid_construction() {
    let s = sample_bcf(&subohmic(), 1.0, 2, Statistics::Boson).unwrap();
    assert_eq!(s.times, vec![0.0, 1.0]);
    assert!(sample_bcf(&subohmic(), 1.0, 1, Statistics::Boson).is_err());
    assert!(sample_bcf(&subohmic(), -1.0, 5, Statistics::Boson).is_err());
}

#[test]
fn two_site_samples_hermitian_at_zero() {
    let j = SpectralDensity::two_site(1.0, 10.0, Support::Positive).unwrap();
    let s = sample_bcf(&j, 5.0, 11, Statistics::Boson).unwrap();
    let c0 = &s.values[0];
    assert!((c0 - c0.adjoint()).norm() < 1e-12);
    assert!(c0.clone().symmetric_eigenvalues().iter().all(|&e| e > -1e-12));
}

#[test]
fn correlation_norm_bounded_by_zero_time() {
    let j = SpectralDensity::two_site(1.0, 10.0, Support::Symmetric).unwrap();
    let s = sample_bcf(&j, 10.0, 41, Statistics::FermionGreater).unwrap();
    let n0 = s.values[0].norm();
    assert!(s.values.iter().all(|v| v.norm() <= n0 + 1e-10));
}

#[test]
fn scaling_is_linear() {
    let j = SpectralDensity::semicircular(1.0, 10.0, Support::Positive).unwrap();
    let j3 = j.scaled(3.0);
    for t in [0.0, 0.7, 4.2] {
        let a = bcf_boson_zero_t(&j, t).unwrap()[(0, 0)] * 3.0;
        let b = bcf_boson_zero_t(&j3, t).unwrap()[(0, 0)];
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn negative_time_rejected() {
    assert!(bcf_boson_zero_t(&subohmic(), -0.1).is_err());
}
