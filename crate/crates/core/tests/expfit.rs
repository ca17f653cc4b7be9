use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use proptest::prelude::*;
use qlpm::expfit::nnls::nnls;
use qlpm::expfit::*;
use qlpm::spectral::{sample_bcf, BcfSamples, SpectralDensity, Statistics, Support};

type C = Complex<f64>;

fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

fn synth(terms: &[(C, C)], dt: f64, n: usize) -> BcfSamples<f64> {
    BcfSamples::from_scalar_fn(dt, n, Statistics::Boson, |t| terms.iter().map(|(w, z)| w * (-z * t).exp()).sum())
}

fn sorted(mut v: Vec<C>) -> Vec<C> {
    v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    v
}

#[test]
fn esprit_single_exponent() {
    let s = synth(&[(c(2.0, 0.0), c(1.0, 2.0))], 0.05, 200);
    let z = esprit_exponents(&s, 1).unwrap();
    assert!((z[0] - c(1.0, 2.0)).norm() < 1e-10);
}

#[test]
fn esprit_two_exponents() {
    let s = synth(&[(c(1.0, 0.0), c(1.0, 0.0)), (c(1.0, 0.0), c(0.5, 3.0))], 0.05, 200);
    let z = sorted(esprit_exponents(&s, 2).unwrap());
    assert!((z[0] - c(0.5, 3.0)).norm() < 1e-8);
    assert!((z[1] - c(1.0, 0.0)).norm() < 1e-8);
}

#[test]
fn esprit_constant_signal() {
    let s = synth(&[(c(1.0, 0.0), c(0.0, 0.0))], 0.1, 21);
    let z = esprit_exponents(&s, 1).unwrap();
    assert!(z[0].norm() < 1e-12);
}

#[test]
fn esprit_rank_and_aliasing_errors() {
    let s = synth(&[(c(1.0, 0.0), c(1.0, 0.0))], 0.05, 100);
    assert!(matches!(esprit_exponents(&s, 3), Err(qlpm::Error::RankDeficient { .. })));
    let fast = synth(&[(c(1.0, 0.0), c(0.1, 70.0))], 0.05, 100);
    let z = esprit_exponents(&fast, 1);
    assert!(z.is_err() || z.unwrap()[0].im.abs() < std::f64::consts::PI / 0.05);
    assert!(matches!(esprit_exponents(&s, 60), Err(qlpm::Error::TooFewSamples { .. })));
}

#[test]
fn lsq_recovers_generator_weights() {
    let terms = [(c(2.0, 0.0), c(1.0, 2.0)), (c(-0.3, 0.7), c(0.2, -1.0)), (c(0.5, 0.5), c(3.0, 5.0))];
    let s = synth(&terms, 0.02, 300);
    let sol = lsq_weights(&s, &terms.iter().map(|t| t.1).collect::<Vec<_>>()).unwrap();
    for (w, t) in sol.weights.iter().zip(&terms) {
        assert!((w[(0, 0)] - t.0).norm() < 1e-10);
    }
    let one = lsq_weights(&synth(&terms[..1], 0.05, 200), &[c(1.0, 2.0)]).unwrap();
    assert!((one.weights[0][(0, 0)] - c(2.0, 0.0)).norm() < 1e-12);
}

#[test]
fn lsq_rejects_duplicate_exponents() {
    let s = synth(&[(c(1.0, 0.0), c(1.0, 0.0))], 0.05, 50);
    assert!(lsq_weights(&s, &[c(1.0, 0.0), c(1.0, 0.0)]).is_err());
}

#[test]
fn two_site_weights_sum_to_scalar_weights() {
    let j = SpectralDensity::two_site(1.0, 10.0, Support::Positive).unwrap();
    let s = sample_bcf(&j, 20.0, 400, Statistics::Boson).unwrap();
    let z = esprit_exponents(&s, 4).unwrap();
    let matrix = lsq_weights(&s, &z).unwrap();
    let scalar = BcfSamples::new(s.dt, s.entry_sum().into_iter().map(|v| DMatrix::from_element(1, 1, v)).collect(), s.statistics).unwrap();
    let reduced = lsq_weights(&scalar, &z).unwrap();
    for (w, r) in matrix.weights.iter().zip(&reduced.weights) {
        assert!((w.sum() - r[(0, 0)]).norm() < 1e-8);
    }
}

#[test]
fn complex_fit_exact_for_generated_sum() {
    let terms = [(c(1.0, -0.5), c(0.3, 1.0)), (c(0.4, 0.2), c(1.5, -4.0))];
    let s = synth(&terms, 0.05, 400);
    let (fit, rep) = fit_complex(&s, 2).unwrap();
    assert_eq!(fit.n_exp(), 2);
    assert!(rep.fit_error <= 1e-9);
}

#[test]
fn complex_fit_drops_growing_modes() {
    let s = synth(&[(c(1.0, 0.0), c(-0.5, 1.0)), (c(1.0, 0.0), c(1.0, 0.0))], 0.05, 200);
    let (fit, rep) = fit_complex(&s, 2).unwrap();
    assert_eq!(rep.dropped, 1);
    assert!(fit.exponents.iter().all(|z| z.re >= -1e-10));
}

#[test]
fn semicircle_complex_fit_accuracy() {
    let j = SpectralDensity::semicircular(1.0, 10.0, Support::Positive).unwrap();
    let s = sample_bcf(&j, 20.0, 400, Statistics::Boson).unwrap();
    let (_, rep) = fit_complex(&s, 6).unwrap();
    assert!(rep.max_abs_error <= 1e-2 * s.values[0][(0, 0)].norm());
}

#[test]
fn complex_fit_error_decays_with_terms() {
    for j in
        [SpectralDensity::<f64>::subohmic(1.0, 0.5, 1.0).unwrap(), SpectralDensity::semicircular(1.0, 10.0, Support::Positive).unwrap()]
    {
        let s = sample_bcf(&j, 20.0 / j.characteristic_rate(), 400, Statistics::Boson).unwrap();
        let e2: f64 = fit_complex(&s, 2).unwrap().1.max_abs_error.log10();
        let e8: f64 = fit_complex(&s, 8).unwrap().1.max_abs_error.log10();
        assert!((e2 - e8) / 6.0 >= 0.4, "{e2} -> {e8}");
    }
}

#[test]
fn positive_fit_recovers_positive_sum() {
    let terms = [(c(1.0, 0.0), c(0.5, 2.0)), (c(0.5, 0.0), c(1.0, 6.0))];
    let s = synth(&terms, 0.05, 400);
    let (fit, rep) = fit_positive(&s, 2, &PositiveOptions::new((0.0, 10.0))).unwrap();
    assert!(rep.fit_error <= 1e-6, "{}", rep.fit_error);
    assert!(fit.weights.iter().all(|w| w[(0, 0)].re >= 0.0 && w[(0, 0)].im == 0.0));
}

#[test]
fn positive_fit_matrix_weights_are_psd() {
    let j = SpectralDensity::two_site(1.0, 10.0, Support::Positive).unwrap();
    let s = sample_bcf(&j, 20.0, 200, Statistics::Boson).unwrap();
    let mut opts = PositiveOptions::for_density(&j, Statistics::Boson);
    opts.max_evals = 300;
    let (fit, _) = fit_positive(&s, 2, &opts).unwrap();
    for w in &fit.weights {
        assert!((w - w.adjoint()).norm() < 1e-12);
        assert!(w.clone().symmetric_eigenvalues().iter().all(|&e| e >= -1e-12));
    }
}

#[test]
fn empty_fits_score_the_signal_norm() {
    let s = synth(&[(c(1.0, 1.0), c(0.5, 1.0))], 0.1, 50);
    let norm: f64 = s.values.iter().map(|v| v[(0, 0)].norm_sqr()).sum::<f64>().sqrt() * 0.1;
    let (_, rc) = fit_complex(&s, 0).unwrap();
    let (_, rp) = fit_positive(&s, 0, &PositiveOptions::new((0.0, 1.0))).unwrap();
    assert!((rc.fit_error - norm).abs() < 1e-14);
    assert!((rp.fit_error - norm).abs() < 1e-14);
}

#[test]
fn fit_error_matches_direct_sum() {
    let s = synth(&[(c(1.0, 0.3), c(0.4, 2.0)), (c(0.2, 0.0), c(2.0, 0.0))], 0.05, 120);
    let fit = ExponentialFit::scalar(vec![c(0.41, 2.02)], vec![c(0.95, 0.3)], Statistics::Boson);
    let rep = fit_error(&fit, &s);
    let mut sq = 0.0;
    let mut worst: f64 = 0.0;
    for (t, v) in s.times.iter().zip(&s.values) {
        let r = (v[(0, 0)] - c(0.95, 0.3) * (-c(0.41, 2.02) * *t).exp()).norm();
        sq += r * r;
        worst = worst.max(r);
    }
    assert!((rep.fit_error - 0.05 * sq.sqrt()).abs() <= 1e-14 * rep.fit_error);
    assert!((rep.max_abs_error - worst).abs() <= 1e-14 * worst);
    let perfect = ExponentialFit::scalar(vec![c(0.4, 2.0), c(2.0, 0.0)], vec![c(1.0, 0.3), c(0.2, 0.0)], Statistics::Boson);
    assert!(fit_error(&perfect, &s).fit_error < 1e-14);
}

#[test]
fn discretization_examples() {
    let j = SpectralDensity::semicircular(1.0f64, 10.0, Support::Positive).unwrap();
    let one = discretize_hamiltonian(&j, 1);
    assert!((one.frequencies[0] - 5.0).abs() < 1e-14);
    assert!((one.couplings[(0, 0)].norm_sqr() - 2.7566).abs() < 1e-4);
    let errs: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| (discretize_hamiltonian(&j, n).couplings.iter().map(|g| g.norm_sqr()).sum::<f64>() - 2.5).abs())
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2] && errs[2] < 1e-5, "{errs:?}");
    let many = discretize_hamiltonian(&j, 64);
    let total: f64 = many.couplings.iter().map(|g| g.norm_sqr()).sum();
    assert!(many.frequencies.iter().all(|&w| (0.0..=10.0).contains(&w)));
    let c0 = many.bcf(0.0)[(0, 0)];
    assert!((c0.re - total).abs() < 1e-14 && c0.im == 0.0);
}

#[test]
fn json_round_trip() {
    let j = SpectralDensity::two_site(1.0, 10.0, Support::Positive).unwrap();
    let s = sample_bcf(&j, 20.0, 200, Statistics::Boson).unwrap();
    let (fit, rep) = fit_complex(&s, 3).unwrap();
    let doc = fit.to_json(rep.fit_error);
    assert_eq!(doc["statistics"], "boson-zeroT");
    let (back, err) = ExponentialFit::<f64>::from_json(&doc).unwrap();
    assert_eq!(back, fit);
    assert_eq!(err, rep.fit_error);
}

#[test]
fn nnls_matches_unconstrained_when_interior() {
    let a = DMatrix::from_row_slice(3, 2, &[1.0f64, 0.0, 0.0, 1.0, 1.0, 1.0]);
    let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
    let x = nnls(&a, &b);
    assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    let x = nnls(&a, &DVector::from_vec(vec![-1.0, 2.0, 1.0]));
    assert_eq!(x[0], 0.0);
    assert!(x[1] > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scaling_samples_scales_weights(re in -2.0f64..2.0, im in -2.0f64..2.0) {
        prop_assume!(re.hypot(im) > 0.1);
        let k = c(re, im);
        let s = synth(&[(c(1.0, 0.2), c(0.3, 1.0)), (c(0.5, -0.1), c(1.2, -3.0))], 0.05, 200);
        let (a, _) = fit_complex(&s, 2).unwrap();
        let (b, _) = fit_complex(&s.scaled(k), 2).unwrap();
        for (za, zb) in sorted(a.exponents.clone()).iter().zip(sorted(b.exponents.clone()).iter()) {
            prop_assert!((za - zb).norm() < 1e-8);
        }
        for t in [0.0, 0.5, 2.0] {
            prop_assert!((a.evaluate(t, 1)[(0, 0)] * k - b.evaluate(t, 1)[(0, 0)]).norm() < 1e-8);
        }
    }
}
