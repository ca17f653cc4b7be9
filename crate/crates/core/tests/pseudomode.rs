use nalgebra::DMatrix;
use num_complex::Complex;
use proptest::prelude::*;
use qlpm::expfit::{fit_error, ExponentialFit};
use qlpm::pseudomode::*;
use qlpm::spectral::{BcfSamples, Statistics};

type C = Complex<f64>;

fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

fn two_site_fit(statistics: Statistics) -> ExponentialFit<f64> {
    let w1 = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.3, 0.2), c(0.3, -0.2), c(0.5, 0.0)]);
    let w2 = DMatrix::from_row_slice(2, 2, &[c(0.2, -0.4), c(0.1, 0.0), c(-0.3, 0.1), c(0.7, 0.3)]);
    ExponentialFit::new(vec![c(1.0, 2.0), c(0.4, -1.5)], vec![w1, w2], statistics)
}

#[test]
fn gauge_reference_values() {
    let (v, m) = gauge_min_m(c(50.0, -2.5));
    assert!((v - 7.0732).abs() < 1e-4 && (m - 0.17673).abs() < 1e-5);
    let (v, m) = gauge_min_m(c(4.0, 0.0));
    assert_eq!((v, m), (2.0, 0.0));
    let (v, m) = gauge_single(c(1.0, 0.0), c(2.0, 0.0));
    assert!((v - c(1.25, 0.0)).norm() < 1e-15 && (m - c(0.0, 0.75)).norm() < 1e-15);
}

#[test]
fn lorentzian_limit() {
    let fit = ExponentialFit::scalar(vec![c(1.0, 0.0)], vec![c(4.0, 0.0)], Statistics::Boson);
    let model = from_fit(&fit, &[]).unwrap();
    assert_eq!(model.n_modes(), 1);
    assert!((model.v[(0, 0)] - c(2.0, 0.0)).norm() < 1e-15);
    assert!(model.m[(0, 0)].norm() < 1e-15);
    assert!(lindbladian_gamma_tilde(&model).1);
}

#[test]
fn rank_one_weight_gives_one_submode() {
    let u = [c(1.0, 0.0), c(0.0, 1.0)];
    let w = DMatrix::from_fn(2, 2, |i, j| u[i] * u[j].conj());
    let fit = ExponentialFit::new(vec![c(1.0, 0.5)], vec![w], Statistics::Boson);
    let model = from_fit(&fit, &[]).unwrap();
    assert_eq!(model.n_modes(), 1);
    let (l, r) = (model.left(), model.right());
    for j in 0..2 {
        assert!((l[(j, 0)] - u[j]).norm() < 1e-12);
        assert!((r[(j, 0)] - u[j]).norm() < 1e-12);
    }
}

#[test]
fn multi_site_model_reproduces_fit() {
    for stats in [Statistics::Boson, Statistics::FermionGreater, Statistics::FermionLesser] {
        let fit = two_site_fit(stats);
        let model = from_fit(&fit, &[]).unwrap();
        assert_eq!(model.n_modes(), 4);
        assert!(model.gamma().iter().all(|&g| g >= 0.0));
        for t in [0.0, 1.0, 5.0] {
            assert!((model_bcf(&model, t) - fit.evaluate(t, 2)).norm() < 1e-12, "{stats:?} t = {t}");
        }
    }
}

#[test]
fn modes_ordered_by_weight() {
    let fit = ExponentialFit::scalar(
        vec![c(1.0, 0.0), c(2.0, 1.0), c(0.5, -1.0)],
        vec![c(0.1, 0.0), c(3.0, 1.0), c(1.0, 0.0)],
        Statistics::Boson,
    );
    let model = from_fit(&fit, &[]).unwrap();
    assert_eq!(model.z, vec![c(2.0, 1.0), c(0.5, -1.0), c(1.0, 0.0)]);
}

#[test]
fn lesser_energies_flip_sign() {
    let model = PseudomodeModel::scalar(&[c(1.0, 3.0)], &[c(1.0, 0.0)], &[], Statistics::FermionLesser);
    assert_eq!(model.energies(), vec![-3.0]);
    let model = PseudomodeModel::scalar(&[c(1.0, 3.0)], &[c(1.0, 0.0)], &[], Statistics::FermionGreater);
    assert_eq!(model.energies(), vec![3.0]);
}

#[test]
fn fit_error_survives_conversion() {
    let fit = two_site_fit(Statistics::Boson);
    let samples =
        BcfSamples::new(0.1, (0..60).map(|a| fit.evaluate(0.1 * a as f64, 2) * c(1.0 + 1e-3 * a as f64, 0.0)).collect(), Statistics::Boson)
            .unwrap();
    let model = from_fit(&fit, &[c(2.0, 1.0), c(0.5, 0.0)]).unwrap();
    let direct = fit_error(&fit, &samples).fit_error;
    let sq: f64 = samples.values.iter().zip(&samples.times).map(|(v, &t)| (model_bcf(&model, t) - v).norm_squared()).sum();
    let via_model = samples.dt * sq.sqrt();
    assert!((direct - via_model).abs() < 1e-12);
}

#[test]
fn gamma_tilde_indefinite_with_m() {
    let mut model = PseudomodeModel::scalar(&[c(1.0, 0.0)], &[c(1.0, 0.0)], &[], Statistics::Boson);
    model.m[(0, 0)] = c(0.5, 0.0);
    let (g, is_cp) = lindbladian_gamma_tilde(&model);
    assert!(!is_cp);
    let ev = g.symmetric_eigenvalues();
    let mut ev: Vec<f64> = ev.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    assert!((ev[0] - (1.0 - 2f64.sqrt()) / 2.0).abs() < 1e-14);
    assert!((ev[1] - (1.0 + 2f64.sqrt()) / 2.0).abs() < 1e-14);
}

#[test]
fn bad_gauge_rejected() {
    let fit = ExponentialFit::scalar(vec![c(1.0, 0.0)], vec![c(1.0, 0.0)], Statistics::Boson);
    assert!(from_fit(&fit, &[c(0.0, 0.0)]).is_err());
    assert!(from_fit(&fit, &[c(1.0, 0.0), c(1.0, 0.0)]).is_err());
}

#[test]
fn json_round_trip() {
    let model = from_fit(&two_site_fit(Statistics::FermionLesser), &[]).unwrap();
    let doc = model.to_json();
    assert_eq!(doc["statistics"], "fermion-lesser");
    assert!(doc.get("V").is_some() && doc.get("M").is_some());
    assert_eq!(PseudomodeModel::<f64>::from_json(&doc).unwrap(), model);
}

fn arb_c(lo: f64, hi: f64) -> impl Strategy<Value = C> {
    (lo..hi, lo..hi).prop_map(|(a, b)| c(a, b))
}

proptest! {
    #[test]
    fn min_m_gauge_is_minimal(w in arb_c(-5.0, 5.0), kappa in arb_c(-3.0, 3.0)) {
        prop_assume!(kappa.norm() > 1e-3);
        let (v, m) = gauge_single(w, kappa);
        prop_assert!(((v - c(0.0, 1.0) * m) * (v.conj() - c(0.0, 1.0) * m.conj()) - w).norm() < 1e-13 * (1.0 + w.norm() * (kappa.norm() + 1.0 / kappa.norm()).powi(2)));
        let (_, m1) = gauge_min_m(w);
        prop_assert!(m.norm() >= m1.abs() - 1e-12);
    }

    #[test]
    fn model_bcf_is_gauge_invariant(
        z in prop::collection::vec(arb_c(0.1, 2.0), 1..4),
        w in prop::collection::vec(arb_c(-2.0, 2.0), 4),
        kappa in prop::collection::vec(arb_c(0.3, 2.0), 4),
        t in 0.0f64..5.0,
    ) {
        let n = z.len();
        let fit = ExponentialFit::scalar(z, w[..n].to_vec(), Statistics::Boson);
        let a = from_fit(&fit, &[]).unwrap();
        let b = from_fit(&fit, &kappa[..n]).unwrap();
        prop_assert!((model_bcf(&a, t) - model_bcf(&b, t)).norm() < 1e-12);
        prop_assert!((model_bcf(&a, t) - fit.evaluate(t, 1)).norm() < 1e-12);
    }
}
