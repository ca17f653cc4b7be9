use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use nalgebra::DMatrix;
use num_complex::Complex;
use qlpm::expfit::{fit_with, FitMethod};
use qlpm::fermi_gauss::{build_xy, exact_reference, propagate_lyapunov, quench_setup, OccupationTrajectory};
use qlpm::liouville::{
    benchmark_model, bloch_stability, build_liouvillian, converge_in_truncation, dense_eigenvalues, dephasing_reference,
    effective_liouvillian, instability_benchmark, instability_benchmark_with, product_state, propagate, sigma_x, sigma_z, FockTruncation,
};
use qlpm::pseudomode::{from_fit, PseudomodeModel};
use qlpm::spectral::{sample_bcf, SpectralDensity, Statistics, Support};

use crate::config::{Density, Experiment, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{write_table, Cell, Table};

type C = Complex<f64>;

const FIT_SAMPLES: usize = 400;
const FIT_WINDOW_RATES: f64 = 20.0;
const SPIN_BOSON_SPLITTING: f64 = 4.0;
const FERMION_LEVEL: f64 = -4.0;
const CONV_TOL: f64 = 1e-6;
const UNSTABLE_TOL: f64 = 1e-8;

fn c(re: f64) -> C {
    Complex::new(re, 0.0)
}

/// Applies `f` to every item on `threads` workers; results keep input order.
fn par_map<I: Sync, O: Send>(items: &[I], threads: usize, f: impl Fn(&I) -> O + Sync) -> Vec<O> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<O>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads.min(items.len()).max(1) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(k) else { break };
                let out = f(item);
                slots.lock().expect("worker panicked")[k] = Some(out);
            });
        }
    });
    slots.into_inner().expect("worker panicked").into_iter().map(|o| o.expect("every slot filled")).collect()
}

fn collect<O>(results: Vec<qlpm::Result<O>>) -> CliResult<Vec<O>> {
    results.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

fn tag(x: f64) -> String {
    format!("{x}")
}

/// Runs the configured experiment and returns the files written.
pub fn run(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let tables = match cfg.experiment {
        Experiment::FitCompare => fit_compare(cfg)?,
        Experiment::QuenchSpinBoson => quench_spin_boson(cfg)?,
        Experiment::QuenchFermion => quench_fermion(cfg)?,
        Experiment::StabilityBenchmark => stability_benchmark(cfg)?,
        Experiment::KappaScan => kappa_scan(cfg)?,
        Experiment::BlochDemo => bloch_demo(cfg)?,
        Experiment::EffectiveLiouvillianScan => effective_scan(cfg)?,
    };
    tables.iter().map(|t| write_table(&cfg.out, t, cfg)).collect()
}

fn n_samples(cfg: &RunConfig) -> usize {
    cfg.time_grid().len()
}

fn fit_compare(cfg: &RunConfig) -> CliResult<Vec<Table>> {
    let j = cfg.density.build(Support::Positive)?;
    let samples = sample_bcf(&j, cfg.t_max, n_samples(cfg), Statistics::Boson)?;
    let jobs: Vec<(FitMethod, usize)> = FitMethod::ALL.iter().flat_map(|&m| cfg.n_exp.iter().map(move |&n| (m, n))).collect();
    let reports = collect(par_map(&jobs, cfg.threads, |&(m, n)| fit_with(m, &j, &samples, n).map(|(_, r)| r)))?;
    let mut table = Table::new("fit_compare", &["method", "n_exp", "E_fit", "max_abs_error"]);
    for ((m, n), r) in jobs.iter().zip(reports) {
        table.push(vec![m.as_str().into(), (*n).into(), r.fit_error.into(), r.max_abs_error.into()]);
    }
    Ok(vec![table])
}

fn spin_boson_sx(model: &PseudomodeModel<f64>, n_max: usize, ts: &[f64]) -> qlpm::Result<Vec<f64>> {
    let h = sigma_z::<f64>() * c(SPIN_BOSON_SPLITTING / 2.0);
    let l = build_liouvillian(&h, &[sigma_z()], model, &FockTruncation::uniform(n_max, model.n_modes()))?;
    let rho0 = product_state(&DMatrix::from_element(2, 2, c(0.5)), &l.dims);
    let traj = propagate(&l, &rho0, ts, &[("sx", sigma_x())])?;
    Ok(traj.observable("sx").expect("requested observable").iter().map(|v| v.re).collect())
}

fn quench_spin_boson(cfg: &RunConfig) -> CliResult<Vec<Table>> {
    let j = cfg.density.build(Support::Positive)?;
    let samples = sample_bcf(&j, FIT_WINDOW_RATES / j.characteristic_rate(), FIT_SAMPLES, Statistics::Boson)?;
    let ts = cfg.time_grid();
    let reference = ts.iter().map(|&t| dephasing_reference(&j, SPIN_BOSON_SPLITTING, t)).collect::<qlpm::Result<Vec<f64>>>()?;
    let jobs: Vec<(usize, FitMethod)> = cfg.n_exp.iter().flat_map(|&n| FitMethod::ALL.iter().map(move |&m| (n, m))).collect();
    let runs = collect(par_map(&jobs, cfg.threads, |&(n, m)| {
        let (fit, _) = fit_with(m, &j, &samples, n)?;
        let model = from_fit(&fit, &[])?;
        match cfg.n_max {
            Some(n_max) => Ok((n_max, spin_boson_sx(&model, n_max, &ts)?)),
            None => converge_in_truncation(4, 4, 40, CONV_TOL, |n_max| spin_boson_sx(&model, n_max, &ts)),
        }
    }))?;
    let mut tables = vec![];
    let mut errors = Table::new("quench_spin_boson_errors", &["n_exp", "method", "n_max", "max_error"]);
    for (chunk, n) in runs.chunks(FitMethod::ALL.len()).zip(&cfg.n_exp) {
        let mut header = vec!["t", "reference"];
        header.extend(FitMethod::ALL.iter().map(|m| m.as_str()));
        let mut table = Table::new(&format!("quench_spin_boson_n{n}"), &header);
        for (k, (&t, &r)) in ts.iter().zip(&reference).enumerate() {
            let mut row: Vec<Cell> = vec![t.into(), r.into()];
            row.extend(chunk.iter().map(|(_, sx)| Cell::from(sx[k])));
            table.push(row);
        }
        tables.push(table);
        for (m, (n_max, sx)) in FitMethod::ALL.iter().zip(chunk) {
            let err = sx.iter().zip(&reference).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            errors.push(vec![(*n).into(), m.as_str().into(), (*n_max).into(), err.into()]);
        }
    }
    tables.push(errors);
    Ok(tables)
}

fn occupation_table(name: &str, traj: &OccupationTrajectory<f64>) -> Table {
    let ns = traj.occupations.first().map_or(0, |o| o.len());
    let cols: Vec<String> = (0..ns).map(|s| format!("n_{s}")).collect();
    let mut header = vec!["t"];
    header.extend(cols.iter().map(|s| s.as_str()));
    let mut table = Table::new(name, &header);
    for (t, occ) in traj.times.iter().zip(&traj.occupations) {
        let mut row: Vec<Cell> = vec![(*t).into()];
        row.extend(occ.iter().map(|&x| Cell::from(x)));
        table.push(row);
    }
    table
}

fn quench_fermion(cfg: &RunConfig) -> CliResult<Vec<Table>> {
    let j: SpectralDensity<f64> = cfg.density.build(Support::Symmetric)?;
    let ns = j.n_sites();
    let occupied: Vec<usize> = if cfg.density == Density::TwoSite { vec![0] } else { vec![] };
    let ts = cfg.time_grid();
    let h = DMatrix::from_diagonal_element(ns, ns, c(FERMION_LEVEL));
    let mut p0 = DMatrix::zeros(ns, ns);
    for &o in &occupied {
        p0[(o, o)] = c(1.0);
    }
    let blocks = (cfg.t_max / 10.0).ceil().max(1.0) as usize;
    let n_ref = if ns == 1 { 80 } else { 200 } * blocks;
    let exact = exact_reference(&j, &h, &p0, n_ref, &ts)?;
    let methods = [FitMethod::QuasiLindblad, FitMethod::Lorentzian];
    let jobs: Vec<(FitMethod, usize)> = methods.iter().flat_map(|&m| cfg.n_exp.iter().map(move |&n| (m, n))).collect();
    let t_fit = FIT_WINDOW_RATES / j.characteristic_rate();
    let runs = collect(par_map(&jobs, cfg.threads, |&(m, n)| {
        let setup = quench_setup(&j, FERMION_LEVEL, &occupied, n, m, t_fit, FIT_SAMPLES)?;
        propagate_lyapunov(&build_xy(&setup)?, &setup.initial_state(), &ts)
    }))?;
    let mut tables = vec![occupation_table("quench_fermion_reference", &exact)];
    let mut errors = Table::new("quench_fermion_errors", &["method", "n_exp", "max_error", "final_error"]);
    for ((m, n), traj) in jobs.iter().zip(&runs) {
        tables.push(occupation_table(&format!("quench_fermion_{}_n{n}", m.as_str()), traj));
        errors.push(vec![m.as_str().into(), (*n).into(), traj.max_error(&exact).into(), traj.final_error(&exact).into()]);
    }
    tables.push(errors);
    Ok(tables)
}

fn n_max(cfg: &RunConfig) -> usize {
    cfg.n_max.expect("validated n_max")
}

fn stability_benchmark(cfg: &RunConfig) -> CliResult<Vec<Table>> {
    let ts = cfg.time_grid();
    let n = n_max(cfg);
    let runs = collect(par_map(&cfg.kappa, cfg.threads, |&k| instability_benchmark(c(k), n, &ts)))?;
    let mut tables = vec![];
    let mut summary = Table::new("stability_benchmark", &["kappa", "n_max", "max_re_lambda", "diverged_at"]);
    for (&k, run) in cfg.kappa.iter().zip(&runs) {
        let mut pop = Table::new(&format!("population_k{}", tag(k)), &["t", "p1"]);
        for (&t, &p) in ts.iter().zip(&run.population) {
            pop.push(vec![t.into(), p.into()]);
        }
        let mut eig = run.spectrum.eigenvalues.clone();
        eig.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
        let mut spectrum_table = Table::new(&format!("spectrum_k{}", tag(k)), &["re_lambda", "im_lambda"]);
        for e in eig {
            spectrum_table.push(vec![e.re.into(), e.im.into()]);
        }
        let diverged = run.trajectory.diverged_at.map_or(Cell::from(""), Cell::from);
        summary.push(vec![k.into(), n.into(), run.spectrum.max_re.into(), diverged]);
        tables.push(pop);
        tables.push(spectrum_table);
    }
    tables.push(summary);
    Ok(tables)
}

fn estimator_max_re(kappa: f64, n: usize) -> qlpm::Result<f64> {
    let model = benchmark_model(c(kappa));
    let mut best = f64::MIN;
    for (s, sp) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        let g = effective_liouvillian(&model, s, sp, 0, n)?;
        best = dense_eigenvalues(&g)?.iter().fold(best, |m, e| m.max(e.re));
    }
    Ok(best)
}

fn kappa_scan(cfg: &RunConfig) -> CliResult<Vec<Table>> {
    let n = n_max(cfg);
    let h = sigma_x::<f64>() * c(2.0);
    let jobs: Vec<(&str, f64, f64)> =
        cfg.kappa.iter().map(|&v| ("kappa", v, v)).chain(cfg.kappa.iter().map(|&v| ("inverse-kappa", v, 1.0 / v))).collect();
    let rows = collect(par_map(&jobs, cfg.threads, |&(_, _, kappa)| {
        let full = instability_benchmark_with(c(kappa), n, &[], h.clone(), true)?.spectrum.max_re;
        Ok((full, estimator_max_re(kappa, n)?))
    }))?;
    let mut table = Table::new("kappa_scan", &["variable", "value", "kappa", "max_re_full", "max_re_estimator"]);
    let mut threshold = Table::new("kappa_scan_threshold", &["variable", "first_unstable"]);
    for var in ["kappa", "inverse-kappa"] {
        let first = jobs.iter().zip(&rows).find(|((v, _, _), (full, _))| *v == var && *full > UNSTABLE_TOL).map(|((_, x, _), _)| *x);
        threshold.push(vec![var.into(), first.map_or(Cell::from(""), Cell::from)]);
    }
    for ((var, value, kappa), (full, est)) in jobs.iter().zip(rows) {
        table.push(vec![(*var).into(), (*value).into(), (*kappa).into(), full.into(), est.into()]);
    }
    Ok(vec![table, threshold])
}

fn bloch_demo(cfg: &RunConfig) -> CliResult<Vec<Table>> {
    let n = n_max(cfg);
    let axis = |k: usize| 0.1 * (k + 1) as f64 * 20.0 / n as f64;
    let mut table =
        Table::new("bloch_demo", &["gamma_x", "gamma_z", "nu", "stable", "analytic", "re_1", "im_1", "re_2", "im_2", "re_3", "im_3"]);
    for a in 0..n {
        for b in 0..n {
            for k in 0..n {
                let (gx, gz, nu) = (axis(a), axis(b), axis(k) - 1.0);
                let (m, stable) = bloch_stability(gx, gz, nu);
                let mut eig: Vec<C> = m.complex_eigenvalues().iter().copied().collect();
                eig.sort_by(|x, y| y.re.total_cmp(&x.re).then(x.im.total_cmp(&y.im)));
                let analytic = gx > gz && gz > 0.0 && nu * nu > gx * gz;
                let mut row: Vec<Cell> = vec![gx.into(), gz.into(), nu.into(), stable.into(), analytic.into()];
                row.extend(eig.iter().flat_map(|e| [Cell::from(e.re), Cell::from(e.im)]));
                table.push(row);
            }
        }
    }
    Ok(vec![table])
}

fn effective_scan(cfg: &RunConfig) -> CliResult<Vec<Table>> {
    let n = n_max(cfg);
    let signs = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
    let jobs: Vec<(f64, f64, f64)> = cfg.kappa.iter().flat_map(|&k| signs.iter().map(move |&(s, sp)| (k, s, sp))).collect();
    let rows = collect(par_map(&jobs, cfg.threads, |&(k, s, sp)| {
        let g = effective_liouvillian(&benchmark_model(c(k)), s, sp, 0, n)?;
        Ok(dense_eigenvalues(&g)?.iter().fold(f64::MIN, |m, e| m.max(e.re)))
    }))?;
    let mut table = Table::new("effective_liouvillian_scan", &["kappa", "s", "s_prime", "max_re"]);
    for ((k, s, sp), r) in jobs.iter().zip(rows) {
        table.push(vec![(*k).into(), (*s).into(), (*sp).into(), r.into()]);
    }
    Ok(vec![table])
}
