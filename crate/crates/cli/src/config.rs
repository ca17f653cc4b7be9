use std::path::{Path, PathBuf};

use clap::ValueEnum;
use qlpm::spectral::{SpectralDensity, Support};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    FitCompare,
    QuenchSpinBoson,
    QuenchFermion,
    StabilityBenchmark,
    KappaScan,
    BlochDemo,
    EffectiveLiouvillianScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Density {
    Subohmic,
    Semicircular,
    TwoSite,
}

impl Density {
    /// The density with the parameters used throughout the experiments.
    pub fn build(self, support: Support) -> qlpm::Result<SpectralDensity<f64>> {
        match self {
            Density::Subohmic => SpectralDensity::subohmic(1.0, 0.5, 1.0),
            Density::Semicircular => SpectralDensity::semicircular(1.0, 10.0, support),
            Density::TwoSite => SpectralDensity::two_site(1.0, 10.0, support),
        }
    }
}

/// A list given as a number, an array, or a range string `a..b` / `a..b:step`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ListArg {
    One(f64),
    Many(Vec<f64>),
    Text(String),
}

impl ListArg {
    pub fn parse(text: &str) -> CliResult<Vec<f64>> {
        let bad = || CliError::config(format!("cannot read '{text}' as a value, list or range"));
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        if let Some((lo, rest)) = text.split_once("..") {
            let (hi, step) = match rest.split_once(':') {
                Some((hi, step)) => (num(hi)?, num(step)?),
                None => (num(rest)?, 1.0),
            };
            let lo = num(lo)?;
            if !(step > 0.0) || hi < lo {
                return Err(bad());
            }
            let n = ((hi - lo) / step + 1e-9).floor() as usize;
            // rounded to 10 decimals
            return Ok((0..=n).map(|k| format!("{:.10}", lo + step * k as f64).parse().unwrap()).collect());
        }
        text.split(',').map(num).collect()
    }

    fn values(&self) -> CliResult<Vec<f64>> {
        match self {
            ListArg::One(x) => Ok(vec![*x]),
            ListArg::Many(v) => Ok(v.clone()),
            ListArg::Text(t) => Self::parse(t),
        }
    }
}

/// Contents of a `--config` file; every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<Experiment>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub density: Option<Density>,
    pub n_exp: Option<ListArg>,
    pub kappa: Option<ListArg>,
    pub n_max: Option<usize>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    /// Keys set in `other` replace those in `self`.
    pub fn overlay(self, other: ConfigFile) -> ConfigFile {
        ConfigFile {
            experiment: other.experiment.or(self.experiment),
            out: other.out.or(self.out),
            threads: other.threads.or(self.threads),
            seed: other.seed.or(self.seed),
            density: other.density.or(self.density),
            n_exp: other.n_exp.or(self.n_exp),
            kappa: other.kappa.or(self.kappa),
            n_max: other.n_max.or(self.n_max),
            t_max: other.t_max.or(self.t_max),
            dt: other.dt.or(self.dt),
        }
    }
}

/// Fully resolved and validated settings; written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub out: PathBuf,
    pub threads: usize,
    pub seed: u64,
    pub density: Density,
    pub n_exp: Vec<usize>,
    pub kappa: Vec<f64>,
    /// `None` lets the spin-boson quench pick the cutoff by convergence.
    pub n_max: Option<usize>,
    pub t_max: f64,
    pub dt: f64,
}

struct Defaults {
    density: Density,
    n_exp: &'static str,
    kappa: &'static str,
    n_max: Option<usize>,
    t_max: f64,
    dt: f64,
}

fn defaults(e: Experiment) -> Defaults {
    let d = |density, n_exp, kappa, n_max, t_max, dt| Defaults { density, n_exp, kappa, n_max, t_max, dt };
    match e {
        Experiment::FitCompare => d(Density::Subohmic, "2..8", "1", None, 20.0, 0.05),
        Experiment::QuenchSpinBoson => d(Density::Subohmic, "2", "1", None, 4.0, 0.05),
        Experiment::QuenchFermion => d(Density::Semicircular, "2,4,6", "1", None, 10.0, 0.05),
        Experiment::StabilityBenchmark => d(Density::Subohmic, "2", "1,2,0.5", Some(20), 10.0, 0.1),
        Experiment::KappaScan => d(Density::Subohmic, "2", "1.0..2.0:0.05", Some(30), 10.0, 0.1),
        Experiment::BlochDemo => d(Density::Subohmic, "2", "1", Some(20), 1.0, 0.1),
        Experiment::EffectiveLiouvillianScan => d(Density::Subohmic, "2", "0.5..1.5:0.05", Some(30), 10.0, 0.1),
    }
}

impl RunConfig {
    pub fn resolve(cfg: ConfigFile) -> CliResult<Self> {
        let experiment = cfg.experiment.ok_or_else(|| CliError::config("no experiment given on the command line or in the config"))?;
        let def = defaults(experiment);
        let n_exp_raw = match &cfg.n_exp {
            Some(s) => s.values()?,
            None => ListArg::parse(def.n_exp)?,
        };
        let mut n_exp = vec![];
        for x in n_exp_raw {
            if x.fract() != 0.0 || !(1.0..=16.0).contains(&x) {
                return Err(CliError::config(format!("n_exp entries must be integers in 1..=16, got {x}")));
            }
            n_exp.push(x as usize);
        }
        let kappa = match &cfg.kappa {
            Some(s) => s.values()?,
            None => ListArg::parse(def.kappa)?,
        };
        if kappa.is_empty() || kappa.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            return Err(CliError::config("kappa values must be finite and positive"));
        }
        let out = RunConfig {
            experiment,
            out: cfg.out.unwrap_or_else(|| PathBuf::from("qlpm-out")),
            threads: cfg.threads.unwrap_or(1),
            seed: cfg.seed.unwrap_or(0),
            density: cfg.density.unwrap_or(def.density),
            n_exp,
            kappa,
            n_max: cfg.n_max.or(def.n_max),
            t_max: cfg.t_max.unwrap_or(def.t_max),
            dt: cfg.dt.unwrap_or(def.dt),
        };
        let mut out = out;
        if experiment == Experiment::FitCompare && cfg.t_max.is_none() {
            let rate = out.density.build(Support::Positive)?.characteristic_rate();
            out.t_max = 20.0 / rate;
            out.dt = cfg.dt.unwrap_or(out.t_max / 399.0);
        }
        out.validate()?;
        Ok(out)
    }

    fn validate(&self) -> CliResult<()> {
        if self.threads == 0 {
            return Err(CliError::config("threads must be at least 1"));
        }
        if self.n_exp.is_empty() {
            return Err(CliError::config("n_exp must not be empty"));
        }
        if !(self.t_max.is_finite() && self.dt.is_finite() && self.t_max > 0.0 && self.dt > 0.0 && self.dt <= self.t_max) {
            return Err(CliError::config(format!("need 0 < dt <= t_max, got dt = {} and t_max = {}", self.dt, self.t_max)));
        }
        let min_n = match self.experiment {
            Experiment::StabilityBenchmark | Experiment::KappaScan | Experiment::EffectiveLiouvillianScan => 10,
            Experiment::BlochDemo => 2,
            _ => 1,
        };
        if let Some(n) = self.n_max {
            if n < min_n {
                return Err(CliError::config(format!("n_max must be at least {min_n} for {:?}", self.experiment)));
            }
        }
        match (self.experiment, self.density) {
            (Experiment::QuenchSpinBoson, Density::TwoSite) => Err(CliError::config("the spin-boson quench needs a single-site density")),
            (Experiment::QuenchFermion, Density::Subohmic) => {
                Err(CliError::config("the fermionic quench needs a semicircular or two-site density"))
            }
            _ => Ok(()),
        }
    }

    /// Uniform grid `0, dt, ..., t_max`.
    pub fn time_grid(&self) -> Vec<f64> {
        let n = (self.t_max / self.dt + 1e-9).floor() as usize;
        (0..=n).map(|k| k as f64 * self.dt).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(ListArg::parse("2..5").unwrap(), vec![2.0, 3.0, 4.0, 5.0]);
        let k = ListArg::parse("1.0..2.0:0.05").unwrap();
        assert_eq!(k.len(), 21);
        assert_eq!(k[6], 1.3);
        assert_eq!(ListArg::parse("1, 2,0.5").unwrap(), vec![1.0, 2.0, 0.5]);
        assert!(ListArg::parse("3..1").is_err());
        assert!(ListArg::parse("a").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file: ConfigFile = toml::from_str("experiment = \"kappa-scan\"\nn_max = 12\nkappa = [1.0, 1.5]").unwrap();
        let flags = ConfigFile { n_max: Some(14), ..Default::default() };
        let run = RunConfig::resolve(file.overlay(flags)).unwrap();
        assert_eq!(run.n_max, Some(14));
        assert_eq!(run.kappa, vec![1.0, 1.5]);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<ConfigFile>("experiment = \"bloch-demo\"\ncolour = 3").is_err());
    }
}
