mod config;
mod error;
mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigFile, Density, Experiment, ListArg, RunConfig};
use error::CliResult;

/// Quasi-Lindblad pseudomode experiments.
#[derive(Parser)]
#[command(name = "qlpm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write CSV tables with JSON sidecars.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment to run; may instead come from the config file.
    #[arg(value_enum)]
    experiment: Option<Experiment>,
    /// TOML file with any of the keys below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    density: Option<Density>,
    /// A value, a comma list, or a range `a..b`.
    #[arg(long)]
    n_exp: Option<String>,
    /// A value, a comma list, or a range `a..b:step`.
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
}

impl RunArgs {
    fn into_config(self) -> CliResult<ConfigFile> {
        let base = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let flags = ConfigFile {
            experiment: self.experiment,
            out: self.out,
            threads: self.threads,
            seed: self.seed,
            density: self.density,
            n_exp: self.n_exp.map(ListArg::Text),
            kappa: self.kappa.map(ListArg::Text),
            n_max: self.n_max,
            t_max: self.t_max,
            dt: self.dt,
        };
        Ok(base.overlay(flags))
    }
}

fn run(args: RunArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(args.into_config()?)?;
    for path in experiments::run(&cfg)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
