// Copyright 2026 ptsim Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Deserialize;

use ptsim_core::harness::{self, Method, RunConfig};
use ptsim_core::{Error, Shots};

/// Simulate PT-symmetric qubit dynamics and write the results as CSV.
#[derive(Debug, Parser)]
#[command(name = "ptsim", version)]
struct Cli {
    /// exact | hybrid | dilation | coupled | sweep | transfer
    method: Method,
    /// Drive strength Ω (rad/μs).
    #[arg(long)]
    omega: Option<f64>,
    /// Gain/loss rate γ (1/μs).
    #[arg(long)]
    gamma: Option<f64>,
    /// Qubit-qubit coupling J (rad/μs); required for `coupled`.
    #[arg(long)]
    j: Option<f64>,
    /// End of the time grid (μs).
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    steps: Option<usize>,
    /// Shots per measurement setting, or `exact`.
    #[arg(long)]
    shots: Option<Shots>,
    /// Readout bit-flip probability.
    #[arg(long)]
    p_flip: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct FileConfig {
    omega: Option<f64>,
    gamma: Option<f64>,
    j: Option<f64>,
    t_max: Option<f64>,
    steps: Option<usize>,
    shots: Option<Shots>,
    p_flip: Option<f64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

fn load_file(path: &Path) -> Result<FileConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn resolve(cli: Cli) -> Result<RunConfig, Error> {
    let file = match &cli.config {
        Some(path) => load_file(path)?,
        None => FileConfig::default(),
    };
    let required = |flag: Option<f64>, from_file: Option<f64>, name: &str| {
        flag.or(from_file)
            .ok_or_else(|| Error::Config(format!("--{name} is required")))
    };
    let mut config = RunConfig::new(
        cli.method,
        required(cli.omega, file.omega, "omega")?,
        required(cli.gamma, file.gamma, "gamma")?,
    );
    config.j = cli.j.or(file.j);
    if let Some(t) = cli.t_max.or(file.t_max) {
        config.t_max = t;
    }
    if let Some(n) = cli.steps.or(file.steps) {
        config.steps = n;
    }
    if let Some(s) = cli.shots.or(file.shots) {
        config.shots = s;
    }
    if let Some(p) = cli.p_flip.or(file.p_flip) {
        config.p_flip = p;
    }
    if let Some(s) = cli.seed.or(file.seed) {
        config.seed = s;
    }
    config.out = cli.out.or(file.out);
    Ok(config)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };

    match resolve(cli).and_then(|config| harness::run(&config)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ptsim: {e}");
            ExitCode::from(harness::exit_code(&e) as u8)
        }
    }
}
