// Copyright 2026 ptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration, experiment drivers and CSV/JSON emission.

use std::fmt::{self, Write as _};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{
    build_dilation, dilation_evolve, dilation_point, exact_trajectory, hybrid_evolve, hybrid_point, TrajectoryPoint,
};
use crate::circuit::{derive_seed, run_statevector, tomography, Circuit, Gate, MeasNoise, Shots};
use crate::coupled::{concurrence, coupled_hybrid_evolve, exact_coupled_evolve, CoupledParams};
use crate::error::{Error, Result};
use crate::numerics::{fidelity, CMatrix, CVector};
use crate::ptmodel::{build_similarity, exact_evolve, hermitian_propagator, transfer_time_comparison, PtParams};

pub const DEFAULT_SHOTS: u64 = 4096;
pub const DEFAULT_STEPS: usize = 200;
pub const DEFAULT_T_MAX: f64 = 1.8;
pub const DEFAULT_T_MAX_COUPLED: f64 = 1.6;

/// Probe times used by the `sweep` method for the two similarity-based
/// algorithms: a low- and a high-fidelity point for each.
pub const HYBRID_PROBES: [f64; 2] = [1.22, 1.77];
pub const DILATION_PROBES: [f64; 2] = [0.07, 0.01];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Hybrid,
    Dilation,
    Coupled,
    Sweep,
    Transfer,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Exact,
        Method::Hybrid,
        Method::Dilation,
        Method::Coupled,
        Method::Sweep,
        Method::Transfer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Hybrid => "hybrid",
            Method::Dilation => "dilation",
            Method::Coupled => "coupled",
            Method::Sweep => "sweep",
            Method::Transfer => "transfer",
        }
    }

    pub fn default_t_max(self) -> f64 {
        if self == Method::Coupled {
            DEFAULT_T_MAX_COUPLED
        } else {
            DEFAULT_T_MAX
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

/// Fully resolved run configuration. The JSON sidecar is this struct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    pub method: Method,
    pub omega: f64,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    pub t_max: f64,
    pub steps: usize,
    pub shots: Shots,
    pub p_flip: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(method: Method, omega: f64, gamma: f64) -> Self {
        Self {
            method,
            omega,
            gamma,
            j: None,
            t_max: method.default_t_max(),
            steps: DEFAULT_STEPS,
            shots: Shots::Finite(DEFAULT_SHOTS),
            p_flip: 0.0,
            seed: 0,
            out: None,
        }
    }

    /// Checks everything that does not depend on the physical regime.
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            return Err(Error::Config(format!(
                "t-max must be finite and non-negative, got {}",
                self.t_max
            )));
        }
        if !(self.p_flip.is_finite() && (0.0..=0.5).contains(&self.p_flip)) {
            return Err(Error::Config(format!(
                "p-flip must lie in [0, 0.5], got {}",
                self.p_flip
            )));
        }
        if self.method == Method::Coupled && self.j.is_none() {
            return Err(Error::Config("method coupled requires --j".into()));
        }
        PtParams::new(self.omega, self.gamma).map_err(as_config)?;
        if let Some(j) = self.j {
            if !(j.is_finite() && j >= 0.0) {
                return Err(Error::Config(format!("j must be non-negative, got {j}")));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Result<PtParams> {
        PtParams::new(self.omega, self.gamma).map_err(as_config)
    }

    pub fn noise(&self) -> Result<MeasNoise> {
        MeasNoise::new(self.p_flip).map_err(as_config)
    }

    pub fn times(&self) -> Vec<f64> {
        linspace(self.t_max, self.steps)
    }

    /// Path of the JSON sidecar next to the CSV, `<out>.meta.json`.
    pub fn sidecar_path(&self) -> Option<PathBuf> {
        self.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".meta.json");
            PathBuf::from(s)
        })
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::InvalidParams(msg) => Error::Config(msg),
        other => other,
    }
}

/// `steps` evenly spaced points on `[0, t_max]`; a zero-length interval or
/// a single step collapses to `[0]`.
pub fn linspace(t_max: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 || t_max == 0.0 {
        return vec![0.0];
    }
    let last = (steps - 1) as f64;
    (0..steps).map(|k| t_max * k as f64 / last).collect()
}

/// Process exit status for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Regime(_) => 2,
        Error::Io(_) | Error::Json(_) => 3,
        _ => 1,
    }
}

/// Fixed 12-significant-digit rendering in the style of C's `%.12g`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    const DIGITS: i32 = 12;
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn push_row(out: &mut String, cells: &[f64]) {
    let row: Vec<String> = cells.iter().map(|&x| format_number(x)).collect();
    let _ = writeln!(out, "{}", row.join(","));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMethod {
    Hybrid,
    Dilation,
    Hermitian,
}

impl SweepMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepMethod::Hybrid => "hybrid",
            SweepMethod::Dilation => "dilation",
            SweepMethod::Hermitian => "hermitian",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub method: SweepMethod,
    pub t_probe: f64,
    pub p_grid: Vec<f64>,
    pub fidelities: Vec<f64>,
}

/// `0, 0.05, …, 0.5`.
pub fn default_p_grid() -> Vec<f64> {
    (0..=10).map(|k| k as f64 * 0.05).collect()
}

/// Population-balanced time `π/(4Ω cos α)` of the Hermitian baseline.
pub fn hermitian_probe(p: &PtParams) -> Result<f64> {
    Ok(std::f64::consts::FRAC_PI_4 / p.energy()?)
}

/// Reconstructed state for one flip probability and cell seed.
type SweepCell = dyn Fn(MeasNoise, u64) -> Result<CMatrix> + Sync;

/// Fidelity at `t_probe` against the exact state, for each flip probability.
///
/// The Hermitian baseline is the bare `RX(2Ω cos α · t)` rotation from |0⟩
/// compared with `e^{-iht}|0⟩`; the other methods start from |0⟩ and are
/// compared with the normalized non-Hermitian evolution.
pub fn noise_sweep(
    method: SweepMethod,
    p: &PtParams,
    t_probe: f64,
    p_grid: &[f64],
    shots: Shots,
    seed: u64,
) -> Result<SweepResult> {
    if let Some(&bad) = p_grid.iter().find(|&&q| !(0.0..=0.5).contains(&q)) {
        return Err(Error::InvalidParams(format!("flip probability {bad} outside [0, 0.5]")));
    }
    let psi0 = CVector::basis(2, 0);
    let (reference, cell): (CMatrix, Box<SweepCell>) = match method {
        SweepMethod::Hermitian => {
            let exact = hermitian_propagator(p, t_probe)?.mul_vec(&psi0)?;
            let mut circ = Circuit::new(1)?;
            circ.push(Gate::Rx {
                qubit: 0,
                theta: 2.0 * p.energy()? * t_probe,
            })?;
            let state = run_statevector(&circ, &psi0)?;
            (
                exact.projector(),
                Box::new(move |noise, s| tomography(&state, 1, shots, noise, s)),
            )
        }
        SweepMethod::Hybrid => {
            let sim = build_similarity(p)?;
            let p = *p;
            let psi = psi0.clone();
            (
                exact_evolve(&p, &psi0, t_probe)?.state.projector(),
                Box::new(move |noise, s| Ok(hybrid_point(&p, &sim, &psi, t_probe, shots, noise, s)?.rho)),
            )
        }
        SweepMethod::Dilation => {
            let spec = build_dilation(p)?;
            let p = *p;
            let psi = psi0.clone();
            (
                exact_evolve(&p, &psi0, t_probe)?.state.projector(),
                Box::new(move |noise, s| Ok(dilation_point(&spec, &p, &psi, t_probe, shots, noise, s)?.rho)),
            )
        }
    };
    let fidelities = p_grid
        .par_iter()
        .enumerate()
        .map(|(k, &q)| fidelity(&reference, &cell(MeasNoise::new(q)?, derive_seed(seed, k as u64))?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(SweepResult {
        method,
        t_probe,
        p_grid: p_grid.to_vec(),
        fidelities,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferReport {
    pub omega: f64,
    pub gamma: f64,
    pub t_pt: f64,
    pub t_herm: f64,
    pub ratio: f64,
}

pub fn transfer_report(p: &PtParams) -> Result<TransferReport> {
    let tt = transfer_time_comparison(p)?;
    Ok(TransferReport {
        omega: p.omega(),
        gamma: p.gamma(),
        t_pt: tt.t_pt,
        t_herm: tt.t_herm,
        ratio: tt.ratio(),
    })
}

/// Runs the configured experiment and returns the CSV text.
pub fn render(config: &RunConfig) -> Result<String> {
    config.validate()?;
    let p = config.params()?;
    let noise = config.noise()?;
    let times = config.times();
    let mut out = String::new();
    match config.method {
        Method::Exact | Method::Hybrid | Method::Dilation => {
            let psi0 = CVector::basis(2, 0);
            let points = match config.method {
                Method::Exact => exact_trajectory(&p, &psi0, &times)?,
                Method::Hybrid => hybrid_evolve(&p, &psi0, &times, config.shots, noise, config.seed)?,
                _ => dilation_evolve(&p, &psi0, &times, config.shots, noise, config.seed)?,
            };
            let exact = exact_trajectory(&p, &psi0, &times)?;
            out.push_str("t,p0,p1,fidelity_vs_exact,p_success\n");
            for (pt, ex) in points.iter().zip(&exact) {
                let f = fidelity(&ex.rho, &pt.rho)?;
                push_row(&mut out, &[pt.t, pt.populations[0], pt.populations[1], f, pt.p_success]);
            }
        }
        Method::Coupled => {
            let cp = CoupledParams::new(p, config.j.unwrap_or_default())?;
            let psi0 = CVector::basis(4, 3);
            let points = coupled_hybrid_evolve(&cp, &psi0, &times, config.shots, noise, config.seed)?;
            out.push_str("t,p00,p01,p10,p11,fidelity_vs_exact,p_success,concurrence\n");
            let rows = points
                .par_iter()
                .map(|pt: &TrajectoryPoint| {
                    let exact = exact_coupled_evolve(&cp, &psi0, pt.t)?.projector();
                    let mut row = vec![pt.t];
                    row.extend(&pt.populations);
                    row.extend([fidelity(&exact, &pt.rho)?, pt.p_success, concurrence(&pt.rho)?]);
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()?;
            for row in rows {
                push_row(&mut out, &row);
            }
        }
        Method::Sweep => {
            let grid = default_p_grid();
            let probes = [
                (SweepMethod::Hermitian, hermitian_probe(&p)?),
                (SweepMethod::Hybrid, HYBRID_PROBES[0]),
                (SweepMethod::Hybrid, HYBRID_PROBES[1]),
                (SweepMethod::Dilation, DILATION_PROBES[0]),
                (SweepMethod::Dilation, DILATION_PROBES[1]),
            ];
            out.push_str("method,t_probe,p_flip,fidelity\n");
            for (k, (method, t_probe)) in probes.into_iter().enumerate() {
                let res = noise_sweep(
                    method,
                    &p,
                    t_probe,
                    &grid,
                    config.shots,
                    derive_seed(config.seed, k as u64),
                )?;
                for (q, f) in res.p_grid.iter().zip(&res.fidelities) {
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        method.as_str(),
                        format_number(t_probe),
                        format_number(*q),
                        format_number(*f)
                    );
                }
            }
        }
        Method::Transfer => {
            let r = transfer_report(&p)?;
            out.push_str("omega,gamma,t_pt,t_herm,ratio\n");
            push_row(&mut out, &[r.omega, r.gamma, r.t_pt, r.t_herm, r.ratio]);
        }
    }
    Ok(out)
}

/// Runs the experiment and writes the CSV plus its JSON sidecar, or the
/// CSV alone to stdout when no output path is configured.
pub fn run(config: &RunConfig) -> Result<()> {
    let csv = render(config)?;
    match (&config.out, config.sidecar_path()) {
        (Some(path), Some(meta)) => {
            write_file(path, csv.as_bytes())?;
            let mut json = serde_json::to_string_pretty(config)?;
            json.push('\n');
            write_file(&meta, json.as_bytes())?;
        }
        _ => std::io::stdout().lock().write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}
