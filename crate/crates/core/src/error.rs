// Copyright 2026 ptsim Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::ptmodel::Regime;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,

    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("matrix is singular")]
    Singular,

    #[error("not a valid density matrix")]
    InvalidDensityMatrix,

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("operation requires the unbroken regime, parameters are {0:?}")]
    Regime(Regime),

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("qubit index {index} out of range for {n_qubits}-qubit circuit")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate matrix is not unitary")]
    NotUnitary,

    #[error("evolution paths disagree by {0:.3e}")]
    PathDisagreement(f64),

    #[error("all shots were discarded by post-selection")]
    NoSurvivingShots,

    #[error("perturbed energy has imaginary part {0:.3e}")]
    NonRealEnergy(f64),

    #[error("degenerate subspace is not diagonal under the interaction ({0:.3e})")]
    DegenerateMixing(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
