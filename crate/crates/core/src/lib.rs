// Copyright 2026 ptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Simulation of PT-symmetric qubit dynamics on a gate-level circuit
//! simulator: the classical reference, the similarity-transform hybrid
//! algorithm, ancilla dilation with post-selection, a weakly coupled
//! two-qubit extension and the measurement-noise experiments built on them.

pub mod algorithms;
pub mod circuit;
pub mod coupled;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod ptmodel;

pub use algorithms::TrajectoryPoint;
pub use circuit::{Circuit, Gate, MeasNoise, Shots};
pub use coupled::CoupledParams;
pub use error::{Error, Result};
pub use harness::{Method, RunConfig};
pub use numerics::{CMatrix, CVector};
pub use ptmodel::{PtParams, Regime};
