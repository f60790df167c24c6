// Copyright 2026 ptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Gate-level evolution of a single PT-symmetric qubit.
//!
//! Both algorithms prepare `τψ₀/𝒩` with one gate and evolve it under the
//! Hermitian equivalent with an `RX(2Ω cos α · t)`. They differ in how the
//! final `τ⁻¹` is applied:
//!
//! * hybrid: full single-qubit tomography, then `ρ ↦ τ⁻¹ρτ⁻¹ / Tr` on the
//!   classical side;
//! * dilation: `τ⁻¹ = scale · V diag(d) V†` with `d ∈ (0, 1]`, where
//!   `diag(d)` is block-encoded with one ancilla as
//!   `(H⊗I) (|0⟩⟨0|⊗diag(d₊) + |1⟩⟨1|⊗diag(d₋)) (H⊗I)` and
//!   `d± = d ± i√(1−d²)`. Post-selecting the ancilla on `|0⟩` leaves
//!   `(d₊ + d₋)/2 = d`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    self, derive_seed, measured_frequencies, parity_expectation, pauli_strings, run_statevector, synth_diagonal_2q,
    Circuit, Gate, MeasNoise, Shots,
};
use crate::error::{Error, Result};
use crate::numerics::{c, eigh, nearest_psd, CMatrix, CVector};
use crate::ptmodel::{build_similarity, exact_evolve, PtParams, SimilarityTransform};

/// One time sample of a simulated trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub rho: CMatrix,
    /// Computational-basis populations: `diag(rho)`, or the directly
    /// measured frequencies where the method reads them out.
    pub populations: Vec<f64>,
    /// Post-selection success probability; 1 where nothing is discarded.
    pub p_success: f64,
}

impl TrajectoryPoint {
    pub fn from_rho(t: f64, rho: CMatrix, p_success: f64) -> Self {
        let populations = rho.diagonal().iter().map(|z| z.re).collect();
        Self {
            t,
            rho,
            populations,
            p_success,
        }
    }
}

/// Evaluates `f(t, seed ^ index)` for every time point in parallel; the
/// output keeps the input order.
pub fn run_points<F>(times: &[f64], seed: u64, f: F) -> Result<Vec<TrajectoryPoint>>
where
    F: Fn(f64, u64) -> Result<TrajectoryPoint> + Sync,
{
    times
        .par_iter()
        .enumerate()
        .map(|(i, &t)| f(t, seed ^ i as u64))
        .collect()
}

/// The classical reference: `|ψ(t)⟩⟨ψ(t)|` from [`exact_evolve`].
pub fn exact_trajectory(p: &PtParams, psi0: &CVector, times: &[f64]) -> Result<Vec<TrajectoryPoint>> {
    run_points(times, 0, |t, _| {
        let ev = exact_evolve(p, psi0, t)?;
        Ok(TrajectoryPoint::from_rho(t, ev.state.projector(), 1.0))
    })
}

fn check_initial(psi0: &CVector) -> Result<()> {
    if psi0.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: psi0.dim(),
        });
    }
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParams(format!(
            "initial state must be normalized, norm is {}",
            psi0.norm()
        )));
    }
    Ok(())
}

/// Single-qubit circuit `RX(2Ω cos α · t) · U₀` with `U₀|0⟩ = τψ₀/𝒩`.
pub fn hybrid_circuit(p: &PtParams, sim: &SimilarityTransform, psi0: &CVector, t: f64) -> Result<Circuit> {
    let prepared = sim.tau.mul_vec(psi0)?;
    let mut circ = Circuit::new(1)?;
    circ.push(circuit::prepare_state_gate(&prepared, 0)?)?;
    circ.push(Gate::Rx {
        qubit: 0,
        theta: 2.0 * p.energy()? * t,
    })?;
    Ok(circ)
}

/// `τ⁻¹ ρ τ⁻¹ / Tr(·)`; `τ⁻¹` is Hermitian so this is a congruence and
/// preserves positivity.
pub fn hybrid_postprocess(rho_circ: &CMatrix, sim: &SimilarityTransform) -> CMatrix {
    let raw = &(&sim.tau_inv * rho_circ) * &sim.tau_inv;
    let tr = raw.trace().re;
    raw.scale_real(1.0 / tr).hermitian_part()
}

pub fn hybrid_point(
    p: &PtParams,
    sim: &SimilarityTransform,
    psi0: &CVector,
    t: f64,
    shots: Shots,
    noise: MeasNoise,
    seed: u64,
) -> Result<TrajectoryPoint> {
    let circ = hybrid_circuit(p, sim, psi0, t)?;
    let state = run_statevector(&circ, &CVector::basis(2, 0))?;
    let rho_circ = circuit::tomography(&state, 1, shots, noise, seed)?;
    Ok(TrajectoryPoint::from_rho(t, hybrid_postprocess(&rho_circ, sim), 1.0))
}

/// Hybrid classical-quantum evolution over `times`.
pub fn hybrid_evolve(
    p: &PtParams,
    psi0: &CVector,
    times: &[f64],
    shots: Shots,
    noise: MeasNoise,
    seed: u64,
) -> Result<Vec<TrajectoryPoint>> {
    check_initial(psi0)?;
    let sim = build_similarity(p)?;
    run_points(times, seed, |t, s| hybrid_point(p, &sim, psi0, t, shots, noise, s))
}

/// Spectral data of `τ⁻¹` and its unit-modulus dilation.
#[derive(Debug, Clone)]
pub struct DilationSpec {
    /// Unitary `V` with `τ⁻¹ = scale · V diag(d_norm) V†`.
    pub eigvecs: CMatrix,
    /// Eigenvalues of `τ⁻¹` divided by the largest one, descending.
    pub d_norm: [f64; 2],
    /// Largest eigenvalue of `τ⁻¹`.
    pub scale: f64,
    pub d_plus: [Complex64; 2],
    pub d_minus: [Complex64; 2],
}

impl DilationSpec {
    /// Block-diagonal `|0⟩⟨0|⊗diag(d₊) + |1⟩⟨1|⊗diag(d₋)`, ancilla as the
    /// high-order qubit.
    pub fn block_unitary(&self) -> CMatrix {
        CMatrix::from_diag(&[self.d_plus[0], self.d_plus[1], self.d_minus[0], self.d_minus[1]])
    }

    /// Phases of the block diagonal, in basis-index order.
    pub fn block_phases(&self) -> [f64; 4] {
        [
            self.d_plus[0].arg(),
            self.d_plus[1].arg(),
            self.d_minus[0].arg(),
            self.d_minus[1].arg(),
        ]
    }

    /// `scale · V diag(d_norm) V†`, which should equal `τ⁻¹`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::from_real_diag(&self.d_norm);
        (&(&self.eigvecs * &d) * &self.eigvecs.adjoint()).scale_real(self.scale)
    }
}

pub fn build_dilation(p: &PtParams) -> Result<DilationSpec> {
    let sim = build_similarity(p)?;
    let (vals, vecs) = eigh(&sim.tau_inv)?;
    // Reorder to descending: largest eigenvalue (= b) first.
    let eigvecs = CMatrix::from_columns(&[vecs.column(1), vecs.column(0)])?;
    let scale = vals[1];
    let d_norm = [1.0, (vals[0] / scale).clamp(0.0, 1.0)];
    let dilate = |d: f64, sign: f64| c(d, sign * (1.0 - d * d).max(0.0).sqrt());
    Ok(DilationSpec {
        eigvecs,
        d_norm,
        scale,
        d_plus: d_norm.map(|d| dilate(d, 1.0)),
        d_minus: d_norm.map(|d| dilate(d, -1.0)),
    })
}

pub const ANCILLA: usize = 0;
pub const SYSTEM: usize = 1;

/// The block-encoding part alone: `H` on the ancilla, the synthesized
/// diagonal, `H` on the ancilla.
pub fn dilation_block_circuit(spec: &DilationSpec) -> Result<Circuit> {
    let mut circ = Circuit::new(2)?;
    circ.push(Gate::H { qubit: ANCILLA })?;
    circ.append(&synth_diagonal_2q(spec.block_phases()))?;
    circ.push(Gate::H { qubit: ANCILLA })?;
    Ok(circ)
}

/// Two-qubit dilation circuit, ancilla on qubit 0 and system on qubit 1.
pub fn dilation_circuit(spec: &DilationSpec, p: &PtParams, psi0: &CVector, t: f64) -> Result<Circuit> {
    let sim = build_similarity(p)?;
    let single = hybrid_circuit(p, &sim, psi0, t)?;
    let mut circ = Circuit::new(2)?;
    circ.append_mapped(&single, &[SYSTEM])?;
    circ.push(Gate::u1q(SYSTEM, spec.eigvecs.adjoint())?)?;
    circ.append(&dilation_block_circuit(spec)?)?;
    circ.push(Gate::u1q(SYSTEM, spec.eigvecs.clone())?)?;
    Ok(circ)
}

/// System amplitudes with the ancilla in `|0⟩` (unnormalized).
pub fn post_selected_amplitudes(state: &CVector) -> CVector {
    CVector::new(vec![state[0], state[1]])
}

/// Outcome of post-selected tomography on the system qubit.
#[derive(Debug, Clone)]
pub struct PostSelected {
    pub rho: CMatrix,
    /// Kept fraction of the computational-basis setting.
    pub p_success: f64,
    /// System populations read directly from the kept computational-basis
    /// shots. Unlike `diag(rho)` these are plain binomial estimates, free of
    /// the positivity projection applied to the reconstruction.
    pub populations: [f64; 2],
}

/// Post-selected single-qubit tomography of the system qubit.
///
/// Each Pauli setting rotates the system, measures both qubits, and keeps
/// only shots with the ancilla at 0.
pub fn post_selected_tomography(state: &CVector, shots: Shots, noise: MeasNoise, seed: u64) -> Result<PostSelected> {
    let mut expectations = Vec::with_capacity(3);
    let mut p_success = 0.0;
    let mut populations = [0.0; 2];
    for (k, string) in pauli_strings(1).into_iter().enumerate() {
        let rotation = CMatrix::identity(2).kron(&string[0].basis_change());
        let rotated = rotation.mul_vec(state)?;
        let freqs = measured_frequencies(&rotated.probabilities(), 2, shots, noise, derive_seed(seed, k as u64));
        let kept = freqs[0] + freqs[1];
        if kept <= 0.0 {
            return Err(Error::NoSurvivingShots);
        }
        let conditional = [freqs[0] / kept, freqs[1] / kept];
        expectations.push((string.clone(), parity_expectation(&conditional, 1, &string, 0)));
        if string[0] == circuit::Pauli::Z {
            p_success = kept;
            populations = conditional;
        }
    }
    let rho = nearest_psd(&circuit::reconstruct(1, &expectations))?;
    Ok(PostSelected {
        rho,
        p_success,
        populations,
    })
}

pub fn dilation_point(
    spec: &DilationSpec,
    p: &PtParams,
    psi0: &CVector,
    t: f64,
    shots: Shots,
    noise: MeasNoise,
    seed: u64,
) -> Result<TrajectoryPoint> {
    let circ = dilation_circuit(spec, p, psi0, t)?;
    let state = run_statevector(&circ, &CVector::basis(4, 0))?;
    let ps = post_selected_tomography(&state, shots, noise, seed)?;
    let mut point = TrajectoryPoint::from_rho(t, ps.rho, ps.p_success);
    point.populations = ps.populations.to_vec();
    Ok(point)
}

/// Ancilla-assisted evolution over `times`.
pub fn dilation_evolve(
    p: &PtParams,
    psi0: &CVector,
    times: &[f64],
    shots: Shots,
    noise: MeasNoise,
    seed: u64,
) -> Result<Vec<TrajectoryPoint>> {
    check_initial(psi0)?;
    let spec = build_dilation(p)?;
    run_points(times, seed, |t, s| dilation_point(&spec, p, psi0, t, shots, noise, s))
}

/// Analytic post-selection probability `‖τ⁻¹e^{-iht}τψ₀‖² / (‖τψ₀‖² scale²)`.
pub fn analytic_p_success(p: &PtParams, psi0: &CVector, t: f64) -> Result<f64> {
    let sim = build_similarity(p)?;
    let spec = build_dilation(p)?;
    let prepared = sim.tau.mul_vec(psi0)?;
    let evolved = sim
        .tau_inv
        .mul_vec(&crate::ptmodel::hermitian_propagator(p, t)?.mul_vec(&prepared)?)?;
    Ok(evolved.norm().powi(2) / (prepared.norm().powi(2) * spec.scale * spec.scale))
}
