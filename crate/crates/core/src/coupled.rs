// Copyright 2026 ptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Two identical PT-symmetric qubits with a weak flip-flop coupling
//! `J(σ₊σ₋ + σ₋σ₊)`, treated in first-order perturbation theory.
//!
//! The unperturbed Hamiltonian `H⊗I + I⊗H` is non-Hermitian, so the
//! expansion uses its biorthogonal basis: right eigenvectors `ψ` and left
//! eigenvectors `φ` with `⟨φ_i|ψ_j⟩ = δ_ij`. The zero-energy pair is
//! degenerate; exchange symmetry fixes the zeroth-order combinations
//! `ψ₁,₂ = ψ₋₊ ∓ ψ₊₋`, which the interaction does not mix.

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use crate::algorithms::{run_points, TrajectoryPoint};
use crate::circuit::{prepare_state_2q, run_statevector, synth_diagonal_2q, tomography, Circuit, MeasNoise, Shots};
use crate::error::{Error, Result};
use crate::numerics::{self, c, expm, pauli, CMatrix, CVector, TOL_STAT, ZERO};
use crate::ptmodel::{build_hamiltonian, eigensystem, PtParams};

/// Above this multiple of `Ω cos α` the coupling is flagged as outside the
/// perturbative regime (warning only).
pub const PERTURBATIVE_WARN_RATIO: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoupledParams {
    single: PtParams,
    j: f64,
}

impl CoupledParams {
    pub fn new(single: PtParams, j: f64) -> Result<Self> {
        if !(j.is_finite() && j >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "coupling J must be non-negative, got {j}"
            )));
        }
        let cp = Self { single, j };
        if let Some(ratio) = cp.perturbative_ratio() {
            if ratio > PERTURBATIVE_WARN_RATIO {
                warn!("J = {j} is {ratio:.3} x Omega cos(alpha); first-order perturbation theory may break down");
            }
        }
        Ok(cp)
    }

    pub fn single(&self) -> &PtParams {
        &self.single
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    /// `J / (Ω cos α)`, when the single qubit is unbroken.
    pub fn perturbative_ratio(&self) -> Option<f64> {
        self.single.energy().ok().map(|e| self.j / e)
    }
}

/// `J(|01⟩⟨10| + |10⟩⟨01|)`.
pub fn build_interaction(j: f64) -> CMatrix {
    let sigma_plus = CMatrix::from_rows([[ZERO, c(1.0, 0.0)], [ZERO, ZERO]]);
    let sigma_minus = sigma_plus.adjoint();
    (&sigma_plus.kron(&sigma_minus) + &sigma_minus.kron(&sigma_plus)).scale_real(j)
}

/// `H⊗I + I⊗H + H_int`.
pub fn build_total(cp: &CoupledParams) -> CMatrix {
    let h = build_hamiltonian(&cp.single);
    let id = pauli::id();
    &(&h.kron(&id) + &id.kron(&h)) + &build_interaction(cp.j)
}

/// Product eigenbasis of the uncoupled pair, ordered `−−, −+, +−, ++`.
#[derive(Debug, Clone)]
pub struct ProductBasis {
    pub right: [CVector; 4],
    pub left: [CVector; 4],
    pub energies: [f64; 4],
}

pub fn product_basis(p: &PtParams) -> Result<ProductBasis> {
    let es = eigensystem(p)?;
    let (m, pl) = (&es.psi_minus, &es.psi_plus);
    let (lm, lp) = (&es.phi_minus, &es.phi_plus);
    Ok(ProductBasis {
        right: [m.kron(m), m.kron(pl), pl.kron(m), pl.kron(pl)],
        left: [lm.kron(lm), lm.kron(lp), lp.kron(lm), lp.kron(lp)],
        energies: [2.0 * es.e_minus, 0.0, 0.0, 2.0 * es.e_plus],
    })
}

/// `|ψ₋₋⟩, |ψ₋₊⟩, |ψ₊₋⟩, |ψ₊₊⟩` with energies `(−2E, 0, 0, 2E)`.
pub fn unperturbed_products(p: &PtParams) -> Result<[CVector; 4]> {
    Ok(product_basis(p)?.right)
}

/// Perturbed energies and the similarity transform built from the
/// first-order eigenvectors (columns ordered `ψ₋₋, ψ₁, ψ₂, ψ₊₊`).
#[derive(Debug, Clone)]
pub struct PerturbedSystem {
    pub energies: [f64; 4],
    pub tau2: CMatrix,
    pub tau2_inv: CMatrix,
}

impl PerturbedSystem {
    /// `τ₂ e^{-iEt} τ₂⁻¹`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        let phases = CMatrix::from_diag(&self.energies.map(|e| c(0.0, -e * t).exp()));
        &(&self.tau2 * &phases) * &self.tau2_inv
    }
}

const DEGENERACY_TOL: f64 = 1e-9;
const ENERGY_IMAG_TOL: f64 = 1e-10;

pub fn perturbed_eigensystem(cp: &CoupledParams) -> Result<PerturbedSystem> {
    let basis = product_basis(&cp.single)?;
    let h_int = build_interaction(cp.j);
    let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);

    // Zeroth-order states and their biorthogonal duals, in τ₂ column order.
    let [rmm, rmp, rpm, rpp] = &basis.right;
    let [lmm, lmp, lpm, lpp] = &basis.left;
    let right = [rmm.clone(), rmp.sub(rpm).scale(s), rmp.add(rpm).scale(s), rpp.clone()];
    let left = [lmm.clone(), lmp.sub(lpm).scale(s), lmp.add(lpm).scale(s), lpp.clone()];
    let e0 = basis.energies;

    let coupling =
        |k: usize, i: usize| -> Result<num_complex::Complex64> { Ok(left[k].inner(&h_int.mul_vec(&right[i])?)) };

    let mixing = coupling(1, 2)?.norm().max(coupling(2, 1)?.norm());
    if mixing > 1e-10 * cp.j.max(1e-300) && mixing > 1e-14 {
        return Err(Error::DegenerateMixing(mixing));
    }

    let mut energies = [0.0; 4];
    let mut columns = Vec::with_capacity(4);
    for i in 0..4 {
        let shift = coupling(i, i)? / left[i].inner(&right[i]);
        if shift.im.abs() > ENERGY_IMAG_TOL {
            return Err(Error::NonRealEnergy(shift.im));
        }
        energies[i] = e0[i] + shift.re;

        let mut v = right[i].clone();
        for k in 0..4 {
            let gap = e0[i] - e0[k];
            if gap.abs() <= DEGENERACY_TOL {
                continue;
            }
            let amp = coupling(k, i)? / (left[k].inner(&right[k]) * gap);
            v = v.add(&right[k].scale(amp));
        }
        columns.push(v.normalized());
    }

    let tau2 = CMatrix::from_columns(&columns)?;
    let tau2_inv = tau2.inverse()?;
    Ok(PerturbedSystem {
        energies,
        tau2,
        tau2_inv,
    })
}

fn check_initial(psi0: &CVector) -> Result<()> {
    if psi0.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
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

/// Preparation of `τ₂⁻¹ψ₀/𝒩` followed by the diagonal `e^{-iEt}`.
pub fn coupled_circuit(sys: &PerturbedSystem, psi0: &CVector, t: f64) -> Result<Circuit> {
    let mut circ = prepare_state_2q(&sys.tau2_inv.mul_vec(psi0)?)?;
    circ.append(&synth_diagonal_2q(sys.energies.map(|e| -e * t)))?;
    Ok(circ)
}

/// `τ₂ ρ τ₂† / Tr(·)`.
pub fn coupled_postprocess(rho_circ: &CMatrix, sys: &PerturbedSystem) -> CMatrix {
    let raw = &(&sys.tau2 * rho_circ) * &sys.tau2.adjoint();
    let tr = raw.trace().re;
    raw.scale_real(1.0 / tr).hermitian_part()
}

/// Hybrid evolution of the coupled pair: gate-level `e^{-iEt}` on the
/// prepared state, two-qubit tomography, classical `τ₂`.
pub fn coupled_hybrid_evolve(
    cp: &CoupledParams,
    psi0: &CVector,
    times: &[f64],
    shots: Shots,
    noise: MeasNoise,
    seed: u64,
) -> Result<Vec<TrajectoryPoint>> {
    check_initial(psi0)?;
    let sys = perturbed_eigensystem(cp)?;
    run_points(times, seed, |t, s| {
        let circ = coupled_circuit(&sys, psi0, t)?;
        let state = run_statevector(&circ, &CVector::basis(4, 0))?;
        let rho_circ = tomography(&state, 2, shots, noise, s)?;
        Ok(TrajectoryPoint::from_rho(t, coupled_postprocess(&rho_circ, &sys), 1.0))
    })
}

/// Dense-propagator reference `normalize(e^{-iH₁₂t}ψ₀)`.
pub fn exact_coupled_evolve(cp: &CoupledParams, psi0: &CVector, t: f64) -> Result<CVector> {
    let out = expm(&build_total(cp).scale(c(0.0, -t))).mul_vec(psi0)?;
    if out.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(out.normalized())
}

pub fn exact_coupled_trajectory(cp: &CoupledParams, psi0: &CVector, times: &[f64]) -> Result<Vec<TrajectoryPoint>> {
    run_points(times, 0, |t, _| {
        Ok(TrajectoryPoint::from_rho(
            t,
            exact_coupled_evolve(cp, psi0, t)?.projector(),
            1.0,
        ))
    })
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`.
///
/// The `λᵢ` are square roots of the eigenvalues of `ρρ̃`, computed from the
/// similar Hermitian matrix `√ρ ρ̃ √ρ`. Negative eigenvalues are clipped.
pub fn concurrence(rho: &CMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    if !rho.is_density_matrix(TOL_STAT) {
        return Err(Error::InvalidDensityMatrix);
    }
    let yy = pauli::y().kron(&pauli::y());
    let flipped = &(&yy * &rho.conj()) * &yy;
    let sr = numerics::sqrtm_psd(rho)?;
    let lambdas = numerics::sqrt_eigenvalues_desc(&(&(&sr * &flipped) * &sr))?;
    let cval = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok(cval.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcurrenceReport {
    /// `(t, C(t))` for each time point.
    pub series: Vec<(f64, f64)>,
    pub t_peak: f64,
    pub c_peak: f64,
    /// Largest pairwise population difference at `t_peak`.
    pub population_gap: f64,
    pub populations_at_peak: Vec<f64>,
}

pub fn concurrence_report(points: &[TrajectoryPoint]) -> Result<ConcurrenceReport> {
    let series: Vec<(f64, f64)> = points
        .par_iter()
        .map(|pt| Ok((pt.t, concurrence(&pt.rho)?)))
        .collect::<Result<_>>()?;
    let (peak, &(t_peak, c_peak)) = series
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .ok_or_else(|| Error::InvalidParams("empty trajectory".into()))?;
    let pops = points[peak].populations.clone();
    let hi = pops.iter().copied().fold(f64::MIN, f64::max);
    let lo = pops.iter().copied().fold(f64::MAX, f64::min);
    Ok(ConcurrenceReport {
        series,
        t_peak,
        c_peak,
        population_gap: hi - lo,
        populations_at_peak: pops,
    })
}

/// Concurrence along the perturbative hybrid trajectory.
pub fn concurrence_trajectory(
    cp: &CoupledParams,
    psi0: &CVector,
    times: &[f64],
    shots: Shots,
    noise: MeasNoise,
    seed: u64,
) -> Result<ConcurrenceReport> {
    concurrence_report(&coupled_hybrid_evolve(cp, psi0, times, shots, noise, seed)?)
}
