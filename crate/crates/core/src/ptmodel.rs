// Copyright 2026 ptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! The single PT-symmetric two-level system `H = [[-iγ, Ω], [Ω, iγ]]`.
//!
//! In the unbroken regime (γ < Ω) the Hamiltonian is parametrized by the
//! angle α with `sin α = γ/Ω`. Its spectrum is `±Ω cos α`, and the metric
//! `η` and its positive square root `τ` map it to the Hermitian
//! `h = τ H τ⁻¹ = Ω cos α · σx`. The exact propagator then factors as
//! `e^{-iHt} = τ⁻¹ e^{-iht} τ`.
//!
//! Units are those of the experiment: Ω in rad/μs, γ in μs⁻¹, time in μs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{c, expm, CMatrix, CVector, I, ZERO};

/// Physical parameters of one PT-symmetric qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtParams {
    omega: f64,
    gamma: f64,
    alpha: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Unbroken,
    ExceptionalPoint,
    Broken,
}

impl PtParams {
    /// Validates `omega > 0`, `gamma >= 0` (both finite). The angle α is
    /// only populated in the unbroken regime.
    pub fn new(omega: f64, gamma: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParams(format!("omega must be positive, got {omega}")));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParams(format!("gamma must be non-negative, got {gamma}")));
        }
        let alpha = match regime_of(omega, gamma) {
            Regime::Unbroken => Some((gamma / omega).asin()),
            _ => None,
        };
        Ok(Self { omega, gamma, alpha })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn regime(&self) -> Regime {
        regime_of(self.omega, self.gamma)
    }

    /// α, or a regime error outside the unbroken phase.
    pub fn require_alpha(&self) -> Result<f64> {
        self.alpha.ok_or(Error::Regime(self.regime()))
    }

    /// Magnitude of the real eigenvalues, `Ω cos α`.
    pub fn energy(&self) -> Result<f64> {
        Ok(self.omega * self.require_alpha()?.cos())
    }
}

fn regime_of(omega: f64, gamma: f64) -> Regime {
    let eps = 1e-12 * omega;
    if (gamma - omega).abs() <= eps {
        Regime::ExceptionalPoint
    } else if gamma < omega {
        Regime::Unbroken
    } else {
        Regime::Broken
    }
}

pub fn classify_regime(p: &PtParams) -> Regime {
    p.regime()
}

/// `[[-iγ, Ω], [Ω, iγ]]`.
pub fn build_hamiltonian(p: &PtParams) -> CMatrix {
    let (o, g) = (c(p.omega, 0.0), p.gamma);
    CMatrix::from_rows([[c(0.0, -g), o], [o, c(0.0, g)]])
}

/// Right and left eigenvectors of the PT Hamiltonian.
///
/// `psi_*` satisfy `H ψ = E ψ`; `phi_*` are eigenvectors of `H†` and equal
/// the complex conjugates of `psi_*`. Both carry the `1/√(2 cos α)`
/// normalization, which makes the pair biorthonormal: `⟨φ_i|ψ_j⟩ = δ_ij`.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub e_plus: f64,
    pub e_minus: f64,
    pub psi_plus: CVector,
    pub psi_minus: CVector,
    pub phi_plus: CVector,
    pub phi_minus: CVector,
}

pub fn eigensystem(p: &PtParams) -> Result<Eigensystem> {
    let alpha = p.require_alpha()?;
    let energy = p.omega * alpha.cos();
    let norm = c(1.0 / (2.0 * alpha.cos()).sqrt(), 0.0);
    let half = c(0.0, alpha / 2.0).exp(); // e^{iα/2}
    let psi_plus = CVector::new(vec![half.conj(), half]).scale(norm);
    let psi_minus = CVector::new(vec![-half, half.conj()]).scale(norm);
    Ok(Eigensystem {
        e_plus: energy,
        e_minus: -energy,
        phi_plus: psi_plus.conj(),
        phi_minus: psi_minus.conj(),
        psi_plus,
        psi_minus,
    })
}

/// Metric `η`, its square root `τ` and `τ⁻¹`, with the scalars
/// `a = √(sec α − tan α)` and `b = √(sec α + tan α)` (`a·b = 1`).
#[derive(Debug, Clone)]
pub struct SimilarityTransform {
    pub eta: CMatrix,
    pub tau: CMatrix,
    pub tau_inv: CMatrix,
    pub a: f64,
    pub b: f64,
}

pub fn build_similarity(p: &PtParams) -> Result<SimilarityTransform> {
    let alpha = p.require_alpha()?;
    let sec = 1.0 / alpha.cos();
    let tan = alpha.tan();
    let a = (sec - tan).sqrt();
    let b = (sec + tan).sqrt();

    let eta = CMatrix::from_rows([[c(sec, 0.0), I * tan], [-I * tan, c(sec, 0.0)]]);
    let sum = c((a + b) / 2.0, 0.0);
    let diff = (a - b) / 2.0;
    let tau = CMatrix::from_rows([[sum, -I * diff], [I * diff, sum]]);
    // Since det τ = ab = 1, the inverse swaps the roles of a and b.
    let tau_inv = CMatrix::from_rows([[sum, I * diff], [-I * diff, sum]]);
    Ok(SimilarityTransform {
        eta,
        tau,
        tau_inv,
        a,
        b,
    })
}

/// `h = Ω cos α · σx`.
pub fn hermitian_equivalent(p: &PtParams) -> Result<CMatrix> {
    let e = c(p.energy()?, 0.0);
    Ok(CMatrix::from_rows([[ZERO, e], [e, ZERO]]))
}

/// Result of [`exact_evolve`]: the normalized state and the norm of
/// `e^{-iHt}ψ₀` before normalization.
#[derive(Debug, Clone)]
pub struct Evolved {
    pub state: CVector,
    pub norm: f64,
}

/// Agreement required between the two propagator routes, relative to the
/// size of the unnormalized state.
const PATH_TOL: f64 = 1e-10;

/// Evolves `psi0` under the PT Hamiltonian for time `t`, computing
/// `e^{-iHt}ψ₀` both directly and as `τ⁻¹ e^{-iht} τ ψ₀`.
pub fn exact_evolve(p: &PtParams, psi0: &CVector, t: f64) -> Result<Evolved> {
    let sim = build_similarity(p)?;
    let h = hermitian_equivalent(p)?;
    let direct = expm(&build_hamiltonian(p).scale(c(0.0, -t))).mul_vec(psi0)?;
    let via_h = sim
        .tau_inv
        .mul_vec(&expm(&h.scale(c(0.0, -t))).mul_vec(&sim.tau.mul_vec(psi0)?)?)?;
    let norm = direct.norm();
    let gap = direct.max_abs_diff(&via_h);
    if gap > PATH_TOL * norm.max(1.0) {
        return Err(Error::PathDisagreement(gap));
    }
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(Evolved {
        state: direct.normalized(),
        norm,
    })
}

/// Transfer times `|0⟩ → |1⟩` for the PT system and for the Hermitian
/// Hamiltonian with the same spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferTimes {
    pub t_pt: f64,
    pub t_herm: f64,
}

impl TransferTimes {
    pub fn ratio(&self) -> f64 {
        self.t_pt / self.t_herm
    }
}

const TRANSFER_GRID_STEP: f64 = 1e-3;
const TRANSFER_TOL: f64 = 1e-9;

/// Locates the first maximum of the excited-state population for the PT
/// evolution and for `Ω cos α · σx`, both starting from `|0⟩`.
pub fn transfer_time_comparison(p: &PtParams) -> Result<TransferTimes> {
    let energy = p.energy()?;
    let ground = CVector::basis(2, 0);
    let h = hermitian_equivalent(p)?;

    let pt_pop = |t: f64| -> Result<f64> { Ok(exact_evolve(p, &ground, t)?.state[1].norm_sqr()) };
    let herm_pop = |t: f64| -> Result<f64> {
        let psi = expm(&h.scale(c(0.0, -t))).mul_vec(&ground)?;
        Ok(psi[1].norm_sqr())
    };

    // Both maxima lie within one Hermitian half-period; scan a bit past it.
    let horizon = 1.5 * std::f64::consts::PI / (2.0 * energy) + 10.0 * TRANSFER_GRID_STEP;
    Ok(TransferTimes {
        t_pt: first_maximum(pt_pop, horizon)?,
        t_herm: first_maximum(herm_pop, horizon)?,
    })
}

/// Grid scan for the first local maximum, refined by bisection on the sign
/// of a central-difference derivative.
fn first_maximum(f: impl Fn(f64) -> Result<f64>, horizon: f64) -> Result<f64> {
    let steps = (horizon / TRANSFER_GRID_STEP).ceil() as usize;
    let mut prev = f(0.0)?;
    let mut peak = None;
    for k in 1..=steps {
        let t = k as f64 * TRANSFER_GRID_STEP;
        let cur = f(t)?;
        if cur < prev {
            peak = Some((k - 1) as f64 * TRANSFER_GRID_STEP);
            break;
        }
        prev = cur;
    }
    let center = peak.ok_or(Error::NoConvergence("transfer-time grid scan"))?;
    if center == 0.0 {
        return Ok(0.0);
    }

    let h = 1e-7;
    let slope = |t: f64| -> Result<f64> { Ok(f(t + h)? - f(t - h)?) };
    let mut lo = (center - TRANSFER_GRID_STEP).max(h);
    let mut hi = center + TRANSFER_GRID_STEP;
    while hi - lo > TRANSFER_TOL {
        let mid = 0.5 * (lo + hi);
        if slope(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Normalized populations `|⟨k|ψ⟩|²`.
pub fn populations(state: &CVector) -> Vec<f64> {
    let total: f64 = state.probabilities().iter().sum();
    state.probabilities().iter().map(|p| p / total).collect()
}

/// `e^{-iht}` for the Hermitian equivalent.
pub fn hermitian_propagator(p: &PtParams, t: f64) -> Result<CMatrix> {
    Ok(expm(&hermitian_equivalent(p)?.scale(c(0.0, -t))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{eigh, pauli, ONE};
    use std::f64::consts::PI;

    fn nominal() -> PtParams {
        PtParams::new(7.5, 7.0).unwrap()
    }

    #[test]
    fn hamiltonian_entries() {
        let h = build_hamiltonian(&nominal());
        let expected = CMatrix::from_rows([[c(0.0, -7.0), c(7.5, 0.0)], [c(7.5, 0.0), c(0.0, 7.0)]]);
        assert_eq!(h, expected);
        assert_eq!(h.trace(), ZERO);
        let herm = build_hamiltonian(&PtParams::new(2.0, 0.0).unwrap());
        assert_eq!(herm, pauli::x().scale_real(2.0));
    }

    #[test]
    fn regimes() {
        assert_eq!(classify_regime(&nominal()), Regime::Unbroken);
        assert_eq!(
            classify_regime(&PtParams::new(1.0, 1.0).unwrap()),
            Regime::ExceptionalPoint
        );
        assert_eq!(classify_regime(&PtParams::new(1.0, 2.0).unwrap()), Regime::Broken);
        assert!(PtParams::new(1.0, 2.0).unwrap().alpha().is_none());
        assert!(PtParams::new(0.0, 0.0).is_err());
        assert!(PtParams::new(1.0, -0.1).is_err());
    }

    #[test]
    fn exceptional_point_is_rejected() {
        let ep = PtParams::new(3.0, 3.0 * (1.0 - 1e-13)).unwrap();
        assert!(matches!(
            build_similarity(&ep),
            Err(Error::Regime(Regime::ExceptionalPoint))
        ));
        assert!(matches!(eigensystem(&ep), Err(Error::Regime(_))));
    }

    #[test]
    fn eigensystem_residuals() {
        let p = nominal();
        let es = eigensystem(&p).unwrap();
        let h = build_hamiltonian(&p);
        let cos_a = (1.0f64 - (14.0f64 / 15.0).powi(2)).sqrt();
        assert!((es.e_plus - 7.5 * cos_a).abs() < 1e-12);
        assert!((es.e_minus + 7.5 * cos_a).abs() < 1e-12);
        for (psi, e) in [(&es.psi_plus, es.e_plus), (&es.psi_minus, es.e_minus)] {
            let r = h.mul_vec(psi).unwrap().max_abs_diff(&psi.scale(c(e, 0.0)));
            assert!(r < 1e-12, "residual {r}");
        }
        // Left eigenvectors.
        let hd = h.adjoint();
        for (phi, e) in [(&es.phi_plus, es.e_plus), (&es.phi_minus, es.e_minus)] {
            assert!(hd.mul_vec(phi).unwrap().max_abs_diff(&phi.scale(c(e, 0.0))) < 1e-12);
        }
        // Non-orthogonality and biorthonormality.
        let tan_a = (14.0 / 15.0) / cos_a;
        assert!((es.psi_plus.inner(&es.psi_minus) - c(0.0, -tan_a)).norm() < 1e-12);
        assert!((es.phi_plus.inner(&es.psi_plus) - ONE).norm() < 1e-12);
        assert!(es.phi_plus.inner(&es.psi_minus).norm() < 1e-12);
    }

    #[test]
    fn hermitian_limit_eigenvectors() {
        let es = eigensystem(&PtParams::new(2.0, 0.0).unwrap()).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!(es.psi_plus.phase_distance(&CVector::from_real(&[s, s])) < 1e-15);
        assert!(es.psi_minus.phase_distance(&CVector::from_real(&[s, -s])) < 1e-15);
        assert_eq!(es.e_plus, 2.0);
    }

    #[test]
    fn similarity_invariants_at_nominal_point() {
        let p = nominal();
        let s = build_similarity(&p).unwrap();
        assert!((&s.tau * &s.tau).max_abs_diff(&s.eta) < 1e-10);
        assert!((s.tau.det() - ONE).norm() < 1e-10);
        assert!((&s.tau * &s.tau_inv).max_abs_diff(&CMatrix::identity(2)) < 1e-10);
        assert!(s.tau.is_psd(1e-10) && s.tau.is_hermitian(1e-12));
        let h = build_hamiltonian(&p);
        let lhs = &(&s.eta * &h) * &s.eta.inverse().unwrap();
        assert!(lhs.max_abs_diff(&h.adjoint()) < 1e-10);
        let herm = &(&s.tau * &h) * &s.tau_inv;
        assert!(herm.max_abs_diff(&hermitian_equivalent(&p).unwrap()) < 1e-10);
        // eta also equals the sum of left-eigenvector projectors.
        let es = eigensystem(&p).unwrap();
        let eta2 = &es.phi_plus.projector() + &es.phi_minus.projector();
        assert!(eta2.max_abs_diff(&s.eta) < 1e-12);
    }

    #[test]
    fn similarity_identity_at_gamma_zero() {
        let s = build_similarity(&PtParams::new(4.0, 0.0).unwrap()).unwrap();
        assert!(s.eta.max_abs_diff(&CMatrix::identity(2)) < 1e-15);
        assert!(s.tau.max_abs_diff(&CMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn tau_eigenvalues_are_a_and_b() {
        let s = build_similarity(&nominal()).unwrap();
        let (vals, _) = eigh(&s.tau).unwrap();
        assert!((vals[0] - s.a).abs() < 1e-10 && (vals[1] - s.b).abs() < 1e-10);
        assert!((s.a * s.b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_equivalent_value() {
        let h = hermitian_equivalent(&nominal()).unwrap();
        assert!((h[(0, 1)].re - 2.692582403567252).abs() < 1e-12);
        let (vals, _) = eigh(&h).unwrap();
        let es = eigensystem(&nominal()).unwrap();
        assert!((vals[0] - es.e_minus).abs() < 1e-12 && (vals[1] - es.e_plus).abs() < 1e-12);
    }

    #[test]
    fn exact_evolve_edges() {
        let p = nominal();
        let psi0 = CVector::basis(2, 0);
        let ev = exact_evolve(&p, &psi0, 0.0).unwrap();
        assert!(ev.state.max_abs_diff(&psi0) < 1e-15 && (ev.norm - 1.0).abs() < 1e-15);

        let herm = PtParams::new(3.0, 0.0).unwrap();
        let half = exact_evolve(&herm, &psi0, PI / 6.0).unwrap();
        assert!(half.state.phase_distance(&CVector::basis(2, 1)) < 1e-12);
    }

    #[test]
    fn exact_evolve_matches_closed_form() {
        // H² = E² I, so e^{-iHt} = cos(Et) I - i sin(Et) H / E.
        let p = nominal();
        let e = p.energy().unwrap();
        let h = build_hamiltonian(&p);
        for k in 0..=36 {
            let t = 0.05 * k as f64;
            let u = &CMatrix::identity(2).scale_real((e * t).cos()) + &h.scale(c(0.0, -(e * t).sin() / e));
            let direct = expm(&h.scale(c(0.0, -t)));
            assert!(u.max_abs_diff(&direct) < 1e-10, "t={t}");
            let ev = exact_evolve(&p, &CVector::basis(2, 0), t).unwrap();
            assert!(ev.norm > 1e-6);
        }
    }

    #[test]
    fn transfer_times() {
        let herm = PtParams::new(7.5, 0.0).unwrap();
        let tt = transfer_time_comparison(&herm).unwrap();
        assert!((tt.t_pt - tt.t_herm).abs() < 1e-6);

        let p = nominal();
        let tt = transfer_time_comparison(&p).unwrap();
        let e = p.energy().unwrap();
        assert!((tt.t_herm - PI / (2.0 * e)).abs() < 1e-6);
        // The |0⟩ amplitude vanishes when tan(Et) = E/γ.
        let analytic = (e / p.gamma()).atan() / e;
        assert!((tt.t_pt - analytic).abs() < 1e-6);
        assert!(tt.t_pt < tt.t_herm);
    }
}
