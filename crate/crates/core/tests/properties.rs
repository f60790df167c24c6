// Copyright 2026 ptsim Contributors
// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;

use ptsim_core::algorithms::{build_dilation, dilation_circuit, hybrid_evolve};
use ptsim_core::circuit::{
    derive_seed, prepare_state_2q, run_statevector, sample, synth_diagonal_2q, tomography, unitary_of, MeasNoise, Shots,
};
use ptsim_core::coupled::concurrence;
use ptsim_core::harness::format_number;
use ptsim_core::numerics::{c, fidelity, nearest_psd, CMatrix, CVector};
use ptsim_core::ptmodel::{build_similarity, eigensystem, exact_evolve, PtParams};

fn unbroken() -> impl Strategy<Value = PtParams> {
    (0.1f64..20.0, 0.0f64..0.97).prop_map(|(omega, frac)| PtParams::new(omega, omega * frac).unwrap())
}

fn state(dim: usize) -> impl Strategy<Value = CVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("non-zero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| CVector::new(v.into_iter().map(|(re, im)| c(re, im)).collect()).normalized())
}

/// Random density matrix `A A† / Tr` from a complex Ginibre matrix.
fn density(dim: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |v| {
        let a = CMatrix::from_vec(v.into_iter().map(|(re, im)| c(re, im)).collect()).unwrap();
        let m = &a * &a.adjoint();
        let tr = m.trace().re;
        m.scale_real(1.0 / tr).hermitian_part()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tau_squares_to_eta(p in unbroken()) {
        let sim = build_similarity(&p).unwrap();
        let scale = sim.eta.frobenius_norm();
        prop_assert!((&sim.tau * &sim.tau).max_abs_diff(&sim.eta) <= 1e-12 * scale);
        prop_assert!((&sim.tau * &sim.tau_inv).max_abs_diff(&CMatrix::identity(2)) <= 1e-12 * scale);
    }

    #[test]
    fn eigenbasis_is_biorthonormal(p in unbroken()) {
        let es = eigensystem(&p).unwrap();
        let pairs = [(&es.phi_plus, &es.psi_plus, 1.0), (&es.phi_minus, &es.psi_minus, 1.0),
                     (&es.phi_plus, &es.psi_minus, 0.0), (&es.phi_minus, &es.psi_plus, 0.0)];
        for (l, r, expected) in pairs {
            prop_assert!((l.inner(r) - c(expected, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn evolved_states_stay_normalized(p in unbroken(), psi in state(2), t in 0.0f64..3.0) {
        let ev = exact_evolve(&p, &psi, t).unwrap();
        prop_assert!((ev.state.norm() - 1.0).abs() < 1e-10);
        prop_assert!(ev.norm > 0.0);
    }

    #[test]
    fn hybrid_exact_mode_reproduces_oracle(p in unbroken(), psi in state(2), t in 0.0f64..2.0) {
        let pt = &hybrid_evolve(&p, &psi, &[t], Shots::Exact, MeasNoise::none(), 0).unwrap()[0];
        let exact = exact_evolve(&p, &psi, t).unwrap().state.projector();
        prop_assert!(pt.rho.max_abs_diff(&exact) < 1e-8);
    }

    #[test]
    fn dilation_circuit_is_unitary(p in unbroken(), t in 0.0f64..2.0) {
        let spec = build_dilation(&p).unwrap();
        let circ = dilation_circuit(&spec, &p, &CVector::basis(2, 0), t).unwrap();
        let u = unitary_of(&circ);
        prop_assert!((&u * &u.adjoint()).max_abs_diff(&CMatrix::identity(4)) < 1e-10);
    }

    #[test]
    fn diagonal_synthesis_matches_phases(phases in prop::array::uniform4(-10.0f64..10.0)) {
        let u = unitary_of(&synth_diagonal_2q(phases));
        let target = CMatrix::from_diag(&phases.map(|ph| c(0.0, ph).exp()));
        prop_assert!(u.max_abs_diff(&target) < 1e-10);
    }

    #[test]
    fn two_qubit_preparation(target in state(4)) {
        let out = run_statevector(&prepare_state_2q(&target).unwrap(), &CVector::basis(4, 0)).unwrap();
        prop_assert!(out.max_abs_diff(&target) < 1e-10);
    }

    #[test]
    fn exact_tomography_is_lossless(psi in state(4)) {
        let rho = tomography(&psi, 2, Shots::Exact, MeasNoise::none(), 0).unwrap();
        prop_assert!(rho.max_abs_diff(&psi.projector()) < 1e-10);
    }

    #[test]
    fn sampled_tomography_is_a_density_matrix(psi in state(2), seed in any::<u64>(), q in 0.0f64..0.5) {
        let rho = tomography(&psi, 1, Shots::Finite(64), MeasNoise::new(q).unwrap(), seed).unwrap();
        prop_assert!(rho.is_density_matrix(1e-9));
    }

    #[test]
    fn counts_sum_to_shots(psi in state(4), shots in 1u64..2000, seed in any::<u64>()) {
        let counts = sample(&psi, shots, MeasNoise::new(0.1).unwrap(), seed).unwrap();
        prop_assert_eq!(counts.iter().map(|(_, n)| n).sum::<u64>(), shots);
        prop_assert_eq!(counts, sample(&psi, shots, MeasNoise::new(0.1).unwrap(), seed).unwrap());
    }

    #[test]
    fn derived_seeds_are_distinct(base in any::<u64>(), i in 0u64..1000) {
        prop_assert_ne!(derive_seed(base, i), derive_seed(base, i + 1));
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in density(2), b in density(2)) {
        let f = fidelity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - fidelity(&b, &a).unwrap()).abs() < 1e-9);
        prop_assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn concurrence_is_bounded(rho in density(4)) {
        let cval = concurrence(&rho).unwrap();
        prop_assert!((0.0..=1.0).contains(&cval));
    }

    #[test]
    fn nearest_psd_yields_density_matrix(entries in prop::collection::vec(-1.0f64..1.0, 3)) {
        let raw = CMatrix::from_rows([
            [c(0.5 + entries[0], 0.0), c(entries[1], entries[2])],
            [c(entries[1], -entries[2]), c(0.5 - entries[0], 0.0)],
        ]);
        prop_assert!(nearest_psd(&raw).unwrap().is_density_matrix(1e-10));
    }

    #[test]
    fn number_format_round_trips(x in -1e6f64..1e6) {
        let back: f64 = format_number(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs().max(1e-300));
    }
}
