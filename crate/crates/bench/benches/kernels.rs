// Copyright 2026 ptsim Contributors
// SPDX-License-Identifier: Apache-2.0

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use ptsim_core::algorithms::{dilation_evolve, hybrid_evolve};
use ptsim_core::circuit::{tomography, MeasNoise, Shots};
use ptsim_core::coupled::{concurrence, coupled_hybrid_evolve, CoupledParams};
use ptsim_core::harness::linspace;
use ptsim_core::numerics::{c, eigh, expm, CMatrix, CVector};
use ptsim_core::ptmodel::{build_hamiltonian, PtParams};

fn nominal() -> PtParams {
    PtParams::new(7.5, 7.0).unwrap()
}

fn dense_kernels(cr: &mut Criterion) {
    let h2 = build_hamiltonian(&nominal()).scale(c(0.0, -0.9));
    cr.bench_function("expm 2x2", |b| b.iter(|| expm(black_box(&h2))));

    let a = CMatrix::from_vec(
        (0..16)
            .map(|k| c((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect(),
    )
    .unwrap();
    let herm = (&a + &a.adjoint()).scale_real(0.5);
    cr.bench_function("eigh 4x4", |b| b.iter(|| eigh(black_box(&herm)).unwrap()));
}

fn measurement(cr: &mut Criterion) {
    let psi = CVector::new(vec![c(0.5, 0.1), c(0.2, -0.3), c(0.0, 0.4), c(0.6, 0.0)]).normalized();
    let noise = MeasNoise::new(0.05).unwrap();
    cr.bench_function("tomography 2q 4096 shots", |b| {
        b.iter(|| tomography(black_box(&psi), 2, Shots::Finite(4096), noise, 7).unwrap())
    });
    let rho = psi.projector();
    cr.bench_function("concurrence", |b| b.iter(|| concurrence(black_box(&rho)).unwrap()));
}

fn trajectories(cr: &mut Criterion) {
    let p = nominal();
    let psi0 = CVector::basis(2, 0);
    let times = linspace(1.8, 200);
    let shots = Shots::Finite(4096);
    cr.bench_function("hybrid trajectory 200 points", |b| {
        b.iter(|| hybrid_evolve(&p, &psi0, &times, shots, MeasNoise::none(), 1).unwrap())
    });
    cr.bench_function("dilation trajectory 200 points", |b| {
        b.iter(|| dilation_evolve(&p, &psi0, &times, shots, MeasNoise::none(), 1).unwrap())
    });
    let cp = CoupledParams::new(PtParams::new(7.82, 7.0).unwrap(), 0.019).unwrap();
    let times = linspace(1.6, 200);
    cr.bench_function("coupled trajectory 200 points exact", |b| {
        b.iter(|| {
            coupled_hybrid_evolve(&cp, &CVector::basis(4, 3), &times, Shots::Exact, MeasNoise::none(), 1).unwrap()
        })
    });
}

criterion_group!(benches, dense_kernels, measurement, trajectories);
criterion_main!(benches);
