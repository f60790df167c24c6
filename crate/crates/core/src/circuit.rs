// Copyright 2026 ptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Exact gate-level simulation on one to three qubits.
//!
//! Qubit 0 is the most significant bit of a basis index and the leftmost
//! character of a bitstring. Rotation gates follow
//! `RX(θ) = exp(-iθσx/2)` and `RZ(θ) = exp(-iθσz/2)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, c, CMatrix, CVector, I, ONE, TOL, ZERO};

pub const MAX_QUBITS: usize = 3;

#[derive(Clone, PartialEq)]
pub enum Gate {
    Rx {
        qubit: usize,
        theta: f64,
    },
    Rz {
        qubit: usize,
        theta: f64,
    },
    H {
        qubit: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    /// Arbitrary single-qubit unitary.
    U1q {
        qubit: usize,
        matrix: CMatrix,
    },
    /// Arbitrary two-qubit unitary; `qubits.0` is the high-order bit of the
    /// matrix index.
    U2q {
        qubits: (usize, usize),
        matrix: CMatrix,
    },
}

impl Gate {
    pub fn u1q(qubit: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: matrix.dim(),
            });
        }
        if !matrix.is_unitary(TOL) {
            return Err(Error::NotUnitary);
        }
        Ok(Gate::U1q { qubit, matrix })
    }

    pub fn u2q(qubits: (usize, usize), matrix: CMatrix) -> Result<Self> {
        if matrix.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: matrix.dim(),
            });
        }
        if qubits.0 == qubits.1 {
            return Err(Error::InvalidParams("two-qubit gate on a single qubit".into()));
        }
        if !matrix.is_unitary(TOL) {
            return Err(Error::NotUnitary);
        }
        Ok(Gate::U2q { qubits, matrix })
    }

    /// Qubits acted on, high-order first.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { qubit, .. } | Gate::Rz { qubit, .. } | Gate::H { qubit } | Gate::U1q { qubit, .. } => {
                vec![qubit]
            }
            Gate::Cnot { control, target } => vec![control, target],
            Gate::U2q { qubits, .. } => vec![qubits.0, qubits.1],
        }
    }

    /// The gate's own matrix on its qubits.
    pub fn local_matrix(&self) -> CMatrix {
        match self {
            Gate::Rx { theta, .. } => rx(*theta),
            Gate::Rz { theta, .. } => rz(*theta),
            Gate::H { .. } => hadamard(),
            Gate::Cnot { .. } => cnot(),
            Gate::U1q { matrix, .. } | Gate::U2q { matrix, .. } => matrix.clone(),
        }
    }
}

impl fmt::Debug for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Rx { qubit, theta } => write!(f, "RX({theta:.6}) q{qubit}"),
            Gate::Rz { qubit, theta } => write!(f, "RZ({theta:.6}) q{qubit}"),
            Gate::H { qubit } => write!(f, "H q{qubit}"),
            Gate::Cnot { control, target } => write!(f, "CNOT q{control}->q{target}"),
            Gate::U1q { qubit, .. } => write!(f, "U1Q q{qubit}"),
            Gate::U2q { qubits, .. } => write!(f, "U2Q q{},q{}", qubits.0, qubits.1),
        }
    }
}

pub fn rx(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    CMatrix::from_rows([[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]])
}

pub fn ry(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    CMatrix::from_rows([[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]])
}

pub fn rz(theta: f64) -> CMatrix {
    let ph = c(0.0, -theta / 2.0).exp();
    CMatrix::from_rows([[ph, ZERO], [ZERO, ph.conj()]])
}

pub fn hadamard() -> CMatrix {
    let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CMatrix::from_rows([[s, s], [s, -s]])
}

pub fn cnot() -> CMatrix {
    CMatrix::from_rows([
        [ONE, ZERO, ZERO, ZERO],
        [ZERO, ONE, ZERO, ZERO],
        [ZERO, ZERO, ZERO, ONE],
        [ZERO, ZERO, ONE, ZERO],
    ])
}

/// Ordered gate list with an explicit global phase `e^{iφ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    global_phase: f64,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidParams(format!(
                "circuits support 1..={MAX_QUBITS} qubits, got {n_qubits}"
            )));
        }
        Ok(Self {
            n_qubits,
            gates: Vec::new(),
            global_phase: 0.0,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        for q in gate.qubits() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits,
                });
            }
        }
        self.gates.push(gate);
        Ok(self)
    }

    pub fn add_global_phase(&mut self, phase: f64) {
        self.global_phase += phase;
    }

    /// Appends all gates of `other` (and its global phase).
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        for g in &other.gates {
            self.push(g.clone())?;
        }
        self.global_phase += other.global_phase;
        Ok(self)
    }

    /// Appends `other` with its qubit `k` relabelled to `mapping[k]`.
    pub fn append_mapped(&mut self, other: &Circuit, mapping: &[usize]) -> Result<&mut Self> {
        if mapping.len() != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: other.n_qubits,
                found: mapping.len(),
            });
        }
        for g in &other.gates {
            let m = |q: usize| mapping[q];
            let mapped = match g.clone() {
                Gate::Rx { qubit, theta } => Gate::Rx { qubit: m(qubit), theta },
                Gate::Rz { qubit, theta } => Gate::Rz { qubit: m(qubit), theta },
                Gate::H { qubit } => Gate::H { qubit: m(qubit) },
                Gate::Cnot { control, target } => Gate::Cnot {
                    control: m(control),
                    target: m(target),
                },
                Gate::U1q { qubit, matrix } => Gate::U1q {
                    qubit: m(qubit),
                    matrix,
                },
                Gate::U2q { qubits, matrix } => Gate::U2q {
                    qubits: (m(qubits.0), m(qubits.1)),
                    matrix,
                },
            };
            self.push(mapped)?;
        }
        self.global_phase += other.global_phase;
        Ok(self)
    }
}

/// Full-register matrix of `gate` on an `n_qubits` register.
pub fn embed(gate: &Gate, n_qubits: usize) -> CMatrix {
    let local = gate.local_matrix();
    let targets = gate.qubits();
    let dim = 1usize << n_qubits;
    let bit = |index: usize, q: usize| (index >> (n_qubits - 1 - q)) & 1;
    let sub_index = |index: usize| targets.iter().fold(0usize, |acc, &q| (acc << 1) | bit(index, q));
    let mask: usize = targets.iter().map(|&q| 1usize << (n_qubits - 1 - q)).sum();

    let mut out = CMatrix::zeros(dim);
    for row in 0..dim {
        for col in 0..dim {
            if row & !mask != col & !mask {
                continue;
            }
            out[(row, col)] = local[(sub_index(row), sub_index(col))];
        }
    }
    out
}

/// Product of the embedded gate matrices in application order, times the
/// circuit's global phase.
pub fn unitary_of(circuit: &Circuit) -> CMatrix {
    let mut u = CMatrix::identity(circuit.dim());
    for g in &circuit.gates {
        u = &embed(g, circuit.n_qubits) * &u;
    }
    u.scale(c(0.0, circuit.global_phase).exp())
}

pub fn run_statevector(circuit: &Circuit, init: &CVector) -> Result<CVector> {
    if init.dim() != circuit.dim() {
        return Err(Error::DimensionMismatch {
            expected: circuit.dim(),
            found: init.dim(),
        });
    }
    let mut state = init.clone();
    for g in &circuit.gates {
        state = embed(g, circuit.n_qubits).mul_vec(&state)?;
    }
    Ok(state.scale(c(0.0, circuit.global_phase).exp()))
}

/// Independent bit-flip applied to every measured qubit.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasNoise {
    p_flip: f64,
}

impl MeasNoise {
    pub fn new(p_flip: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_flip) {
            return Err(Error::InvalidParams(format!("p_flip must lie in [0, 1], got {p_flip}")));
        }
        Ok(Self { p_flip })
    }

    pub fn none() -> Self {
        Self { p_flip: 0.0 }
    }

    pub fn p_flip(&self) -> f64 {
        self.p_flip
    }
}

/// Number of measurement repetitions; `Exact` uses the analytic outcome
/// distribution instead of sampling. Serialized as an integer or the
/// string `"exact"`, matching the command-line spelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    Exact,
    Finite(u64),
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shots::Exact => write!(f, "exact"),
            Shots::Finite(n) => write!(f, "{n}"),
        }
    }
}

impl std::str::FromStr for Shots {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("exact") {
            return Ok(Shots::Exact);
        }
        match s.parse::<u64>() {
            Ok(n) if n > 0 => Ok(Shots::Finite(n)),
            _ => Err(Error::Config(format!(
                "shots must be a positive integer or \"exact\", got {s:?}"
            ))),
        }
    }
}

impl Serialize for Shots {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Shots::Exact => s.serialize_str("exact"),
            Shots::Finite(n) => s.serialize_u64(*n),
        }
    }
}

impl<'de> Deserialize<'de> for Shots {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Int(n) => n.to_string(),
            Raw::Text(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Measurement outcomes keyed by bitstring (qubit 0 leftmost).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    n_qubits: usize,
    counts: BTreeMap<String, u64>,
    shots: u64,
}

impl Counts {
    fn from_indices(n_qubits: usize, hist: &[u64]) -> Self {
        let counts = hist
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, &n)| (bitstring(i, n_qubits), n))
            .collect();
        Self {
            n_qubits,
            counts,
            shots: hist.iter().sum(),
        }
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn get(&self, bits: &str) -> u64 {
        self.counts.get(bits).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Counts indexed by basis index.
    pub fn histogram(&self) -> Vec<u64> {
        let mut hist = vec![0; 1 << self.n_qubits];
        for (bits, &n) in &self.counts {
            hist[usize::from_str_radix(bits, 2).expect("bitstring")] = n;
        }
        hist
    }
}

pub fn bitstring(index: usize, n_qubits: usize) -> String {
    format!("{index:0width$b}", width = n_qubits)
}

/// Outcome distribution after the bit-flip channel, computed exactly.
pub fn noisy_distribution(probs: &[f64], n_qubits: usize, noise: MeasNoise) -> Vec<f64> {
    let p = noise.p_flip;
    if p == 0.0 {
        return probs.to_vec();
    }
    let mut dist = probs.to_vec();
    for q in 0..n_qubits {
        let m = 1usize << (n_qubits - 1 - q);
        let mut next = vec![0.0; dist.len()];
        for (i, &w) in dist.iter().enumerate() {
            next[i] += (1.0 - p) * w;
            next[i ^ m] += p * w;
        }
        dist = next;
    }
    dist
}

/// Multinomial draw from `probs` followed by independent bit flips,
/// deterministic in `seed`.
pub fn sample_distribution(probs: &[f64], n_qubits: usize, shots: u64, noise: MeasNoise, seed: u64) -> Counts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: f64 = probs.iter().sum();
    let mut hist = vec![0u64; probs.len()];
    for _ in 0..shots {
        let r = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut outcome = probs.len() - 1;
        for (i, &w) in probs.iter().enumerate() {
            acc += w;
            if r < acc {
                outcome = i;
                break;
            }
        }
        // Skip trailing zero-probability outcomes hit by rounding.
        while probs[outcome] == 0.0 && outcome > 0 {
            outcome -= 1;
        }
        for q in 0..n_qubits {
            if noise.p_flip > 0.0 && rng.gen::<f64>() < noise.p_flip {
                outcome ^= 1 << (n_qubits - 1 - q);
            }
        }
        hist[outcome] += 1;
    }
    Counts::from_indices(n_qubits, &hist)
}

/// Samples a state in the computational basis.
pub fn sample(state: &CVector, shots: u64, noise: MeasNoise, seed: u64) -> Result<Counts> {
    let n_qubits = qubits_for_dim(state.dim())?;
    Ok(sample_distribution(
        &state.probabilities(),
        n_qubits,
        shots,
        noise,
        seed,
    ))
}

/// Outcome frequencies: exact (noisy) probabilities, or sampled counts
/// divided by the number of shots.
pub fn measured_frequencies(probs: &[f64], n_qubits: usize, shots: Shots, noise: MeasNoise, seed: u64) -> Vec<f64> {
    match shots {
        Shots::Exact => noisy_distribution(probs, n_qubits, noise),
        Shots::Finite(n) => sample_distribution(probs, n_qubits, n, noise, seed)
            .histogram()
            .into_iter()
            .map(|k| k as f64 / n as f64)
            .collect(),
    }
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    match dim {
        2 => Ok(1),
        4 => Ok(2),
        8 => Ok(3),
        d => Err(Error::DimensionMismatch { expected: 2, found: d }),
    }
}

/// Deterministic sub-seed (SplitMix64 finalizer over `base` and `index`).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> CMatrix {
        match self {
            Pauli::I => numerics::pauli::id(),
            Pauli::X => numerics::pauli::x(),
            Pauli::Y => numerics::pauli::y(),
            Pauli::Z => numerics::pauli::z(),
        }
    }

    /// Single-qubit rotation taking this Pauli's eigenbasis to the
    /// computational basis (+1 eigenvector to `|0⟩`).
    pub fn basis_change(self) -> CMatrix {
        match self {
            Pauli::I | Pauli::Z => CMatrix::identity(2),
            Pauli::X => hadamard(),
            Pauli::Y => &hadamard() * &CMatrix::from_diag(&[ONE, -I]),
        }
    }
}

/// Every non-identity Pauli string on `n_qubits`, qubit 0 first, in
/// lexicographic I < X < Y < Z order (3 strings for one qubit, 15 for two).
pub fn pauli_strings(n_qubits: usize) -> Vec<Vec<Pauli>> {
    const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    (1..4usize.pow(n_qubits as u32))
        .map(|mut code| {
            let mut s = vec![Pauli::I; n_qubits];
            for q in (0..n_qubits).rev() {
                s[q] = ALL[code % 4];
                code /= 4;
            }
            s
        })
        .collect()
}

pub fn pauli_string_matrix(string: &[Pauli]) -> CMatrix {
    string
        .iter()
        .skip(1)
        .fold(string[0].matrix(), |acc, p| acc.kron(&p.matrix()))
}

fn basis_change_matrix(string: &[Pauli]) -> CMatrix {
    string
        .iter()
        .skip(1)
        .fold(string[0].basis_change(), |acc, p| acc.kron(&p.basis_change()))
}

/// Computational-basis probabilities of `rho` after rotating each qubit into
/// the eigenbasis of its Pauli factor.
pub fn rotated_probabilities(rho: &CMatrix, string: &[Pauli]) -> Vec<f64> {
    let u = basis_change_matrix(string);
    let rotated = &(&u * rho) * &u.adjoint();
    rotated.diagonal().iter().map(|z| z.re.max(0.0)).collect()
}

/// `Σ_y f(y) (-1)^{parity of y on the support}` for a Pauli string whose
/// first qubit sits at register position `offset`.
pub fn parity_expectation(freqs: &[f64], n_qubits: usize, string: &[Pauli], offset: usize) -> f64 {
    let mask: usize = string
        .iter()
        .enumerate()
        .filter(|(_, &p)| p != Pauli::I)
        .map(|(k, _)| 1usize << (n_qubits - 1 - (k + offset)))
        .sum();
    freqs
        .iter()
        .enumerate()
        .map(|(y, &f)| {
            if (y & mask).count_ones().is_multiple_of(2) {
                f
            } else {
                -f
            }
        })
        .sum()
}

/// Estimated `⟨P⟩` for every non-identity Pauli string, one measurement
/// setting per string.
pub fn pauli_expectations(rho: &CMatrix, shots: Shots, noise: MeasNoise, seed: u64) -> Result<Vec<(Vec<Pauli>, f64)>> {
    let n_qubits = qubits_for_dim(rho.dim())?;
    Ok(pauli_strings(n_qubits)
        .into_iter()
        .enumerate()
        .map(|(k, string)| {
            let probs = rotated_probabilities(rho, &string);
            let freqs = measured_frequencies(&probs, n_qubits, shots, noise, derive_seed(seed, k as u64));
            let e = parity_expectation(&freqs, n_qubits, &string, 0);
            (string, e)
        })
        .collect())
}

/// Linear inversion `ρ = (I + Σ ⟨P⟩ P) / 2ⁿ` (no positivity projection).
pub fn reconstruct(n_qubits: usize, expectations: &[(Vec<Pauli>, f64)]) -> CMatrix {
    let dim = 1usize << n_qubits;
    let mut rho = CMatrix::identity(dim);
    for (string, e) in expectations {
        rho = &rho + &pauli_string_matrix(string).scale_real(*e);
    }
    rho.scale_real(1.0 / dim as f64)
}

/// Pauli tomography of a density matrix, projected onto valid states.
pub fn tomography_rho(rho: &CMatrix, shots: Shots, noise: MeasNoise, seed: u64) -> Result<CMatrix> {
    let n_qubits = qubits_for_dim(rho.dim())?;
    let expectations = pauli_expectations(rho, shots, noise, seed)?;
    numerics::nearest_psd(&reconstruct(n_qubits, &expectations))
}

/// Pauli tomography of a pure state on `n_qubits` (1 or 2).
pub fn tomography(state: &CVector, n_qubits: usize, shots: Shots, noise: MeasNoise, seed: u64) -> Result<CMatrix> {
    if !(1..=2).contains(&n_qubits) || state.dim() != 1 << n_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << n_qubits.min(2),
            found: state.dim(),
        });
    }
    tomography_rho(&state.normalized().projector(), shots, noise, seed)
}

/// Single-qubit unitary with `U|0⟩ = target`.
pub fn prepare_state_gate(target: &CVector, qubit: usize) -> Result<Gate> {
    if target.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: target.dim(),
        });
    }
    if target.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let t = target.normalized();
    let m = CMatrix::from_rows([[t[0], -t[1].conj()], [t[1], t[0].conj()]]);
    Gate::u1q(qubit, m)
}

/// Decomposition of a two-qubit diagonal phase into Z-type terms:
/// `φ(b0, b1) = global + z0·(-1)^{b0} + z1·(-1)^{b1} + zz·(-1)^{b0⊕b1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalAngles {
    pub global: f64,
    pub z0: f64,
    pub z1: f64,
    pub zz: f64,
}

impl DiagonalAngles {
    pub fn from_phases(phases: [f64; 4]) -> Self {
        let [p00, p01, p10, p11] = phases;
        Self {
            global: 0.25 * (p00 + p01 + p10 + p11),
            z0: 0.25 * (p00 + p01 - p10 - p11),
            z1: 0.25 * (p00 - p01 + p10 - p11),
            zz: 0.25 * (p00 - p01 - p10 + p11),
        }
    }
}

const ANGLE_EPS: f64 = 1e-15;

/// RZ/CNOT circuit for `diag(e^{iφ00}, e^{iφ01}, e^{iφ10}, e^{iφ11})`.
///
/// Each Z term with coefficient `a` is an `RZ(-2a)`; the ZZ term is an RZ
/// on qubit 1 conjugated by CNOTs. Zero angles emit no gates. The constant
/// part is kept as the circuit's global phase, so `unitary_of` reproduces
/// the diagonal exactly.
pub fn synth_diagonal_2q(phases: [f64; 4]) -> Circuit {
    let angles = DiagonalAngles::from_phases(phases);
    let mut circ = Circuit::new(2).expect("two qubits");
    if angles.z0.abs() > ANGLE_EPS {
        circ.push(Gate::Rz {
            qubit: 0,
            theta: -2.0 * angles.z0,
        })
        .expect("in range");
    }
    if angles.z1.abs() > ANGLE_EPS {
        circ.push(Gate::Rz {
            qubit: 1,
            theta: -2.0 * angles.z1,
        })
        .expect("in range");
    }
    if angles.zz.abs() > ANGLE_EPS {
        circ.push(Gate::Cnot { control: 0, target: 1 }).expect("in range");
        circ.push(Gate::Rz {
            qubit: 1,
            theta: -2.0 * angles.zz,
        })
        .expect("in range");
        circ.push(Gate::Cnot { control: 0, target: 1 }).expect("in range");
    }
    circ.add_global_phase(angles.global);
    circ
}

/// Two-qubit state preparation from `|00⟩` via the Schmidt decomposition.
///
/// A single entangling unitary `CNOT·(RY(2θ)⊗I)` produces
/// `cos θ|00⟩ + sin θ|11⟩`, then one local unitary per qubit rotates the
/// Schmidt basis into place. Product targets skip the entangler.
pub fn prepare_state_2q(target: &CVector) -> Result<Circuit> {
    if target.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: target.dim(),
        });
    }
    if target.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let t = target.normalized();
    // Coefficient matrix M[b0][b1].
    let m = CMatrix::from_rows([[t[0], t[1]], [t[2], t[3]]]);
    let (_, u) = numerics::eigh(&(&m * &m.adjoint()))?;
    // Dominant left singular vector first.
    let u0 = u.column(1);
    let u1 = u.column(0);
    let mt = m.transpose();
    let w0 = mt.mul_vec(&u0.conj())?;
    let sigma0 = w0.norm();
    let v0 = w0.normalized();
    let v1_perp = CVector::new(vec![-v0[1].conj(), v0[0].conj()]);
    let overlap: Complex64 = v1_perp.inner(&mt.mul_vec(&u1.conj())?);
    let sigma1 = overlap.norm();
    let v1 = if sigma1 > 0.0 {
        v1_perp.scale(overlap / sigma1)
    } else {
        v1_perp
    };

    let mut circ = Circuit::new(2)?;
    if sigma1 <= 1e-14 {
        circ.push(prepare_state_gate(&u0, 0)?)?;
        circ.push(prepare_state_gate(&v0, 1)?)?;
        return Ok(circ);
    }
    let theta = sigma1.atan2(sigma0);
    let entangler = &cnot() * &ry(2.0 * theta).kron(&CMatrix::identity(2));
    circ.push(Gate::u2q((0, 1), entangler)?)?;
    circ.push(Gate::u1q(0, CMatrix::from_columns(&[u0, u1])?)?)?;
    circ.push(Gate::u1q(1, CMatrix::from_columns(&[v0, v1])?)?)?;
    Ok(circ)
}
