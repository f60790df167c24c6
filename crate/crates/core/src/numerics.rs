// Copyright 2026 ptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra for the small operators used throughout the
//! crate (dimension 2, 4 or 8).
//!
//! Everything here is a pure function of its inputs. Matrices are stored
//! row-major in a flat `Vec<Complex64>`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for structural predicates on exact-math results.
pub const TOL: f64 = 1e-10;
/// Relaxed tolerance for checks on tomographic (shot-noise) data.
pub const TOL_STAT: f64 = 1e-8;

/// Eigenvalues below this fraction of the spectral radius are treated as
/// exact zeros inside square roots. Rounding leaves ~1e-16 residue in the
/// null space of rank-deficient PSD matrices; its square root (~1e-8) would
/// otherwise dominate fidelity and concurrence.
const EIG_FLOOR_REL: f64 = 1e-13;

const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Taylor order used by [`expm`] after scaling to norm ≤ 1/2.
const EXPM_ORDER: usize = 20;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

/// Complex column vector.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct CVector {
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails unless the length is a
    /// positive perfect square.
    pub fn from_vec(data: Vec<Complex64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != data.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Convenience constructor from nested rows. Panics on ragged input, so
    /// it is meant for literals.
    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        Self {
            dim: N,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = c(d, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[CVector]) -> Result<Self> {
        let n = cols.len();
        let mut m = Self::zeros(n.max(1));
        for (j, col) in cols.iter().enumerate() {
            if col.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: col.dim(),
                });
            }
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector::new((0..self.dim).map(|i| self[(i, j)]).collect())
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `(self + self†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim;
        (0..n).all(|i| (i..n).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = matmul_unchecked(&self.adjoint(), self);
        prod.max_abs_diff(&Self::identity(self.dim)) <= tol
    }

    /// Hermitian within `tol` and no eigenvalue below `-tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        match eigh_unchecked(&self.hermitian_part()) {
            Ok((vals, _)) => vals.first().is_none_or(|&v| v >= -tol),
            Err(_) => false,
        }
    }

    /// Unit trace, Hermitian and PSD, all within `tol`.
    pub fn is_density_matrix(&self, tol: f64) -> bool {
        (self.trace() - ONE).norm() <= tol && self.is_psd(tol)
    }

    pub fn mul_vec(&self, v: &CVector) -> Result<CVector> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.dim(),
            });
        }
        let n = self.dim;
        Ok(CVector::new(
            (0..n).map(|i| (0..n).map(|k| self[(i, k)] * v[k]).sum()).collect(),
        ))
    }

    /// Kronecker product `self ⊗ other`; `self` indexes the high-order bits.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (n, m) = (self.dim, other.dim);
        let mut out = CMatrix::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> Complex64 {
        let n = self.dim;
        let mut a = self.clone();
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[(x, col)].norm().total_cmp(&a[(y, col)].norm()))
                .unwrap();
            if a[(pivot, col)].norm() == 0.0 {
                return ZERO;
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            let p = a[(col, col)];
            det *= p;
            for r in col + 1..n {
                let f = a[(r, col)] / p;
                for k in col..n {
                    let v = a[(col, k)];
                    a[(r, k)] -= f * v;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<CMatrix> {
        let n = self.dim;
        let mut a = self.clone();
        let mut inv = CMatrix::identity(n);
        let scale = self.one_norm().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[(x, col)].norm().total_cmp(&a[(y, col)].norm()))
                .unwrap();
            if a[(pivot, col)].norm() <= 1e-14 * scale {
                return Err(Error::Singular);
            }
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let p = a[(col, col)].inv();
            for k in 0..n {
                a[(col, k)] *= p;
                inv[(col, k)] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == ZERO {
                    continue;
                }
                for k in 0..n {
                    let (ak, ik) = (a[(col, k)], inv[(col, k)]);
                    a[(r, k)] -= f * ak;
                    inv[(r, k)] -= f * ik;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        if r1 == r2 {
            return;
        }
        let n = self.dim;
        for k in 0..n {
            self.data.swap(r1 * n + k, r2 * n + k);
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "add: dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "sub: dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Panicking product for operands whose dimensions are known to agree.
impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "mul: dimension mismatch");
        matmul_unchecked(self, rhs)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CVector {
    pub fn new(data: Vec<Complex64>) -> Self {
        assert!(!data.is_empty(), "vector dimension must be positive");
        Self { data }
    }

    /// Computational basis state `|index⟩` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut data = vec![ZERO; dim];
        data[index] = ONE;
        Self { data }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| c(x, 0.0)).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Unit-norm copy. The zero vector is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scale(c(1.0 / n, 0.0))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &CVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner: dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|self⟩⟨other|`.
    pub fn outer(&self, other: &CVector) -> CMatrix {
        let n = self.dim();
        assert_eq!(n, other.dim(), "outer: dimension mismatch");
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.data[i] * other.data[j].conj();
            }
        }
        m
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> CMatrix {
        self.outer(self)
    }

    pub fn kron(&self, other: &CVector) -> CVector {
        CVector::new(
            self.data
                .iter()
                .flat_map(|a| other.data.iter().map(move |b| a * b))
                .collect(),
        )
    }

    pub fn add(&self, other: &CVector) -> CVector {
        assert_eq!(self.dim(), other.dim(), "add: dimension mismatch");
        CVector::new(self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &CVector) -> CVector {
        assert_eq!(self.dim(), other.dim(), "sub: dimension mismatch");
        CVector::new(self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect())
    }

    pub fn max_abs_diff(&self, other: &CVector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "max_abs_diff: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Squared moduli of the amplitudes.
    pub fn probabilities(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Distance to `other` after removing the best global phase. Both inputs
    /// are compared as given; normalize first if only directions matter.
    pub fn phase_distance(&self, other: &CVector) -> f64 {
        let ov = self.inner(other);
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { ONE };
        self.scale(phase).max_abs_diff(other)
    }
}

impl Index<usize> for CVector {
    type Output = Complex64;
    #[inline]
    fn index(&self, i: usize) -> &Complex64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for CVector {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.data[i]
    }
}

impl fmt::Debug for CVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CVector[")?;
        for (k, z) in self.data.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:+.6}{:+.6}i", z.re, z.im)?;
        }
        write!(f, "]")
    }
}

/// Pauli matrices and other fixed single-qubit operators.
pub mod pauli {
    use super::*;

    pub fn x() -> CMatrix {
        CMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_rows([[ZERO, -I], [I, ZERO]])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_rows([[ONE, ZERO], [ZERO, -ONE]])
    }

    pub fn id() -> CMatrix {
        CMatrix::identity(2)
    }
}

fn matmul_unchecked(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.dim;
    let mut out = CMatrix::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a.data[i * n + k];
            if aik == ZERO {
                continue;
            }
            for j in 0..n {
                out.data[i * n + j] += aik * b.data[k * n + j];
            }
        }
    }
    out
}

/// Exact complex matrix product.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(matmul_unchecked(a, b))
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Returns eigenvalues in ascending order (ties keep their original diagonal
/// position) and a unitary matrix whose columns are the matching
/// eigenvectors, so that `h = V diag(λ) V†`.
pub fn eigh(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let scale = h.frobenius_norm().max(1.0);
    if !h.is_hermitian(TOL * scale) {
        return Err(Error::NotHermitian);
    }
    eigh_unchecked(&h.hermitian_part())
}

fn eigh_unchecked(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = h.dim;
    let mut a = h.clone();
    let mut v = CMatrix::identity(n);
    let thresh = JACOBI_OFF_TOL * h.frobenius_norm().max(1.0);

    let off_norm = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) > thresh {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence("jacobi eigh"));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // Phase the (p,q) block to real symmetric, then rotate.
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = 0.5 * (2.0 * r).atan2(aqq - app);
                let (s, cth) = theta.sin_cos();
                // G = diag(1, conj(phase)) · [[c, s], [-s, c]] on (p, q).
                let g_pp = c(cth, 0.0);
                let g_pq = c(s, 0.0);
                let g_qp = phase.conj() * (-s);
                let g_qq = phase.conj() * cth;

                // A ← A G
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                // A ← G† A
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = c(a[(p, p)].re, 0.0);
                a[(q, q)] = c(a[(q, q)].re, 0.0);
                // V ← V G
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps original index order among equal eigenvalues.
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let vals = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vecs = CMatrix::zeros(n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for k in 0..n {
            vecs[(k, new_j)] = v[(k, old_j)];
        }
    }
    Ok((vals, vecs))
}

/// `V diag(f(λ)) V†` for a Hermitian eigendecomposition.
fn spectral_map(vals: &[f64], vecs: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = vecs.dim;
    let mut out = CMatrix::zeros(n);
    for (k, &lam) in vals.iter().enumerate() {
        let fl = f(lam);
        if fl == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = vecs[(i, k)] * fl;
            for j in 0..n {
                out[(i, j)] += vik * vecs[(j, k)].conj();
            }
        }
    }
    out
}

/// Matrix exponential by scaling and squaring with a fixed-order Taylor
/// series. Valid for any square matrix, including non-normal ones.
pub fn expm(m: &CMatrix) -> CMatrix {
    let n = m.dim;
    let norm = m.one_norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let a = m.scale_real(0.5f64.powi(squarings as i32));

    // Horner evaluation of sum_{k=0}^{ORDER} A^k / k!.
    let mut result = CMatrix::identity(n);
    for k in (1..=EXPM_ORDER).rev() {
        result = &CMatrix::identity(n) + &matmul_unchecked(&a, &result).scale_real(1.0 / k as f64);
    }
    for _ in 0..squarings {
        result = matmul_unchecked(&result, &result);
    }
    result
}

fn eig_floor(vals: &[f64]) -> f64 {
    let radius = vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    EIG_FLOOR_REL * radius
}

/// Principal square root of a positive semidefinite matrix.
pub fn sqrtm_psd(m: &CMatrix) -> Result<CMatrix> {
    let (vals, vecs) = eigh(m)?;
    let scale = m.frobenius_norm().max(1.0);
    if let Some(&min) = vals.first() {
        if min < -TOL * scale {
            return Err(Error::NotPsd(min));
        }
    }
    let floor = eig_floor(&vals);
    Ok(spectral_map(&vals, &vecs, |l| if l <= floor { 0.0 } else { l.sqrt() }))
}

/// Square roots of the eigenvalues of a Hermitian PSD matrix, with
/// the same null-space flooring as [`sqrtm_psd`]. Returned in descending
/// order.
///
/// Inputs are products of unit-trace density matrices, so the floor is
/// taken relative to at least 1: a product of orthogonal pure states has
/// an all-noise spectrum that would otherwise survive as `√ε`.
pub(crate) fn sqrt_eigenvalues_desc(m: &CMatrix) -> Result<Vec<f64>> {
    let (vals, _) = eigh_unchecked(&m.hermitian_part())?;
    let floor = eig_floor(&vals).max(EIG_FLOOR_REL);
    let mut out: Vec<f64> = vals.iter().map(|&l| if l <= floor { 0.0 } else { l.sqrt() }).collect();
    out.reverse();
    Ok(out)
}

fn check_density(m: &CMatrix, tol: f64) -> Result<()> {
    if m.is_density_matrix(tol) {
        Ok(())
    } else {
        Err(Error::InvalidDensityMatrix)
    }
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`, clamped to `[0, 1]`.
pub fn fidelity(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    if rho.dim != sigma.dim {
        return Err(Error::DimensionMismatch {
            expected: rho.dim,
            found: sigma.dim,
        });
    }
    check_density(rho, TOL_STAT)?;
    check_density(sigma, TOL_STAT)?;
    let sr = sqrtm_psd(rho)?;
    let inner = &(&sr * sigma) * &sr;
    let tr: f64 = sqrt_eigenvalues_desc(&inner)?.iter().sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}

/// Projects a Hermitian matrix onto the density matrices by clipping
/// negative eigenvalues and renormalizing the trace.
///
/// A matrix with no positive spectrum maps to the maximally mixed state.
pub fn nearest_psd(m: &CMatrix) -> Result<CMatrix> {
    let scale = m.frobenius_norm().max(1.0);
    if !m.is_hermitian(TOL_STAT * scale) {
        return Err(Error::NotHermitian);
    }
    let (vals, vecs) = eigh_unchecked(&m.hermitian_part())?;
    let clipped: Vec<f64> = vals.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Ok(CMatrix::identity(m.dim).scale_real(1.0 / m.dim as f64));
    }
    // Already a density matrix: return the input untouched (exact idempotence).
    if vals[0] >= 0.0 && (total - 1.0).abs() <= 1e-15 * m.dim as f64 {
        return Ok(m.hermitian_part());
    }
    Ok(spectral_map(&clipped, &vecs, |l| l / total).hermitian_part())
}

/// Trace distance `½‖ρ − σ‖₁` between two Hermitian matrices.
pub fn trace_distance(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    let diff = rho - sigma;
    let (vals, _) = eigh_unchecked(&diff.hermitian_part())?;
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        CMatrix::from_vec(
            (0..n * n)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    fn naive_matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
        let n = a.dim();
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += a[(i, k)] * b[(k, j)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    #[test]
    fn matmul_identity_and_pauli() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_matrix(&mut rng, 4);
        assert_eq!(matmul(&CMatrix::identity(4), &m).unwrap(), m);
        let xx = matmul(&pauli::x(), &pauli::x()).unwrap();
        assert!(xx.max_abs_diff(&CMatrix::identity(2)) == 0.0);
    }

    #[test]
    fn matmul_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_matrix(&mut rng, 4);
        let b = random_matrix(&mut rng, 4);
        assert!(matmul(&a, &b).unwrap().max_abs_diff(&naive_matmul(&a, &b)) <= 1e-13);
    }

    #[test]
    fn matmul_rejects_mismatch() {
        let err = matmul(&CMatrix::identity(2), &CMatrix::identity(4)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn eigh_paulis() {
        let (vals, vecs) = eigh(&pauli::z()).unwrap();
        assert_eq!(vals, vec![-1.0, 1.0]);
        // Columns are |1⟩, |0⟩ up to phase.
        assert!((vecs[(1, 0)].norm() - 1.0).abs() < 1e-14);
        assert!((vecs[(0, 1)].norm() - 1.0).abs() < 1e-14);

        let (vals, vecs) = eigh(&pauli::x()).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        assert!(vecs.is_unitary(1e-12));
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = CMatrix::from_rows([[ONE, ONE], [ZERO, ONE]]);
        assert!(matches!(eigh(&m), Err(Error::NotHermitian)));
    }

    #[test]
    fn eigh_ties_are_stable() {
        let m = CMatrix::from_real_diag(&[2.0, 1.0, 2.0, 1.0]);
        let (vals, vecs) = eigh(&m).unwrap();
        assert_eq!(vals, vec![1.0, 1.0, 2.0, 2.0]);
        // Equal eigenvalues keep diagonal order: e1, e3, e0, e2.
        for (col, row) in [1usize, 3, 0, 2].into_iter().enumerate() {
            assert_eq!(vecs[(row, col)], ONE);
        }
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 4, 8] {
            for _ in 0..20 {
                let h = random_matrix(&mut rng, n).hermitian_part().scale_real(5.0);
                let (vals, vecs) = eigh(&h).unwrap();
                assert!(vals.windows(2).all(|w| w[0] <= w[1]));
                assert!(vecs.is_unitary(1e-10));
                let rec = spectral_map(&vals, &vecs, |l| l);
                assert!(rec.max_abs_diff(&h) <= 1e-10, "n={n}");
            }
        }
    }

    #[test]
    fn expm_basics() {
        assert!(expm(&CMatrix::zeros(2)).max_abs_diff(&CMatrix::identity(2)) == 0.0);
        let rot = expm(&pauli::x().scale(c(0.0, -std::f64::consts::FRAC_PI_2)));
        assert!(rot.max_abs_diff(&pauli::x().scale(-I)) <= 1e-14);
    }

    #[test]
    fn expm_large_norm_hermitian_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [2, 4, 8] {
            let h = random_matrix(&mut rng, n).hermitian_part();
            for t in [0.0, 0.5, 3.0, 10.0] {
                let u = expm(&h.scale(c(0.0, -t)));
                assert!(u.is_unitary(1e-10), "n={n} t={t}");
                // Compare with the spectral route.
                let (vals, vecs) = eigh(&h).unwrap();
                let mut oracle = CMatrix::zeros(n);
                for (k, &l) in vals.iter().enumerate() {
                    let ph = c(0.0, -l * t).exp();
                    for i in 0..n {
                        for j in 0..n {
                            oracle[(i, j)] += vecs[(i, k)] * ph * vecs[(j, k)].conj();
                        }
                    }
                }
                assert!(u.max_abs_diff(&oracle) <= 1e-10);
            }
        }
    }

    #[test]
    fn sqrtm_examples() {
        assert!(
            sqrtm_psd(&CMatrix::identity(2))
                .unwrap()
                .max_abs_diff(&CMatrix::identity(2))
                < 1e-15
        );
        let r = sqrtm_psd(&CMatrix::from_real_diag(&[4.0, 9.0])).unwrap();
        assert!(r.max_abs_diff(&CMatrix::from_real_diag(&[2.0, 3.0])) < 1e-14);
        let bad = CMatrix::from_real_diag(&[1.0, -0.5]);
        assert!(matches!(sqrtm_psd(&bad), Err(Error::NotPsd(_))));
    }

    #[test]
    fn fidelity_examples() {
        let zero = CVector::basis(2, 0).projector();
        let one = CVector::basis(2, 1).projector();
        let mixed = CMatrix::identity(2).scale_real(0.5);
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-14);
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-14);
        assert!((fidelity(&zero, &mixed).unwrap() - 0.5).abs() < 1e-14);
        assert!(matches!(
            fidelity(&CMatrix::identity(2), &zero),
            Err(Error::InvalidDensityMatrix)
        ));
    }

    #[test]
    fn nearest_psd_examples() {
        let clipped = nearest_psd(&CMatrix::from_real_diag(&[1.1, -0.1])).unwrap();
        assert!(clipped.max_abs_diff(&CMatrix::from_real_diag(&[1.0, 0.0])) < 1e-14);
        let rho = CVector::from_real(&[0.6, 0.8]).projector();
        assert!(nearest_psd(&rho).unwrap().max_abs_diff(&rho) < 1e-14);
    }

    #[test]
    fn det_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(&mut rng, 4);
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).max_abs_diff(&CMatrix::identity(4)) < 1e-12);
        let d = CMatrix::from_rows([[c(2.0, 0.0), c(1.0, 1.0)], [c(0.0, 3.0), c(4.0, 0.0)]]).det();
        // 8 - (1+i)(3i) = 8 - 3i + 3
        assert!((d - c(11.0, -3.0)).norm() < 1e-14);
        assert!(matches!(CMatrix::zeros(2).inverse(), Err(Error::Singular)));
    }

    #[test]
    fn kron_shape() {
        let k = pauli::x().kron(&pauli::z());
        assert_eq!(k.dim(), 4);
        assert_eq!(k[(0, 2)], ONE);
        assert_eq!(k[(1, 3)], -ONE);
    }

    #[test]
    fn normalized_vector() {
        let v = CVector::new(vec![c(3.0, 0.0), c(0.0, 4.0)]);
        assert!((v.normalized().norm() - 1.0).abs() < 1e-15);
        let z = CVector::new(vec![ZERO, ZERO]);
        assert_eq!(z.normalized().norm(), 0.0);
    }
}
