//! Dense complex linear algebra for one- and two-qubit operators.
//!
//! Everything in this crate lives on a single qubit pair, so matrices are
//! fixed at 2x2 (single-qubit operators) or 4x4 (two-qubit operators).
//! The module provides products, tensor products, adjoints, traces, partial
//! traces and Hermitian eigenvalues; nothing here knows about states or
//! measurements.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type Complex64 = num_complex::Complex<f64>;

/// Maximum sweeps of the cyclic Jacobi iteration before giving up.
const MAX_JACOBI_SWEEPS: usize = 64;

/// Hermiticity accepted by the eigensolver. Looser than the construction
/// tolerance so operators that accumulated round-off through long channel
/// compositions still diagonalize.
const EIGEN_INPUT_HERMITICITY: f64 = 1e-10;

/// Numeric tolerances shared across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Maximum entrywise |M - M†| for a matrix to count as Hermitian.
    pub hermiticity: f64,
    /// Off-diagonal magnitude at which the eigenvalue iteration stops.
    pub eigen_convergence: f64,
    /// Allowed deviation in trace checks.
    pub trace_check: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-12,
            eigen_convergence: 1e-12,
            trace_check: 1e-10,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("unsupported matrix dimension {0}: only 2 and 4 are supported")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not Hermitian: max |M - M†| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("eigenvalue iteration did not converge within {0} sweeps")]
    NoConvergence(usize),
}

/// Dense complex matrix of dimension 2 or 4, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix. Panics if `dim` is not 2 or 4; the dimension set is a
    /// crate-wide contract, not a data error.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 4, "unsupported dimension {dim}");
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Identity matrix of dimension 2 or 4.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// 2x2 matrix from rows.
    pub fn from_rows_2(rows: [[Complex64; 2]; 2]) -> Self {
        Self {
            dim: 2,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// 4x4 matrix from rows.
    pub fn from_rows_4(rows: [[Complex64; 4]; 4]) -> Self {
        Self {
            dim: 4,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// Pauli X.
    pub fn pauli_x() -> Self {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        Self::from_rows_2([[o, l], [l, o]])
    }

    /// Pauli Y.
    pub fn pauli_y() -> Self {
        let o = Complex64::new(0.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        Self::from_rows_2([[o, -i], [i, o]])
    }

    /// Pauli Z.
    pub fn pauli_z() -> Self {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        Self::from_rows_2([[l, o], [o, -l]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    /// Conjugate transpose M†.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Entrywise scaling by a real factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    /// Standard matrix product; rejects mismatched dimensions.
    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch(self.dim, other.dim));
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Kronecker product of two 2x2 matrices, in the row-major block
    /// convention `entry[(2i+k), (2j+l)] = A[i,j] * B[k,l]`. The left factor
    /// is subsystem A.
    pub fn tensor(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dim != 2 {
            return Err(LinalgError::UnsupportedDimension(self.dim));
        }
        if other.dim != 2 {
            return Err(LinalgError::UnsupportedDimension(other.dim));
        }
        let mut out = Self::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out.set(2 * i + k, 2 * j + l, self.get(i, j) * other.get(k, l));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Trace out the left (A) factor of a 4x4 operator, leaving a 2x2
    /// operator on B. Preserves the full trace.
    pub fn partial_trace_a(&self) -> Result<Self, LinalgError> {
        if self.dim != 4 {
            return Err(LinalgError::UnsupportedDimension(self.dim));
        }
        let mut out = Self::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                let sum = self.get(i, j) + self.get(2 + i, 2 + j);
                out.set(i, j, sum);
            }
        }
        Ok(out)
    }

    /// Trace out the right (B) factor of a 4x4 operator, leaving a 2x2
    /// operator on A.
    pub fn partial_trace_b(&self) -> Result<Self, LinalgError> {
        if self.dim != 4 {
            return Err(LinalgError::UnsupportedDimension(self.dim));
        }
        let mut out = Self::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                let sum = self.get(2 * i, 2 * j) + self.get(2 * i + 1, 2 * j + 1);
                out.set(i, j, sum);
            }
        }
        Ok(out)
    }

    /// Largest entrywise |M - M†|.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let dev = (self.get(i, j) - self.get(j, i).conj()).norm();
                max = max.max(dev);
            }
        }
        max
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        self.hermiticity_deviation() <= tolerance
    }

    /// Largest entrywise |self - other|. Panics on mismatched dimensions.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of a Hermitian matrix, sorted ascending.
    ///
    /// Dimension 2 uses the closed form: writing M = c*I + a.sigma, the
    /// eigenvalues are c ± |a|. Dimension 4 runs cyclic two-sided Jacobi
    /// rotations until every off-diagonal magnitude falls below the
    /// convergence tolerance.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>, LinalgError> {
        self.hermitian_eigenvalues_with(&Tolerances::default())
    }

    /// As [`hermitian_eigenvalues`](Self::hermitian_eigenvalues) with explicit tolerances.
    pub fn hermitian_eigenvalues_with(
        &self,
        tolerances: &Tolerances,
    ) -> Result<Vec<f64>, LinalgError> {
        let deviation = self.hermiticity_deviation();
        if deviation > EIGEN_INPUT_HERMITICITY {
            return Err(LinalgError::NotHermitian {
                deviation,
                tolerance: EIGEN_INPUT_HERMITICITY,
            });
        }
        let mut eigenvalues = match self.dim {
            2 => self.eigenvalues_2x2(),
            4 => self.eigenvalues_jacobi(tolerances.eigen_convergence)?,
            other => return Err(LinalgError::UnsupportedDimension(other)),
        };
        eigenvalues.sort_by(|a, b| a.total_cmp(b));
        Ok(eigenvalues)
    }

    fn eigenvalues_2x2(&self) -> Vec<f64> {
        // Pauli decomposition of the Hermitized matrix.
        let c = 0.5 * (self.get(0, 0).re + self.get(1, 1).re);
        let az = 0.5 * (self.get(0, 0).re - self.get(1, 1).re);
        let off = 0.5 * (self.get(0, 1) + self.get(1, 0).conj());
        let ax = off.re;
        let ay = -off.im;
        let r = (ax * ax + ay * ay + az * az).sqrt();
        vec![c - r, c + r]
    }

    fn eigenvalues_jacobi(&self, convergence: f64) -> Result<Vec<f64>, LinalgError> {
        let n = self.dim;
        // Hermitize once so the iteration works on an exactly Hermitian copy.
        let mut a = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let sym = 0.5 * (self.get(i, j) + self.get(j, i).conj());
                a.set(i, j, sym);
            }
        }

        for _ in 0..MAX_JACOBI_SWEEPS {
            let mut off_max = 0.0f64;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    off_max = off_max.max(a.get(p, q).norm());
                }
            }
            if off_max <= convergence {
                return Ok((0..n).map(|i| a.get(i, i).re).collect());
            }

            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = a.get(p, q);
                    let abs_apq = apq.norm();
                    if abs_apq <= convergence {
                        continue;
                    }
                    let alpha = a.get(p, p).re;
                    let gamma = a.get(q, q).re;
                    let phase = apq / abs_apq;

                    // Rotation angle that zeroes the (p, q) entry.
                    let theta = (gamma - alpha) / (2.0 * abs_apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (theta * theta + 1.0).sqrt())
                    } else {
                        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;

                    let new_pp = c * c * alpha - 2.0 * c * s * abs_apq + s * s * gamma;
                    let new_qq = s * s * alpha + 2.0 * c * s * abs_apq + c * c * gamma;
                    a.set(p, p, Complex64::new(new_pp, 0.0));
                    a.set(q, q, Complex64::new(new_qq, 0.0));
                    a.set(p, q, Complex64::new(0.0, 0.0));
                    a.set(q, p, Complex64::new(0.0, 0.0));

                    for r in 0..n {
                        if r == p || r == q {
                            continue;
                        }
                        let arp = a.get(r, p);
                        let arq = a.get(r, q);
                        let new_rp = c * arp - s * phase.conj() * arq;
                        let new_rq = s * phase * arp + c * arq;
                        a.set(r, p, new_rp);
                        a.set(p, r, new_rp.conj());
                        a.set(r, q, new_rq);
                        a.set(q, r, new_rq.conj());
                    }
                }
            }
        }
        Err(LinalgError::NoConvergence(MAX_JACOBI_SWEEPS))
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scaled(-1.0)
    }
}

/// Matrix product; panics on mismatched dimensions. Use
/// [`ComplexMatrix::matmul`] for the checked variant.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, other: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(other).expect("dimension mismatch")
    }
}
