//! Truncated Fock-space states, density matrices and ladder operators.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default truncation dimension.
pub const DEFAULT_DIM: usize = 8;

/// Smallest dimension that can hold `|0⟩, |1⟩, |2⟩`.
pub const MIN_DIM: usize = 3;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = 1e-10;

/// Normalized pure state over the photon-number basis `n = 0..dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// Normalizes `amplitudes` and wraps them.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < MIN_DIM {
            return Err(Error::DimensionTooSmall {
                dim: amplitudes.len(),
                min: MIN_DIM,
            });
        }
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amplitudes: v.unscale(norm),
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amplitudes[n]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// Pure-state fidelity `|⟨self|other⟩|²`; insensitive to global phase.
    /// States of different dimension are compared on their common support.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        let n = self.dim().min(other.dim());
        let overlap: Complex64 = (0..n)
            .map(|k| self.amplitudes[k].conj() * other.amplitudes[k])
            .sum();
        overlap.norm_sqr()
    }
}

/// Builds `(c0|0⟩ + c1|1⟩ + c2|2⟩) / norm` in a `dim`-dimensional space.
pub fn make_superposition(
    c0: Complex64,
    c1: Complex64,
    c2: Complex64,
    dim: usize,
) -> Result<StateVector> {
    if dim < MIN_DIM {
        return Err(Error::DimensionTooSmall { dim, min: MIN_DIM });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[0] = c0;
    amps[1] = c1;
    amps[2] = c2;
    StateVector::new(amps)
}

/// Hermitian, unit-trace, positive semidefinite matrix over the Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    elements: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(elements: DMatrix<Complex64>) -> Result<Self> {
        if !elements.is_square() {
            return Err(Error::InvalidDensityMatrix(format!(
                "matrix is {}x{}",
                elements.nrows(),
                elements.ncols()
            )));
        }
        let rho = Self { elements };
        let herm = rho.hermiticity_error();
        if herm.is_nan() || herm > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (max deviation {herm:e})"
            )));
        }
        let tr = rho.trace();
        if tr.is_nan() || (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}")));
        }
        let min_eig = rho.min_eigenvalue();
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(rho)
    }

    /// Wraps an integrator output without re-validating it.
    pub(crate) fn from_raw(elements: DMatrix<Complex64>) -> Self {
        Self { elements }
    }

    /// `|0⟩⟨0|` in dimension `dim`.
    pub fn vacuum(dim: usize) -> Self {
        Self::fock(0, dim)
    }

    /// `|n⟩⟨n|` in dimension `dim`.
    pub fn fock(n: usize, dim: usize) -> Self {
        assert!(n < dim, "Fock index {n} outside dimension {dim}");
        let mut m = DMatrix::zeros(dim, dim);
        m[(n, n)] = Complex64::new(1.0, 0.0);
        Self { elements: m }
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn elements(&self) -> &DMatrix<Complex64> {
        &self.elements
    }

    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.elements[(n, m)]
    }

    /// Photon-number populations `ρ_nn`.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.elements[(n, n)].re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.elements.trace().re
    }

    /// `max |ρ_nm − conj(ρ_mn)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for n in 0..d {
            for m in n..d {
                worst = worst.max((self.elements[(n, m)] - self.elements[(m, n)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.elements + self.elements.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Copy embedded into a larger (or equal) dimension, zero-padded.
    pub fn embed(&self, dim: usize) -> Self {
        assert!(dim >= self.dim());
        let mut m = DMatrix::zeros(dim, dim);
        m.view_mut((0, 0), (self.dim(), self.dim()))
            .copy_from(&self.elements);
        Self { elements: m }
    }

    /// `⟨ψ|ρ|ψ⟩` for a pure reference state.
    pub fn fidelity_with(&self, psi: &StateVector) -> f64 {
        let n = self.dim().min(psi.dim());
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += psi.amplitude(i).conj() * self.elements[(i, j)] * psi.amplitude(j);
            }
        }
        acc.re
    }
}

/// `ρ = |ψ⟩⟨ψ|`.
pub fn density_from_state(psi: &StateVector) -> DensityMatrix {
    let a = psi.amplitudes();
    DensityMatrix::from_raw(a * a.adjoint())
}

/// `Tr(op · ρ)`.
pub fn expectation(rho: &DensityMatrix, op: &DMatrix<Complex64>) -> Result<Complex64> {
    if op.nrows() != rho.dim() || op.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: op.nrows().max(op.ncols()),
        });
    }
    let d = rho.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for k in 0..d {
            acc += op[(i, k)] * rho.elements[(k, i)];
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    Lowering,
    Raising,
    Number,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderOperator {
    pub matrix: DMatrix<Complex64>,
    pub kind: LadderKind,
}

impl LadderOperator {
    pub fn new(kind: LadderKind, dim: usize) -> Self {
        let matrix = match kind {
            LadderKind::Lowering => lowering(dim),
            LadderKind::Raising => lowering(dim).adjoint(),
            LadderKind::Number => number(dim),
        };
        Self { matrix, kind }
    }
}

/// `a` with `a[n-1][n] = √n`.
pub fn lowering(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `a†`.
pub fn raising(dim: usize) -> DMatrix<Complex64> {
    lowering(dim).adjoint()
}

/// `a†a = diag(0, 1, …, dim-1)`.
pub fn number(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(i as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Photon-number parity `exp(iπ a†a) = diag(+1, -1, +1, …)`.
pub fn parity(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}
