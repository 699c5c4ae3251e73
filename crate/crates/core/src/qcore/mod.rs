//! Dense small-matrix quantum utilities shared by both dynamics engines.
//!
//! Composite bases follow label order with the leftmost subsystem slowest, and
//! `|0>` is the `+1` eigenstate of `sigma_z`. Every subsystem is a qubit, so a
//! state carrying `k` labels has dimension `2^k`.

mod gates;
mod ops;

pub use gates::{
    basis_projector, conjugate_local, embed, identity, pauli_x, pauli_y, pauli_z, sigma_minus,
    sigma_plus, swap,
};
pub use ops::{
    apply_unitary, concurrence, expectation, kron, partial_trace, tensor, trace_distance, Tensor,
};
pub(crate) use ops::{concurrence_unchecked, trace_distance_matrices};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Tolerance for the Hermiticity, unit-trace and positivity checks.
pub const STATE_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Eigen-decomposition `m = V diag(w) V^dagger` of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Largest entrywise modulus of `m - m^dagger`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(m + m^dagger) / 2`, in place.
pub fn symmetrize(m: &mut CMatrix) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = c64(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

fn trace_of(m: &CMatrix) -> C64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// Checks the three density-matrix invariants with tolerance `tol`.
pub fn check_state(m: &CMatrix, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Validation(format!(
            "density matrix must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let herm = hermiticity_defect(m);
    if herm > tol {
        return Err(Error::Validation(format!(
            "not Hermitian (defect {herm:.3e})"
        )));
    }
    let tr = trace_of(m);
    if (tr - C64::new(1.0, 0.0)).norm() > tol {
        return Err(Error::Validation(format!(
            "trace is {:.12} (expected 1)",
            tr.re
        )));
    }
    let mut h = m.clone();
    symmetrize(&mut h);
    let min = hermitian_eigenvalues(&h)[0];
    if min < -tol {
        return Err(Error::Validation(format!(
            "not positive semidefinite (min eigenvalue {min:.3e})"
        )));
    }
    Ok(())
}

/// A qubit-register density matrix with ordered subsystem labels.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    labels: Vec<String>,
}

fn collect_labels<I, S>(labels: I) -> Vec<String>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    labels.into_iter().map(Into::into).collect()
}

fn check_dim(dim: usize, labels: &[String]) -> Result<()> {
    let expected = 1usize << labels.len();
    if dim != expected {
        return Err(Error::Dimension {
            expected,
            found: dim,
        });
    }
    Ok(())
}

impl DensityMatrix {
    /// Validated constructor.
    pub fn new<I, S>(entries: CMatrix, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels = collect_labels(labels);
        check_dim(entries.nrows(), &labels)?;
        check_state(&entries, STATE_TOL)?;
        Ok(Self { entries, labels })
    }

    /// Skips validation; for states produced by maps that preserve the invariants.
    pub(crate) fn from_trusted(entries: CMatrix, labels: Vec<String>) -> Self {
        debug_assert_eq!(entries.nrows(), 1usize << labels.len());
        Self { entries, labels }
    }

    /// `|psi><psi|` for the (normalized on entry) amplitude vector `psi`.
    pub fn from_pure<I, S>(amplitudes: &[C64], labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels = collect_labels(labels);
        check_dim(amplitudes.len(), &labels)?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Validation("zero or non-finite state vector".into()));
        }
        let n = amplitudes.len();
        let entries = CMatrix::from_fn(n, n, |i, j| {
            amplitudes[i] * amplitudes[j].conj() / (norm * norm)
        });
        Ok(Self { entries, labels })
    }

    /// Pure state from real amplitudes.
    pub fn from_real_pure<I, S>(amplitudes: &[f64], labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let amps: Vec<C64> = amplitudes.iter().map(|&a| c64(a, 0.0)).collect();
        Self::from_pure(&amps, labels)
    }

    /// Computational basis projector `|index><index|`.
    pub fn basis<I, S>(index: usize, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels = collect_labels(labels);
        let dim = 1usize << labels.len();
        if index >= dim {
            return Err(Error::Validation(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut entries = CMatrix::zeros(dim, dim);
        entries[(index, index)] = c64(1.0, 0.0);
        Ok(Self { entries, labels })
    }

    pub fn maximally_mixed<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels = collect_labels(labels);
        let dim = 1usize << labels.len();
        let entries = CMatrix::identity(dim, dim) * c64(1.0 / dim as f64, 0.0);
        Self { entries, labels }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn trace(&self) -> C64 {
        trace_of(&self.entries)
    }

    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.entries[(i, j)] * self.entries[(j, i)]).re;
            }
        }
        acc
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let mut h = self.entries.clone();
        symmetrize(&mut h);
        hermitian_eigenvalues(&h)[0]
    }

    /// Re-checks all three invariants at tolerance `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        check_state(&self.entries, tol)
    }

    /// Same state with different subsystem tags.
    pub fn relabel<I, S>(self, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels = collect_labels(labels);
        check_dim(self.dim(), &labels)?;
        Ok(Self {
            entries: self.entries,
            labels,
        })
    }
}

/// A square operator; `unitary` records that `U^dagger U = I` was verified.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    entries: CMatrix,
    unitary: bool,
}

impl Operator {
    pub fn new(entries: CMatrix) -> Self {
        assert_eq!(entries.nrows(), entries.ncols(), "operator must be square");
        Self {
            entries,
            unitary: false,
        }
    }

    /// Checks unitarity to `STATE_TOL` and sets the flag.
    pub fn unitary(entries: CMatrix) -> Result<Self> {
        let op = Self::new(entries);
        let defect = op.unitarity_defect();
        if defect > STATE_TOL {
            return Err(Error::Validation(format!(
                "operator is not unitary (defect {defect:.3e})"
            )));
        }
        Ok(Self {
            unitary: true,
            ..op
        })
    }

    pub(crate) fn trusted_unitary(entries: CMatrix) -> Self {
        Self {
            entries,
            unitary: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// Max entry of `|U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let prod = self.entries.adjoint() * &self.entries;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - c64(target, 0.0)).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        hermiticity_defect(&self.entries) <= tol
    }

    pub fn dagger(&self) -> Operator {
        Operator {
            entries: self.entries.adjoint(),
            unitary: self.unitary,
        }
    }

    pub fn compose(&self, rhs: &Operator) -> Operator {
        Operator {
            entries: &self.entries * &rhs.entries,
            unitary: self.unitary && rhs.unitary,
        }
    }
}

/// Two states of the same register, e.g. the pair whose distinguishability
/// is tracked by the trace-distance measure.
#[derive(Clone, Debug, PartialEq)]
pub struct StatePair {
    pub a: DensityMatrix,
    pub b: DensityMatrix,
}

impl StatePair {
    pub fn new(a: DensityMatrix, b: DensityMatrix) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::Dimension {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        if a.labels() != b.labels() {
            return Err(Error::Validation(format!(
                "pair labels differ: {:?} vs {:?}",
                a.labels(),
                b.labels()
            )));
        }
        Ok(Self { a, b })
    }

    pub fn distance(&self) -> f64 {
        trace_distance_matrices(self.a.entries(), self.b.entries())
    }
}
