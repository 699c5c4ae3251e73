use super::spectrum::DerivedSpectrum;
use crate::qcore::{c64, kron, pauli_z, CMatrix, C64};

/// `X rho X^dagger - {X^dagger X, rho} / 2`.
pub fn dissipator(x: &CMatrix, rho: &CMatrix) -> CMatrix {
    let xd = x.adjoint();
    let xdx = &xd * x;
    x * rho * &xd - (&xdx * rho + rho * &xdx) * c64(0.5, 0.0)
}

/// `-i [H, rho]`.
pub fn unitary_part(h: &CMatrix, rho: &CMatrix) -> CMatrix {
    (h * rho - rho * h) * c64(0.0, -1.0)
}

/// Secular zero-temperature generator: `-i[H,rho] + Gt1 L(eta1) + Gt2 L(eta2)`.
pub fn lindblad_rhs(rho: &CMatrix, spec: &DerivedSpectrum) -> CMatrix {
    let mut out = unitary_part(spec.hamiltonian.entries(), rho);
    if spec.gt1 != 0.0 {
        out += dissipator(spec.eta1.entries(), rho) * c64(spec.gt1, 0.0);
    }
    if spec.gt2 != 0.0 {
        out += dissipator(spec.eta2.entries(), rho) * c64(spec.gt2, 0.0);
    }
    out
}

/// Adds local low-frequency dephasing of `s2`: `Gamma_LF (Z2 rho Z2 - rho)`.
pub fn hybrid_rhs(rho: &CMatrix, spec: &DerivedSpectrum, gamma_lf: f64) -> CMatrix {
    let mut out = lindblad_rhs(rho, spec);
    if gamma_lf != 0.0 {
        let z2 = kron(&CMatrix::identity(2, 2), pauli_z().entries());
        out += (&z2 * rho * &z2 - rho) * c64(gamma_lf, 0.0);
    }
    out
}

/// A time-independent linear generator acting on column-major flattened
/// `dim x dim` matrices.
pub trait Generator: Sync {
    fn dim(&self) -> usize;
    fn apply_into(&self, rho: &[C64], out: &mut [C64]);
}

/// Direct evaluation of [`hybrid_rhs`]; reference path for [`Liouvillian`].
#[derive(Clone, Debug)]
pub struct MasterEquation {
    pub spectrum: DerivedSpectrum,
    pub gamma_lf: f64,
}

impl MasterEquation {
    pub fn new(spectrum: DerivedSpectrum, gamma_lf: f64) -> Self {
        Self { spectrum, gamma_lf }
    }
}

impl Generator for MasterEquation {
    fn dim(&self) -> usize {
        4
    }

    fn apply_into(&self, rho: &[C64], out: &mut [C64]) {
        let m = CMatrix::from_column_slice(4, 4, rho);
        let r = hybrid_rhs(&m, &self.spectrum, self.gamma_lf);
        out.copy_from_slice(r.as_slice());
    }
}

/// Superoperator matrix of a linear generator, assembled once by probing the
/// matrix units; each evaluation is then a dense `d^2 x d^2` matvec.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    dim: usize,
    /// Row-major `d^2 x d^2`.
    superop: Vec<C64>,
}

impl Liouvillian {
    pub fn from_generator<G: Generator + ?Sized>(g: &G) -> Self {
        let dim = g.dim();
        let n = dim * dim;
        let mut superop = vec![c64(0.0, 0.0); n * n];
        let mut unit = vec![c64(0.0, 0.0); n];
        let mut col = vec![c64(0.0, 0.0); n];
        for k in 0..n {
            unit[k] = c64(1.0, 0.0);
            g.apply_into(&unit, &mut col);
            for (row, v) in col.iter().enumerate() {
                superop[row * n + k] = *v;
            }
            unit[k] = c64(0.0, 0.0);
        }
        Self { dim, superop }
    }

    pub fn master_equation(spectrum: &DerivedSpectrum, gamma_lf: f64) -> Self {
        Self::from_generator(&MasterEquation::new(spectrum.clone(), gamma_lf))
    }
}

impl Generator for Liouvillian {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_into(&self, rho: &[C64], out: &mut [C64]) {
        let n = rho.len();
        for (row, slot) in out.iter_mut().enumerate() {
            let coeffs = &self.superop[row * n..(row + 1) * n];
            *slot = coeffs.iter().zip(rho).map(|(a, b)| a * b).sum();
        }
    }
}
