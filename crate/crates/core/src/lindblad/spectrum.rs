use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::qcore::{c64, kron, pauli_z, sigma_minus, sigma_plus, CMatrix, Operator, C64};

/// Shape of the bath spectral density seen by `s2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralDensity {
    /// `Gamma_1 = Gamma_2 = Gamma_0`.
    Flat,
    /// `J(w) = Gamma_0 * w`; the exponential cutoff is taken to infinity.
    Ohmic,
}

/// Physical parameters of the master-equation model, in units of `omega2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemParams {
    pub omega1: f64,
    /// Energy scale, always 1.
    pub omega2: f64,
    pub lambda: f64,
    /// `Gamma` for the flat spectrum, the Ohmic prefactor `Gamma_0` otherwise.
    pub gamma0: f64,
    pub gamma_lf: f64,
    pub spectrum: SpectralDensity,
    /// Ohmic cutoff `omega_c`; recorded but not used by the dynamics.
    pub cutoff: f64,
}

impl SystemParams {
    pub fn flat(omega1: f64, lambda: f64, gamma: f64) -> Self {
        Self {
            omega1,
            omega2: 1.0,
            lambda,
            gamma0: gamma,
            gamma_lf: 0.0,
            spectrum: SpectralDensity::Flat,
            cutoff: f64::INFINITY,
        }
    }

    pub fn ohmic(omega1: f64, lambda: f64, gamma0: f64, gamma_lf: f64) -> Self {
        Self {
            omega1,
            omega2: 1.0,
            lambda,
            gamma0,
            gamma_lf,
            spectrum: SpectralDensity::Ohmic,
            cutoff: f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega2 != 1.0 {
            return Err(Error::config("omega2", "must be exactly 1 (energy scale)"));
        }
        if !self.omega1.is_finite() || self.omega1 <= 0.0 {
            return Err(Error::config("omega1", "must be a positive finite number"));
        }
        for (key, v) in [
            ("lambda", self.lambda),
            ("gamma", self.gamma0),
            ("gamma_lf", self.gamma_lf),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::config(key, format!("must be >= 0, got {v}")));
            }
        }
        if !(self.cutoff > 0.0) {
            return Err(Error::config("cutoff", "must be > 0"));
        }
        Ok(())
    }
}

/// Quantities derived from diagonalizing the two-qubit Hamiltonian.
#[derive(Clone, Debug)]
pub struct DerivedSpectrum {
    /// Mixing angle `1/2 atan(2 lambda / (omega1 - omega2))`, `pi/4` at resonance.
    pub theta: f64,
    /// Splitting of the single-excitation doublet, `sqrt(Delta^2 + 4 lambda^2)`.
    pub r: f64,
    pub omega0: f64,
    /// `(omega0 - R) / 2`.
    pub e1: f64,
    /// `(omega0 + R) / 2`.
    pub e2: f64,
    /// Transition frequency of `eta_1` (vacuum to `|theta>`).
    pub freq1: f64,
    /// Transition frequency of `eta_2` (vacuum to `|theta_perp>`).
    pub freq2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// `Gamma_1 sin^2(theta)`.
    pub gt1: f64,
    /// `Gamma_2 cos^2(theta)`.
    pub gt2: f64,
    pub eta1: Operator,
    pub eta2: Operator,
    pub hamiltonian: Operator,
}

impl DerivedSpectrum {
    pub fn sin2(&self) -> f64 {
        self.theta.sin().powi(2)
    }

    pub fn cos2(&self) -> f64 {
        self.theta.cos().powi(2)
    }
}

// Computational indices of the two-qubit register with |0> = spin up.
pub(crate) const UP_UP: usize = 0;
pub(crate) const UP_DOWN: usize = 1;
pub(crate) const DOWN_UP: usize = 2;
pub(crate) const DOWN_DOWN: usize = 3;

fn ket(entries: &[(usize, f64)]) -> Vec<C64> {
    let mut v = vec![c64(0.0, 0.0); 4];
    for &(i, a) in entries {
        v[i] = c64(a, 0.0);
    }
    v
}

pub(crate) fn outer(a: &[C64], b: &[C64]) -> CMatrix {
    CMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
}

/// `|theta>`, `|theta_perp>` in the computational basis.
pub(crate) fn doublet(theta: f64) -> (Vec<C64>, Vec<C64>) {
    let (s, c) = theta.sin_cos();
    (
        ket(&[(UP_DOWN, c), (DOWN_UP, s)]),
        ket(&[(UP_DOWN, -s), (DOWN_UP, c)]),
    )
}

pub fn mixing_angle(omega1: f64, omega2: f64, lambda: f64) -> f64 {
    let delta = omega1 - omega2;
    if delta == 0.0 {
        FRAC_PI_4
    } else {
        0.5 * (2.0 * lambda / delta).atan()
    }
}

/// `omega1/2 Z(x)I + omega2/2 I(x)Z + lambda (s+ s- + s- s+)`.
pub fn system_hamiltonian(params: &SystemParams) -> Operator {
    let z = pauli_z();
    let id = CMatrix::identity(2, 2);
    let (sp, sm) = (sigma_plus(), sigma_minus());
    let h = kron(z.entries(), &id) * c64(params.omega1 / 2.0, 0.0)
        + kron(&id, z.entries()) * c64(params.omega2 / 2.0, 0.0)
        + (kron(sp.entries(), sm.entries()) + kron(sm.entries(), sp.entries()))
            * c64(params.lambda, 0.0);
    Operator::new(h)
}

pub fn derive_spectrum(params: &SystemParams) -> Result<DerivedSpectrum> {
    params.validate()?;
    let delta = params.omega1 - params.omega2;
    let theta = mixing_angle(params.omega1, params.omega2, params.lambda);
    let r = (delta * delta + 4.0 * params.lambda * params.lambda).sqrt();
    let omega0 = params.omega1 + params.omega2;
    // Energy of |theta> measured from the centre of the doublet: +-R/2.
    let eps_theta = 0.5 * delta * (2.0 * theta).cos() + params.lambda * (2.0 * theta).sin();
    let freq1 = 0.5 * omega0 + eps_theta;
    let freq2 = 0.5 * omega0 - eps_theta;
    let (gamma1, gamma2) = match params.spectrum {
        SpectralDensity::Flat => (params.gamma0, params.gamma0),
        SpectralDensity::Ohmic => (params.gamma0 * freq1, params.gamma0 * freq2),
    };
    let (s2, c2) = (theta.sin().powi(2), theta.cos().powi(2));

    let (th, th_perp) = doublet(theta);
    let vac = ket(&[(DOWN_DOWN, 1.0)]);
    let both = ket(&[(UP_UP, 1.0)]);
    let eta1_dag = outer(&th, &vac) - outer(&both, &th_perp);
    let eta2_dag = outer(&th_perp, &vac) + outer(&both, &th);

    Ok(DerivedSpectrum {
        theta,
        r,
        omega0,
        e1: 0.5 * (omega0 - r),
        e2: 0.5 * (omega0 + r),
        freq1,
        freq2,
        gamma1,
        gamma2,
        gt1: gamma1 * s2,
        gt2: gamma2 * c2,
        eta1: Operator::new(eta1_dag.adjoint()),
        eta2: Operator::new(eta2_dag.adjoint()),
        hamiltonian: system_hamiltonian(params),
    })
}
