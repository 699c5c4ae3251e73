//! Repeated-interaction model: `s1 - s2 - e_n`, then a partial SWAP between
//! consecutive ancillas before the older one is discarded.

mod engine;

pub use engine::{
    run, run_entanglement, run_entanglement_from, run_pair, run_states, run_with, CollisionEngine,
    CollisionSeries, EntanglementRun, PairRun,
};

use crate::error::{Error, Result};
use crate::qcore::{
    c64, check_state, conjugate_local, expectation, kron, partial_trace, pauli_x, tensor, CMatrix,
    DensityMatrix, Operator, STATE_TOL,
};
use std::f64::consts::FRAC_PI_2;

pub const S1: &str = "s1";
pub const S2: &str = "s2";
pub const E_CARRY: &str = "e_carry";
pub const E_NEXT: &str = "e_next";

/// Couplings, stage durations and SWAP strength of the collision cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct CollisionConfig {
    pub omega1: f64,
    pub omega2: f64,
    /// `s1`-`s2` coupling.
    pub lambda: f64,
    /// `s2`-ancilla coupling.
    pub j: f64,
    /// Partial-SWAP angle in `[0, pi/2]`.
    pub gamma: f64,
    pub dt_s: f64,
    pub dt_s1s2: f64,
    pub dt_s2e: f64,
    pub n_collisions: usize,
}

impl Default for CollisionConfig {
    fn default() -> Self {
        Self {
            omega1: 1.0,
            omega2: 1.0,
            lambda: 0.1,
            j: 1.0,
            gamma: 0.0,
            dt_s: 0.2,
            dt_s1s2: 0.2,
            dt_s2e: 0.1,
            n_collisions: 10_000,
        }
    }
}

impl CollisionConfig {
    pub fn new(omega1: f64, lambda: f64, gamma: f64) -> Self {
        Self {
            omega1,
            lambda,
            gamma,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("lambda", self.lambda),
            ("j", self.j),
            ("gamma", self.gamma),
            ("dt_s", self.dt_s),
            ("dt_s1s2", self.dt_s1s2),
            ("dt_s2e", self.dt_s2e),
        ];
        for (k, v) in finite {
            if !v.is_finite() {
                return Err(Error::config(k, "must be finite"));
            }
        }
        if self.omega2 != 1.0 {
            return Err(Error::config("omega2", "is the energy unit and must be 1"));
        }
        if self.omega1 <= 0.0 {
            return Err(Error::config("omega1", "must be > 0"));
        }
        if self.lambda < 0.0 {
            return Err(Error::config("lambda", "must be >= 0"));
        }
        if self.j < 0.0 {
            return Err(Error::config("j", "must be >= 0"));
        }
        if !(0.0..=FRAC_PI_2 + 1e-12).contains(&self.gamma) {
            return Err(Error::config("swap_gamma", "must lie in [0, pi/2]"));
        }
        for (k, v) in [
            ("dt_s", self.dt_s),
            ("dt_s1s2", self.dt_s1s2),
            ("dt_s2e", self.dt_s2e),
        ] {
            if v < 0.0 {
                return Err(Error::config(k, "must be >= 0"));
            }
        }
        if self.n_collisions == 0 {
            return Err(Error::config("n_collisions", "must be >= 1"));
        }
        Ok(())
    }
}

/// The four two-qubit unitaries of one cycle.
#[derive(Clone, Debug)]
pub struct CollisionUnitaries {
    pub u_s1s2: Operator,
    pub u_s2e: Operator,
    pub u_free: Operator,
    pub u_swap: Operator,
}

/// `exp(-i g/2 (XX + YY) t)`: rotation inside the `|01>, |10>` block.
fn exchange(g: f64, t: f64) -> Operator {
    let (s, c) = (g * t).sin_cos();
    let mut m = CMatrix::identity(4, 4);
    m[(1, 1)] = c64(c, 0.0);
    m[(2, 2)] = c64(c, 0.0);
    m[(1, 2)] = c64(0.0, -s);
    m[(2, 1)] = c64(0.0, -s);
    Operator::trusted_unitary(m)
}

pub fn build_unitaries(cfg: &CollisionConfig) -> Result<CollisionUnitaries> {
    cfg.validate()?;
    let phase = |z1: f64, z2: f64| {
        let e = 0.5 * (cfg.omega1 * z1 + cfg.omega2 * z2) * cfg.dt_s;
        crate::qcore::C64::from_polar(1.0, e)
    };
    let mut free = CMatrix::zeros(4, 4);
    free[(0, 0)] = phase(1.0, 1.0);
    free[(1, 1)] = phase(1.0, -1.0);
    free[(2, 2)] = phase(-1.0, 1.0);
    free[(3, 3)] = phase(-1.0, -1.0);

    let (s, c) = cfg.gamma.sin_cos();
    let swap = CMatrix::identity(4, 4) * c64(c, 0.0) + crate::qcore::swap().entries() * c64(0.0, s);

    Ok(CollisionUnitaries {
        u_s1s2: exchange(cfg.lambda, cfg.dt_s1s2),
        u_s2e: exchange(cfg.j, cfg.dt_s2e),
        u_free: Operator::trusted_unitary(free),
        u_swap: Operator::unitary(swap)?,
    })
}

/// Carried state over `[s1, s2, e_carry]` plus the number of completed cycles.
#[derive(Clone, Debug)]
pub struct CollisionState {
    pub rho: DensityMatrix,
    pub cycles: usize,
}

impl CollisionState {
    /// Adjoins a ground-state ancilla to a `[s1, s2]` state.
    pub fn new(rho_s1s2: &DensityMatrix) -> Result<Self> {
        if rho_s1s2.dim() != 4 {
            return Err(Error::Dimension {
                expected: 4,
                found: rho_s1s2.dim(),
            });
        }
        let sys = rho_s1s2.clone().relabel([S1, S2])?;
        let anc = ground_ancilla(E_CARRY);
        Ok(Self {
            rho: tensor(&sys, &anc),
            cycles: 0,
        })
    }
}

pub fn ground_ancilla(label: &str) -> DensityMatrix {
    DensityMatrix::basis(0, [label]).expect("single qubit")
}

/// Observables recorded after a cycle.
#[derive(Clone, Debug)]
pub struct Readouts {
    pub sx1: f64,
    pub sx2: f64,
    pub rho_s1: DensityMatrix,
}

/// One literal cycle on the 16-dimensional `[s1, s2, e_carry, e_next]` space.
pub fn step(
    state: &CollisionState,
    u: &CollisionUnitaries,
    fresh: &DensityMatrix,
) -> Result<(CollisionState, Readouts)> {
    step_variant(state, u, fresh, StageVariant::default())
}

/// Knobs for checking properties of the literal cycle.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct StageVariant {
    pub swap_before_free: bool,
    pub skip_swap: bool,
}

pub(crate) fn step_variant(
    state: &CollisionState,
    u: &CollisionUnitaries,
    fresh: &DensityMatrix,
    variant: StageVariant,
) -> Result<(CollisionState, Readouts)> {
    if fresh.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: fresh.dim(),
        });
    }
    let fresh = fresh.clone().relabel([E_NEXT])?;
    let joint = tensor(&state.rho, &fresh);
    let mut m = joint.into_entries();
    conjugate_local(&mut m, u.u_s1s2.entries(), 0, 4);
    conjugate_local(&mut m, u.u_s2e.entries(), 1, 4);
    if variant.swap_before_free {
        if !variant.skip_swap {
            conjugate_local(&mut m, u.u_swap.entries(), 2, 4);
        }
        conjugate_local(&mut m, u.u_free.entries(), 0, 4);
    } else {
        conjugate_local(&mut m, u.u_free.entries(), 0, 4);
        if !variant.skip_swap {
            conjugate_local(&mut m, u.u_swap.entries(), 2, 4);
        }
    }
    let cycle = state.cycles + 1;
    check_state(&m, STATE_TOL).map_err(|e| Error::InvariantViolation {
        step: cycle,
        detail: e.to_string(),
    })?;
    let joint = DensityMatrix::from_trusted(
        m,
        [S1, S2, E_CARRY, E_NEXT]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    let rho = partial_trace(&joint, &[S1, S2, E_NEXT])?.relabel([S1, S2, E_CARRY])?;
    let readouts = readouts(&rho)?;
    Ok((CollisionState { rho, cycles: cycle }, readouts))
}

fn readouts(rho: &DensityMatrix) -> Result<Readouts> {
    let sys = partial_trace(rho, &[S1, S2])?;
    let id = CMatrix::identity(2, 2);
    let x = pauli_x();
    let x1 = Operator::new(kron(x.entries(), &id));
    let x2 = Operator::new(kron(&id, x.entries()));
    Ok(Readouts {
        sx1: expectation(&sys, &x1)?,
        sx2: expectation(&sys, &x2)?,
        rho_s1: partial_trace(rho, &[S1])?,
    })
}

/// `(|0> + |1>) (x) (|0> - |1>) / 2`.
pub fn default_initial_state() -> DensityMatrix {
    DensityMatrix::from_real_pure(&[0.5, -0.5, 0.5, -0.5], [S1, S2]).expect("normalized ket")
}

/// `(|0> +- |1>)/sqrt 2 (x) |0>`; `s2` starts in the ground state of `-omega/2 sigma_z`.
pub fn pair_initial_states() -> (DensityMatrix, DensityMatrix) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (
        DensityMatrix::from_real_pure(&[h, 0.0, h, 0.0], [S1, S2]).expect("normalized ket"),
        DensityMatrix::from_real_pure(&[h, 0.0, -h, 0.0], [S1, S2]).expect("normalized ket"),
    )
}
