use super::{
    build_unitaries, pair_initial_states, CollisionConfig, CollisionUnitaries, E_CARRY, S1, S2,
};
use crate::error::{Error, Result};
use crate::qcore::{
    c64, check_state, concurrence_unchecked, embed, trace_distance_matrices, CMatrix,
    DensityMatrix, C64, STATE_TOL,
};
use nalgebra::{Matrix2, SMatrix};

type M8 = SMatrix<C64, 8, 8>;

/// Interval between full positivity checks of the carried state. Trace and
/// Hermiticity are checked every cycle.
const FULL_CHECK_EVERY: usize = 1000;

/// A whole cycle folded into two Kraus operators on `[s1, s2, e_carry]`.
///
/// The stage unitaries on `(s1, s2, e_n)` are multiplied into one 8x8 matrix;
/// the partial SWAP with the fresh ancilla followed by discarding `e_n` is an
/// amplitude-damping-like channel `e_n -> e_{n+1}` with Kraus operators
/// `<k|_{e_n} U_swap |0>_{e_{n+1}}`.
#[derive(Clone, Debug)]
pub struct CollisionEngine {
    kraus: [M8; 2],
}

fn to_m8(m: &CMatrix) -> M8 {
    M8::from_fn(|i, j| m[(i, j)])
}

impl CollisionEngine {
    pub fn new(cfg: &CollisionConfig) -> Result<Self> {
        Ok(Self::from_unitaries(&build_unitaries(cfg)?))
    }

    pub fn from_unitaries(u: &CollisionUnitaries) -> Self {
        let fused = embed(u.u_free.entries(), 0, 3)
            * embed(u.u_s2e.entries(), 1, 3)
            * embed(u.u_s1s2.entries(), 0, 3);
        let sw = u.u_swap.entries();
        // Register order of the swap is (e_n, e_{n+1}): row index 2k + b, column 2c + 0.
        let k = |k: usize| Matrix2::from_fn(|b, c| sw[(2 * k + b, 2 * c)]);
        let lift = |k2: Matrix2<C64>| {
            let k2 = CMatrix::from_fn(2, 2, |i, j| k2[(i, j)]);
            to_m8(&(embed(&k2, 2, 3) * &fused))
        };
        Self {
            kraus: [lift(k(0)), lift(k(1))],
        }
    }

    #[inline]
    fn apply(&self, rho: &M8) -> M8 {
        let a = self.kraus[0] * rho * self.kraus[0].adjoint();
        let b = self.kraus[1] * rho * self.kraus[1].adjoint();
        a + b
    }

    /// Runs `n` cycles from `rho0` over `[s1, s2]` (ancilla starts in `|0>`),
    /// passing the carried state after every cycle to `observe`.
    fn drive<F>(&self, rho0: &DensityMatrix, n: usize, mut observe: F) -> Result<()>
    where
        F: FnMut(usize, &M8),
    {
        let mut rho = initial_carry(rho0)?;
        for cycle in 1..=n {
            rho = self.apply(&rho);
            check_cheap(&rho, cycle)?;
            if cycle % FULL_CHECK_EVERY == 0 || cycle == n {
                check_full(&rho, cycle)?;
            }
            observe(cycle, &rho);
        }
        Ok(())
    }
}

fn initial_carry(rho0: &DensityMatrix) -> Result<M8> {
    if rho0.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            found: rho0.dim(),
        });
    }
    rho0.check(STATE_TOL)?;
    let mut anc = CMatrix::zeros(2, 2);
    anc[(0, 0)] = c64(1.0, 0.0);
    Ok(to_m8(&rho0.entries().kronecker(&anc)))
}

fn check_cheap(rho: &M8, cycle: usize) -> Result<()> {
    let tr: C64 = (0..8).map(|i| rho[(i, i)]).sum();
    let mut herm = 0.0f64;
    for i in 0..8 {
        for j in i..8 {
            herm = herm.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
        }
    }
    if (tr - c64(1.0, 0.0)).norm() > STATE_TOL || herm > STATE_TOL {
        return Err(Error::InvariantViolation {
            step: cycle,
            detail: format!("trace {tr}, hermiticity defect {herm:e}"),
        });
    }
    Ok(())
}

fn check_full(rho: &M8, cycle: usize) -> Result<()> {
    let m = CMatrix::from_fn(8, 8, |i, j| rho[(i, j)]);
    check_state(&m, STATE_TOL).map_err(|e| Error::InvariantViolation {
        step: cycle,
        detail: e.to_string(),
    })
}

fn reduced_s1(rho: &M8) -> [[C64; 2]; 2] {
    let mut out = [[c64(0.0, 0.0); 2]; 2];
    for (a, row) in out.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            *slot = (0..4).map(|x| rho[(a * 4 + x, b * 4 + x)]).sum();
        }
    }
    out
}

fn sx1(rho: &M8) -> f64 {
    2.0 * reduced_s1(rho)[0][1].re
}

fn sx2(rho: &M8) -> f64 {
    let mut acc = c64(0.0, 0.0);
    for i in 0..2 {
        for k in 0..2 {
            acc += rho[(i * 4 + k, i * 4 + 2 + k)];
        }
    }
    2.0 * acc.re
}

fn s1_matrix(rho: &M8) -> CMatrix {
    let r = reduced_s1(rho);
    CMatrix::from_row_slice(2, 2, &[r[0][0], r[0][1], r[1][0], r[1][1]])
}

/// `sigma_x` expectations of both qubits, one sample per completed cycle.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CollisionSeries {
    pub sx1: Vec<f64>,
    pub sx2: Vec<f64>,
}

pub fn run(cfg: &CollisionConfig, rho0: &DensityMatrix) -> Result<CollisionSeries> {
    let engine = CollisionEngine::new(cfg)?;
    let n = cfg.n_collisions;
    let mut out = CollisionSeries {
        sx1: Vec::with_capacity(n),
        sx2: Vec::with_capacity(n),
    };
    engine.drive(rho0, n, |_, rho| {
        out.sx1.push(sx1(rho));
        out.sx2.push(sx2(rho));
    })?;
    Ok(out)
}

/// As [`run`], also keeping the reduced `s1` state of every cycle.
pub fn run_states(
    cfg: &CollisionConfig,
    rho0: &DensityMatrix,
) -> Result<(CollisionSeries, Vec<DensityMatrix>)> {
    let engine = CollisionEngine::new(cfg)?;
    let n = cfg.n_collisions;
    let mut series = CollisionSeries::default();
    let mut states = Vec::with_capacity(n);
    engine.drive(rho0, n, |_, rho| {
        series.sx1.push(sx1(rho));
        series.sx2.push(sx2(rho));
        states.push(DensityMatrix::from_trusted(s1_matrix(rho), vec![S1.into()]));
    })?;
    Ok((series, states))
}

/// Hands the full carried `[s1, s2, e_carry]` state of every cycle to `observe`.
pub fn run_with<F>(cfg: &CollisionConfig, rho0: &DensityMatrix, mut observe: F) -> Result<()>
where
    F: FnMut(usize, &DensityMatrix),
{
    let engine = CollisionEngine::new(cfg)?;
    let labels: Vec<String> = [S1, S2, E_CARRY].iter().map(|s| s.to_string()).collect();
    engine.drive(rho0, cfg.n_collisions, |n, rho| {
        let m = CMatrix::from_fn(8, 8, |i, j| rho[(i, j)]);
        observe(n, &DensityMatrix::from_trusted(m, labels.clone()));
    })
}

/// Trace distance between the `s1` marginals of the two pair runs.
#[derive(Clone, Debug, PartialEq)]
pub struct PairRun {
    /// `N + 1` values; index 0 is the initial pair.
    pub distances: Vec<f64>,
}

pub fn run_pair(cfg: &CollisionConfig) -> Result<PairRun> {
    let engine = CollisionEngine::new(cfg)?;
    let (p0, m0) = pair_initial_states();
    let n = cfg.n_collisions;
    let mut a = initial_carry(&p0)?;
    let mut b = initial_carry(&m0)?;
    let mut distances = Vec::with_capacity(n + 1);
    distances.push(trace_distance_matrices(&s1_matrix(&a), &s1_matrix(&b)));
    for cycle in 1..=n {
        a = engine.apply(&a);
        b = engine.apply(&b);
        check_cheap(&a, cycle)?;
        check_cheap(&b, cycle)?;
        if cycle % FULL_CHECK_EVERY == 0 || cycle == n {
            check_full(&a, cycle)?;
            check_full(&b, cycle)?;
        }
        distances.push(trace_distance_matrices(&s1_matrix(&a), &s1_matrix(&b)));
    }
    Ok(PairRun { distances })
}

/// Concurrence between a spectator ancilla `a1` and `s1`, prepared in
/// `(|00> + |11>)/sqrt 2` with `s2` and the environment in the ground state.
#[derive(Clone, Debug, PartialEq)]
pub struct EntanglementRun {
    /// `N + 1` values; index 0 is the initial Bell state.
    pub concurrence: Vec<f64>,
}

/// The spectator never interacts, so the `[a1, s1, s2, e]` state is kept as
/// its 2x2 block structure in `a1`, each block evolving under the same map.
pub fn run_entanglement(cfg: &CollisionConfig) -> Result<EntanglementRun> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = DensityMatrix::from_real_pure(&[h, 0.0, 0.0, h], ["a1", S1])?;
    run_entanglement_from(cfg, &bell)
}

/// As [`run_entanglement`] from an arbitrary initial `[a1, s1]` state.
pub fn run_entanglement_from(
    cfg: &CollisionConfig,
    joint0: &DensityMatrix,
) -> Result<EntanglementRun> {
    if joint0.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            found: joint0.dim(),
        });
    }
    joint0.check(STATE_TOL)?;
    let engine = CollisionEngine::new(cfg)?;
    let n = cfg.n_collisions;
    let j0 = joint0.entries();
    let block = |a: usize, b: usize| {
        let mut m = M8::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m[(i * 4, j * 4)] = j0[(a * 2 + i, b * 2 + j)];
            }
        }
        m
    };
    let (mut b00, mut b01, mut b11) = (block(0, 0), block(0, 1), block(1, 1));
    let joint = |b00: &M8, b01: &M8, b11: &M8| {
        let blocks = [[*b00, *b01], [b01.adjoint(), *b11]];
        CMatrix::from_fn(4, 4, |r, c| {
            let (a, i) = (r / 2, r % 2);
            let (b, j) = (c / 2, c % 2);
            (0..4).map(|x| blocks[a][b][(i * 4 + x, j * 4 + x)]).sum()
        })
    };
    let mut concurrence = Vec::with_capacity(n + 1);
    concurrence.push(concurrence_unchecked(&joint(&b00, &b01, &b11)));
    for cycle in 1..=n {
        b00 = engine.apply(&b00);
        b01 = engine.apply(&b01);
        b11 = engine.apply(&b11);
        let m = joint(&b00, &b01, &b11);
        if cycle % FULL_CHECK_EVERY == 0 || cycle == n {
            check_state(&m, STATE_TOL).map_err(|e| Error::InvariantViolation {
                step: cycle,
                detail: e.to_string(),
            })?;
        }
        concurrence.push(concurrence_unchecked(&m));
    }
    Ok(EntanglementRun { concurrence })
}
