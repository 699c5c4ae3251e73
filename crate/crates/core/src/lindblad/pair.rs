use super::integrate::{integrate_with, IntegrationOptions};
use super::rhs::Liouvillian;
use super::spectrum::DerivedSpectrum;
use crate::error::Result;
use crate::qcore::{
    c64, expectation, kron, partial_trace, pauli_x, trace_distance_matrices, DensityMatrix,
    Operator,
};
use std::f64::consts::FRAC_1_SQRT_2;

/// `(|0> +- |1>)/sqrt 2 (x) |1>` over `[s1, s2]`: `s2` starts in its ground state.
pub fn pair_initial_states() -> (DensityMatrix, DensityMatrix) {
    let make = |sign: f64| {
        let amp = [
            c64(0.0, 0.0),
            c64(FRAC_1_SQRT_2, 0.0),
            c64(0.0, 0.0),
            c64(sign * FRAC_1_SQRT_2, 0.0),
        ];
        DensityMatrix::from_pure(&amp, ["s1", "s2"]).expect("normalized ket")
    };
    (make(1.0), make(-1.0))
}

/// `(|0> + |1>) (x) (|0> - |1>) / 2`.
pub fn sync_initial_state() -> DensityMatrix {
    DensityMatrix::from_real_pure(&[0.5, -0.5, 0.5, -0.5], ["s1", "s2"]).expect("normalized ket")
}

/// Reduced `s1` trajectories of the two pair members and their trace distance.
#[derive(Clone, Debug)]
pub struct PairTrajectory {
    pub times: Vec<f64>,
    pub plus: Vec<DensityMatrix>,
    pub minus: Vec<DensityMatrix>,
    pub distances: Vec<f64>,
}

pub fn evolve_pair_states(
    spec: &DerivedSpectrum,
    gamma_lf: f64,
    opts: &IntegrationOptions,
) -> Result<PairTrajectory> {
    let gen = Liouvillian::master_equation(spec, gamma_lf);
    let (p0, m0) = pair_initial_states();
    let mut out = PairTrajectory {
        times: Vec::with_capacity(opts.n_samples()),
        plus: Vec::with_capacity(opts.n_samples()),
        minus: Vec::with_capacity(opts.n_samples()),
        distances: Vec::new(),
    };
    integrate_with(&gen, &p0, opts, |t, rho| {
        out.times.push(t);
        out.plus
            .push(partial_trace(rho, &["s1"]).expect("s1 present"));
    })?;
    integrate_with(&gen, &m0, opts, |_, rho| {
        out.minus
            .push(partial_trace(rho, &["s1"]).expect("s1 present"));
    })?;
    out.distances = out
        .plus
        .iter()
        .zip(&out.minus)
        .map(|(a, b)| trace_distance_matrices(a.entries(), b.entries()))
        .collect();
    Ok(out)
}

/// Only the trace-distance series, without storing states.
pub fn pair_distance_series(
    spec: &DerivedSpectrum,
    gamma_lf: f64,
    opts: &IntegrationOptions,
) -> Result<Vec<f64>> {
    let gen = Liouvillian::master_equation(spec, gamma_lf);
    let (p0, m0) = pair_initial_states();
    let mut plus = Vec::with_capacity(opts.n_samples());
    integrate_with(&gen, &p0, opts, |_, rho| {
        plus.push(
            partial_trace(rho, &["s1"])
                .expect("s1 present")
                .into_entries(),
        );
    })?;
    let mut dist = Vec::with_capacity(plus.len());
    let mut k = 0;
    integrate_with(&gen, &m0, opts, |_, rho| {
        let m = partial_trace(rho, &["s1"]).expect("s1 present");
        dist.push(trace_distance_matrices(&plus[k], m.entries()));
        k += 1;
    })?;
    Ok(dist)
}

/// Local `sigma_x` expectations of both qubits along a trajectory.
#[derive(Clone, Debug, Default)]
pub struct SyncObservables {
    pub times: Vec<f64>,
    pub sx1: Vec<f64>,
    pub sx2: Vec<f64>,
}

pub fn local_sigma_x() -> (Operator, Operator) {
    let x = pauli_x();
    let id = crate::qcore::identity(2);
    (
        Operator::new(kron(x.entries(), id.entries())),
        Operator::new(kron(id.entries(), x.entries())),
    )
}

pub fn sync_observables(
    spec: &DerivedSpectrum,
    gamma_lf: f64,
    rho0: &DensityMatrix,
    opts: &IntegrationOptions,
) -> Result<SyncObservables> {
    let gen = Liouvillian::master_equation(spec, gamma_lf);
    let (x1, x2) = local_sigma_x();
    let mut out = SyncObservables::default();
    integrate_with(&gen, rho0, opts, |t, rho| {
        out.times.push(t);
        out.sx1.push(expectation(rho, &x1).expect("hermitian"));
        out.sx2.push(expectation(rho, &x2).expect("hermitian"));
    })?;
    Ok(out)
}
