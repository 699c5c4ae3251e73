//! Two-qubit secular master equation: spectrum, generators, RK4 integration
//! and the closed-form pair solution.

mod analytic;
mod integrate;
mod pair;
mod rhs;
mod spectrum;

pub use analytic::{
    analytic_full_state, analytic_p, analytic_q, analytic_reduced_pair, analytic_trace_distance,
    extrema_times, Extrema,
};
pub use integrate::{integrate, integrate_with, IntegrationOptions, Trajectory, INTEGRATION_TOL};
pub use pair::{
    evolve_pair_states, local_sigma_x, pair_distance_series, pair_initial_states,
    sync_initial_state, sync_observables, PairTrajectory, SyncObservables,
};
pub use rhs::{
    dissipator, hybrid_rhs, lindblad_rhs, unitary_part, Generator, Liouvillian, MasterEquation,
};
pub use spectrum::{
    derive_spectrum, mixing_angle, system_hamiltonian, DerivedSpectrum, SpectralDensity,
    SystemParams,
};
