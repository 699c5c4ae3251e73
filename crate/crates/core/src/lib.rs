//! Simulations of spontaneous synchronization and non-Markovian memory in a
//! pair of coupled qubits, one of which is open to a dissipative environment.

pub mod collision;
pub mod error;
pub mod experiments;
pub mod io;
pub mod lindblad;
pub mod measures;
pub mod qcore;

pub use error::{Error, Result};
