//! Exact-diagonalization and mean-field toolkit for a pair of weakly coupled
//! Bose-Hubbard lattices, built to read out the superfluid order parameter of
//! one lattice from the AC Josephson current across the junction.
//!
//! The crate is generic over the floating-point scalar (see [`scalar::Real`]);
//! the aliases below pin the default f64 instantiations.

pub mod auxfield;
pub mod dynamics;
pub mod eig;
pub mod error;
pub mod fock;
pub mod gutzwiller;
pub mod hamiltonian;
pub mod lattice;
pub mod ops;
pub mod phase;
pub mod pipeline;
pub mod scalar;
pub mod sparse;
pub mod spectral;
pub mod twomode;

pub use error::{Error, Result};

/// Library version, recorded in run metadata by downstream tools.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default-precision model parameters.
pub type ModelParams = lattice::ModelParams<f64>;
/// Default-precision cavity parameters.
pub type CavityParams = lattice::CavityParams<f64>;
/// Default-precision quantum state.
pub type QuantumState = fock::QuantumState<f64>;
/// Default-precision sparse operator.
pub type SparseOperator = sparse::SparseOperator<f64>;
