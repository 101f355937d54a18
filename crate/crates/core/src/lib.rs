//! Exact-arithmetic toolkit for the lattice, intersection-ring and moduli
//! bookkeeping behind twisted-connected-sum building blocks: polarized K3
//! Picard lattices, Mukai vectors, slope-stability enumeration, blow-up and
//! double-cover intersection rings, matching configurations, and the
//! constraint search for Hartshorne-Serre bundle parameters. All verdicts
//! are computed over arbitrary-precision integers and rationals; results
//! are emitted as replayable certificates.

pub mod cert;
pub mod chart;
pub mod error;
pub mod k3;
pub mod lattice;
pub mod matching;
mod matrix;
pub mod mukai;
pub mod search;
pub mod suite;

pub use error::{Error, Result};
pub use lattice::{IntLattice, LatticeVector, Sublattice};

/// Version string stamped into every certificate.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
