//! Simulation laboratory for ground-state quantum computers (GSQC).
//!
//! A GSQC encodes a computation in the ground state of a static, positive
//! semidefinite Hamiltonian: each qubit is a column of rows (two quantum dots
//! per row, one electron per column), and gate Hamiltonians tie consecutive
//! rows together so that the zero-energy ground state is a superposition of
//! the computation's row-by-row snapshots. This crate builds such circuits,
//! assembles their Hamiltonians as sparse matrices, computes ground states and
//! spectral gaps, predicts gap scalings symbolically, and compiles 3-bit
//! Exact Cover instances into clause-filtering circuits.
//!
//! Module map:
//! - [`circuit`]: circuit representation, filter boxes, teleportation
//!   splicing, the circuit text format.
//! - [`hamiltonian`]: basis indexing and sparse Hermitian assembly.
//! - [`solver`]: dense/iterative eigensolvers, the analytic history-state
//!   oracle, final-row readout, adiabatic schedule traces.
//! - [`gap_rules`]: the symbolic 1/x counting rule and closed-form filter
//!   gap bounds.
//! - [`sat`]: Exact Cover instances, the brute-force oracle ledger, boost
//!   factor selection.

pub mod circuit;
pub mod error;
pub mod gap_rules;
pub mod hamiltonian;
pub mod sat;
pub mod solver;

pub use circuit::{
    BoundarySpec, CircuitGraph, CnotLink, FilterBox, GateSpec, QubitColumn, TerminalKind,
    Transition, Unitary2, ValidationReport,
};
pub use error::Error;
pub use hamiltonian::{BasisIndexer, SparseHermitian};
pub use solver::{FinalRowReadout, GroundStateResult, ScheduleTrace, StateVector};

/// Internal energy unit. All Hamiltonian terms scale with it and all outputs
/// are reported in multiples of it.
pub const EPSILON: f64 = 1.0;

/// Boundary strength at which the gap has saturated; used as the default E.
pub const DEFAULT_BOUNDARY_STRENGTH: f64 = 10.0;

/// Default cap on the many-body dimension.
pub const DEFAULT_MAX_DIMENSION: usize = 20_000_000;

pub type Result<T> = std::result::Result<T, Error>;
