//! Oracle-free adiabatic search over a classical key-value table.
//!
//! The table's values become the diagonal of a database operator `𝒟`; the
//! search target `t` defines the problem Hamiltonian `(𝒟 − t)²`, whose
//! ground state is the index holding `t`. Interpolating from the transverse
//! field `g·Σσ_x` to that Hamiltonian drives the register onto the answer.
//!
//! - [`database`]: table ingestion, rank encoding, outcome decoding
//! - [`operators`]: Hamiltonians and Pauli-string conversion
//! - [`evolve`]: continuous, exact-step and Trotterized evolution
//! - [`spectrum`]: level traces, gaps and scaling sweeps
//! - [`nmr`]: two-spin pulse compilation of the Trotter steps
//! - [`cli`]: the `adia` command-line surface

pub mod cli;
pub mod database;
pub mod evolve;
pub mod linalg;
pub mod nmr;
pub mod operators;
pub mod spectrum;

pub use database::{encode_database, EncodedDatabase, RawEntry, SearchOutcome};
pub use evolve::{EvolutionPlan, EvolutionReport, Method, QuantumState};
pub use operators::{CouplingStrength, HermitianOperator, Pauli, PauliString};
