//! Qudit quantum teleportation in the discrete Wigner representation.
//!
//! For an odd prime Hilbert-space dimension N, every state of an N-level
//! system has an exact phase-space description: a real quasiprobability
//! distribution on the N×N grid ℤ_N × ℤ_N. This crate implements that
//! representation and runs the complete teleportation protocol purely on
//! such grids — entangled-resource construction, the modular canonical
//! transform, Bell-measurement filtering, renormalization, and the
//! receiver's correction shift — without touching a density matrix along
//! the way.
//!
//! A full density-matrix simulation of the same protocol is included as an
//! independent oracle, and the test suite checks the two routes against
//! each other step by step. Imperfections slot in naturally: a noisy
//! entangled resource is described by replacing the resource's delta
//! correlations with a probability kernel, and an unsharp measurement by
//! filtering outcome slices.
//!
//! # Quick start
//!
//! ```
//! use qudit_wigner::{
//!     hilbert::StateVector,
//!     phase_space::PrimeDimension,
//!     teleport::{run_teleport, NoiseModel, OutcomeSelection},
//!     wigner::to_wigner,
//! };
//!
//! let dim = PrimeDimension::new(5)?;
//! let input = to_wigner(&StateVector::position_eigenstate(dim, 2).to_density())?;
//! let noise = NoiseModel::ideal(dim);
//! let traces = run_teleport(&input, &noise, OutcomeSelection::Exhaustive)?;
//!
//! assert_eq!(traces.len(), 25); // one trace per Bell outcome
//! for trace in &traces {
//!     assert!((trace.outcome.probability - 1.0 / 25.0).abs() < 1e-12);
//!     assert!((trace.fidelity - 1.0).abs() < 1e-10);
//! }
//! # Ok::<(), qudit_wigner::Error>(())
//! ```
//!
//! # Modules
//!
//! - [`phase_space`] — residue arithmetic over ℤ_N, including the halving
//!   map that makes the protocol's canonical transform invertible.
//! - [`hilbert`] — state vectors, density matrices, Bell states and the
//!   density-matrix teleportation oracle.
//! - [`wigner`] — forward/inverse Wigner transforms, marginals, partial
//!   sums and phase-space translations.
//! - [`teleport`] — the grid-only protocol pipeline plus noise models.
//! - [`io`] — plain-text and JSON grid files, outcome tables, sweeps.
//! - [`cli`] — the `qudit-wigner` command-line front end.

#![warn(missing_docs)]

pub mod cli;
pub mod error;
pub mod hilbert;
pub mod io;
pub mod phase_space;
pub mod teleport;
pub mod wigner;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
