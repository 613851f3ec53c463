//! Majorization calculus on step functions, discrete measure spaces and finite
//! Hermitian densities, together with the bipartite pure-state entanglement
//! machinery built on top of it.
//!
//! The crate is `no_std` and only needs `alloc`. All IO, file formats and the
//! command-line front end live in the companion `majorize` crate.
//!
//! Layout:
//!
//! - [`stepfn`]: non-increasing step functions, distribution functions,
//!   Lorenz curves and the integral functionals built from them.
//! - [`classical`]: (sub)majorization of weighted vectors, doubly
//!   (sub)stochastic map synthesis and the doubly stochastic extension test.
//! - [`quantum`]: factor models, densities, spectral scales, channel
//!   synthesis, unitary-orbit geometry and Rényi entropies.
//! - [`locc`]: Schmidt decompositions, Nielsen and SLOCC decisions, LOCC
//!   protocol synthesis and simulation, conversion fidelities, monotones.
//! - [`itpfi`]: finite truncations of Powers states, distillation targets,
//!   trivialization trends and CHSH seesaw optimization.

#![no_std]

extern crate alloc;

pub mod birkhoff;
pub mod classical;
mod error;
pub mod itpfi;
pub mod linalg;
pub mod locc;
pub mod quantum;
pub mod random;
pub mod stepfn;

pub use error::{Error, Result};

/// Relative tolerance used when merging adjacent step-function pieces.
pub const MERGE_TOL: f64 = 1e-12;

/// Default slack for dominance and majorization decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Eigenvalues below `RANK_CUTOFF * λ_max` are treated as zero.
pub const RANK_CUTOFF: f64 = 1e-12;
