//! Sparse-Hamiltonian simulation toolkit: dense verification oracles,
//! Hamiltonian builders, one-sparse decomposition by edge colouring,
//! product formulas, circuit synthesis with a state-vector executor, and a
//! simulated quantum linear-system solver.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod circuits;
pub mod decomposition;
pub mod error;
pub mod formulas;
pub mod hamiltonians;
pub mod hhl;
pub mod linalg;

pub use error::{Error, Result};
