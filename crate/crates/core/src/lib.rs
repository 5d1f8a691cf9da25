//! Rank-1 domination margins, resolvents and eventual-positivity checks for
//! discretized one-dimensional operators.
//!
//! The crate is `no_std` and only needs an allocator. Everything is dense and
//! real: operators are [`DenseMatrix`] values, comparisons are made against a
//! [`RankOneFrame`] `(u, φ, weights)`, and the verdict engine in
//! [`principles`] turns entrywise margins into maximum and anti-maximum
//! principle classifications.

#![no_std]

extern crate alloc;

pub mod error;
pub mod gallery;
pub mod lattice;
pub mod numerics;
pub mod oracles;
pub mod principles;

pub use error::{Error, Result};
pub use lattice::{DenseMatrix, MarginReport, OrderedVector, RankOneFrame};
