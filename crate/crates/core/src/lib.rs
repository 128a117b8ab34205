//! Non-autonomous conjugacy of contracting quadratic jets: resonance poset
//! combinatorics, conjugacy operators on quadratic maps, a 2-jet solver and
//! basin simulation for permutation-interleaved triangular automorphisms.

pub mod basin;
pub mod bunching;
pub mod commands;
pub mod config;
pub mod error;
pub mod jet;
pub mod linalg;
pub mod nilpotency;
pub mod pipeline;
pub mod polyspace;
pub mod poset;
pub mod report;
pub mod seed;
pub mod solver;
pub mod stats;

pub use error::{Error, Result};
