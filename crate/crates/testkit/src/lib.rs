//! Test support for the tempaudit workspace: brute-force oracles written as
//! literal transcriptions of the defining sums, deterministic random
//! instance generators, and the two-snapshot toy fixture used across the
//! test suites.
//!
//! The oracles deliberately share no code with the production
//! implementations; they recompute everything with plain nested loops over
//! snapshot accessors.

pub mod fixtures;
pub mod oracle;
pub mod rng;
