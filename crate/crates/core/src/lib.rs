//! Sparse averaging families on ℤ^d and on finitely generated groups, with
//! exact or tolerance-controlled finite checks of the bounds they satisfy.
//!
//! The modules mirror the constructions: [`lattice`] holds sparse measures
//! and the Calderón–Zygmund machinery, [`blocks`] the block plans and their
//! difference-set diagnostics, [`random`] the speckled and plaid random sets,
//! [`arith`] the curve sets over finite fields, [`groups`] word balls and
//! group measures, and [`dynamics`] ergodic averages on model systems.

pub mod acceptance;
pub mod arith;
pub mod blocks;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod groups;
pub mod lattice;
pub mod oracle;
pub mod random;
pub mod rng;

pub use error::{Error, Result};
