//! Rashomon set toolkit for desk-scale hypothesis spaces.
//!
//! The crate enumerates Rashomon sets exactly for two model families —
//! complete binary decision trees on binarized data and linear classifiers
//! via their prediction patterns — and evaluates the closed forms that
//! connect label/attribute noise to the size and diversity of those sets:
//! noisy-risk and loss-variance transforms, variance-based generalization
//! bounds, ridge-regression Rashomon volumes, and pattern-diversity metrics.
//!
//! Everything is deterministic: randomized operations are pure functions of
//! their inputs and a 64-bit seed.

pub mod bounds;
pub mod data;
pub mod linear;
pub mod loss;
pub mod metrics;
pub mod noise;
pub mod pattern;
pub mod ridge;
pub mod rng;
pub mod special;
pub mod tree;

mod error;

pub use error::Error;
pub use pattern::Pattern;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
