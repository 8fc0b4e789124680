//! Online convex optimization under heavy-tailed gradient noise.
//!
//! Learners ([`learners`]) run over Euclidean balls ([`geometry`]) against
//! objective families ([`problems`]) with calibrated noise ([`noise`]). Runs
//! record white-box traces that [`certify`] checks against pathwise regret
//! inequalities; [`conversions`] turns regret into optimization guarantees and
//! [`harness`] sweeps, fits, and persists results.

pub mod certify;
pub mod conversions;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod learners;
pub mod linalg;
pub mod noise;
pub mod problems;
pub mod rng;
pub mod trace;

pub use error::{Error, Result};
