//! Pair correlations of dilated integer sets modulo one, additive energy,
//! gcd-restricted interval systems and the numerical audits built on them.

pub mod arith;
pub mod diophantine;
pub mod error;
pub mod paircorr;
pub mod randmodel;
pub mod rng;
pub mod schmidt;
pub mod setcore;

pub use error::{Error, Result};
