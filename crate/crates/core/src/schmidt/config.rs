use crate::arith::{Rat, Threshold};
use crate::error::{Error, Result};
use crate::setcore::IntegerSet;

/// The gcd threshold `T` together with the window `s/N` and bound `X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtConfig {
    pub threshold: Threshold,
    pub s: Rat,
    pub set_len: u64,
    pub bound: u64,
}

impl SchmidtConfig {
    pub fn new(threshold: f64, s: Rat, set_len: u64, bound: u64) -> Result<Self> {
        let threshold = Threshold::new(threshold)?;
        if threshold.value() < 2.0 {
            return Err(Error::InvalidParameter(format!("T must be >= 2, got {}", threshold.value())));
        }
        if *s.numer() == 0 {
            return Err(Error::InvalidParameter("s must be positive".into()));
        }
        if set_len == 0 || bound == 0 {
            return Err(Error::InvalidParameter("N and X must be >= 1".into()));
        }
        Ok(SchmidtConfig { threshold, s, set_len, bound })
    }

    /// The configuration matching `A`: `N = |A|`, `X` its bound.
    pub fn for_set(set: &IntegerSet, threshold: f64, s: Rat) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::Precondition("set is empty".into()));
        }
        SchmidtConfig::new(threshold, s, set.len() as u64, set.bound())
    }

    pub fn t(&self) -> f64 {
        self.threshold.value()
    }

    /// `N >= 2s`, where the arcs making up each `E_n` are disjoint.
    pub fn arcs_disjoint(&self) -> bool {
        self.set_len as u128 * *self.s.denom() as u128 >= 2 * *self.s.numer() as u128
    }

    pub(crate) fn describe(&self) -> String {
        format!("T={};s={};N={};X={}", self.t(), crate::arith::fmt_ratio(&self.s), self.set_len, self.bound)
    }
}
