//! Finite integer sets, their difference representation function and
//! additive energy computed by four independent routes.

mod diffrep;
mod energy;
mod set;
mod source;
pub mod transform;

pub use diffrep::{diff_rep, DiffRep, DENSE_LIMIT};
pub use energy::{energy, EnergyMethod, EnergyReport, BRUTE_MAX_LEN};
pub use set::{gallery, primes_up_to, GalleryKind, IntegerSet, MAX_BOUND};
pub use source::{random_test_set, SetSource};

/// Shorthand for [`IntegerSet::new`].
pub fn make_set(values: impl IntoIterator<Item = u64>, bound: u64) -> crate::Result<IntegerSet> {
    IntegerSet::new(values, bound)
}
