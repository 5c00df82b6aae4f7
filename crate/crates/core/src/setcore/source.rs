use super::set::{gallery, GalleryKind, IntegerSet, MAX_BOUND};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, streams, to_unit, CounterRng};
use crate::randmodel::{sample_set, RandomModelParams};

/// An (in principle unbounded) set `𝒜` that can be truncated at any `X`.
#[derive(Debug, Clone, PartialEq)]
pub enum SetSource {
    Gallery(GalleryKind),
    Random(RandomModelParams),
    /// A stored finite set; truncations beyond its bound keep its elements.
    Fixed(IntegerSet),
}

impl SetSource {
    pub fn describe(&self) -> String {
        match self {
            SetSource::Gallery(k) => k.name(),
            SetSource::Random(p) => format!("random(C={},seed={})", p.exponent(), p.seed()),
            SetSource::Fixed(s) => format!("fixed(X={},N={})", s.bound(), s.len()),
        }
    }

    /// `𝒜 ∩ [1, X]`.
    pub fn truncate(&self, bound: u64) -> Result<IntegerSet> {
        match self {
            SetSource::Gallery(k) => gallery(*k, bound),
            SetSource::Random(p) => sample_set(bound, p),
            SetSource::Fixed(s) => IntegerSet::new(s.elements().iter().copied(), bound),
        }
    }

    /// The `count`-th smallest element of `𝒜` (1-based), i.e. the minimal
    /// `X` with `|𝒜 ∩ [1, X]| = count`.
    pub fn nth_element(&self, count: u64) -> Result<u64> {
        if count == 0 {
            return Err(Error::InvalidParameter("element index must be >= 1".into()));
        }
        let closed = match self {
            SetSource::Gallery(GalleryKind::Interval) => Some(Some(count)),
            SetSource::Gallery(GalleryKind::Squares) => Some(count.checked_pow(2)),
            SetSource::Gallery(GalleryKind::KthPowers(k)) => Some(count.checked_pow(*k)),
            SetSource::Gallery(GalleryKind::Lacunary(b)) => Some(u32::try_from(count).ok().and_then(|c| b.checked_pow(c))),
            SetSource::Fixed(s) => {
                return s
                    .elements()
                    .get(count as usize - 1)
                    .copied()
                    .ok_or(Error::Exhausted { needed: count, available: s.len() as u64 });
            }
            _ => None,
        };
        if let Some(v) = closed {
            return match v {
                Some(x) if x <= MAX_BOUND => Ok(x),
                _ => Err(Error::Exhausted { needed: count, available: self.count_up_to(MAX_BOUND)? }),
            };
        }
        let mut bound = count.max(64).min(MAX_BOUND);
        loop {
            let set = self.truncate(bound)?;
            if set.len() as u64 >= count {
                return Ok(set.elements()[count as usize - 1]);
            }
            if bound == MAX_BOUND {
                return Err(Error::Exhausted { needed: count, available: set.len() as u64 });
            }
            bound = (bound * 2).min(MAX_BOUND);
        }
    }

    fn count_up_to(&self, bound: u64) -> Result<u64> {
        Ok(match self {
            SetSource::Gallery(GalleryKind::Interval) => bound,
            SetSource::Gallery(GalleryKind::Squares) => bound.isqrt(),
            SetSource::Gallery(GalleryKind::KthPowers(k)) => (1u64..).take_while(|b| b.checked_pow(*k).is_some_and(|p| p <= bound)).count() as u64,
            SetSource::Gallery(GalleryKind::Lacunary(b)) => (1u32..).take_while(|&j| b.checked_pow(j).is_some_and(|p| p <= bound)).count() as u64,
            _ => self.truncate(bound)?.len() as u64,
        })
    }
}

/// Test set number `index` drawn from `seed`: a bound in `[2, max_bound]`
/// and a density in `(0, 1]`, each element kept independently.
pub fn random_test_set(seed: u64, index: u64, max_bound: u64) -> Result<IntegerSet> {
    if max_bound < 2 {
        return Err(Error::InvalidParameter("max_bound must be >= 2".into()));
    }
    let rng = CounterRng::new(derive_seed(seed, index), streams::TEST_SETS);
    let bound = 2 + rng.below(0, max_bound - 1);
    let density = 0.02 + 0.98 * rng.unit(1);
    let mut words = vec![0u64; bound as usize];
    rng.fill(2, &mut words);
    let values = (1..=bound).zip(words).filter(|&(_, w)| to_unit(w) < density).map(|(x, _)| x);
    IntegerSet::new(values, bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_match_truncation() {
        for kind in [GalleryKind::Interval, GalleryKind::Squares, GalleryKind::KthPowers(3), GalleryKind::Lacunary(3), GalleryKind::Primes] {
            let src = SetSource::Gallery(kind);
            let set = src.truncate(5000).unwrap();
            for (i, &a) in set.elements().iter().enumerate() {
                assert_eq!(src.nth_element(i as u64 + 1).unwrap(), a, "{kind:?} #{i}");
            }
        }
    }

    #[test]
    fn fixed_sets_exhaust() {
        let s = IntegerSet::new([2, 5, 9], 10).unwrap();
        let src = SetSource::Fixed(s);
        assert_eq!(src.nth_element(3).unwrap(), 9);
        assert!(matches!(src.nth_element(4), Err(Error::Exhausted { needed: 4, available: 3 })));
    }

    #[test]
    fn lacunary_overflow_is_exhaustion() {
        let src = SetSource::Gallery(GalleryKind::Lacunary(2));
        assert!(matches!(src.nth_element(40), Err(Error::Exhausted { .. })));
    }
}
