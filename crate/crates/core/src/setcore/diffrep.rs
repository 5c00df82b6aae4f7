use super::set::IntegerSet;
use super::transform;
use crate::error::{Error, Result};

/// Bounds up to this size store `r(n)` densely.
pub const DENSE_LIMIT: u64 = 1 << 24;

/// Pair budget for the sparse path, which sorts every difference.
const SPARSE_PAIR_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Storage {
    /// `counts[n]` for `0 <= n <= X`; `counts[0]` is unused.
    Dense(Vec<u64>),
    /// Nonzero `(n, r(n))` sorted by `n`.
    Sparse(Vec<(u64, u64)>),
}

/// The representation function `r(n) = #{(a, b) ∈ A² : a − b = n}` for
/// `n >= 1`. Negative differences are recovered by symmetry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffRep {
    bound: u64,
    set_len: usize,
    storage: Storage,
}

impl DiffRep {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// `N` of the set this came from.
    pub fn set_len(&self) -> usize {
        self.set_len
    }

    pub fn get(&self, n: u64) -> u64 {
        match &self.storage {
            Storage::Dense(v) => v.get(n as usize).copied().filter(|_| n > 0).unwrap_or(0),
            Storage::Sparse(v) => v.binary_search_by_key(&n, |p| p.0).map(|i| v[i].1).unwrap_or(0),
        }
    }

    /// Nonzero entries `(n, r(n))` in increasing `n`.
    pub fn iter(&self) -> Box<dyn Iterator<Item = (u64, u64)> + '_> {
        match &self.storage {
            Storage::Dense(v) => Box::new(
                v.iter()
                    .enumerate()
                    .skip(1)
                    .filter(|(_, &c)| c > 0)
                    .map(|(n, &c)| (n as u64, c)),
            ),
            Storage::Sparse(v) => Box::new(v.iter().copied()),
        }
    }

    /// Nonzero entries collected into a vector.
    pub fn support(&self) -> Vec<(u64, u64)> {
        self.iter().collect()
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    /// `Σ_{n >= 1} r(n)`, which equals `N(N−1)/2`.
    pub fn total(&self) -> u64 {
        self.iter().map(|(_, c)| c).sum()
    }

    /// `Σ_{n >= 1} r(n)²` with overflow detection.
    pub fn sum_of_squares(&self) -> Result<u128> {
        self.iter().try_fold(0u128, |acc, (_, c)| {
            (c as u128)
                .checked_mul(c as u128)
                .and_then(|sq| acc.checked_add(sq))
                .ok_or(Error::Overflow("sum of r(n)^2"))
        })
    }

    /// Builds a representation function directly from `(n, r(n))` pairs.
    pub fn from_counts(bound: u64, set_len: usize, counts: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut pairs: Vec<(u64, u64)> = counts.into_iter().filter(|p| p.1 > 0).collect();
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter("duplicate difference in counts".into()));
        }
        if pairs.iter().any(|&(n, _)| n == 0 || n >= bound.max(1)) {
            return Err(Error::InvalidParameter("differences must lie in [1, X)".into()));
        }
        let storage = if bound <= DENSE_LIMIT {
            let mut v = vec![0u64; bound as usize + 1];
            for (n, c) in pairs {
                v[n as usize] = c;
            }
            Storage::Dense(v)
        } else {
            Storage::Sparse(pairs)
        };
        Ok(DiffRep { bound, set_len, storage })
    }
}

/// `r(n)` for every `n`. Dense bounds use either a direct pair loop or the
/// autocorrelation transform, whichever is cheaper; sparse bounds sort the
/// pairwise differences.
pub fn diff_rep(set: &IntegerSet) -> Result<DiffRep> {
    let a = set.elements();
    let n = a.len() as u64;
    let bound = set.bound();
    let pairs = n * n.saturating_sub(1) / 2;
    let storage = if bound <= DENSE_LIMIT {
        let transform_cost = 8 * bound * (64 - bound.leading_zeros() as u64);
        if pairs <= transform_cost.max(1 << 16) {
            let mut v = vec![0u64; bound as usize + 1];
            for (i, &hi) in a.iter().enumerate() {
                for &lo in &a[..i] {
                    v[(hi - lo) as usize] += 1;
                }
            }
            Storage::Dense(v)
        } else {
            let (mut d, _) = transform::autocorrelation(a, bound)?;
            d[0] = 0;
            d.push(0);
            Storage::Dense(d)
        }
    } else {
        if pairs > SPARSE_PAIR_LIMIT {
            return Err(Error::ResourceGuard(format!(
                "{pairs} pairs exceed the sparse representation budget"
            )));
        }
        let mut diffs = Vec::with_capacity(pairs as usize);
        for (i, &hi) in a.iter().enumerate() {
            for &lo in &a[..i] {
                diffs.push(hi - lo);
            }
        }
        diffs.sort_unstable();
        let mut out: Vec<(u64, u64)> = Vec::new();
        for d in diffs {
            match out.last_mut() {
                Some(last) if last.0 == d => last.1 += 1,
                _ => out.push((d, 1)),
            }
        }
        Storage::Sparse(out)
    };
    Ok(DiffRep { bound, set_len: a.len(), storage })
}
