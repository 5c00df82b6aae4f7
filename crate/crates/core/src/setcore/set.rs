use std::fmt::Write as _;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Largest supported truncation bound.
pub const MAX_BOUND: u64 = u32::MAX as u64;

/// A finite set `A = 𝒜 ∩ [1, X]` kept sorted, together with its bound `X`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerSet {
    elements: Vec<u64>,
    bound: u64,
}

impl IntegerSet {
    /// Builds `values ∩ [1, X]`, sorted and deduplicated.
    pub fn new(values: impl IntoIterator<Item = u64>, bound: u64) -> Result<Self> {
        check_bound(bound)?;
        let mut elements = Vec::new();
        for v in values {
            if v == 0 {
                return Err(Error::InvalidParameter("set elements must be >= 1".into()));
            }
            if v <= bound {
                elements.push(v);
            }
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(IntegerSet { elements, bound })
    }

    /// Wraps elements already known to be strictly increasing within `[1, X]`.
    pub(crate) fn from_sorted(elements: Vec<u64>, bound: u64) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(elements.first().is_none_or(|&a| a >= 1));
        debug_assert!(elements.last().is_none_or(|&a| a <= bound));
        IntegerSet { elements, bound }
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    /// The truncation bound `X`.
    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// `N = |A|`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `δ = N / X`.
    pub fn density(&self) -> Ratio<u64> {
        Ratio::new(self.len() as u64, self.bound)
    }

    pub fn contains(&self, v: u64) -> bool {
        self.elements.binary_search(&v).is_ok()
    }

    /// `A ∩ [1, X']` with the new bound `X'`.
    pub fn truncate(&self, bound: u64) -> Result<IntegerSet> {
        check_bound(bound)?;
        let end = self.elements.partition_point(|&a| a <= bound);
        Ok(IntegerSet { elements: self.elements[..end].to_vec(), bound })
    }

    /// Newline-delimited decimal integers after a `# X=<X> N=<N>` header.
    pub fn to_text(&self) -> String {
        let mut out = format!("# X={} N={}\n", self.bound, self.len());
        for a in &self.elements {
            writeln!(out, "{a}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<IntegerSet> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty set file".into()))?;
        let (bound, count) = parse_header(header)?;
        let mut values = Vec::with_capacity(count as usize);
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: u64 = line
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: not a natural number: {line:?}", i + 2)))?;
            values.push(v);
        }
        if values.iter().any(|&v| v > bound) {
            return Err(Error::Parse(format!("element exceeds X={bound}")));
        }
        let set = IntegerSet::new(values, bound)?;
        if set.len() as u64 != count {
            return Err(Error::Parse(format!("header says N={count} but file holds {} distinct elements", set.len())));
        }
        Ok(set)
    }
}

fn check_bound(bound: u64) -> Result<()> {
    if bound == 0 {
        return Err(Error::InvalidParameter("X must be >= 1".into()));
    }
    if bound > MAX_BOUND {
        return Err(Error::InvalidParameter(format!("X must be <= {MAX_BOUND}")));
    }
    Ok(())
}

fn parse_header(line: &str) -> Result<(u64, u64)> {
    let bad = || Error::Parse(format!("bad header {line:?}, expected '# X=<X> N=<N>'"));
    let rest = line.strip_prefix('#').ok_or_else(bad)?;
    let mut bound = None;
    let mut count = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("X=") {
            bound = Some(v.parse::<u64>().map_err(|_| bad())?);
        } else if let Some(v) = tok.strip_prefix("N=") {
            count = Some(v.parse::<u64>().map_err(|_| bad())?);
        }
    }
    Ok((bound.ok_or_else(bad)?, count.ok_or_else(bad)?))
}

/// The named example sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GalleryKind {
    Interval,
    Squares,
    KthPowers(u32),
    Primes,
    /// `⌊base^j⌋` for `j >= 1`.
    Lacunary(u64),
}

impl GalleryKind {
    pub fn name(&self) -> String {
        match self {
            GalleryKind::Interval => "interval".into(),
            GalleryKind::Squares => "squares".into(),
            GalleryKind::KthPowers(k) => format!("kth-powers({k})"),
            GalleryKind::Primes => "primes".into(),
            GalleryKind::Lacunary(b) => format!("lacunary({b})"),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            GalleryKind::KthPowers(k) if k < 2 => Err(Error::InvalidParameter(format!("kth-powers needs k >= 2, got {k}"))),
            GalleryKind::Lacunary(b) if b < 2 => Err(Error::InvalidParameter(format!("lacunary needs base >= 2, got {b}"))),
            _ => Ok(()),
        }
    }
}

/// The named set intersected with `[1, X]`.
pub fn gallery(kind: GalleryKind, bound: u64) -> Result<IntegerSet> {
    kind.validate()?;
    check_bound(bound)?;
    let elements = match kind {
        GalleryKind::Interval => (1..=bound).collect(),
        GalleryKind::Squares => powers(2, bound),
        GalleryKind::KthPowers(k) => powers(k, bound),
        GalleryKind::Primes => primes_up_to(bound),
        GalleryKind::Lacunary(base) => {
            let mut v = Vec::new();
            let mut p = base;
            while p <= bound {
                v.push(p);
                match p.checked_mul(base) {
                    Some(q) => p = q,
                    None => break,
                }
            }
            v
        }
    };
    Ok(IntegerSet::from_sorted(elements, bound))
}

fn powers(k: u32, bound: u64) -> Vec<u64> {
    let mut v = Vec::new();
    for b in 1u64.. {
        match b.checked_pow(k) {
            Some(p) if p <= bound => v.push(p),
            _ => break,
        }
    }
    v
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}
