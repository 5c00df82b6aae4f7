//! Small exact-arithmetic toolkit shared by every module: gcds, the totient
//! sieve, real thresholds compared against integers, rational parsing and
//! exact summation of many fractions.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Positive rationals with `u64` parts, used for the window parameter `s`.
pub type Rat = Ratio<u64>;

#[inline]
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Euler's totient for every `n <= limit` (index 0 holds 0).
pub fn totients(limit: usize) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=limit as u64).collect();
    for p in 2..=limit {
        if phi[p] == p as u64 {
            let mut k = p;
            while k <= limit {
                phi[k] -= phi[k] / p as u64;
                k += p;
            }
        }
    }
    phi
}

/// Euler's `φ(n)` by trial division.
pub fn totient(mut n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut out = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `a * b mod m` without overflow.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    match a.checked_mul(b) {
        Some(p) => p % m,
        None => ((a as u128 * b as u128) % m as u128) as u64,
    }
}

/// A real-valued gcd threshold. Comparisons against integers are exact as
/// long as the integer is below 2^53.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidParameter(format!("threshold must be finite and >= 0, got {t}")));
        }
        Ok(Threshold(t))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `k <= T`.
    #[inline]
    pub fn admits(self, k: u64) -> bool {
        (k as f64) <= self.0
    }

    /// Largest integer `k` with `k <= T`.
    #[inline]
    pub fn floor(self) -> u64 {
        self.0.floor() as u64
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.25` into an exact
/// non-negative rational.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p = u64::from_str(p.trim()).map_err(|_| bad())?;
        let q = u64::from_str(q.trim()).map_err(|_| bad())?;
        if q == 0 {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 18 {
            return Err(bad());
        }
        let int = if int.is_empty() { 0 } else { u64::from_str(int).map_err(|_| bad())? };
        let den = 10u64.pow(frac.len() as u32);
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(u64::from_str(frac).ok()?))
            .ok_or_else(bad)?;
        return Ok(Rat::new(num, den));
    }
    let v = u64::from_str(t).map_err(|_| bad())?;
    Ok(Rat::from_integer(v))
}

/// `p/q`, or just `p` for integers.
pub fn fmt_ratio<T: fmt::Display + Clone + Integer>(r: &Ratio<T>) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn big_ratio(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_to_big(r: &Rat) -> BigRational {
    big_ratio(*r.numer() as u128, *r.denom() as u128)
}

pub fn big_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back on a scaled division when the parts overflow f64.
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
        let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact sum of many fractions by pairwise reduction, which keeps the
/// intermediate denominators close to an lcm instead of a product.
pub fn exact_sum(mut terms: Vec<BigRational>) -> BigRational {
    if terms.is_empty() {
        return BigRational::zero();
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a + b),
                None => next.push(a),
            }
        }
        terms = next;
    }
    terms.pop().unwrap()
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totient_small_values() {
        let phi = totients(12);
        assert_eq!(&phi[1..], &[1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]);
    }

    #[test]
    fn totient_matches_sieve() {
        let t = totients(2000);
        for n in 1..=2000u64 {
            assert_eq!(totient(n), t[n as usize]);
        }
    }

    #[test]
    fn divisors_sorted() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(49), vec![1, 7, 49]);
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rat("3/6").unwrap(), Rat::new(1, 2));
        assert_eq!(parse_rat("0.25").unwrap(), Rat::new(1, 4));
        assert_eq!(parse_rat("7").unwrap(), Rat::from_integer(7));
        assert_eq!(parse_rat(".5").unwrap(), Rat::new(1, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("-1").is_err());
        assert!(parse_rat("abc").is_err());
    }

    #[test]
    fn exact_sum_matches_sequential() {
        let terms: Vec<BigRational> = (1..200u128).map(|n| big_ratio(n % 7, n)).collect();
        let seq = terms.iter().cloned().fold(BigRational::zero(), |a, b| a + b);
        assert_eq!(exact_sum(terms), seq);
    }

    #[test]
    fn threshold_compares_exactly() {
        let t = Threshold::new(2.5).unwrap();
        assert!(t.admits(2));
        assert!(!t.admits(3));
        assert_eq!(t.floor(), 2);
        assert!(Threshold::new(f64::NAN).is_err());
    }

    #[test]
    fn big_to_f64_handles_huge_parts() {
        let huge = BigInt::from(3u8) << 5000usize;
        let r = BigRational::new(huge.clone(), huge * BigInt::from(4u8));
        assert!((big_to_f64(&r) - 0.25).abs() < 1e-15);
    }
}
