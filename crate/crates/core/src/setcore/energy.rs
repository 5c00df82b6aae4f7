use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::Serialize;

use super::diffrep::diff_rep;
use super::set::IntegerSet;
use super::transform;
use crate::arith::fmt_ratio;
use crate::error::{Error, Result};

/// The brute-force quadruple count is only run up to this size.
pub const BRUTE_MAX_LEN: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnergyMethod {
    QuadrupleBrute,
    SumHistogram,
    DifferenceIdentity,
    Fft,
}

impl EnergyMethod {
    pub const ALL: [EnergyMethod; 4] = [
        EnergyMethod::QuadrupleBrute,
        EnergyMethod::SumHistogram,
        EnergyMethod::DifferenceIdentity,
        EnergyMethod::Fft,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EnergyMethod::QuadrupleBrute => "quadruple-brute",
            EnergyMethod::SumHistogram => "sum-histogram",
            EnergyMethod::DifferenceIdentity => "difference-identity",
            EnergyMethod::Fft => "fft",
        }
    }
}

impl fmt::Display for EnergyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnergyMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        EnergyMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown energy method {s:?}")))
    }
}

/// Additive energy `E = #{(a, b, c, d) ∈ A⁴ : a + b = c + d}` and `Ẽ = E/N³`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyReport {
    pub energy: u128,
    pub normalized: Ratio<u128>,
    pub method: EnergyMethod,
    pub set_len: usize,
    pub bound: u64,
}

impl EnergyReport {
    pub fn normalized_f64(&self) -> f64 {
        *self.normalized.numer() as f64 / *self.normalized.denom() as f64
    }

    /// JSON with `E` as a decimal string so 64-bit readers do not truncate it.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct View<'a> {
            method: &'a str,
            #[serde(rename = "X")]
            bound: u64,
            #[serde(rename = "N")]
            set_len: usize,
            #[serde(rename = "E")]
            energy: String,
            #[serde(rename = "E_tilde")]
            normalized: String,
        }
        serde_json::to_value(View {
            method: self.method.name(),
            bound: self.bound,
            set_len: self.set_len,
            energy: self.energy.to_string(),
            normalized: fmt_ratio(&self.normalized),
        })
        .expect("plain struct serializes")
    }
}

fn checked_square_sum(values: impl Iterator<Item = u64>, what: &'static str) -> Result<u128> {
    values.into_iter().try_fold(0u128, |acc, c| {
        (c as u128)
            .checked_mul(c as u128)
            .and_then(|sq| acc.checked_add(sq))
            .ok_or(Error::Overflow(what))
    })
}

pub fn energy(set: &IntegerSet, method: EnergyMethod) -> Result<EnergyReport> {
    let n = set.len();
    if n == 0 {
        return Err(Error::Precondition("energy needs N >= 1".into()));
    }
    let e = match method {
        EnergyMethod::QuadrupleBrute => energy_brute(set.elements())?,
        EnergyMethod::SumHistogram => energy_histogram(set)?,
        EnergyMethod::DifferenceIdentity => energy_identity(set)?,
        EnergyMethod::Fft => energy_fft(set)?,
    };
    let cube = (n as u128)
        .checked_pow(3)
        .ok_or(Error::Overflow("N^3"))?;
    Ok(EnergyReport {
        energy: e,
        normalized: Ratio::new(e, cube),
        method,
        set_len: n,
        bound: set.bound(),
    })
}

fn energy_brute(a: &[u64]) -> Result<u128> {
    if a.len() > BRUTE_MAX_LEN {
        return Err(Error::Precondition(format!(
            "quadruple-brute is limited to N <= {BRUTE_MAX_LEN}, got N = {}",
            a.len()
        )));
    }
    let mut count = 0u128;
    for &x in a {
        for &y in a {
            for &z in a {
                for &w in a {
                    if x + y == z + w {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// `Σ_m R(m)²` with `R(m) = #{(a, b) : a + b = m}` over ordered pairs.
fn energy_histogram(set: &IntegerSet) -> Result<u128> {
    let a = set.elements();
    let len = 2 * set.bound() as usize + 1;
    if len <= 1 << 26 {
        let mut hist = vec![0u64; len];
        for (i, &x) in a.iter().enumerate() {
            hist[(2 * x) as usize] += 1;
            for &y in &a[..i] {
                hist[(x + y) as usize] += 2;
            }
        }
        checked_square_sum(hist.into_iter(), "sum-histogram energy")
    } else {
        let mut sums: Vec<u64> = Vec::with_capacity(a.len() * (a.len() + 1) / 2);
        for (i, &x) in a.iter().enumerate() {
            for &y in &a[..=i] {
                sums.push(x + y);
            }
        }
        sums.sort_unstable();
        let mut acc = 0u128;
        let mut i = 0;
        while i < sums.len() {
            let mut j = i;
            let mut r = 0u64;
            while j < sums.len() && sums[j] == sums[i] {
                // An off-diagonal unordered pair is two ordered pairs.
                r += 2;
                j += 1;
            }
            // Correct for the diagonal pair (x, x), counted once.
            let m = sums[i];
            if m % 2 == 0 && set.contains(m / 2) {
                r -= 1;
            }
            acc = (r as u128)
                .checked_mul(r as u128)
                .and_then(|sq| acc.checked_add(sq))
                .ok_or(Error::Overflow("sum-histogram energy"))?;
            i = j;
        }
        Ok(acc)
    }
}

/// `E = N² + 2 Σ_{n >= 1} r(n)²`.
fn energy_identity(set: &IntegerSet) -> Result<u128> {
    let rep = diff_rep(set)?;
    let n = set.len() as u128;
    rep.sum_of_squares()?
        .checked_mul(2)
        .and_then(|v| v.checked_add(n * n))
        .ok_or(Error::Overflow("difference-identity energy"))
}

/// Sum of squared autocorrelation over all lags `−X < n < X`.
fn energy_fft(set: &IntegerSet) -> Result<u128> {
    let (d, _) = transform::autocorrelation(set.elements(), set.bound())?;
    let diag = d[0] as u128;
    let off = checked_square_sum(d[1..].iter().copied(), "fft energy")?;
    off.checked_mul(2)
        .and_then(|v| v.checked_add(diag * diag))
        .ok_or(Error::Overflow("fft energy"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setcore::{gallery, GalleryKind};

    fn all_methods(values: &[u64], x: u64) -> Vec<u128> {
        let s = IntegerSet::new(values.iter().copied(), x).unwrap();
        EnergyMethod::ALL.iter().map(|&m| energy(&s, m).unwrap().energy).collect()
    }

    #[test]
    fn small_examples_agree() {
        assert_eq!(all_methods(&[1, 2], 2), vec![6; 4]);
        assert_eq!(all_methods(&[1, 2, 3], 3), vec![19; 4]);
        assert_eq!(all_methods(&[1], 1), vec![1; 4]);
    }

    #[test]
    fn interval_closed_form() {
        for x in 1..=60u64 {
            let s = gallery(GalleryKind::Interval, x).unwrap();
            let want = (2 * (x as u128).pow(3) + x as u128) / 3;
            for m in EnergyMethod::ALL {
                assert_eq!(energy(&s, m).unwrap().energy, want, "X={x} {m}");
            }
        }
        let s = gallery(GalleryKind::Interval, 100).unwrap();
        assert_eq!(energy(&s, EnergyMethod::SumHistogram).unwrap().energy, 666_700);
    }

    #[test]
    fn brute_refuses_large_sets() {
        let s = gallery(GalleryKind::Interval, 61).unwrap();
        assert!(matches!(energy(&s, EnergyMethod::QuadrupleBrute), Err(Error::Precondition(_))));
        let empty = IntegerSet::new([], 5).unwrap();
        assert!(energy(&empty, EnergyMethod::Fft).is_err());
    }

    #[test]
    fn json_uses_decimal_strings() {
        let s = gallery(GalleryKind::Interval, 100).unwrap();
        let j = energy(&s, EnergyMethod::Fft).unwrap().to_json();
        assert_eq!(j["E"], "666700");
        assert_eq!(j["E_tilde"], "6667/10000");
        assert_eq!(j["method"], "fft");
    }

    #[test]
    fn method_names_parse() {
        for m in EnergyMethod::ALL {
            assert_eq!(m.name().parse::<EnergyMethod>().unwrap(), m);
        }
        assert!("nope".parse::<EnergyMethod>().is_err());
    }
}
