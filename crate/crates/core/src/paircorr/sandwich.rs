use serde::Serialize;

use super::alpha::AlphaValue;
use super::corr::{pair_corr_direct, CorrelationParams};
use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::setcore::{IntegerSet, SetSource};

/// `N_j = ⌊2^{j^{1−η}}⌋`.
pub fn sandwich_len(j: u64, eta: f64) -> Result<u64> {
    check_eta(eta)?;
    let v = (j as f64).powf(1.0 - eta).exp2().floor();
    if v >= u64::MAX as f64 {
        return Err(Error::Overflow("N_j exceeds 64 bits"));
    }
    Ok(v as u64)
}

/// `N_{j+1} / N_j`, which tends to one. Once `N_j` no longer fits in 64 bits
/// the floors are negligible and the ratio is taken from the exponents.
pub fn sandwich_ratio(j: u64, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    let e = |k: u64| (k as f64).powf(1.0 - eta);
    if e(j + 1) < 60.0 {
        return Ok(sandwich_len(j + 1, eta)? as f64 / sandwich_len(j, eta)? as f64);
    }
    Ok((e(j + 1) - e(j)).exp2())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter(format!("eta must lie in (0, 1), got {eta}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SandwichRow {
    pub j: u64,
    #[serde(rename = "N_j")]
    pub len: u64,
    /// Minimal `X` with `|𝒜 ∩ [1, X]| = N_j`.
    #[serde(rename = "X_j")]
    pub bound: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichSchedule {
    pub eta: f64,
    pub rows: Vec<SandwichRow>,
}

impl SandwichSchedule {
    /// The row `j` with `X_j <= X < X_{j+1}`, if the schedule brackets `X`.
    pub fn bracket(&self, bound: u64) -> Option<(SandwichRow, SandwichRow)> {
        self.rows.windows(2).find(|w| w[0].bound <= bound && bound < w[1].bound).map(|w| (w[0], w[1]))
    }
}

pub fn sandwich_schedule(source: &SetSource, eta: f64, j_max: u64) -> Result<SandwichSchedule> {
    check_eta(eta)?;
    let rows = (1..=j_max)
        .map(|j| {
            let len = sandwich_len(j, eta)?;
            Ok(SandwichRow { j, len, bound: source.nth_element(len)? })
        })
        .collect::<Result<_>>()?;
    Ok(SandwichSchedule { eta, rows })
}

/// The three pair counts `N_j F(s N_j/N_{j+1}, X_j) <= N F(s, X) <=
/// N_{j+1} F(s N_{j+1}/N_j, X_{j+1})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichCheck {
    #[serde(rename = "X")]
    pub bound: u64,
    pub j: u64,
    pub lower: u64,
    pub middle: u64,
    pub upper: u64,
    pub ok: bool,
}

/// Evaluates both sides exactly for one `X` bracketed by the schedule.
pub fn check_sandwich(set: &IntegerSet, schedule: &SandwichSchedule, alpha: AlphaValue, s: Rat, bound: u64) -> Result<SandwichCheck> {
    let (lo, hi) = schedule
        .bracket(bound)
        .ok_or_else(|| Error::Precondition(format!("X = {bound} is not bracketed by the schedule")))?;
    if hi.bound > set.bound() {
        return Err(Error::Precondition(format!("set truncated at {} below X_(j+1) = {}", set.bound(), hi.bound)));
    }
    if lo.len < 2 {
        return Err(Error::Precondition("sandwich needs N_j >= 2".into()));
    }
    let s_lo = s * Rat::new(lo.len, hi.len);
    let s_hi = s * Rat::new(hi.len, lo.len);
    let lower = pair_corr_direct(set, &CorrelationParams::new(alpha, s_lo, lo.bound)?)?;
    let middle = pair_corr_direct(set, &CorrelationParams::new(alpha, s, bound)?)?;
    let upper = pair_corr_direct(set, &CorrelationParams::new(alpha, s_hi, hi.bound)?)?;
    // N·F is the pair count itself, so the comparison is between integers.
    let ok = lower.count <= middle.count && middle.count <= upper.count;
    Ok(SandwichCheck { bound, j: lo.j, lower: lower.count, middle: middle.count, upper: upper.count, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setcore::GalleryKind;

    #[test]
    fn schedule_values() {
        let got: Vec<u64> = (1..=7).map(|j| sandwich_len(j, 0.1).unwrap()).collect();
        assert_eq!(got, vec![2, 3, 6, 11, 19, 32, 54]);
        let r = sandwich_ratio(100, 0.1).unwrap();
        assert!((r - 1.482).abs() < 0.01, "{r}");
        let later = sandwich_ratio(10_000, 0.1).unwrap();
        assert!(later < r && later > 1.0);
        assert!(sandwich_len(3, 1.0).is_err());
    }

    #[test]
    fn schedule_on_squares() {
        let s = sandwich_schedule(&SetSource::Gallery(GalleryKind::Squares), 0.1, 5).unwrap();
        let xs: Vec<u64> = s.rows.iter().map(|r| r.bound).collect();
        assert_eq!(xs, vec![4, 9, 36, 121, 361]);
        assert_eq!(s.bracket(100).unwrap().0.j, 3);
        assert!(s.bracket(2).is_none());
    }

    #[test]
    fn exhausted_source() {
        let fixed = SetSource::Fixed(IntegerSet::new(1..=5, 5).unwrap());
        assert!(matches!(sandwich_schedule(&fixed, 0.1, 4), Err(Error::Exhausted { .. })));
    }

    #[test]
    fn interval_checks() {
        let src = SetSource::Gallery(GalleryKind::Interval);
        let sched = sandwich_schedule(&src, 0.1, 12).unwrap();
        let set = src.truncate(sched.rows.last().unwrap().bound).unwrap();
        let a = AlphaValue::rational(1, 2).unwrap();
        for x in 2..sched.rows.last().unwrap().bound {
            let c = check_sandwich(&set, &sched, a, Rat::from_integer(1), x).unwrap();
            assert!(c.ok, "{c:?}");
        }
    }
}
