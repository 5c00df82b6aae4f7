use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use super::alpha::{AlphaValue, Residue, Window};
use crate::arith::{fmt_ratio, Rat};
use crate::error::{Error, Result};
use crate::rng::{streams, CounterRng};
use crate::setcore::{DiffRep, IntegerSet, SetSource};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationParams {
    pub alpha: AlphaValue,
    pub s: Rat,
    pub bound: u64,
}

impl CorrelationParams {
    pub fn new(alpha: AlphaValue, s: Rat, bound: u64) -> Result<Self> {
        if *s.numer() == 0 {
            return Err(Error::InvalidParameter("s must be positive".into()));
        }
        if bound == 0 {
            return Err(Error::InvalidParameter("X must be >= 1".into()));
        }
        Ok(CorrelationParams { alpha, s, bound })
    }
}

/// `F = count / N`, where `count` is the number of ordered pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CorrelationValue {
    pub count: u64,
    pub set_len: usize,
}

impl CorrelationValue {
    pub fn value(&self) -> Ratio<u64> {
        Ratio::new(self.count, self.set_len as u64)
    }

    pub fn to_f64(&self) -> f64 {
        self.count as f64 / self.set_len as f64
    }
}

fn check_len(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Precondition(format!("pair correlation needs N >= 2, got N = {n}")));
    }
    Ok(())
}

/// Counts ordered pairs `a != b` of `A ∩ [1, X]` with `‖α(a − b)‖ <= s/N`
/// by a circular sweep over the sorted fractional parts `{αa}`.
pub fn pair_corr_direct(set: &IntegerSet, params: &CorrelationParams) -> Result<CorrelationValue> {
    let set = if set.bound() == params.bound { set.clone() } else { set.truncate(params.bound)? };
    let n = set.len();
    check_len(n)?;
    let window = Window::new(&params.alpha, params.s, n as u64)?;
    let total = n as u64 * (n as u64 - 1);
    let count = match window {
        Window::All => total,
        Window::Exact { q, w } => {
            let mut res: Vec<u64> = set
                .elements()
                .iter()
                .map(|&a| match params.alpha.residue(a) {
                    Residue::Exact(d) => d,
                    Residue::Float(_) => unreachable!(),
                })
                .collect();
            res.sort_unstable();
            2 * circular_pairs(&res, q, w)
        }
        Window::Float { t } => {
            let mut res: Vec<f64> = set
                .elements()
                .iter()
                .map(|&a| match params.alpha.residue(a) {
                    Residue::Float(f) => f,
                    Residue::Exact(_) => unreachable!(),
                })
                .collect();
            res.sort_unstable_by(f64::total_cmp);
            2 * circular_pairs_float(&res, t)
        }
    };
    Ok(CorrelationValue { count, set_len: n })
}

/// Unordered pairs of sorted residues modulo `q` at circular distance `<= w`,
/// assuming `2w < q`. Each pair is seen once, from its earlier endpoint going
/// forward, because the backward gap `q - g` then exceeds `w`.
fn circular_pairs(res: &[u64], q: u64, w: u64) -> u64 {
    let n = res.len();
    let at = |k: usize| if k < n { res[k] } else { res[k - n] + q };
    let mut end = 0usize;
    let mut count = 0u64;
    for i in 0..n {
        end = end.max(i + 1);
        while end < i + n && at(end) - res[i] <= w {
            end += 1;
        }
        count += (end - i - 1) as u64;
    }
    count
}

fn circular_pairs_float(res: &[f64], t: f64) -> u64 {
    let n = res.len();
    let at = |k: usize| if k < n { res[k] } else { res[k - n] + 1.0 };
    let mut end = 0usize;
    let mut count = 0u64;
    for i in 0..n {
        end = end.max(i + 1);
        while end < i + n && at(end) - res[i] <= t {
            end += 1;
        }
        count += (end - i - 1) as u64;
    }
    count
}

/// `F = (2/N) Σ_{n <= X, ‖nα‖ <= s/N} r(n)`.
pub fn pair_corr_via_r(rep: &DiffRep, params: &CorrelationParams) -> Result<CorrelationValue> {
    let n = rep.set_len();
    check_len(n)?;
    let window = Window::new(&params.alpha, params.s, n as u64)?;
    let half: u64 = rep
        .iter()
        .filter(|&(k, _)| k <= params.bound && window.admits(params.alpha.residue(k)))
        .map(|(_, r)| r)
        .sum();
    Ok(CorrelationValue { count: 2 * half, set_len: n })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    #[serde(rename = "X")]
    pub bound: u64,
    #[serde(rename = "N")]
    pub set_len: usize,
    pub count: u64,
    /// `count/N` as `p/q`.
    #[serde(rename = "F")]
    pub value: String,
    pub value_f64: f64,
    /// `|F − 2s|`.
    pub deviation: f64,
}

impl ScanRow {
    pub const CSV_HEADER: &'static str = "X,N,count,F,deviation";

    pub fn to_csv(&self) -> String {
        format!("{},{},{},{},{}", self.bound, self.set_len, self.count, self.value, self.deviation)
    }
}

/// `F` at each truncation of `source` along an increasing grid.
pub fn corr_scan(source: &SetSource, alpha: AlphaValue, s: Rat, grid: &[u64]) -> Result<Vec<ScanRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty X grid".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("X grid must be strictly increasing".into()));
    }
    let full = source.truncate(*grid.last().unwrap())?;
    let two_s = 2.0 * *s.numer() as f64 / *s.denom() as f64;
    grid.par_iter()
        .map(|&x| {
            let params = CorrelationParams::new(alpha, s, x)?;
            let v = pair_corr_direct(&full, &params)?;
            Ok(ScanRow {
                bound: x,
                set_len: v.set_len,
                count: v.count,
                value: fmt_ratio(&v.value()),
                value_f64: v.to_f64(),
                deviation: (v.to_f64() - two_s).abs(),
            })
        })
        .collect()
}

/// `α_i = u_i / 2^32` with `u_i` the top half of word `i`, kept exact.
pub fn sample_alpha(seed: u64, index: u64) -> AlphaValue {
    let u = CounterRng::new(seed, streams::ALPHA_SAMPLES).word(index) >> 32;
    AlphaValue::rational(u, 1 << 32).expect("nonzero denominator")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleStats {
    pub samples: u64,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub std_err: f64,
}

impl SampleStats {
    /// Accumulates in index order so the result does not depend on how the
    /// values were produced.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        SampleStats { samples: values.len() as u64, mean, variance, std_err: (variance / n).sqrt() }
    }

    /// Distance from `target` in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_err == 0.0 {
            return if self.mean == target { 0.0 } else { f64::INFINITY };
        }
        (self.mean - target).abs() / self.std_err
    }
}

/// Monte Carlo average of `F(α)` over uniform `α`, to be compared with the
/// exact mean `2s(1 − 1/N)`.
pub fn mean_corr_mc(set: &IntegerSet, s: Rat, samples: u64, seed: u64) -> Result<SampleStats> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    check_len(set.len())?;
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let params = CorrelationParams::new(sample_alpha(seed, i), s, set.bound())?;
            Ok(pair_corr_direct(set, &params)?.to_f64())
        })
        .collect::<Result<_>>()?;
    Ok(SampleStats::from_values(&values))
}

/// `∫₀¹ F dα = 2s(1 − 1/N)`, valid while `s/N` stays below `1/2`.
pub fn mean_corr_exact(set_len: usize, s: Rat) -> Ratio<u64> {
    let n = set_len as u64;
    Ratio::new(2 * s.numer() * (n - 1), s.denom() * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setcore::{diff_rep, gallery, GalleryKind};

    fn brute(set: &IntegerSet, p: u64, q: u64, s: Rat) -> u64 {
        let n = set.len() as u64;
        let mut c = 0;
        for &a in set.elements() {
            for &b in set.elements() {
                if a == b {
                    continue;
                }
                let d = ((a as i128 - b as i128) * p as i128).rem_euclid(q as i128) as u64;
                let dist = d.min(q - d);
                if dist as u128 * *s.denom() as u128 * n as u128 <= *s.numer() as u128 * q as u128 {
                    c += 1;
                }
            }
        }
        c
    }

    fn params(p: u64, q: u64, s: u64, x: u64) -> CorrelationParams {
        CorrelationParams::new(AlphaValue::rational(p, q).unwrap(), Rat::from_integer(s), x).unwrap()
    }

    #[test]
    fn documented_examples() {
        let a = IntegerSet::new(1..=4, 4).unwrap();
        let v = pair_corr_direct(&a, &params(1, 2, 1, 4)).unwrap();
        assert_eq!((v.count, v.value()), (4, Ratio::from_integer(1)));
        let v = pair_corr_direct(&a, &params(0, 1, 1, 4)).unwrap();
        assert_eq!((v.count, v.value()), (12, Ratio::from_integer(3)));
        let b = IntegerSet::new(1..=10, 10).unwrap();
        let v = pair_corr_direct(&b, &params(1, 2, 1, 10)).unwrap();
        assert_eq!((v.count, v.value()), (40, Ratio::from_integer(4)));
        let c = IntegerSet::new(1..=3, 3).unwrap();
        let v = pair_corr_via_r(&diff_rep(&c).unwrap(), &params(1, 3, 1, 3)).unwrap();
        assert_eq!(v.value(), Ratio::from_integer(2));
    }

    #[test]
    fn rejects_small_sets() {
        let a = IntegerSet::new([5], 9).unwrap();
        assert!(matches!(pair_corr_direct(&a, &params(1, 2, 1, 9)), Err(Error::Precondition(_))));
    }

    #[test]
    fn duplicate_residues_and_ties() {
        // Many elements share residues modulo small q.
        let a = IntegerSet::new((1..=60).map(|k| k * 3), 180).unwrap();
        for q in 2..13 {
            for p in 0..q {
                for s in [1, 2, 7, 30] {
                    let pr = params(p, q, s, 180);
                    let Some(AlphaValue::Rational { p, q }) = Some(pr.alpha) else { unreachable!() };
                    let want = brute(&a, p, q, pr.s);
                    assert_eq!(pair_corr_direct(&a, &pr).unwrap().count, want, "{p}/{q} s={s}");
                }
            }
        }
    }

    #[test]
    fn wide_window_counts_everything() {
        let a = gallery(GalleryKind::Squares, 400).unwrap();
        let n = a.len() as u64;
        let v = pair_corr_direct(&a, &params(3, 7, n / 2, 400)).unwrap();
        assert_eq!(v.count, n * (n - 1));
        let pr = CorrelationParams::new(AlphaValue::float(0.3).unwrap(), Rat::from_integer(n), 400).unwrap();
        assert_eq!(pair_corr_direct(&a, &pr).unwrap().count, n * (n - 1));
    }

    #[test]
    fn float_matches_exact_away_from_ties() {
        let a = gallery(GalleryKind::Squares, 10_000).unwrap();
        let exact = params(70_001, 169_001, 1, 10_000);
        let fl = CorrelationParams { alpha: AlphaValue::float(exact.alpha.to_f64()).unwrap(), ..exact };
        let e = pair_corr_direct(&a, &exact).unwrap().count as i64;
        let f = pair_corr_direct(&a, &fl).unwrap().count as i64;
        assert!((e - f).abs() <= 4, "{e} vs {f}");
    }

    #[test]
    fn truncation_via_params() {
        let a = IntegerSet::new(1..=10, 10).unwrap();
        let v = pair_corr_direct(&a, &params(1, 2, 1, 4)).unwrap();
        assert_eq!((v.count, v.set_len), (4, 4));
    }

    #[test]
    fn scan_rows_are_ordered() {
        let rows = corr_scan(&SetSource::Gallery(GalleryKind::Interval), AlphaValue::rational(1, 2).unwrap(), Rat::from_integer(1), &[4, 10, 20]).unwrap();
        assert_eq!(rows.iter().map(|r| r.bound).collect::<Vec<_>>(), vec![4, 10, 20]);
        assert_eq!(rows[1].value, "4");
        assert_eq!(rows[1].to_csv(), "10,10,40,4,2");
        assert!(corr_scan(&SetSource::Gallery(GalleryKind::Interval), AlphaValue::rational(1, 2).unwrap(), Rat::from_integer(1), &[10, 4]).is_err());
    }

    #[test]
    fn alpha_samples_are_reproducible() {
        assert_eq!(sample_alpha(3, 17), sample_alpha(3, 17));
        assert_ne!(sample_alpha(3, 17), sample_alpha(4, 17));
    }

    #[test]
    fn exact_mean_formula() {
        assert_eq!(mean_corr_exact(4, Rat::from_integer(1)), Ratio::new(3, 2));
    }
}
