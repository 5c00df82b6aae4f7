//! The random-set model: each `x` joins `𝒜` independently with probability
//! `ψ(x) = 1` for `x <= 20` and `(log x)⁻¹ (log log x)^{−C}` beyond.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, streams, to_unit, CounterRng};
use crate::setcore::{diff_rep, energy, transform, EnergyMethod, IntegerSet, MAX_BOUND};

/// Below or at this point every integer is included.
pub const CUTOFF: u64 = 20;

const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomModelParams {
    exponent: f64,
    seed: u64,
}

impl RandomModelParams {
    pub fn new(exponent: f64, seed: u64) -> Result<Self> {
        if !exponent.is_finite() || exponent < 0.0 {
            return Err(Error::InvalidParameter(format!("C must be finite and >= 0, got {exponent}")));
        }
        Ok(RandomModelParams { exponent, seed })
    }

    /// The exponent `C`.
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cutoff(&self) -> u64 {
        CUTOFF
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        RandomModelParams { seed, ..*self }
    }
}

/// Inclusion probability `ψ(x)`, evaluated in double precision.
pub fn psi(x: u64, exponent: f64) -> Result<f64> {
    if x == 0 {
        return Err(Error::Domain("psi is defined for x >= 1".into()));
    }
    Ok(psi_unchecked(x, exponent))
}

#[inline]
fn psi_unchecked(x: u64, exponent: f64) -> f64 {
    if x <= CUTOFF {
        return 1.0;
    }
    let l = (x as f64).ln();
    1.0 / (l * l.ln().powf(exponent))
}

/// `Σ_{x <= X} ψ(x)`, the expected size of a sample.
pub fn expected_len(bound: u64, exponent: f64) -> f64 {
    (1..=bound).map(|x| psi_unchecked(x, exponent)).sum()
}

/// `Σ_{x <= X} ψ(x)(1 − ψ(x))`, the variance of the sample size.
pub fn len_variance(bound: u64, exponent: f64) -> f64 {
    (1..=bound).map(|x| {
        let p = psi_unchecked(x, exponent);
        p * (1.0 - p)
    })
    .sum()
}

/// `Σ_{x <= X} ψ(x)²`.
pub fn sum_psi_squared(bound: u64, exponent: f64) -> f64 {
    (1..=bound).map(|x| psi_unchecked(x, exponent).powi(2)).sum()
}

/// `E r(n) = Σ_{x <= X − n} ψ(x) ψ(x + n)`.
pub fn expected_rep(n: u64, bound: u64, exponent: f64) -> f64 {
    (1..=bound.saturating_sub(n))
        .map(|x| psi_unchecked(x, exponent) * psi_unchecked(x + n, exponent))
        .sum()
}

/// Draws `𝒜 ∩ [1, X]`. Membership of `x` depends only on `(seed, x)`, so
/// samples at different bounds with one seed are nested.
pub fn sample_set(bound: u64, params: &RandomModelParams) -> Result<IntegerSet> {
    if bound == 0 || bound > MAX_BOUND {
        return Err(Error::InvalidParameter(format!("X must lie in [1, {MAX_BOUND}]")));
    }
    let rng = CounterRng::new(params.seed, streams::SET_MEMBERSHIP);
    let chunks = bound.div_ceil(CHUNK);
    let parts: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK + 1;
            let end = ((c + 1) * CHUNK).min(bound);
            let mut words = vec![0u64; (end - start + 1) as usize];
            rng.fill(start - 1, &mut words);
            (start..=end)
                .zip(words)
                .filter(|&(x, w)| to_unit(w) < psi_unchecked(x, params.exponent))
                .map(|(x, _)| x)
                .collect()
        })
        .collect();
    Ok(IntegerSet::from_sorted(parts.concat(), bound))
}

/// [`sample_set`] with the model's precondition `X >= 21` enforced.
pub fn sample_model_set(bound: u64, params: &RandomModelParams) -> Result<IntegerSet> {
    if bound <= CUTOFF {
        return Err(Error::Precondition(format!("random model needs X >= {}, got {bound}", CUTOFF + 1)));
    }
    sample_set(bound, params)
}

/// Both concentration properties, each against its literal asymptotic
/// baseline and against the exact expectation it approximates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    #[serde(rename = "X")]
    pub bound: u64,
    #[serde(rename = "N")]
    pub set_len: usize,
    pub epsilon: f64,
    /// `N / (X (log X)⁻¹ (log log X)^{−C})`.
    pub property1_literal_ratio: f64,
    pub property1_literal_ok: bool,
    /// `N / Σψ`.
    pub property1_ratio: f64,
    pub property1_ok: bool,
    pub max_rep: u64,
    pub max_rep_at: u64,
    /// `(1+ε) X (log X)⁻² (log log X)^{−2C}`.
    pub property2_literal_bound: f64,
    pub property2_literal_ok: bool,
    /// `(1+ε) Σ ψ²`.
    pub property2_bound: f64,
    pub property2_ok: bool,
    /// `min_{n <= X/3} r(n)` against `δN/8`.
    pub min_rep_lower_third: u64,
    pub lower_bound: f64,
    pub lower_bound_ok: bool,
}

/// Precomputed exact baselines for one `(X, C)`, reusable across seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Baselines {
    pub bound: u64,
    pub exponent: f64,
    pub sum_psi: f64,
    pub sum_psi_sq: f64,
}

impl Baselines {
    pub fn new(bound: u64, exponent: f64) -> Self {
        Baselines {
            bound,
            exponent,
            sum_psi: expected_len(bound, exponent),
            sum_psi_sq: sum_psi_squared(bound, exponent),
        }
    }
}

pub fn concentration_check(set: &IntegerSet, bound: u64, exponent: f64, epsilon: f64) -> Result<ConcentrationReport> {
    concentration_with(set, &Baselines::new(bound, exponent), epsilon)
}

pub fn concentration_with(set: &IntegerSet, base: &Baselines, epsilon: f64) -> Result<ConcentrationReport> {
    let bound = base.bound;
    if set.bound() != bound {
        return Err(Error::Precondition(format!("set was truncated at {} but X = {bound}", set.bound())));
    }
    if bound <= CUTOFF {
        return Err(Error::Precondition(format!("X must exceed {CUTOFF}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let c = base.exponent;
    let lx = (bound as f64).ln();
    let llx = lx.ln();
    let n = set.len();
    let literal1 = bound as f64 / (lx * llx.powf(c));
    let p1_lit = n as f64 / literal1;
    let p1 = n as f64 / base.sum_psi;

    let rep = diff_rep(set)?;
    let (max_rep_at, max_rep) = rep.iter().fold((0, 0), |best, (k, r)| if r > best.1 { (k, r) } else { best });
    let literal2 = (1.0 + epsilon) * bound as f64 / (lx * lx * llx.powf(2.0 * c));
    let exact2 = (1.0 + epsilon) * base.sum_psi_sq;

    let third = bound / 3;
    let min_rep = (1..=third).map(|k| rep.get(k)).min().unwrap_or(0);
    let lower = n as f64 * n as f64 / bound as f64 / 8.0;

    Ok(ConcentrationReport {
        bound,
        set_len: n,
        epsilon,
        property1_literal_ratio: p1_lit,
        property1_literal_ok: (1.0 - epsilon..=1.0 + epsilon).contains(&p1_lit),
        property1_ratio: p1,
        property1_ok: (1.0 - epsilon..=1.0 + epsilon).contains(&p1),
        max_rep,
        max_rep_at,
        property2_literal_bound: literal2,
        property2_literal_ok: (max_rep as f64) <= literal2,
        property2_bound: exact2,
        property2_ok: (max_rep as f64) <= exact2,
        min_rep_lower_third: min_rep,
        lower_bound: lower,
        lower_bound_ok: third == 0 || (min_rep as f64) >= lower,
    })
}

/// One `(X, trial)` cell of the energy-scaling experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    #[serde(rename = "X")]
    pub bound: u64,
    pub trial: u64,
    #[serde(rename = "N")]
    pub set_len: usize,
    #[serde(rename = "E")]
    pub energy: String,
    /// `E (log N)(log log N)^C / N³`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingSummary {
    pub rows: Vec<ScalingRow>,
    pub min_ratio: f64,
    pub median_ratio: f64,
    pub max_ratio: f64,
    /// Median ratio at each bound, in grid order.
    pub medians: Vec<(u64, f64)>,
    /// Largest over smallest per-bound median.
    pub median_drift: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) }
}

/// Samples `trials` sets per bound, computes their energy by transform and
/// reports `E (log N)(log log N)^C / N³`.
pub fn energy_scaling(exponent: f64, grid: &[u64], trials: u64, seed: u64) -> Result<ScalingSummary> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty X grid".into()));
    }
    if let Some(&x) = grid.iter().find(|&&x| x > transform::MAX_TRANSFORM_BOUND) {
        return Err(Error::ResourceGuard(format!("X = {x} exceeds the 2^26 memory guard")));
    }
    let base = RandomModelParams::new(exponent, seed)?;
    let cells: Vec<(u64, u64)> = grid.iter().flat_map(|&x| (0..trials).map(move |t| (x, t))).collect();
    let rows: Vec<ScalingRow> = cells
        .par_iter()
        .map(|&(x, t)| -> Result<ScalingRow> {
            let set = sample_model_set(x, &base.with_seed(derive_seed(seed, t)))?;
            let n = set.len() as f64;
            let ln = n.ln();
            if ln.ln() <= 0.0 {
                return Err(Error::Domain(format!("N = {} too small for log log N > 0", set.len())));
            }
            let e = energy(&set, EnergyMethod::Fft)?;
            let ratio = e.energy as f64 * ln * ln.ln().powf(exponent) / n.powi(3);
            Ok(ScalingRow { bound: x, trial: t, set_len: set.len(), energy: e.energy.to_string(), ratio })
        })
        .collect::<Result<_>>()?;
    let all: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let medians: Vec<(u64, f64)> = grid
        .iter()
        .map(|&x| {
            let v: Vec<f64> = rows.iter().filter(|r| r.bound == x).map(|r| r.ratio).collect();
            (x, median(&v))
        })
        .collect();
    let hi = medians.iter().map(|m| m.1).fold(f64::MIN, f64::max);
    let lo = medians.iter().map(|m| m.1).fold(f64::MAX, f64::min);
    Ok(ScalingSummary {
        min_ratio: all.iter().copied().fold(f64::MAX, f64::min),
        median_ratio: median(&all),
        max_ratio: all.iter().copied().fold(f64::MIN, f64::max),
        median_drift: hi / lo,
        medians,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setcore::EnergyMethod;

    #[test]
    fn psi_values() {
        assert_eq!(psi(20, 3.0).unwrap(), 1.0);
        assert_eq!(psi(1, 0.0).unwrap(), 1.0);
        assert!((psi(21, 0.0).unwrap() - 0.328_458_738_753_051).abs() < 1e-14);
        // Reference value from a 40-digit evaluation.
        assert!((psi(1_000_000, 3.0).unwrap() - 0.003_998_086_084_551_594).abs() < 1e-15);
        assert!(psi(0, 1.0).is_err());
    }

    #[test]
    fn psi_weakly_decreasing() {
        for c in [0.0, 1.0, 3.0] {
            let mut prev = f64::INFINITY;
            for x in (1..200_000).step_by(7) {
                let p = psi(x, c).unwrap();
                assert!(p <= prev && p > 0.0 && p <= 1.0);
                prev = p;
            }
        }
    }

    #[test]
    fn cutoff_block_always_present() {
        let p = RandomModelParams::new(3.0, 99).unwrap();
        for seed in 0..10 {
            let s = sample_model_set(1000, &p.with_seed(seed)).unwrap();
            assert!((1..=20).all(|x| s.contains(x)));
        }
        assert!(sample_model_set(20, &p).is_err());
    }

    #[test]
    fn samples_are_deterministic_and_nested() {
        let p = RandomModelParams::new(1.0, 7).unwrap();
        let big = sample_model_set(300_000, &p).unwrap();
        assert_eq!(big, sample_model_set(300_000, &p).unwrap());
        let small = sample_model_set(100_000, &p).unwrap();
        assert_eq!(big.truncate(100_000).unwrap(), small);
    }

    #[test]
    fn degenerate_report_is_finite() {
        let a = IntegerSet::new(1..=20, 21).unwrap();
        let r = concentration_check(&a, 21, 3.0, 0.5).unwrap();
        assert!(r.property1_ratio.is_finite() && r.property1_literal_ratio > 0.0);
        assert!(r.property2_bound.is_finite());
    }

    #[test]
    fn energy_identity_on_samples() {
        let p = RandomModelParams::new(3.0, 11).unwrap();
        let s = sample_model_set(200_000, &p).unwrap();
        let fft = energy(&s, EnergyMethod::Fft).unwrap().energy;
        assert_eq!(fft, energy(&s, EnergyMethod::DifferenceIdentity).unwrap().energy);
        assert_eq!(fft, energy(&s, EnergyMethod::SumHistogram).unwrap().energy);
    }

    #[test]
    fn expected_rep_decreases_in_n() {
        let a = expected_rep(1, 10_000, 3.0);
        let b = expected_rep(10, 10_000, 3.0);
        let c = expected_rep(1000, 10_000, 3.0);
        assert!(a > b && b > c);
        assert!(a <= sum_psi_squared(10_000, 3.0));
    }

    #[test]
    fn scaling_rejects_bad_input() {
        assert!(matches!(energy_scaling(3.0, &[1 << 27], 1, 0), Err(Error::ResourceGuard(_))));
        assert!(energy_scaling(3.0, &[], 1, 0).is_err());
        assert!(energy_scaling(3.0, &[1 << 12], 0, 0).is_err());
    }

    #[test]
    fn scaling_is_reproducible() {
        let a = energy_scaling(3.0, &[1 << 14, 1 << 15], 2, 5).unwrap();
        let b = energy_scaling(3.0, &[1 << 14, 1 << 15], 2, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 4);
    }
}
