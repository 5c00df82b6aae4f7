use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::audit::{fmt_big, BoundAudit};
use super::config::SchmidtConfig;
use super::fstar::{l1_distance_exact, to_f64, FStarEvaluator};
use super::overlap::overlap_count;
use super::phi::phi_deficits;
use crate::arith::{exact_sum, gcd};
use crate::error::{Error, Result};
use crate::paircorr::{sample_alpha, SampleStats};
use crate::setcore::{diff_rep, energy, DiffRep, EnergyMethod, IntegerSet};

/// Supports of `r` larger than this need an explicit override.
pub const SUPPORT_LIMIT: usize = 10_000;

/// Fewest Monte Carlo samples accepted.
pub const MIN_SAMPLES: u64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceComponents {
    /// `N⁻² Σ r(n)(1 − Φ(n)/n)`.
    pub s1: BigRational,
    /// `N⁻³ Σ_{m, n} r(m) r(n) A(m, n)/√(mn)`.
    pub s2: f64,
    /// `N⁻³ Σ_{m <= n} r(m) r(n) A(m, n)/n`.
    pub s3: BigRational,
    /// Upper bounds for `S2`, each at most the next:
    /// `A(m, n) <= (m, n)`; dropping coprimality of `m/g, n/g`;
    /// Cauchy–Schwarz over `y <= T` with weight `Σ_{y <= T} 1/y`.
    pub chain: [f64; 3],
    /// `Ẽ T log T`, the shape the last link is compared with.
    pub chain_shape: f64,
}

impl VarianceComponents {
    /// `S2` followed by its chain of upper bounds.
    pub fn links(&self) -> [f64; 4] {
        [self.s2, self.chain[0], self.chain[1], self.chain[2]]
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "S1": fmt_big(&self.s1),
            "S1_f64": to_f64(&self.s1),
            "S2": self.s2,
            "S3": fmt_big(&self.s3),
            "S3_f64": to_f64(&self.s3),
            "chain": self.chain,
            "chain_shape": self.chain_shape,
        })
    }
}

fn check_support(rep: &DiffRep, force: bool) -> Result<()> {
    let k = rep.iter().count();
    if k > SUPPORT_LIMIT && !force {
        return Err(Error::ResourceGuard(format!("support of r has {k} points (> {SUPPORT_LIMIT}); pass --force")));
    }
    Ok(())
}

/// `S1`, `S2`, `S3` and the bounds for `S2`. Only `m = gy`, `n = gz` with
/// `y, z <= T` can have `A(m, n) != 0`, which keeps the double sums small.
pub fn variance_components(set: &IntegerSet, cfg: &SchmidtConfig, force: bool) -> Result<VarianceComponents> {
    let rep = diff_rep(set)?;
    check_support(&rep, force)?;
    let x = set.bound();
    let n3 = (set.len() as f64).powi(3);
    let big = |v: u128| BigInt::from(v);
    let n = set.len() as u128;
    if n == 0 {
        return Err(Error::Precondition("set is empty".into()));
    }

    let deficit = phi_deficits(x, cfg.threshold);
    let s1 = exact_sum(
        rep.iter()
            .filter(|&(k, _)| deficit[k as usize] > 0)
            .map(|(k, r)| BigRational::new(big(r as u128 * deficit[k as usize] as u128), big(k as u128 * n * n)))
            .collect(),
    );

    let tf = cfg.threshold.floor().min(x);
    let mut s2 = 0.0;
    let mut link1 = 0.0;
    let mut s3_terms = Vec::new();
    for z in 1..=tf {
        for y in 1..=tf {
            if gcd(y, z) != 1 {
                continue;
            }
            let w = 1.0 / ((y * z) as f64).sqrt();
            for g in 1..=x / y.max(z) {
                let (rm, rn) = (rep.get(g * y), rep.get(g * z));
                if rm == 0 || rn == 0 {
                    continue;
                }
                let a = overlap_count(g * z, g * y, cfg.threshold)?;
                let rr = rm as f64 * rn as f64;
                s2 += rr * a as f64 * w / g as f64;
                link1 += rr * w;
                if y <= z && a > 0 {
                    s3_terms.push(BigRational::new(big(rm as u128 * rn as u128 * a as u128), big(g as u128 * z as u128)));
                }
            }
        }
    }
    let s3 = exact_sum(s3_terms) / BigRational::from_integer(big(n * n * n));

    let mut link2 = 0.0;
    for g in 1..=x {
        let inner: f64 = (1..=tf.min(x / g)).map(|y| rep.get(g * y) as f64 / (y as f64).sqrt()).sum();
        link2 += inner * inner;
    }
    let harmonic: f64 = (1..=tf).map(|y| 1.0 / y as f64).sum();
    let link3: f64 = rep
        .iter()
        .map(|(k, r)| (r as f64).powi(2) * (1..=tf).filter(|y| k % y == 0).count() as f64)
        .sum::<f64>()
        * harmonic;

    let e = energy(set, EnergyMethod::DifferenceIdentity)?.normalized_f64();
    let t = cfg.t();
    Ok(VarianceComponents {
        s1,
        s2: s2 / n3,
        s3,
        chain: [link1 / n3, link2 / n3, link3 / n3],
        chain_shape: e * t * t.ln(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceReport {
    pub samples: u64,
    pub seed: u64,
    pub f: SampleStats,
    pub f_star: SampleStats,
    /// Samples of `F − F* = |F − F*|`.
    pub defect: SampleStats,
    /// `2s(1 − 1/N)`.
    pub mean_f_exact: f64,
    pub mean_f_star_exact: f64,
    pub l1_exact: f64,
    /// `(√log T / T)(Ẽ/δ)^{1/2} + Ẽ T log T`.
    pub shape_general: f64,
    pub ratio_general: f64,
    /// `1/T + (log X)⁻¹ (log log X)^{−C} log T`, when `C` is given.
    pub shape_random: Option<f64>,
    pub ratio_random: Option<f64>,
}

/// Seeded Monte Carlo over `α = u/2^32`. Every value is an exact pair count
/// and the statistics are accumulated in sample order, so the report does
/// not depend on the number of worker threads.
pub fn variance_mc(set: &IntegerSet, cfg: &SchmidtConfig, samples: u64, seed: u64, exponent: Option<f64>) -> Result<VarianceReport> {
    if samples < MIN_SAMPLES {
        return Err(Error::Precondition(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    let rep = diff_rep(set)?;
    let ev = FStarEvaluator::new(&rep, cfg)?;
    let pairs: Vec<(u64, u64)> = (0..samples)
        .into_par_iter()
        .map(|i| ev.eval(&sample_alpha(seed, i)).map(|(f, fs)| (f.count, fs.count)))
        .collect::<Result<_>>()?;
    let n = set.len() as f64;
    let col = |k: usize| -> Vec<f64> { pairs.iter().map(|p| [p.0 as f64, p.1 as f64, (p.0 - p.1) as f64][k] / n).collect() };
    let f = SampleStats::from_values(&col(0));
    let f_star = SampleStats::from_values(&col(1));
    let defect = SampleStats::from_values(&col(2));

    let l1 = l1_distance_exact(set, cfg)?;
    let e = energy(set, EnergyMethod::DifferenceIdentity)?.normalized_f64();
    let delta = n / cfg.bound as f64;
    let t = cfg.t();
    let shape_general = t.ln().sqrt() / t * (e / delta).sqrt() + e * t * t.ln();
    let shape_random = exponent.map(|c| {
        let lx = (cfg.bound as f64).ln();
        1.0 / t + t.ln() / (lx * lx.ln().powf(c))
    });
    Ok(VarianceReport {
        samples,
        seed,
        mean_f_exact: to_f64(&l1.integral_f),
        mean_f_star_exact: to_f64(&l1.integral_f_star),
        l1_exact: to_f64(&l1.distance),
        ratio_general: f_star.variance / shape_general,
        shape_general,
        ratio_random: shape_random.map(|s| f_star.variance / s),
        shape_random,
        f,
        f_star,
        defect,
    })
}

impl VarianceReport {
    pub fn audits(&self, cfg: &SchmidtConfig) -> Vec<BoundAudit> {
        let mut out = vec![BoundAudit::approx("variance_general", cfg.describe(), self.f_star.variance, self.shape_general)];
        if let Some(s) = self.shape_random {
            out.push(BoundAudit::approx("variance_random", cfg.describe(), self.f_star.variance, s));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rat;
    use num_traits::Zero;

    #[test]
    fn small_example_components() {
        let a = IntegerSet::new(1..=4, 4).unwrap();
        let cfg = SchmidtConfig::for_set(&a, 2.0, Rat::from_integer(1)).unwrap();
        let v = variance_components(&a, &cfg, false).unwrap();
        // r = (3, 2, 1); only n = 3 loses u = 3 under T = 2.
        assert_eq!(v.s1, BigRational::new(BigInt::from(1), BigInt::from(48)));
        assert!(to_f64(&v.s3) <= v.s2 * (1.0 + 1e-12));
        let l = v.links();
        assert!(l.windows(2).all(|w| w[0] <= w[1] * (1.0 + 1e-12)), "{l:?}");
    }

    #[test]
    fn brute_force_sums() {
        let a = IntegerSet::new([2, 3, 5, 8, 13, 21, 34, 35, 40], 40).unwrap();
        let cfg = SchmidtConfig::for_set(&a, 3.0, Rat::from_integer(1)).unwrap();
        let v = variance_components(&a, &cfg, false).unwrap();
        let rep = diff_rep(&a).unwrap();
        let (mut s2, mut s3) = (0.0, 0.0);
        for m in 1..=40u64 {
            for k in 1..=40u64 {
                let a = overlap_count(m, k, cfg.threshold).unwrap() as f64;
                let rr = rep.get(m) as f64 * rep.get(k) as f64;
                s2 += rr * a / ((m * k) as f64).sqrt();
                if m <= k {
                    s3 += rr * a / k as f64;
                }
            }
        }
        let n3 = 9f64.powi(3);
        assert!((v.s2 - s2 / n3).abs() < 1e-12);
        assert!((to_f64(&v.s3) - s3 / n3).abs() < 1e-12);
    }

    #[test]
    fn large_threshold_kills_s1() {
        let a = IntegerSet::new([1, 4, 9, 16, 25], 25).unwrap();
        let cfg = SchmidtConfig::for_set(&a, 25.0, Rat::from_integer(1)).unwrap();
        assert!(variance_components(&a, &cfg, false).unwrap().s1.is_zero());
    }

    #[test]
    fn mc_is_reproducible_and_checks_samples() {
        let a = IntegerSet::new((1..=40).map(|k| k * k), 1600).unwrap();
        let cfg = SchmidtConfig::for_set(&a, 3.0, Rat::from_integer(1)).unwrap();
        assert!(variance_mc(&a, &cfg, 10, 1, None).is_err());
        let r1 = variance_mc(&a, &cfg, 2000, 9, Some(3.0)).unwrap();
        let r2 = variance_mc(&a, &cfg, 2000, 9, Some(3.0)).unwrap();
        assert_eq!(r1, r2);
        assert!(r1.f.z_score(r1.mean_f_exact) < 4.0);
        assert!(r1.f_star.mean <= r1.f.mean);
    }
}
