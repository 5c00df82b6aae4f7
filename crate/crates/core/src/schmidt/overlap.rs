use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use serde::Serialize;

use super::arcs::en_intersection;
use super::audit::BoundAudit;
use super::config::SchmidtConfig;
use crate::arith::{divisors, exact_sum, gcd, totient, Threshold};
use crate::error::{Error, Result};

/// Above this bound the average-overlap sweep needs an explicit override.
pub const AVG_OVERLAP_LIMIT: u64 = 10_000;

/// `A(n, m) = #{u <= n, v <= m : u/n = v/m, (u, n) <= T, (v, m) <= T}` by
/// scanning `u`.
pub fn overlap_brute(n: u64, m: u64, t: Threshold) -> u64 {
    (1..=n)
        .filter(|&u| (u * m) % n == 0)
        .filter(|&u| t.admits(gcd(u, n)) && t.admits(gcd(u * m / n, m)))
        .count() as u64
}

/// `A(m, n)` through `u = λ n/g`, `v = λ m/g` with `λ <= g = (m, n)`: both
/// gcd conditions become `(λ, g) · max(m, n)/g <= T`.
pub fn overlap_count(n: u64, m: u64, t: Threshold) -> Result<u64> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be >= 1".into()));
    }
    let g = gcd(n, m);
    let big = n.max(m) / g;
    Ok(overlap_reduced(g, big, t))
}

/// `#{λ <= g : (λ, g) · big <= T}`.
fn overlap_reduced(g: u64, big: u64, t: Threshold) -> u64 {
    if !t.admits(big) {
        return 0;
    }
    divisors(g).into_iter().filter(|&d| t.admits(d * big)).map(|d| totient(g / d)).sum()
}

/// One case of `μ(E_n ∩ E_m) <= 4s²/N² + (2s/N) A(n, m)/n` for `n >= m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverlapCheck {
    pub n: u64,
    pub m: u64,
    pub overlap: u64,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

pub fn overlap_measure_check(n: u64, m: u64, cfg: &SchmidtConfig) -> Result<(Ratio<u128>, Ratio<u128>, u64)> {
    if m == 0 || n < m {
        return Err(Error::Precondition(format!("need n >= m >= 1, got n={n}, m={m}")));
    }
    let lhs = en_intersection(n, m, cfg)?;
    let a = overlap_count(n, m, cfg.threshold)?;
    let (sn, sd, big_n) = (*cfg.s.numer() as u128, *cfg.s.denom() as u128, cfg.set_len as u128);
    let rhs = Ratio::new(4 * sn * sn, sd * sd * big_n * big_n) + Ratio::new(2 * sn * a as u128, sd * big_n * n as u128);
    Ok((lhs, rhs, a))
}

pub fn overlap_measure_audit(n: u64, m: u64, cfg: &SchmidtConfig) -> Result<BoundAudit> {
    let (lhs, rhs, _) = overlap_measure_check(n, m, cfg)?;
    let lhs = BigRational::new(BigInt::from(*lhs.numer()), BigInt::from(*lhs.denom()));
    let rhs = *rhs.numer() as f64 / *rhs.denom() as f64;
    Ok(BoundAudit::exact("overlap_measure", format!("n={n};m={m};{}", cfg.describe()), &lhs, rhs))
}

/// Every `1 <= m <= n <= n_max` for one configuration; returns the number of
/// cases and the violations found.
pub fn overlap_sweep(n_max: u64, cfg: &SchmidtConfig) -> Result<(u64, Vec<OverlapCheck>)> {
    let mut cases = 0;
    let mut bad = Vec::new();
    for n in 1..=n_max {
        for m in 1..=n {
            cases += 1;
            let (lhs, rhs, a) = overlap_measure_check(n, m, cfg)?;
            if lhs > rhs {
                bad.push(OverlapCheck {
                    n,
                    m,
                    overlap: a,
                    lhs: format!("{}/{}", lhs.numer(), lhs.denom()),
                    rhs: format!("{}/{}", rhs.numer(), rhs.denom()),
                    holds: false,
                });
            }
        }
    }
    Ok((cases, bad))
}

/// `Σ_{n <= X} Σ_{m <= n} A(m, n)/n`, using that only `m = gy`, `n = gz`
/// with coprime `y <= z <= T` contribute.
pub fn avg_overlap_sum(bound: u64, t: Threshold) -> BigRational {
    let tf = t.floor().min(bound);
    let mut per_n = vec![0u64; bound as usize + 1];
    for z in 1..=tf {
        for y in 1..=z {
            if gcd(y, z) != 1 {
                continue;
            }
            for g in 1..=bound / z {
                per_n[(g * z) as usize] += overlap_reduced(g, z, t);
            }
        }
    }
    exact_sum(
        (1..=bound)
            .filter(|&n| per_n[n as usize] > 0)
            .map(|n| BigRational::new(BigInt::from(per_n[n as usize]), BigInt::from(n)))
            .collect(),
    )
}

/// The same double sum by evaluating every `A(m, n)`.
pub fn avg_overlap_sum_brute(bound: u64, t: Threshold) -> BigRational {
    exact_sum(
        (1..=bound)
            .map(|n| {
                let inner: u64 = (1..=n).map(|m| overlap_brute(n, m, t)).sum();
                BigRational::new(BigInt::from(inner), BigInt::from(n))
            })
            .collect(),
    )
}

/// The double sum against `X log T`.
pub fn avg_overlap_audit(bound: u64, threshold: f64, force: bool) -> Result<BoundAudit> {
    let t = Threshold::new(threshold)?;
    if bound < 2 || t.value() < 2.0 {
        return Err(Error::InvalidParameter("need X >= 2 and T >= 2".into()));
    }
    if bound > AVG_OVERLAP_LIMIT && !force {
        return Err(Error::ResourceGuard(format!("X = {bound} exceeds {AVG_OVERLAP_LIMIT}; pass --force")));
    }
    let lhs = avg_overlap_sum(bound, t);
    Ok(BoundAudit::exact("avg_overlap", format!("X={bound};T={threshold}"), &lhs, bound as f64 * t.value().ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rat;

    fn th(t: f64) -> Threshold {
        Threshold::new(t).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(overlap_count(4, 2, th(4.0)).unwrap(), 2);
        assert_eq!(overlap_brute(4, 2, th(4.0)), 2);
        assert_eq!(overlap_count(7, 7, th(7.0)).unwrap(), 7);
        // max(m, n)/(m, n) = 5 > T.
        assert_eq!(overlap_count(5, 1, th(4.0)).unwrap(), 0);
        assert_eq!(overlap_count(3, 2, th(3.0)).unwrap(), 1);
    }

    #[test]
    fn routes_agree() {
        for t in [2.0, 10.0, 100.0] {
            for n in 1..=120u64 {
                for m in 1..=120u64 {
                    let a = overlap_count(n, m, th(t)).unwrap();
                    assert_eq!(a, overlap_brute(n, m, th(t)), "n={n} m={m} T={t}");
                    assert_eq!(a, overlap_count(m, n, th(t)).unwrap());
                    assert!(a <= gcd(n, m));
                    if a > 0 {
                        assert!(th(t).admits(n.max(m) / gcd(n, m)));
                    }
                }
            }
        }
    }

    #[test]
    fn lemma_example() {
        let c = SchmidtConfig::new(3.0, Rat::from_integer(1), 8, 100).unwrap();
        let (lhs, rhs, a) = overlap_measure_check(3, 2, &c).unwrap();
        assert_eq!((lhs, rhs, a), (Ratio::new(1, 12), Ratio::new(7, 48), 1));
        assert!(overlap_measure_check(2, 3, &c).is_err());
    }

    #[test]
    fn small_sweep() {
        for s in [Rat::new(1, 2), Rat::from_integer(1), Rat::from_integer(3)] {
            let c = SchmidtConfig::new(2.0, s, 50, 1000).unwrap();
            let (cases, bad) = overlap_sweep(40, &c).unwrap();
            assert_eq!(cases, 820);
            assert!(bad.is_empty(), "{bad:?}");
        }
    }

    #[test]
    fn average_overlap() {
        assert_eq!(avg_overlap_sum(2, th(2.0)), BigRational::new(5.into(), 2.into()));
        for t in [2.0, 3.5, 8.0] {
            assert_eq!(avg_overlap_sum(150, th(t)), avg_overlap_sum_brute(150, th(t)));
        }
        assert!(matches!(avg_overlap_audit(20_000, 2.0, false), Err(Error::ResourceGuard(_))));
        assert!(avg_overlap_audit(20_000, 2.0, true).is_ok());
    }
}
