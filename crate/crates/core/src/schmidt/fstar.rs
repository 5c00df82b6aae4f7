use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::audit::BoundAudit;
use super::config::SchmidtConfig;
use super::phi::phi_deficits;
use crate::arith::{exact_sum, gcd, Rat, Threshold};
use crate::error::{Error, Result};
use crate::paircorr::{AlphaValue, CorrelationValue, Window};
use crate::setcore::{diff_rep, energy, DiffRep, EnergyMethod, IntegerSet};

/// `α ∈ E_n`: some integer `j` has `|nα − j| < s/N` and `(j mod n, n) <= T`
/// (where `j ≡ 0` stands for `u = n`).
pub fn in_en(n: u64, alpha: &AlphaValue, s: Rat, set_len: u64, t: Threshold) -> bool {
    let admits = |j: u128| {
        let u = (j % n as u128) as u64;
        t.admits(gcd(if u == 0 { n } else { u }, n))
    };
    let (sn, sd, big_n) = (*s.numer() as u128, *s.denom() as u128, set_len as u128);
    match *alpha {
        AlphaValue::Rational { p, q } => {
            let x = n as u128 * p as u128;
            let q = q as u128;
            let j0 = x / q;
            let bound = sn * q;
            // |x − jq| · sd · N < sn · q, walking outwards from floor(x/q).
            let close = |gap: u128| gap.checked_mul(sd * big_n).is_some_and(|v| v < bound);
            let mut j = j0;
            for _ in 0..=n {
                if !close(x - j * q) {
                    break;
                }
                if admits(j) {
                    return true;
                }
                if j == 0 {
                    break;
                }
                j -= 1;
            }
            let mut j = j0 + 1;
            for _ in 0..=n {
                if !close(j * q - x) {
                    break;
                }
                if admits(j) {
                    return true;
                }
                j += 1;
            }
            false
        }
        AlphaValue::Float(a) => {
            let y = n as f64 * a;
            let w = sn as f64 / (sd as f64 * big_n as f64);
            let lo = (y - w).floor() as i64;
            let hi = (y + w).ceil() as i64;
            (lo..=hi.min(lo + n as i64 + 1))
                .filter(|&j| j >= 0 && (y - j as f64).abs() < w)
                .any(|j| admits(j as u128))
        }
    }
}

/// `F*` and `F` at many `α` for one set, reusing `r(n)`.
#[derive(Debug, Clone)]
pub struct FStarEvaluator {
    support: Vec<(u64, u64)>,
    set_len: usize,
    s: Rat,
    threshold: Threshold,
}

impl FStarEvaluator {
    pub fn new(rep: &DiffRep, cfg: &SchmidtConfig) -> Result<Self> {
        if rep.set_len() < 2 {
            return Err(Error::Precondition("F* needs N >= 2".into()));
        }
        if rep.set_len() as u64 != cfg.set_len {
            return Err(Error::Precondition(format!("config has N = {} but the set has {}", cfg.set_len, rep.set_len())));
        }
        Ok(FStarEvaluator { support: rep.support(), set_len: rep.set_len(), s: cfg.s, threshold: cfg.threshold })
    }

    /// `(F, F*)` at `α`, as pair counts.
    pub fn eval(&self, alpha: &AlphaValue) -> Result<(CorrelationValue, CorrelationValue)> {
        let window = Window::new(alpha, self.s, self.set_len as u64)?;
        let (mut f, mut fs) = (0u64, 0u64);
        for &(n, r) in &self.support {
            if !window.admits(alpha.residue(n)) {
                continue;
            }
            f += r;
            if in_en(n, alpha, self.s, self.set_len as u64, self.threshold) {
                fs += r;
            }
        }
        let v = |c: u64| CorrelationValue { count: 2 * c, set_len: self.set_len };
        Ok((v(f), v(fs)))
    }
}

/// `F*(α) = (2/N) Σ_{n <= X, α ∈ E_n} r(n)`.
pub fn f_star(set: &IntegerSet, alpha: &AlphaValue, cfg: &SchmidtConfig) -> Result<CorrelationValue> {
    Ok(FStarEvaluator::new(&diff_rep(set)?, cfg)?.eval(alpha)?.1)
}

/// Exact integrals of `F` and `F*` and their `L¹` distance.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Report {
    /// `∫ F = 2s(1 − 1/N)`.
    pub integral_f: BigRational,
    /// `∫ F* = (2/N) Σ r(n) μ(E_n)`.
    pub integral_f_star: BigRational,
    /// `∫ |F − F*| = (2/N) Σ r(n)(2s/N)(1 − Φ(n)/n)`.
    pub distance: BigRational,
    /// Against `(√log T / T)(Ẽ/δ)^{1/2}`.
    pub audit: BoundAudit,
}

pub fn l1_distance_exact(set: &IntegerSet, cfg: &SchmidtConfig) -> Result<L1Report> {
    let rep = diff_rep(set)?;
    if rep.set_len() as u64 != cfg.set_len || set.bound() != cfg.bound {
        return Err(Error::Precondition("config does not match the set".into()));
    }
    if !cfg.arcs_disjoint() {
        return Err(Error::Precondition("the closed form needs N >= 2s".into()));
    }
    let deficit = phi_deficits(set.bound(), cfg.threshold);
    let big = |v: u128| BigInt::from(v);
    let lost = exact_sum(
        rep.iter()
            .filter(|&(n, _)| deficit[n as usize] > 0)
            .map(|(n, r)| BigRational::new(big(r as u128 * deficit[n as usize] as u128), big(n as u128)))
            .collect(),
    );
    let kept = exact_sum(
        rep.iter()
            .map(|(n, r)| BigRational::new(big(r as u128 * (n - deficit[n as usize]) as u128), big(n as u128)))
            .collect(),
    );
    let (sn, sd, n) = (*cfg.s.numer() as u128, *cfg.s.denom() as u128, cfg.set_len as u128);
    let scale = BigRational::new(big(4 * sn), big(sd * n * n));
    let distance = &scale * lost;
    let integral_f_star = &scale * kept;
    let integral_f = BigRational::new(big(2 * sn * (n - 1)), big(sd * n));

    let e = energy(set, EnergyMethod::DifferenceIdentity)?;
    let e_tilde = e.normalized_f64();
    let delta = n as f64 / cfg.bound as f64;
    let t = cfg.t();
    let shape = t.ln().sqrt() / t * (e_tilde / delta).sqrt();
    let audit = BoundAudit::exact("l1_distance", cfg.describe(), &distance, shape);
    Ok(L1Report { integral_f, integral_f_star, distance, audit })
}

pub(crate) fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paircorr::{pair_corr_direct, CorrelationParams};
    use num_traits::Zero;

    #[test]
    fn example_set() {
        let a = IntegerSet::new(1..=4, 4).unwrap();
        let cfg = SchmidtConfig::for_set(&a, 2.0, Rat::from_integer(1)).unwrap();
        let half = AlphaValue::rational(1, 2).unwrap();
        // n = 2 (j = 1, u = 1) is in E_2; n = 1 and n = 3 sit at distance 1/2.
        let v = f_star(&a, &half, &cfg).unwrap();
        assert_eq!((v.count, v.value()), (4, num_rational::Ratio::from_integer(1)));
    }

    #[test]
    fn membership_is_open_and_gcd_restricted() {
        let t = Threshold::new(2.0).unwrap();
        let s = Rat::from_integer(1);
        // α = 1/8, N = 4: ‖α‖ = 1/8 < 1/4.
        assert!(in_en(1, &AlphaValue::rational(1, 8).unwrap(), s, 4, t));
        // α = 1/4, N = 4: |α − 0| = 1/4 is not < 1/4.
        assert!(!in_en(1, &AlphaValue::rational(1, 4).unwrap(), s, 4, t));
        // 3α near 0 needs u = 3 with (3, 3) = 3 > T.
        let tiny = AlphaValue::rational(1, 1000).unwrap();
        assert!(!in_en(3, &tiny, s, 100, t));
        assert!(in_en(3, &tiny, s, 100, Threshold::new(3.0).unwrap()));
        assert!(in_en(3, &AlphaValue::rational(1, 3).unwrap(), s, 100, t));
        assert!(!in_en(6, &AlphaValue::rational(1, 2).unwrap(), s, 100, t));
        // Float path agrees away from ties.
        let a = AlphaValue::float(0.3334).unwrap();
        assert_eq!(in_en(3, &a, s, 100, t), in_en(3, &AlphaValue::rational(3334, 10_000).unwrap(), s, 100, t));
    }

    #[test]
    fn large_threshold_recovers_f() {
        let a = IntegerSet::new([1, 3, 4, 9, 10, 17, 22, 23, 30], 30).unwrap();
        let cfg = SchmidtConfig::for_set(&a, 30.0, Rat::from_integer(1)).unwrap();
        let ev = FStarEvaluator::new(&diff_rep(&a).unwrap(), &cfg).unwrap();
        for k in 0..500u64 {
            // Odd numerators over 1001 avoid the window boundary.
            let alpha = AlphaValue::rational(2 * k + 1, 1001 * 2).unwrap();
            let (f, fs) = ev.eval(&alpha).unwrap();
            let direct = pair_corr_direct(&a, &CorrelationParams::new(alpha, cfg.s, 30).unwrap()).unwrap();
            assert_eq!(f, direct);
            assert!(fs.count <= f.count);
        }
        let r = l1_distance_exact(&a, &cfg).unwrap();
        assert!(r.distance.is_zero());
        assert_eq!(r.integral_f, r.integral_f_star);
    }

    #[test]
    fn l1_parts_add_up() {
        let a = IntegerSet::new(1..=20, 20).unwrap();
        let cfg = SchmidtConfig::for_set(&a, 2.0, Rat::from_integer(1)).unwrap();
        let r = l1_distance_exact(&a, &cfg).unwrap();
        assert_eq!(&r.integral_f_star + &r.distance, r.integral_f);
        assert!(r.audit.ratio.is_finite() && r.audit.ratio > 0.0);
        let tight = SchmidtConfig::for_set(&IntegerSet::new([1, 2], 2).unwrap(), 2.0, Rat::from_integer(3)).unwrap();
        assert!(l1_distance_exact(&IntegerSet::new([1, 2], 2).unwrap(), &tight).is_err());
    }
}
