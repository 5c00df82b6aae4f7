use num_integer::Integer;
use num_rational::Ratio;

use super::config::SchmidtConfig;
use super::phi::phi_t;
use crate::arith::gcd;
use crate::error::{Error, Result};

/// A finite union of arcs of `ℝ/ℤ`, stored as disjoint sorted spans
/// `[a, b)` of integers on a circle of `scale` units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcSet {
    scale: u128,
    spans: Vec<(u128, u128)>,
}

impl ArcSet {
    /// Merges arbitrary `(centre, half_width)` arcs on a circle of `scale`
    /// units.
    pub fn from_arcs(scale: u128, arcs: impl IntoIterator<Item = (u128, u128)>) -> Self {
        let mut raw = Vec::new();
        for (c, h) in arcs {
            if h == 0 {
                continue;
            }
            if 2 * h >= scale {
                return ArcSet { scale, spans: vec![(0, scale)] };
            }
            let a = (c + scale - h % scale) % scale;
            let b = a + 2 * h;
            if b <= scale {
                raw.push((a, b));
            } else {
                raw.push((a, scale));
                raw.push((0, b - scale));
            }
        }
        raw.sort_unstable();
        let mut spans: Vec<(u128, u128)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match spans.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => spans.push((a, b)),
            }
        }
        ArcSet { scale, spans }
    }

    pub fn scale(&self) -> u128 {
        self.scale
    }

    pub fn spans(&self) -> &[(u128, u128)] {
        &self.spans
    }

    /// Each merged span as `(start, length)` in `[0, 1)`.
    pub fn arcs(&self) -> Vec<(Ratio<u128>, Ratio<u128>)> {
        self.spans.iter().map(|&(a, b)| (Ratio::new(a, self.scale), Ratio::new(b - a, self.scale))).collect()
    }

    pub fn measure(&self) -> Ratio<u128> {
        Ratio::new(self.spans.iter().map(|&(a, b)| b - a).sum(), self.scale)
    }

    /// `μ(self ∩ other)`; both sets must share a scale.
    pub fn intersection_measure(&self, other: &ArcSet) -> Result<Ratio<u128>> {
        if self.scale != other.scale {
            return Err(Error::Precondition("arc sets live on different scales".into()));
        }
        let (mut i, mut j, mut total) = (0, 0, 0u128);
        while i < self.spans.len() && j < other.spans.len() {
            let (a, b) = self.spans[i];
            let (c, d) = other.spans[j];
            let lo = a.max(c);
            let hi = b.min(d);
            if lo < hi {
                total += hi - lo;
            }
            if b < d {
                i += 1;
            } else {
                j += 1;
            }
        }
        Ok(Ratio::new(total, self.scale))
    }
}

/// `E_n` drawn on a circle of `base · N · s_den` units, where `n | base`.
fn en_arcs_on(n: u64, base: u64, cfg: &SchmidtConfig) -> Result<ArcSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    debug_assert_eq!(base % n, 0);
    let over = || Error::Overflow("arc scale exceeds 128 bits");
    let unit = (cfg.set_len as u128).checked_mul(*cfg.s.denom() as u128).ok_or_else(over)?;
    let scale = (base as u128).checked_mul(unit).ok_or_else(over)?;
    let step = (base / n) as u128;
    let half = (*cfg.s.numer() as u128).checked_mul(step).ok_or_else(over)?;
    let arcs = (1..=n).filter(|&u| cfg.threshold.admits(gcd(u, n))).map(|u| ((u as u128 * step * unit) % scale, half));
    Ok(ArcSet::from_arcs(scale, arcs))
}

/// `E_n = ∪_{u <= n, (u, n) <= T} ((u − s/N)/n, (u + s/N)/n)` modulo one.
pub fn en_arcs(n: u64, cfg: &SchmidtConfig) -> Result<ArcSet> {
    en_arcs_on(n, n, cfg)
}

/// `μ(E_n) = (2s/N) Φ(n)/n`, exact only while the arcs are disjoint.
pub fn en_measure_formula(n: u64, cfg: &SchmidtConfig) -> Result<Ratio<u128>> {
    let phi = phi_t(n, cfg.threshold)? as u128;
    Ok(Ratio::new(2 * *cfg.s.numer() as u128 * phi, *cfg.s.denom() as u128 * cfg.set_len as u128 * n as u128))
}

/// `μ(E_n ∩ E_m)` exactly.
pub fn en_intersection(n: u64, m: u64, cfg: &SchmidtConfig) -> Result<Ratio<u128>> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be >= 1".into()));
    }
    let base = n.checked_mul(m / n.gcd(&m)).ok_or(Error::Overflow("lcm(n, m) exceeds 64 bits"))?;
    en_arcs_on(n, base, cfg)?.intersection_measure(&en_arcs_on(m, base, cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rat;

    fn cfg(t: f64, s: Rat, n: u64) -> SchmidtConfig {
        SchmidtConfig::new(t, s, n, 1000).unwrap()
    }

    #[test]
    fn two_arcs_example() {
        let c = cfg(2.0, Rat::from_integer(1), 4);
        let e = en_arcs(2, &c).unwrap();
        // (3/8, 5/8) and (7/8, 9/8) with the latter split at 0.
        let arcs = e.arcs();
        assert_eq!(arcs, vec![
            (Ratio::new(0, 1), Ratio::new(1, 8)),
            (Ratio::new(3, 8), Ratio::new(1, 4)),
            (Ratio::new(7, 8), Ratio::new(1, 8)),
        ]);
        assert_eq!(e.measure(), Ratio::new(1, 2));
        assert_eq!(en_measure_formula(2, &c).unwrap(), Ratio::new(1, 2));
    }

    #[test]
    fn single_arc_and_full_circle() {
        let c = cfg(2.0, Rat::from_integer(1), 4);
        assert_eq!(en_arcs(1, &c).unwrap().measure(), Ratio::new(1, 2));
        let wide = cfg(50.0, Rat::from_integer(3), 4);
        assert_eq!(en_arcs(7, &wide).unwrap().measure(), Ratio::from_integer(1));
    }

    #[test]
    fn formula_example() {
        let c = cfg(2.0, Rat::from_integer(1), 100);
        assert_eq!(en_measure_formula(6, &c).unwrap(), Ratio::new(1, 75));
        assert_eq!(en_arcs(6, &c).unwrap().measure(), Ratio::new(1, 75));
    }

    #[test]
    fn formula_matches_when_disjoint() {
        for (s, n) in [(Rat::new(1, 2), 1), (Rat::from_integer(1), 2), (Rat::from_integer(3), 7), (Rat::new(5, 3), 100)] {
            let c = cfg(3.0, s, n);
            assert!(c.arcs_disjoint());
            for k in 1..=120 {
                assert_eq!(en_arcs(k, &c).unwrap().measure(), en_measure_formula(k, &c).unwrap(), "n={k}");
            }
        }
        // Overlapping arcs: the formula overstates the measure.
        let c = cfg(3.0, Rat::from_integer(1), 1);
        assert!(en_measure_formula(2, &c).unwrap() > en_arcs(2, &c).unwrap().measure());
    }

    #[test]
    fn intersection_example() {
        let c = SchmidtConfig::new(3.0, Rat::from_integer(1), 8, 100).unwrap();
        assert_eq!(en_intersection(3, 2, &c).unwrap(), Ratio::new(1, 12));
        assert_eq!(en_intersection(2, 3, &c).unwrap(), Ratio::new(1, 12));
        assert_eq!(en_intersection(5, 5, &c).unwrap(), en_arcs(5, &c).unwrap().measure());
    }
}
