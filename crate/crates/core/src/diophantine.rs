//! Continued fractions, Khintchine-type witnesses `‖Mα‖ < 1/(M 𝓛(M))` and
//! the search for pair-correlation spikes they produce.

use serde::Serialize;

use crate::arith::{fmt_ratio, Rat};
use crate::error::{Error, Result};
use crate::paircorr::{pair_corr_direct, AlphaValue, CorrelationParams};
use crate::setcore::{IntegerSet, SetSource};

/// The brute-force witness scan never goes beyond this.
pub const BRUTE_LIMIT: u64 = 100_000;

/// Float expansions stop once `q_k` passes this, beyond which the
/// convergents are no longer determined by a double.
const FLOAT_SAFE_DENOM: u128 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContinuedFraction {
    pub quotients: Vec<u64>,
    /// `(p_k, q_k)` for each quotient.
    pub convergents: Vec<(u128, u128)>,
    /// The expansion stopped before it was complete or reached the depth.
    pub truncated: bool,
}

/// `[a₀; a₁, a₂, ...]` with at most `depth` quotients.
pub fn cf_expand(alpha: &AlphaValue, depth: usize) -> Result<ContinuedFraction> {
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be >= 1".into()));
    }
    let mut quotients = Vec::new();
    let mut truncated = false;
    match *alpha {
        AlphaValue::Rational { p, q } => {
            let (mut a, mut b) = (p, q);
            while b != 0 {
                if quotients.len() == depth {
                    truncated = true;
                    break;
                }
                quotients.push(a / b);
                (a, b) = (b, a % b);
            }
        }
        AlphaValue::Float(x) => {
            let mut y = x;
            let (mut q_prev, mut q) = (0u128, 1u128);
            loop {
                if quotients.len() == depth {
                    break;
                }
                let a = y.floor();
                quotients.push(a as u64);
                let f = y - a;
                let next = if quotients.len() == 1 { 1 } else { a as u128 * q + q_prev };
                if quotients.len() > 1 {
                    (q_prev, q) = (q, next);
                }
                if f < 1e-12 || q > FLOAT_SAFE_DENOM || 1.0 / f > 1e15 {
                    truncated = quotients.len() < depth;
                    break;
                }
                y = 1.0 / f;
            }
        }
    }
    let mut convergents = Vec::with_capacity(quotients.len());
    let (mut p0, mut q0, mut p1, mut q1) = (1u128, 0u128, 0u128, 1u128);
    for &a in &quotients {
        let p = a as u128 * p0 + p1;
        let q = a as u128 * q0 + q1;
        (p1, q1, p0, q0) = (p0, q0, p, q);
        convergents.push((p, q));
    }
    Ok(ContinuedFraction { quotients, convergents, truncated })
}

/// `log_i(M)`: `log_0 M = M`, `log_i M = log(log_{i−1} M)`. Every level
/// must be positive.
pub fn iterated_log(m: f64, i: u32) -> Result<f64> {
    let mut v = m;
    if !(v > 0.0) {
        return Err(Error::Domain(format!("log_0({m}) is not positive")));
    }
    for k in 1..=i {
        v = v.ln();
        if !(v > 0.0) {
            return Err(Error::Domain(format!("log_{k}({m}) = {v} is not positive")));
        }
    }
    Ok(v)
}

/// `𝓛(M) = Π_{i=1..depth} log_i(M)`.
pub fn big_l(m: f64, depth: u32) -> Result<f64> {
    let mut v = m;
    let mut prod = 1.0;
    for k in 1..=depth {
        v = v.ln();
        if !(v > 0.0) {
            return Err(Error::Domain(format!("log_{k}({m}) = {v} is not positive")));
        }
        prod *= v;
    }
    Ok(prod)
}

/// `M 𝓛(M)`, the reciprocal of the approximation quality a witness needs.
pub fn witness_denominator(m: f64, depth: u32) -> Result<f64> {
    Ok(m * big_l(m, depth)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KhintchineWitness {
    #[serde(rename = "M")]
    pub m: u64,
    /// `‖Mα‖`.
    pub dist: f64,
    #[serde(rename = "L")]
    pub l_value: f64,
}

/// `‖Mα‖` exactly as `(min(r, q − r), q)` for rational `α`.
fn dist_parts(alpha: &AlphaValue, m: u64) -> (f64, Option<(u128, u128)>) {
    match *alpha {
        AlphaValue::Rational { p, q } => {
            let r = (m as u128 * p as u128) % q as u128;
            let d = r.min(q as u128 - r);
            (d as f64 / q as f64, Some((d, q as u128)))
        }
        AlphaValue::Float(x) => (crate::paircorr::norm_dist(m as f64 * x), None),
    }
}

/// Checks `‖Mα‖ < 1/(M 𝓛(M))`; `None` when `𝓛` is undefined at `M`.
pub fn check_witness(alpha: &AlphaValue, m: u64, depth: u32) -> Option<KhintchineWitness> {
    let l = big_l(m as f64, depth).ok()?;
    let (dist, exact) = dist_parts(alpha, m);
    let ok = match exact {
        // d/q < 1/(M𝓛) ⟺ d·M·𝓛 < q; d = 0 always qualifies.
        Some((d, q)) => d == 0 || (d as f64) * m as f64 * l < q as f64,
        None => dist * m as f64 * l < 1.0,
    };
    ok.then_some(KhintchineWitness { m, dist, l_value: l })
}

/// All `M <= M_max` with `‖Mα‖ < 1/(M𝓛(M))`. Once `𝓛 >= 2` a witness has
/// `‖Mα‖ < 1/(2M)`, so `M = c q_k` for a convergent denominator with
/// `c² < (a_{k+1} + 2)/2`; below that point every `M` is tried.
pub fn khintchine_witnesses(alpha: &AlphaValue, depth: u32, m_max: u64) -> Result<Vec<KhintchineWitness>> {
    let mut found = Vec::new();
    let mut small_end = 0;
    for m in 1..=m_max {
        match big_l(m as f64, depth) {
            Ok(l) if l >= 2.0 => break,
            _ => {}
        }
        small_end = m;
        found.extend(check_witness(alpha, m, depth));
    }
    let cf = cf_expand(alpha, 10_000)?;
    for (k, &(_, q)) in cf.convergents.iter().enumerate() {
        if q > m_max as u128 {
            break;
        }
        let q = q as u64;
        let c_max = match cf.quotients.get(k + 1) {
            Some(&a) => ((a as f64 + 2.0).sqrt() as u64) + 1,
            // The last convergent of a rational equals α: every multiple is exact.
            None if alpha.is_exact() => m_max / q,
            None => 2,
        };
        for c in 1..=c_max {
            let m = match q.checked_mul(c) {
                Some(m) if m <= m_max => m,
                _ => break,
            };
            if m > small_end {
                found.extend(check_witness(alpha, m, depth));
            }
        }
    }
    found.sort_by_key(|w| w.m);
    found.dedup_by_key(|w| w.m);
    Ok(found)
}

/// Every `M <= min(M_max, 10⁵)` tested directly.
pub fn khintchine_witnesses_brute(alpha: &AlphaValue, depth: u32, m_max: u64) -> Vec<KhintchineWitness> {
    (1..=m_max.min(BRUTE_LIMIT)).filter_map(|m| check_witness(alpha, m, depth)).collect()
}

/// `r(n)` for one difference by looking up `a + n` for each `a`.
fn rep_at(set: &IntegerSet, n: u64) -> u64 {
    set.elements().iter().filter(|&&a| set.contains(a + n)).count() as u64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpikeSearch {
    #[serde(rename = "M")]
    pub m: u64,
    pub multiplier: u64,
    #[serde(rename = "N")]
    pub set_len: u64,
    #[serde(rename = "X")]
    pub bound: u64,
    #[serde(rename = "F")]
    pub value: String,
    pub value_f64: f64,
}

/// The construction `N = ⌊M ℓ₃⌋`, `K = ⌊ℓ₁ ℓ₂^C ℓ₄⌋` with logs past the
/// chosen depth replaced by one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Construction {
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "N")]
    pub set_len: u64,
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "X")]
    pub bound: u64,
    #[serde(rename = "F")]
    pub value: String,
    pub value_f64: f64,
    /// `N⁻¹ Σ_{k <= K, kM <= X/3, ‖kMα‖ <= s/N} r(kM)`.
    pub lower_bound_sum: String,
    pub lower_bound_f64: f64,
    /// `KM <= X/3`.
    pub contained: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoOutcome {
    pub threshold: String,
    /// Whether some `N <= N_max` had `F(N) > 3s`.
    pub passed: bool,
    /// Present when no witness gave a construction with `K >= 1` and
    /// `N <= N_max`.
    pub out_of_range: Option<String>,
    pub construction: Option<Construction>,
    pub search: Option<SpikeSearch>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub alpha: String,
    pub depth: u32,
    pub exponent: f64,
    pub witnesses: Vec<KhintchineWitness>,
    pub demo: DemoOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoParams {
    pub s: Rat,
    pub exponent: f64,
    pub depth: u32,
    /// Largest `N` considered.
    pub n_max: u64,
    /// Largest multiplier `c` tried in the `N = cM` search.
    pub multiplier_max: u64,
}

impl DemoParams {
    pub fn new(s: Rat, exponent: f64, depth: u32, n_max: u64) -> Result<Self> {
        if *s.numer() == 0 {
            return Err(Error::InvalidParameter("s must be positive".into()));
        }
        if depth == 0 || n_max < 2 {
            return Err(Error::InvalidParameter("need depth >= 1 and N_max >= 2".into()));
        }
        Ok(DemoParams { s, exponent, depth, n_max, multiplier_max: 256 })
    }
}

/// Looks for `F(N) > 3s` along witnesses `M`: once through the depth-truncated
/// construction and once by trying `N = cM` directly.
pub fn divergence_demo(source: &SetSource, alpha: &AlphaValue, params: &DemoParams) -> Result<DivergenceReport> {
    if !alpha.is_exact() {
        return Err(Error::Precondition("the divergence demo needs a rational alpha".into()));
    }
    let n_cap = match source.nth_element(params.n_max) {
        Ok(_) => params.n_max,
        Err(Error::Exhausted { available, .. }) => available,
        Err(e) => return Err(e),
    };
    if n_cap < 2 {
        return Err(Error::Precondition("the set has fewer than two elements".into()));
    }
    let full = source.truncate(source.nth_element(n_cap)?)?;
    let prefix = |n: u64| -> Result<IntegerSet> { full.truncate(full.elements()[n as usize - 1]) };
    let s = params.s;
    let three_s = 3.0 * *s.numer() as f64 / *s.denom() as f64;
    let corr = |set: &IntegerSet| pair_corr_direct(set, &CorrelationParams::new(*alpha, s, set.bound())?);

    let witnesses = khintchine_witnesses(alpha, params.depth, n_cap)?;

    let level = |m: f64, i: u32| if i <= params.depth { iterated_log(m, i) } else { Ok(1.0) };
    let mut construction = None;
    let mut out_of_range = None;
    for w in witnesses.iter().rev() {
        let m = w.m as f64;
        let (Ok(l1), Ok(l2), Ok(l3), Ok(l4)) = (level(m, 1), level(m, 2), level(m, 3), level(m, 4)) else {
            continue;
        };
        let n = (m * l3).floor() as u64;
        let k = (l1 * l2.powf(params.exponent) * l4).floor();
        if k < 1.0 {
            out_of_range.get_or_insert_with(|| format!("K < 1 at M = {}", w.m));
            continue;
        }
        if n < 2 || n > n_cap {
            continue;
        }
        let k = k as u64;
        let set = prefix(n)?;
        let v = corr(&set)?;
        let window = crate::paircorr::Window::new(alpha, s, n)?;
        let third = set.bound() / 3;
        let sub: u64 = (1..=k)
            .map(|j| j * w.m)
            .filter(|&d| d <= third && window.admits(alpha.residue(d)))
            .map(|d| rep_at(&set, d))
            .sum();
        let lower = Rat::new(sub, n);
        construction = Some(Construction {
            m: w.m,
            set_len: n,
            k,
            bound: set.bound(),
            value: fmt_ratio(&v.value()),
            value_f64: v.to_f64(),
            lower_bound_sum: fmt_ratio(&lower),
            lower_bound_f64: sub as f64 / n as f64,
            contained: k.saturating_mul(w.m) <= third,
            passed: v.to_f64() > three_s,
        });
        out_of_range = None;
        break;
    }
    if construction.is_none() && out_of_range.is_none() {
        out_of_range = Some(if witnesses.is_empty() { "no witness found".into() } else { "N exceeds N_max for every witness".into() });
    }

    let mut search = None;
    'outer: for w in &witnesses {
        for c in 1..=params.multiplier_max {
            let n = match w.m.checked_mul(c) {
                Some(n) if n <= n_cap => n,
                _ => break,
            };
            if n < 2 {
                continue;
            }
            let set = prefix(n)?;
            let v = corr(&set)?;
            if v.to_f64() > three_s {
                search = Some(SpikeSearch {
                    m: w.m,
                    multiplier: c,
                    set_len: n,
                    bound: set.bound(),
                    value: fmt_ratio(&v.value()),
                    value_f64: v.to_f64(),
                });
                break 'outer;
            }
        }
    }

    let passed = search.is_some() || construction.as_ref().is_some_and(|c| c.passed);
    Ok(DivergenceReport {
        alpha: alpha.to_string(),
        depth: params.depth,
        exponent: params.exponent,
        witnesses,
        demo: DemoOutcome { threshold: fmt_ratio(&(s * Rat::from_integer(3))), passed, out_of_range, construction, search },
    })
}
