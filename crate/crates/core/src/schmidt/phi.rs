use num_bigint::BigInt;
use num_rational::BigRational;

use super::audit::BoundAudit;
use crate::arith::{divisors, exact_sum, gcd, totient, totients, Threshold};
use crate::error::{Error, Result};

/// `Φ(n) = #{u <= n : (u, n) <= T}` by scanning every `u`.
pub fn phi_brute(n: u64, t: Threshold) -> u64 {
    (1..=n).filter(|&u| t.admits(gcd(u, n))).count() as u64
}

/// `Φ(n) = n − Σ_{d | n, d > T} φ(n/d)`, grouping `u` by `d = (u, n)`.
pub fn phi_t(n: u64, t: Threshold) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let drop: u64 = divisors(n).into_iter().filter(|&d| !t.admits(d)).map(|d| totient(n / d)).sum();
    Ok(n - drop)
}

/// `n − Φ(n)` for every `n <= X`, by a sieve over `d > T`.
pub fn phi_deficits(bound: u64, t: Threshold) -> Vec<u64> {
    let x = bound as usize;
    let tot = totients(x);
    let mut deficit = vec![0u64; x + 1];
    let first = t.floor() as usize + 1;
    for d in first..=x {
        for k in 1..=x / d {
            deficit[d * k] += tot[k];
        }
    }
    deficit
}

/// `Σ_{n <= X} (1 − Φ(n)/n)^order` exactly, against `X/T` (order 1) or
/// `X log T / T²` (order 2).
pub fn phi_moment_audit(bound: u64, threshold: f64, order: u32) -> Result<BoundAudit> {
    let t = Threshold::new(threshold)?;
    if bound == 0 {
        return Err(Error::InvalidParameter("X must be >= 1".into()));
    }
    if t.value() < 2.0 {
        return Err(Error::InvalidParameter("T must be >= 2".into()));
    }
    let x = bound as f64;
    let rhs = match order {
        1 => x / t.value(),
        2 => x * t.value().ln() / t.value().powi(2),
        _ => return Err(Error::InvalidParameter(format!("order must be 1 or 2, got {order}"))),
    };
    let deficit = phi_deficits(bound, t);
    let terms = (1..=bound)
        .filter(|&n| deficit[n as usize] > 0)
        .map(|n| {
            let d = BigInt::from(deficit[n as usize]);
            let n = BigInt::from(n);
            if order == 1 {
                BigRational::new(d, n)
            } else {
                BigRational::new(&d * &d, &n * &n)
            }
        })
        .collect();
    let lhs = exact_sum(terms);
    Ok(BoundAudit::exact(&format!("phi_moment_{order}"), format!("X={bound};T={threshold}"), &lhs, rhs))
}
