//! Autocorrelation of a set's indicator vector, `D(n) = #{a ∈ A : a + n ∈ A}`
//! for `0 <= n < X`. The floating-point path is accepted only when every
//! output sits within 0.25 of an integer and the a-priori roundoff bound is
//! below the same margin; otherwise an exact number-theoretic transform runs.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Largest bound for which the transforms run (`2X - 1 <= 2^27`).
pub const MAX_TRANSFORM_BOUND: u64 = 1 << 26;

/// Acceptance margin for rounding floating-point results.
pub const ROUNDING_MARGIN: f64 = 0.25;

/// Which transform produced an autocorrelation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformPath {
    Float,
    Exact,
}

fn transform_len(bound: u64) -> Result<usize> {
    if bound > MAX_TRANSFORM_BOUND {
        return Err(Error::ResourceGuard(format!(
            "transform length for X={bound} exceeds the 2^27 limit (X <= 2^26)"
        )));
    }
    Ok(((2 * bound).saturating_sub(1)).max(1).next_power_of_two() as usize)
}

/// Autocorrelation with automatic fallback to the exact transform.
pub fn autocorrelation(elements: &[u64], bound: u64) -> Result<(Vec<u64>, TransformPath)> {
    if let Some(d) = autocorrelation_float(elements, bound)? {
        return Ok((d, TransformPath::Float));
    }
    Ok((autocorrelation_exact(elements, bound)?, TransformPath::Exact))
}

/// A-priori bound on the absolute roundoff of the float path: a constant
/// times unit roundoff, transform depth and `Σ f² = N`.
pub fn float_error_bound(count: usize, len: usize) -> f64 {
    let depth = (len.max(2) as f64).log2();
    16.0 * f64::EPSILON * depth * count as f64
}

/// Float-FFT autocorrelation, or `None` when the rounding check fails.
pub fn autocorrelation_float(elements: &[u64], bound: u64) -> Result<Option<Vec<u64>>> {
    let len = transform_len(bound)?;
    if float_error_bound(elements.len(), len) > ROUNDING_MARGIN {
        return Ok(None);
    }
    let mut buf = vec![Complex::new(0.0f64, 0.0); len];
    for &a in elements {
        buf[(a - 1) as usize].re = 1.0;
    }
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(len).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    let scale = 1.0 / len as f64;
    let mut out = Vec::with_capacity(bound as usize);
    for c in &buf[..bound as usize] {
        let v = c.re * scale;
        let r = v.round();
        if (v - r).abs() > ROUNDING_MARGIN || r < 0.0 {
            return Ok(None);
        }
        out.push(r as u64);
    }
    Ok(Some(out))
}

// 15 * 2^27 + 1 with primitive root 31.
const NTT_PRIME: u64 = 2_013_265_921;
const NTT_ROOT: u64 = 31;

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    b %= NTT_PRIME;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % NTT_PRIME;
        }
        b = b * b % NTT_PRIME;
        e >>= 1;
    }
    acc
}

fn ntt(a: &mut [u64], invert: bool) {
    let n = a.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(NTT_ROOT, (NTT_PRIME - 1) / len as u64);
        if invert {
            w = pow_mod(w, NTT_PRIME - 2);
        }
        let half = len / 2;
        let mut twiddles = Vec::with_capacity(half);
        let mut t = 1u64;
        for _ in 0..half {
            twiddles.push(t);
            t = t * w % NTT_PRIME;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for k in 0..half {
                let u = lo[k];
                let v = hi[k] * twiddles[k] % NTT_PRIME;
                lo[k] = if u + v >= NTT_PRIME { u + v - NTT_PRIME } else { u + v };
                hi[k] = if u >= v { u - v } else { u + NTT_PRIME - v };
            }
        }
        len <<= 1;
    }
    if invert {
        let inv_n = pow_mod(n as u64, NTT_PRIME - 2);
        for x in a.iter_mut() {
            *x = *x * inv_n % NTT_PRIME;
        }
    }
}

/// Exact autocorrelation by a number-theoretic transform. Every output is at
/// most `N < p`, so residues are the true values.
pub fn autocorrelation_exact(elements: &[u64], bound: u64) -> Result<Vec<u64>> {
    let len = transform_len(bound)?;
    let mut f = vec![0u64; len];
    for &a in elements {
        f[(a - 1) as usize] = 1;
    }
    // Correlation = convolution with the reversed sequence.
    let mut g = vec![0u64; len];
    for &a in elements {
        g[(len - (a - 1) as usize) % len] = 1;
    }
    ntt(&mut f, false);
    ntt(&mut g, false);
    for (x, y) in f.iter_mut().zip(&g) {
        *x = *x * y % NTT_PRIME;
    }
    ntt(&mut f, true);
    f.truncate(bound as usize);
    Ok(f)
}
