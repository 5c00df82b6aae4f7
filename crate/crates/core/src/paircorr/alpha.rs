use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;

use crate::arith::{gcd, mul_mod, parse_rat, Rat};
use crate::error::{Error, Result};

/// A dilation `α ∈ [0, 1)`, either exact or double precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaValue {
    /// `p/q` in lowest terms with `0 <= p < q`.
    Rational { p: u64, q: u64 },
    Float(f64),
}

impl AlphaValue {
    /// `p/q` reduced modulo one and to lowest terms.
    pub fn rational(p: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter("alpha denominator must be positive".into()));
        }
        let p = p % q;
        let g = gcd(p, q);
        Ok(AlphaValue::Rational { p: p / g, q: q / g })
    }

    /// `x` reduced modulo one.
    pub fn float(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be finite, got {x}")));
        }
        let f = x - x.floor();
        // x - floor(x) can round up to exactly 1 for tiny negative x.
        Ok(AlphaValue::Float(if f >= 1.0 { 0.0 } else { f }))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AlphaValue::Rational { .. })
    }

    pub fn to_f64(&self) -> f64 {
        match *self {
            AlphaValue::Rational { p, q } => p as f64 / q as f64,
            AlphaValue::Float(x) => x,
        }
    }

    pub fn as_ratio(&self) -> Option<Rat> {
        match *self {
            AlphaValue::Rational { p, q } => Some(Rat::new_raw(p, q)),
            AlphaValue::Float(_) => None,
        }
    }

    /// `{kα}` as an exact residue `kp mod q` (rational) or a float in `[0,1)`.
    pub(crate) fn residue(&self, k: u64) -> Residue {
        match *self {
            AlphaValue::Rational { p, q } => Residue::Exact(mul_mod(k % q, p, q)),
            AlphaValue::Float(x) => {
                let y = x * k as f64;
                Residue::Float(y - y.floor())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Residue {
    Exact(u64),
    Float(f64),
}

impl fmt::Display for AlphaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaValue::Rational { p, q } => write!(f, "{p}/{q}"),
            AlphaValue::Float(x) => write!(f, "{x}"),
        }
    }
}

/// `p/q` (any non-negative integers) is exact; anything else is read as a
/// decimal float. Both are reduced modulo one.
impl FromStr for AlphaValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.contains('/') {
            let r = parse_rat(t)?;
            return AlphaValue::rational(*r.numer(), *r.denom());
        }
        let x: f64 = t.parse().map_err(|_| Error::Parse(format!("not a valid alpha: {s:?}")))?;
        AlphaValue::float(x)
    }
}

/// `‖x‖`, the distance from `x` to the nearest integer.
pub fn norm_dist(x: f64) -> f64 {
    let f = x - x.floor();
    f.min(1.0 - f)
}

/// `‖x‖` computed exactly.
pub fn norm_dist_exact<T: Integer + Clone>(x: &Ratio<T>) -> Ratio<T> {
    let f = x - x.floor();
    let g = Ratio::from_integer(T::one()) - f.clone();
    if f <= g { f } else { g }
}

/// Accepts pairs whose dilated difference satisfies `‖kα‖ <= s/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Window {
    /// Every residue is accepted (`s/N >= 1/2`).
    All,
    /// Residues `d` modulo `q` with `min(d, q - d) <= w`, where `2w < q`.
    Exact { q: u64, w: u64 },
    Float { t: f64 },
}

impl Window {
    pub(crate) fn new(alpha: &AlphaValue, s: Rat, set_len: u64) -> Result<Self> {
        if *s.numer() == 0 {
            return Err(Error::InvalidParameter("s must be positive".into()));
        }
        if set_len == 0 {
            return Err(Error::Precondition("window needs N >= 1".into()));
        }
        let (sn, sd) = (*s.numer() as u128, *s.denom() as u128);
        // s/N >= 1/2 covers the whole circle.
        if 2 * sn >= sd * set_len as u128 {
            return Ok(Window::All);
        }
        Ok(match *alpha {
            AlphaValue::Rational { q, .. } => {
                let w = (sn * q as u128 / (sd * set_len as u128)) as u64;
                if 2 * w >= q { Window::All } else { Window::Exact { q, w } }
            }
            AlphaValue::Float(_) => Window::Float { t: sn as f64 / (sd as f64 * set_len as f64) },
        })
    }

    #[inline]
    pub(crate) fn admits(&self, r: Residue) -> bool {
        match (*self, r) {
            (Window::All, _) => true,
            (Window::Exact { q, w }, Residue::Exact(d)) => d.min(q - d) <= w,
            (Window::Float { t }, Residue::Float(f)) => f.min(1.0 - f) <= t,
            _ => unreachable!("window and residue modes differ"),
        }
    }
}
