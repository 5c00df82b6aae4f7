use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::arith::big_to_f64;

/// A computed quantity against the shape of an upper bound whose implied
/// constant is unknown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundAudit {
    pub name: String,
    /// `key=value` pairs joined by `;`.
    pub params: String,
    /// Exact value as `p/q` when available, otherwise a decimal.
    pub lhs: String,
    pub lhs_f64: f64,
    pub rhs_shape: f64,
    pub ratio: f64,
}

impl BoundAudit {
    pub const CSV_HEADER: &'static str = "audit_name,params,lhs,rhs_shape,ratio";

    pub fn exact(name: &str, params: String, lhs: &BigRational, rhs_shape: f64) -> Self {
        let v = big_to_f64(lhs);
        BoundAudit { name: name.into(), params, lhs: fmt_big(lhs), lhs_f64: v, rhs_shape, ratio: v / rhs_shape }
    }

    pub fn approx(name: &str, params: String, lhs: f64, rhs_shape: f64) -> Self {
        BoundAudit { name: name.into(), params, lhs: format!("{lhs}"), lhs_f64: lhs, rhs_shape, ratio: lhs / rhs_shape }
    }

    pub fn to_csv(&self) -> String {
        format!("{},{},{},{},{}", self.name, self.params, self.lhs, self.rhs_shape, self.ratio)
    }
}

/// `p/q`, or `p` for integers. Very long fractions are abbreviated to their
/// decimal value so CSV rows stay readable.
pub fn fmt_big(r: &BigRational) -> String {
    const MAX_DIGITS: u64 = 600;
    if r.numer().bits() + r.denom().bits() > MAX_DIGITS * 3 {
        return format!("{:.17e}", big_to_f64(r));
    }
    if *r.denom() == BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
