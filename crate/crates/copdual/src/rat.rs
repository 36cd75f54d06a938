//! Exact rational scalars: construction, parsing and canonical formatting.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

/// Arbitrary-precision rational. Always reduced, denominator positive.
pub type Rat = BigRational;

/// Rational from an integer pair. Panics on zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// Parses "n" or "n/d" with optional leading minus. Rejects d = 0.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num_s, den_s) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (s, None),
    };
    let num: BigInt = num_s
        .parse()
        .map_err(|_| format!("invalid integer {:?}", num_s))?;
    let den: BigInt = match den_s {
        Some(d) => d.parse().map_err(|_| format!("invalid integer {:?}", d))?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(format!("zero denominator in {:?}", s));
    }
    Ok(Rat::new(num, den))
}

/// Canonical form: "n" for integers, "n/d" otherwise. Round-trips through
/// `parse_rat` losslessly.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Approximate float value for cosmetic report summaries only.
pub fn rat_to_f64(r: &Rat) -> f64 {
    let scale = BigInt::from(1u64 << 60);
    let scaled = (r * Rat::from_integer(scale.clone())).round();
    let hi: f64 = scaled.numer().to_string().parse().unwrap_or(f64::NAN);
    hi / (1u64 << 60) as f64
}

/// Sum of absolute values; the l1 norm.
pub fn l1_norm(v: &[Rat]) -> Rat {
    v.iter().map(|x| x.abs()).fold(Rat::zero(), |a, b| a + b)
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len(), "dot length mismatch");
    a.iter()
        .zip(b)
        .map(|(x, y)| x * y)
        .fold(Rat::zero(), |acc, t| acc + t)
}
