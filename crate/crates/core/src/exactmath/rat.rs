use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ExactError;

/// Exact rational number. Always reduced with a positive denominator.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Rat) -> Rat {
    x - x.floor()
}

pub fn is_integer(x: &Rat) -> bool {
    x.denom().is_one()
}

/// Least common multiple of the denominators, as a machine integer.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> i64 {
    let mut l = BigInt::one();
    for x in xs {
        l = l.lcm(x.denom());
    }
    l.to_i64().expect("denominator exceeds i64")
}

/// `x * d` as an `i64`, requiring the product to be integral.
pub fn scaled_key(x: &Rat, d: i64) -> Option<i64> {
    let s = x * BigInt::from(d);
    if s.is_integer() {
        s.to_integer().to_i64()
    } else {
        None
    }
}

pub fn to_f64(x: &Rat) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

/// Formats as `a` or `a/b`.
pub fn fmt_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `a`, `-a`, `a/b`; accepts the unicode minus sign.
pub fn parse_rat(s: &str) -> Result<Rat, ExactError> {
    let t = s.trim().replace('\u{2212}', "-");
    let bad = || ExactError::ParseRational(s.to_string());
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t.as_str(), "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

pub fn max_rat(a: Rat, b: Rat) -> Rat {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn abs(x: &Rat) -> Rat {
    x.abs()
}

/// Helper for `Display` of rational slices.
pub struct RatList<'a>(pub &'a [Rat]);

impl fmt::Display for RatList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_rat).collect();
        write!(f, "{}", parts.join(","))
    }
}
