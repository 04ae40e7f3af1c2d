//! Exact numeric types.
//!
//! Finite-system metrics are exact rationals; distances on shift spaces are
//! dyadic (`0` or `2^-k`), kept as an exponent so they never overflow.

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = num::rational::Ratio<i64>;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Parses `"p/q"`, `"p"` or a decimal literal such as `"0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Spec(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int_part: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
        let den = 10i64.pow(frac.len() as u32);
        let frac_part: i64 = frac.parse().map_err(|_| bad())?;
        let num = int_part.abs() * den + frac_part;
        return Ok(Rational::new(if neg { -num } else { num }, den));
    }
    s.parse::<i64>().map(Rational::from_integer).map_err(|_| bad())
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn format_big(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `2^-k` as an exact rational.
pub fn dyadic_rational(k: u32) -> Rational {
    assert!(k < 63, "2^-{k} is not representable as Ratio<i64>");
    Rational::new(1, 1i64 << k)
}

/// Serde adapter writing a [`Rational`] as a `"p/q"` string.
pub mod rational_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// A distance on a shift space: either `0` or `2^-k` for some `k >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dyadic {
    Zero,
    /// `2^-k`
    Pow(u32),
}

impl Dyadic {
    pub const ONE: Dyadic = Dyadic::Pow(0);

    pub fn pow(k: u32) -> Self {
        Dyadic::Pow(k)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Dyadic::Zero)
    }

    /// Exponent `k` of `2^-k`, `None` for zero.
    pub fn exponent(&self) -> Option<u32> {
        match self {
            Dyadic::Zero => None,
            Dyadic::Pow(k) => Some(*k),
        }
    }

    pub fn half(self) -> Self {
        match self {
            Dyadic::Zero => Dyadic::Zero,
            Dyadic::Pow(k) => Dyadic::Pow(k + 1),
        }
    }

    pub fn double(self) -> Self {
        match self {
            Dyadic::Zero => Dyadic::Zero,
            Dyadic::Pow(0) => panic!("2 is not a shift-space distance"),
            Dyadic::Pow(k) => Dyadic::Pow(k - 1),
        }
    }

    pub fn to_rational(self) -> Option<Rational> {
        match self {
            Dyadic::Zero => Some(<Rational as Zero>::zero()),
            Dyadic::Pow(k) if k < 63 => Some(dyadic_rational(k)),
            Dyadic::Pow(_) => None,
        }
    }

    pub fn to_big(self) -> BigRational {
        match self {
            Dyadic::Zero => BigRational::zero(),
            Dyadic::Pow(k) => BigRational::new(BigInt::one(), BigInt::one() << k as usize),
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Dyadic::Zero => 0.0,
            Dyadic::Pow(k) => 0.5f64.powi(k as i32),
        }
    }

    /// Reads a rational of the form `0` or `1/2^k`.
    pub fn from_rational(r: &Rational) -> Option<Dyadic> {
        if r.is_zero() {
            return Some(Dyadic::Zero);
        }
        if *r.numer() != 1 || r.is_negative() {
            return None;
        }
        let d = *r.denom();
        (d > 0 && d & (d - 1) == 0).then(|| Dyadic::Pow(d.trailing_zeros()))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Dyadic::Zero, Dyadic::Zero) => Ordering::Equal,
            (Dyadic::Zero, Dyadic::Pow(_)) => Ordering::Less,
            (Dyadic::Pow(_), Dyadic::Zero) => Ordering::Greater,
            (Dyadic::Pow(a), Dyadic::Pow(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dyadic::Zero => f.write_str("0"),
            Dyadic::Pow(0) => f.write_str("1"),
            Dyadic::Pow(k) if *k < 63 => write!(f, "1/{}", 1u64 << k),
            Dyadic::Pow(k) => write!(f, "2^-{k}"),
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Exact distances used by generic code: ordered, copyable, with a zero.
pub trait ExactDistance: Copy + Ord + fmt::Debug + fmt::Display + Send + Sync {
    fn zero_dist() -> Self;
    /// `2^-k` in this distance type.
    fn dyadic(k: u32) -> Self;
    /// Rational value for reporting.
    fn to_big(self) -> BigRational;
    fn to_f64(self) -> f64;
}

impl ExactDistance for Rational {
    fn zero_dist() -> Self {
        <Rational as Zero>::zero()
    }
    fn dyadic(k: u32) -> Self {
        dyadic_rational(k)
    }
    fn to_big(self) -> BigRational {
        to_big(&self)
    }
    fn to_f64(self) -> f64 {
        rational_to_f64(&self)
    }
}

impl ExactDistance for Dyadic {
    fn zero_dist() -> Self {
        Dyadic::Zero
    }
    fn dyadic(k: u32) -> Self {
        Dyadic::Pow(k)
    }
    fn to_big(self) -> BigRational {
        Dyadic::to_big(self)
    }
    fn to_f64(self) -> f64 {
        Dyadic::to_f64(self)
    }
}

pub fn big_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), rat(7, 1));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn dyadic_order_and_conversion() {
        assert!(Dyadic::Zero < Dyadic::Pow(40));
        assert!(Dyadic::Pow(3) < Dyadic::Pow(2));
        assert_eq!(Dyadic::ONE.to_rational(), Some(rat(1, 1)));
        assert_eq!(Dyadic::from_rational(&rat(1, 8)), Some(Dyadic::Pow(3)));
        assert_eq!(Dyadic::from_rational(&rat(3, 8)), None);
        assert_eq!(Dyadic::Pow(4).to_string(), "1/16");
    }
}
