//! Exact rational helpers shared by every module.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always in canonical form.
pub type Rational = num_rational::BigRational;

/// Builds `num/den` from machine integers.
///
/// # Panics
/// Panics if `den` is zero.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

/// Largest integer multiple of `step` that does not exceed `x`.
pub fn floor_to_multiple(x: &Rational, step: &Rational) -> Rational {
    let n = (x / step).floor();
    n * step
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}` (expected p or p/q)")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("`{0}` is a decimal literal; exact p/q form is required here")]
    Decimal(String),
}

/// Parses `p`, `-p`, or `p/q`. Decimal literals are rejected.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if s.contains(['.', 'e', 'E']) && !s.contains('/') {
        return Err(ParseRationalError::Decimal(s.to_string()));
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
    let den = BigInt::from_str(den).map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
    if den.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(s.to_string()));
    }
    Ok(Rational::new(num, den))
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// via continued-fraction convergents and the final semiconvergent.
pub fn rationalize(x: f64, max_den: u64) -> Option<Rational> {
    if !x.is_finite() || max_den == 0 {
        return None;
    }
    let negative = x < 0.0;
    let mut frac = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let max_den = max_den as u128;
    for _ in 0..64 {
        let a = frac.floor();
        if a > 1e30 {
            break;
        }
        let ai = a as u128;
        let q2 = ai * q1 + q0;
        if q2 > max_den {
            // semiconvergent with the largest admissible partial quotient
            let k = (max_den - q0) / q1;
            let (ps, qs) = (k * p1 + p0, k * q1 + q0);
            let cand = |p: u128, q: u128| (p as f64 / q as f64 - x.abs()).abs();
            if qs > 0 && cand(ps, qs) < cand(p1, q1) {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        let p2 = ai * p1 + p0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let rem = frac - a;
        if rem < 1e-15 {
            break;
        }
        frac = 1.0 / rem;
    }
    if q1 == 0 {
        return None;
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    Some(if negative { -r } else { r })
}

/// Parses a tolerance: exact `p/q` first, falling back to a decimal literal
/// rationalized with denominators up to `max_den`. The flag reports whether
/// the fallback was used.
pub fn parse_tolerance(s: &str, max_den: u64) -> Result<(Rational, bool), ParseRationalError> {
    match parse_rational(s) {
        Ok(r) => Ok((r, false)),
        Err(ParseRationalError::Decimal(_)) => {
            let x: f64 = s
                .trim()
                .parse()
                .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
            rationalize(x, max_den)
                .map(|r| (r, true))
                .ok_or_else(|| ParseRationalError::Malformed(s.to_string()))
        }
        Err(e) => Err(e),
    }
}

/// A rational extended with both infinities. Used for frontier values
/// (`+inf` when a mean level is unreachable, `-inf` for an unattainable
/// variance budget).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Extended {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Extended {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Extended::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::NegInf => f64::NEG_INFINITY,
            Extended::Finite(r) => to_f64(r),
            Extended::PosInf => f64::INFINITY,
        }
    }

    /// Adds a finite offset; infinities absorb it.
    pub fn offset(&self, by: &Rational) -> Extended {
        match self {
            Extended::Finite(r) => Extended::Finite(r + by),
            other => other.clone(),
        }
    }

    pub fn scale(&self, by: &Rational) -> Extended {
        debug_assert!(by.is_positive());
        match self {
            Extended::Finite(r) => Extended::Finite(r * by),
            other => other.clone(),
        }
    }
}

impl From<Rational> for Extended {
    fn from(r: Rational) -> Self {
        Extended::Finite(r)
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        use Extended::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInf => f.write_str("-inf"),
            Extended::Finite(r) => write!(f, "{r}"),
            Extended::PosInf => f.write_str("inf"),
        }
    }
}

/// Least common multiple of the denominators: the smallest positive integer
/// `d` such that `d * x` is integral for every `x`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Serde adapter: a rational as a two-element JSON array `[num, den]`.
/// Components that fit in `i64` are plain numbers, larger ones are decimal
/// strings.
pub mod json {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Component {
        Small(i64),
        Big(String),
    }

    impl Component {
        fn from_big(x: &BigInt) -> Self {
            match x.to_i64() {
                Some(v) => Component::Small(v),
                None => Component::Big(x.to_string()),
            }
        }

        fn into_big<E: serde::de::Error>(self) -> Result<BigInt, E> {
            match self {
                Component::Small(v) => Ok(BigInt::from(v)),
                Component::Big(s) => BigInt::from_str(&s).map_err(E::custom),
            }
        }
    }

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        (Component::from_big(x.numer()), Component::from_big(x.denom())).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let (n, q) = <(Component, Component)>::deserialize(d)?;
        let n = n.into_big::<D::Error>()?;
        let q = q.into_big::<D::Error>()?;
        if q.is_zero() {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(Rational::new(n, q))
    }

    /// Newtype wrapper for rationals nested inside other serde structures.
    #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
    pub struct Json(#[serde(with = "self")] pub Rational);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert!(matches!(parse_rational("0.5"), Err(ParseRationalError::Decimal(_))));
        assert!(matches!(parse_rational("1/0"), Err(ParseRationalError::ZeroDenominator(_))));
        assert!(parse_rational("x/2").is_err());
    }

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(rationalize(0.25, 1_000_000).unwrap(), rat(1, 4));
        assert_eq!(rationalize(-1.5, 10).unwrap(), rat(-3, 2));
        assert_eq!(rationalize(1.0 / 3.0, 1_000_000).unwrap(), rat(1, 3));
        let pi = rationalize(std::f64::consts::PI, 1000).unwrap();
        assert_eq!(pi, rat(355, 113));
    }

    #[test]
    fn tolerance_falls_back_to_decimal() {
        let (r, warned) = parse_tolerance("0.125", 1_000_000).unwrap();
        assert_eq!(r, rat(1, 8));
        assert!(warned);
        let (r, warned) = parse_tolerance("1/8", 1_000_000).unwrap();
        assert_eq!(r, rat(1, 8));
        assert!(!warned);
    }

    #[test]
    fn floor_to_multiple_rounds_down() {
        assert_eq!(floor_to_multiple(&rat(1, 3), &rat(1, 2)), int(0));
        assert_eq!(floor_to_multiple(&rat(2, 3), &rat(1, 2)), rat(1, 2));
        assert_eq!(floor_to_multiple(&rat(-1, 3), &rat(1, 2)), rat(-1, 2));
        assert_eq!(floor_to_multiple(&int(1), &rat(1, 2)), int(1));
    }

    #[test]
    fn extended_order() {
        let a = Extended::Finite(int(3));
        assert!(Extended::NegInf < a);
        assert!(a < Extended::PosInf);
        assert_eq!(Extended::PosInf.offset(&int(1)), Extended::PosInf);
    }

    #[test]
    fn json_round_trip_large_components() {
        let big = Rational::new(BigInt::from(10).pow(30), BigInt::from(7));
        let text = serde_json::to_string(&json::Json(big.clone())).unwrap();
        assert!(text.starts_with("[\""));
        let back: json::Json = serde_json::from_str(&text).unwrap();
        assert_eq!(back.0, big);
        let small: json::Json = serde_json::from_str("[2, 4]").unwrap();
        assert_eq!(small.0, rat(1, 2));
    }
}
