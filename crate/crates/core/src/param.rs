//! Exact rational parameters.
//!
//! Construction constants (`c_k`, `kappa`, IFS translations) are kept as exact
//! rationals so that closed conditions which are tight by design, such as
//! `c_k + xi_k = 1` for the middle-third Cantor set, are decided exactly.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::interval::{div_down, div_up, Interval};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("cannot parse '{0}' as a rational number")]
pub struct ParamParseError(pub String);

/// A real parameter stored as an exact rational.
///
/// `exact` records whether the value was stated exactly (a fraction or a
/// decimal literal) or came from a binary float whose intent is unknown.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param {
    value: BigRational,
    exact: bool,
}

impl Param {
    pub fn from_ratio(value: BigRational) -> Self {
        Param { value, exact: true }
    }

    pub fn int(n: i64) -> Self {
        Param::from_ratio(BigRational::from_integer(n.into()))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Param::from_ratio(BigRational::new(n.into(), d.into()))
    }

    /// The binary value of `v`, flagged as approximate.
    pub fn from_f64(v: f64) -> Self {
        Param {
            value: BigRational::from_float(v).expect("finite parameter"),
            exact: false,
        }
    }

    pub fn ratio(&self) -> &BigRational {
        &self.value
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.value)
    }

    pub fn enclosure(&self) -> Interval {
        enclose(&self.value)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value.is_integer() {
            write!(f, "{}", self.value.numer())
        } else {
            write!(f, "{}/{}", self.value.numer(), self.value.denom())
        }
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Tightest easily computed interval containing the rational `r`.
pub fn enclose(r: &BigRational) -> Interval {
    let n = r.numer().to_f64();
    let d = r.denom().to_f64();
    match (n, d) {
        (Some(n), Some(d))
            if n.abs() < 9007199254740992.0 && d < 9007199254740992.0 && n.fract() == 0.0 =>
        {
            // both integers are exact doubles, so directed division is rigorous
            Interval::new(div_down(n, d), div_up(n, d)).expect("finite quotient")
        }
        _ => {
            let v = ratio_to_f64(r);
            let lo = if BigRational::from_float(v).is_some_and(|b| &b <= r) {
                v
            } else {
                v.next_down()
            };
            let hi = if BigRational::from_float(v).is_some_and(|b| &b >= r) {
                v
            } else {
                v.next_up()
            };
            Interval::new(lo, hi).expect("finite rational")
        }
    }
}

/// Parses `"3"`, `"-0.25"`, `"1e-3"` or `"2/3"` exactly.
pub fn parse_ratio(s: &str) -> Result<BigRational, ParamParseError> {
    let bad = || ParamParseError(s.to_string());
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_ratio(n)?;
        let d = parse_ratio(d)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let numer: BigInt = if all.is_empty() {
        BigInt::zero()
    } else {
        all.parse().map_err(|_| bad())?
    };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(numer);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

impl FromStr for Param {
    type Err = ParamParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_ratio(s).map(Param::from_ratio)
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ParamVisitor;

        impl Visitor<'_> for ParamVisitor {
            type Value = Param;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a string such as \"1/3\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Param, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Param, E> {
                Ok(Param::int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Param, E> {
                Ok(Param::from_ratio(BigRational::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Param, E> {
                // JSON numbers are read as the decimal the author wrote; the
                // shortest round-trip representation recovers it.
                if !v.is_finite() {
                    return Err(E::custom("non-finite number"));
                }
                format!("{v:e}").parse().map_err(E::custom)
            }
        }

        d.deserialize_any(ParamVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(Param::from_str("1/3").unwrap(), Param::frac(1, 3));
        assert_eq!(Param::from_str("0.2").unwrap(), Param::frac(1, 5));
        assert_eq!(Param::from_str("-1.5e-1").unwrap(), Param::frac(-3, 20));
        assert_eq!(Param::from_str("2.5e1").unwrap(), Param::int(25));
        assert!(Param::from_str("1/0").is_err());
        assert!(Param::from_str("abc").is_err());
        assert!(Param::from_str("").is_err());
    }

    #[test]
    fn json_numbers_keep_their_decimal_meaning() {
        let p: Param = serde_json::from_str("0.1").unwrap();
        assert_eq!(p, Param::frac(1, 10));
        let p: Param = serde_json::from_str("\"2/3\"").unwrap();
        assert_eq!(p, Param::frac(2, 3));
        let p: Param = serde_json::from_str("2").unwrap();
        assert_eq!(p, Param::int(2));
        assert_eq!(serde_json::to_string(&Param::frac(2, 3)).unwrap(), "\"2/3\"");
    }

    #[test]
    fn enclosures_contain_the_rational() {
        let third = Param::frac(1, 3).enclosure();
        assert!(third.lo() < third.hi());
        assert!(BigRational::from_float(third.lo()).unwrap() < *Param::frac(1, 3).ratio());
        assert!(BigRational::from_float(third.hi()).unwrap() > *Param::frac(1, 3).ratio());
        assert_eq!(Param::int(1).enclosure(), Interval::point(1.0));
        assert_eq!(Param::frac(1, 4).enclosure(), Interval::point(0.25));
    }

    #[test]
    fn float_params_are_flagged() {
        let p = Param::from_f64(0.1);
        assert!(!p.is_exact());
        assert_ne!(p, Param::frac(1, 10));
    }
}
