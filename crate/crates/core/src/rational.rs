//! Rational parameters and exact values, and their `"num/den"` text form.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Machine-size rational used for sampler parameters (θ, fractions).
pub type Rational = Ratio<i64>;

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = |why: &str| Error::Parse(format!("`{text}` is not a rational: {why}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad("numerator"))?;
        let den: i64 = den.trim().parse().map_err(|_| bad("denominator"))?;
        if den == 0 {
            return Err(bad("zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
            return Err(bad("fraction digits"));
        }
        let negative = int.starts_with('-');
        let int_val: i64 = match int {
            "" | "-" | "+" => 0,
            _ => int.parse().map_err(|_| bad("integer part"))?,
        };
        let scale = 10i64.pow(frac.len() as u32);
        let frac_val: i64 = frac.parse().map_err(|_| bad("fraction digits"))?;
        let magnitude = int_val
            .abs()
            .checked_mul(scale)
            .and_then(|x| x.checked_add(frac_val))
            .ok_or_else(|| bad("overflow"))?;
        let num = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(num, scale));
    }
    let num: i64 = s.parse().map_err(|_| bad("integer"))?;
    Ok(Rational::from_integer(num))
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Always `"num/den"`, including integers (`"2/1"`).
pub fn format_big(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_big(text: &str) -> Result<BigRational> {
    let (num, den) = text
        .trim()
        .split_once('/')
        .ok_or_else(|| Error::Parse(format!("`{text}` is not of the form num/den")))?;
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in `{text}`")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in `{text}`")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{text}`")));
    }
    Ok(BigRational::new(num, den))
}

pub fn big_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn ratio_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub(crate) mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Float(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => parse_rational(&t).map_err(serde::de::Error::custom),
            Raw::Int(i) => Ok(Rational::from_integer(i)),
            Raw::Float(f) => parse_rational(&format!("{f}")).map_err(serde::de::Error::custom),
        }
    }
}
