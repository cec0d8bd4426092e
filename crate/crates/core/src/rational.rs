//! Exact rational helpers shared by the text formats.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `p`, `-p` or `p/q` into a reduced rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (text, None),
    };
    let numer: BigInt = numer
        .parse()
        .map_err(|_| Error::parse(0, format!("invalid rational numerator `{numer}`")))?;
    let denom: BigInt = match denom {
        Some(d) => d
            .parse()
            .map_err(|_| Error::parse(0, format!("invalid rational denominator `{d}`")))?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(Error::parse(0, "zero denominator"));
    }
    Ok(Rational::new(numer, denom))
}

/// Formats a rational as `p/q` in lowest terms with a positive denominator.
pub fn format_ratio(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Formats a rational compactly: integers without a denominator.
pub(crate) fn format_compact(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

