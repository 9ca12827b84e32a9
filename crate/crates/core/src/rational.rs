//! Exact rational probabilities and their text form.
//!
//! Scenario files and reports write rationals as `"p/q"` (or `"p"` for
//! integers) so that exactness survives serialization.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Builds `n/d` from machine integers.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`. Denominators must be positive.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (text, None),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::InvalidWeights(format!("cannot parse numerator in {text:?}")))?;
    let d: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| Error::InvalidWeights(format!("cannot parse denominator in {text:?}")))?,
        None => BigInt::one(),
    };
    if d.is_zero() || d.is_negative() {
        return Err(Error::InvalidWeights(format!(
            "denominator must be positive in {text:?}"
        )));
    }
    Ok(Rational::new(n, d))
}

/// Renders in the `"p/q"` form, dropping the denominator when it is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite float (every finite f64 is dyadic).
pub fn from_f64_exact(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["1/2", "0", "3", "7/3"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        assert_eq!(format_rational(&parse_rational("2/4").unwrap()), "1/2");
    }

    #[test]
    fn rejects_zero_and_negative_denominators() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn float_round_trip_is_exact_for_dyadics() {
        let half = from_f64_exact(0.5).unwrap();
        assert_eq!(half, ratio(1, 2));
        assert!(from_f64_exact(f64::NAN).is_none());
    }
}
