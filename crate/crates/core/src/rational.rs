//! Parsing and formatting of exact rational literals (`"3"`, `"-7/2"`).
//!
//! All file formats in this crate carry rationals as `num/den` strings; this
//! module is the single place those strings are produced and consumed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal '{0}'")]
pub struct ParseRationalError(pub String);

/// Parse `"n"` or `"n/d"` into an exact rational. Whitespace around the
/// literal is ignored; the denominator must be nonzero.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseRationalError> {
    let s = s.trim();
    let err = || ParseRationalError(s.to_string());
    let mut parts = s.splitn(2, '/');
    let num: BigInt = parts.next().ok_or_else(err)?.trim().parse().map_err(|_| err())?;
    match parts.next() {
        None => Ok(BigRational::from_integer(num)),
        Some(d) => {
            let den: BigInt = d.trim().parse().map_err(|_| err())?;
            if den.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(num, den))
        }
    }
}

/// Format a rational as `"n"` when integral and `"n/d"` otherwise.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Shorthand for an integer rational, mostly used in tests.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
