//! Canonical "num/den" text form for exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::Error;

/// Formats a rational as `num/den`, always with an explicit denominator.
pub fn format_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `p` into an exact rational.
pub fn parse_ratio(input: &str) -> Result<BigRational, Error> {
    let bad = || Error::RatioParse {
        input: input.to_string(),
    };
    let s = input.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let numer: BigInt = num.parse().map_err(|_| bad())?;
    let denom: BigInt = den.parse().map_err(|_| bad())?;
    if denom == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(numer, denom))
}
