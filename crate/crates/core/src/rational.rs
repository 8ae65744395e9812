//! Exact rational scalars and their canonical text form.
//!
//! Every quantity in this crate is a `Rat` (arbitrary-precision rational);
//! nothing is ever rounded. The text form is the canonical lowest-terms
//! `"p/q"` (or `"p"` when the denominator is one) with a positive
//! denominator, which is what instance files and reports carry.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Shorthand for `n/d` from machine integers. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// 2^n as a rational.
pub fn pow2(n: u32) -> Rat {
    Rat::from_integer(BigInt::one() << n)
}

/// Largest multiple of 2^-n that is <= r.
pub fn dyadic_floor(r: &Rat, n: u32) -> Rat {
    let scale = pow2(n);
    (r * &scale).floor() / scale
}

/// Smallest multiple of 2^-n that is >= r.
pub fn dyadic_ceil(r: &Rat, n: u32) -> Rat {
    let scale = pow2(n);
    (r * &scale).ceil() / scale
}

/// Canonical text form: lowest terms, positive denominator, no denominator
/// shown when it is one.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p"` or `"p/q"`. Rejects a zero or negative written denominator;
/// the stored value is normalized to lowest terms.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let bad = |reason: &str| Error::BadRational {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let s = text.trim();
    if s.is_empty() {
        return Err(bad("empty string"));
    }
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let numer: BigInt = num_str
        .parse()
        .map_err(|_| bad("numerator is not an integer"))?;
    let denom: BigInt = match den_str {
        Some(d) => d.parse().map_err(|_| bad("denominator is not an integer"))?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad("denominator is zero"));
    }
    if denom.is_negative() {
        return Err(bad("denominator must be positive"));
    }
    Ok(Rat::new(numer, denom))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "3", "-5", "1/4", "-7/3", "22/7"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
    }

    #[test]
    fn parse_normalizes_to_lowest_terms() {
        assert_eq!(parse_rat("2/4").unwrap(), rat(1, 2));
        assert_eq!(format_rat(&parse_rat("6/3").unwrap()), "2");
    }

    #[test]
    fn parse_rejects_zero_and_negative_denominators() {
        assert!(matches!(parse_rat("3/0"), Err(Error::BadRational { .. })));
        assert!(matches!(parse_rat("1/-2"), Err(Error::BadRational { .. })));
        assert!(parse_rat("").is_err());
        assert!(parse_rat("a/b").is_err());
    }

    #[test]
    fn dyadic_bounds() {
        // floor(3/10 on the 1/4 grid) = 1/4, ceil = 1/2
        assert_eq!(dyadic_floor(&rat(3, 10), 2), rat(1, 4));
        assert_eq!(dyadic_ceil(&rat(3, 10), 2), rat(1, 2));
        // negative values floor away from zero
        assert_eq!(dyadic_floor(&rat(-3, 10), 2), rat(-1, 2));
        assert_eq!(dyadic_ceil(&rat(-3, 10), 2), rat(-1, 4));
        // already on the grid
        assert_eq!(dyadic_floor(&rat_int(1), 5), rat_int(1));
        assert_eq!(dyadic_ceil(&rat_int(1), 5), rat_int(1));
    }
}
