//! Exact rational arithmetic helpers shared by the whole crate.
//!
//! Every quantity in the discrete pipeline (payoffs, beliefs, mixture
//! weights, candidate values) is a solution of linear equations with
//! rational coefficients, so everything is kept in arbitrary-precision
//! rationals and compared exactly. Floats only appear in the continuous
//! solver and in plot layout.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always in canonical reduced form.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty numeric literal")]
    Empty,
    #[error("malformed numeric literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Builds a rational from small integers. Panics on zero denominator.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses a numeric literal: `"p/q"`, a decimal such as `"0.45"`, or a
/// plain integer. Decimals are read exactly (`0.4` becomes `2/5`), never
/// via binary floating point.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(text.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| malformed())?;
        let d: BigInt = den.trim().parse().map_err(|_| malformed())?;
        if d.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(text.to_string()));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
            || frac.is_empty()
        {
            return Err(malformed());
        }
        let whole_part: BigInt = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            whole_digits.parse().map_err(|_| malformed())?
        };
        let frac_part: BigInt = frac.parse().map_err(|_| malformed())?;
        let scale = BigInt::from(10u8).pow(frac.len() as u32);
        let mut value = Rational::new(whole_part * &scale + frac_part, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    let n: BigInt = s.parse().map_err(|_| malformed())?;
    Ok(Rational::from_integer(n))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// `n` evenly spaced rationals spanning `[0, 1]` inclusive (`n >= 2`).
pub fn evenly_spaced(n: usize) -> Vec<Rational> {
    assert!(n >= 2, "grid needs at least the two endpoints");
    let d = BigInt::from(n as u64 - 1);
    (0..n)
        .map(|i| Rational::new(BigInt::from(i as u64), d.clone()))
        .collect()
}

pub fn to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of truncated parts for extreme magnitudes.
        let n = value.numer().to_f64().unwrap_or(f64::NAN);
        let d = value.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn abs(value: &Rational) -> Rational {
    if value.is_negative() {
        -value.clone()
    } else {
        value.clone()
    }
}
