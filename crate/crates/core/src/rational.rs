//! Exact rational scalars and their text form.
//!
//! Rationals cross the CLI boundary as strings so that exactness survives
//! serialization: `"p/q"`, integer literals, and decimal literals (with an
//! optional exponent) are all accepted and converted without rounding.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub type Rational = BigRational;

/// Parse a rational from `"p/q"`, an integer, or a decimal literal such as
/// `"-1.25"` or `"3.5e-2"`.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::InvalidInput("empty rational literal".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| bad_literal(text, "numerator"))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| bad_literal(text, "denominator"))?;
        if d.is_zero() {
            return Err(Error::InvalidInput(format!(
                "zero denominator in rational literal `{text}`"
            )));
        }
        return Ok(Rational::new(n, d));
    }
    // Decimal literal: mantissa [. fraction] [e exponent]
    let (mantissa, exponent) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i32 = e.parse().map_err(|_| bad_literal(text, "exponent"))?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(bad_literal(text, "mantissa"));
    }
    let n: BigInt = digits.parse().map_err(|_| bad_literal(text, "mantissa"))?;
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let scale = ten.pow(shift.unsigned_abs());
    Ok(if shift >= 0 {
        Rational::from_integer(n * scale)
    } else {
        Rational::new(n, scale)
    })
}

fn bad_literal(text: &str, part: &str) -> Error {
    Error::InvalidInput(format!("malformed {part} in rational literal `{text}`"))
}

/// Render as `"p"` or `"p/q"`; inverse of [`parse_rational`] on its image.
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

/// gcd of two nonnegative rationals: gcd of numerators over lcm of
/// denominators. `gcd(0, x) = x`.
pub fn rational_gcd(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let num = num::integer::gcd(a.numer().clone(), b.numer().clone());
    let den = num::integer::lcm(a.denom().clone(), b.denom().clone());
    Rational::new(num.abs(), den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_decimal_forms() {
        assert_eq!(parse_rational("3/2").unwrap(), Rational::new(3.into(), 2.into()));
        assert_eq!(parse_rational("-1.25").unwrap(), Rational::new((-5).into(), 4.into()));
        assert_eq!(parse_rational("2").unwrap(), Rational::from_integer(2.into()));
        assert_eq!(parse_rational("3.5e-2").unwrap(), Rational::new(7.into(), 200.into()));
        assert_eq!(parse_rational("1e3").unwrap(), Rational::from_integer(1000.into()));
    }

    #[test]
    fn rejects_malformed_literals() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a.b").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn formats_round_trip() {
        for s in ["3/2", "-7/3", "4", "0"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn gcd_of_rationals() {
        let g = rational_gcd(
            &parse_rational("1/3").unwrap(),
            &parse_rational("1/2").unwrap(),
        );
        assert_eq!(g, parse_rational("1/6").unwrap());
        assert_eq!(
            rational_gcd(&Rational::zero(), &parse_rational("3/4").unwrap()),
            parse_rational("3/4").unwrap()
        );
    }
}
