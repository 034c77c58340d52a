use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ArithError;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_bigint(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

pub fn pow10(d: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), d as usize)
}

/// Parses `"3"`, `"-7/12"`, `"0.61803"`, `"1e-9"` or `"-2.5e3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ArithError> {
    let s = s.trim();
    let bad = || ArithError::Parse(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{whole}{frac}");
    let mut value = Rational::new(
        BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?,
        pow10(frac.len() as u32),
    );
    let scale = exponent.unsigned_abs() as u32;
    if exponent >= 0 {
        value *= from_bigint(pow10(scale));
    } else {
        value /= from_bigint(pow10(scale));
    }
    Ok(if neg { -value } else { value })
}

/// Number of fractional decimal digits in a plain decimal string (`"0.125"` -> 3).
pub fn decimal_places(s: &str) -> usize {
    s.trim()
        .split_once('.')
        .map(|(_, f)| f.chars().take_while(|c| c.is_ascii_digit()).count())
        .unwrap_or(0)
}

pub fn floor(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil(x: &Rational) -> BigInt {
    -(-x.numer()).div_floor(x.denom())
}

/// Decimal rendering truncated toward negative infinity, with exactly `digits`
/// fractional digits.
pub fn to_decimal(x: &Rational, digits: u32) -> String {
    let scaled = floor(&(x * from_bigint(pow10(digits))));
    let neg = scaled.sign() == Sign::Minus;
    let mag = scaled.abs().to_string();
    let d = digits as usize;
    let mag = if mag.len() <= d {
        format!("{}{}", "0".repeat(d + 1 - mag.len()), mag)
    } else {
        mag
    };
    let (w, f) = mag.split_at(mag.len() - d);
    let sign = if neg { "-" } else { "" };
    if d == 0 {
        format!("{sign}{w}")
    } else {
        format!("{sign}{w}.{f}")
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Smallest positive common denominator of a set of rationals.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Distance to the nearest integer.
pub fn dist_to_int(x: &Rational) -> Rational {
    let f = x - from_bigint(floor(x));
    let g = Rational::one() - &f;
    if f < g {
        f
    } else {
        g
    }
}

/// Nearest integer, ties rounded down.
pub fn nearest_int(x: &Rational) -> BigInt {
    let half = rat(1, 2);
    let fl = floor(x);
    if x - from_bigint(fl.clone()) > half {
        fl + 1
    } else {
        fl
    }
}

pub fn sign(x: &Rational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

pub fn min(a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max(a: &Rational, b: &Rational) -> Rational {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_forms() {
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("1e-3").unwrap(), rat(1, 1000));
        assert_eq!(parse_rational("2.5E2").unwrap(), int(250));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn decimal_rendering_truncates_down() {
        assert_eq!(to_decimal(&rat(1, 3), 4), "0.3333");
        assert_eq!(to_decimal(&rat(-1, 3), 4), "-0.3334");
        assert_eq!(to_decimal(&int(12), 2), "12.00");
        assert_eq!(to_decimal(&rat(1, 8), 0), "0");
    }

    #[test]
    fn nearest_integer_distance() {
        assert_eq!(dist_to_int(&rat(7, 4)), rat(1, 4));
        assert_eq!(dist_to_int(&rat(-1, 3)), rat(1, 3));
        assert_eq!(nearest_int(&rat(5, 2)), BigInt::from(2));
        assert_eq!(nearest_int(&rat(-7, 4)), BigInt::from(-2));
    }
}
