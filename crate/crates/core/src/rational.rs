//! Exact rational numbers and their textual forms.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse `p/q`, an integer, or a decimal such as `0.6` (read as the exact
/// base-10 fraction 3/5). An optional leading `-` is accepted.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let digits = |d: &str| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit());
    let value = if let Some((num, den)) = body.split_once('/') {
        if !digits(num) || !digits(den) {
            return Err(err());
        }
        let den: BigInt = den.parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        Rational::new(num.parse().map_err(|_| err())?, den)
    } else if let Some((whole, frac)) = body.split_once('.') {
        if !(digits(whole) || whole.is_empty()) || !digits(frac) {
            return Err(err());
        }
        let whole: BigInt = if whole.is_empty() {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| err())?
        };
        let scale = num_traits::pow(BigInt::from(10u8), frac.len());
        let frac: BigInt = frac.parse().map_err(|_| err())?;
        Rational::new(whole * &scale + frac, scale)
    } else {
        if !digits(body) {
            return Err(err());
        }
        Rational::from_integer(body.parse().map_err(|_| err())?)
    };
    Ok(if negative { -value } else { value })
}

/// `p/q` in lowest terms, or `p` when the denominator is one.
pub fn fmt_rational(r: &Rational) -> String {
    r.to_string()
}

/// Decimal expansion with `digits` fractional digits, rounded to nearest
/// with ties to even.
pub fn fmt_decimal(r: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u8), digits);
    let scaled = r.abs() * Rational::from_integer(scale.clone());
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let twice = rem * 2u8;
    let rounded = match twice.cmp(scaled.denom()) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1u8,
        std::cmp::Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1u8
            }
        }
    };
    let (whole, frac) = rounded.div_rem(&scale);
    let sign = if r.is_negative() && !rounded.is_zero() {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{:0>width$}", frac.to_string(), width = digits)
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Exact binomial coefficient `C(n, k)` (zero when `k > n`).
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    // each partial product is itself a binomial coefficient, so the division is exact
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `C(n, 0), ..., C(n, n)`.
pub fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    for k in 0..=n {
        row.push(c.clone());
        if k < n {
            c = c * (n - k) / (k + 1);
        }
    }
    row
}

pub fn from_biguint(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.6").unwrap(), ratio(3, 5));
        assert_eq!(parse_rational("0.1").unwrap(), ratio(1, 10));
        assert_eq!(parse_rational(".25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("1.2").unwrap(), ratio(6, 5));
        assert_eq!(parse_rational("1").unwrap(), int(1));
        assert_eq!(parse_rational("3/5").unwrap(), ratio(3, 5));
        assert_eq!(parse_rational("6/10").unwrap(), ratio(3, 5));
        assert_eq!(parse_rational("-1/2").unwrap(), ratio(-1, 2));
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "1/0", "a", "1.", "0.5.5", "1e3", "1/-2", "+1", "/3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn formats_lowest_terms() {
        assert_eq!(fmt_rational(&ratio(6, 10)), "3/5");
        assert_eq!(fmt_rational(&ratio(10, 1)), "10");
        assert_eq!(fmt_rational(&ratio(-2, 4)), "-1/2");
    }

    #[test]
    fn decimal_rounding() {
        assert_eq!(fmt_decimal(&ratio(2, 3), 3), "0.667");
        assert_eq!(fmt_decimal(&ratio(1, 8), 2), "0.12");
        assert_eq!(fmt_decimal(&ratio(3, 8), 2), "0.38");
        assert_eq!(fmt_decimal(&ratio(-1, 3), 2), "-0.33");
        assert_eq!(fmt_decimal(&ratio(-1, 1000), 2), "0.00");
        assert_eq!(fmt_decimal(&int(1), 0), "1");
        assert_eq!(fmt_decimal(&ratio(5, 2), 0), "2");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), BigUint::from(6u8));
        assert_eq!(binomial(2, 3), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        let row = binomial_row(10);
        for (k, c) in row.iter().enumerate() {
            assert_eq!(*c, binomial(10, k as u64));
        }
        // C(1000, 500) has 300 decimal digits
        assert_eq!(binomial(1000, 500).to_string().len(), 300);
    }
}
