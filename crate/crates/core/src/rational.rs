//! Exact rational arithmetic helpers.
//!
//! All quantities in the tower constructions are rational, so the whole
//! crate works over [`num_rational::BigRational`] and asserts equalities
//! instead of tolerances.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `m^(-k)` for `m >= 1`.
pub fn neg_pow(m: u32, k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(m).pow(k))
}

/// `base^exp` for a nonnegative integer exponent.
pub fn pow(base: &Rational, exp: u32) -> Rational {
    let mut out = Rational::one();
    for _ in 0..exp {
        out *= base;
    }
    out
}

/// Renders without a denominator when integral: `3`, `-1/2`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `-p`, or `p/q`. The inverse of [`format_rational`].
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| format!("bad rational numerator `{num}`"))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| format!("bad rational denominator `{den}`"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Rational::new(n, d))
}

/// Max of two rationals by value.
pub fn max(a: Rational, b: Rational) -> Rational {
    if a >= b {
        a
    } else {
        b
    }
}

/// Min of two rationals by value.
pub fn min(a: Rational, b: Rational) -> Rational {
    if a <= b {
        a
    } else {
        b
    }
}

/// Clamps `x` into `[lo, hi]`.
pub fn clamp(x: Rational, lo: &Rational, hi: &Rational) -> Rational {
    if &x < lo {
        lo.clone()
    } else if &x > hi {
        hi.clone()
    } else {
        x
    }
}

/// |x|
pub fn abs(x: &Rational) -> Rational {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "3", "-7", "1/2", "-5/8", "22/7"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
    }

    #[test]
    fn parse_normalizes() {
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" 6/3 ").unwrap(), int(2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn neg_pow_values() {
        assert_eq!(neg_pow(2, 0), int(1));
        assert_eq!(neg_pow(2, 3), rat(1, 8));
        assert_eq!(neg_pow(3, 2), rat(1, 9));
    }
}
