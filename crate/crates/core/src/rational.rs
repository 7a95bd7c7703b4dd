//! Exact rational scalars and their textual form.
//!
//! Literals are `a/b` or a bare integer `a`; decimal and exponent notation
//! are rejected outright. Rendering is canonical lowest terms, which makes
//! every written matrix re-parse to an identical value.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn parse_rational(token: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("`{token}` is not a rational literal (expected `a/b` or `a`)"));
    let int = |s: &str| -> Result<BigInt> {
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse::<BigInt>().map_err(|_| bad())
    };
    match token.split_once('/') {
        Some((num, den)) => {
            let den = int(den)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("`{token}` has a zero denominator")));
            }
            Ok(Rational::new(int(num)?, den))
        }
        None => Ok(Rational::from_integer(int(token)?)),
    }
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn half() -> Rational {
    rat(1, 2)
}

/// `base^exp` for a non-negative integer exponent.
pub fn pow(base: &Rational, exp: usize) -> Rational {
    num_traits::pow::pow(base.clone(), exp)
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn is_probability(r: &Rational) -> bool {
    !r.is_negative() && r <= &Rational::one()
}

/// Dense ascending ranks: equal values share a rank and `a < b` iff
/// `rank(a) < rank(b)`. Lets triple scans compare small integers instead of
/// cross-multiplying big rationals.
pub fn dense_ranks(values: &[Rational]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].cmp(&values[b]));
    let mut ranks = vec![0u32; values.len()];
    let mut rank = 0u32;
    for (k, &i) in order.iter().enumerate() {
        if k > 0 && values[i] != values[order[k - 1]] {
            rank += 1;
        }
        ranks[i] = rank;
    }
    ranks
}
