//! Exact rational scalars and integer-argument binomial coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator (the backing type normalizes eagerly).
pub type Rat = BigRational;

pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_u(n: u64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `binom(j, i) = j (j-1) ... (j-i+1) / i!` for arbitrary integer `j`.
///
/// The product formula keeps the identity meaningful for negative `j`;
/// the result is always an integer.
pub fn binom_int(j: &BigInt, i: u32) -> BigInt {
    let mut num = BigInt::one();
    for k in 0..i {
        num *= j - BigInt::from(k);
    }
    let mut den = BigInt::one();
    for k in 1..=i {
        den *= BigInt::from(k);
    }
    num / den
}

pub fn binom_i64(j: i64, i: u32) -> Rat {
    Rat::from_integer(binom_int(&BigInt::from(j), i))
}

/// Nonnegative binomial coefficient as a `u128`, for level counting.
pub fn binom_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    acc
}

pub fn factorial(i: u32) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=i {
        acc *= BigInt::from(k);
    }
    acc
}

/// Falling factorial `m (m-1) ... (m-b+1)`.
pub fn falling(m: u32, b: u32) -> BigInt {
    if b > m {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for k in 0..b {
        acc *= BigInt::from(m - k);
    }
    acc
}

pub fn rat_pow(base: &Rat, exp: i64) -> Result<Rat> {
    if exp < 0 && base.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let mut acc = Rat::one();
    for _ in 0..exp.unsigned_abs() {
        acc *= base;
    }
    if exp < 0 {
        acc = Rat::one() / acc;
    }
    Ok(acc)
}

/// Ceiling of a rational.
pub fn rat_ceil(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `-3`, `7/2`, `0.75`-free canonical rational text.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational '{s}'"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rat::from_integer(n))
    }
}

/// `floor(i^(p/q))` by exact integer root extraction.
pub fn floor_pow(i: u64, p: u32, q: u32) -> Result<u64> {
    if q == 0 {
        return Err(Error::BadParameter("zero denominator exponent".into()));
    }
    let base = BigInt::from(i);
    let mut powed = BigInt::one();
    for _ in 0..p {
        powed *= &base;
    }
    let root = powed.nth_root(q);
    root.to_u64()
        .ok_or_else(|| Error::BadParameter("reindexed level exceeds u64".into()))
}

/// Signum-aware absolute value used when printing signed sums.
pub fn rat_abs(r: &Rat) -> Rat {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom_negative_arguments() {
        assert_eq!(binom_i64(-1, 2), rat_i(1));
        assert_eq!(binom_i64(-2, 3), rat_i(-4));
        assert_eq!(binom_i64(5, 2), rat_i(10));
        assert_eq!(binom_i64(3, 5), rat_i(0));
        assert_eq!(binom_i64(-4, 0), rat_i(1));
    }

    #[test]
    fn binom_product_formula_reference() {
        for j in -8i64..=8 {
            for i in 0u32..=6 {
                let mut num = rat_i(1);
                for k in 0..i {
                    num *= rat_i(j - k as i64);
                }
                let mut den = rat_i(1);
                for k in 1..=i {
                    den *= rat_i(k as i64);
                }
                assert_eq!(binom_i64(j, i), num / den, "j={j} i={i}");
            }
        }
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_rat("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rat("-7").unwrap(), rat_i(-7));
        assert_eq!(parse_rat("4/6").unwrap(), rat(2, 3));
        assert_eq!(rat(3, 2).to_string(), "3/2");
        assert_eq!(rat_i(-7).to_string(), "-7");
        assert_eq!(rat(4, 2).to_string(), "2");
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn floor_pow_exact() {
        assert_eq!(floor_pow(4, 3, 2).unwrap(), 8);
        assert_eq!(floor_pow(5, 3, 2).unwrap(), 11);
        assert_eq!(floor_pow(10, 1, 1).unwrap(), 10);
        assert_eq!(floor_pow(7, 2, 1).unwrap(), 49);
        for i in 0u64..50 {
            let v = floor_pow(i, 3, 2).unwrap();
            assert!(v * v <= i * i * i && (v + 1) * (v + 1) > i * i * i);
        }
    }

    #[test]
    fn falling_factorials() {
        assert_eq!(falling(5, 2), BigInt::from(20));
        assert_eq!(falling(3, 4), BigInt::from(0));
        assert_eq!(falling(4, 0), BigInt::from(1));
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
