//! Exact rational helpers. Every measure in the crate is a [`Rational`].

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

/// `2^{-e}`
pub fn inv_pow2(e: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(pow2(e)))
}

/// `1 - 2^{-e}`
pub fn one_minus_inv_pow2(e: u64) -> Rational {
    Rational::one() - inv_pow2(e)
}

/// `count / 2^bits`
pub fn counting_measure(count: u64, bits: u64) -> Rational {
    Rational::new(BigInt::from(count), BigInt::from(pow2(bits)))
}

pub fn rpow(base: &Rational, exp: u64) -> Rational {
    if exp == 0 {
        return Rational::one();
    }
    let num: BigInt = Pow::pow(base.numer(), exp);
    let den: BigInt = Pow::pow(base.denom(), exp);
    Rational::new(num, den)
}

pub fn min(a: Rational, b: Rational) -> Rational {
    if a <= b {
        a
    } else {
        b
    }
}

/// Renders as `p/q`, or `p` when the denominator is 1.
pub fn fmt(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}
