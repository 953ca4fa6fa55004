//! Exact number types and their textual forms.

use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::Error;

/// Exact rational with a reduced big-integer numerator and denominator.
pub type ExactRational = BigRational;

/// An exact non-negative count. Serialises as a decimal string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BigCount(pub BigUint);

impl BigCount {
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn log2(&self) -> f64 {
        log2_biguint(&self.0)
    }

    pub fn to_rational(&self) -> ExactRational {
        BigRational::from_integer(BigInt::from(self.0.clone()))
    }
}

impl From<u128> for BigCount {
    fn from(v: u128) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount(v)
    }
}

impl Add for BigCount {
    type Output = BigCount;
    fn add(self, rhs: Self) -> Self {
        BigCount(self.0 + rhs.0)
    }
}

impl AddAssign<&BigCount> for BigCount {
    fn add_assign(&mut self, rhs: &BigCount) {
        self.0 += &rhs.0;
    }
}

impl std::iter::Sum for BigCount {
    fn sum<I: Iterator<Item = BigCount>>(iter: I) -> Self {
        iter.fold(BigCount::zero(), |a, b| a + b)
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for BigCount {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("not a decimal count: {s:?}")));
        }
        BigUint::from_str(s)
            .map(BigCount)
            .map_err(|e| Error::Parse(e.to_string()))
    }
}

impl Serialize for BigCount {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

/// `p/q` form, always with an explicit denominator.
pub fn rational_string(r: &ExactRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<ExactRational, Error> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p = BigInt::from_str(p).map_err(|_| bad())?;
    let q = BigInt::from_str(q).map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

/// serde adapter for rationals as `"p/q"`.
pub mod rational_serde {
    use super::*;

    pub fn serialize<S: serde::Serializer>(r: &ExactRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational_string(r))
    }
}

pub fn rat(p: i64, q: i64) -> ExactRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> ExactRational {
    BigRational::from_integer(BigInt::from(p))
}

/// 2^{-k} exactly.
pub fn dyadic(k: u32) -> ExactRational {
    BigRational::new(BigInt::one(), BigInt::one() << k as usize)
}

pub fn log2_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift as usize).to_u64().unwrap() as f64;
    top.log2() + shift as f64
}

pub fn log2_rational(r: &ExactRational) -> f64 {
    assert!(r.is_positive(), "log2 of a non-positive rational");
    log2_biguint(r.numer().magnitude()) - log2_biguint(r.denom().magnitude())
}

pub fn rational_to_f64(r: &ExactRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * log2_rational(&r.abs()).exp2()
}
