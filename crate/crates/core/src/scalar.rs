//! Coefficient scalars shared by the series, matrix and polygon layers.
//!
//! Every algebraic routine in the crate (truncated series, the division-free
//! characteristic polynomial, geometric-series inversion) is written against
//! [`Scalar`], so the same code runs over exact integers and rationals from
//! `num`, over residues modulo `p^M`, and over the context-carrying ring
//! elements built on top of those.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A commutative ring element.
///
/// Elements that live in a ring with runtime parameters (a modulus, a
/// cyclotomic context) produce their constants through `zero_like` and
/// `one_like` so that no global context is needed.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Image of an integer in the ring of `self`.
    fn embed_int(&self, v: &BigInt) -> Self;

    fn embed_i64(&self, v: i64) -> Self {
        self.embed_int(&BigInt::from(v))
    }

    fn is_one(&self) -> bool {
        *self == self.one_like()
    }

    fn pow_u64(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

macro_rules! num_scalar {
    ($t:ty, $from:expr) => {
        impl Scalar for $t {
            fn zero_like(&self) -> Self {
                <$t>::zero()
            }
            fn one_like(&self) -> Self {
                <$t>::one()
            }
            fn is_zero(&self) -> bool {
                Zero::is_zero(self)
            }
            fn embed_int(&self, v: &BigInt) -> Self {
                $from(v)
            }
        }
    };
}

num_scalar!(BigInt, |v: &BigInt| v.clone());
num_scalar!(BigRational, |v: &BigInt| BigRational::from_integer(v.clone()));

/// Integer-like coordinates that know their p-adic valuation.
pub trait PAdicInt: Scalar {
    /// `v_p(self)`, or `None` for zero.
    fn vp(&self, p: u64) -> Option<u64>;
    /// Absolute precision in p-adic digits; `None` for exact values.
    fn precision(&self) -> Option<u32>;
}

impl PAdicInt for BigInt {
    fn vp(&self, p: u64) -> Option<u64> {
        if Zero::is_zero(self) {
            return None;
        }
        let p = BigInt::from(p);
        let mut v = 0;
        let mut x = self.abs();
        loop {
            let (q, r) = x.div_rem(&p);
            if !Zero::is_zero(&r) {
                return Some(v);
            }
            x = q;
            v += 1;
        }
    }

    fn precision(&self) -> Option<u32> {
        None
    }
}

/// `(a * b) mod m` without overflow.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// `p^e`, or `None` when it does not fit below `2^60`.
pub fn checked_prime_power(p: u64, e: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(p)?;
        if acc >= 1 << 60 {
            return None;
        }
    }
    Some(acc)
}

/// Inverse of a unit modulo `m`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = num_integer::Integer::extended_gcd(&(a as i128), &(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

/// Reduce an integer into `[0, m)`.
pub fn bigint_mod(v: &BigInt, m: u64) -> u64 {
    let r = v.mod_floor(&BigInt::from(m));
    r.to_u64().expect("residue fits in u64")
}

/// Reduce a p-integral rational into `[0, m)`; `None` when the denominator
/// is not a unit modulo `m`.
pub fn rational_mod(v: &BigRational, m: u64) -> Option<u64> {
    let num = bigint_mod(v.numer(), m);
    let den = bigint_mod(v.denom(), m);
    let inv = inv_mod(den, m)?;
    Some(mul_mod(num, inv, m))
}

/// A residue modulo `p^M`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Zpm {
    v: u64,
    modulus: u64,
    prec: u32,
}

impl Zpm {
    /// `modulus` must equal `p^prec`.
    pub fn new(v: u64, modulus: u64, prec: u32) -> Self {
        Zpm {
            v: v % modulus,
            modulus,
            prec,
        }
    }

    pub fn value(&self) -> u64 {
        self.v
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Smallest-absolute-value signed representative.
    pub fn signed(&self) -> i64 {
        if self.v > self.modulus / 2 {
            self.v as i64 - self.modulus as i64
        } else {
            self.v as i64
        }
    }
}

impl fmt::Debug for Zpm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.v, self.modulus)
    }
}

/// The signed representative.
impl fmt::Display for Zpm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.signed())
    }
}

impl Add for Zpm {
    type Output = Zpm;
    fn add(self, o: Zpm) -> Zpm {
        debug_assert_eq!(self.modulus, o.modulus);
        let s = self.v + o.v;
        Zpm {
            v: if s >= self.modulus { s - self.modulus } else { s },
            ..self
        }
    }
}

impl Sub for Zpm {
    type Output = Zpm;
    fn sub(self, o: Zpm) -> Zpm {
        debug_assert_eq!(self.modulus, o.modulus);
        Zpm {
            v: if self.v >= o.v {
                self.v - o.v
            } else {
                self.v + self.modulus - o.v
            },
            ..self
        }
    }
}

impl Mul for Zpm {
    type Output = Zpm;
    fn mul(self, o: Zpm) -> Zpm {
        debug_assert_eq!(self.modulus, o.modulus);
        Zpm {
            v: mul_mod(self.v, o.v, self.modulus),
            ..self
        }
    }
}

impl Neg for Zpm {
    type Output = Zpm;
    fn neg(self) -> Zpm {
        Zpm {
            v: if self.v == 0 { 0 } else { self.modulus - self.v },
            ..self
        }
    }
}

impl Scalar for Zpm {
    fn zero_like(&self) -> Self {
        Zpm { v: 0, ..*self }
    }
    fn one_like(&self) -> Self {
        Zpm {
            v: 1 % self.modulus,
            ..*self
        }
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn embed_int(&self, v: &BigInt) -> Self {
        Zpm {
            v: bigint_mod(v, self.modulus),
            ..*self
        }
    }
    fn embed_i64(&self, v: i64) -> Self {
        Zpm {
            v: v.rem_euclid(self.modulus as i64) as u64,
            ..*self
        }
    }
}

impl PAdicInt for Zpm {
    fn vp(&self, p: u64) -> Option<u64> {
        if self.v == 0 {
            return None;
        }
        let mut x = self.v;
        let mut e = 0;
        while x.is_multiple_of(p) {
            x /= p;
            e += 1;
        }
        Some(e)
    }

    fn precision(&self) -> Option<u32> {
        Some(self.prec)
    }
}

/// A valuation read off a computed value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(BigRational),
    /// Proven zero.
    Infinite,
    /// Indistinguishable from zero at the working precision; the true
    /// valuation is at least the bound.
    AtLeast(BigRational),
}

impl Valuation {
    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Valuation::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_saturated(&self) -> bool {
        matches!(self, Valuation::AtLeast(_))
    }

    /// Rescale by a positive rational (unit conversion).
    pub fn scale(&self, by: &BigRational) -> Valuation {
        match self {
            Valuation::Finite(v) => Valuation::Finite(v * by),
            Valuation::Infinite => Valuation::Infinite,
            Valuation::AtLeast(v) => Valuation::AtLeast(v * by),
        }
    }

    /// Lower bound usable in comparisons; `None` means +infinity.
    pub fn lower_bound(&self) -> Option<&BigRational> {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Smallest integer `e` with `p^e >= r`, for positive rational `r`.
pub fn ceil_log(p: u64, r: &BigRational) -> i64 {
    assert!(r.is_positive(), "ceil_log of a non-positive rational");
    let p = BigRational::from_integer(BigInt::from(p));
    let mut e: i64 = 0;
    let mut pe = BigRational::one();
    if pe >= *r {
        // walk down while p^(e-1) still dominates
        loop {
            let next = &pe / &p;
            if next >= *r {
                pe = next;
                e -= 1;
            } else {
                return e;
            }
        }
    }
    while pe < *r {
        pe = &pe * &p;
        e += 1;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zpm_ring_ops() {
        let a = Zpm::new(5, 8, 3);
        let b = Zpm::new(7, 8, 3);
        assert_eq!((a + b).value(), 4);
        assert_eq!((a - b).value(), 6);
        assert_eq!((a * b).value(), 3);
        assert_eq!((-a).value(), 3);
        assert_eq!(a.embed_i64(-1).value(), 7);
        assert_eq!(Zpm::new(4, 8, 3).vp(2), Some(2));
        assert_eq!(Zpm::new(0, 8, 3).vp(2), None);
    }

    #[test]
    fn bigint_vp() {
        assert_eq!(BigInt::from(24).vp(2), Some(3));
        assert_eq!(BigInt::from(-9).vp(3), Some(2));
        assert_eq!(BigInt::from(0).vp(3), None);
    }

    #[test]
    fn rational_reduction() {
        // 1/3 mod 8 = 3
        assert_eq!(rational_mod(&rat(1, 3), 8), Some(3));
        assert_eq!(rational_mod(&rat(1, 2), 8), None);
    }

    #[test]
    fn ceil_log_cases() {
        assert_eq!(ceil_log(2, &rat(7, 6)), 1);
        assert_eq!(ceil_log(2, &rat(1, 1)), 0);
        assert_eq!(ceil_log(2, &rat(8, 1)), 3);
        assert_eq!(ceil_log(2, &rat(9, 1)), 4);
        assert_eq!(ceil_log(3, &rat(1, 2)), 0);
        assert_eq!(ceil_log(3, &rat(1, 4)), -1);
    }

    #[test]
    fn pow_generic() {
        assert_eq!(BigInt::from(3).pow_u64(4), BigInt::from(81));
        assert_eq!(Zpm::new(3, 8, 3).pow_u64(2).value(), 1);
    }
}
