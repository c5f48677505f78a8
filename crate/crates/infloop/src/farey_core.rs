//! Exact rationals, Farey addition and the neighbour predicates of the
//! Farey tessellation, of its Γ₀(n) subset and of `F ∩ (1/n)F`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// A reduced fraction `num/den` with `den >= 0`.
///
/// The point at infinity is the single value `1/0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: BigInt,
    den: BigInt,
}

impl Rational {
    /// Builds `num/den` in lowest terms. `0/0` is rejected.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, Error> {
        let (mut num, mut den) = (num.into(), den.into());
        if num.is_zero() && den.is_zero() {
            return Err(Error::Domain("0/0 is not a rational".into()));
        }
        if den.is_zero() {
            return Ok(Self::infinity());
        }
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let g = num.gcd(&den);
        if !g.is_one() {
            num /= &g;
            den /= &g;
        }
        Ok(Rational { num, den })
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Rational { num: n.into(), den: BigInt::one() }
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn infinity() -> Self {
        Rational { num: BigInt::one(), den: BigInt::zero() }
    }

    /// Trusted constructor for pairs known to be coprime with `den >= 0`.
    pub(crate) fn from_coprime(num: BigInt, den: BigInt) -> Self {
        debug_assert!(!den.is_negative());
        if den.is_zero() {
            return Self::infinity();
        }
        Rational { num, den }
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    /// `floor(self)`; undefined for ∞.
    pub fn floor(&self) -> BigInt {
        self.num.div_floor(&self.den)
    }

    pub fn add(&self, other: &Rational) -> Rational {
        assert!(!self.is_infinite() && !other.is_infinite());
        Rational::new(&self.num * &other.den + &other.num * &self.den, &self.den * &other.den).unwrap()
    }

    pub fn sub(&self, other: &Rational) -> Rational {
        assert!(!self.is_infinite() && !other.is_infinite());
        Rational::new(&self.num * &other.den - &other.num * &self.den, &self.den * &other.den).unwrap()
    }

    pub fn mul(&self, other: &Rational) -> Rational {
        assert!(!self.is_infinite() && !other.is_infinite());
        Rational::new(&self.num * &other.num, &self.den * &other.den).unwrap()
    }

    /// Exact quotient; the divisor must be a nonzero finite rational.
    pub fn div(&self, other: &Rational) -> Rational {
        assert!(!self.is_infinite() && !other.is_infinite() && !other.num.is_zero());
        Rational::new(&self.num * &other.den, &self.den * &other.num).unwrap()
    }

    pub fn abs(&self) -> Rational {
        Rational { num: self.num.abs(), den: self.den.clone() }
    }

    pub fn scale(&self, n: &BigInt) -> Rational {
        if self.is_infinite() {
            return Self::infinity();
        }
        Rational::new(&self.num * n, self.den.clone()).unwrap()
    }

    pub fn recip(&self) -> Rational {
        Rational::new(self.den.clone(), self.num.clone()).unwrap()
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (&self.num * &other.den).cmp(&(&other.num * &self.den)),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p/q`, `p`, `oo` and `inf`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "oo" || s == "inf" {
            return Ok(Self::infinity());
        }
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                Rational::new(p, q)
            }
            None => Ok(Rational::integer(s.parse::<BigInt>().map_err(|_| bad())?)),
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

/// An unordered pair of distinct points joined by a tessellation edge.
#[derive(Clone, Debug)]
pub struct FareyEdge {
    pub a: Rational,
    pub b: Rational,
}

impl FareyEdge {
    pub fn new(a: Rational, b: Rational) -> Result<Self, Error> {
        if a == b {
            return Err(Error::Domain("edge endpoints coincide".into()));
        }
        Ok(FareyEdge { a, b })
    }

    /// The edge `I` from 0 to ∞.
    pub fn base() -> Self {
        FareyEdge { a: Rational::zero(), b: Rational::infinity() }
    }

    pub fn is_base(&self) -> bool {
        *self == Self::base()
    }

    /// Edges `I + k` for integers `k >= 0`.
    pub fn is_base_translate(&self) -> bool {
        (self.a.is_infinite() && self.b.is_integer()) || (self.b.is_infinite() && self.a.is_integer())
    }

    pub fn has_endpoint(&self, x: &Rational) -> bool {
        self.a == *x || self.b == *x
    }

    /// The endpoint shared with `other`, if any.
    pub fn shared_vertex(&self, other: &FareyEdge) -> Option<Rational> {
        if other.has_endpoint(&self.a) {
            Some(self.a.clone())
        } else if other.has_endpoint(&self.b) {
            Some(self.b.clone())
        } else {
            None
        }
    }

    /// Endpoints in increasing order.
    pub fn ordered(&self) -> (&Rational, &Rational) {
        if self.a <= self.b {
            (&self.a, &self.b)
        } else {
            (&self.b, &self.a)
        }
    }
}

impl PartialEq for FareyEdge {
    fn eq(&self, other: &Self) -> bool {
        (self.a == other.a && self.b == other.b) || (self.a == other.b && self.b == other.a)
    }
}

impl Eq for FareyEdge {}

impl fmt::Display for FareyEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -- {}", self.a, self.b)
    }
}

/// Farey addition `p/q ⊕ r/s = (p+r)/(q+s)`.
pub fn farey_mediant(a: &Rational, b: &Rational) -> Result<Rational, Error> {
    if a == b {
        return Err(Error::Domain(format!("mediant of {a} with itself")));
    }
    Rational::new(&a.num + &b.num, &a.den + &b.den)
}

/// Farey subtraction `p/q ⊖ r/s = (p−r)/(q−s)`.
pub fn farey_difference(a: &Rational, b: &Rational) -> Result<Rational, Error> {
    if a == b {
        return Err(Error::Domain(format!("difference of {a} with itself")));
    }
    Rational::new(&a.num - &b.num, &a.den - &b.den)
}

fn det(a: &Rational, b: &Rational) -> BigInt {
    &a.num * &b.den - &a.den * &b.num
}

/// `|p·s − q·r| = 1`.
pub fn is_farey_neighbor(a: &Rational, b: &Rational) -> bool {
    det(a, b).abs().is_one()
}

/// Farey neighbours with exactly one denominator divisible by `n`.
///
/// For `n = 1` every Farey edge qualifies.
pub fn is_gamma0_neighbor(a: &Rational, b: &Rational, n: u64) -> bool {
    assert!(n >= 1, "modulus must be positive");
    if !is_farey_neighbor(a, b) {
        return false;
    }
    if n == 1 {
        return true;
    }
    let n = BigInt::from(n);
    let da = a.den.is_multiple_of(&n);
    let db = b.den.is_multiple_of(&n);
    da != db
}

/// Neighbours in both `F` and `(1/n)F`: `a, b` and `n·a, n·b` are Farey neighbours.
pub fn is_dual_neighbor(a: &Rational, b: &Rational, n: u64) -> bool {
    assert!(n >= 1, "modulus must be positive");
    let n = BigInt::from(n);
    is_farey_neighbor(a, b) && is_farey_neighbor(&a.scale(&n), &b.scale(&n))
}
