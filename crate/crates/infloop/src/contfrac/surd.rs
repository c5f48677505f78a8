use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::farey_core::Rational;

/// A quadratic irrational `(p + √d)/q` with `q | d − p²`.
#[derive(Clone, Debug)]
pub struct QuadSurd {
    p: BigInt,
    d: BigInt,
    q: BigInt,
}

pub(crate) fn is_square(d: &BigInt) -> bool {
    if d.is_negative() {
        return false;
    }
    let s = d.sqrt();
    &s * &s == *d
}

impl QuadSurd {
    /// `(p + √d)/q`; rescales the triple when `q ∤ d − p²`.
    pub fn new(p: impl Into<BigInt>, d: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self, Error> {
        let (p, d, q) = (p.into(), d.into(), q.into());
        if q.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        if !d.is_positive() || is_square(&d) {
            return Err(Error::Domain(format!("{d} is not a positive non-square")));
        }
        Ok(Self::normalized(p, d, q))
    }

    /// `(a + b√d)/c` for `b ≠ 0`.
    pub fn from_linear(a: BigInt, b: BigInt, d: BigInt, c: BigInt) -> Result<Self, Error> {
        if b.is_zero() {
            return Err(Error::Domain("rational value".into()));
        }
        let (a, b, c) = if b.is_negative() { (-a, -b, -c) } else { (a, b, c) };
        Self::new(a, &b * &b * d, c)
    }

    pub fn sqrt(d: impl Into<BigInt>) -> Result<Self, Error> {
        Self::new(0, d, 1)
    }

    fn normalized(p: BigInt, d: BigInt, q: BigInt) -> Self {
        let s = if (&d - &p * &p).is_multiple_of(&q) {
            QuadSurd { p, d, q }
        } else {
            let aq = q.abs();
            QuadSurd { p: &p * &aq, d: &d * &q * &q, q: &q * &aq }
        };
        s.reduced()
    }

    fn reduced(self) -> Self {
        let h = self.p.gcd(&self.q).gcd(&self.d);
        if h.is_one() || h.is_zero() {
            return self;
        }
        let hh = &h * &h;
        if !self.d.is_multiple_of(&hh) {
            return self;
        }
        let (p, d, q) = (&self.p / &h, &self.d / &hh, &self.q / &h);
        if (&d - &p * &p).is_multiple_of(&q) {
            QuadSurd { p, d, q }
        } else {
            self
        }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn floor(&self) -> BigInt {
        let t = &self.p + self.d.sqrt();
        if self.q.is_positive() {
            t.div_floor(&self.q)
        } else {
            -t.div_floor(&-&self.q) - 1
        }
    }

    /// Exact comparison against a rational (∞ allowed).
    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        if r.is_infinite() {
            return Ordering::Less;
        }
        let (a, b) = (r.num(), r.den());
        let lin = b * &self.p - a * &self.q;
        let sign = if !lin.is_negative() || b * b * &self.d > &lin * &lin {
            Ordering::Greater
        } else {
            Ordering::Less
        };
        if self.q.is_positive() {
            sign
        } else {
            sign.reverse()
        }
    }

    pub fn is_positive(&self) -> bool {
        self.cmp_rational(&Rational::zero()) == Ordering::Greater
    }

    /// `n · self` for `n ≠ 0`.
    pub fn mul_int(&self, n: &BigInt) -> QuadSurd {
        assert!(!n.is_zero());
        let g = n.gcd(&self.q);
        let m = n / &g;
        let s = QuadSurd { p: &self.p * &m * n.signum(), d: &self.d * &m * &m, q: &self.q / &g * n.signum() };
        debug_assert!((&s.d - &s.p * &s.p).is_multiple_of(&s.q));
        s.reduced()
    }

    pub fn add_int(&self, k: &BigInt) -> QuadSurd {
        QuadSurd { p: &self.p + k * &self.q, d: self.d.clone(), q: self.q.clone() }
    }

    /// Image under `x ↦ (a·x + b)/(c·x + e)` with `a·e − b·c ≠ 0`.
    pub fn mobius(&self, a: &BigInt, b: &BigInt, c: &BigInt, e: &BigInt) -> QuadSurd {
        let det = a * e - b * c;
        assert!(!det.is_zero());
        let (u, w, dd) = (&self.p, &self.q, &self.d);
        let x = a * u + b * w;
        let y = c * u + e * w;
        let num = &x * &y - a * c * dd;
        let den = &y * &y - c * c * dd;
        QuadSurd::from_linear(num, w * det, dd.clone(), den).expect("irrational image")
    }

    /// One step of the continued fraction algorithm: `self = a + 1/next`.
    pub fn step(&self) -> (BigInt, QuadSurd) {
        let a = self.floor();
        let p = &a * &self.q - &self.p;
        let q = (&self.d - &p * &p) / &self.q;
        (a, QuadSurd { p, d: self.d.clone(), q })
    }

    /// The raw `(p, q)` pair, meaningful for states sharing one `d`.
    pub(crate) fn state(&self) -> (BigInt, BigInt) {
        (self.p.clone(), self.q.clone())
    }
}

impl PartialEq for QuadSurd {
    fn eq(&self, o: &Self) -> bool {
        self.q.signum() == o.q.signum()
            && &self.p * &o.q == &o.p * &self.q
            && &self.d * &o.q * &o.q == &o.d * &self.q * &self.q
    }
}

impl Eq for QuadSurd {}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}+sqrt({}))/{}", self.p, self.d, self.q)
    }
}

impl FromStr for QuadSurd {
    type Err = Error;

    /// Accepts `(P+sqrt(D))/Q`, `(P+sqrt(D))`, `sqrt(D)/Q` and `sqrt(D)`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("not a surd: {s:?}"));
        let (numer, q) = match t.rsplit_once('/') {
            Some((l, r)) => (l, r.parse::<BigInt>().map_err(|_| bad())?),
            None => (t.as_str(), BigInt::one()),
        };
        let numer = match numer.strip_prefix('(') {
            Some(x) => x.strip_suffix(')').ok_or_else(bad)?,
            None => numer,
        };
        let i = numer.find("sqrt(").ok_or_else(bad)?;
        let body = numer[i + 5..].strip_suffix(')').ok_or_else(bad)?;
        let d: BigInt = body.parse().map_err(|_| bad())?;
        let p: BigInt = match &numer[..i] {
            "" => BigInt::zero(),
            head => head.strip_suffix('+').ok_or_else(bad)?.parse().map_err(|_| bad())?,
        };
        QuadSurd::new(p, d, q)
    }
}
