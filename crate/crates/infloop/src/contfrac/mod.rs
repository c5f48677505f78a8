//! Continued fraction expansions over exact values.
//!
//! An expansion `[a0; a1, a2, ...]` is finite, finite with the rational
//! ∞-tail convention, or eventually periodic. Convergents use the seeds
//! `p_{-1} = 1, q_{-1} = 0, p_0 = a0, q_0 = 1`.

pub mod surd;
mod text;

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::farey_core::Rational;
pub use surd::QuadSurd;

/// What follows the explicit partial quotients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tail {
    /// A plain finite expansion.
    None,
    /// A finite expansion whose next partial quotient is ∞.
    Infinity,
    /// The listed block repeats forever.
    Periodic(Vec<BigInt>),
}

/// `[a0; body..., tail]` with all entries after `a0` positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CFExpansion {
    a0: BigInt,
    body: Vec<BigInt>,
    tail: Tail,
}

/// An exact positive real handled by the crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Rational(Rational),
    Surd(QuadSurd),
}

impl Value {
    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        match self {
            Value::Rational(x) => x.cmp(r),
            Value::Surd(s) => s.cmp_rational(r),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.cmp_rational(&Rational::zero()) == Ordering::Greater
    }

    pub fn expansion(&self) -> Result<CFExpansion, Error> {
        match self {
            Value::Rational(r) => Ok(cf_from_rational(r)?.0),
            Value::Surd(s) => cf_of_surd(s),
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Rational(r) => r.fmt(f),
            Value::Surd(s) => s.fmt(f),
        }
    }
}

impl std::str::FromStr for Value {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s.contains("sqrt") {
            Ok(Value::Surd(s.parse()?))
        } else {
            Ok(Value::Rational(s.parse()?))
        }
    }
}

/// `B(α)`: a natural number or ∞.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Height {
    Finite(BigInt),
    Infinite,
}

impl Height {
    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            Height::Finite(b) => Some(b),
            Height::Infinite => None,
        }
    }

    /// `1/B`, with `1/∞ = 0`.
    pub fn recip(&self) -> Rational {
        match self {
            Height::Finite(b) if b.is_zero() => Rational::infinity(),
            Height::Finite(b) => Rational::new(BigInt::one(), b.clone()).unwrap(),
            Height::Infinite => Rational::zero(),
        }
    }
}

impl std::fmt::Display for Height {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Height::Finite(b) => b.fmt(f),
            Height::Infinite => f.write_str("oo"),
        }
    }
}

fn check_positive(xs: &[BigInt]) -> Result<(), Error> {
    match xs.iter().find(|a| !a.is_positive()) {
        Some(a) => Err(Error::Domain(format!("partial quotient {a} is not positive"))),
        None => Ok(()),
    }
}

fn minimal_period(period: &[BigInt]) -> usize {
    let r = period.len();
    (1..=r)
        .find(|&d| r.is_multiple_of(d) && (d..r).all(|i| period[i] == period[i - d]))
        .unwrap_or(r)
}

impl CFExpansion {
    pub fn finite(a0: impl Into<BigInt>, body: Vec<BigInt>) -> Result<Self, Error> {
        Self::build(a0.into(), body, Tail::None)
    }

    pub fn with_infinity_tail(a0: impl Into<BigInt>, body: Vec<BigInt>) -> Result<Self, Error> {
        Self::build(a0.into(), body, Tail::Infinity)
    }

    /// Eventually periodic expansion, stored with minimal preperiod and period.
    pub fn periodic(a0: impl Into<BigInt>, body: Vec<BigInt>, period: Vec<BigInt>) -> Result<Self, Error> {
        if period.is_empty() {
            return Err(Error::Domain("empty period".into()));
        }
        Self::build(a0.into(), body, Tail::Periodic(period))
    }

    /// Convenience constructor from machine integers.
    pub fn from_parts(a0: i64, body: &[i64], tail: Option<&[i64]>, infinity: bool) -> Result<Self, Error> {
        let big = |xs: &[i64]| xs.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        match tail {
            Some(p) => Self::periodic(a0, big(body), big(p)),
            None if infinity => Self::with_infinity_tail(a0, big(body)),
            None => Self::finite(a0, big(body)),
        }
    }

    fn build(a0: BigInt, mut body: Vec<BigInt>, tail: Tail) -> Result<Self, Error> {
        if a0.is_negative() {
            return Err(Error::Domain(format!("a0 = {a0} is negative")));
        }
        check_positive(&body)?;
        let tail = match tail {
            Tail::Periodic(mut period) => {
                check_positive(&period)?;
                period.truncate(minimal_period(&period));
                while body.last().is_some() && body.last() == period.last() {
                    body.pop();
                    period.rotate_right(1);
                }
                Tail::Periodic(period)
            }
            t => t,
        };
        Ok(CFExpansion { a0, body, tail })
    }

    pub fn a0(&self) -> &BigInt {
        &self.a0
    }

    pub fn body(&self) -> &[BigInt] {
        &self.body
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn period(&self) -> Option<&[BigInt]> {
        match &self.tail {
            Tail::Periodic(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.tail, Tail::Periodic(_))
    }

    pub fn is_finite(&self) -> bool {
        !self.is_periodic()
    }

    pub fn has_infinity_tail(&self) -> bool {
        self.tail == Tail::Infinity
    }

    /// Index `M` of the last partial quotient of a finite expansion.
    pub fn last_index(&self) -> Option<usize> {
        if self.is_periodic() {
            None
        } else {
            Some(self.body.len())
        }
    }

    /// The partial quotient `a_k`, unrolling any period.
    pub fn quotient(&self, k: usize) -> Option<BigInt> {
        if k == 0 {
            return Some(self.a0.clone());
        }
        if k <= self.body.len() {
            return Some(self.body[k - 1].clone());
        }
        match &self.tail {
            Tail::Periodic(p) => Some(p[(k - 1 - self.body.len()) % p.len()].clone()),
            _ => None,
        }
    }

    /// All partial quotients `a0, a1, ...` (endless for periodic input).
    pub fn quotients(&self) -> impl Iterator<Item = BigInt> + '_ {
        (0..).map_while(move |k| self.quotient(k))
    }

    /// `[a0; ..., a_d]` as a plain finite expansion.
    pub fn prefix(&self, d: usize) -> CFExpansion {
        let body: Vec<BigInt> = (1..=d).map_while(|k| self.quotient(k)).collect();
        CFExpansion { a0: self.a0.clone(), body, tail: Tail::None }
    }

    /// The same quotients with the ∞-tail flag switched on or off.
    pub fn with_tail_flag(&self, infinity: bool) -> CFExpansion {
        assert!(self.is_finite(), "flag applies to finite expansions");
        let tail = if infinity { Tail::Infinity } else { Tail::None };
        CFExpansion { tail, ..self.clone() }
    }

    /// The other expansion of the same rational: `[..., a_m]` ↔ `[..., a_m − 1, 1]`.
    pub fn twin(&self) -> Option<CFExpansion> {
        if self.is_periodic() {
            return None;
        }
        let mut e = self.clone();
        if e.body.last().is_some_and(|a| a.is_one()) {
            e.body.pop();
            match e.body.last_mut() {
                Some(a) => *a += 1,
                None => e.a0 += 1,
            }
            return Some(e);
        }
        match e.body.last_mut() {
            Some(a) => *a -= 1,
            None if e.a0.is_positive() => e.a0 -= 1,
            None => return None,
        }
        e.body.push(BigInt::one());
        Some(e)
    }

    /// The form not ending in 1, for finite expansions of length ≥ 2.
    pub fn canonical(&self) -> CFExpansion {
        if self.is_finite() && self.body.last().is_some_and(|a| a.is_one()) {
            self.twin().unwrap()
        } else {
            self.clone()
        }
    }

    /// Exact value: a rational for finite input, a surd for periodic input.
    pub fn value(&self) -> Value {
        match &self.tail {
            Tail::Periodic(period) => Value::Surd(self.surd_value(period)),
            _ => Value::Rational(self.convergent(self.body.len() as i64).unwrap()),
        }
    }

    fn surd_value(&self, period: &[BigInt]) -> QuadSurd {
        let (pp, qq, p1, q1) = last_two(period[0].clone(), &period[1..]);
        let y = QuadSurd::from_linear(&pp - &q1, BigInt::one(), (&pp - &q1).pow(2) + 4 * &qq * &p1, 2 * &qq)
            .expect("periodic part is irrational");
        let (ps, qs, ps1, qs1) = last_two(self.a0.clone(), &self.body);
        y.mobius(&ps, &ps1, &qs, &qs1)
    }

    /// `B(α) = sup_{k ≥ 1} a_k`; ∞ under the ∞-tail convention.
    pub fn height(&self) -> Height {
        let body_max = self.body.iter().max().cloned().unwrap_or_else(BigInt::zero);
        match &self.tail {
            Tail::None => Height::Finite(body_max),
            Tail::Infinity => Height::Infinite,
            Tail::Periodic(p) => Height::Finite(body_max.max(p.iter().max().unwrap().clone())),
        }
    }

    /// `p_k/q_k` for `k >= -1`.
    pub fn convergent(&self, k: i64) -> Result<Rational, Error> {
        if k < -1 {
            return Err(Error::Range(format!("convergent index {k} < -1")));
        }
        if k == -1 {
            return Ok(Rational::infinity());
        }
        let k = k as usize;
        if self.last_index().is_some_and(|m| k > m) {
            return Err(Error::Range(format!("convergent {k} beyond expansion of length {}", self.body.len() + 1)));
        }
        let c = self.convergents().nth(k).unwrap();
        Ok(c.value())
    }

    /// Convergents `k = 0, 1, ...` with their predecessors.
    pub fn convergents(&self) -> Convergents<impl Iterator<Item = BigInt> + '_> {
        Convergents::new(self.quotients())
    }

    /// `(m·p_k + p_{k−1}) / (m·q_k + q_{k−1})` for `0 <= m <= a_{k+1}`.
    ///
    /// With these seeds `p_{k,m}·q_k − p_k·q_{k,m} = (−1)^k`. On the ∞-tail fan
    /// `k = M` every `m >= 0` is allowed.
    pub fn semiconvergent(&self, k: usize, m: &BigInt) -> Result<Rational, Error> {
        if m.is_negative() {
            return Err(Error::Range(format!("m = {m} is negative")));
        }
        match self.quotient(k + 1) {
            Some(a) if *m > a => return Err(Error::Range(format!("m = {m} exceeds a_{} = {a}", k + 1))),
            Some(_) => {}
            None if self.has_infinity_tail() && k == self.body.len() => {}
            None => return Err(Error::Range(format!("no fan at k = {k}"))),
        }
        let c = self.convergents().nth(k).unwrap();
        Ok(Rational::from_coprime(m * &c.p + &c.p_prev, m * &c.q + &c.q_prev))
    }
}

fn last_two(a0: BigInt, rest: &[BigInt]) -> (BigInt, BigInt, BigInt, BigInt) {
    let mut it = Convergents::new(std::iter::once(a0).chain(rest.iter().cloned()));
    let c = it.by_ref().last().unwrap();
    (c.p, c.q, c.p_prev, c.q_prev)
}

/// One step of the convergent recurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub k: usize,
    pub a: BigInt,
    pub p: BigInt,
    pub q: BigInt,
    pub p_prev: BigInt,
    pub q_prev: BigInt,
}

impl Convergent {
    pub fn value(&self) -> Rational {
        Rational::from_coprime(self.p.clone(), self.q.clone())
    }
}

/// Iterator over convergents driven by a stream of partial quotients.
pub struct Convergents<I> {
    quotients: I,
    k: usize,
    p: (BigInt, BigInt),
    q: (BigInt, BigInt),
}

impl<I: Iterator<Item = BigInt>> Convergents<I> {
    pub fn new(quotients: I) -> Self {
        Convergents { quotients, k: 0, p: (BigInt::zero(), BigInt::one()), q: (BigInt::one(), BigInt::zero()) }
    }
}

impl<I: Iterator<Item = BigInt>> Iterator for Convergents<I> {
    type Item = Convergent;

    fn next(&mut self) -> Option<Convergent> {
        let a = self.quotients.next()?;
        let p = &a * &self.p.1 + &self.p.0;
        let q = &a * &self.q.1 + &self.q.0;
        let c = Convergent { k: self.k, a, p: p.clone(), q: q.clone(), p_prev: self.p.1.clone(), q_prev: self.q.1.clone() };
        self.p = (std::mem::take(&mut self.p.1), p);
        self.q = (std::mem::take(&mut self.q.1), q);
        self.k += 1;
        Some(c)
    }
}

/// Both expansions of a nonnegative rational, each with the ∞-tail.
///
/// The first is canonical (not ending in 1); zero has a single expansion,
/// returned twice.
pub fn cf_from_rational(x: &Rational) -> Result<(CFExpansion, CFExpansion), Error> {
    if x.is_infinite() {
        return Err(Error::Domain("∞ has no continued fraction".into()));
    }
    if x.num().is_negative() {
        return Err(Error::Domain(format!("{x} is negative")));
    }
    let (mut a, mut b) = (x.num().clone(), x.den().clone());
    let mut qs = Vec::new();
    while !b.is_zero() {
        let (quot, rem) = a.div_rem(&b);
        qs.push(quot);
        a = std::mem::replace(&mut b, rem);
    }
    let a0 = qs.remove(0);
    let e = CFExpansion::with_infinity_tail(a0, qs)?;
    let t = e.twin().unwrap_or_else(|| e.clone());
    Ok((e, t))
}

/// `[a0; ..., a_d]` as an exact rational; depth `-1` gives `1/0`.
pub fn cf_eval(e: &CFExpansion, d: i64) -> Result<Rational, Error> {
    e.convergent(d)
}

/// Eventually periodic expansion of a positive quadratic irrational.
pub fn cf_of_surd(s: &QuadSurd) -> Result<CFExpansion, Error> {
    if !s.is_positive() {
        return Err(Error::Domain(format!("{s} is not positive")));
    }
    let (a0, mut x) = s.step();
    let mut seen = HashMap::new();
    let mut qs = Vec::new();
    loop {
        if let Some(&i) = seen.get(&x.state()) {
            let period = qs.split_off(i);
            return CFExpansion::periodic(a0, qs, period);
        }
        seen.insert(x.state(), qs.len());
        let (a, next) = x.step();
        qs.push(a);
        x = next;
    }
}

/// The expansion of `n·α`.
pub fn multiply_cf(e: &CFExpansion, n: &BigInt) -> Result<CFExpansion, Error> {
    if !n.is_positive() {
        return Err(Error::Domain(format!("multiplier {n} is not positive")));
    }
    match e.value() {
        Value::Rational(r) => {
            let c = cf_from_rational(&r.scale(n))?.0;
            Ok(if e.has_infinity_tail() { c } else { c.with_tail_flag(false) })
        }
        Value::Surd(s) => cf_of_surd(&s.mul_int(n)),
    }
}

/// The expansion of `α + k`.
pub fn shift_cf(e: &CFExpansion, k: &BigInt) -> Result<CFExpansion, Error> {
    let a0 = &e.a0 + k;
    if a0.is_negative() {
        return Err(Error::Domain(format!("shift by {k} makes a0 negative")));
    }
    Ok(CFExpansion { a0, ..e.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cf(s: &str) -> CFExpansion {
        s.parse().unwrap()
    }

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn rational_twins() {
        assert_eq!(cf_from_rational(&r("3/7")).unwrap(), (cf("[0; 2, 3, oo]"), cf("[0; 2, 2, 1, oo]")));
        assert_eq!(cf_from_rational(&r("2")).unwrap(), (cf("[2; oo]"), cf("[1; 1, oo]")));
        assert_eq!(cf_from_rational(&r("1/2")).unwrap(), (cf("[0; 2, oo]"), cf("[0; 1, 1, oo]")));
        assert!(cf_from_rational(&Rational::infinity()).is_err());
    }

    #[test]
    fn evaluation() {
        assert_eq!(cf_eval(&cf("[0; 2, 3]"), 2).unwrap(), r("3/7"));
        assert_eq!(cf_eval(&cf("[1; 1, 1, 1, 1]"), 4).unwrap(), r("8/5"));
        assert_eq!(cf_eval(&cf("[0; 2, 3]"), -1).unwrap(), Rational::infinity());
        assert!(cf_eval(&cf("[0; 2, 3]"), -2).is_err());
        assert!(cf_eval(&cf("[0; 2, 3]"), 3).is_err());
    }

    #[test]
    fn golden_convergents() {
        let e = cf("[0; (1)]");
        let got: Vec<Rational> = (-1..=5).map(|k| e.convergent(k).unwrap()).collect();
        let want: Vec<Rational> = ["oo", "0/1", "1/1", "1/2", "2/3", "3/5", "5/8"].iter().map(|s| r(s)).collect();
        assert_eq!(got, want);
        assert_eq!(cf("[2; (4)]").convergent(1).unwrap(), r("9/4"));
    }

    #[test]
    fn semiconvergents() {
        let e = cf("[0; 2, 3]");
        assert_eq!(e.semiconvergent(1, &big(2)).unwrap(), r("2/5"));
        assert_eq!(e.semiconvergent(1, &big(0)).unwrap(), e.convergent(0).unwrap());
        assert_eq!(e.semiconvergent(1, &big(3)).unwrap(), e.convergent(2).unwrap());
        assert!(e.semiconvergent(1, &big(4)).is_err());
        assert!(e.semiconvergent(2, &big(1)).is_err());
        let t = cf("[0; 2, oo]");
        assert_eq!(t.semiconvergent(1, &big(2)).unwrap(), r("2/5"));
    }

    #[test]
    fn heights() {
        assert_eq!(cf("[0; 1, 2, 3]").height(), Height::Finite(big(3)));
        assert_eq!(cf("[0; 2, oo]").height(), Height::Infinite);
        assert_eq!(cf("[2; (4)]").height(), Height::Finite(big(4)));
    }

    #[test]
    fn surd_expansions() {
        assert_eq!(cf_of_surd(&QuadSurd::sqrt(2).unwrap()).unwrap(), cf("[1; (2)]"));
        assert_eq!(cf_of_surd(&QuadSurd::sqrt(8).unwrap()).unwrap(), cf("[2; (1, 4)]"));
        assert_eq!(cf_of_surd(&QuadSurd::new(1, 5, 2).unwrap()).unwrap(), cf("[1; (1)]"));
        assert_eq!(cf_of_surd(&QuadSurd::sqrt(5).unwrap()).unwrap(), cf("[2; (4)]"));
        assert!(QuadSurd::sqrt(4).is_err());
    }

    #[test]
    fn periodic_values_round_trip() {
        for s in ["[1; (2)]", "[2; (1, 4)]", "[0; 3, 1, (2, 5, 1)]", "[4; (1, 1, 7)]"] {
            let e = cf(s);
            assert_eq!(e.value().expansion().unwrap(), e, "{s}");
        }
    }

    #[test]
    fn multiplication() {
        assert_eq!(multiply_cf(&cf("[0; 2]"), &big(2)).unwrap(), cf("[1]"));
        assert_eq!(multiply_cf(&cf("[0; 2, 3]"), &big(5)).unwrap(), cf("[2; 7]"));
        assert_eq!(multiply_cf(&cf("[0; (1)]"), &big(2)).unwrap(), cf("[1; (4)]"));
        assert_eq!(multiply_cf(&cf("[0; (1)]"), &big(4)).unwrap(), cf("[2; (2, 8)]"));
    }

    #[test]
    fn shifting() {
        assert_eq!(shift_cf(&cf("[0; 2, 3]"), &big(1)).unwrap(), cf("[1; 2, 3]"));
        assert_eq!(shift_cf(&cf("[2; (4)]"), &big(-2)).unwrap(), cf("[0; (4)]"));
        assert_eq!(shift_cf(&cf("[0; (1)]"), &big(0)).unwrap(), cf("[0; (1)]"));
        assert!(shift_cf(&cf("[0; (1)]"), &big(-1)).is_err());
    }

    #[test]
    fn canonical_periodic_storage() {
        assert_eq!(cf("[1; 2, (2)]"), cf("[1; (2)]"));
        assert_eq!(cf("[1; (2, 2)]"), cf("[1; (2)]"));
        assert_eq!(cf("[0; 1, 5, (3, 5)]"), cf("[0; 1, (5, 3)]"));
    }

    #[test]
    fn twins_convert_both_ways() {
        let e = cf("[0; 2, 3]");
        assert_eq!(e.twin().unwrap(), cf("[0; 2, 2, 1]"));
        assert_eq!(e.twin().unwrap().twin().unwrap(), e);
        assert_eq!(cf("[1]").twin().unwrap(), cf("[0; 1]"));
        assert_eq!(cf("[0]").twin(), None);
    }
}
