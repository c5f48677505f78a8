#![allow(dead_code)]

use infloop::contfrac::CFExpansion;
use infloop::farey_core::Rational;
use proptest::prelude::*;

pub fn cf(s: &str) -> CFExpansion {
    s.parse().unwrap()
}

pub fn r(s: &str) -> Rational {
    s.parse().unwrap()
}

pub fn finite_cf(max_len: usize, max_q: i64) -> impl Strategy<Value = CFExpansion> {
    (0..4i64, prop::collection::vec(1..=max_q, 0..=max_len))
        .prop_map(|(a0, body)| CFExpansion::from_parts(a0, &body, None, false).unwrap())
}

pub fn rational_cf(max_len: usize, max_q: i64) -> impl Strategy<Value = CFExpansion> {
    (0..4i64, prop::collection::vec(1..=max_q, 1..=max_len))
        .prop_map(|(a0, body)| CFExpansion::from_parts(a0, &body, None, true).unwrap())
}

pub fn periodic_cf(max_q: i64) -> impl Strategy<Value = CFExpansion> {
    (0..4i64, prop::collection::vec(1..=max_q, 0..=3), prop::collection::vec(1..=max_q, 1..=4))
        .prop_map(|(a0, body, period)| CFExpansion::from_parts(a0, &body, Some(&period), false).unwrap())
}

pub fn unit_rational(max_den: u64) -> impl Strategy<Value = Rational> {
    (2..=max_den).prop_flat_map(|q| (1..q).prop_map(move |p| Rational::new(p, q).unwrap()))
}

/// Farey neighbour pairs in `[0, 1]` with denominators at most `max_den`.
pub fn neighbour_pairs(max_den: u64) -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    let mut stack = vec![((0u64, 1u64), (1u64, 1u64))];
    while let Some((a, b)) = stack.pop() {
        out.push((Rational::new(a.0, a.1).unwrap(), Rational::new(b.0, b.1).unwrap()));
        let m = (a.0 + b.0, a.1 + b.1);
        if m.1 <= max_den {
            stack.push((a, m));
            stack.push((m, b));
        }
    }
    out
}
