//! Cutting sequences of rays from the base edge `I = (0, ∞)` into the Farey
//! tessellation, decided combinatorially with exact interval tests.
//!
//! A ray to `α` crosses the edges of consecutive fans. Each fan has a fixed
//! vertex, the convergent `p_k/q_k`, and its moving endpoints run through
//! the semi-convergents of index `k`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::contfrac::{CFExpansion, Tail, Value};
use crate::error::Error;
use crate::farey_core::{is_gamma0_neighbor, FareyEdge, Rational};
use crate::loops::{fan_hit, is_infinite_loop, LoopVerdict, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    L,
    R,
}

impl Letter {
    pub fn flip(self) -> Letter {
        match self {
            Letter::L => Letter::R,
            Letter::R => Letter::L,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Letter::L => "L",
            Letter::R => "R",
        })
    }
}

/// A run-length word `runs · cycle^∞`; letters alternate throughout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuttingWord {
    runs: Vec<(Letter, BigInt)>,
    cycle: Vec<(Letter, BigInt)>,
}

fn alternates(xs: &[(Letter, BigInt)]) -> bool {
    xs.windows(2).all(|w| w[0].0 != w[1].0)
}

impl CuttingWord {
    pub fn new(runs: Vec<(Letter, BigInt)>, cycle: Vec<(Letter, BigInt)>) -> Result<Self, Error> {
        let bad = |why: &str| Err(Error::Domain(format!("malformed word: {why}")));
        if runs.iter().chain(&cycle).any(|(_, c)| !c.is_positive()) {
            return bad("run length must be positive");
        }
        if !alternates(&runs) || !alternates(&cycle) {
            return bad("adjacent runs share a letter");
        }
        if let (Some(a), Some(b)) = (runs.last(), cycle.first()) {
            if a.0 == b.0 {
                return bad("prefix and cycle share a letter");
            }
        }
        if let (Some(a), Some(b)) = (cycle.last(), cycle.first()) {
            if cycle.len() == 1 || a.0 == b.0 {
                return bad("cycle does not alternate when repeated");
            }
        }
        Ok(CuttingWord { runs, cycle })
    }

    pub fn finite(runs: Vec<(Letter, BigInt)>) -> Result<Self, Error> {
        Self::new(runs, vec![])
    }

    pub fn runs(&self) -> &[(Letter, BigInt)] {
        &self.runs
    }

    pub fn cycle(&self) -> &[(Letter, BigInt)] {
        &self.cycle
    }

    /// Runs as a flat list with the cycle unrolled `copies` times.
    pub fn unrolled(&self, copies: usize) -> Vec<(Letter, BigInt)> {
        let mut out = self.runs.clone();
        for _ in 0..copies {
            out.extend(self.cycle.iter().cloned());
        }
        out
    }
}

fn fmt_runs(xs: &[(Letter, BigInt)]) -> String {
    xs.iter().map(|(l, c)| format!("{l}^{c}")).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for CuttingWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_runs(&self.runs))?;
        if !self.cycle.is_empty() {
            if !self.runs.is_empty() {
                f.write_str(" ")?;
            }
            write!(f, "({})", fmt_runs(&self.cycle))?;
        }
        Ok(())
    }
}

/// `η(L^{n0} R^{n1} L^{n2} ...) = [n0; n1, n2, ...]`.
///
/// A rational's word ends in its terminal `L`, counted in the final run.
pub fn eta(w: &CuttingWord) -> Result<CFExpansion, Error> {
    let mut runs = if w.runs.is_empty() { w.unrolled(1) } else { w.runs.clone() };
    let a0 = match runs.first() {
        Some((Letter::L, c)) => {
            let c = c.clone();
            runs.remove(0);
            c
        }
        _ => BigInt::zero(),
    };
    let body: Vec<BigInt> = runs.into_iter().map(|(_, c)| c).collect();
    if w.cycle.is_empty() {
        CFExpansion::finite(a0, body)
    } else {
        CFExpansion::periodic(a0, body, w.cycle.iter().map(|(_, c)| c.clone()).collect())
    }
}

fn letter_at(k: usize) -> Letter {
    if k.is_multiple_of(2) {
        Letter::L
    } else {
        Letter::R
    }
}

/// The word of `e`; a finite expansion is first brought to the form ending in an `L` run.
pub fn eta_inverse(e: &CFExpansion) -> CuttingWord {
    let e = match e.last_index() {
        Some(m) if m % 2 == 1 => e.twin().unwrap(),
        _ => e.clone(),
    };
    let head = std::iter::once(e.a0().clone()).chain(e.body().iter().cloned());
    let runs: Vec<(Letter, BigInt)> =
        head.enumerate().filter(|(_, c)| c.is_positive()).map(|(k, c)| (letter_at(k), c)).collect();
    let cycle = match e.period() {
        Some(p) => {
            let start = e.body().len() + 1;
            let reps = if p.len() % 2 == 1 { 2 } else { 1 };
            (0..reps * p.len()).map(|i| (letter_at(start + i), p[i % p.len()].clone())).collect()
        }
        None => vec![],
    };
    CuttingWord { runs, cycle }
}

/// Whether the ray from `I` to `alpha` crosses `edge`.
///
/// Finite `u < v`: `u < α < v`. Edge `(u, ∞)`: `α > u`. The base edge and
/// edges ending at `α` are not crossed.
pub fn crosses_edge(alpha: &Value, edge: &FareyEdge) -> Result<bool, Error> {
    let (lo, hi) = edge.ordered();
    if lo.num().is_negative() {
        return Err(Error::Domain(format!("edge {edge} has a negative endpoint")));
    }
    if edge.is_base() {
        return Ok(false);
    }
    Ok(alpha.cmp_rational(lo) == Ordering::Greater && alpha.cmp_rational(hi) == Ordering::Less)
}

/// An edge together with its fan index `k` and position `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanEdge {
    pub edge: FareyEdge,
    pub k: i64,
    pub m: BigInt,
    pub fixed: Rational,
    pub moving: Rational,
}

/// Edges of fans `k = -1, 0, 1, ...` after `I`, at most `limit` of them.
///
/// Plain finite input stops before the edge ending at `α`. With the ∞-tail the
/// edge into `α` and at most `limit` edges of the unbounded fan around `α` follow.
fn fan_edges(e: &CFExpansion, limit: usize) -> (Vec<FanEdge>, bool) {
    let mut out = Vec::new();
    let last = e.last_index().map(|m| m as i64);
    let (mut prev, mut cur) = ((BigInt::zero(), BigInt::one()), (BigInt::one(), BigInt::zero()));
    let mut k: i64 = -1;
    loop {
        let bound = e.quotient((k + 1) as usize);
        let unbounded = bound.is_none() && last == Some(k) && e.has_infinity_tail();
        if bound.is_none() && !unbounded {
            return (out, true);
        }
        let terminal = last == Some(k + 1) && *e.tail() == Tail::None;
        let mut m = BigInt::one();
        while bound.as_ref().is_none_or(|b| m <= *b) {
            if terminal && Some(&m) == bound.as_ref() {
                return (out, true);
            }
            if out.len() >= limit {
                return (out, false);
            }
            let fixed = Rational::from_coprime(cur.0.clone(), cur.1.clone());
            let moving = Rational::from_coprime(&m * &cur.0 + &prev.0, &m * &cur.1 + &prev.1);
            let edge = FareyEdge { a: fixed.clone(), b: moving.clone() };
            out.push(FanEdge { edge, k, m: m.clone(), fixed, moving });
            m += 1;
        }
        let a = bound.unwrap();
        let next = (&a * &cur.0 + &prev.0, &a * &cur.1 + &prev.1);
        prev = std::mem::replace(&mut cur, next);
        k += 1;
    }
}

/// The ordered edges met by the ray to `α`, opening with the base edge `I`.
///
/// Every edge after `I` satisfies [`crosses_edge`]; at most `depth` edges are listed.
pub fn crossed_edges(e: &CFExpansion, depth: usize) -> Vec<FareyEdge> {
    let mut out = vec![FareyEdge::base()];
    if depth > 1 {
        out.extend(fan_edges(e, depth - 1).0.into_iter().map(|f| f.edge));
    }
    out.truncate(depth.max(1));
    out
}

/// Fixed vertex and size of each fan, starting with the fan at ∞ (size `a0`).
pub fn fans_of_edges(edges: &[FareyEdge]) -> Vec<(Rational, usize)> {
    let mut fans = vec![(Rational::infinity(), 0usize)];
    for w in edges.windows(2) {
        let s = w[0].shared_vertex(&w[1]).expect("consecutive edges share a vertex");
        match fans.last_mut() {
            Some((v, c)) if *v == s => *c += 1,
            _ => fans.push((s, 1)),
        }
    }
    fans
}

/// The cutting word read off the fan sizes; `terminal` appends the final `L` of a rational.
pub fn word_from_edges(edges: &[FareyEdge], terminal: bool) -> CuttingWord {
    let mut runs: Vec<(Letter, BigInt)> = Vec::new();
    for (i, (_, size)) in fans_of_edges(edges).into_iter().enumerate() {
        if size > 0 {
            runs.push((letter_at(i), BigInt::from(size)));
        }
    }
    if terminal {
        match runs.last_mut() {
            Some((Letter::L, c)) => *c += 1,
            _ => runs.push((Letter::L, BigInt::one())),
        }
    }
    CuttingWord { runs, cycle: vec![] }
}

fn scan_gamma0(edges: &[FanEdge], n: u64) -> Option<Witness> {
    let hit = edges.iter().find(|f| f.k >= 0 && is_gamma0_neighbor(&f.edge.a, &f.edge.b, n))?;
    let divisible = |r: &Rational| (r.den() % BigInt::from(n)).is_zero();
    debug_assert!(divisible(&hit.moving));
    let _ = divisible(&hit.fixed);
    Some(Witness { k: hit.k as usize, m: hit.m.clone(), value: hit.moving.clone() })
}

/// Finite scan plus the unbounded fan around a rational `α`, solved as a congruence.
fn rational_side(e: &CFExpansion, n: u64, depth: usize) -> Result<Option<Witness>, usize> {
    let (edges, complete) = fan_edges(&e.with_tail_flag(false), depth);
    if let Some(w) = scan_gamma0(&edges, n) {
        return Ok(Some(w));
    }
    if !complete {
        return Err(edges.len());
    }
    let m_last = e.last_index().unwrap();
    let full = e.with_tail_flag(true);
    let into_alpha = full.semiconvergent(m_last.saturating_sub(1), &e.quotient(m_last).unwrap());
    let c = full.convergents().last().unwrap();
    if m_last > 0 && into_alpha.as_ref().is_ok_and(|a| (a.den() % BigInt::from(n)).is_zero()) {
        return Ok(Some(Witness { k: m_last - 1, m: e.quotient(m_last).unwrap(), value: c.value() }));
    }
    let md = |x: &BigInt| (x % BigInt::from(n)).try_into().unwrap_or(0u64);
    Ok(fan_hit(md(&c.q_prev), md(&c.q), n, 1, None).map(|m| {
        let value = Rational::from_coprime(&m * &c.p + &c.p_prev, &m * &c.q + &c.q_prev);
        Witness { k: m_last, m, value }
    }))
}

/// Geometric loop test: the ray avoids every edge of `Γ₀(n)·I` other than the `I + k`.
///
/// Rationals with the ∞-tail are decided over both sides of `α`; periodic input
/// is scanned to `depth` edges and closed by the residue-cycle argument.
pub fn loop_verdict_geometric(e: &CFExpansion, n: u64, depth: usize) -> Result<LoopVerdict, Error> {
    if n < 2 {
        return Err(Error::Domain(format!("modulus {n} < 2")));
    }
    match e.tail() {
        Tail::Infinity => {
            let twin = e.twin().unwrap_or_else(|| e.clone());
            for side in [e, &twin] {
                match rational_side(side, n, depth) {
                    Ok(Some(w)) => return Ok(LoopVerdict::NotLoop(w)),
                    Ok(None) => {}
                    Err(d) => return Ok(LoopVerdict::UnknownAtDepth(d)),
                }
            }
            Ok(LoopVerdict::IsLoop)
        }
        Tail::None => {
            let (edges, _) = fan_edges(e, depth);
            Ok(match scan_gamma0(&edges, n) {
                Some(w) => LoopVerdict::NotLoop(w),
                None => LoopVerdict::UnknownAtDepth(edges.len()),
            })
        }
        Tail::Periodic(_) => {
            let (edges, _) = fan_edges(e, depth);
            if let Some(w) = scan_gamma0(&edges, n) {
                return Ok(LoopVerdict::NotLoop(w));
            }
            Ok(match is_infinite_loop(e, n)? {
                LoopVerdict::IsLoop => LoopVerdict::IsLoop,
                _ => LoopVerdict::UnknownAtDepth(edges.len()),
            })
        }
    }
}
