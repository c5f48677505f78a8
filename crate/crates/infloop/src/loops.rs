//! Deciding whether `α` is an infinite loop mod `n`: no semi-convergent
//! denominator other than `q_{-1} = 0` is divisible by `n`.
//!
//! Rational input is decided over both expansions including their ∞-tails,
//! periodic input by cycle detection on denominator residues, and digit
//! streams up to a depth limit.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::contfrac::surd::QuadSurd;
use crate::contfrac::{cf_from_rational, CFExpansion, Tail, Value};
use crate::cutting_seq::Letter;
use crate::error::Error;
use crate::farey_core::Rational;

type Step = (usize, usize);

pub const DEFAULT_DEPTH_LIMIT: usize = 10_000;

/// A semi-convergent `(m·p_k + p_{k−1}) / (m·q_k + q_{k−1})` with denominator divisible by `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub k: usize,
    pub m: BigInt,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoopVerdict {
    IsLoop,
    NotLoop(Witness),
    UnknownAtDepth(usize),
}

impl LoopVerdict {
    pub fn is_loop(&self) -> bool {
        *self == LoopVerdict::IsLoop
    }

    pub fn is_not_loop(&self) -> bool {
        matches!(self, LoopVerdict::NotLoop(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            LoopVerdict::NotLoop(w) => Some(w),
            _ => None,
        }
    }
}

impl fmt::Display for LoopVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoopVerdict::IsLoop => f.write_str("LOOP"),
            LoopVerdict::NotLoop(w) => write!(f, "NOTLOOP k={} m={} q={}", w.k, w.m, w.value.den()),
            LoopVerdict::UnknownAtDepth(d) => write!(f, "UNKNOWN depth={d}"),
        }
    }
}

/// Pair of consecutive denominators reduced mod `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModState {
    pub u: u64,
    pub v: u64,
}

fn residue(x: &BigInt, n: u64) -> u64 {
    x.mod_floor(&BigInt::from(n)).to_u64().unwrap()
}

/// Smallest `m` with `m_min <= m <= bound` and `m·v + u ≡ 0 (mod n)`; `None` bound means unbounded.
pub(crate) fn fan_hit(u: u64, v: u64, n: u64, m_min: u64, bound: Option<&BigInt>) -> Option<BigInt> {
    let target = (n - u % n) % n;
    let g = v.gcd(&n);
    if !target.is_multiple_of(g) {
        return None;
    }
    let (nn, vv, tt) = (n / g, v / g, target / g);
    let m0 = if nn == 1 {
        0
    } else {
        let inv = (vv as i128).extended_gcd(&(nn as i128)).x.rem_euclid(nn as i128) as u128;
        ((tt as u128 * inv) % nn as u128) as u64
    };
    let m = if m0 >= m_min { m0 } else { m0 + (m_min - m0).div_ceil(nn) * nn };
    let m = BigInt::from(m);
    match bound {
        Some(b) if m > *b => None,
        _ => Some(m),
    }
}

fn check_modulus(n: u64) -> Result<(), Error> {
    if n < 2 {
        return Err(Error::Domain(format!("modulus {n} < 2")));
    }
    Ok(())
}

fn check_value(e: &CFExpansion) -> Result<(), Error> {
    if e.is_finite() && e.a0().is_zero() && e.body().is_empty() {
        return Err(Error::Domain("value 0 is excluded".into()));
    }
    Ok(())
}

/// Scan of a finite expansion; the ∞-tail fan is solved as a congruence.
fn finite_scan(e: &CFExpansion, n: u64) -> Option<Witness> {
    let last = e.last_index().unwrap();
    for c in e.convergents() {
        let bound = e.quotient(c.k + 1);
        if bound.is_none() && !(c.k == last && e.has_infinity_tail()) {
            return None;
        }
        let (u, v) = (residue(&c.q_prev, n), residue(&c.q, n));
        if let Some(m) = fan_hit(u, v, n, 1, bound.as_ref()) {
            let value = Rational::from_coprime(&m * &c.p + &c.p_prev, &m * &c.q + &c.q_prev);
            return Some(Witness { k: c.k, m, value });
        }
    }
    None
}

/// Exact tracker of `p_k, q_k` alongside the residues.
struct Walker {
    k: usize,
    p: (BigInt, BigInt),
    q: (BigInt, BigInt),
    n: u64,
}

impl Walker {
    fn new(a0: BigInt, n: u64) -> Self {
        Walker { k: 0, p: (BigInt::one(), a0), q: (BigInt::zero(), BigInt::one()), n }
    }

    fn state(&self) -> ModState {
        ModState { u: residue(&self.q.0, self.n), v: residue(&self.q.1, self.n) }
    }

    /// Checks the fan of `a_{k+1} = a`, then advances to `k + 1`.
    fn feed(&mut self, a: &BigInt) -> Option<Witness> {
        let s = self.state();
        if let Some(m) = fan_hit(s.u, s.v, self.n, 1, Some(a)) {
            let value = Rational::from_coprime(&m * &self.p.1 + &self.p.0, &m * &self.q.1 + &self.q.0);
            return Some(Witness { k: self.k, m, value });
        }
        let p = a * &self.p.1 + &self.p.0;
        let q = a * &self.q.1 + &self.q.0;
        self.p = (std::mem::take(&mut self.p.1), p);
        self.q = (std::mem::take(&mut self.q.1), q);
        self.k += 1;
        None
    }
}

/// Drives a walk whose auxiliary state determines the next partial quotient;
/// a repeated `(aux, residues)` key closes the scan with `IsLoop` (Brent's method).
fn decide_cyclic<S, F>(a0: BigInt, aux: S, mut next: F, n: u64, budget: Option<usize>) -> LoopVerdict
where
    S: Clone + PartialEq,
    F: FnMut(&S) -> (BigInt, S),
{
    let mut w = Walker::new(a0, n);
    let mut aux = aux;
    let mut tortoise = (aux.clone(), w.state());
    let (mut power, mut lam) = (1usize, 0usize);
    loop {
        if budget.is_some_and(|b| w.k >= b) {
            return LoopVerdict::UnknownAtDepth(w.k);
        }
        let (a, nxt) = next(&aux);
        if let Some(wit) = w.feed(&a) {
            return LoopVerdict::NotLoop(wit);
        }
        aux = nxt;
        let key = (aux.clone(), w.state());
        if key == tortoise {
            return LoopVerdict::IsLoop;
        }
        lam += 1;
        if lam == power {
            tortoise = key;
            power *= 2;
            lam = 0;
        }
    }
}

/// Definition (b) in each exactness regime.
///
/// Finite input without the ∞-tail is only a prefix, so a clean scan gives
/// `UnknownAtDepth`.
pub fn is_infinite_loop(e: &CFExpansion, n: u64) -> Result<LoopVerdict, Error> {
    check_modulus(n)?;
    check_value(e)?;
    match e.tail() {
        Tail::Infinity => {
            let twin = e.twin().unwrap_or_else(|| e.clone());
            Ok(match finite_scan(e, n).or_else(|| finite_scan(&twin, n)) {
                Some(w) => LoopVerdict::NotLoop(w),
                None => LoopVerdict::IsLoop,
            })
        }
        Tail::None => Ok(match finite_scan(e, n) {
            Some(w) => LoopVerdict::NotLoop(w),
            None => LoopVerdict::UnknownAtDepth(e.body().len() + 1),
        }),
        Tail::Periodic(period) => {
            let s = e.body().len();
            let r = period.len();
            let step = |&pos: &usize| {
                let a = e.quotient(pos).unwrap();
                let nxt = if pos < s { pos + 1 } else { s + 1 + (pos - s) % r };
                (a, nxt)
            };
            Ok(decide_cyclic(e.a0().clone(), 1usize, step, n, None))
        }
    }
}

/// Exact decision for a positive surd without materializing its period.
///
/// Returns `UnknownAtDepth` when `budget` partial quotients pass without a
/// witness or a closed cycle.
pub fn is_infinite_loop_surd(s: &QuadSurd, n: u64, budget: usize) -> Result<LoopVerdict, Error> {
    check_modulus(n)?;
    if !s.is_positive() {
        return Err(Error::Domain(format!("{s} is not positive")));
    }
    let (a0, x1) = s.step();
    let step = |x: &QuadSurd| x.step();
    Ok(decide_cyclic(a0, x1, step, n, Some(budget)))
}

/// Checks a digit stream up to `depth_limit` partial quotients after `a0`.
pub fn is_infinite_loop_stream<I>(a0: BigInt, quotients: I, n: u64, depth_limit: usize) -> Result<LoopVerdict, Error>
where
    I: IntoIterator<Item = BigInt>,
{
    check_modulus(n)?;
    let mut w = Walker::new(a0, n);
    for a in quotients.into_iter().take(depth_limit) {
        if let Some(wit) = w.feed(&a) {
            return Ok(LoopVerdict::NotLoop(wit));
        }
    }
    Ok(LoopVerdict::UnknownAtDepth(w.k))
}

/// Dispatches on the value: rationals via both expansions, surds via [`is_infinite_loop_surd`].
pub fn is_infinite_loop_value(x: &Value, n: u64, budget: usize) -> Result<LoopVerdict, Error> {
    match x {
        Value::Rational(r) => is_infinite_loop(&cf_from_rational(r)?.0, n),
        Value::Surd(s) => is_infinite_loop_surd(s, n, budget),
    }
}

/// A loop mod `n` stays a loop mod `k·n`.
pub fn loop_scaling_check(e: &CFExpansion, n: u64, k: u64) -> Result<bool, Error> {
    if !is_infinite_loop(e, n)?.is_loop() {
        return Err(Error::Precondition(format!("{e} is not an exact loop mod {n}")));
    }
    Ok(is_infinite_loop(e, k * n)?.is_loop())
}

/// The L/R word of `α ∈ (0,1)` read from the base edge, with the residue of
/// each new vertex denominator.
///
/// `L` keeps the left half of the current interval. The mediants created are
/// exactly the semi-convergents with `m >= 1`, so the first run has length `a1`.
pub fn sb_walk(e: &CFExpansion, n: u64, depth: usize) -> Result<Vec<(Letter, u64)>, Error> {
    check_modulus(n)?;
    check_value(e)?;
    let one = CFExpansion::finite(1, vec![])?;
    if !e.a0().is_zero() || (e.is_finite() && e.with_tail_flag(false).canonical() == one) {
        return Err(Error::Domain(format!("{e} is not in (0,1)")));
    }
    let mut out = Vec::with_capacity(depth);
    let last = e.last_index();
    for c in e.convergents() {
        let letter = if c.k % 2 == 0 { Letter::L } else { Letter::R };
        let bound = e.quotient(c.k + 1);
        if bound.is_none() && !(Some(c.k) == last && e.has_infinity_tail()) {
            break;
        }
        let mut m = BigInt::one();
        while out.len() < depth && bound.as_ref().is_none_or(|b| m <= *b) {
            out.push((letter, residue(&(&m * &c.q + &c.q_prev), n)));
            m += 1;
        }
        if out.len() == depth {
            break;
        }
    }
    Ok(out)
}

/// Reachable part of the pruned transition graph mod `n` from `(1, 1)`.
struct ModGraph {
    n: u64,
    states: Vec<ModState>,
    index: HashMap<ModState, usize>,
    edges: Vec<Vec<(Letter, usize)>>,
}

fn successor(s: ModState, letter: Letter, n: u64) -> Option<ModState> {
    let w = (s.u + s.v) % n;
    if w == 0 {
        return None;
    }
    Some(match letter {
        Letter::L => ModState { u: s.u, v: w },
        Letter::R => ModState { u: w, v: s.v },
    })
}

impl ModGraph {
    fn build(n: u64) -> Self {
        let start = ModState { u: 1, v: 1 };
        let mut g = ModGraph { n, states: vec![start], index: HashMap::from([(start, 0)]), edges: vec![vec![]] };
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for letter in [Letter::L, Letter::R] {
                if let Some(t) = successor(g.states[i], letter, n) {
                    let j = *g.index.entry(t).or_insert_with(|| {
                        g.states.push(t);
                        g.edges.push(vec![]);
                        queue.push_back(g.states.len() - 1);
                        g.states.len() - 1
                    });
                    g.edges[i].push((letter, j));
                }
            }
        }
        g
    }

    /// Strongly connected component id of every state (iterative Tarjan).
    fn components(&self) -> Vec<usize> {
        let size = self.states.len();
        let (mut index, mut low, mut comp) = (vec![usize::MAX; size], vec![0; size], vec![usize::MAX; size]);
        let (mut on_stack, mut stack) = (vec![false; size], Vec::new());
        let (mut counter, mut ncomp) = (0, 0);
        for root in 0..size {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut ei)) = call.last_mut() {
                if *ei < self.edges[v].len() {
                    let w = self.edges[v][*ei].1;
                    *ei += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        while let Some(x) = stack.pop() {
                            on_stack[x] = false;
                            comp[x] = ncomp;
                            if x == v {
                                break;
                            }
                        }
                        ncomp += 1;
                    }
                }
            }
        }
        comp
    }

    fn internal_edges(&self, comp: &[usize]) -> Vec<(usize, Letter, usize)> {
        (0..self.states.len())
            .flat_map(|i| self.edges[i].iter().map(move |&(l, j)| (i, l, j)))
            .filter(|&(i, _, j)| comp[i] == comp[j])
            .collect()
    }

    /// Shortest word from `from` to `to`, optionally confined to one component.
    fn path(&self, from: usize, to: usize, within: Option<(&[usize], usize)>) -> Vec<Letter> {
        let mut prev: HashMap<usize, (usize, Letter)> = HashMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = vec![false; self.states.len()];
        seen[from] = true;
        while let Some(i) = queue.pop_front() {
            if i == to {
                break;
            }
            for &(l, j) in &self.edges[i] {
                if seen[j] || within.is_some_and(|(c, id)| c[j] != id) {
                    continue;
                }
                seen[j] = true;
                prev.insert(j, (i, l));
                queue.push_back(j);
            }
        }
        let mut word = Vec::new();
        let mut cur = to;
        while cur != from {
            let (p, l) = prev[&cur];
            word.push(l);
            cur = p;
        }
        word.reverse();
        word
    }

    /// A reachable closed walk `(entry state, word)`, preferring one that mixes letters.
    fn closed_walk(&self) -> Option<(usize, Vec<Letter>)> {
        let comp = self.components();
        let internal = self.internal_edges(&comp);
        let mut fallback = None;
        let mut by_comp: HashMap<usize, (Option<Step>, Option<Step>)> = HashMap::new();
        for &(i, l, j) in &internal {
            let slot = by_comp.entry(comp[i]).or_default();
            match l {
                Letter::L => slot.0 = slot.0.or(Some((i, j))),
                Letter::R => slot.1 = slot.1.or(Some((i, j))),
            }
        }
        let mut ids: Vec<usize> = by_comp.keys().copied().collect();
        ids.sort_by_key(|&c| (0..self.states.len()).find(|&i| comp[i] == c));
        for c in ids {
            let within = Some((comp.as_slice(), c));
            match by_comp[&c] {
                (Some((x, y)), Some((z, w))) => {
                    let mut word = vec![Letter::L];
                    word.extend(self.path(y, z, within));
                    word.push(Letter::R);
                    word.extend(self.path(w, x, within));
                    return Some((x, word));
                }
                (Some((x, y)), None) | (None, Some((x, y))) if fallback.is_none() => {
                    let letter = self.edges[x].iter().find(|&&(_, t)| t == y).unwrap().0;
                    let mut word = vec![letter];
                    word.extend(self.path(y, x, within));
                    fallback = Some((x, word));
                }
                _ => {}
            }
        }
        fallback
    }
}

/// Whether some `α ∈ (0,1)` is an infinite loop mod `n`.
///
/// Searches the pruned graph on [`ModState`] for a reachable cycle. A cycle of
/// one letter is an eventually constant word, whose rational limit has an
/// ∞-tail avoiding 0 mod `n` by construction.
pub fn loop_exists(n: u64) -> Result<bool, Error> {
    check_modulus(n)?;
    let g = ModGraph::build(n);
    let comp = g.components();
    Ok(!g.internal_edges(&comp).is_empty())
}

fn run_lengths(word: &[Letter]) -> Vec<BigInt> {
    let mut runs: Vec<(Letter, u64)> = Vec::new();
    for &l in word {
        match runs.last_mut() {
            Some((x, c)) if *x == l => *c += 1,
            _ => runs.push((l, 1)),
        }
    }
    runs.into_iter().map(|(_, c)| BigInt::from(c)).collect()
}

/// An explicit loop mod `n`, validated by [`is_infinite_loop`].
pub fn loop_example(n: u64) -> Result<CFExpansion, Error> {
    check_modulus(n)?;
    let g = ModGraph::build(n);
    let (entry, cycle) = g
        .closed_walk()
        .ok_or_else(|| Error::Precondition(format!("no infinite loop exists mod {n}")))?;
    let mut prefix = vec![Letter::L];
    prefix.extend(g.path(0, entry, None));
    let e = if cycle.iter().all(|&l| l == cycle[0]) {
        let (mut lo, mut hi) = (Rational::zero(), Rational::infinity());
        for &l in &prefix {
            let mid = crate::farey_core::farey_mediant(&lo, &hi)?;
            match l {
                Letter::L => hi = mid,
                Letter::R => lo = mid,
            }
        }
        let limit = if cycle[0] == Letter::R { hi } else { lo };
        cf_from_rational(&limit)?.0
    } else {
        let len = cycle.len();
        let i = (0..len).find(|&i| cycle[i] != cycle[(i + len - 1) % len]).unwrap();
        let d: Vec<Letter> = cycle[i..].iter().chain(&cycle[..i]).copied().collect();
        let mut s = prefix;
        s.extend_from_slice(&cycle[..i]);
        s.extend_from_slice(&d);
        CFExpansion::periodic(0, run_lengths(&s), run_lengths(&d))?
    };
    if !is_infinite_loop(&e, g.n)?.is_loop() {
        return Err(Error::Precondition(format!("extracted {e} failed validation mod {n}")));
    }
    Ok(e)
}
