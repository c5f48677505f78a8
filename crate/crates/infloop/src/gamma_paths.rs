//! Iterated Farey subdivision of `[0, 1]` until every adjacent pair is a
//! `Γ₀(n)` edge, on vertices (`V_i`) or on denominators mod `n` (`D_i`).
//!
//! Lists double in length each iteration. Past [`MATERIALIZE_LIMIT`] entries the
//! iteration continues on a census of unresolved residue pairs, which decides
//! termination without storing the list.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::Error;
use crate::farey_core::{farey_mediant, is_gamma0_neighbor, Rational};

pub const MATERIALIZE_LIMIT: usize = 1 << 18;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathOutcome<T> {
    /// `iterates[iterations]` has every adjacent pair resolved.
    Terminated { iterates: Vec<Vec<T>>, iterations: usize },
    /// No termination within `iterations` steps.
    Exceeded { iterates: Vec<Vec<T>>, iterations: usize },
}

impl<T> PathOutcome<T> {
    /// Stored lists; shorter than `iterations + 1` once the census took over.
    pub fn iterates(&self) -> &[Vec<T>] {
        match self {
            PathOutcome::Terminated { iterates, .. } | PathOutcome::Exceeded { iterates, .. } => iterates,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            PathOutcome::Terminated { iterations, .. } | PathOutcome::Exceeded { iterations, .. } => *iterations,
        }
    }

    pub fn is_terminated(&self) -> bool {
        matches!(self, PathOutcome::Terminated { .. })
    }
}

fn check_modulus(n: u64) -> Result<(), Error> {
    if n < 2 {
        return Err(Error::Domain(format!("modulus {n} < 2")));
    }
    Ok(())
}

fn resolved(u: u64, v: u64) -> bool {
    (u == 0) != (v == 0)
}

type Census = HashMap<(u64, u64), u128>;

fn census_of(ds: &[u64]) -> Census {
    let mut c = Census::new();
    for w in ds.windows(2) {
        if !resolved(w[0], w[1]) {
            *c.entry((w[0], w[1])).or_default() += 1;
        }
    }
    c
}

fn census_step(c: &Census, n: u64) -> Census {
    let mut out = Census::new();
    for (&(u, v), &k) in c {
        let w = (u + v) % n;
        for pair in [(u, w), (w, v)] {
            assert!(pair != (0, 0), "adjacent zero residues");
            if !resolved(pair.0, pair.1) {
                let e = out.entry(pair).or_default();
                *e = e.saturating_add(k);
            }
        }
    }
    out
}

/// Shared driver: `step` refines a list, `residues` projects it mod `n`.
fn run<T: Clone>(
    start: Vec<T>,
    n: u64,
    max_iter: usize,
    step: impl Fn(&[T]) -> Vec<T>,
    residues: impl Fn(&[T]) -> Vec<u64>,
    limit: usize,
) -> PathOutcome<T> {
    let mut iterates = vec![start];
    let mut census: Option<Census> = None;
    for i in 0..=max_iter {
        let unresolved = match &census {
            Some(c) => !c.is_empty(),
            None => {
                let ds = residues(iterates.last().unwrap());
                ds.windows(2).any(|w| !resolved(w[0], w[1]))
            }
        };
        if !unresolved {
            return PathOutcome::Terminated { iterates, iterations: i };
        }
        if i == max_iter {
            break;
        }
        census = match census {
            Some(c) => Some(census_step(&c, n)),
            None => {
                let cur = iterates.last().unwrap();
                if 2 * cur.len() - 1 <= limit {
                    let next = step(cur);
                    iterates.push(next);
                    None
                } else {
                    Some(census_step(&census_of(&residues(cur)), n))
                }
            }
        };
    }
    PathOutcome::Exceeded { iterates, iterations: max_iter }
}

fn den_residue(r: &Rational, n: u64) -> u64 {
    u64::try_from(r.den() % n).unwrap()
}

/// `V_0 = {0/1, 1/1}`; each step inserts mediants between pairs that are not `Γ₀(n)` edges.
pub fn v_algorithm(n: u64, max_iter: usize) -> Result<PathOutcome<Rational>, Error> {
    check_modulus(n)?;
    let step = |cur: &[Rational]| {
        let mut next = vec![cur[0].clone()];
        for w in cur.windows(2) {
            if !is_gamma0_neighbor(&w[0], &w[1], n) {
                next.push(farey_mediant(&w[0], &w[1]).unwrap());
            }
            next.push(w[1].clone());
        }
        next
    };
    let residues = |cur: &[Rational]| cur.iter().map(|r| den_residue(r, n)).collect();
    Ok(run(vec![Rational::zero(), Rational::integer(1)], n, max_iter, step, residues, MATERIALIZE_LIMIT))
}

/// `D_0 = {1, 1}`; each step inserts `(u + v) mod n` between pairs without exactly one zero.
pub fn d_algorithm(n: u64, max_iter: usize) -> Result<PathOutcome<u64>, Error> {
    d_with_limit(n, max_iter, MATERIALIZE_LIMIT)
}

fn d_with_limit(n: u64, max_iter: usize, limit: usize) -> Result<PathOutcome<u64>, Error> {
    check_modulus(n)?;
    let step = |cur: &[u64]| {
        let mut next = vec![cur[0]];
        for w in cur.windows(2) {
            assert!((w[0], w[1]) != (0, 0), "adjacent zero residues");
            if !resolved(w[0], w[1]) {
                next.push((w[0] + w[1]) % n);
            }
            next.push(w[1]);
        }
        next
    };
    Ok(run(vec![1, 1], n, max_iter, step, |cur: &[u64]| cur.to_vec(), limit))
}

/// Whether the pair `(1, 2)` mod `n` regenerates itself, which forces the
/// subdivision to run forever.
pub fn nonterminating(n: u64) -> Result<bool, Error> {
    check_modulus(n)?;
    let root = (1 % n, 2 % n);
    if resolved(root.0, root.1) {
        return Ok(false);
    }
    let children = |(u, v): (u64, u64)| {
        let w = (u + v) % n;
        [(u, w), (w, v)].into_iter().filter(|&(a, b)| !resolved(a, b) && (a, b) != (0, 0))
    };
    let mut seen = HashSet::new();
    let mut queue: VecDeque<_> = children(root).collect();
    while let Some(p) = queue.pop_front() {
        if p == root {
            return Ok(true);
        }
        if seen.insert(p) {
            queue.extend(children(p));
        }
    }
    Ok(false)
}

pub struct Braced<'a, T>(pub &'a [T]);

impl<T: fmt::Display> fmt::Display for Braced<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

/// Lines `NAME_i = {...}` for each stored iterate.
pub fn render_iterates<T: fmt::Display>(name: &str, iterates: &[Vec<T>]) -> String {
    iterates.iter().enumerate().map(|(i, xs)| format!("{name}_{i} = {}\n", Braced(xs))).collect()
}
