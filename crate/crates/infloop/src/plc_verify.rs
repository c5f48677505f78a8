//! Height spectra `B(p^ℓ α)`, upper bounds on `m_p(α)` and batch checks of
//! the inequalities linking heights to infinite loops mod `n`.
//!
//! Every check is exact. A single case yields a [`Record`]; scans merge
//! records into a [`ScanReport`].

use std::collections::HashSet;
use std::fmt;
use std::thread;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::contfrac::{cf_from_rational, multiply_cf, CFExpansion, Height, Value};
use crate::cutting_seq::{crossed_edges, eta, eta_inverse, fans_of_edges, loop_verdict_geometric, word_from_edges};
use crate::error::Error;
use crate::farey_core::{is_dual_neighbor, Rational};
use crate::loops::{is_infinite_loop, is_infinite_loop_surd, LoopVerdict};

/// Partial quotients examined per surd loop decision.
pub const SURD_BUDGET: usize = 200_000;

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn check_prime(p: u64) -> Result<(), Error> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    Ok(())
}

/// `⌊2√n⌋ − 1`, computed as `isqrt(4n) − 1`.
pub fn noloop_threshold(n: u64) -> u64 {
    (4 * n).sqrt() - 1
}

fn pow(p: u64, l: usize) -> BigInt {
    num_traits::pow(BigInt::from(p), l)
}

/// The expansion of `k·α`; rationals keep the ∞-tail.
fn scaled(e: &CFExpansion, k: &BigInt) -> Result<CFExpansion, Error> {
    match e.value() {
        Value::Rational(r) => Ok(cf_from_rational(&r.scale(k))?.0),
        Value::Surd(_) => multiply_cf(e, k),
    }
}

fn height_of(e: &CFExpansion) -> Height {
    if e.is_periodic() {
        e.height()
    } else {
        Height::Infinite
    }
}

/// Exact loop verdict for `k·α` mod `n`; surds stream with [`SURD_BUDGET`].
pub fn scaled_loop_verdict(e: &CFExpansion, k: &BigInt, n: u64) -> Result<LoopVerdict, Error> {
    match e.value() {
        Value::Rational(r) => is_infinite_loop(&cf_from_rational(&r.scale(k))?.0, n),
        Value::Surd(s) => is_infinite_loop_surd(&s.mul_int(k), n, SURD_BUDGET),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightSpectrum {
    pub alpha: CFExpansion,
    pub p: u64,
    pub entries: Vec<(usize, Height)>,
}

impl fmt::Display for HeightSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(l, b)| format!("({l},{b})")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// `B(p^ℓ α)` for `ℓ = 0..=l`, each expansion obtained from the previous one.
pub fn height_spectrum(e: &CFExpansion, p: u64, l: usize) -> Result<HeightSpectrum, Error> {
    check_prime(p)?;
    let pb = BigInt::from(p);
    let mut cur = e.clone();
    let mut entries = Vec::with_capacity(l + 1);
    for ell in 0..=l {
        if ell > 0 {
            cur = scaled(&cur, &pb)?;
        }
        entries.push((ell, height_of(&cur)));
    }
    Ok(HeightSpectrum { alpha: e.clone(), p, entries })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MpBound {
    pub bound: Rational,
    /// Set for rational input, where `m_p = 0`.
    pub rational: bool,
}

/// `min_{ℓ ≤ l} 1/B(p^ℓ α)`, an upper bound on `m_p(α)`.
pub fn mp_upper_bound(e: &CFExpansion, p: u64, l: usize) -> Result<MpBound, Error> {
    check_prime(p)?;
    if !e.is_periodic() {
        return Ok(MpBound { bound: Rational::zero(), rational: true });
    }
    let spec = height_spectrum(e, p, l)?;
    let bound = spec.entries.iter().map(|(_, b)| b.recip()).min().unwrap();
    Ok(MpBound { bound, rational: false })
}

/// `min_{ℓ ≤ l} 1/(B(p^ℓ α) + 2)`; a partial minimum, not a bound on `m_p`.
pub fn mp_partial_lower(e: &CFExpansion, p: u64, l: usize) -> Result<Rational, Error> {
    let spec = height_spectrum(e, p, l)?;
    Ok(spec
        .entries
        .iter()
        .map(|(_, b)| match b {
            Height::Finite(b) => Rational::new(1, b + 2).unwrap(),
            Height::Infinite => Rational::zero(),
        })
        .min()
        .unwrap())
}

/// One checked case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub check: &'static str,
    pub n: u64,
    pub pass: bool,
    pub witness: String,
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "check={} n={} pass={} witness={}", self.check, self.n, self.pass as u8, self.witness)
    }
}

fn require_notloop(e: &CFExpansion, n: u64) -> Result<(), Error> {
    if !e.is_periodic() {
        return Err(Error::Precondition(format!("{e} is rational; B is infinite")));
    }
    match is_infinite_loop(e, n)? {
        LoopVerdict::NotLoop(_) => Ok(()),
        v => Err(Error::Precondition(format!("{e} mod {n}: {v}"))),
    }
}

fn height_pair(e: &CFExpansion, n: u64) -> Result<(BigInt, BigInt), Error> {
    let b1 = e.height().finite().cloned().unwrap();
    let b2 = multiply_cf(e, &BigInt::from(n))?.height().finite().cloned().unwrap();
    Ok((b1, b2))
}

/// `max{B(α), B(nα)} ≥ ⌊2√n⌋ − 1` for periodic `α` that is not a loop mod `n`.
pub fn check_noloop_bound(e: &CFExpansion, n: u64) -> Result<Record, Error> {
    require_notloop(e, n)?;
    let (b1, b2) = height_pair(e, n)?;
    let t = noloop_threshold(n);
    Ok(Record {
        check: "noloop",
        n,
        pass: b1.clone().max(b2.clone()) >= BigInt::from(t),
        witness: format!("alpha={e};B={b1};B(n*alpha)={b2};bound={t}"),
    })
}

/// `min{1/B(α), 1/B(p^m α)} ≤ 1/(⌊2√(p^m)⌋ − 1)` when `α` is not a loop mod `p^m`.
pub fn check_infl(e: &CFExpansion, p: u64, m: u32) -> Result<Record, Error> {
    check_prime(p)?;
    let n = p.pow(m);
    require_notloop(e, n)?;
    let (b1, b2) = height_pair(e, n)?;
    let lhs = Height::Finite(b1).recip().min(Height::Finite(b2).recip());
    let rhs = Rational::new(1, noloop_threshold(n)).unwrap();
    Ok(Record { check: "infl", n, pass: lhs <= rhs, witness: format!("alpha={e};min={lhs};bound={rhs}") })
}

/// For finite `α` with `q_k = n·q'`, `q' > 1`: `B(nα) ≥ n·a_{k+1}` and
/// `p_k/q'` is a convergent of `nα`.
pub fn check_pro2(e: &CFExpansion, n: u64, k: usize) -> Result<Record, Error> {
    let pre = |why: String| Err(Error::Precondition(why));
    if e.is_periodic() {
        return pre(format!("{e} is not finite"));
    }
    let e = e.with_tail_flag(false);
    let Some(a_next) = e.quotient(k + 1) else {
        return pre(format!("{e} has no a_{}", k + 1));
    };
    let c = e.convergent(k as i64)?;
    let (q_prime, rem) = c.den().div_rem(&BigInt::from(n));
    if !rem.is_zero() || q_prime <= BigInt::one() {
        return pre(format!("q_{k} = {} is not {n}*q' with q' > 1", c.den()));
    }
    let target = Rational::new(c.num().clone(), q_prime)?;
    let ne = multiply_cf(&e, &BigInt::from(n))?;
    let b = ne.height().finite().cloned().unwrap();
    let want = &a_next * n;
    let twin = ne.twin().unwrap_or_else(|| ne.clone());
    let found = [&ne, &twin].iter().any(|x| x.convergents().any(|cv| cv.value() == target));
    Ok(Record {
        check: "pro2",
        n,
        pass: b >= want && found,
        witness: format!("alpha={e};k={k};B(n*alpha)={b};n*a={want};conv={target};found={found}"),
    })
}

/// The residue and geometric loop decisions agree, and both are exact.
pub fn check_defs(e: &CFExpansion, n: u64, depth: usize) -> Result<Record, Error> {
    let a = is_infinite_loop(e, n)?;
    let b = loop_verdict_geometric(e, n, depth)?;
    let exact = |v: &LoopVerdict| !matches!(v, LoopVerdict::UnknownAtDepth(_));
    Ok(Record {
        check: "defs-equivalence",
        n,
        pass: exact(&a) && exact(&b) && a.is_loop() == b.is_loop(),
        witness: format!("alpha={e};cf={a};geometric={b}"),
    })
}

/// Fan sizes along the crossed edges reproduce the partial quotients.
///
/// Finite input is read back through the terminal `L`; periodic input is
/// compared on every fan completed within `depth` edges.
pub fn check_thma(e: &CFExpansion, depth: usize) -> Result<Record, Error> {
    let (pass, read) = if e.is_periodic() {
        let fans = fans_of_edges(&crossed_edges(e, depth));
        let sizes: Vec<BigInt> = fans[..fans.len() - 1].iter().map(|(_, c)| BigInt::from(*c)).collect();
        let want: Vec<BigInt> = e.quotients().take(sizes.len()).collect();
        (sizes == want && sizes.len() >= 2, format!("{sizes:?}"))
    } else {
        let f = e.with_tail_flag(false);
        let edges = crossed_edges(&f, usize::MAX);
        let back = eta(&word_from_edges(&edges, true))?;
        (back == eta(&eta_inverse(&f))?, back.to_string())
    };
    Ok(Record { check: "thma", n: 0, pass, witness: format!("alpha={e};read={read}") })
}

/// Semi-convergents `(k, m)`, `k ≥ −1`, `1 ≤ m ≤ a_{k+1}`, of a finite expansion, plus `∞` and `a0`.
fn semiconvergent_set(e: &CFExpansion) -> HashSet<Rational> {
    let mut out = HashSet::from([Rational::infinity(), Rational::integer(e.a0().clone())]);
    let (mut prev, mut cur) = ((BigInt::zero(), BigInt::one()), (BigInt::one(), BigInt::zero()));
    for a in e.quotients() {
        let mut m = BigInt::one();
        while m <= a {
            out.insert(Rational::new(&m * &cur.0 + &prev.0, &m * &cur.1 + &prev.1).unwrap());
            m += 1;
        }
        let next = (&a * &cur.0 + &prev.0, &a * &cur.1 + &prev.1);
        prev = std::mem::replace(&mut cur, next);
    }
    out
}

/// Every crossed edge of a finite `α` lying in `F ∩ (1/n)F` maps under `x ↦ nx`
/// to two semi-convergents of `nα`, at least one of them a convergent.
pub fn check_dual_pushforward(e: &CFExpansion, n: u64) -> Result<Record, Error> {
    if e.is_periodic() {
        return Err(Error::Precondition(format!("{e} is not finite")));
    }
    let f = e.with_tail_flag(false);
    let nb = BigInt::from(n);
    let ne = multiply_cf(&f, &nb)?;
    let twin = ne.twin().unwrap_or_else(|| ne.clone());
    let mut semis = semiconvergent_set(&ne);
    semis.extend(semiconvergent_set(&twin));
    let mut convs: HashSet<Rational> = ne.convergents().chain(twin.convergents()).map(|c| c.value()).collect();
    convs.insert(Rational::infinity());
    let mut checked = 0;
    let mut bad = Vec::new();
    for edge in crossed_edges(&f, usize::MAX).iter().skip(1) {
        if edge.is_base_translate() || !is_dual_neighbor(&edge.a, &edge.b, n) {
            continue;
        }
        checked += 1;
        let (x, y) = (edge.a.scale(&nb), edge.b.scale(&nb));
        if !(semis.contains(&x) && semis.contains(&y) && (convs.contains(&x) || convs.contains(&y))) {
            bad.push(format!("{edge}"));
        }
    }
    if checked == 0 {
        return Err(Error::Precondition(format!("{e} crosses no dual edge mod {n}")));
    }
    Ok(Record {
        check: "dual-pushforward",
        n,
        pass: bad.is_empty(),
        witness: format!("alpha={e};edges={checked};bad=[{}]", bad.join(",")),
    })
}

/// `c_N(α)`: the least `q·‖qα‖` over convergent denominators `q_k`, `k < M`.
pub fn c_convergent(e: &CFExpansion) -> Result<Rational, Error> {
    let Value::Rational(alpha) = e.value() else {
        return Err(Error::Precondition(format!("{e} is not finite")));
    };
    let last = e.last_index().unwrap_or(0);
    e.convergents()
        .take(last)
        .map(|c| {
            let q = Rational::integer(c.q.clone());
            let x = alpha.mul(&q);
            let frac = x.sub(&Rational::integer(x.floor()));
            let dist = frac.clone().min(Rational::integer(1).sub(&frac));
            q.mul(&dist)
        })
        .min()
        .ok_or_else(|| Error::Precondition(format!("{e} has no interior convergent")))
}

/// Determinant `p_k q_{k−1} − p_{k−1} q_k = ±1`, the two-sided bound
/// `1/((a_{k+1}+2) q_k²) < |α − p_k/q_k| < 1/(a_{k+1} q_k²)` and
/// `1/(B+2) < c_N(α) < 1/B` on the canonical form of a finite expansion, which must have `M ≥ 2`.
pub fn check_uplow(e: &CFExpansion) -> Result<Record, Error> {
    let e = e.with_tail_flag(false).canonical();
    let m = e.last_index().unwrap_or(0);
    if m < 2 {
        return Err(Error::Precondition(format!("{e} has fewer than two quotients after a0")));
    }
    let Value::Rational(alpha) = e.value() else { unreachable!() };
    let mut bad = Vec::new();
    for c in e.convergents().take(m) {
        let det = &c.p * &c.q_prev - &c.p_prev * &c.q;
        if !det.abs().is_one() {
            bad.push(format!("det{}", c.k));
        }
        let a = e.quotient(c.k + 1).unwrap();
        let q2 = &c.q * &c.q;
        let gap = alpha.sub(&c.value()).abs();
        let lo = Rational::new(1, (&a + 2) * &q2)?;
        let hi = Rational::new(1, &a * &q2)?;
        if !(lo < gap && gap < hi) {
            bad.push(format!("bound{}", c.k));
        }
    }
    let b = e.height().finite().cloned().unwrap();
    let cn = c_convergent(&e)?;
    if !(Rational::new(1, &b + 2)? < cn && cn < Rational::new(1, b.clone())?) {
        bad.push("sandwich".into());
    }
    Ok(Record {
        check: "uplow",
        n: 0,
        pass: bad.is_empty(),
        witness: format!("alpha={e};B={b};c={cn};fail={}", bad.join(",")),
    })
}

/// How one case of the height-versus-persistence scan resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CountOutcome {
    /// `p^ℓ α` is not a loop for some `ℓ ≤ L`; nothing to check.
    Vacuous(usize),
    /// Loop for every `ℓ ≤ L` and `B(α) ≤ p^m − 4`.
    Consistent,
    /// `B(α) > p^m − 4`, with a non-loop multiple found at this `ℓ > L`.
    ResolvedBeyond(usize),
    /// `B(α) > p^m − 4` and no witness up to the cap, or an undecided level.
    Unresolved,
}

impl fmt::Display for CountOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountOutcome::Vacuous(l) => write!(f, "vacuous@{l}"),
            CountOutcome::Consistent => f.write_str("consistent"),
            CountOutcome::ResolvedBeyond(l) => write!(f, "resolved@{l}"),
            CountOutcome::Unresolved => f.write_str("unresolved"),
        }
    }
}

/// First `ℓ` in `range` where `p^ℓ α` is not a loop mod `n`; `Err` on an undecided level.
fn first_notloop(e: &CFExpansion, p: u64, n: u64, range: std::ops::RangeInclusive<usize>) -> Result<Option<usize>, usize> {
    for l in range {
        match scaled_loop_verdict(e, &pow(p, l), n) {
            Ok(LoopVerdict::NotLoop(_)) => return Ok(Some(l)),
            Ok(LoopVerdict::IsLoop) => {}
            _ => return Err(l),
        }
    }
    Ok(None)
}

/// If `p^ℓ α` is a loop mod `p^m` for all `ℓ ≤ l`, compares `B(α)` with `p^m − 4`,
/// searching `ℓ ≤ cap` for a non-loop multiple when the height is larger.
pub fn check_count_height(e: &CFExpansion, p: u64, m: u32, l: usize, cap: usize) -> Result<(Record, CountOutcome), Error> {
    check_prime(p)?;
    if !e.is_periodic() {
        return Err(Error::Precondition(format!("{e} is not periodic")));
    }
    let n = p.pow(m);
    let b = e.height().finite().cloned().unwrap();
    let limit = BigInt::from(n as i64 - 4);
    let outcome = match first_notloop(e, p, n, 0..=l) {
        Ok(Some(ell)) => CountOutcome::Vacuous(ell),
        Err(_) => CountOutcome::Unresolved,
        Ok(None) if b <= limit => CountOutcome::Consistent,
        Ok(None) => match first_notloop(e, p, n, l + 1..=cap) {
            Ok(Some(ell)) => CountOutcome::ResolvedBeyond(ell),
            _ => CountOutcome::Unresolved,
        },
    };
    let rec = Record {
        check: "count-height",
        n,
        pass: outcome != CountOutcome::Unresolved,
        witness: format!("alpha={e};B={b};limit={limit};outcome={outcome}"),
    };
    Ok((rec, outcome))
}

/// For each `m ≤ m_max`, the least `ℓ ≤ l` with `p^ℓ α` not a loop mod `p^m`.
pub fn persistence_scan(e: &CFExpansion, p: u64, m_max: u32, l: usize) -> Result<Vec<(u32, Option<usize>)>, Error> {
    check_prime(p)?;
    Ok((1..=m_max).map(|m| (m, first_notloop(e, p, p.pow(m), 0..=l).ok().flatten())).collect())
}

/// Counts of a batch check, merged associatively.
#[derive(Clone, Debug, Default)]
pub struct ScanReport {
    pub check: String,
    pub params: String,
    pub cases: usize,
    pub skipped: usize,
    pub violations: usize,
    pub first_violation: Option<Record>,
    pub records: Vec<Record>,
    pub elapsed: Duration,
}

impl ScanReport {
    pub fn new(check: &str, params: &str) -> Self {
        ScanReport { check: check.into(), params: params.into(), ..Default::default() }
    }

    pub fn add(&mut self, r: Result<Record, Error>) {
        match r {
            Ok(rec) => {
                self.cases += 1;
                if !rec.pass {
                    self.violations += 1;
                    if self.first_violation.is_none() {
                        self.first_violation = Some(rec.clone());
                    }
                }
                self.records.push(rec);
            }
            Err(_) => self.skipped += 1,
        }
    }

    pub fn merge(mut self, other: ScanReport) -> ScanReport {
        self.cases += other.cases;
        self.skipped += other.skipped;
        self.violations += other.violations;
        if self.first_violation.is_none() {
            self.first_violation = other.first_violation;
        }
        self.records.extend(other.records);
        self.elapsed = self.elapsed.max(other.elapsed);
        self
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl fmt::Display for ScanReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "check={} {} cases={} skipped={} violations={} time={:.3}s",
            self.check,
            self.params,
            self.cases,
            self.skipped,
            self.violations,
            self.elapsed.as_secs_f64()
        )?;
        if let Some(v) = &self.first_violation {
            write!(f, "\nfirst violation: {v}")?;
        }
        Ok(())
    }
}

/// Applies `f` to every input on `threads` workers; records keep input order.
pub fn run_scan<T, F>(check: &str, params: &str, inputs: &[T], threads: usize, f: F) -> ScanReport
where
    T: Sync,
    F: Fn(&T) -> Result<Record, Error> + Sync,
{
    let start = Instant::now();
    let threads = threads.max(1);
    let chunk = inputs.len().div_ceil(threads).max(1);
    let parts: Vec<ScanReport> = thread::scope(|s| {
        let handles: Vec<_> = inputs
            .chunks(chunk)
            .map(|xs| {
                let f = &f;
                s.spawn(move || {
                    let mut r = ScanReport::new(check, params);
                    xs.iter().for_each(|x| r.add(f(x)));
                    r
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("scan worker panicked")).collect()
    });
    let mut out = parts.into_iter().fold(ScanReport::new(check, params), ScanReport::merge);
    out.elapsed = start.elapsed();
    out
}

fn quotient<R: Rng>(rng: &mut R, max_q: u64) -> BigInt {
    BigInt::from(rng.gen_range(1..=max_q))
}

/// An eventually periodic expansion with small random quotients.
pub fn random_periodic<R: Rng>(rng: &mut R, max_q: u64) -> CFExpansion {
    let a0 = rng.gen_range(0..=3u64);
    let body = (0..rng.gen_range(0..=3)).map(|_| quotient(rng, max_q)).collect();
    let period = (0..rng.gen_range(1..=4)).map(|_| quotient(rng, max_q)).collect();
    CFExpansion::periodic(a0, body, period).unwrap()
}

/// A finite expansion with `min_len..=max_len` quotients after `a0`.
pub fn random_finite<R: Rng>(rng: &mut R, min_len: usize, max_len: usize, max_q: u64) -> CFExpansion {
    let a0 = rng.gen_range(0..=3u64);
    let body = (0..rng.gen_range(min_len..=max_len)).map(|_| quotient(rng, max_q)).collect();
    CFExpansion::finite(a0, body).unwrap()
}

/// A finite expansion with `q_k = n·q'`, `q' > 1`, and at least one quotient after `a_{k+1}`.
pub fn planted_pro2<R: Rng>(rng: &mut R, n: u64, max_q: u64) -> (CFExpansion, usize) {
    let nb = BigInt::from(n);
    loop {
        let mut body: Vec<BigInt> = Vec::new();
        let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
        for k in 1..=12usize {
            let a = quotient(rng, max_q);
            let next = &a * &q + &q_prev;
            q_prev = std::mem::replace(&mut q, next);
            body.push(a);
            if q.is_multiple_of(&nb) && q > nb {
                body.extend((0..rng.gen_range(2..=4)).map(|_| quotient(rng, max_q)));
                let a0 = rng.gen_range(0..=3u64);
                return (CFExpansion::finite(a0, body).unwrap(), k);
            }
        }
    }
}

/// `B(α)` as an integer; `None` for rationals.
pub fn height_u64(e: &CFExpansion) -> Option<u64> {
    height_of(e).finite().and_then(|b| b.to_u64())
}
