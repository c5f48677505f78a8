//! One line per acceptance criterion; exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use infloop::contfrac::{cf_from_rational, multiply_cf, CFExpansion};
use infloop::cutting_seq::{crossed_edges, eta, eta_inverse, fans_of_edges, loop_verdict_geometric, word_from_edges};
use infloop::farey_core::Rational;
use infloop::gamma_paths::{d_algorithm, nonterminating, render_iterates, v_algorithm};
use infloop::loops::{is_infinite_loop, loop_example, loop_exists, LoopVerdict};
use infloop::plc_verify::{
    check_count_height, check_infl, check_noloop_bound, check_pro2, check_uplow, planted_pro2, random_finite,
    random_periodic, run_scan, CountOutcome, ScanReport,
};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed;

fn threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4)
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

fn cf(s: &str) -> CFExpansion {
    s.parse().unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn report_ok(r: &ScanReport) -> Result<String, String> {
    let line = format!("cases={} skipped={} violations={}", r.cases, r.skipped, r.violations);
    match &r.first_violation {
        None => Ok(line),
        Some(v) => Err(format!("{line}; first: {v}")),
    }
}

const V2: &str = "V_0={0/1,1/1}V_1={0/1,1/2,1/1}";
const V3: &str = "V_0={0/1,1/1}V_1={0/1,1/2,1/1}V_2={0/1,1/3,1/2,2/3,1/1}";
const V5: &str = "V_0={0/1,1/1}V_1={0/1,1/2,1/1}V_2={0/1,1/3,1/2,2/3,1/1}\
V_3={0/1,1/4,1/3,2/5,1/2,3/5,2/3,3/4,1/1}\
V_4={0/1,1/5,1/4,2/7,1/3,2/5,1/2,3/5,2/3,5/7,3/4,4/5,1/1}";
const D5: &str = "D_0={1,1}D_1={1,2,1}D_2={1,3,2,3,1}D_3={1,4,3,0,2,0,3,4,1}\
D_4={1,0,4,2,3,0,2,0,3,2,4,0,1}D_5={1,0,4,1,2,0,3,0,2,0,3,0,2,1,4,0,1}";

fn c1_tables() -> Result<String, String> {
    let v = |n, t| render_iterates("V", v_algorithm(n, t).unwrap().iterates());
    ensure(squash(&v(2, 50)) == V2, "V for n=2")?;
    ensure(squash(&v(3, 50)) == V3, "V for n=3")?;
    ensure(squash(&v(5, 4)) == V5, "V for n=5")?;
    let d = render_iterates("D", d_algorithm(5, 5).unwrap().iterates());
    ensure(squash(&d) == D5, format!("D for n=5: {d}"))?;
    Ok("V(2), V(3), V(5), D(5) exact".into())
}

fn c2_termination() -> Result<String, String> {
    for n in 2..=30 {
        let out = v_algorithm(n, 50).unwrap();
        ensure(out.is_terminated() == (n <= 3), format!("v_algorithm n={n}"))?;
    }
    for n in 2..=100 {
        let (a, b) = (nonterminating(n).unwrap(), loop_exists(n).unwrap());
        ensure(a == b, format!("n={n}: nonterminating={a} loop_exists={b}"))?;
        ensure(b == (n > 3), format!("loop_exists({n}) = {b}"))?;
    }
    Ok("n<=30 V-runs, n<=100 graph".into())
}

fn c3_definitions() -> Result<String, String> {
    let mut cases = Vec::new();
    for q in 2..=150u64 {
        for p in 1..q {
            if num_integer::gcd(p, q) == 1 {
                cases.push(Rational::new(p, q).unwrap());
            }
        }
    }
    let r = run_scan("defs", "q<=150 n<=12", &cases, threads(), |x| {
        let e = cf_from_rational(x)?.0;
        let mut bad = Vec::new();
        for n in 2..=12 {
            let a = is_infinite_loop(&e, n)?;
            let b = loop_verdict_geometric(&e, n, 100_000)?;
            let exact = |v: &LoopVerdict| !matches!(v, LoopVerdict::UnknownAtDepth(_));
            if !exact(&a) || !exact(&b) || a.is_loop() != b.is_loop() {
                bad.push(format!("n={n}:{a}/{b}"));
            }
        }
        Ok(infloop::plc_verify::Record { check: "defs", n: 0, pass: bad.is_empty(), witness: format!("{x} {bad:?}") })
    });
    report_ok(&r).map(|s| format!("{} rationals x 11 moduli; {s}", cases.len()))
}

/// `count` periodic expansions per modulus that are not loops mod `n`.
fn notloop_population(n: u64, count: usize, seed: u64) -> Vec<CFExpansion> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let e = random_periodic(&mut rng, 12);
        if is_infinite_loop(&e, n).unwrap().is_not_loop() {
            out.push(e);
        }
    }
    out
}

fn c4_noloop() -> Result<String, String> {
    let mut total = ScanReport::new("noloop", "n=4..25");
    for n in 4..=25 {
        let pop = notloop_population(n, 1000, SEED);
        total = total.merge(run_scan("noloop", "", &pop, threads(), |e| check_noloop_bound(e, n)));
    }
    report_ok(&total)
}

fn c5_infl() -> Result<String, String> {
    let mut total = ScanReport::new("infl", "p^m<=32");
    for (p, m) in [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2)] {
        let n = u64::pow(p, m);
        let pop = notloop_population(n, 1000, SEED);
        total = total.merge(run_scan("infl", "", &pop, threads(), |e| check_infl(e, p, m)));
    }
    report_ok(&total)
}

fn c6_pro2() -> Result<String, String> {
    let mut total = ScanReport::new("pro2", "n=2..7");
    for n in 2..=7 {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + n);
        let pop: Vec<(CFExpansion, usize)> = (0..500).map(|_| planted_pro2(&mut rng, n, 9)).collect();
        total = total.merge(run_scan("pro2", "", &pop, threads(), |(e, k)| check_pro2(e, n, *k)));
    }
    ensure(total.skipped == 0, "planted case rejected")?;
    report_ok(&total)
}

fn fan_sizes(e: &CFExpansion, depth: usize) -> Vec<usize> {
    fans_of_edges(&crossed_edges(e, depth)).into_iter().map(|(_, c)| c).collect()
}

fn c7_fans() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let golden: Vec<Rational> =
        fans_of_edges(&crossed_edges(&cf("[0; (1)]"), 12)).into_iter().take(7).map(|(v, _)| v).collect();
    let want: Vec<Rational> = ["oo", "0", "1", "1/2", "2/3", "3/5", "5/8"].iter().map(|s| s.parse().unwrap()).collect();
    ensure(golden == want, format!("golden fans {golden:?}"))?;
    for _ in 0..500 {
        let e = random_finite(&mut rng, 1, 8, 9);
        let edges = crossed_edges(&e, 100_000);
        let w = word_from_edges(&edges, true);
        let back = eta(&w).map_err(|x| x.to_string())?;
        ensure(back == eta(&eta_inverse(&e)).unwrap(), format!("{e}: read back {back}"))?;
        let sizes = fan_sizes(&e, 100_000);
        let mut qs: Vec<usize> = e.quotients().map(|a| usize::try_from(a).unwrap()).collect();
        *qs.last_mut().unwrap() -= 1;
        while qs.last() == Some(&0) && qs.len() > 1 {
            qs.pop();
        }
        ensure(sizes == qs || (qs.len() == 1 && sizes == [qs[0]]), format!("{e}: fans {sizes:?}"))?;
    }
    for _ in 0..100 {
        let e = random_periodic(&mut rng, 9);
        let sizes = fan_sizes(&e, 400);
        let qs: Vec<usize> = e.quotients().take(sizes.len() - 1).map(|a| usize::try_from(a).unwrap()).collect();
        ensure(sizes[..sizes.len() - 1] == qs[..], format!("{e}: fans {sizes:?}"))?;
        let ne = multiply_cf(&e, &BigInt::from(rng.gen_range(2..=7u32))).unwrap();
        let ns = fan_sizes(&ne, 400);
        let nq: Vec<usize> = ne.quotients().take(ns.len() - 1).map(|a| usize::try_from(a).unwrap()).collect();
        ensure(ns[..ns.len() - 1] == nq[..], format!("{ne}: fans {ns:?}"))?;
    }
    Ok("golden chain, 500 rationals, 100 periodic".into())
}

fn c8_constructions() -> Result<String, String> {
    for n in 4..=100 {
        ensure(loop_exists(n).unwrap(), format!("no loop mod {n}"))?;
        let e = loop_example(n).map_err(|x| x.to_string())?;
        ensure(is_infinite_loop(&e, n).unwrap().is_loop(), format!("example {e} mod {n}"))?;
    }
    let half = cf("[0; 2, oo]");
    ensure(is_infinite_loop(&half, 4).unwrap().is_loop(), "1/2 mod 4")?;
    let v = is_infinite_loop(&half, 5).unwrap();
    ensure(v.witness().is_some_and(|w| w.value.den() == &BigInt::from(5)), format!("1/2 mod 5: {v}"))?;
    Ok("n=4..100 examples verified; 1/2 mod 4 loop, mod 5 witness q=5".into())
}

fn c9_uplow() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut pop = Vec::with_capacity(10_000);
    while pop.len() < 10_000 {
        let e = random_finite(&mut rng, 2, 12, 20).canonical();
        if e.last_index() >= Some(2) {
            pop.push(e);
        }
    }
    report_ok(&run_scan("uplow", "", &pop, threads(), check_uplow))
}

/// Periodic expansions that are exact loops mod `n`, drawn by rejection.
fn loop_population(n: u64, count: usize, seed: u64) -> Vec<CFExpansion> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n << 8));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let e = random_periodic(&mut rng, n + 2);
        if is_infinite_loop(&e, n).unwrap().is_loop() {
            out.push(e);
        }
    }
    out
}

fn c10_count() -> Result<String, String> {
    let mut tally = [0usize; 4];
    let mut deepest = 0;
    let mut unresolved = Vec::new();
    // Mod 4 the residue graph has no closed walk using both letters, so the
    // only loops are rational and the periodic population is empty.
    ensure(!loop_example(4).unwrap().is_periodic(), "periodic loop mod 4")?;
    for (p, m) in [(2u64, 3u32), (3, 2), (2, 4), (5, 2)] {
        let n = p.pow(m);
        let pop = loop_population(n, 200, SEED);
        for e in &pop {
            let (_, outcome) = check_count_height(e, p, m, 20, 60).map_err(|x| x.to_string())?;
            let slot = match outcome {
                CountOutcome::Vacuous(l) => {
                    deepest = deepest.max(l);
                    0
                }
                CountOutcome::Consistent => 1,
                CountOutcome::ResolvedBeyond(_) => 2,
                CountOutcome::Unresolved => 3,
            };
            tally[slot] += 1;
            if slot == 3 {
                unresolved.push(format!("{e} mod {n}"));
            }
        }
    }
    let line = format!(
        "800 loops at l=0 mod 8,9,16,25: vacuous={} (deepest l={deepest}) consistent={} resolved-beyond={} unresolved={}",
        tally[0], tally[1], tally[2], tally[3]
    );
    ensure(unresolved.is_empty(), format!("{line}; {unresolved:?}"))?;
    Ok(line)
}

type Criterion = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("V and D tables", c1_tables),
        ("termination dichotomy", c2_termination),
        ("definitions equivalence", c3_definitions),
        ("noloop bound", c4_noloop),
        ("infl consistency", c5_infl),
        ("pro2 planted", c6_pro2),
        ("fan structure", c7_fans),
        ("loop constructions", c8_constructions),
        ("determinant and sandwich", c9_uplow),
        ("count exploration", c10_count),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {:>2} PASS {name} [{secs:.2}s] {detail}", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL {name} [{secs:.2}s] {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: 10/10 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
