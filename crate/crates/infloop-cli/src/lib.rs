//! Command-line front end for the `infloop` library.

pub mod config;
pub mod verify;

use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;

use infloop::contfrac::{cf_eval, cf_from_rational, cf_of_surd, multiply_cf, shift_cf, CFExpansion};
use infloop::cutting_seq::{crossed_edges, eta, eta_inverse, fans_of_edges, loop_verdict_geometric};
use infloop::gamma_paths::{d_algorithm, nonterminating, render_iterates, v_algorithm};
use infloop::loops::{is_infinite_loop, loop_example, loop_exists, loop_scaling_check, sb_walk};
use infloop::plc_verify::{height_spectrum, mp_partial_lower, mp_upper_bound, persistence_scan};
use infloop::Value;

use config::{parse_range, Config, OutputMode};
use verify::{verify, Check};

#[derive(Debug, Parser)]
#[command(name = "infloop", version, about = "Infinite loops of continued fractions modulo n")]
pub struct Cli {
    /// `key = value` file with scan limits.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<OutputMode>,
    /// Worker threads for `verify`; defaults to INFLOOP_THREADS or 1.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Continued fraction expansions of a rational, surd or expansion.
    Cf {
        value: String,
        /// Multiply by a positive integer first.
        #[arg(long)]
        times: Option<u64>,
        /// Add a non-negative integer first.
        #[arg(long)]
        shift: Option<u64>,
        /// Evaluate the prefix through index `d`.
        #[arg(long)]
        eval: Option<i64>,
    },
    /// Convergents and semi-convergents.
    Semiconv {
        value: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Decide whether a value is an infinite loop mod n.
    Loopcheck {
        value: String,
        #[arg(long = "mod")]
        modulus: u64,
        /// Crossed-edge depth for the geometric decision.
        #[arg(long)]
        depth: Option<usize>,
        /// Also decide through crossed edges.
        #[arg(long)]
        geometric: bool,
        /// Check that a loop mod n stays a loop mod k·n.
        #[arg(long)]
        scale: Option<u64>,
    },
    /// Stern–Brocot letters with denominators mod n.
    Walk {
        value: String,
        #[arg(long = "mod")]
        modulus: u64,
        #[arg(long, default_value_t = 20)]
        depth: usize,
    },
    /// Which moduli admit an infinite loop.
    LoopExists {
        #[arg(long)]
        n_range: Option<String>,
    },
    LoopExample {
        #[arg(long = "mod")]
        modulus: u64,
    },
    /// Farey subdivision of [0, 1] until every pair is a Γ₀(n) edge.
    GammaPath {
        #[arg(long = "mod")]
        modulus: u64,
        #[arg(long, default_value_t = 8)]
        max_iter: usize,
        /// Print denominators mod n instead of vertices.
        #[arg(long)]
        denoms: bool,
        /// Only decide termination.
        #[arg(long)]
        decide: bool,
    },
    /// Cutting sequence, crossed edges and fans.
    Cutseq {
        value: String,
        #[arg(long, default_value_t = 24)]
        depth: usize,
    },
    /// `B(p^ℓ α)` for `ℓ ≤ L`.
    Spectrum {
        value: String,
        #[arg(short)]
        p: u64,
        #[arg(short = 'L')]
        l: Option<usize>,
    },
    /// Upper bound on `m_p(α)` from `ℓ ≤ L`.
    MpBound {
        value: String,
        #[arg(short)]
        p: u64,
        #[arg(short = 'L')]
        l: Option<usize>,
    },
    /// Least `ℓ ≤ L` with `p^ℓ α` not a loop mod `p^m`, for each `m`.
    Persistence {
        value: String,
        #[arg(short)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        m_max: u32,
        #[arg(short = 'L')]
        l: Option<usize>,
    },
    /// Batch checks over seeded populations.
    Verify {
        #[arg(value_enum)]
        check: Check,
        #[arg(long)]
        n_range: Option<String>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short = 'L')]
        l: Option<usize>,
        #[arg(long)]
        q_max: Option<u64>,
    },
}

/// Subcommands and the library operations each reaches.
pub const COMMAND_TABLE: &[(&str, &[&str])] = &[
    ("cf", &["cf_from_rational", "cf_of_surd", "multiply_cf", "shift_cf", "cf_eval"]),
    ("semiconv", &["convergent", "semiconvergent"]),
    ("loopcheck", &["is_infinite_loop", "is_infinite_loop_value", "loop_verdict_geometric", "loop_scaling_check"]),
    ("walk", &["sb_walk"]),
    ("loop-exists", &["loop_exists"]),
    ("loop-example", &["loop_example"]),
    ("gamma-path", &["v_algorithm", "d_algorithm", "nonterminating"]),
    ("cutseq", &["eta_inverse", "crossed_edges", "fans_of_edges", "eta"]),
    ("spectrum", &["height_spectrum"]),
    ("mp-bound", &["mp_upper_bound", "mp_partial_lower"]),
    ("persistence", &["persistence_scan"]),
    ("verify", &["run_scan", "check_noloop_bound", "check_infl", "check_pro2", "check_count_height", "check_defs", "check_thma", "check_dual_pushforward", "check_uplow"]),
];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] infloop::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Lib(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

/// Exit code for a verify run with violations.
pub const EXIT_VIOLATION: i32 = 1;

/// Accepts `[a0; a1, …]`, `p/q`, `(P+sqrt(D))/Q` or `sqrt(D)`.
pub fn parse_input(s: &str) -> Result<CFExpansion, CliError> {
    let s = s.trim();
    if s.starts_with('[') {
        return Ok(s.parse()?);
    }
    let v: Value = s.parse()?;
    if !v.is_positive() {
        return Err(CliError::Usage(format!("{s} is not positive")));
    }
    Ok(match v {
        Value::Rational(r) => cf_from_rational(&r)?.0.with_tail_flag(true),
        Value::Surd(s) => cf_of_surd(&s)?,
    })
}

fn positive_modulus(n: u64) -> Result<u64, CliError> {
    if n < 2 {
        return Err(CliError::Usage(format!("modulus {n} < 2")));
    }
    Ok(n)
}

fn load_config(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::parse(&std::fs::read_to_string(path)?).map_err(CliError::Usage)?,
        None => Config::default(),
    };
    cfg.threads_from_env().map_err(CliError::Usage)?;
    if let Some(m) = cli.mode {
        cfg.mode = m;
    }
    if let Some(t) = cli.threads {
        cfg.set("threads", &t.to_string()).map_err(CliError::Usage)?;
    }
    Ok(cfg)
}

/// Runs one command, writing to `out`; returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut cfg = load_config(cli)?;
    let record = cfg.mode == OutputMode::Record;
    match &cli.command {
        Command::Cf { value, times, shift, eval } => {
            let mut e = parse_input(value)?;
            if let Some(n) = times {
                e = multiply_cf(&e, &BigInt::from(*n))?;
            }
            if let Some(k) = shift {
                e = shift_cf(&e, &BigInt::from(*k))?;
            }
            if let Some(d) = eval {
                writeln!(out, "{}", cf_eval(&e, *d)?)?;
                return Ok(0);
            }
            match e.value() {
                Value::Rational(r) if !r.is_infinite() => {
                    let (a, b) = cf_from_rational(&r)?;
                    let (a, b) = (a.with_tail_flag(true), b.with_tail_flag(true));
                    if record {
                        writeln!(out, "cf value={r} even={a} odd={b}")?;
                    } else {
                        writeln!(out, "{a}\n{b}")?;
                    }
                }
                v => {
                    if record {
                        writeln!(out, "cf value={v} expansion={e}")?;
                    } else {
                        writeln!(out, "{e}")?;
                    }
                }
            }
        }
        Command::Semiconv { value, k, m, depth } => {
            let e = parse_input(value)?;
            let last = e.last_index().unwrap_or(usize::MAX);
            let ks: Vec<usize> = match k {
                Some(k) => vec![*k],
                None => (0..*depth).take_while(|&k| k < last).collect(),
            };
            for k in ks {
                let a = e
                    .quotient(k + 1)
                    .ok_or_else(|| CliError::Usage(format!("{e} has no quotient at index {}", k + 1)))?;
                let conv = e.convergent(k as i64)?;
                let ms: Vec<BigInt> = match m {
                    Some(m) => vec![BigInt::from(*m)],
                    None => num_iter(&a),
                };
                let semis = ms
                    .iter()
                    .map(|m| e.semiconvergent(k, m).map(|s| format!("{m}:{s}")))
                    .collect::<Result<Vec<_>, _>>()?;
                writeln!(out, "k={k} p/q={conv} a={a} semi=[{}]", semis.join(" "))?;
            }
        }
        Command::Loopcheck { value, modulus, depth, geometric, scale } => {
            let n = positive_modulus(*modulus)?;
            let e = parse_input(value)?;
            let v = match e.value() {
                Value::Surd(s) => infloop::loops::is_infinite_loop_value(&Value::Surd(s), n, cfg.depth.max(10_000))?,
                Value::Rational(_) => is_infinite_loop(&e, n)?,
            };
            let mut parts = vec![if record { format!("loopcheck alpha={e} n={n} verdict={v}") } else { v.to_string() }];
            if *geometric {
                let g = loop_verdict_geometric(&e, n, depth.unwrap_or(cfg.depth))?;
                parts.push(format!("geometric={g}"));
            }
            if let Some(k) = scale {
                let ok = loop_scaling_check(&e, n, *k)?;
                parts.push(format!("scaling k={k} {}", if ok { "agrees" } else { "DIFFERS" }));
            }
            writeln!(out, "{}", parts.join(if record { " " } else { "\n" }))?;
        }
        Command::Walk { value, modulus, depth } => {
            let n = positive_modulus(*modulus)?;
            let e = parse_input(value)?;
            let steps: Vec<String> = sb_walk(&e, n, *depth)?.iter().map(|(c, q)| format!("{c}{q}")).collect();
            writeln!(out, "{}", steps.join(" "))?;
        }
        Command::LoopExists { n_range } => {
            if let Some(r) = n_range {
                cfg.n_range = parse_range(r).map_err(CliError::Usage)?;
            }
            for n in cfg.n_range().filter(|&n| n >= 2) {
                writeln!(out, "n={n} loop={}", loop_exists(n)? as u8)?;
            }
        }
        Command::LoopExample { modulus } => {
            let n = positive_modulus(*modulus)?;
            writeln!(out, "{}", loop_example(n)?)?;
        }
        Command::GammaPath { modulus, max_iter, denoms, decide } => {
            let n = positive_modulus(*modulus)?;
            if *decide {
                writeln!(out, "n={n} nonterminating={}", nonterminating(n)? as u8)?;
                return Ok(0);
            }
            let (text, done, iters) = if *denoms {
                let o = d_algorithm(n, *max_iter)?;
                (render_iterates("D", o.iterates()), o.is_terminated(), o.iterations())
            } else {
                let o = v_algorithm(n, *max_iter)?;
                (render_iterates("V", o.iterates()), o.is_terminated(), o.iterations())
            };
            out.write_all(text.as_bytes())?;
            let status = if done { "terminated" } else { "exceeded" };
            writeln!(out, "{status} after {iters} iterations")?;
        }
        Command::Cutseq { value, depth } => {
            let e = parse_input(value)?;
            let word = eta_inverse(&e);
            let edges = crossed_edges(&e, *depth);
            writeln!(out, "word = {word}")?;
            writeln!(out, "eta = {}", eta(&word)?)?;
            let es: Vec<String> = edges.iter().map(|x| x.to_string()).collect();
            writeln!(out, "edges = {}", es.join(" "))?;
            let fans: Vec<String> = fans_of_edges(&edges).iter().map(|(v, c)| format!("{v}:{c}")).collect();
            writeln!(out, "fans = {}", fans.join(" "))?;
        }
        Command::Spectrum { value, p, l } => {
            let e = parse_input(value)?;
            let s = height_spectrum(&e, *p, l.unwrap_or(cfg.l))?;
            writeln!(out, "{s}")?;
        }
        Command::MpBound { value, p, l } => {
            let e = parse_input(value)?;
            let l = l.unwrap_or(cfg.l);
            let ub = mp_upper_bound(&e, *p, l)?;
            let partial = mp_partial_lower(&e, *p, l)?;
            let note = if ub.rational { " (rational input)" } else { "" };
            writeln!(out, "upper bound: {}{note}", ub.bound)?;
            writeln!(out, "partial min 1/(B+2), not a bound: {partial}")?;
        }
        Command::Persistence { value, p, m_max, l } => {
            let e = parse_input(value)?;
            for (m, w) in persistence_scan(&e, *p, *m_max, l.unwrap_or(cfg.l))? {
                match w {
                    Some(ell) => writeln!(out, "m={m} witness l={ell}")?,
                    None => writeln!(out, "m={m} none")?,
                }
            }
        }
        Command::Verify { check, n_range, count, seed, l, q_max } => {
            if let Some(r) = n_range {
                cfg.n_range = parse_range(r).map_err(CliError::Usage)?;
            }
            if let Some(c) = count {
                cfg.set("count", &c.to_string()).map_err(CliError::Usage)?;
            }
            if let Some(s) = seed {
                cfg.seed = *s;
            }
            if let Some(l) = l {
                cfg.set("L", &l.to_string()).map_err(CliError::Usage)?;
            }
            if let Some(q) = q_max {
                cfg.set("q_max", &q.to_string()).map_err(CliError::Usage)?;
            }
            let report = verify(*check, &cfg);
            if record {
                for r in &report.records {
                    writeln!(out, "{r}")?;
                }
                writeln!(
                    out,
                    "summary check={} {} cases={} skipped={} violations={}",
                    report.check, report.params, report.cases, report.skipped, report.violations
                )?;
            } else {
                writeln!(out, "{report}")?;
            }
            if !report.passed() {
                return Ok(EXIT_VIOLATION);
            }
        }
    }
    Ok(0)
}

fn num_iter(a: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut m = BigInt::from(1);
    while &m <= a {
        out.push(m.clone());
        m += 1;
    }
    out
}
