use infloop::contfrac::{cf_from_rational, CFExpansion};
use infloop::loops::is_infinite_loop;
use infloop::plc_verify::{
    check_count_height, check_defs, check_dual_pushforward, check_infl, check_noloop_bound, check_pro2, check_thma,
    check_uplow, planted_pro2, random_finite, random_periodic, run_scan, ScanReport,
};
use infloop::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Config;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Check {
    Noloop,
    Infl,
    Pro2,
    CountHeight,
    DefsEquivalence,
    Thma,
    DualPushforward,
    Uplow,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Noloop => "noloop",
            Check::Infl => "infl",
            Check::Pro2 => "pro2",
            Check::CountHeight => "count-height",
            Check::DefsEquivalence => "defs-equivalence",
            Check::Thma => "thma",
            Check::DualPushforward => "dual-pushforward",
            Check::Uplow => "uplow",
        }
    }
}

/// `n = p^m` with `p` prime and `m ≥ 1`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d)).unwrap();
    let mut m = 0;
    let mut r = n;
    while r.is_multiple_of(p) {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

fn rng_for(cfg: &Config, n: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ (n << 8))
}

fn random_rational<R: Rng>(rng: &mut R, q_max: u64) -> CFExpansion {
    let q = rng.gen_range(1..=q_max);
    let p = rng.gen_range(1..=3 * q);
    cf_from_rational(&Rational::new(p, q).unwrap()).unwrap().0.with_tail_flag(true)
}

/// Runs one batch check over the configured moduli and seeded inputs.
pub fn verify(check: Check, cfg: &Config) -> ScanReport {
    let moduli: Vec<u64> = cfg.n_range().filter(|&n| n >= 2).collect();
    let params = format!("n={}..{} count={} seed={}", cfg.n_range.0, cfg.n_range.1, cfg.count, cfg.seed);
    let name = check.name();
    let cases: Vec<(CFExpansion, u64, usize)> = match check {
        Check::Noloop => moduli
            .iter()
            .flat_map(|&n| {
                let mut rng = rng_for(cfg, n);
                (0..cfg.count).map(move |_| (random_periodic(&mut rng, n + 2), n, 0))
            })
            .collect(),
        Check::Infl | Check::CountHeight => moduli
            .iter()
            .filter(|&&n| prime_power(n).is_some())
            .flat_map(|&n| {
                let mut rng = rng_for(cfg, n);
                let loops_only = check == Check::CountHeight;
                let mut out = Vec::new();
                for _ in 0..cfg.count * if loops_only { 200 } else { 1 } {
                    let e = random_periodic(&mut rng, n + 2);
                    if !loops_only || is_infinite_loop(&e, n).map(|v| v.is_loop()).unwrap_or(false) {
                        out.push((e, n, 0));
                    }
                    if out.len() == cfg.count {
                        break;
                    }
                }
                out
            })
            .collect(),
        Check::Pro2 => moduli
            .iter()
            .flat_map(|&n| {
                let mut rng = rng_for(cfg, n);
                (0..cfg.count).map(move |_| {
                    let (e, k) = planted_pro2(&mut rng, n, n + 2);
                    (e, n, k)
                })
            })
            .collect(),
        Check::DefsEquivalence => moduli
            .iter()
            .flat_map(|&n| {
                let mut rng = rng_for(cfg, n);
                (0..cfg.count)
                    .map(move |i| {
                        let e = if i % 2 == 0 { random_rational(&mut rng, cfg.q_max) } else { random_periodic(&mut rng, n + 2) };
                        (e, n, 0)
                    })
                    .collect::<Vec<_>>()
            })
            .collect(),
        Check::Thma | Check::Uplow => {
            let mut rng = rng_for(cfg, 0);
            (0..cfg.count)
                .map(|i| {
                    let e = match (check, i % 2) {
                        (Check::Thma, 1) => random_periodic(&mut rng, 9),
                        _ => random_finite(&mut rng, 2, 8, 12),
                    };
                    (e, 0, 0)
                })
                .collect()
        }
        Check::DualPushforward => moduli
            .iter()
            .flat_map(|&n| {
                let mut rng = rng_for(cfg, n);
                (0..cfg.count).map(move |_| (random_finite(&mut rng, 1, 8, 12), n, 0))
            })
            .collect(),
    };
    let l = cfg.l;
    let depth = cfg.depth;
    run_scan(name, &params, &cases, cfg.threads, |(e, n, k)| match check {
        Check::Noloop => check_noloop_bound(e, *n),
        Check::Infl => {
            let (p, m) = prime_power(*n).unwrap();
            check_infl(e, p, m)
        }
        Check::Pro2 => check_pro2(e, *n, *k),
        Check::CountHeight => {
            let (p, m) = prime_power(*n).unwrap();
            check_count_height(e, p, m, l, 3 * l).map(|(r, _)| r)
        }
        Check::DefsEquivalence => check_defs(e, *n, depth),
        Check::Thma => check_thma(e, 64),
        Check::DualPushforward => check_dual_pushforward(e, *n),
        Check::Uplow => check_uplow(e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(25), Some((5, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn seeded_scans_repeat() {
        let cfg = Config { n_range: (5, 7), count: 20, threads: 3, ..Config::default() };
        let a = verify(Check::Noloop, &cfg);
        let b = verify(Check::Noloop, &Config { threads: 1, ..cfg });
        assert_eq!(a.records, b.records);
        assert!(a.passed());
    }
}
