mod common;

use common::{cf, periodic_cf, unit_rational};
use infloop::contfrac::{cf_from_rational, CFExpansion, Convergents, Value};
use infloop::farey_core::Rational;
use infloop::loops::{
    is_infinite_loop, is_infinite_loop_stream, is_infinite_loop_surd, loop_example, loop_exists, loop_scaling_check,
    sb_walk, LoopVerdict,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Brute force over small integers: every semi-convergent denominator of both
/// expansions of `p/q`, with the tail fan around `p/q` enumerated for `m ≤ n`.
fn rational_oracle(p: i64, q: i64, n: i64) -> bool {
    let mut quotients = Vec::new();
    let (mut a, mut b) = (p, q);
    while b != 0 {
        quotients.push(a.div_euclid(b));
        (a, b) = (b, a.rem_euclid(b));
    }
    let mut twin = quotients.clone();
    let last = twin.pop().unwrap();
    if twin.is_empty() || last > 1 {
        twin.extend([last - 1, 1]);
    } else {
        *twin.last_mut().unwrap() += 1;
    }
    for qs in [quotients, twin] {
        let (mut q0, mut q1) = (0i64, 1i64);
        for &a in &qs[1..] {
            for m in 1..=a {
                if (m * q1 + q0) % n == 0 {
                    return false;
                }
            }
            (q0, q1) = (q1, a * q1 + q0);
        }
        if (1..=n).any(|m| (m * q1 + q0) % n == 0) {
            return false;
        }
    }
    true
}

#[test]
fn rationals_match_brute_force() {
    for q in 2..=120i64 {
        for p in 1..q {
            if p.gcd(&q) != 1 {
                continue;
            }
            let e = cf_from_rational(&Rational::new(p, q).unwrap()).unwrap().0;
            for n in 2..=12 {
                let v = is_infinite_loop(&e, n as u64).unwrap();
                assert_eq!(v.is_loop(), rational_oracle(p, q, n), "{p}/{q} mod {n}: {v}");
            }
        }
    }
}

#[test]
fn sb_walk_zero_iff_not_loop() {
    for q in 2..=60u64 {
        for p in 1..q {
            if p.gcd(&q) != 1 {
                continue;
            }
            let e = cf_from_rational(&Rational::new(p, q).unwrap()).unwrap().0;
            for n in 2..=8 {
                let walk = sb_walk(&e, n, (q + 2 * n) as usize).unwrap();
                let hit = walk.iter().any(|&(_, res)| res == 0);
                assert_eq!(hit, is_infinite_loop(&e, n).unwrap().is_not_loop(), "{p}/{q} mod {n}");
            }
        }
    }
}

#[test]
fn loops_survive_scaling() {
    for n in 4..=40 {
        let e = loop_example(n).unwrap();
        for k in 1..=5 {
            assert!(loop_scaling_check(&e, n, k).unwrap(), "{e} mod {n} x{k}");
        }
    }
    assert!(loop_scaling_check(&cf("[0; 2, oo]"), 5, 2).is_err());
}

#[test]
fn existence_exactly_above_three() {
    for n in 2..=100 {
        assert_eq!(loop_exists(n).unwrap(), n > 3, "n={n}");
    }
    assert_eq!(loop_example(4).unwrap(), cf("[0; 2, oo]"));
    assert!(loop_example(3).is_err());
}

#[test]
fn periodic_agrees_with_deep_stream() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let e = infloop::plc_verify::random_periodic(&mut rng, 12);
        for n in [4u64, 5, 6, 8, 9, 12] {
            let exact = is_infinite_loop(&e, n).unwrap();
            let deep = is_infinite_loop_stream(e.a0().clone(), e.quotients().skip(1), n, 10_000).unwrap();
            match &exact {
                LoopVerdict::IsLoop => assert_eq!(deep, LoopVerdict::UnknownAtDepth(10_000), "{e} mod {n}"),
                LoopVerdict::NotLoop(_) => assert_eq!(deep, exact, "{e} mod {n}"),
                LoopVerdict::UnknownAtDepth(_) => panic!("periodic input undecided"),
            }
        }
    }
}

fn first_hit(e: &CFExpansion, n: u64, quotients: usize) -> Option<BigInt> {
    let nb = BigInt::from(n);
    let qs: Vec<BigInt> = e.quotients().take(quotients).collect();
    for c in Convergents::new(qs.clone().into_iter()) {
        let Some(a) = qs.get(c.k + 1) else { break };
        let mut m = BigInt::from(1);
        while &m <= a {
            let d = &m * &c.q + &c.q_prev;
            if d.is_multiple_of(&nb) {
                return Some(d);
            }
            m += 1;
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn periodic_matches_materialized_denominators(e in periodic_cf(15), n in 2u64..16) {
        let v = is_infinite_loop(&e, n).unwrap();
        let hit = first_hit(&e, n, 400);
        match v {
            LoopVerdict::IsLoop => prop_assert!(hit.is_none()),
            LoopVerdict::NotLoop(w) => prop_assert_eq!(Some(w.value.den().clone()), hit),
            LoopVerdict::UnknownAtDepth(_) => prop_assert!(false),
        }
    }

    #[test]
    fn surd_stream_matches_periodic(e in periodic_cf(15), n in 2u64..16) {
        prop_assume!(e.value().is_positive());
        let Value::Surd(s) = e.value() else { unreachable!() };
        let a = is_infinite_loop(&e, n).unwrap();
        let b = is_infinite_loop_surd(&s, n, 100_000).unwrap();
        prop_assert_eq!(a.is_loop(), b.is_loop());
        prop_assert_eq!(a.witness().map(|w| w.value.clone()), b.witness().map(|w| w.value.clone()));
    }

    #[test]
    fn witness_denominator_divisible(x in unit_rational(400), n in 2u64..30) {
        let e = cf_from_rational(&x).unwrap().0;
        if let LoopVerdict::NotLoop(w) = is_infinite_loop(&e, n).unwrap() {
            prop_assert!((w.value.den() % n).is_zero());
            prop_assert!(w.value.den().to_u64().is_some());
        }
    }
}
