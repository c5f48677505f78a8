mod common;

use common::{cf, finite_cf, periodic_cf, rational_cf, unit_rational};
use infloop::contfrac::{cf_from_rational, multiply_cf, CFExpansion};
use infloop::cutting_seq::{crossed_edges, crosses_edge, eta, eta_inverse, loop_verdict_geometric, CuttingWord, Letter};
use infloop::farey_core::Rational;
use infloop::loops::is_infinite_loop;
use infloop::plc_verify::check_thma;
use num_bigint::BigInt;
use proptest::prelude::*;
use std::collections::HashSet;

fn semis_and_convergents(e: &CFExpansion, depth: usize) -> (HashSet<Rational>, HashSet<Rational>) {
    let mut convs: HashSet<Rational> = e.convergents().take(depth).map(|c| c.value()).collect();
    convs.insert(Rational::infinity());
    let mut semis = convs.clone();
    for c in e.convergents().take(depth) {
        let Some(a) = e.quotient(c.k + 1) else { break };
        let mut m = BigInt::from(1);
        while m <= a {
            semis.insert(e.semiconvergent(c.k, &m).unwrap());
            m += 1;
        }
    }
    for m in 1..=e.a0().try_into().unwrap_or(0u32) {
        semis.insert(Rational::integer(m));
    }
    (convs, semis)
}

#[test]
fn word_display() {
    let w = CuttingWord::finite(vec![(Letter::R, BigInt::from(2)), (Letter::L, BigInt::from(3))]).unwrap();
    assert_eq!(w.to_string(), "R^2 L^3");
    assert_eq!(eta(&w).unwrap(), cf("[0; 2, 3]"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn crossed_edges_are_crossed(e in prop_oneof![finite_cf(8, 12), periodic_cf(12)]) {
        prop_assume!(e.value().is_positive());
        let alpha = e.value();
        let edges = crossed_edges(&e, 300);
        for edge in &edges[1..] {
            prop_assert!(crosses_edge(&alpha, edge).unwrap(), "{} {}", e, edge);
        }
    }

    #[test]
    fn edge_endpoints_are_convergent_and_semiconvergent(e in prop_oneof![finite_cf(8, 12), periodic_cf(12)]) {
        let (convs, semis) = semis_and_convergents(&e, 400);
        for edge in &crossed_edges(&e, 300)[1..] {
            let ok = (convs.contains(&edge.a) && semis.contains(&edge.b)) || (convs.contains(&edge.b) && semis.contains(&edge.a));
            prop_assert!(ok, "{} {}", e, edge);
        }
    }

    #[test]
    fn eta_inverts(e in prop_oneof![periodic_cf(20), finite_cf(8, 20)]) {
        let back = eta(&eta_inverse(&e)).unwrap();
        if e.is_periodic() {
            prop_assert_eq!(back, e);
        } else {
            let e = e.with_tail_flag(false);
            prop_assert!(back == e || Some(back.clone()) == e.twin(), "{} {}", e, back);
        }
    }

    #[test]
    fn fans_reproduce_quotients(e in prop_oneof![rational_cf(8, 12), periodic_cf(12)]) {
        let r = check_thma(&e, 400).unwrap();
        prop_assert!(r.pass, "{}", r);
    }

    #[test]
    fn scaled_words_match_scaled_values(e in prop_oneof![rational_cf(6, 9), periodic_cf(9)], n in 2u32..=10) {
        let m = multiply_cf(&e, &BigInt::from(n)).unwrap();
        prop_assume!(m.is_periodic() || m.last_index().is_some_and(|k| k >= 1));
        let r = check_thma(&m, 600).unwrap();
        prop_assert!(r.pass, "{}", r);
    }

    #[test]
    fn geometric_matches_residue_decision(x in unit_rational(300), n in 2u64..20) {
        let (a, _) = cf_from_rational(&x).unwrap();
        prop_assert!(a.has_infinity_tail());
        let g = loop_verdict_geometric(&a, n, 100_000).unwrap();
        let c = is_infinite_loop(&a, n).unwrap();
        prop_assert_eq!(g.is_loop(), c.is_loop());
        prop_assert_eq!(g.is_not_loop(), c.is_not_loop());
    }

    #[test]
    fn geometric_never_contradicts_on_periodic(e in periodic_cf(12), n in 2u64..16) {
        let g = loop_verdict_geometric(&e, n, 5_000).unwrap();
        let c = is_infinite_loop(&e, n).unwrap();
        prop_assert!(!(g.is_loop() && c.is_not_loop()) && !(g.is_not_loop() && c.is_loop()));
        if c.is_not_loop() {
            prop_assert_eq!(g.witness().map(|w| w.value.clone()), c.witness().map(|w| w.value.clone()));
        }
    }
}
