mod common;

use common::*;
use cover_spectra::covers::{count_embeddings, realize, sample, BGraph, ModelKind, ModelSpec};
use cover_spectra::expectations::*;
use cover_spectra::graph::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn single_edge() -> BGraph {
    let base = path(2);
    lift(&base, &[0, 1], &[(0, 1, 0)])
}

fn two_cycle_over_loop(base: &Graph, e: usize) -> BGraph {
    lift(base, &[0, 0], &[(0, 1, e), (1, 0, e)])
}

/// Two vertices joined by a 2-cycle over each loop of the figure-eight.
fn double_two_cycle() -> BGraph {
    let base = figure_eight();
    lift(&base, &[0, 0], &[(0, 1, 0), (1, 0, 0), (0, 1, 2), (1, 0, 2)])
}

#[test]
fn closed_form_examples() {
    for n in [1, 2, 5, 9] {
        assert_eq!(expected_count(&single_edge(), n, ModelKind::Permutation).unwrap(), q(n as i64, 1));
    }
    let c2 = two_cycle_over_loop(&bouquet(1, 0), 0);
    assert_eq!(expected_count(&c2, 3, ModelKind::Permutation).unwrap(), q(1, 1));
    assert_eq!(expected_count(&c2, 1, ModelKind::Permutation).unwrap(), q(0, 1));
    // a 2-cycle never occurs in an n-cycle for n > 2
    assert_eq!(expected_count(&c2, 5, ModelKind::Cyclic).unwrap(), q(0, 1));
    // ...but is the whole cycle when n = 2
    assert_eq!(expected_count(&c2, 2, ModelKind::Cyclic).unwrap(), q(2, 1));

    let hl = bouquet(0, 1);
    let fixed = lift(&hl, &[0], &[(0, 0, 0)]);
    assert_eq!(expected_count(&fixed, 5, ModelKind::PermInvolutionOdd).unwrap(), q(1, 1));
    assert_eq!(expected_count(&fixed, 4, ModelKind::PermInvolutionEven).unwrap(), q(0, 1));
    let pair = lift(&hl, &[0, 0], &[(0, 1, 0)]);
    assert_eq!(expected_count(&pair, 4, ModelKind::PermInvolutionEven).unwrap(), q(4, 1));
    assert_eq!(expected_count(&pair, 5, ModelKind::PermInvolutionOdd).unwrap(), q(4, 1));

    assert_eq!(expected_count(&double_two_cycle(), 6, ModelKind::Permutation).unwrap(), q(1, 30));
}

#[test]
fn closed_form_matches_brute_average_on_small_cases() {
    let c2 = two_cycle_over_loop(&bouquet(1, 0), 0);
    let covers = all_covers(&bouquet(1, 0), 3, ModelKind::Permutation);
    assert_eq!(covers.len(), 6);
    let avg = exhaustive_average(std::slice::from_ref(&c2), &covers);
    assert_eq!(avg[0], q(1, 1));
}

#[test]
fn model_mismatch_is_an_error() {
    let hl = bouquet(0, 1);
    let fixed = lift(&hl, &[0], &[(0, 0, 0)]);
    assert!(expected_count(&fixed, 5, ModelKind::Permutation).is_err());
    assert!(expected_count(&fixed, 4, ModelKind::PermInvolutionOdd).is_err());
}

#[test]
fn non_etale_patterns_have_zero_expectation() {
    let base = bouquet(1, 0);
    // two edges leaving vertex 0 over the same directed base edge
    let s = lift(&base, &[0, 0, 0], &[(0, 1, 0), (0, 2, 0)]);
    assert_eq!(expected_count(&s, 6, ModelKind::Permutation).unwrap(), BigRational::zero());
    assert!(expansion_series(&s, ModelKind::Permutation, 3).is_err());
    let mc = monte_carlo_expected_count(&s, 6, &ModelSpec::new(ModelKind::Permutation, 4), 500).unwrap();
    assert_eq!((mc.mean, mc.stderr), (0.0, 0.0));
}

#[test]
fn series_examples() {
    let s = expansion_series(&single_edge(), ModelKind::Permutation, 4).unwrap();
    assert_eq!(s.leading_power, 1);
    assert_eq!(s.coeffs, vec![q(1, 1), q(0, 1), q(0, 1), q(0, 1)]);

    // 1/(n(n-1)) = n^-2 (1 + x + x^2 + ...)
    let s = expansion_series(&double_two_cycle(), ModelKind::Permutation, 5).unwrap();
    assert_eq!(s.leading_power, -2);
    assert!(s.coeffs.iter().all(|c| *c == q(1, 1)));

    // two disjoint edges over one base edge: n(n-1) = n^2 (1 - x)
    let base = path(2);
    let two = lift(&base, &[0, 0, 1, 1], &[(0, 2, 0), (1, 3, 0)]);
    let s = expansion_series(&two, ModelKind::Permutation, 3).unwrap();
    assert_eq!(s.leading_power, 2);
    assert_eq!(s.coeffs, vec![q(1, 1), q(-1, 1), q(0, 1)]);
    assert_eq!(s.evaluate_exact(7), expected_count(&two, 7, ModelKind::Permutation).unwrap());

    let c2 = two_cycle_over_loop(&bouquet(1, 0), 0);
    assert!(expansion_series(&c2, ModelKind::Cyclic, 3).is_err());
}

#[test]
fn monte_carlo_examples() {
    let spec = ModelSpec::new(ModelKind::Permutation, 11);
    let mc = monte_carlo_expected_count(&single_edge(), 10, &spec, 300).unwrap();
    assert_eq!((mc.mean, mc.stderr, mc.trials), (10.0, 0.0, 300));

    assert!(monte_carlo_expected_count(&single_edge(), 10, &spec, 0).is_err());

    let c2 = two_cycle_over_loop(&bouquet(1, 0), 0);
    let mc = monte_carlo_expected_count(&c2, 3, &spec, 100_000).unwrap();
    assert!(mc.z_score(1.0).abs() < 4.0, "{mc:?}");

    // 2-cycles are impossible in the cyclic model
    let mc = monte_carlo_expected_count(&c2, 8, &ModelSpec::new(ModelKind::Cyclic, 11), 20_000).unwrap();
    assert_eq!(mc.mean, 0.0);
}

#[test]
fn monte_carlo_uses_the_sampled_covers() {
    let base = figure_eight();
    let spec = ModelSpec::new(ModelKind::Permutation, 5);
    let s = double_two_cycle();
    let trials = 64;
    let mut sum = 0u64;
    for t in 0..trials {
        sum += count_embeddings(&s, &realize(&sample(&base, 5, &spec, t).unwrap())).unwrap();
    }
    let mc = monte_carlo_expected_count(&s, 5, &spec, trials).unwrap();
    assert_eq!(mc.mean, sum as f64 / trials as f64);
}

#[test]
fn enumeration_counts_and_ids() {
    let pats = enumerate_etale(&cycle(2), 6, true, true);
    // connected pruned étale graphs over the 2-cycle: cycles of length 2, 4, 6
    assert_eq!(pats.len(), 3);
    let all = enumerate_etale(&cycle(2), 6, true, false);
    // plus 2+2 and 2+2+2 and 2+4
    assert_eq!(all.len(), 6);
    let mut ids: Vec<String> = all.iter().map(pattern_id).collect();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), all.len());
    for s in &all {
        assert_eq!(prune(&s.total), s.total);
    }
}

/// Model, base and degrees small enough to enumerate every cover.
fn exhaustive_cases() -> Vec<(Graph, ModelKind, Vec<usize>)> {
    vec![
        (cycle(2), ModelKind::Permutation, vec![1, 2, 3, 4]),
        (bouquet(1, 0), ModelKind::Permutation, vec![1, 2, 3, 4, 5]),
        (bouquet(1, 0), ModelKind::Cyclic, vec![1, 2, 3, 4, 5]),
        (base_whole_and_half(), ModelKind::PermInvolutionEven, vec![2, 4]),
        (base_whole_and_half(), ModelKind::PermInvolutionOdd, vec![1, 3]),
        (base_whole_and_half(), ModelKind::CyclicInvolutionOdd, vec![1, 3, 5]),
        (bouquet(0, 2), ModelKind::CyclicInvolutionEven, vec![2, 4]),
    ]
}

#[test]
fn closed_form_equals_exhaustive_average() {
    for (base, kind, ns) in exhaustive_cases() {
        let mut pats = enumerate_etale(&base, 3, false, false);
        pats.extend(enumerate_etale(&base, 4, true, false).into_iter().filter(|s| s.total.num_edges() == 4));
        assert!(!pats.is_empty());
        for n in ns {
            let covers = all_covers(&base, n, kind);
            let avg = exhaustive_average(&pats, &covers);
            for (s, a) in pats.iter().zip(&avg) {
                let e = expected_count(s, n, kind).unwrap();
                assert_eq!(&e, a, "{kind} n={n} {}", pattern_id(s));
            }
        }
    }
}

#[test]
fn six_edge_patterns_over_two_cycle() {
    let base = cycle(2);
    let pats = enumerate_etale(&base, 6, true, false);
    for kind in [ModelKind::Permutation, ModelKind::Cyclic] {
        for n in [8, 12] {
            let spec = ModelSpec::new(kind, 2024 + n as u64);
            let mcs = monte_carlo_many(&pats, n, &spec, 40_000).unwrap();
            for (s, mc) in pats.iter().zip(mcs) {
                let e = expected_count(s, n, kind).unwrap().to_f64().unwrap();
                assert!(mc.z_score(e).abs() < 4.5, "{kind} n={n} {} {mc:?} exact {e}", pattern_id(s));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn long_series_tracks_exact_value(idx in 0usize..64, kind_i in 0usize..2, n in 200usize..2000) {
        let kind = [ModelKind::Permutation, ModelKind::Cyclic][kind_i];
        let pats = enumerate_etale(&figure_eight(), 4, true, false);
        let s = &pats[idx % pats.len()];
        let exact = expected_count(s, n, kind).unwrap();
        match expansion_series(s, kind, 12) {
            Ok(ser) => {
                let approx = ser.evaluate_exact(n);
                let rel = ((approx - &exact) / &exact).to_f64().unwrap().abs();
                prop_assert!(rel < 1e-12, "{} rel {rel}", pattern_id(s));
            }
            Err(_) => prop_assert!(exact.is_zero()),
        }
    }

    #[test]
    fn leading_power_is_minus_order(idx in 0usize..200) {
        let pats = enumerate_etale(&base_whole_and_half(), 5, true, false);
        let s = &pats[idx % pats.len()];
        for kind in [ModelKind::PermInvolutionEven, ModelKind::PermInvolutionOdd] {
            if let Ok(ser) = expansion_series(s, kind, 2) {
                prop_assert_eq!(ser.leading_power, -stats(&s.total).order);
            }
        }
    }
}
