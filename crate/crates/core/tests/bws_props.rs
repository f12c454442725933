mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::bws_sim::{self, response};
use polcomp_core::bws::{agreement, generate_tuples, score, BwsResponse};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn swapped(rs: &[BwsResponse]) -> Vec<BwsResponse> {
    rs.iter()
        .map(|r| BwsResponse {
            best: r.worst.clone(),
            worst: r.best.clone(),
            ..r.clone()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn design_is_balanced_and_distinct(n in 5usize..120, k in 1usize..10, seed in any::<u64>()) {
        let subsets = n * (n - 1) * (n - 2) * (n - 3) / 24;
        prop_assume!(subsets >= 4 * (k * n).div_ceil(4));
        let terms = bws_sim::terms(n);
        let tuples = generate_tuples(&terms, k, seed).unwrap();
        prop_assert_eq!(tuples.len(), (k * n).div_ceil(4));
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        let mut sets = BTreeSet::new();
        for t in &tuples {
            t.validate().unwrap();
            let set: BTreeSet<&String> = t.items.iter().collect();
            prop_assert!(sets.insert(set), "set-equal tuples");
            for it in &t.items {
                *counts.entry(it.as_str()).or_default() += 1;
            }
        }
        prop_assert_eq!(counts.len(), n);
        let max = *counts.values().max().unwrap();
        let min = *counts.values().min().unwrap();
        prop_assert!(max - min <= 1, "appearances span {min}..{max}");
        prop_assert!(min >= k && max <= k + 1);
    }

    #[test]
    fn design_is_deterministic(n in 10usize..60, k in 1usize..6, seed in any::<u64>()) {
        let terms = bws_sim::terms(n);
        prop_assert_eq!(generate_tuples(&terms, k, seed).unwrap(), generate_tuples(&terms, k, seed).unwrap());
    }

    #[test]
    fn best_minus_worst_sums_to_zero(n in 4usize..40, per in 1usize..6, seed in any::<u64>()) {
        let tuples = generate_tuples(&bws_sim::terms(n.max(5)), 3, seed).unwrap();
        let rs = bws_sim::random_responses(&tuples, per, seed ^ 1);
        let table = score(&rs, &tuples).unwrap();
        let total: i64 = table.terms.values().map(|s| s.best as i64 - s.worst as i64).sum();
        prop_assert_eq!(total, 0);
    }

    #[test]
    fn score_ignores_response_order(seed in any::<u64>()) {
        let tuples = generate_tuples(&bws_sim::terms(30), 4, seed).unwrap();
        let rs = bws_sim::random_responses(&tuples, 3, seed);
        let mut shuffled = rs.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(9)));
        prop_assert_eq!(score(&rs, &tuples).unwrap(), score(&shuffled, &tuples).unwrap());
    }

    #[test]
    fn swapping_best_and_worst_negates(seed in any::<u64>()) {
        let tuples = generate_tuples(&bws_sim::terms(24), 4, seed).unwrap();
        let rs = bws_sim::random_responses(&tuples, 2, seed);
        let a = score(&rs, &tuples).unwrap();
        let b = score(&swapped(&rs), &tuples).unwrap();
        for (term, s) in &a.terms {
            prop_assert_eq!(b.terms[term].score, -s.score);
        }
    }
}

#[test]
fn scores_match_independent_tally_on_ten_thousand_responses() {
    let tuples = generate_tuples(&bws_sim::terms(1250), 8, 3).unwrap();
    let rs = bws_sim::random_responses(&tuples, 4, 11);
    assert_eq!(rs.len(), 10_000);
    let table = score(&rs, &tuples).unwrap();
    let oracle = bws_sim::tally(&rs, &tuples);
    assert_eq!(table.len(), oracle.len());
    for (term, (b, w, n)) in oracle {
        let s = table.get(&term).unwrap();
        assert_eq!((s.best as i64, s.worst as i64, s.appearances as i64), (b, w, n));
        assert_eq!(s.score, (b - w) as f64 / n as f64);
    }
}

#[test]
fn planted_order_is_recovered_and_matches_tally() {
    let terms = bws_sim::terms(40);
    let tuples = generate_tuples(&terms, 13, 5).unwrap();
    assert_eq!(tuples.len(), 130);
    let value: BTreeMap<String, f64> = terms.iter().enumerate().map(|(i, t)| (t.clone(), i as f64)).collect();
    let rs = bws_sim::planted_responses(&tuples, &value, 4, 3.0, 17);
    assert_eq!(rs.len(), 520);
    let table = score(&rs[..500], &tuples).unwrap();
    let oracle = bws_sim::tally(&rs[..500], &tuples);
    let mut by_oracle: Vec<(String, f64)> = oracle
        .iter()
        .map(|(t, (b, w, n))| (t.clone(), (b - w) as f64 / *n as f64))
        .collect();
    by_oracle.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let ranked: Vec<&str> = table.ranked().into_iter().map(|(t, _)| t).collect();
    let expected: Vec<&str> = by_oracle.iter().map(|(t, _)| t.as_str()).collect();
    assert_eq!(ranked, expected);
    // strong signal: the extremes of the planted order survive the noise
    assert_eq!(ranked[0], "term0039");
    assert_eq!(*ranked.last().unwrap(), "term0000");
}

#[test]
fn impossible_design_is_rejected() {
    assert!(generate_tuples(&bws_sim::terms(4), 2, 0).is_err());
    assert!(generate_tuples(&bws_sim::terms(5), 8, 0).is_err());
}

#[test]
fn always_best_scores_one() {
    let tuples = generate_tuples(&bws_sim::terms(16), 8, 1).unwrap();
    let star = "term0003";
    let mut rs = Vec::new();
    for t in &tuples {
        for a in 0..8 {
            let others: Vec<&String> = t.items.iter().filter(|i| *i != star).collect();
            let best = if t.contains(star) { star } else { others[0].as_str() };
            let worst = others.last().unwrap().as_str();
            rs.push(response(t, &format!("a{a}"), best, worst));
        }
    }
    assert_eq!(score(&rs, &tuples).unwrap().get(star).unwrap().score, 1.0);
}

#[test]
fn simulated_disagreement_rate_is_recovered() {
    let tuples = generate_tuples(&bws_sim::terms(1000), 4, 21).unwrap();
    assert_eq!(tuples.len(), 1000);
    let rs = bws_sim::deviating_responses(&tuples, 8, 0.2, 99);
    let a = agreement(&rs, &tuples).unwrap();
    assert!((a - 0.80).abs() <= 0.02, "agreement {a}");
}
