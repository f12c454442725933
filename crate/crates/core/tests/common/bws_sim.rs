//! Synthetic annotation campaigns and an independent tally.

use std::collections::BTreeMap;

use chrono::{TimeZone, Utc};
use polcomp_core::bws::{BwsResponse, BwsTuple};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn terms(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("term{i:04}")).collect()
}

pub fn response(tuple: &BwsTuple, annotator: &str, best: &str, worst: &str) -> BwsResponse {
    BwsResponse {
        tuple_id: tuple.id.clone(),
        annotator: annotator.to_string(),
        best: best.to_string(),
        worst: worst.to_string(),
        timestamp: Utc.timestamp_opt(1_700_000_000, 0).unwrap(),
    }
}

/// Random valid responses, `per_tuple` per tuple.
pub fn random_responses(tuples: &[BwsTuple], per_tuple: usize, seed: u64) -> Vec<BwsResponse> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for t in tuples {
        for a in 0..per_tuple {
            let mut idx = [0usize, 1, 2, 3];
            idx.shuffle(&mut rng);
            out.push(response(t, &format!("a{a}"), &t.items[idx[0]], &t.items[idx[1]]));
        }
    }
    out
}

/// Responses following a latent value per term plus Gaussian-like noise.
pub fn planted_responses(tuples: &[BwsTuple], value: &BTreeMap<String, f64>, per_tuple: usize, noise: f64, seed: u64) -> Vec<BwsResponse> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for t in tuples {
        for a in 0..per_tuple {
            let mut noisy: Vec<(f64, &String)> = t
                .items
                .iter()
                .map(|it| (value[it] + noise * (rng.random::<f64>() - 0.5), it))
                .collect();
            noisy.sort_by(|x, y| x.0.total_cmp(&y.0));
            out.push(response(t, &format!("a{a}"), noisy[3].1, noisy[0].1));
        }
    }
    out
}

/// Campaign where the answers deviate from a true (best, worst) with
/// probability `rate` per slot; deviants pick one of the two middle items.
pub fn deviating_responses(tuples: &[BwsTuple], annotators: usize, rate: f64, seed: u64) -> Vec<BwsResponse> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for t in tuples {
        for a in 0..annotators {
            let mut best = 0usize;
            let mut worst = 3usize;
            if rng.random_bool(rate) {
                best = rng.random_range(1..3);
            }
            if rng.random_bool(rate) {
                worst = rng.random_range(1..3);
                if worst == best {
                    worst = 3 - best;
                }
            }
            out.push(response(t, &format!("a{a}"), &t.items[best], &t.items[worst]));
        }
    }
    out
}

/// (best, worst, appearances) per term, counted directly.
pub fn tally(responses: &[BwsResponse], tuples: &[BwsTuple]) -> BTreeMap<String, (i64, i64, i64)> {
    let items: BTreeMap<&str, &[String; 4]> = tuples.iter().map(|t| (t.id.as_str(), &t.items)).collect();
    let mut out: BTreeMap<String, (i64, i64, i64)> = BTreeMap::new();
    for r in responses {
        for it in items[r.tuple_id.as_str()].iter() {
            out.entry(it.clone()).or_default().2 += 1;
        }
        out.get_mut(&r.best).unwrap().0 += 1;
        out.get_mut(&r.worst).unwrap().1 += 1;
    }
    out
}
