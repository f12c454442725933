mod common;

use common::fixtures::{self, reference_pattern_fixture, reference_pattern_rows};
use polcomp_core::lexicon::Polarity;
use polcomp_core::patterns::{mine, report_text, report_tsv, Scp};
use polcomp_core::pos::CoarsePos;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// (slots as (tag, polarity), rhs, rate, support)
type ReportRow = (Vec<(String, Option<String>)>, String, String, usize);

/// Reads the TSV report back with plain string handling.
fn parse_report(text: &str) -> Vec<ReportRow> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lhs\trhs\tocc\tsupport"));
    lines
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            assert_eq!(cols.len(), 4, "{l}");
            let slots = cols[0]
                .split(" + ")
                .map(|s| match s.split_once(' ') {
                    Some((pol, pos)) => (pos.to_string(), Some(pol.to_string())),
                    None => (s.to_string(), None),
                })
                .collect();
            (slots, cols[1].to_string(), cols[2].to_string(), cols[3].parse().unwrap())
        })
        .collect()
}

fn render_expected(scps: &[Scp]) -> Vec<ReportRow> {
    scps.iter()
        .map(|s| {
            let slots = s
                .lhs
                .0
                .iter()
                .map(|sl| (sl.pos.as_str().to_string(), sl.polarity.map(|p| p.short().to_string())))
                .collect();
            let rate = format!("{:.2}", (s.matched as f64 / s.support as f64 * 100.0).round() / 100.0);
            (slots, s.rhs.short().to_string(), rate, s.support)
        })
        .collect()
}

#[test]
fn reference_pattern_fixture_yields_the_nine_rows() {
    let scps = mine(&reference_pattern_fixture(), 10, 0.5).unwrap();
    let expected = reference_pattern_rows();
    assert_eq!(scps.len(), 9);
    for (scp, (slots, rhs, support, matched)) in scps.iter().zip(&expected) {
        let got: Vec<(CoarsePos, Option<Polarity>)> = scp.lhs.0.iter().map(|s| (s.pos, s.polarity)).collect();
        assert_eq!(&got, slots);
        assert_eq!(scp.rhs, *rhs);
        assert_eq!((scp.support, scp.matched), (*support, *matched));
    }
    let rates: Vec<String> = scps.iter().map(|s| format!("{:.2}", s.occurrence_rate)).collect();
    assert_eq!(rates, ["0.76", "0.59", "0.53", "0.89", "0.91", "0.60", "0.52", "0.65", "0.82"]);
    let text = report_text(&scps);
    assert!(text.contains("neg adj + pos noun -> neg phrase"));
    assert!(text.contains("neg verb + det + pos noun -> neg phrase"));
}

#[test]
fn report_round_trips_through_independent_parser() {
    let scps = mine(&reference_pattern_fixture(), 1, 0.0).unwrap();
    assert_eq!(parse_report(&report_tsv(&scps)), render_expected(&scps));
    assert_eq!(parse_report(&report_tsv(&[])), vec![]);
}

#[test]
fn singleton_record() {
    let r = fixtures::phrase(
        &["nice".into(), "mess".into()],
        &[CoarsePos::Adj, CoarsePos::Noun],
        &[Some(0.5), Some(-0.5)],
        -0.2,
    );
    let scps = mine(&[r], 1, 0.5).unwrap();
    assert_eq!(scps.len(), 1);
    assert_eq!((scps[0].support, scps[0].occurrence_rate, scps[0].rhs), (1, 1.0, Polarity::Negative));
}

#[test]
fn mismatched_tag_count_is_rejected() {
    let mut r = fixtures::phrase(&["a".into(), "b".into()], &[CoarsePos::Adj, CoarsePos::Noun], &[Some(0.5), None], 0.1);
    r.pos_tags = Some(vec![CoarsePos::Adj]);
    assert!(mine(&[r], 1, 0.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_invariant(seed in any::<u64>()) {
        let mut recs = reference_pattern_fixture();
        let base = mine(&recs, 3, 0.5).unwrap();
        recs.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(mine(&recs, 3, 0.5).unwrap(), base);
    }

    #[test]
    fn raising_thresholds_never_adds(s1 in 1usize..40, ds in 0usize..40, r1 in 0.0f64..1.0, dr in 0.0f64..0.5) {
        let recs = reference_pattern_fixture();
        let loose = mine(&recs, s1, r1).unwrap();
        let strict = mine(&recs, s1 + ds, (r1 + dr).min(1.0)).unwrap();
        for s in &strict {
            prop_assert!(loose.contains(s));
        }
    }

    #[test]
    fn matched_counts_sum_to_support(seed in any::<u64>()) {
        // halve each group randomly so ties and flipped majorities occur
        let mut recs = reference_pattern_fixture();
        recs.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        recs.truncate(recs.len() / 2);
        let scps = mine(&recs, 1, 0.0).unwrap();
        for s in &scps {
            let both: usize = scps.iter().filter(|o| o.lhs == s.lhs).map(|o| o.matched).sum();
            let single = scps.iter().filter(|o| o.lhs == s.lhs).count() == 1;
            if single {
                prop_assert!(s.matched * 2 > s.support);
            } else {
                prop_assert_eq!(both, s.support);
            }
        }
    }
}
