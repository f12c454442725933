use polcomp_core::lexicon::{LexiconEntry, PhraseRecord, Polarity, Term, Token};
use polcomp_core::pos::CoarsePos;

/// (lhs slots as (pos, polarity), phrase polarity, support, matched)
pub type PatternRow = (Vec<(CoarsePos, Option<Polarity>)>, Polarity, usize, usize);

use CoarsePos::*;
use Polarity::*;

/// The nine reference composition patterns with their supports; matched
/// counts are `round(rate * support)`.
pub fn reference_pattern_rows() -> Vec<PatternRow> {
    vec![
        (vec![(Adj, Some(Negative)), (Adj, Some(Positive))], Positive, 17, 13),
        (vec![(Adj, Some(Negative)), (Noun, Some(Positive))], Negative, 68, 40),
        (vec![(Adj, Some(Positive)), (Noun, Some(Negative))], Negative, 73, 39),
        (vec![(Adverb, Some(Positive)), (Adj, Some(Negative))], Negative, 18, 16),
        (vec![(Adverb, Some(Positive)), (Verb, Some(Negative))], Negative, 11, 10),
        (vec![(Noun, Some(Negative)), (Noun, Some(Positive))], Positive, 10, 6),
        (vec![(Noun, Some(Positive)), (Noun, Some(Negative))], Negative, 25, 13),
        (vec![(Verb, Some(Negative)), (Det, None), (Noun, Some(Positive))], Negative, 17, 11),
        (vec![(Verb, Some(Negative)), (Noun, Some(Positive))], Negative, 17, 14),
    ]
}

/// Groups below the support threshold of ten.
pub fn distractor_rows() -> Vec<PatternRow> {
    vec![
        (vec![(Verb, Some(Positive)), (Noun, Some(Negative))], Positive, 9, 7),
        (vec![(Adj, Some(Positive)), (Adj, Some(Negative))], Negative, 4, 2),
        (vec![(Noun, Some(Negative)), (Other, None), (Verb, Some(Positive))], Negative, 6, 5),
    ]
}

pub fn phrase(words: &[String], tags: &[CoarsePos], constituents: &[Option<f64>], score: f64) -> PhraseRecord {
    let term = Term::new(words.iter().map(|w| Token::new(w).unwrap()).collect()).unwrap();
    PhraseRecord {
        entry: LexiconEntry::new(term, score).unwrap(),
        pos_tags: Some(tags.to_vec()),
        constituent_scores: constituents.to_vec(),
    }
}

/// Records realizing `rows`: each row yields `matched` phrases of its polarity
/// and `support - matched` of the opposite polarity.
pub fn records_for(rows: &[PatternRow]) -> Vec<PhraseRecord> {
    let mut out = Vec::new();
    let mut id = 0usize;
    for (slots, rhs, support, matched) in rows {
        for k in 0..*support {
            id += 1;
            let words: Vec<String> = (0..slots.len()).map(|p| format!("w{id}x{p}")).collect();
            let tags: Vec<CoarsePos> = slots.iter().map(|s| s.0).collect();
            let scores: Vec<Option<f64>> = slots
                .iter()
                .map(|s| s.1.map(|p| p.sign() * 0.5))
                .collect();
            let polarity = if k < *matched { *rhs } else { opposite(*rhs) };
            let score = if polarity == Positive { 0.4 } else { -0.4 };
            out.push(phrase(&words, &tags, &scores, score));
        }
    }
    out
}

pub fn opposite(p: Polarity) -> Polarity {
    match p {
        Positive => Negative,
        Negative => Positive,
    }
}

pub fn reference_pattern_fixture() -> Vec<PhraseRecord> {
    let mut rows = reference_pattern_rows();
    rows.extend(distractor_rows());
    records_for(&rows)
}
