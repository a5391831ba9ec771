use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{macro_average, Counts, Prf};

/// Per-tag and averaged token-level scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TokenReport {
    pub per_tag: BTreeMap<String, Prf>,
    pub support: BTreeMap<String, u64>,
    /// Unweighted mean over the tags that occur in gold.
    pub macro_avg: Prf,
    /// Pooled counts; equals accuracy for single-label tokens.
    pub micro: Prf,
    pub accuracy: f64,
}

pub fn evaluate_tokens<S: AsRef<str>>(pred: &[S], gold: &[S]) -> Result<TokenReport> {
    if pred.len() != gold.len() {
        return Err(Error::InvalidInput(format!(
            "prediction has {} tokens, gold has {}",
            pred.len(),
            gold.len()
        )));
    }
    let mut counts: BTreeMap<&str, Counts> = BTreeMap::new();
    let mut correct = 0u64;
    for (p, g) in pred.iter().zip(gold) {
        let (p, g) = (p.as_ref(), g.as_ref());
        if p == g {
            correct += 1;
            counts.entry(g).or_default().tp += 1;
        } else {
            counts.entry(p).or_default().fp += 1;
            counts.entry(g).or_default().fn_ += 1;
        }
    }
    let gold_tags: BTreeSet<&str> = gold.iter().map(AsRef::as_ref).collect();
    let per_tag: BTreeMap<String, Prf> = counts
        .iter()
        .map(|(t, c)| (t.to_string(), c.prf()))
        .collect();
    let support = counts
        .iter()
        .map(|(t, c)| (t.to_string(), c.support()))
        .collect();
    let macro_avg = macro_average(gold_tags.iter().map(|t| &per_tag[*t]));
    let mut pooled = Counts::default();
    counts.values().for_each(|c| pooled += *c);
    let accuracy = if gold.is_empty() {
        0.0
    } else {
        correct as f64 / gold.len() as f64
    };
    Ok(TokenReport {
        per_tag,
        support,
        macro_avg,
        micro: pooled.prf(),
        accuracy,
    })
}

/// Entity span over token positions `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub class: String,
}

/// Decode BIO labels into spans. A stray `I-X` (not continuing an open
/// `X` span) starts a new span; the second value counts such repairs.
pub fn bio_spans<S: AsRef<str>>(labels: &[S]) -> (Vec<Span>, usize) {
    let mut spans = Vec::new();
    let mut open: Option<Span> = None;
    let mut repaired = 0;
    for (i, label) in labels.iter().enumerate() {
        let label = label.as_ref();
        let (prefix, class) = match label.split_once('-') {
            Some((p @ ("B" | "I"), c)) => (p, c),
            _ => ("O", ""),
        };
        match prefix {
            "I" if open.as_ref().is_some_and(|s| s.class == class) => {
                if let Some(s) = open.as_mut() {
                    s.end = i + 1;
                }
            }
            "B" | "I" => {
                if prefix == "I" {
                    repaired += 1;
                }
                spans.extend(open.take());
                open = Some(Span {
                    start: i,
                    end: i + 1,
                    class: class.to_string(),
                });
            }
            _ => spans.extend(open.take()),
        }
    }
    spans.extend(open);
    (spans, repaired)
}

/// Exact-match span scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanReport {
    pub per_class: BTreeMap<String, Prf>,
    pub micro: Prf,
    /// Set when neither side has any span; all scores are then 0.
    pub no_spans: bool,
    /// Stray `I-` labels repaired in prediction and gold combined.
    pub repaired: usize,
}

pub fn evaluate_spans<S: AsRef<str>>(pred: &[Vec<S>], gold: &[Vec<S>]) -> Result<SpanReport> {
    if pred.len() != gold.len() {
        return Err(Error::InvalidInput(format!(
            "prediction has {} sequences, gold has {}",
            pred.len(),
            gold.len()
        )));
    }
    let mut counts: BTreeMap<String, Counts> = BTreeMap::new();
    let mut repaired = 0;
    for (k, (p, g)) in pred.iter().zip(gold).enumerate() {
        if p.len() != g.len() {
            return Err(Error::InvalidInput(format!(
                "sequence {k}: prediction has {} labels, gold has {}",
                p.len(),
                g.len()
            )));
        }
        let (ps, rp) = bio_spans(p);
        let (gs, rg) = bio_spans(g);
        repaired += rp + rg;
        let gset: BTreeSet<&Span> = gs.iter().collect();
        let pset: BTreeSet<&Span> = ps.iter().collect();
        for s in &pset {
            let c = counts.entry(s.class.clone()).or_default();
            if gset.contains(s) {
                c.tp += 1;
            } else {
                c.fp += 1;
            }
        }
        for s in gset.difference(&pset) {
            counts.entry(s.class.clone()).or_default().fn_ += 1;
        }
    }
    if repaired > 0 {
        log::warn!("repaired {repaired} stray I- labels");
    }
    let mut pooled = Counts::default();
    counts.values().for_each(|c| pooled += *c);
    Ok(SpanReport {
        per_class: counts.iter().map(|(k, c)| (k.clone(), c.prf())).collect(),
        micro: pooled.prf(),
        no_spans: counts.is_empty(),
        repaired,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn token_hand_count() {
        let r = evaluate_tokens(&v("A B B"), &v("A A B")).unwrap();
        assert_eq!(r.per_tag["A"].precision, 1.0);
        assert_eq!(r.per_tag["A"].recall, 0.5);
        assert_eq!(r.per_tag["B"].precision, 0.5);
        assert_eq!(r.per_tag["B"].recall, 1.0);
        assert!((r.macro_avg.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn tag_only_in_prediction_is_not_macro_averaged() {
        let r = evaluate_tokens(&v("A C"), &v("A B")).unwrap();
        assert!(r.per_tag.contains_key("C"));
        assert_eq!(r.macro_avg.f1, 0.5);
        assert!(evaluate_tokens(&v("A"), &v("A B")).is_err());
    }

    #[test]
    fn boundary_mismatch_scores_zero() {
        let r = evaluate_spans(&[v("B-PER O O")], &[v("B-PER I-PER O")]).unwrap();
        assert_eq!(r.micro, Prf::default());
        assert!(!r.no_spans);
    }

    #[test]
    fn identical_spans_score_one() {
        let g = vec![v("B-PER I-PER O B-LOC")];
        let r = evaluate_spans(&g, &g).unwrap();
        assert_eq!(r.micro.f1, 1.0);
        assert_eq!(r.per_class.len(), 2);
    }

    #[test]
    fn no_spans_flagged() {
        let g = vec![v("O O")];
        let r = evaluate_spans(&g, &g).unwrap();
        assert!(r.no_spans);
        assert_eq!(r.micro.f1, 0.0);
    }

    #[test]
    fn stray_inside_is_repaired() {
        let (spans, repaired) = bio_spans(&v("O I-ORG I-ORG B-PER I-LOC"));
        assert_eq!(repaired, 2);
        let got: Vec<_> = spans
            .iter()
            .map(|s| (s.start, s.end, s.class.as_str()))
            .collect();
        assert_eq!(got, [(1, 3, "ORG"), (3, 4, "PER"), (4, 5, "LOC")]);
    }
}
