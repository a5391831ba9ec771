//! Independent reference implementations shared by the integration tests.
//! Nothing here calls into the code under test except for plain data
//! accessors.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random corpus over a small vocabulary so co-occurrences repeat.
pub fn random_corpus(
    rng: &mut impl Rng,
    sentences: usize,
    vocab: usize,
    max_len: usize,
) -> Vec<Vec<String>> {
    (0..sentences)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            (0..len)
                .map(|_| format!("w{}", rng.gen_range(0..vocab)))
                .collect()
        })
        .collect()
}

/// Strings mixing Ethiopic syllables, punctuation, wordspace, ASCII and
/// whitespace.
pub fn random_mixed_text(rng: &mut impl Rng, max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| match rng.gen_range(0..10) {
            0..=5 => char::from_u32(rng.gen_range(0x1200..=0x137F)).unwrap_or('ሀ'),
            6 => *[' ', '\n', '\t', '\u{1361}']
                .get(rng.gen_range(0..4))
                .unwrap(),
            7 => *['።', '፣', '፧', '?', '!', ',', '.']
                .get(rng.gen_range(0..7))
                .unwrap(),
            _ => char::from_u32(rng.gen_range(0x20..0x7F)).unwrap(),
        })
        .collect()
}

pub struct DtOracle {
    /// Salient features per word with their LMI, best first.
    pub salient: BTreeMap<String, Vec<(String, f64)>>,
    /// Non-zero shared-feature counts for every ordered word pair.
    pub overlaps: BTreeMap<String, BTreeMap<String, u32>>,
}

/// Recount everything from scratch with plain loops over the sentences.
pub fn brute_force_dt(
    sentences: &[Vec<String>],
    window: usize,
    min_pair: u64,
    max_words_per_feature: usize,
    features_per_word: usize,
) -> DtOracle {
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut words: BTreeSet<String> = BTreeSet::new();
    for s in sentences {
        for (i, w) in s.iter().enumerate() {
            words.insert(w.clone());
            for (j, c) in s.iter().enumerate() {
                let d = j as i64 - i as i64;
                if d != 0 && d.unsigned_abs() as usize <= window {
                    let label = if d > 0 {
                        format!("+{d}@{c}")
                    } else {
                        format!("{d}@{c}")
                    };
                    pairs.push((w.clone(), label));
                }
            }
        }
    }
    let n = pairs.len() as u64;
    let mut n_wf: BTreeMap<(String, String), u64> = BTreeMap::new();
    let mut n_w: BTreeMap<String, u64> = BTreeMap::new();
    let mut n_f: BTreeMap<String, u64> = BTreeMap::new();
    for (w, f) in &pairs {
        *n_wf.entry((w.clone(), f.clone())).or_default() += 1;
        *n_w.entry(w.clone()).or_default() += 1;
        *n_f.entry(f.clone()).or_default() += 1;
    }
    let kept: Vec<(&(String, String), &u64)> =
        n_wf.iter().filter(|(_, &c)| c >= min_pair).collect();
    let mut spread: BTreeMap<&str, usize> = BTreeMap::new();
    for ((_, f), _) in &kept {
        *spread.entry(f.as_str()).or_default() += 1;
    }
    let mut salient: BTreeMap<String, Vec<(String, f64)>> =
        words.iter().map(|w| (w.clone(), Vec::new())).collect();
    for ((w, f), &c) in kept {
        if spread[f.as_str()] > max_words_per_feature {
            continue;
        }
        let joint = c as f64;
        let score = joint * ((joint * n as f64) / (n_w[w] as f64 * n_f[f] as f64)).log2();
        salient.get_mut(w).unwrap().push((f.clone(), score));
    }
    for list in salient.values_mut() {
        list.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        list.truncate(features_per_word);
    }
    let mut overlaps: BTreeMap<String, BTreeMap<String, u32>> = BTreeMap::new();
    for (a, fa) in &salient {
        let sa: BTreeSet<&String> = fa.iter().map(|(f, _)| f).collect();
        let row = overlaps.entry(a.clone()).or_default();
        for (b, fb) in &salient {
            if a == b {
                continue;
            }
            let shared = fb.iter().filter(|(f, _)| sa.contains(f)).count() as u32;
            if shared > 0 {
                row.insert(b.clone(), shared);
            }
        }
    }
    DtOracle { salient, overlaps }
}

/// Textbook TF-IDF: smoothed idf, raw counts, L2 norm. Returns per-doc
/// term weights keyed by term.
pub fn brute_force_tfidf(train: &[Vec<String>], doc: &[String]) -> BTreeMap<String, f64> {
    let n = train.len() as f64;
    let mut weights = BTreeMap::new();
    for t in doc {
        let df = train.iter().filter(|d| d.contains(t)).count();
        if df == 0 {
            continue;
        }
        let tf = doc.iter().filter(|x| *x == t).count() as f64;
        let idf = ((1.0 + n) / (1.0 + df as f64)).ln() + 1.0;
        weights.insert(t.clone(), tf * idf);
    }
    let norm: f64 = weights.values().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in weights.values_mut() {
            *v /= norm;
        }
    }
    weights
}

/// Central finite difference of `f` with respect to coordinate `i` of `x`.
pub fn central_difference(f: &dyn Fn(&[f64]) -> f64, x: &[f64], i: usize, eps: f64) -> f64 {
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    plus[i] += eps;
    minus[i] -= eps;
    (f(&plus) - f(&minus)) / (2.0 * eps)
}

/// Relative error with a floor on the denominator so that gradients near
/// zero are compared absolutely.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

/// Maximum relative error between `grad` and finite differences of `f`
/// over every coordinate of `x`.
pub fn max_gradient_error(f: &dyn Fn(&[f64]) -> f64, x: &[f64], grad: &[f64]) -> f64 {
    (0..x.len())
        .map(|i| relative_error(grad[i], central_difference(f, x, i, 1e-6)))
        .fold(0.0, f64::max)
}

pub fn random_vector(rng: &mut impl Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-scale..scale)).collect()
}

/// Every tag sequence of length `len` over `n` tags.
pub fn all_paths(len: usize, n: usize) -> Vec<Vec<usize>> {
    let mut paths = vec![Vec::new()];
    for _ in 0..len {
        paths = paths
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |t| {
                    let mut q = p.clone();
                    q.push(t);
                    q
                })
            })
            .collect();
    }
    paths
}

/// Score of a path computed directly from its definition.
pub fn direct_path_score(
    emissions: &[Vec<f64>],
    start: &[f64],
    end: &[f64],
    trans: &[Vec<f64>],
    path: &[usize],
) -> f64 {
    let mut s = start[path[0]] + end[*path.last().unwrap()];
    for (i, &t) in path.iter().enumerate() {
        s += emissions[i][t];
        if i > 0 {
            s += trans[path[i - 1]][t];
        }
    }
    s
}

/// Synthetic tagging data where the tag is a function of the last
/// character: stems are random, suffixes come from a fixed table.
pub fn suffix_corpus(rng: &mut impl Rng, sentences: usize) -> Vec<(Vec<String>, Vec<String>)> {
    const SUFFIXES: [(&str, &str); 4] = [("ች", "V"), ("ው", "N"), ("ም", "ADV"), ("ና", "CONJ")];
    const STEMS: &str = "ሀለመረሰቀበተነከወዘየደገጠጰፈ";
    let stems: Vec<char> = STEMS.chars().collect();
    (0..sentences)
        .map(|_| {
            let len = rng.gen_range(3..=8);
            let mut tokens = Vec::new();
            let mut tags = Vec::new();
            for _ in 0..len {
                let stem_len = rng.gen_range(1..=4);
                let mut w: String = (0..stem_len)
                    .map(|_| stems[rng.gen_range(0..stems.len())])
                    .collect();
                let (suffix, tag) = SUFFIXES[rng.gen_range(0..SUFFIXES.len())];
                w.push_str(suffix);
                tokens.push(w);
                tags.push(tag.to_string());
            }
            (tokens, tags)
        })
        .collect()
}

/// Cosine similarity from the definition.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}
