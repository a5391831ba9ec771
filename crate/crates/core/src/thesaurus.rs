//! Distributional thesaurus construction.
//!
//! Sentences are "holed" into `(word, context feature)` pairs, pair counts
//! are scored for significance, each word keeps its most salient features,
//! and two words are similar in proportion to how many salient features they
//! share.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Significance {
    Lmi,
    Pmi,
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapWeighting {
    /// Number of shared salient features.
    Count,
    /// Sum over shared features of the smaller of the two significance scores.
    Weighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HolingConfig {
    pub window: usize,
    /// Features carry their offset, e.g. `-1@ነው`.
    pub positional: bool,
    pub min_word_feature_count: u64,
    pub features_per_word: usize,
    pub max_words_per_feature: usize,
    pub significance: Significance,
    pub weighting: OverlapWeighting,
}

impl Default for HolingConfig {
    fn default() -> Self {
        HolingConfig {
            window: 3,
            positional: true,
            min_word_feature_count: 2,
            features_per_word: 1000,
            max_words_per_feature: 1000,
            significance: Significance::Lmi,
            weighting: OverlapWeighting::Count,
        }
    }
}

impl HolingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 1
            || self.min_word_feature_count < 1
            || self.features_per_word < 1
            || self.max_words_per_feature < 1
        {
            return Err(Error::Config(
                "holing parameters must all be at least 1".into(),
            ));
        }
        Ok(())
    }
}

fn feature_label(offset: isize, word: &str, positional: bool) -> String {
    if positional {
        format!("{offset:+}@{word}")
    } else {
        word.to_string()
    }
}

/// Emit `(word_i, feature(d, word_{i+d}))` for every `1 <= |d| <= window`.
pub fn extract_features<S: AsRef<str>>(
    sentence: &[S],
    cfg: &HolingConfig,
) -> Vec<(String, String)> {
    let mut pairs = Vec::new();
    for_each_feature(sentence, cfg, |w, f| pairs.push((w.to_string(), f)));
    pairs
}

fn for_each_feature<S: AsRef<str>>(
    sentence: &[S],
    cfg: &HolingConfig,
    mut emit: impl FnMut(&str, String),
) {
    let n = sentence.len() as isize;
    let w = cfg.window as isize;
    for i in 0..n {
        for d in -w..=w {
            let j = i + d;
            if d == 0 || j < 0 || j >= n {
                continue;
            }
            emit(
                sentence[i as usize].as_ref(),
                feature_label(d, sentence[j as usize].as_ref(), cfg.positional),
            );
        }
    }
}

fn check_counts(n_wf: u64, n_w: u64, n_f: u64, n: u64) -> Result<()> {
    if n_wf == 0 || n == 0 || n_w == 0 || n_f == 0 {
        return Err(Error::Domain(format!(
            "significance needs positive counts (n_wf={n_wf}, n_w={n_w}, n_f={n_f}, N={n})"
        )));
    }
    Ok(())
}

/// Lexicographer's mutual information: `n_wf * log2(n_wf * N / (n_w * n_f))`.
pub fn lmi(n_wf: u64, n_w: u64, n_f: u64, n: u64) -> Result<f64> {
    check_counts(n_wf, n_w, n_f, n)?;
    let joint = n_wf as f64;
    Ok(joint * ((joint * n as f64) / (n_w as f64 * n_f as f64)).log2())
}

pub fn pmi(n_wf: u64, n_w: u64, n_f: u64, n: u64) -> Result<f64> {
    check_counts(n_wf, n_w, n_f, n)?;
    Ok(((n_wf as f64 * n as f64) / (n_w as f64 * n_f as f64)).log2())
}

impl Significance {
    pub fn score(self, n_wf: u64, n_w: u64, n_f: u64, n: u64) -> Result<f64> {
        match self {
            Significance::Lmi => lmi(n_wf, n_w, n_f, n),
            Significance::Pmi => pmi(n_wf, n_w, n_f, n),
            Significance::Frequency => {
                check_counts(n_wf, n_w, n_f, n)?;
                Ok(n_wf as f64)
            }
        }
    }
}

/// Sparse word-feature co-occurrence counts with their marginals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CooccurrenceModel {
    pairs: HashMap<String, HashMap<String, u64>>,
    n_w: HashMap<String, u64>,
    n_f: HashMap<String, u64>,
    total: u64,
    /// Every token seen, including ones without any context.
    words: BTreeSet<String>,
}

impl CooccurrenceModel {
    pub fn count<S: AsRef<str>>(
        sentences: impl IntoIterator<Item = impl AsRef<[S]>>,
        cfg: &HolingConfig,
    ) -> Self {
        let mut model = CooccurrenceModel::default();
        for s in sentences {
            model.add_sentence(s.as_ref(), cfg);
        }
        model
    }

    /// Count shards in parallel and merge. Equal to [`CooccurrenceModel::count`].
    pub fn count_parallel<S: AsRef<str> + Sync>(sentences: &[Vec<S>], cfg: &HolingConfig) -> Self {
        sentences
            .par_iter()
            .fold(CooccurrenceModel::default, |mut m, s| {
                m.add_sentence(s, cfg);
                m
            })
            .reduce(CooccurrenceModel::default, CooccurrenceModel::merge)
    }

    pub fn add_sentence<S: AsRef<str>>(&mut self, sentence: &[S], cfg: &HolingConfig) {
        for w in sentence {
            if !self.words.contains(w.as_ref()) {
                self.words.insert(w.as_ref().to_string());
            }
        }
        for_each_feature(sentence, cfg, |w, f| {
            *self.n_f.entry(f.clone()).or_insert(0) += 1;
            *self.n_w.entry(w.to_string()).or_insert(0) += 1;
            *self
                .pairs
                .entry(w.to_string())
                .or_default()
                .entry(f)
                .or_insert(0) += 1;
            self.total += 1;
        });
    }

    pub fn merge(mut self, other: CooccurrenceModel) -> CooccurrenceModel {
        for (w, feats) in other.pairs {
            let slot = self.pairs.entry(w).or_default();
            for (f, c) in feats {
                *slot.entry(f).or_insert(0) += c;
            }
        }
        for (w, c) in other.n_w {
            *self.n_w.entry(w).or_insert(0) += c;
        }
        for (f, c) in other.n_f {
            *self.n_f.entry(f).or_insert(0) += c;
        }
        self.words.extend(other.words);
        self.total += other.total;
        self
    }

    pub fn pair_count(&self, word: &str, feature: &str) -> u64 {
        self.pairs
            .get(word)
            .and_then(|f| f.get(feature))
            .copied()
            .unwrap_or(0)
    }

    pub fn word_count(&self, word: &str) -> u64 {
        self.n_w.get(word).copied().unwrap_or(0)
    }

    pub fn feature_count(&self, feature: &str) -> u64 {
        self.n_f.get(feature).copied().unwrap_or(0)
    }

    /// Total number of emitted pairs, `N`.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn words(&self) -> &BTreeSet<String> {
        &self.words
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SalientFeature {
    pub feature: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub word: String,
    pub overlap: u32,
    /// Equal to `overlap` under [`OverlapWeighting::Count`].
    pub weight: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ThesaurusModel {
    salient: BTreeMap<String, Vec<SalientFeature>>,
    neighbors: BTreeMap<String, Vec<Neighbor>>,
}

pub fn build_dt<S: AsRef<str> + Sync>(
    sentences: &[Vec<S>],
    cfg: &HolingConfig,
) -> Result<ThesaurusModel> {
    cfg.validate()?;
    if sentences.iter().all(|s| s.is_empty()) {
        return Err(Error::InvalidInput(
            "cannot build a thesaurus from an empty corpus".into(),
        ));
    }
    build_dt_from_counts(&CooccurrenceModel::count_parallel(sentences, cfg), cfg)
}

pub fn build_dt_from_counts(
    counts: &CooccurrenceModel,
    cfg: &HolingConfig,
) -> Result<ThesaurusModel> {
    cfg.validate()?;
    if counts.words.is_empty() {
        return Err(Error::InvalidInput(
            "cannot build a thesaurus from an empty corpus".into(),
        ));
    }

    // distinct words per feature among pairs that survive the count threshold
    let mut words_per_feature: HashMap<&str, usize> = HashMap::new();
    for feats in counts.pairs.values() {
        for (f, &c) in feats {
            if c >= cfg.min_word_feature_count {
                *words_per_feature.entry(f.as_str()).or_insert(0) += 1;
            }
        }
    }

    let words: Vec<&String> = counts.words.iter().collect();
    let salient: Vec<Vec<SalientFeature>> = words
        .par_iter()
        .map(|w| -> Result<Vec<SalientFeature>> {
            let Some(feats) = counts.pairs.get(*w) else {
                return Ok(Vec::new());
            };
            let n_w = counts.n_w[*w];
            let mut scored = Vec::new();
            for (f, &c) in feats {
                if c < cfg.min_word_feature_count
                    || words_per_feature[f.as_str()] > cfg.max_words_per_feature
                {
                    continue;
                }
                let score = cfg
                    .significance
                    .score(c, n_w, counts.n_f[f], counts.total)?;
                scored.push(SalientFeature {
                    feature: f.clone(),
                    score,
                });
            }
            scored.sort_by(|a, b| {
                b.score
                    .total_cmp(&a.score)
                    .then_with(|| a.feature.cmp(&b.feature))
            });
            scored.truncate(cfg.features_per_word);
            Ok(scored)
        })
        .collect::<Result<_>>()?;

    let mut postings: HashMap<&str, Vec<(usize, f64)>> = HashMap::new();
    for (wi, feats) in salient.iter().enumerate() {
        for sf in feats {
            postings
                .entry(sf.feature.as_str())
                .or_default()
                .push((wi, sf.score));
        }
    }

    let neighbors: Vec<Vec<Neighbor>> = (0..words.len())
        .into_par_iter()
        .map(|wi| {
            let mut shared: HashMap<usize, (u32, f64)> = HashMap::new();
            for sf in &salient[wi] {
                for &(other, score) in &postings[sf.feature.as_str()] {
                    if other != wi {
                        let slot = shared.entry(other).or_insert((0, 0.0));
                        slot.0 += 1;
                        slot.1 += sf.score.min(score);
                    }
                }
            }
            let mut list: Vec<Neighbor> = shared
                .into_iter()
                .map(|(other, (overlap, weight))| Neighbor {
                    word: words[other].clone(),
                    overlap,
                    weight: match cfg.weighting {
                        OverlapWeighting::Count => overlap as f64,
                        OverlapWeighting::Weighted => weight,
                    },
                })
                .collect();
            list.sort_by(|a, b| {
                b.weight
                    .total_cmp(&a.weight)
                    .then_with(|| b.overlap.cmp(&a.overlap))
                    .then_with(|| a.word.cmp(&b.word))
            });
            list
        })
        .collect();

    let mut model = ThesaurusModel::default();
    for ((w, s), n) in words.into_iter().zip(salient).zip(neighbors) {
        model.salient.insert(w.clone(), s);
        model.neighbors.insert(w.clone(), n);
    }
    Ok(model)
}

impl ThesaurusModel {
    pub fn contains(&self, word: &str) -> bool {
        self.neighbors.contains_key(word)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.neighbors.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn salient(&self, word: &str) -> Option<&[SalientFeature]> {
        self.salient.get(word).map(Vec::as_slice)
    }

    pub fn neighbors(&self, word: &str) -> Option<&[Neighbor]> {
        self.neighbors.get(word).map(Vec::as_slice)
    }

    /// The first `k` neighbors of `word`.
    pub fn similar(&self, word: &str, k: usize) -> Result<&[Neighbor]> {
        if k < 1 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        let list = self
            .neighbors
            .get(word)
            .ok_or_else(|| Error::NotFound(format!("word {word:?} is not in the thesaurus")))?;
        Ok(&list[..k.min(list.len())])
    }

    /// `word<TAB>neighbor<TAB>overlap`, sorted by word then rank.
    pub fn save_neighbors(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        for (w, list) in &self.neighbors {
            for n in list {
                writeln!(out, "{w}\t{}\t{}", n.word, n.overlap).map_err(|e| Error::io(path, e))?;
            }
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    /// `word<TAB>feature<TAB>score`, sorted by word then rank.
    pub fn save_salient(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        for (w, list) in &self.salient {
            for f in list {
                writeln!(out, "{w}\t{}\t{}", f.feature, f.score).map_err(|e| Error::io(path, e))?;
            }
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    /// Load a neighbor file written by [`ThesaurusModel::save_neighbors`].
    /// Rank order is taken from the file; salient features are not restored.
    pub fn load_neighbors(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let what = path.display().to_string();
        let mut model = ThesaurusModel::default();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [word, neighbor, overlap] = cols[..] else {
                return Err(Error::parse(
                    &what,
                    idx + 1,
                    "expected word<TAB>neighbor<TAB>overlap",
                ));
            };
            let overlap: u32 = overlap
                .parse()
                .map_err(|_| Error::parse(&what, idx + 1, format!("bad overlap {overlap:?}")))?;
            model.neighbors.entry(neighbor.to_string()).or_default();
            model
                .neighbors
                .entry(word.to_string())
                .or_default()
                .push(Neighbor {
                    word: neighbor.to_string(),
                    overlap,
                    weight: overlap as f64,
                });
        }
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::sentences_from_lines;

    fn cfg(window: usize, positional: bool) -> HolingConfig {
        HolingConfig {
            window,
            positional,
            min_word_feature_count: 1,
            ..Default::default()
        }
    }

    #[test]
    fn holing_examples() {
        let pairs = extract_features(&["x", "y"], &cfg(1, true));
        assert_eq!(
            pairs,
            vec![("x".into(), "+1@y".into()), ("y".into(), "-1@x".into())]
        );
        assert!(extract_features::<&str>(&[], &cfg(3, true)).is_empty());
        let pairs = extract_features(&["a", "b", "c"], &cfg(2, false));
        assert_eq!(pairs.len(), 6);
        for w in ["a", "b", "c"] {
            let others: BTreeSet<_> = pairs
                .iter()
                .filter(|p| p.0 == w)
                .map(|p| p.1.as_str())
                .collect();
            assert_eq!(others.len(), 2);
            assert!(!others.contains(w));
        }
    }

    #[test]
    fn lmi_examples() {
        let counts = CooccurrenceModel::count(sentences_from_lines(&["x y"]), &cfg(1, true));
        assert_eq!(counts.total(), 2);
        let (nwf, nw, nf) = (
            counts.pair_count("x", "+1@y"),
            counts.word_count("x"),
            counts.feature_count("+1@y"),
        );
        assert_eq!((nwf, nw, nf), (1, 1, 1));
        assert_eq!(lmi(nwf, nw, nf, counts.total()).unwrap(), 1.0);
        assert_eq!(lmi(2, 4, 5, 10).unwrap(), 0.0);
        let a = lmi(3, 5, 7, 40).unwrap();
        let b = lmi(6, 10, 14, 80).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12);
        assert!(lmi(1, 0, 1, 1).is_err());
        assert!(lmi(0, 1, 1, 1).is_err());
    }

    fn farm() -> Vec<Vec<String>> {
        sentences_from_lines(&[
            "the ox eats",
            "the sheep eats",
            "the ox eats",
            "the sheep eats",
            "a dog barks",
            "a dog barks",
            "a cat purrs",
            "a cat purrs",
        ])
    }

    #[test]
    fn farm_neighbors() {
        let c = HolingConfig {
            window: 1,
            ..Default::default()
        };
        let model = build_dt(&farm(), &c).unwrap();
        let top = &model.similar("ox", 5).unwrap()[0];
        assert_eq!((top.word.as_str(), top.overlap), ("sheep", 2));
        for w in model.words() {
            assert!(model.neighbors(w).unwrap().iter().all(|n| n.word != w));
        }
        // dog and cat share "-1@a" only
        assert_eq!(model.similar("dog", 1).unwrap()[0].word, "cat");
    }

    #[test]
    fn similar_truncates_and_reports_missing() {
        let model = build_dt(&farm(), &cfg(1, true)).unwrap();
        let all = model.neighbors("ox").unwrap().len();
        assert_eq!(model.similar("ox", all + 10).unwrap().len(), all);
        assert!(matches!(model.similar("lion", 3), Err(Error::NotFound(_))));
    }

    #[test]
    fn single_word_corpus_has_no_neighbors() {
        let model = build_dt(&sentences_from_lines(&["a"]), &cfg(1, true)).unwrap();
        assert!(model.contains("a"));
        assert!(model.neighbors("a").unwrap().is_empty());
        let empty: Vec<Vec<String>> = vec![];
        assert!(build_dt(&empty, &cfg(1, true)).is_err());
    }

    #[test]
    fn max_words_per_feature_prunes_hubs() {
        let c = HolingConfig {
            window: 1,
            min_word_feature_count: 1,
            max_words_per_feature: 1,
            ..Default::default()
        };
        let model = build_dt(&farm(), &c).unwrap();
        // "-1@the" is shared by ox and sheep and must be dropped
        assert!(model
            .salient("ox")
            .unwrap()
            .iter()
            .all(|f| f.feature != "-1@the"));
    }

    #[test]
    fn parallel_counts_equal_sequential() {
        let corpus = farm();
        let c = cfg(2, true);
        assert_eq!(
            CooccurrenceModel::count(&corpus, &c),
            CooccurrenceModel::count_parallel(&corpus, &c)
        );
    }

    #[test]
    fn neighbor_file_roundtrip() {
        let model = build_dt(&farm(), &cfg(1, true)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dt.tsv");
        model.save_neighbors(&path).unwrap();
        let loaded = ThesaurusModel::load_neighbors(&path).unwrap();
        assert_eq!(
            loaded.similar("ox", 3).unwrap(),
            model.similar("ox", 3).unwrap()
        );
    }
}
