//! Corpus streaming, vocabularies, statistics and dataset splits.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::text::{self, NormalizationTable};

/// Reads a sentence-per-line corpus, yielding whitespace-split sentences.
///
/// In raw mode every line is normalized, tokenized and segmented first, so a
/// single line may yield several sentences.
pub struct CorpusReader {
    path: PathBuf,
    lines: std::io::Lines<BufReader<File>>,
    raw: Option<NormalizationTable>,
    pending: std::collections::VecDeque<Vec<String>>,
}

impl CorpusReader {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        Ok(CorpusReader {
            path,
            lines: BufReader::new(file).lines(),
            raw: None,
            pending: Default::default(),
        })
    }

    pub fn raw(mut self, table: &NormalizationTable) -> Self {
        self.raw = Some(table.clone());
        self
    }
}

impl Iterator for CorpusReader {
    type Item = Result<Vec<String>>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(s) = self.pending.pop_front() {
                return Some(Ok(s));
            }
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => return Some(Err(Error::io(&self.path, e))),
            };
            match &self.raw {
                Some(table) => self.pending.extend(text::preprocess(&line, table)),
                None => {
                    let toks: Vec<String> = line.split_whitespace().map(str::to_string).collect();
                    if !toks.is_empty() {
                        return Some(Ok(toks));
                    }
                }
            }
        }
    }
}

/// Read a whole corpus file into memory.
pub fn read_corpus(
    path: impl AsRef<Path>,
    raw: Option<&NormalizationTable>,
) -> Result<Vec<Vec<String>>> {
    let reader = CorpusReader::open(path)?;
    match raw {
        Some(t) => reader.raw(t).collect(),
        None => reader.collect(),
    }
}

/// Split each line of already tokenized text on whitespace.
pub fn sentences_from_lines<S: AsRef<str>>(lines: &[S]) -> Vec<Vec<String>> {
    lines
        .iter()
        .map(|l| {
            l.as_ref()
                .split_whitespace()
                .map(str::to_string)
                .collect::<Vec<_>>()
        })
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn write_corpus(path: impl AsRef<Path>, sentences: &[Vec<String>]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for s in sentences {
        writeln!(out, "{}", s.join(" ")).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Word frequency table. Merging is associative so shards can be counted
/// independently.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordCounts {
    counts: HashMap<String, u64>,
    total: u64,
}

impl WordCounts {
    pub fn add_sentence<S: AsRef<str>>(&mut self, sentence: impl IntoIterator<Item = S>) {
        for w in sentence {
            let w = w.as_ref();
            match self.counts.get_mut(w) {
                Some(c) => *c += 1,
                None => {
                    self.counts.insert(w.to_string(), 1);
                }
            }
            self.total += 1;
        }
    }

    pub fn merge(mut self, other: WordCounts) -> WordCounts {
        for (w, c) in other.counts {
            *self.counts.entry(w).or_insert(0) += c;
        }
        self.total += other.total;
        self
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Dense 0-based word ids ordered by descending frequency, ties broken
/// lexicographically.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    word_to_id: HashMap<String, usize>,
    id_to_word: Vec<String>,
    counts: Vec<u64>,
    total_tokens: u64,
}

impl Vocabulary {
    pub fn from_counts(counts: WordCounts, min_count: u64) -> Result<Self> {
        if min_count < 1 {
            return Err(Error::Config("min_count must be at least 1".into()));
        }
        let mut kept: Vec<(String, u64)> = counts
            .counts
            .into_iter()
            .filter(|&(_, c)| c >= min_count)
            .collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(Self::from_entries(kept, counts.total))
    }

    /// Build from `(word, count)` pairs whose order defines the ids.
    pub fn from_entries(entries: Vec<(String, u64)>, total_tokens: u64) -> Self {
        let mut vocab = Vocabulary {
            total_tokens,
            ..Default::default()
        };
        for (w, c) in entries {
            vocab.word_to_id.insert(w.clone(), vocab.id_to_word.len());
            vocab.id_to_word.push(w);
            vocab.counts.push(c);
        }
        vocab
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.word_to_id.get(word).copied()
    }

    pub fn word(&self, id: usize) -> &str {
        &self.id_to_word[id]
    }

    pub fn words(&self) -> &[String] {
        &self.id_to_word
    }

    pub fn count(&self, id: usize) -> u64 {
        self.counts[id]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Token count of the unfiltered stream the vocabulary was built from.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn len(&self) -> usize {
        self.id_to_word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_word.is_empty()
    }

    pub fn save_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        for (w, c) in self.id_to_word.iter().zip(&self.counts) {
            writeln!(out, "{w}\t{c}").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    /// Load a `word<TAB>count` file; ids follow line order. The unfiltered
    /// total is not persisted, so it is set to the sum of the loaded counts.
    pub fn load_tsv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let what = path.display().to_string();
        let mut entries = Vec::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let (w, c) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(&what, idx + 1, "expected word<TAB>count"))?;
            let c: u64 = c
                .parse()
                .map_err(|_| Error::parse(&what, idx + 1, format!("bad count {c:?}")))?;
            entries.push((w.to_string(), c));
        }
        let total = entries.iter().map(|e| e.1).sum();
        Ok(Self::from_entries(entries, total))
    }
}

pub fn build_vocab<S: AsRef<str>>(
    sentences: impl IntoIterator<Item = impl IntoIterator<Item = S>>,
    min_count: u64,
) -> Result<Vocabulary> {
    let mut counts = WordCounts::default();
    for s in sentences {
        counts.add_sentence(s);
    }
    Vocabulary::from_counts(counts, min_count)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct CorpusStats {
    pub sentence_count: u64,
    pub token_count: u64,
    pub type_count: u64,
}

pub fn corpus_stats<S: AsRef<str>>(
    sentences: impl IntoIterator<Item = impl IntoIterator<Item = S>>,
) -> CorpusStats {
    let mut types = HashSet::new();
    let mut stats = CorpusStats::default();
    for s in sentences {
        stats.sentence_count += 1;
        for w in s {
            stats.token_count += 1;
            if !types.contains(w.as_ref()) {
                types.insert(w.as_ref().to_string());
            }
        }
    }
    stats.type_count = types.len() as u64;
    stats
}

/// Train/dev/test proportions plus the shuffle seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    ratios: [f64; 3],
    seed: u64,
}

impl SplitSpec {
    pub fn new(ratios: [f64; 3], seed: u64) -> Result<Self> {
        if ratios.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::Config(format!(
                "split ratios must be non-negative, got {ratios:?}"
            )));
        }
        let sum: f64 = ratios.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "split ratios must sum to 1, got {sum}"
            )));
        }
        Ok(SplitSpec { ratios, seed })
    }

    pub fn ratios(&self) -> [f64; 3] {
        self.ratios
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Part sizes by the largest-remainder method. Leftover items go to the
    /// parts with the largest fractional remainder; ties favor train, then
    /// dev, then test.
    pub fn sizes(&self, n: usize) -> [usize; 3] {
        let exact = self.ratios.map(|r| r * n as f64);
        let mut sizes = exact.map(|x| x.floor() as usize);
        let assigned: usize = sizes.iter().sum();
        let mut order = [0usize, 1, 2];
        // stable sort keeps train -> dev -> test among equal remainders
        order.sort_by(|&a, &b| {
            let ra = exact[a] - exact[a].floor();
            let rb = exact[b] - exact[b].floor();
            rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal)
        });
        for &part in order.iter().cycle().take(n.saturating_sub(assigned)) {
            sizes[part] += 1;
        }
        sizes
    }
}

pub fn split_dataset<T>(items: Vec<T>, spec: &SplitSpec) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    if items.is_empty() {
        return Err(Error::InvalidInput("cannot split an empty dataset".into()));
    }
    let [n_train, n_dev, _] = spec.sizes(items.len());
    let mut items = items;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    items.shuffle(&mut rng);
    let mut rest = items.split_off(n_train);
    let test = rest.split_off(n_dev);
    Ok((items, rest, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocab_min_count() {
        let v = build_vocab(sentences_from_lines(&["a a b"]), 2).unwrap();
        assert_eq!(v.words(), &["a".to_string()]);
        assert_eq!(v.counts(), &[2]);
        assert_eq!(v.total_tokens(), 3);
    }

    #[test]
    fn vocab_ordering() {
        let v = build_vocab(sentences_from_lines(&["x y", "y z"]), 1).unwrap();
        assert_eq!(v.id("y"), Some(0));
        assert_eq!(v.id("x"), Some(1));
        assert_eq!(v.id("z"), Some(2));
    }

    #[test]
    fn vocab_empty_and_bad_min_count() {
        let empty: Vec<Vec<String>> = vec![];
        assert!(build_vocab(&empty, 1).unwrap().is_empty());
        assert!(build_vocab(&empty, 0).is_err());
    }

    #[test]
    fn merged_counts_match_sequential() {
        let a = sentences_from_lines(&["x y x", "z"]);
        let b = sentences_from_lines(&["y y", "w x"]);
        let mut left = WordCounts::default();
        a.iter().for_each(|s| left.add_sentence(s));
        let mut right = WordCounts::default();
        b.iter().for_each(|s| right.add_sentence(s));
        let merged = Vocabulary::from_counts(left.merge(right), 1).unwrap();
        let all: Vec<_> = a.into_iter().chain(b).collect();
        assert_eq!(merged, build_vocab(&all, 1).unwrap());
    }

    #[test]
    fn stats() {
        let s = corpus_stats(sentences_from_lines(&["a b", "a"]));
        assert_eq!((s.sentence_count, s.token_count, s.type_count), (2, 3, 2));
        let empty: Vec<Vec<String>> = vec![];
        assert_eq!(corpus_stats(&empty), CorpusStats::default());
        let s = corpus_stats(sentences_from_lines(&["ሰው"]));
        assert_eq!((s.sentence_count, s.token_count, s.type_count), (1, 1, 1));
    }

    #[test]
    fn split_sizes() {
        let spec = SplitSpec::new([0.8, 0.1, 0.1], 7).unwrap();
        assert_eq!(spec.sizes(10), [8, 1, 1]);
        assert_eq!(spec.sizes(9), [7, 1, 1]);
        let (a, b, c) = split_dataset((0..10).collect(), &spec).unwrap();
        assert_eq!((a.len(), b.len(), c.len()), (8, 1, 1));
    }

    #[test]
    fn split_is_deterministic_and_partitions() {
        let spec = SplitSpec::new([0.8, 0.1, 0.1], 3).unwrap();
        let first = split_dataset((0..37).collect::<Vec<_>>(), &spec).unwrap();
        let second = split_dataset((0..37).collect::<Vec<_>>(), &spec).unwrap();
        assert_eq!(first, second);
        let mut all: Vec<i32> = first.0.into_iter().chain(first.1).chain(first.2).collect();
        all.sort();
        assert_eq!(all, (0..37).collect::<Vec<_>>());
    }

    #[test]
    fn split_rejects_bad_ratios() {
        assert!(SplitSpec::new([0.8, 0.1, 0.2], 0).is_err());
        assert!(SplitSpec::new([1.2, -0.1, -0.1], 0).is_err());
        let spec = SplitSpec::new([0.8, 0.1, 0.1], 0).unwrap();
        assert!(split_dataset(Vec::<u8>::new(), &spec).is_err());
    }
}
