//! Static word embeddings: skip-gram and CBOW with negative sampling, with
//! optional hashed character n-gram (subword) vectors.

pub mod objective;
mod subword;
mod train;

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::vecmath::{axpy, cosine, Matrix};

pub use subword::{char_ngrams, fnv1a32, ngram_buckets, SubwordConfig};
pub use train::{subsample_keep_probability, train, NoiseSampler, Trainer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Skipgram,
    Cbow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Decays linearly per processed token down to `initial_lr * 1e-4`.
    pub initial_lr: f64,
    pub min_count: u64,
    pub mode: Mode,
    pub subword: Option<SubwordConfig>,
    /// Frequent-word subsampling threshold; 0 disables subsampling.
    pub subsample_t: f64,
    pub seed: u64,
    /// 1 trains deterministically; more runs lock-free parallel workers.
    pub workers: usize,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            min_count: 5,
            mode: Mode::Cbow,
            subword: None,
            subsample_t: 1e-3,
            seed: 42,
            workers: 1,
        }
    }
}

impl EmbedConfig {
    /// Word2vec-style defaults.
    pub fn word2vec() -> Self {
        Self::default()
    }

    /// 300-dimensional CBOW with 5-character n-grams, window 5 and 10
    /// negatives.
    pub fn fasttext() -> Self {
        EmbedConfig {
            dim: 300,
            window: 5,
            negatives: 10,
            mode: Mode::Cbow,
            subword: Some(SubwordConfig::default()),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 || self.negatives < 1 || self.window < 1 {
            return Err(Error::Config(
                "dim, negatives and window must be at least 1".into(),
            ));
        }
        if self.min_count < 1 || self.workers < 1 {
            return Err(Error::Config(
                "min_count and workers must be at least 1".into(),
            ));
        }
        if self.initial_lr.is_nan()
            || self.initial_lr <= 0.0
            || self.subsample_t.is_nan()
            || self.subsample_t < 0.0
        {
            return Err(Error::Config(
                "learning rate must be positive and subsample_t non-negative".into(),
            ));
        }
        if let Some(sw) = &self.subword {
            if sw.ngram_len < 1 || sw.bucket_count < 1 {
                return Err(Error::Config(
                    "subword ngram_len and bucket_count must be at least 1".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Hashed n-gram vectors. Only buckets touched during training are stored;
/// the rest keep their seeded initial value, generated on demand.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SubwordVectors {
    pub cfg: SubwordConfig,
    pub seed: u64,
    pub rows: HashMap<u32, usize>,
    pub vectors: Matrix,
}

impl SubwordVectors {
    fn add_bucket(&self, bucket: u32, out: &mut [f64]) {
        match self.rows.get(&bucket) {
            Some(&r) => axpy(1.0, self.vectors.row(r), out),
            None => axpy(
                1.0,
                &initial_bucket_vector(self.seed, bucket, out.len()),
                out,
            ),
        }
    }
}

pub(crate) fn init_scale(dim: usize) -> f64 {
    0.5 / dim as f64
}

/// Seeded initial value of a bucket row, independent of training order.
pub(crate) fn initial_bucket_vector(seed: u64, bucket: u32, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(bucket as u64 + 1)),
    );
    let s = init_scale(dim);
    (0..dim).map(|_| rng.gen_range(-s..s)).collect()
}

/// A vocabulary with one input vector per word.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    vocab: Vocabulary,
    /// Per-word rows, not including subword contributions.
    vectors: Matrix,
    subword: Option<SubwordVectors>,
    output: Option<Matrix>,
    /// Full word vectors (word row plus n-gram rows).
    composed: Matrix,
}

impl EmbeddingModel {
    /// Build a model from explicit vectors, one row per vocabulary id.
    pub fn from_vectors(vocab: Vocabulary, vectors: Matrix) -> Result<Self> {
        Self::assemble(vocab, vectors, None, None)
    }

    pub(crate) fn assemble(
        vocab: Vocabulary,
        vectors: Matrix,
        subword: Option<SubwordVectors>,
        output: Option<Matrix>,
    ) -> Result<Self> {
        if vectors.rows() != vocab.len() {
            return Err(Error::InvalidInput(format!(
                "{} vectors for a vocabulary of {}",
                vectors.rows(),
                vocab.len()
            )));
        }
        if !vectors.is_finite() {
            return Err(Error::Domain("embedding contains non-finite values".into()));
        }
        let mut model = EmbeddingModel {
            composed: vectors.clone(),
            vocab,
            vectors,
            subword,
            output,
        };
        if let Some(sw) = &model.subword {
            for id in 0..model.vocab.len() {
                let word = model.vocab.word(id).to_string();
                let row = model.composed.row_mut(id);
                for b in ngram_buckets(&word, &sw.cfg) {
                    sw.add_bucket(b, row);
                }
            }
        }
        Ok(model)
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn has_subwords(&self) -> bool {
        self.subword.is_some()
    }

    /// Per-word input rows without subword contributions.
    pub fn word_rows(&self) -> &Matrix {
        &self.vectors
    }

    /// Output (context) vectors, when the model came from training.
    pub fn output_vectors(&self) -> Option<&Matrix> {
        self.output.as_ref()
    }

    /// Vector of the n-gram bucket, trained or at its initial value.
    pub fn bucket_vector(&self, bucket: u32) -> Option<Vec<f64>> {
        let sw = self.subword.as_ref()?;
        let mut out = vec![0.0; self.dim()];
        sw.add_bucket(bucket, &mut out);
        Some(out)
    }

    pub fn subword_config(&self) -> Option<&SubwordConfig> {
        self.subword.as_ref().map(|s| &s.cfg)
    }

    /// Input vector of `word`. Out-of-vocabulary words resolve through their
    /// n-grams when subwords are enabled.
    pub fn vector(&self, word: &str) -> Result<Vec<f64>> {
        if let Some(id) = self.vocab.id(word) {
            return Ok(self.composed.row(id).to_vec());
        }
        match &self.subword {
            Some(sw) => {
                let mut out = vec![0.0; self.dim()];
                for b in ngram_buckets(word, &sw.cfg) {
                    sw.add_bucket(b, &mut out);
                }
                Ok(out)
            }
            None => Err(Error::NotFound(format!("word {word:?} has no vector"))),
        }
    }

    /// Top `k` vocabulary words by cosine similarity, excluding the query.
    pub fn nearest(&self, word: &str, k: usize) -> Result<Vec<(String, f64)>> {
        if k < 1 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        let query = self.vector(word)?;
        self.nearest_to_vector(&query, k, Some(word))
    }

    pub fn nearest_to_vector(
        &self,
        query: &[f64],
        k: usize,
        exclude: Option<&str>,
    ) -> Result<Vec<(String, f64)>> {
        if query.len() != self.dim() {
            return Err(Error::InvalidInput("query dimension mismatch".into()));
        }
        let mut scored: Vec<(String, f64)> = (0..self.vocab.len())
            .filter(|&id| Some(self.vocab.word(id)) != exclude)
            .map(|id| {
                (
                    self.vocab.word(id).to_string(),
                    cosine(query, self.composed.row(id)),
                )
            })
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored)
    }

    /// Word2vec text format: `<V> <dim>` header, then `word v1 .. v_dim`.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        self.write_text(&mut out).map_err(|e| Error::io(path, e))?;
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_text<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.vocab.len(), self.dim())?;
        for id in 0..self.vocab.len() {
            write!(out, "{}", self.vocab.word(id))?;
            for x in self.composed.row(id) {
                write!(out, " {x}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_text(BufReader::new(file), &path.display().to_string())
    }

    /// Parse the word2vec text format. Counts are not stored in the format,
    /// so every loaded word gets count 0.
    pub fn read_text<R: BufRead>(reader: R, what: &str) -> Result<Self> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(line) => line.map_err(|e| Error::parse(what, 1, e.to_string()))?,
            None => return Err(Error::parse(what, 1, "empty file")),
        };
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(what, 1, format!("bad header {header:?}")))?;
        let [rows, dim] = dims[..] else {
            return Err(Error::parse(what, 1, format!("bad header {header:?}")));
        };
        if dim == 0 {
            return Err(Error::parse(what, 1, "dimension must be positive"));
        }
        let mut words = Vec::with_capacity(rows);
        let mut data = Vec::with_capacity(rows * dim);
        for (idx, line) in lines.enumerate() {
            let lineno = idx + 2;
            let line = line.map_err(|e| Error::parse(what, lineno, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            if words.len() == rows {
                return Err(Error::parse(what, lineno, format!("more than {rows} rows")));
            }
            let mut parts = line.split(' ').filter(|p| !p.is_empty());
            let word = parts.next().unwrap_or_default().to_string();
            let before = data.len();
            for p in parts {
                let x: f64 = p
                    .parse()
                    .map_err(|_| Error::parse(what, lineno, format!("bad number {p:?}")))?;
                data.push(x);
            }
            if data.len() - before != dim {
                return Err(Error::parse(
                    what,
                    lineno,
                    format!("expected {dim} values, found {}", data.len() - before),
                ));
            }
            words.push((word, 0));
        }
        if words.len() != rows {
            return Err(Error::parse(
                what,
                words.len() + 2,
                format!("header declares {rows} rows, found {}", words.len()),
            ));
        }
        let vocab = Vocabulary::from_entries(words, 0);
        if vocab.len() != rows {
            return Err(Error::parse(what, 1, "duplicate words"));
        }
        Self::from_vectors(vocab, Matrix::from_vec(rows, dim, data))
    }
}
