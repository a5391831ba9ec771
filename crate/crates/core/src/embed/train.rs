use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::objective::{cbow_loss, mean, ns_loss, ns_step};
use super::{
    init_scale, initial_bucket_vector, ngram_buckets, EmbedConfig, EmbeddingModel, Mode,
    SubwordVectors,
};
use crate::corpus::{build_vocab, Vocabulary};
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::vecmath::{axpy, Matrix, SharedMatrix};

/// Draws negative examples from the unigram distribution raised to 0.75.
#[derive(Debug, Clone)]
pub struct NoiseSampler {
    dist: WeightedIndex<f64>,
    probs: Vec<f64>,
}

impl NoiseSampler {
    pub const POWER: f64 = 0.75;

    pub fn new(counts: &[u64]) -> Result<Self> {
        let weights: Vec<f64> = counts
            .iter()
            .map(|&c| (c as f64).powf(Self::POWER))
            .collect();
        let total: f64 = weights.iter().sum();
        let dist = WeightedIndex::new(&weights)
            .map_err(|e| Error::InvalidInput(format!("cannot build noise distribution: {e}")))?;
        Ok(NoiseSampler {
            dist,
            probs: weights.iter().map(|w| w / total).collect(),
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        self.dist.sample(rng)
    }
}

/// Probability of keeping one occurrence of a word seen `count` times out
/// of `total`. Words with relative frequency at or below `t` are always kept.
pub fn subsample_keep_probability(count: u64, total: u64, t: f64) -> f64 {
    if t <= 0.0 || count == 0 {
        return 1.0;
    }
    let threshold = t * total as f64;
    let c = count as f64;
    ((c / threshold).sqrt() + 1.0) * threshold / c
}

/// Stateful trainer exposing per-epoch control and loss evaluation.
pub struct Trainer {
    cfg: EmbedConfig,
    vocab: Vocabulary,
    sentences: Vec<Vec<usize>>,
    input: SharedMatrix,
    output: SharedMatrix,
    /// Input rows that sum to each word's vector (word row first).
    components: Vec<Vec<usize>>,
    bucket_rows: HashMap<u32, usize>,
    noise: NoiseSampler,
    keep: Vec<f64>,
    processed: AtomicU64,
    total_work: u64,
    epoch: usize,
}

impl Trainer {
    pub fn new<S: AsRef<str>>(sentences: &[Vec<S>], cfg: &EmbedConfig) -> Result<Self> {
        cfg.validate()?;
        let vocab = build_vocab(sentences, cfg.min_count)?;
        let ids: Vec<Vec<usize>> = sentences
            .iter()
            .map(|s| {
                s.iter()
                    .filter_map(|w| vocab.id(w.as_ref()))
                    .collect::<Vec<_>>()
            })
            .filter(|s| !s.is_empty())
            .collect();
        if !ids.iter().any(|s| s.len() >= 2) {
            return Err(Error::InvalidInput(
                "corpus needs at least one sentence with two in-vocabulary tokens".into(),
            ));
        }

        let dim = cfg.dim;
        let v = vocab.len();
        let mut components: Vec<Vec<usize>> = (0..v).map(|id| vec![id]).collect();
        let mut bucket_rows: HashMap<u32, usize> = HashMap::new();
        let mut bucket_order = Vec::new();
        if let Some(sw) = &cfg.subword {
            for (id, comp) in components.iter_mut().enumerate() {
                for b in ngram_buckets(vocab.word(id), sw) {
                    let row = *bucket_rows.entry(b).or_insert_with(|| {
                        bucket_order.push(b);
                        v + bucket_order.len() - 1
                    });
                    comp.push(row);
                }
            }
        }

        let mut init = Vec::with_capacity((v + bucket_order.len()) * dim);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let s = init_scale(dim);
        for _ in 0..v * dim {
            init.push(rng.gen_range(-s..s));
        }
        for &b in &bucket_order {
            init.extend(initial_bucket_vector(cfg.seed, b, dim));
        }
        let input = SharedMatrix::from_matrix(&Matrix::from_vec(v + bucket_order.len(), dim, init));
        let output = SharedMatrix::from_matrix(&Matrix::zeros(v, dim));

        let in_vocab_total: u64 = vocab.counts().iter().sum();
        let keep = vocab
            .counts()
            .iter()
            .map(|&c| subsample_keep_probability(c, in_vocab_total, cfg.subsample_t))
            .collect();
        let noise = NoiseSampler::new(vocab.counts())?;
        let total_work = cfg.epochs as u64 * ids.iter().map(|s| s.len() as u64).sum::<u64>();

        Ok(Trainer {
            cfg: cfg.clone(),
            vocab,
            sentences: ids,
            input,
            output,
            components,
            bucket_rows,
            noise,
            keep,
            processed: AtomicU64::new(0),
            total_work,
            epoch: 0,
        })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn epochs_done(&self) -> usize {
        self.epoch
    }

    fn learning_rate(&self, processed: u64) -> f64 {
        let frac = 1.0 - processed as f64 / (self.total_work + 1) as f64;
        self.cfg.initial_lr * frac.max(1e-4)
    }

    fn compose(&self, word: usize, out: &mut [f64], scratch: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for &r in &self.components[word] {
            self.input.read_row(r, scratch);
            axpy(1.0, scratch, out);
        }
    }

    fn draw_negatives(&self, rng: &mut ChaCha8Rng, out: &mut Vec<usize>) {
        out.clear();
        out.extend((0..self.cfg.negatives).map(|_| self.noise.sample(rng)));
    }

    /// Run one pass over the corpus. Returns the mean per-example loss seen
    /// during the pass.
    pub fn run_epoch(&mut self) -> f64 {
        let epoch = self.epoch as u64;
        let workers = self.cfg.workers.min(self.sentences.len()).max(1);
        let (loss, examples) = if workers == 1 {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[self.cfg.seed, epoch, 0]));
            self.process(&self.sentences, &mut rng)
        } else {
            let chunk = self.sentences.len().div_ceil(workers);
            let this = &*self;
            std::thread::scope(|scope| {
                let handles: Vec<_> = this
                    .sentences
                    .chunks(chunk)
                    .enumerate()
                    .map(|(w, shard)| {
                        scope.spawn(move || {
                            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[
                                this.cfg.seed,
                                epoch,
                                w as u64,
                            ]));
                            this.process(shard, &mut rng)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("training worker panicked"))
                    .fold((0.0, 0u64), |a, b| (a.0 + b.0, a.1 + b.1))
            })
        };
        self.epoch += 1;
        if examples == 0 {
            0.0
        } else {
            loss / examples as f64
        }
    }

    fn process(&self, shard: &[Vec<usize>], rng: &mut ChaCha8Rng) -> (f64, u64) {
        let dim = self.cfg.dim;
        let mut h = vec![0.0; dim];
        let mut h_step = vec![0.0; dim];
        let mut scratch = vec![0.0; dim];
        let mut ctx_vec = vec![0.0; dim];
        let mut negs = Vec::with_capacity(self.cfg.negatives);
        let mut kept = Vec::new();
        let mut loss = 0.0;
        let mut examples = 0u64;

        for sentence in shard {
            let base = self
                .processed
                .fetch_add(sentence.len() as u64, Ordering::Relaxed);
            kept.clear();
            for &w in sentence {
                let p = self.keep[w];
                if p >= 1.0 || rng.gen::<f64>() < p {
                    kept.push(w);
                }
            }
            for i in 0..kept.len() {
                let lr = self.learning_rate(base + i as u64);
                let span = self.cfg.window - rng.gen_range(0..self.cfg.window);
                let lo = i.saturating_sub(span);
                let hi = (i + span).min(kept.len() - 1);
                let center = kept[i];
                match self.cfg.mode {
                    Mode::Skipgram => {
                        for j in (lo..=hi).filter(|&j| j != i) {
                            self.compose(center, &mut h, &mut scratch);
                            self.draw_negatives(rng, &mut negs);
                            h_step.iter_mut().for_each(|x| *x = 0.0);
                            loss += ns_step(
                                &h,
                                kept[j],
                                &negs,
                                &self.output,
                                lr,
                                &mut h_step,
                                &mut scratch,
                            );
                            examples += 1;
                            for &r in &self.components[center] {
                                self.input.add_to_row(r, 1.0, &h_step);
                            }
                        }
                    }
                    Mode::Cbow => {
                        let contexts: Vec<usize> =
                            (lo..=hi).filter(|&j| j != i).map(|j| kept[j]).collect();
                        if contexts.is_empty() {
                            continue;
                        }
                        h.iter_mut().for_each(|x| *x = 0.0);
                        for &c in &contexts {
                            self.compose(c, &mut ctx_vec, &mut scratch);
                            axpy(1.0, &ctx_vec, &mut h);
                        }
                        let n = contexts.len() as f64;
                        h.iter_mut().for_each(|x| *x /= n);
                        self.draw_negatives(rng, &mut negs);
                        h_step.iter_mut().for_each(|x| *x = 0.0);
                        loss += ns_step(
                            &h,
                            center,
                            &negs,
                            &self.output,
                            lr,
                            &mut h_step,
                            &mut scratch,
                        );
                        examples += 1;
                        for &c in &contexts {
                            for &r in &self.components[c] {
                                self.input.add_to_row(r, 1.0 / n, &h_step);
                            }
                        }
                    }
                }
            }
        }
        (loss, examples)
    }

    /// Mean objective over every (input, target) example of the corpus with
    /// the full window, no subsampling and a fixed negative draw. Does not
    /// update parameters.
    pub fn mean_loss(&self) -> f64 {
        let dim = self.cfg.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[self.cfg.seed, u64::MAX]));
        let mut scratch = vec![0.0; dim];
        let mut negs = Vec::new();
        let out_row = |id: usize| {
            let mut v = vec![0.0; dim];
            self.output.read_row(id, &mut v);
            v
        };
        let word_vec = |id: usize, scratch: &mut [f64]| {
            let mut v = vec![0.0; dim];
            self.compose(id, &mut v, scratch);
            v
        };
        let (mut total, mut n) = (0.0, 0u64);
        for s in &self.sentences {
            for i in 0..s.len() {
                let lo = i.saturating_sub(self.cfg.window);
                let hi = (i + self.cfg.window).min(s.len() - 1);
                match self.cfg.mode {
                    Mode::Skipgram => {
                        let h = word_vec(s[i], &mut scratch);
                        for j in (lo..=hi).filter(|&j| j != i) {
                            self.draw_negatives(&mut rng, &mut negs);
                            let neg_rows: Vec<Vec<f64>> = negs
                                .iter()
                                .filter(|&&x| x != s[j])
                                .map(|&x| out_row(x))
                                .collect();
                            let refs: Vec<&[f64]> = neg_rows.iter().map(Vec::as_slice).collect();
                            total += ns_loss(&h, &out_row(s[j]), &refs);
                            n += 1;
                        }
                    }
                    Mode::Cbow => {
                        let ctx: Vec<Vec<f64>> = (lo..=hi)
                            .filter(|&j| j != i)
                            .map(|j| word_vec(s[j], &mut scratch))
                            .collect();
                        if ctx.is_empty() {
                            continue;
                        }
                        self.draw_negatives(&mut rng, &mut negs);
                        let neg_rows: Vec<Vec<f64>> = negs
                            .iter()
                            .filter(|&&x| x != s[i])
                            .map(|&x| out_row(x))
                            .collect();
                        let refs: Vec<&[f64]> = neg_rows.iter().map(Vec::as_slice).collect();
                        let ctx_refs: Vec<&[f64]> = ctx.iter().map(Vec::as_slice).collect();
                        debug_assert_eq!(mean(&ctx_refs).len(), dim);
                        total += cbow_loss(&ctx_refs, &out_row(s[i]), &refs);
                        n += 1;
                    }
                }
            }
        }
        if n == 0 {
            0.0
        } else {
            total / n as f64
        }
    }

    /// Snapshot the current parameters as a model.
    pub fn model(&self) -> Result<EmbeddingModel> {
        let all = self.input.to_matrix();
        let v = self.vocab.len();
        let dim = self.cfg.dim;
        let words = Matrix::from_vec(v, dim, all.as_slice()[..v * dim].to_vec());
        let subword = self.cfg.subword.map(|cfg| SubwordVectors {
            cfg,
            seed: self.cfg.seed,
            rows: self.bucket_rows.iter().map(|(&b, &r)| (b, r - v)).collect(),
            vectors: Matrix::from_vec(all.rows() - v, dim, all.as_slice()[v * dim..].to_vec()),
        });
        EmbeddingModel::assemble(
            self.vocab.clone(),
            words,
            subword,
            Some(self.output.to_matrix()),
        )
    }

    pub fn finish(self) -> Result<EmbeddingModel> {
        self.model()
    }
}

/// Train embeddings for `cfg.epochs` passes over `sentences`.
pub fn train<S: AsRef<str>>(sentences: &[Vec<S>], cfg: &EmbedConfig) -> Result<EmbeddingModel> {
    let mut trainer = Trainer::new(sentences, cfg)?;
    for _ in 0..cfg.epochs {
        let loss = trainer.run_epoch();
        log::debug!("epoch {} mean loss {loss:.6}", trainer.epochs_done());
    }
    trainer.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::sentences_from_lines;

    fn small_cfg(mode: Mode) -> EmbedConfig {
        EmbedConfig {
            dim: 8,
            min_count: 1,
            mode,
            epochs: 3,
            subsample_t: 0.0,
            ..Default::default()
        }
    }

    #[test]
    fn keep_probability_bounds() {
        assert!(subsample_keep_probability(1, 10_000, 1e-3) > 1.0);
        assert!(subsample_keep_probability(5_000, 10_000, 1e-3) < 1.0);
        assert_eq!(subsample_keep_probability(5, 10, 0.0), 1.0);
    }

    #[test]
    fn degenerate_corpus_is_rejected() {
        let c = sentences_from_lines(&["a", "b"]);
        assert!(Trainer::new(&c, &small_cfg(Mode::Skipgram)).is_err());
        let empty: Vec<Vec<String>> = vec![];
        assert!(train(&empty, &small_cfg(Mode::Skipgram)).is_err());
    }

    #[test]
    fn skipgram_loss_decreases() {
        let corpus = vec![vec!["a".to_string(), "b".to_string()]; 100];
        let mut t = Trainer::new(&corpus, &small_cfg(Mode::Skipgram)).unwrap();
        let before = t.mean_loss();
        for _ in 0..3 {
            t.run_epoch();
        }
        assert!(t.mean_loss() < before);
    }

    #[test]
    fn single_worker_is_bit_deterministic() {
        let corpus = sentences_from_lines(&["a b c d", "b c d e", "c d e a"]);
        for mode in [Mode::Skipgram, Mode::Cbow] {
            let cfg = EmbedConfig {
                subword: Some(super::super::SubwordConfig {
                    ngram_len: 3,
                    bucket_count: 97,
                }),
                ..small_cfg(mode)
            };
            let a = train(&corpus, &cfg).unwrap();
            let b = train(&corpus, &cfg).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn parallel_workers_produce_finite_model() {
        let corpus: Vec<Vec<String>> = (0..200)
            .map(|i| sentences_from_lines(&[format!("a{} b{} c{}", i % 7, i % 5, i % 3)]).remove(0))
            .collect();
        let cfg = EmbedConfig {
            workers: 4,
            ..small_cfg(Mode::Cbow)
        };
        let m = train(&corpus, &cfg).unwrap();
        assert!(m.word_rows().is_finite());
        assert_eq!(m.vocab().len(), 15);
    }
}
