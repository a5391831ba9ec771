use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{FeatureFn, FeatureSet};
use super::viterbi::{decode, Scores};
use super::TaggedSequence;
use crate::error::{Error, Result};

/// Trained linear-chain tagger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggerModel {
    pub tags: Vec<String>,
    /// Feature name to one weight per tag.
    pub feature_weights: BTreeMap<String, Vec<f64>>,
    pub scores: Scores,
    pub averaged: bool,
    pub features: FeatureSet,
}

impl TaggerModel {
    fn emissions(&self, tokens: &[String], feature_fn: &dyn FeatureFn) -> Result<Vec<Vec<f64>>> {
        (0..tokens.len())
            .map(|i| {
                let mut row = vec![0.0; self.tags.len()];
                for f in feature_fn.features(tokens, i)? {
                    if let Some(w) = self.feature_weights.get(&f) {
                        row.iter_mut().zip(w).for_each(|(r, x)| *r += x);
                    }
                }
                Ok(row)
            })
            .collect()
    }

    /// Exact best tag sequence under the model.
    pub fn viterbi(&self, tokens: &[String], feature_fn: &dyn FeatureFn) -> Result<Vec<String>> {
        if tokens.is_empty() {
            return Err(Error::InvalidInput("cannot tag an empty sequence".into()));
        }
        let path = decode(&self.emissions(tokens, feature_fn)?, &self.scores);
        Ok(path.into_iter().map(|t| self.tags[t].clone()).collect())
    }

    /// Tag with the model's own feature template.
    pub fn tag(&self, tokens: &[String]) -> Result<Vec<String>> {
        self.viterbi(tokens, &self.features)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, serde_json::to_vec(self)?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub seed: u64,
    /// Closed tagset; labels outside it are rejected. Inferred from the data
    /// when absent.
    pub tagset: Option<Vec<String>>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 10,
            seed: 42,
            tagset: None,
        }
    }
}

/// Averaged structured perceptron.
///
/// Parameters live in one flat vector: per-feature tag weights, then start,
/// end and tag-to-tag transition scores. Averaging follows the
/// `w - u / steps` identity, where every update at step `t` adds
/// `(t - 1) * delta` to `u`.
pub struct PerceptronTrainer {
    tags: Vec<String>,
    feature_names: Vec<String>,
    feature_index: HashMap<String, usize>,
    features: FeatureSet,
    weights: Vec<f64>,
    accum: Vec<f64>,
    steps: u64,
}

impl PerceptronTrainer {
    pub fn new(tags: Vec<String>, features: FeatureSet) -> Result<Self> {
        if tags.is_empty() {
            return Err(Error::InvalidInput("tagset is empty".into()));
        }
        Ok(PerceptronTrainer {
            tags,
            feature_names: Vec::new(),
            feature_index: HashMap::new(),
            features,
            weights: Vec::new(),
            accum: Vec::new(),
            steps: 0,
        })
    }

    fn n(&self) -> usize {
        self.tags.len()
    }

    fn chain_offset(&self) -> usize {
        self.feature_names.len() * self.n()
    }

    fn ensure_capacity(&mut self) {
        let n = self.n();
        let want = self.feature_names.len() * n + 2 * n + n * n;
        if self.weights.len() == want {
            return;
        }
        // feature rows grow in front of the chain block
        let chain_len = 2 * n + n * n;
        let grow = |v: &mut Vec<f64>| {
            let chain: Vec<f64> = if v.is_empty() {
                vec![0.0; chain_len]
            } else {
                v.split_off(v.len() - chain_len)
            };
            v.resize(want - chain_len, 0.0);
            v.extend(chain);
        };
        grow(&mut self.weights);
        grow(&mut self.accum);
    }

    fn intern(&mut self, name: String) -> usize {
        if let Some(&id) = self.feature_index.get(&name) {
            return id;
        }
        let id = self.feature_names.len();
        self.feature_index.insert(name.clone(), id);
        self.feature_names.push(name);
        id
    }

    fn featurize(&mut self, seq: &TaggedSequence) -> Result<(Vec<Vec<usize>>, Vec<usize>)> {
        let mut feats = Vec::with_capacity(seq.len());
        for i in 0..seq.len() {
            let names = self.features.features(seq.tokens(), i)?;
            feats.push(names.into_iter().map(|f| self.intern(f)).collect());
        }
        self.ensure_capacity();
        let gold = seq
            .labels()
            .iter()
            .map(|l| {
                self.tags
                    .iter()
                    .position(|t| t == l)
                    .ok_or_else(|| Error::InvalidInput(format!("unknown tag {l:?}")))
            })
            .collect::<Result<_>>()?;
        Ok((feats, gold))
    }

    fn scores_of(&self, w: &[f64]) -> Scores {
        let (n, c) = (self.n(), self.chain_offset());
        Scores {
            start: w[c..c + n].to_vec(),
            end: w[c + n..c + 2 * n].to_vec(),
            transitions: w[c + 2 * n..c + 2 * n + n * n].to_vec(),
        }
    }

    fn decode_with_current(&self, feats: &[Vec<usize>]) -> Vec<usize> {
        let n = self.n();
        let emissions: Vec<Vec<f64>> = feats
            .iter()
            .map(|fs| {
                let mut row = vec![0.0; n];
                for &f in fs {
                    row.iter_mut()
                        .zip(&self.weights[f * n..(f + 1) * n])
                        .for_each(|(r, x)| *r += x);
                }
                row
            })
            .collect();
        decode(&emissions, &self.scores_of(&self.weights))
    }

    fn path_indices(&self, feats: &[Vec<usize>], path: &[usize]) -> Vec<usize> {
        let (n, c) = (self.n(), self.chain_offset());
        let mut idx = Vec::new();
        for (i, &t) in path.iter().enumerate() {
            idx.extend(feats[i].iter().map(|&f| f * n + t));
            idx.push(match i {
                0 => c + t,
                _ => c + 2 * n + path[i - 1] * n + t,
            });
        }
        if let Some(&last) = path.last() {
            idx.push(c + n + last);
        }
        idx
    }

    /// One perceptron step on `seq`. Returns whether the prediction was
    /// wrong (and weights changed).
    pub fn train_sequence(&mut self, seq: &TaggedSequence) -> Result<bool> {
        let (feats, gold) = self.featurize(seq)?;
        Ok(self.step(&feats, &gold))
    }

    fn step(&mut self, feats: &[Vec<usize>], gold: &[usize]) -> bool {
        self.steps += 1;
        let pred = self.decode_with_current(feats);
        if pred == gold {
            return false;
        }
        let scale = (self.steps - 1) as f64;
        for (indices, delta) in [
            (self.path_indices(feats, gold), 1.0),
            (self.path_indices(feats, &pred), -1.0),
        ] {
            for i in indices {
                self.weights[i] += delta;
                self.accum[i] += scale * delta;
            }
        }
        true
    }

    /// Current (non-averaged) parameters, flat.
    pub fn current_parameters(&self) -> &[f64] {
        &self.weights
    }

    /// Mean of the parameter vectors after every step so far, flat.
    pub fn averaged_parameters(&self) -> Vec<f64> {
        if self.steps == 0 {
            return self.weights.clone();
        }
        let s = self.steps as f64;
        self.weights
            .iter()
            .zip(&self.accum)
            .map(|(w, u)| w - u / s)
            .collect()
    }

    fn export(&self, params: &[f64], averaged: bool) -> TaggerModel {
        let n = self.n();
        let feature_weights = self
            .feature_names
            .iter()
            .enumerate()
            .filter_map(|(f, name)| {
                let w = &params[f * n..(f + 1) * n];
                w.iter()
                    .any(|&x| x != 0.0)
                    .then(|| (name.clone(), w.to_vec()))
            })
            .collect();
        TaggerModel {
            tags: self.tags.clone(),
            feature_weights,
            scores: self.scores_of(params),
            averaged,
            features: self.features.clone(),
        }
    }

    pub fn averaged_model(&self) -> TaggerModel {
        self.export(&self.averaged_parameters(), true)
    }

    pub fn current_model(&self) -> TaggerModel {
        self.export(&self.weights, false)
    }
}

/// Collect the tagset, checking it against `cfg.tagset` when given.
fn resolve_tagset(data: &[TaggedSequence], cfg: &TrainConfig) -> Result<Vec<String>> {
    let seen: BTreeSet<&str> = data
        .iter()
        .flat_map(|s| s.labels().iter().map(String::as_str))
        .collect();
    match &cfg.tagset {
        None => Ok(seen.into_iter().map(str::to_string).collect()),
        Some(tags) => {
            let known: BTreeSet<&str> = tags.iter().map(String::as_str).collect();
            let unknown: Vec<&str> = seen.difference(&known).copied().collect();
            if !unknown.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "unknown tags: {}",
                    unknown.join(", ")
                )));
            }
            Ok(tags.clone())
        }
    }
}

/// Train an averaged structured perceptron, shuffling the data every epoch.
pub fn train(
    data: &[TaggedSequence],
    cfg: &TrainConfig,
    features: FeatureSet,
) -> Result<TaggerModel> {
    if data.is_empty() {
        return Err(Error::InvalidInput("no training sequences".into()));
    }
    if cfg.epochs < 1 {
        return Err(Error::Config("epochs must be at least 1".into()));
    }
    let mut trainer = PerceptronTrainer::new(resolve_tagset(data, cfg)?, features)?;
    let mut prepared = Vec::with_capacity(data.len());
    for seq in data {
        prepared.push(trainer.featurize(seq)?);
    }
    trainer.ensure_capacity();
    let mut order: Vec<usize> = (0..prepared.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut mistakes = 0;
        for &i in &order {
            let (feats, gold) = &prepared[i];
            mistakes += trainer.step(feats, gold) as usize;
        }
        log::debug!("tagger epoch {epoch}: {mistakes} mistakes");
    }
    Ok(trainer.averaged_model())
}
