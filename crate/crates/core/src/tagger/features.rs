use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::EmbeddingModel;
use crate::error::{Error, Result};
use crate::text::is_digit;
use crate::vecmath::{squared_distance, Matrix};

pub trait FeatureFn {
    fn features(&self, tokens: &[String], i: usize) -> Result<Vec<String>>;
}

/// Word identity, neighbor words, 1-3 character prefixes and suffixes, a
/// numeric flag and a bias. Affix lengths count Unicode scalar values.
pub fn handcrafted_features<S: AsRef<str>>(tokens: &[S], i: usize) -> Result<Vec<String>> {
    if i >= tokens.len() {
        return Err(Error::InvalidInput(format!(
            "position {i} out of range for {} tokens",
            tokens.len()
        )));
    }
    let word = tokens[i].as_ref();
    let chars: Vec<char> = word.chars().collect();
    let mut f = Vec::with_capacity(12);
    f.push("bias".to_string());
    f.push(format!("w={word}"));
    f.push(match i.checked_sub(1) {
        Some(p) => format!("w-1={}", tokens[p].as_ref()),
        None => "BOS".to_string(),
    });
    f.push(match tokens.get(i + 1) {
        Some(n) => format!("w+1={}", n.as_ref()),
        None => "EOS".to_string(),
    });
    for n in 1..=3.min(chars.len()) {
        f.push(format!("p{n}={}", chars[..n].iter().collect::<String>()));
    }
    for n in 1..=3.min(chars.len()) {
        f.push(format!(
            "s{n}={}",
            chars[chars.len() - n..].iter().collect::<String>()
        ));
    }
    if !chars.is_empty() && chars.iter().all(|&c| is_digit(c)) {
        f.push("isnum".to_string());
    }
    Ok(f)
}

/// K-means clusters over embedding vectors, used as discrete tagger
/// features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordClusters {
    assignments: BTreeMap<String, usize>,
    centroids: Vec<Vec<f64>>,
}

impl WordClusters {
    pub const MAX_ITERATIONS: usize = 100;

    /// Lloyd's algorithm from `k` seeded distinct vocabulary rows.
    pub fn fit(model: &EmbeddingModel, k: usize, seed: u64) -> Result<Self> {
        let vocab = model.vocab();
        if k < 1 || k > vocab.len() {
            return Err(Error::Config(format!(
                "cluster count must be in 1..={}, got {k}",
                vocab.len()
            )));
        }
        let vectors: Vec<Vec<f64>> = vocab
            .words()
            .iter()
            .map(|w| model.vector(w))
            .collect::<Result<_>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picks = sample(&mut rng, vectors.len(), k).into_vec();
        picks.sort_unstable();
        let mut centroids: Vec<Vec<f64>> = picks.iter().map(|&i| vectors[i].clone()).collect();

        let mut assign = vec![usize::MAX; vectors.len()];
        for _ in 0..Self::MAX_ITERATIONS {
            let mut changed = false;
            for (v, a) in vectors.iter().zip(assign.iter_mut()) {
                let c = nearest_centroid(&centroids, v);
                changed |= *a != c;
                *a = c;
            }
            if !changed {
                break;
            }
            let dim = model.dim();
            let mut sums = Matrix::zeros(k, dim);
            let mut sizes = vec![0usize; k];
            for (v, &a) in vectors.iter().zip(&assign) {
                sizes[a] += 1;
                sums.row_mut(a).iter_mut().zip(v).for_each(|(s, x)| *s += x);
            }
            for (c, centroid) in centroids.iter_mut().enumerate() {
                // empty clusters keep their previous centroid
                if sizes[c] > 0 {
                    *centroid = sums.row(c).iter().map(|s| s / sizes[c] as f64).collect();
                }
            }
        }
        Ok(WordClusters {
            assignments: vocab.words().iter().cloned().zip(assign).collect(),
            centroids,
        })
    }

    pub fn cluster(&self, word: &str) -> Option<usize> {
        self.assignments.get(word).copied()
    }

    pub fn centroids(&self) -> &[Vec<f64>] {
        &self.centroids
    }

    pub fn nearest(&self, v: &[f64]) -> usize {
        nearest_centroid(&self.centroids, v)
    }

    fn label(&self, word: &str) -> String {
        self.cluster(word)
            .map_or_else(|| "UNK".to_string(), |c| c.to_string())
    }

    /// `cl=`, `cl-1=` and `cl+1=` features; unknown words map to `UNK`.
    pub fn features<S: AsRef<str>>(&self, tokens: &[S], i: usize) -> Result<Vec<String>> {
        if i >= tokens.len() {
            return Err(Error::InvalidInput(format!(
                "position {i} out of range for {} tokens",
                tokens.len()
            )));
        }
        Ok(vec![
            format!("cl={}", self.label(tokens[i].as_ref())),
            match i.checked_sub(1) {
                Some(p) => format!("cl-1={}", self.label(tokens[p].as_ref())),
                None => "cl-1=BOS".to_string(),
            },
            match tokens.get(i + 1) {
                Some(n) => format!("cl+1={}", self.label(n.as_ref())),
                None => "cl+1=EOS".to_string(),
            },
        ])
    }
}

fn nearest_centroid(centroids: &[Vec<f64>], v: &[f64]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centroids.iter().enumerate() {
        let d = squared_distance(c, v);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// The tagger's feature template: handcrafted features, embedding cluster
/// features, or both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSet {
    pub handcrafted: bool,
    pub clusters: Option<WordClusters>,
}

impl Default for FeatureSet {
    fn default() -> Self {
        FeatureSet {
            handcrafted: true,
            clusters: None,
        }
    }
}

impl FeatureSet {
    pub fn handcrafted() -> Self {
        Self::default()
    }

    /// Build the template. Asking for cluster features without an embedding
    /// model is a configuration error.
    pub fn with_embeddings(
        handcrafted: bool,
        clusters: usize,
        model: Option<&EmbeddingModel>,
        seed: u64,
    ) -> Result<Self> {
        let clusters = match (clusters, model) {
            (0, _) => None,
            (k, Some(m)) => Some(WordClusters::fit(m, k, seed)?),
            (_, None) => {
                return Err(Error::Config(
                    "embedding cluster features need an embedding model".into(),
                ))
            }
        };
        if !handcrafted && clusters.is_none() {
            return Err(Error::Config("feature set is empty".into()));
        }
        Ok(FeatureSet {
            handcrafted,
            clusters,
        })
    }
}

impl FeatureFn for FeatureSet {
    fn features(&self, tokens: &[String], i: usize) -> Result<Vec<String>> {
        let mut f = if self.handcrafted {
            handcrafted_features(tokens, i)?
        } else {
            vec!["bias".to_string()]
        };
        if let Some(c) = &self.clusters {
            f.extend(c.features(tokens, i)?);
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Vocabulary;

    fn set(v: &[String]) -> std::collections::BTreeSet<&str> {
        v.iter().map(String::as_str).collect()
    }

    #[test]
    fn three_scalar_word() {
        let f = handcrafted_features(&["ሀገር"], 0).unwrap();
        let expected = [
            "bias",
            "w=ሀገር",
            "BOS",
            "EOS",
            "p1=ሀ",
            "p2=ሀገ",
            "p3=ሀገር",
            "s1=ር",
            "s2=ገር",
            "s3=ሀገር",
        ];
        assert_eq!(set(&f), expected.into_iter().collect());
        assert_eq!(f.len(), expected.len());
    }

    #[test]
    fn numbers_and_short_words() {
        let f = handcrafted_features(&["በ", "2020", "ዓ"], 1).unwrap();
        assert!(f.contains(&"isnum".to_string()));
        assert!(f.contains(&"w-1=በ".to_string()) && f.contains(&"w+1=ዓ".to_string()));
        let f = handcrafted_features(&["ሀ"], 0).unwrap();
        assert!(f.contains(&"p1=ሀ".to_string()) && f.contains(&"s1=ሀ".to_string()));
        assert!(!f
            .iter()
            .any(|x| x.starts_with("p2") || x.starts_with("s2") || x.starts_with("p3")));
        assert!(!f.contains(&"isnum".to_string()));
        assert!(handcrafted_features(&["ሀ"], 1).is_err());
    }

    fn blob_model() -> EmbeddingModel {
        let mut words = Vec::new();
        let mut data = Vec::new();
        for i in 0..6 {
            words.push((format!("a{i}"), 1));
            data.extend([10.0 + 0.1 * i as f64, 10.0 - 0.05 * i as f64]);
            words.push((format!("b{i}"), 1));
            data.extend([-10.0 - 0.1 * i as f64, -10.0 + 0.07 * i as f64]);
        }
        let vocab = Vocabulary::from_entries(words, 12);
        EmbeddingModel::from_vectors(vocab, Matrix::from_vec(12, 2, data)).unwrap()
    }

    #[test]
    fn clusters_separate_blobs() {
        let c = WordClusters::fit(&blob_model(), 2, 5).unwrap();
        let a = c.cluster("a0").unwrap();
        let b = c.cluster("b0").unwrap();
        assert_ne!(a, b);
        for i in 0..6 {
            assert_eq!(c.cluster(&format!("a{i}")), Some(a));
            assert_eq!(c.cluster(&format!("b{i}")), Some(b));
        }
        let f = c.features(&["a1", "zz", "b2"], 1).unwrap();
        assert_eq!(
            f,
            vec![
                "cl=UNK".to_string(),
                format!("cl-1={a}"),
                format!("cl+1={b}")
            ]
        );
    }

    #[test]
    fn cluster_features_need_a_model() {
        assert!(matches!(
            FeatureSet::with_embeddings(true, 4, None, 0),
            Err(Error::Config(_))
        ));
        assert!(FeatureSet::with_embeddings(true, 0, None, 0).is_ok());
    }
}
