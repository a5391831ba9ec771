//! Document classification: TF-IDF features, multinomial logistic
//! regression and label-only baselines.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{macro_average, weighted_average, Counts, Prf};
use crate::text::{preprocess, NormalizationTable};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDocument {
    pub tokens: Vec<String>,
    pub label: String,
}

/// Read `label<TAB>text` lines. Without a table the text is split on
/// whitespace; with one it goes through full preprocessing.
pub fn read_labeled(
    path: impl AsRef<Path>,
    raw: Option<&NormalizationTable>,
) -> Result<Vec<LabeledDocument>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_labeled(BufReader::new(file), &path.display().to_string(), raw)
}

pub fn parse_labeled<R: BufRead>(
    reader: R,
    what: &str,
    raw: Option<&NormalizationTable>,
) -> Result<Vec<LabeledDocument>> {
    let mut docs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(what, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let (label, text) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(what, i + 1, "expected label<TAB>text"))?;
        if label.is_empty() {
            return Err(Error::parse(what, i + 1, "empty label"));
        }
        let tokens = match raw {
            Some(table) => preprocess(text, table).concat(),
            None => text.split_whitespace().map(str::to_string).collect(),
        };
        docs.push(LabeledDocument {
            tokens,
            label: label.to_string(),
        });
    }
    Ok(docs)
}

/// Sparse vector as `(column, value)` pairs in increasing column order.
pub type SparseVector = Vec<(usize, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "TfidfRepr", into = "TfidfRepr")]
pub struct TfidfModel {
    terms: Vec<String>,
    idf: Vec<f64>,
    doc_count: usize,
    index: BTreeMap<String, usize>,
}

#[derive(Clone, Serialize, Deserialize)]
struct TfidfRepr {
    terms: Vec<String>,
    idf: Vec<f64>,
    doc_count: usize,
}

impl From<TfidfRepr> for TfidfModel {
    fn from(r: TfidfRepr) -> Self {
        TfidfModel::from_parts(r.terms, r.idf, r.doc_count)
    }
}

impl From<TfidfModel> for TfidfRepr {
    fn from(m: TfidfModel) -> Self {
        TfidfRepr {
            terms: m.terms,
            idf: m.idf,
            doc_count: m.doc_count,
        }
    }
}

/// Smoothed inverse document frequency.
pub fn smoothed_idf(doc_count: usize, df: usize) -> f64 {
    ((1.0 + doc_count as f64) / (1.0 + df as f64)).ln() + 1.0
}

pub fn fit_tfidf<D: AsRef<[S]>, S: AsRef<str>>(docs: &[D]) -> Result<TfidfModel> {
    if docs.is_empty() {
        return Err(Error::InvalidInput("no documents to fit".into()));
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let distinct: BTreeSet<&str> = doc.as_ref().iter().map(AsRef::as_ref).collect();
        for t in distinct {
            *df.entry(t).or_default() += 1;
        }
    }
    if df.is_empty() {
        return Err(Error::InvalidInput("all documents are empty".into()));
    }
    let terms: Vec<String> = df.keys().map(|t| t.to_string()).collect();
    let idf = df.values().map(|&d| smoothed_idf(docs.len(), d)).collect();
    Ok(TfidfModel::from_parts(terms, idf, docs.len()))
}

impl TfidfModel {
    fn from_parts(terms: Vec<String>, idf: Vec<f64>, doc_count: usize) -> Self {
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        TfidfModel {
            terms,
            idf,
            doc_count,
            index,
        }
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn column(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.column(term).map(|c| self.idf[c])
    }

    /// Counts times idf, L2-normalized. Unknown terms are dropped and an
    /// all-zero result is returned as is.
    pub fn transform<S: AsRef<str>>(&self, doc: &[S]) -> SparseVector {
        let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
        for t in doc {
            if let Some(c) = self.column(t.as_ref()) {
                *tf.entry(c).or_default() += 1.0;
            }
        }
        let mut v: SparseVector = tf.into_iter().map(|(c, n)| (c, n * self.idf[c])).collect();
        let norm = v.iter().map(|(_, x)| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|(_, x)| *x /= norm);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogRegConfig {
    pub l2: f64,
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            l2: 1e-4,
            epochs: 30,
            lr: 0.5,
            batch_size: 16,
            seed: 42,
        }
    }
}

impl LogRegConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(Error::Config(
                "l2 must be a finite non-negative number".into(),
            ));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Config("lr must be positive".into()));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::Config(
                "epochs and batch_size must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Multinomial logistic regression. `weights` is row-major,
/// classes by features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearClassifier {
    pub classes: Vec<String>,
    pub n_features: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    z.iter_mut().for_each(|v| *v /= sum);
}

impl LinearClassifier {
    pub fn zeros(classes: Vec<String>, n_features: usize) -> Self {
        let k = classes.len();
        LinearClassifier {
            classes,
            n_features,
            weights: vec![0.0; k * n_features],
            bias: vec![0.0; k],
        }
    }

    fn logits(&self, x: &[(usize, f64)]) -> Vec<f64> {
        let f = self.n_features;
        (0..self.classes.len())
            .map(|k| {
                let row = &self.weights[k * f..(k + 1) * f];
                self.bias[k]
                    + x.iter()
                        .filter(|(c, _)| *c < f)
                        .map(|&(c, v)| row[c] * v)
                        .sum::<f64>()
            })
            .collect()
    }

    pub fn predict_proba(&self, x: &[(usize, f64)]) -> Vec<f64> {
        let mut z = self.logits(x);
        softmax_in_place(&mut z);
        z
    }

    /// Most probable class; ties go to the earlier class.
    pub fn predict(&self, x: &[(usize, f64)]) -> &str {
        let p = self.logits(x);
        let mut best = 0;
        for k in 1..p.len() {
            if p[k] > p[best] {
                best = k;
            }
        }
        &self.classes[best]
    }

    /// Mean cross-entropy over `(x, y)` plus `l2 / 2 * |W|^2`. The bias is
    /// not penalized.
    pub fn objective(&self, x: &[SparseVector], y: &[usize], l2: f64) -> f64 {
        let ce: f64 = x
            .iter()
            .zip(y)
            .map(|(xi, &yi)| {
                let z = self.logits(xi);
                let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
                lse - z[yi]
            })
            .sum();
        ce / x.len() as f64 + 0.5 * l2 * self.weights.iter().map(|w| w * w).sum::<f64>()
    }

    /// Gradient of [`objective`](Self::objective) as `(d_weights, d_bias)`.
    pub fn gradient(&self, x: &[SparseVector], y: &[usize], l2: f64) -> (Vec<f64>, Vec<f64>) {
        let f = self.n_features;
        let mut gw: Vec<f64> = self.weights.iter().map(|w| l2 * w).collect();
        let mut gb = vec![0.0; self.classes.len()];
        let scale = 1.0 / x.len() as f64;
        for (xi, &yi) in x.iter().zip(y) {
            let mut p = self.predict_proba(xi);
            p[yi] -= 1.0;
            for (k, d) in p.iter().enumerate() {
                gb[k] += scale * d;
                for &(c, v) in xi.iter().filter(|(c, _)| *c < f) {
                    gw[k * f + c] += scale * d * v;
                }
            }
        }
        (gw, gb)
    }

    fn apply(&mut self, (gw, gb): (Vec<f64>, Vec<f64>), lr: f64) {
        self.weights
            .iter_mut()
            .zip(gw)
            .for_each(|(w, g)| *w -= lr * g);
        self.bias.iter_mut().zip(gb).for_each(|(b, g)| *b -= lr * g);
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == label)
    }
}

/// Fit by mini-batch SGD, reshuffling every epoch. Classes are ordered
/// lexicographically.
pub fn train_logreg<S: AsRef<str>>(
    x: &[SparseVector],
    y: &[S],
    n_features: usize,
    cfg: &LogRegConfig,
) -> Result<LinearClassifier> {
    cfg.validate()?;
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "{} rows but {} labels",
            x.len(),
            y.len()
        )));
    }
    let classes: BTreeSet<&str> = y.iter().map(AsRef::as_ref).collect();
    if classes.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 classes, found {}",
            classes.len()
        )));
    }
    let mut clf =
        LinearClassifier::zeros(classes.iter().map(|c| c.to_string()).collect(), n_features);
    let yi: Vec<usize> = y
        .iter()
        .map(|l| clf.class_index(l.as_ref()).unwrap())
        .collect();
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let bx: Vec<SparseVector> = batch.iter().map(|&i| x[i].clone()).collect();
            let by: Vec<usize> = batch.iter().map(|&i| yi[i]).collect();
            let g = clf.gradient(&bx, &by, cfg.l2);
            clf.apply(g, cfg.lr);
        }
        log::debug!(
            "logreg epoch {epoch}: objective {:.6}",
            clf.objective(x, &yi, cfg.l2)
        );
    }
    Ok(clf)
}

/// TF-IDF vectorizer and classifier saved together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextClassifier {
    pub tfidf: TfidfModel,
    pub classifier: LinearClassifier,
}

impl TextClassifier {
    pub fn fit(docs: &[LabeledDocument], cfg: &LogRegConfig) -> Result<Self> {
        let tokens: Vec<&[String]> = docs.iter().map(|d| d.tokens.as_slice()).collect();
        let tfidf = fit_tfidf(&tokens)?;
        let x: Vec<SparseVector> = docs.iter().map(|d| tfidf.transform(&d.tokens)).collect();
        let y: Vec<&str> = docs.iter().map(|d| d.label.as_str()).collect();
        let classifier = train_logreg(&x, &y, tfidf.len(), cfg)?;
        Ok(TextClassifier { tfidf, classifier })
    }

    pub fn predict<S: AsRef<str>>(&self, tokens: &[S]) -> String {
        self.classifier
            .predict(&self.tfidf.transform(tokens))
            .to_string()
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

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    Stratified,
    Uniform,
    MostFrequent,
}

/// Label-only predictions for `test_size` documents.
pub fn baseline<S: AsRef<str>>(
    strategy: Baseline,
    train_labels: &[S],
    test_size: usize,
    seed: u64,
) -> Result<Vec<String>> {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for l in train_labels {
        *counts.entry(l.as_ref()).or_default() += 1;
    }
    if counts.is_empty() {
        return Err(Error::InvalidInput("no training labels".into()));
    }
    let labels: Vec<&str> = counts.keys().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(match strategy {
        Baseline::MostFrequent => {
            // first maximum in lexicographic order
            let (best, _) = counts
                .iter()
                .fold(("", 0), |acc, (l, &c)| if c > acc.1 { (l, c) } else { acc });
            vec![best.to_string(); test_size]
        }
        Baseline::Uniform => (0..test_size)
            .map(|_| labels[rng.gen_range(0..labels.len())].to_string())
            .collect(),
        Baseline::Stratified => {
            let dist = WeightedIndex::new(counts.values()).expect("counts are positive");
            (0..test_size)
                .map(|_| labels[dist.sample(&mut rng)].to_string())
                .collect()
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    #[default]
    Macro,
    Weighted,
}

/// Per-class scores and their average over the gold classes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub per_class: BTreeMap<String, Prf>,
    pub support: BTreeMap<String, u64>,
    pub averaging: Averaging,
    pub average: Prf,
    pub accuracy: f64,
}

pub fn classification_report<S: AsRef<str>>(
    pred: &[S],
    gold: &[S],
    averaging: Averaging,
) -> Result<ClassificationReport> {
    if pred.len() != gold.len() {
        return Err(Error::InvalidInput(format!(
            "{} predictions for {} gold labels",
            pred.len(),
            gold.len()
        )));
    }
    let mut counts: BTreeMap<&str, Counts> = BTreeMap::new();
    let mut correct = 0;
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
    let per_class: BTreeMap<String, Prf> = counts
        .iter()
        .map(|(c, n)| (c.to_string(), n.prf()))
        .collect();
    let support: BTreeMap<String, u64> = counts
        .iter()
        .map(|(c, n)| (c.to_string(), n.support()))
        .collect();
    let gold_classes: Vec<&str> = counts
        .iter()
        .filter(|(_, n)| n.support() > 0)
        .map(|(c, _)| *c)
        .collect();
    let average = match averaging {
        Averaging::Macro => macro_average(gold_classes.iter().map(|c| &per_class[*c])),
        Averaging::Weighted => {
            weighted_average(gold_classes.iter().map(|c| (&per_class[*c], support[*c])))
        }
    };
    let accuracy = if gold.is_empty() {
        0.0
    } else {
        correct as f64 / gold.len() as f64
    };
    Ok(ClassificationReport {
        per_class,
        support,
        averaging,
        average,
        accuracy,
    })
}

pub fn evaluate<S: AsRef<str>>(pred: &[S], gold: &[S], averaging: Averaging) -> Result<Prf> {
    Ok(classification_report(pred, gold, averaging)?.average)
}
