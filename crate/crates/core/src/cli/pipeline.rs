//! Config-driven end-to-end run with a checksummed manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classify::{self, Averaging, LogRegConfig, TextClassifier};
use crate::corpus::{self, SplitSpec};
use crate::error::{Error, Result};
use crate::graph::{self, RoleConfig, WalkConfig};
use crate::tagger::{self, FeatureSet, TrainConfig};
use crate::text;
use crate::thesaurus::{self, HolingConfig};

fn one() -> u64 {
    1
}

fn ten() -> usize {
    10
}

fn twenty() -> usize {
    20
}

/// Paths are resolved against the config file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: PathBuf,
    pub output_dir: PathBuf,
    /// Corpus is raw text rather than one tokenized sentence per line.
    #[serde(default)]
    pub raw: bool,
    /// Overrides the command-line seed when present.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "one")]
    pub min_count: u64,
    /// Train/dev/test ratios; writes three sentence files when set.
    #[serde(default)]
    pub split: Option<[f64; 3]>,
    #[serde(default)]
    pub dt: HolingConfig,
    #[serde(default = "twenty")]
    pub graph_top_k: usize,
    #[serde(default)]
    pub walk: WalkConfig,
    #[serde(default)]
    pub role: RoleConfig,
    #[serde(default)]
    pub tag: Option<TagStage>,
    #[serde(default)]
    pub classify: Option<ClassifyStage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagStage {
    pub train: PathBuf,
    pub test: PathBuf,
    #[serde(default = "ten")]
    pub epochs: usize,
    /// Score BIO spans instead of tokens.
    #[serde(default)]
    pub spans: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyStage {
    pub train: PathBuf,
    pub test: PathBuf,
    #[serde(default)]
    pub raw: bool,
    #[serde(default)]
    pub logreg: LogRegConfig,
    #[serde(default)]
    pub averaging: Averaging,
}

impl PipelineConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Fill in seed and worker settings so the config alone determines
    /// every output.
    fn resolve(mut self, seed: u64, workers: usize) -> Self {
        let seed = *self.seed.get_or_insert(seed);
        let workers = *self.workers.get_or_insert(workers);
        self.walk.seed = seed;
        self.walk.workers = workers;
        if let Some(c) = self.classify.as_mut() {
            c.logreg.seed = seed;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the output directory, or to the config for inputs.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_sha256: String,
    pub seed: u64,
    pub workers: usize,
    pub inputs: Vec<ManifestEntry>,
    pub artifacts: Vec<ManifestEntry>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn entry(base: &Path, rel: &Path) -> Result<ManifestEntry> {
    let full = base.join(rel);
    let bytes = fs::read(&full).map_err(|e| Error::io(&full, e))?;
    Ok(ManifestEntry {
        path: rel.to_string_lossy().replace('\\', "/"),
        sha256: sha256_hex(&bytes),
        bytes: bytes.len() as u64,
    })
}

struct Run<'a> {
    out: &'a Path,
    artifacts: Vec<PathBuf>,
}

impl Run<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        self.artifacts.push(PathBuf::from(name));
        self.out.join(name)
    }
}

/// Run every configured stage in order and write `manifest.json` into the
/// output directory. A failure is reported with the name of its stage.
pub fn run_pipeline(config_path: impl AsRef<Path>, seed: u64, workers: usize) -> Result<Manifest> {
    let config_path = config_path.as_ref();
    let cfg = PipelineConfig::from_file(config_path)
        .map_err(Error::stage("config"))?
        .resolve(seed, workers);
    let base = config_path.parent().unwrap_or(Path::new("")).to_path_buf();
    let out_dir = base.join(&cfg.output_dir);
    fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
    let mut run = Run {
        out: &out_dir,
        artifacts: Vec::new(),
    };
    let corpus_path = base.join(&cfg.corpus);

    let sentences = if cfg.raw {
        let sentences = corpus::read_corpus(&corpus_path, Some(text::default_table()))
            .map_err(Error::stage("normalize"))?;
        corpus::write_corpus(run.path("sentences.txt"), &sentences)
            .map_err(Error::stage("segment"))?;
        sentences
    } else {
        corpus::read_corpus(&corpus_path, None).map_err(Error::stage("vocab"))?
    };

    if let Some(ratios) = cfg.split {
        let stage = Error::stage("split");
        let spec = SplitSpec::new(ratios, seed_of(&cfg)).map_err(&stage)?;
        let (a, b, c) = corpus::split_dataset(sentences.clone(), &spec).map_err(&stage)?;
        for (name, part) in [("train.txt", a), ("dev.txt", b), ("test.txt", c)] {
            corpus::write_corpus(run.path(name), &part).map_err(&stage)?;
        }
    }

    corpus::build_vocab(&sentences, cfg.min_count)
        .and_then(|v| v.save_tsv(run.path("vocab.tsv")))
        .map_err(Error::stage("vocab"))?;

    let dt = thesaurus::build_dt(&sentences, &cfg.dt)
        .and_then(|m| {
            m.save_neighbors(run.path("dt.tsv"))?;
            m.save_salient(run.path("dt_features.tsv"))?;
            Ok(m)
        })
        .map_err(Error::stage("dt"))?;

    let g = graph::dt_to_graph(&dt, cfg.graph_top_k)
        .and_then(|g| {
            g.save_edges(run.path("graph.tsv"))?;
            Ok(g)
        })
        .map_err(Error::stage("graph"))?;

    graph::deepwalk(&g, &cfg.walk)
        .and_then(|m| m.save(run.path("deepwalk.vec")))
        .map_err(Error::stage("deepwalk"))?;
    graph::role2vec(&g, &cfg.walk, &cfg.role)
        .and_then(|m| m.save(run.path("role2vec.vec")))
        .map_err(Error::stage("role2vec"))?;

    if let Some(t) = &cfg.tag {
        run_tag(&mut run, &base, t, seed_of(&cfg)).map_err(Error::stage("tag"))?;
    }
    if let Some(c) = &cfg.classify {
        run_classify(&mut run, &base, c).map_err(Error::stage("classify"))?;
    }

    let stage = Error::stage("manifest");
    let mut inputs = vec![entry(&base, &cfg.corpus).map_err(&stage)?];
    if let Some(t) = &cfg.tag {
        inputs.push(entry(&base, &t.train).map_err(&stage)?);
        inputs.push(entry(&base, &t.test).map_err(&stage)?);
    }
    if let Some(c) = &cfg.classify {
        inputs.push(entry(&base, &c.train).map_err(&stage)?);
        inputs.push(entry(&base, &c.test).map_err(&stage)?);
    }
    let manifest = Manifest {
        config_sha256: config_hash(&cfg)?,
        seed: seed_of(&cfg),
        workers: cfg.workers.unwrap_or(1),
        inputs,
        artifacts: run
            .artifacts
            .iter()
            .map(|a| entry(&out_dir, a))
            .collect::<Result<_>>()
            .map_err(&stage)?,
    };
    let path = out_dir.join("manifest.json");
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    fs::write(&path, json)
        .map_err(|e| Error::io(&path, e))
        .map_err(&stage)?;
    Ok(manifest)
}

/// Hash of the resolved config. The output location is left out so that
/// identical runs into different directories share one hash.
fn config_hash(cfg: &PipelineConfig) -> Result<String> {
    let mut c = cfg.clone();
    c.output_dir = PathBuf::new();
    Ok(sha256_hex(&serde_json::to_vec(&c)?))
}

fn seed_of(cfg: &PipelineConfig) -> u64 {
    cfg.seed.unwrap_or(42)
}

fn write_json<T: Serialize>(path: PathBuf, value: &T) -> Result<()> {
    let mut json = serde_json::to_string_pretty(value)?;
    json.push('\n');
    fs::write(&path, json).map_err(|e| Error::io(&path, e))
}

fn run_tag(run: &mut Run<'_>, base: &Path, t: &TagStage, seed: u64) -> Result<()> {
    let train = tagger::read_conll(base.join(&t.train))?;
    let test = tagger::read_conll(base.join(&t.test))?;
    let cfg = TrainConfig {
        epochs: t.epochs,
        seed,
        tagset: None,
    };
    let model = tagger::train(&train, &cfg, FeatureSet::handcrafted())?;
    model.save(run.path("tagger.json"))?;
    let pred = test
        .iter()
        .map(|s| model.tag(s.tokens()))
        .collect::<Result<Vec<_>>>()?;
    let gold: Vec<Vec<String>> = test.iter().map(|s| s.labels().to_vec()).collect();
    if t.spans {
        write_json(
            run.path("tag_report.json"),
            &tagger::evaluate_spans(&pred, &gold)?,
        )
    } else {
        write_json(
            run.path("tag_report.json"),
            &tagger::evaluate_tokens(&pred.concat(), &gold.concat())?,
        )
    }
}

fn run_classify(run: &mut Run<'_>, base: &Path, c: &ClassifyStage) -> Result<()> {
    let table = c.raw.then(text::default_table);
    let train = classify::read_labeled(base.join(&c.train), table)?;
    let test = classify::read_labeled(base.join(&c.test), table)?;
    let model = TextClassifier::fit(&train, &c.logreg)?;
    model.save(run.path("classifier.json"))?;
    let pred: Vec<String> = test.iter().map(|d| model.predict(&d.tokens)).collect();
    let gold: Vec<String> = test.into_iter().map(|d| d.label).collect();
    write_json(
        run.path("classify_report.json"),
        &classify::classification_report(&pred, &gold, c.averaging)?,
    )
}
