//! Command-line front end. Every subcommand is a thin wrapper over a
//! library call; `run` maps failures to exit codes.

mod pipeline;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classify::{self, Averaging, Baseline, LogRegConfig, TextClassifier};
use crate::corpus::{self, SplitSpec};
use crate::embed::{self, EmbedConfig, EmbeddingModel, Mode};
use crate::error::{Error, Result};
use crate::graph::{self, RoleAttribute, RoleConfig, WalkConfig, WeightedGraph};
use crate::tagger::{self, FeatureSet, TaggerModel, TrainConfig};
use crate::text::{self, NormalizationTable, TokenKind};
use crate::thesaurus::{self, HolingConfig, OverlapWeighting, Significance, ThesaurusModel};

pub use pipeline::{run_pipeline, Manifest, ManifestEntry, PipelineConfig};

#[derive(Debug, Parser)]
#[command(name = "amsem", version, about = "Semantic models for Amharic text")]
struct Cli {
    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads; 1 keeps results bit-reproducible.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fold homophone characters line by line.
    Normalize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Custom two-column TSV table instead of the bundled one.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Print each line's tokens separated by single spaces.
    Tokenize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write one sentence per line.
    Segment {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Drop punctuation tokens, including sentence terminators.
        #[arg(long)]
        strip_punct: bool,
    },
    /// Sentence, token and type counts as JSON.
    Stats(CorpusArgs),
    /// Shuffle lines into train/dev/test files.
    Split {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        dev: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Comma-separated train,dev,test proportions.
        #[arg(long, value_parser = parse_ratios, default_value = "0.8,0.1,0.1")]
        ratios: [f64; 3],
    },
    /// Distributional thesaurus.
    #[command(subcommand)]
    Dt(DtCommand),
    /// Word embeddings.
    #[command(subcommand)]
    Embed(EmbedCommand),
    /// Thesaurus graph and node embeddings.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Sequence tagging.
    #[command(subcommand)]
    Tag(TagCommand),
    /// Document classification.
    #[command(subcommand)]
    Classify(ClassifyCommand),
    /// Run every stage from a JSON config.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_ratios(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|p: Vec<f64>| format!("expected 3 ratios, got {}", p.len()))
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// One sentence per line, tokens separated by spaces.
    #[arg(long)]
    corpus: PathBuf,
    /// Treat the corpus as raw text and preprocess it first.
    #[arg(long)]
    raw: bool,
}

impl CorpusArgs {
    fn read(&self) -> Result<Vec<Vec<String>>> {
        corpus::read_corpus(&self.corpus, self.raw.then(text::default_table))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SignificanceArg {
    Lmi,
    Pmi,
    Frequency,
}

#[derive(Debug, Subcommand)]
enum DtCommand {
    Build {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Neighbor list output.
        #[arg(long)]
        out: PathBuf,
        /// Also write salient features per word.
        #[arg(long)]
        features_out: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        window: usize,
        #[arg(long, default_value_t = 2)]
        min_count: u64,
        #[arg(long, default_value_t = 1000)]
        features_per_word: usize,
        #[arg(long, default_value_t = 1000)]
        max_words_per_feature: usize,
        #[arg(long, value_enum, default_value_t = SignificanceArg::Lmi)]
        significance: SignificanceArg,
        /// Rank by summed significance instead of shared feature count.
        #[arg(long)]
        weighted: bool,
    },
    Query {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    Word2vec,
    Fasttext,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Skipgram,
    Cbow,
}

#[derive(Debug, Subcommand)]
enum EmbedCommand {
    Train {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Vectors in word2vec text format.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Preset::Word2vec)]
        preset: Preset,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        negatives: Option<usize>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        min_count: Option<u64>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        lr: Option<f64>,
    },
    Nearest {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
}

#[derive(Debug, Args)]
struct WalkArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    walks_per_node: usize,
    #[arg(long, default_value_t = 80)]
    walk_length: usize,
    #[arg(long, default_value_t = 5)]
    window: usize,
    #[arg(long, default_value_t = 128)]
    dim: usize,
    #[arg(long, default_value_t = 5)]
    epochs: usize,
    /// Follow edges with probability proportional to their weight.
    #[arg(long)]
    weighted: bool,
}

impl WalkArgs {
    fn config(&self, seed: u64, workers: usize) -> WalkConfig {
        WalkConfig {
            walks_per_node: self.walks_per_node,
            walk_length: self.walk_length,
            window: self.window,
            dim: self.dim,
            epochs: self.epochs,
            weighted_transitions: self.weighted,
            seed,
            workers,
            ..WalkConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RoleArg {
    Log2Degree,
    Degree,
}

#[derive(Debug, Subcommand)]
enum GraphCommand {
    /// Connect each thesaurus word to its top neighbors.
    Build {
        #[arg(long)]
        dt: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        top_k: usize,
    },
    Deepwalk(WalkArgs),
    Role2vec {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long, value_enum, default_value_t = RoleArg::Log2Degree)]
        role: RoleArg,
    },
}

#[derive(Debug, Subcommand)]
enum TagCommand {
    Train {
        /// CoNLL file: token<TAB>tag, blank line between sentences.
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        /// Add cluster-id features from these vectors.
        #[arg(long)]
        embeddings: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        clusters: usize,
        /// Leave out the prefix/suffix/word features.
        #[arg(long)]
        no_handcrafted: bool,
    },
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Score BIO entity spans instead of tokens.
        #[arg(long)]
        spans: bool,
        /// Write predictions as CoNLL.
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AveragingArg {
    Macro,
    Weighted,
}

impl From<AveragingArg> for Averaging {
    fn from(a: AveragingArg) -> Self {
        match a {
            AveragingArg::Macro => Averaging::Macro,
            AveragingArg::Weighted => Averaging::Weighted,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BaselineArg {
    Stratified,
    Uniform,
    MostFrequent,
}

#[derive(Debug, Subcommand)]
enum ClassifyCommand {
    Train {
        /// label<TAB>text per line.
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        raw: bool,
        #[arg(long, default_value_t = 1e-4)]
        l2: f64,
        #[arg(long, default_value_t = 30)]
        epochs: usize,
        #[arg(long, default_value_t = 0.5)]
        lr: f64,
        #[arg(long, default_value_t = 16)]
        batch_size: usize,
    },
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        raw: bool,
        #[arg(long, value_enum, default_value_t = AveragingArg::Macro)]
        averaging: AveragingArg,
    },
    Baseline {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long, value_enum)]
        strategy: BaselineArg,
        #[arg(long, value_enum, default_value_t = AveragingArg::Macro)]
        averaging: AveragingArg,
    },
}

/// Parse `argv` (program name first), run, and return the exit code:
/// 0 on success, 1 on a usage error, 2 when processing fails.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::io(p, e))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out).map_err(|e| Error::io("<stdout>", e))
}

fn write_lines(path: Option<&Path>, lines: impl IntoIterator<Item = String>) -> Result<()> {
    let name = path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
    let mut out = output(path)?;
    for l in lines {
        writeln!(out, "{l}").map_err(|e| Error::io(&name, e))?;
    }
    out.flush().map_err(|e| Error::io(&name, e))
}

fn dispatch(cli: Cli) -> Result<()> {
    let (seed, workers) = (cli.seed, cli.workers);
    match cli.command {
        Command::Normalize { input, out, table } => {
            let custom = table.map(NormalizationTable::from_file).transpose()?;
            let table = custom.as_ref().unwrap_or_else(|| text::default_table());
            // keep line terminators exactly as in the input
            let src = read_text(&input)?;
            let mut w = output(out.as_deref())?;
            w.write_all(text::normalize(&src, table).as_bytes())
                .and_then(|_| w.flush())
                .map_err(|e| Error::io(out.unwrap_or_default(), e))
        }
        Command::Tokenize { input, out } => {
            let src = read_text(&input)?;
            let lines = src.lines().map(|l| {
                text::tokenize(l)
                    .into_iter()
                    .map(|t| t.surface)
                    .collect::<Vec<_>>()
                    .join(" ")
            });
            write_lines(out.as_deref(), lines)
        }
        Command::Segment {
            input,
            out,
            strip_punct,
        } => {
            let src = read_text(&input)?;
            let sentences = text::segment(&text::tokenize(&src));
            let lines = sentences.into_iter().filter_map(|s| {
                let words: Vec<String> = s
                    .tokens
                    .into_iter()
                    .filter(|t| !(strip_punct && t.kind == TokenKind::Punctuation))
                    .map(|t| t.surface)
                    .collect();
                (!words.is_empty()).then(|| words.join(" "))
            });
            write_lines(out.as_deref(), lines)
        }
        Command::Stats(args) => print_json(&corpus::corpus_stats(&args.read()?)),
        Command::Split {
            input,
            train,
            dev,
            test,
            ratios,
        } => {
            let src = read_text(&input)?;
            let lines: Vec<String> = src
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(String::from)
                .collect();
            let spec = SplitSpec::new(ratios, seed)?;
            let (a, b, c) = corpus::split_dataset(lines, &spec)?;
            write_lines(Some(&train), a)?;
            write_lines(Some(&dev), b)?;
            write_lines(Some(&test), c)
        }
        Command::Dt(cmd) => dt(cmd),
        Command::Embed(cmd) => embed(cmd, seed, workers),
        Command::Graph(cmd) => graph(cmd, seed, workers),
        Command::Tag(cmd) => tag(cmd, seed),
        Command::Classify(cmd) => classify(cmd, seed),
        Command::Pipeline { config } => {
            let manifest = run_pipeline(&config, seed, workers)?;
            eprintln!("wrote {} artifacts", manifest.artifacts.len());
            Ok(())
        }
    }
}

fn dt(cmd: DtCommand) -> Result<()> {
    match cmd {
        DtCommand::Build {
            corpus,
            out,
            features_out,
            window,
            min_count,
            features_per_word,
            max_words_per_feature,
            significance,
            weighted,
        } => {
            let cfg = HolingConfig {
                window,
                min_word_feature_count: min_count,
                features_per_word,
                max_words_per_feature,
                significance: match significance {
                    SignificanceArg::Lmi => Significance::Lmi,
                    SignificanceArg::Pmi => Significance::Pmi,
                    SignificanceArg::Frequency => Significance::Frequency,
                },
                weighting: if weighted {
                    OverlapWeighting::Weighted
                } else {
                    OverlapWeighting::Count
                },
                ..HolingConfig::default()
            };
            let model = thesaurus::build_dt(&corpus.read()?, &cfg)?;
            model.save_neighbors(&out)?;
            if let Some(p) = features_out {
                model.save_salient(p)?;
            }
            Ok(())
        }
        DtCommand::Query { model, word, k } => {
            let model = ThesaurusModel::load_neighbors(model)?;
            let lines = model
                .similar(&word, k)?
                .iter()
                .map(|n| format!("{}\t{}", n.word, n.overlap))
                .collect::<Vec<_>>();
            write_lines(None, lines)
        }
    }
}

fn embed(cmd: EmbedCommand, seed: u64, workers: usize) -> Result<()> {
    match cmd {
        EmbedCommand::Train {
            corpus,
            out,
            preset,
            dim,
            window,
            negatives,
            epochs,
            min_count,
            mode,
            lr,
        } => {
            let base = match preset {
                Preset::Word2vec => EmbedConfig::word2vec(),
                Preset::Fasttext => EmbedConfig::fasttext(),
            };
            let cfg = EmbedConfig {
                dim: dim.unwrap_or(base.dim),
                window: window.unwrap_or(base.window),
                negatives: negatives.unwrap_or(base.negatives),
                epochs: epochs.unwrap_or(base.epochs),
                min_count: min_count.unwrap_or(base.min_count),
                mode: match mode {
                    Some(ModeArg::Skipgram) => Mode::Skipgram,
                    Some(ModeArg::Cbow) => Mode::Cbow,
                    None => base.mode,
                },
                initial_lr: lr.unwrap_or(base.initial_lr),
                seed,
                workers,
                ..base
            };
            embed::train(&corpus.read()?, &cfg)?.save(out)
        }
        EmbedCommand::Nearest { model, word, k } => {
            let model = EmbeddingModel::load(model)?;
            let lines = model
                .nearest(&word, k)?
                .into_iter()
                .map(|(w, s)| format!("{w}\t{s:.6}"))
                .collect::<Vec<_>>();
            write_lines(None, lines)
        }
    }
}

fn graph(cmd: GraphCommand, seed: u64, workers: usize) -> Result<()> {
    match cmd {
        GraphCommand::Build { dt, out, top_k } => {
            let model = ThesaurusModel::load_neighbors(dt)?;
            graph::dt_to_graph(&model, top_k)?.save_edges(out)
        }
        GraphCommand::Deepwalk(args) => {
            let g = WeightedGraph::load_edges(&args.graph)?;
            graph::deepwalk(&g, &args.config(seed, workers))?.save(&args.out)
        }
        GraphCommand::Role2vec { walk, role } => {
            let g = WeightedGraph::load_edges(&walk.graph)?;
            let role_cfg = RoleConfig {
                attribute: match role {
                    RoleArg::Log2Degree => RoleAttribute::Log2DegreeBin,
                    RoleArg::Degree => RoleAttribute::Degree,
                },
            };
            graph::role2vec(&g, &walk.config(seed, workers), &role_cfg)?.save(&walk.out)
        }
    }
}

fn tag(cmd: TagCommand, seed: u64) -> Result<()> {
    match cmd {
        TagCommand::Train {
            train,
            out,
            epochs,
            embeddings,
            clusters,
            no_handcrafted,
        } => {
            let data = tagger::read_conll(train)?;
            let vectors = embeddings.map(EmbeddingModel::load).transpose()?;
            let k = vectors.as_ref().map(|_| clusters).unwrap_or(0);
            let features = FeatureSet::with_embeddings(!no_handcrafted, k, vectors.as_ref(), seed)?;
            let cfg = TrainConfig {
                epochs,
                seed,
                tagset: None,
            };
            tagger::train(&data, &cfg, features)?.save(out)
        }
        TagCommand::Eval {
            model,
            test,
            spans,
            predictions,
        } => {
            let model = TaggerModel::load(model)?;
            let data = tagger::read_conll(test)?;
            let pred = data
                .iter()
                .map(|s| model.tag(s.tokens()))
                .collect::<Result<Vec<_>>>()?;
            let gold: Vec<Vec<String>> = data.iter().map(|s| s.labels().to_vec()).collect();
            if let Some(p) = predictions {
                let tagged = data
                    .iter()
                    .zip(&pred)
                    .map(|(s, t)| tagger::TaggedSequence::new(s.tokens().to_vec(), t.clone()))
                    .collect::<Result<Vec<_>>>()?;
                tagger::write_conll(p, &tagged)?;
            }
            if spans {
                print_json(&tagger::evaluate_spans(&pred, &gold)?)
            } else {
                print_json(&tagger::evaluate_tokens(&pred.concat(), &gold.concat())?)
            }
        }
    }
}

fn classify(cmd: ClassifyCommand, seed: u64) -> Result<()> {
    let table = |raw: bool| raw.then(text::default_table);
    match cmd {
        ClassifyCommand::Train {
            train,
            out,
            raw,
            l2,
            epochs,
            lr,
            batch_size,
        } => {
            let docs = classify::read_labeled(train, table(raw))?;
            let cfg = LogRegConfig {
                l2,
                epochs,
                lr,
                batch_size,
                seed,
            };
            TextClassifier::fit(&docs, &cfg)?.save(out)
        }
        ClassifyCommand::Eval {
            model,
            test,
            raw,
            averaging,
        } => {
            let model = TextClassifier::load(model)?;
            let docs = classify::read_labeled(test, table(raw))?;
            let pred: Vec<String> = docs.iter().map(|d| model.predict(&d.tokens)).collect();
            let gold: Vec<String> = docs.into_iter().map(|d| d.label).collect();
            print_json(&classify::classification_report(
                &pred,
                &gold,
                averaging.into(),
            )?)
        }
        ClassifyCommand::Baseline {
            train,
            test,
            strategy,
            averaging,
        } => {
            let labels = |p: PathBuf| -> Result<Vec<String>> {
                Ok(classify::read_labeled(p, None)?
                    .into_iter()
                    .map(|d| d.label)
                    .collect())
            };
            let (train, gold) = (labels(train)?, labels(test)?);
            let strategy = match strategy {
                BaselineArg::Stratified => Baseline::Stratified,
                BaselineArg::Uniform => Baseline::Uniform,
                BaselineArg::MostFrequent => Baseline::MostFrequent,
            };
            let pred = classify::baseline(strategy, &train, gold.len(), seed)?;
            print_json(&classify::classification_report(
                &pred,
                &gold,
                averaging.into(),
            )?)
        }
    }
}
