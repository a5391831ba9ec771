//! Thesaurus graphs and random-walk node embeddings.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::build_vocab;
use crate::embed::{self, EmbedConfig, EmbeddingModel, Mode};
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::thesaurus::ThesaurusModel;
use crate::vecmath::Matrix;

/// Undirected graph with positive edge weights, stored as symmetric sorted
/// adjacency lists.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Id of `label`, adding the node if needed.
    pub fn add_node(&mut self, label: &str) -> usize {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        self.adjacency.push(Vec::new());
        id
    }

    /// Add an undirected edge. Repeated edges keep the larger weight.
    pub fn add_edge(&mut self, u: usize, v: usize, weight: f64) -> Result<()> {
        if u == v {
            return Err(Error::InvalidInput(format!(
                "self-loop on {:?}",
                self.labels[u]
            )));
        }
        if !weight.is_finite() || weight <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "edge weight must be positive, got {weight}"
            )));
        }
        for (a, b) in [(u, v), (v, u)] {
            let list = &mut self.adjacency[a];
            match list.binary_search_by_key(&b, |e| e.0) {
                Ok(pos) => list[pos].1 = list[pos].1.max(weight),
                Err(pos) => list.insert(pos, (b, weight)),
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Neighbors of `id` sorted by neighbor id.
    pub fn neighbors(&self, id: usize) -> &[(usize, f64)] {
        &self.adjacency[id]
    }

    pub fn degree(&self, id: usize) -> usize {
        self.adjacency[id].len()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let list = &self.adjacency[u];
        list.binary_search_by_key(&v, |e| e.0)
            .ok()
            .map(|p| list[p].1)
    }

    /// Edge list `node<TAB>node<TAB>weight`, each edge once with the
    /// lower id first.
    pub fn save_edges(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        for (u, list) in self.adjacency.iter().enumerate() {
            for &(v, w) in list.iter().filter(|e| e.0 > u) {
                writeln!(out, "{}\t{}\t{w}", self.labels[u], self.labels[v])
                    .map_err(|e| Error::io(path, e))?;
            }
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load_edges(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let what = path.display().to_string();
        let mut g = WeightedGraph::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [a, b, w] = cols[..] else {
                return Err(Error::parse(
                    &what,
                    idx + 1,
                    "expected node<TAB>node<TAB>weight",
                ));
            };
            let w: f64 = w
                .parse()
                .map_err(|_| Error::parse(&what, idx + 1, format!("bad weight {w:?}")))?;
            let (u, v) = (g.add_node(a), g.add_node(b));
            g.add_edge(u, v, w)
                .map_err(|e| Error::parse(&what, idx + 1, e.to_string()))?;
        }
        Ok(g)
    }
}

/// Connect every thesaurus word to its `top_k` neighbors, weighted by
/// overlap. Nodes are in lexicographic order; words without neighbors stay
/// as isolated nodes.
pub fn dt_to_graph(model: &ThesaurusModel, top_k: usize) -> Result<WeightedGraph> {
    if top_k < 1 {
        return Err(Error::Config("top_k must be at least 1".into()));
    }
    if model.is_empty() {
        return Err(Error::InvalidInput("thesaurus is empty".into()));
    }
    let mut g = WeightedGraph::new();
    for w in model.words() {
        g.add_node(w);
    }
    for w in model.words() {
        let u = g.id(w).expect("node added above");
        for n in model.similar(w, top_k)? {
            let v = g.add_node(&n.word);
            g.add_edge(u, v, n.overlap as f64)?;
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WalkConfig {
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub window: usize,
    pub dim: usize,
    pub epochs: usize,
    pub negatives: usize,
    pub initial_lr: f64,
    pub seed: u64,
    /// Step to a neighbor with probability proportional to edge weight
    /// instead of uniformly.
    pub weighted_transitions: bool,
    pub workers: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            walks_per_node: 10,
            walk_length: 80,
            window: 5,
            dim: 128,
            epochs: 5,
            negatives: 5,
            initial_lr: 0.025,
            seed: 42,
            weighted_transitions: false,
            workers: 1,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.walk_length < 1 || self.walks_per_node < 1 {
            return Err(Error::Config(
                "walk_length and walks_per_node must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn embed_config(&self) -> EmbedConfig {
        EmbedConfig {
            dim: self.dim,
            window: self.window,
            negatives: self.negatives,
            epochs: self.epochs,
            initial_lr: self.initial_lr,
            min_count: 1,
            mode: Mode::Skipgram,
            subword: None,
            subsample_t: 0.0,
            seed: self.seed,
            workers: self.workers,
        }
    }
}

fn walk_from(
    graph: &WeightedGraph,
    start: usize,
    length: usize,
    transitions: Option<&[Option<WeightedIndex<f64>>]>,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let mut walk = Vec::with_capacity(length);
    walk.push(start);
    let mut current = start;
    while walk.len() < length {
        let nbrs = graph.neighbors(current);
        if nbrs.is_empty() {
            break;
        }
        let pick = match transitions.and_then(|t| t[current].as_ref()) {
            Some(dist) => dist.sample(rng),
            None => rng.gen_range(0..nbrs.len()),
        };
        current = nbrs[pick].0;
        walk.push(current);
    }
    walk
}

/// `walks_per_node` truncated random walks from every node, as node ids.
///
/// Walks are ordered round by round (all nodes for walk 0, then walk 1, ...).
/// Each walk draws from its own generator seeded by `(seed, node, round)`,
/// so serial and parallel generation agree.
pub fn random_walks(graph: &WeightedGraph, cfg: &WalkConfig) -> Result<Vec<Vec<usize>>> {
    cfg.validate()?;
    if graph.is_empty() {
        return Err(Error::InvalidInput("graph has no nodes".into()));
    }
    let transitions: Option<Vec<Option<WeightedIndex<f64>>>> =
        cfg.weighted_transitions.then(|| {
            (0..graph.node_count())
                .map(|u| WeightedIndex::new(graph.neighbors(u).iter().map(|e| e.1)).ok())
                .collect()
        });
    let n = graph.node_count();
    let one = |k: usize| {
        let (round, node) = (k / n, k % n);
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(&[cfg.seed, node as u64, round as u64]));
        walk_from(
            graph,
            node,
            cfg.walk_length,
            transitions.as_deref(),
            &mut rng,
        )
    };
    let total = n * cfg.walks_per_node;
    Ok(if cfg.workers > 1 {
        (0..total).into_par_iter().map(one).collect()
    } else {
        (0..total).map(one).collect()
    })
}

pub fn walks_to_labels(graph: &WeightedGraph, walks: &[Vec<usize>]) -> Vec<Vec<String>> {
    walks
        .iter()
        .map(|w| w.iter().map(|&v| graph.label(v).to_string()).collect())
        .collect()
}

/// Skip-gram embeddings of nodes trained on uniform random walks.
pub fn deepwalk(graph: &WeightedGraph, cfg: &WalkConfig) -> Result<EmbeddingModel> {
    let walks = walks_to_labels(graph, &random_walks(graph, cfg)?);
    embed::train(&walks, &cfg.embed_config())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoleAttribute {
    /// `floor(log2(degree + 1))`
    #[default]
    Log2DegreeBin,
    /// Raw degree.
    Degree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoleConfig {
    pub attribute: RoleAttribute,
}

/// Role id of every node.
pub fn roles(graph: &WeightedGraph, cfg: &RoleConfig) -> Vec<u64> {
    (0..graph.node_count())
        .map(|v| {
            let d = graph.degree(v) as u64;
            match cfg.attribute {
                RoleAttribute::Log2DegreeBin => (d + 1).ilog2() as u64,
                RoleAttribute::Degree => d,
            }
        })
        .collect()
}

fn role_token(role: u64) -> String {
    format!("role:{role}")
}

/// Embeddings from attributed random walks: every walk is rewritten into
/// the roles of its nodes, roles are embedded with skip-gram, and each node
/// takes the vector of its role.
pub fn role2vec(
    graph: &WeightedGraph,
    walk_cfg: &WalkConfig,
    role_cfg: &RoleConfig,
) -> Result<EmbeddingModel> {
    let walks = random_walks(graph, walk_cfg)?;
    let role_of = roles(graph, role_cfg);
    let role_walks: Vec<Vec<String>> = walks
        .iter()
        .map(|w| w.iter().map(|&v| role_token(role_of[v])).collect())
        .collect();
    let role_model = embed::train(&role_walks, &walk_cfg.embed_config())?;

    let node_vocab = build_vocab(walks_to_labels(graph, &walks), 1)?;
    let dim = role_model.dim();
    let mut rows = Vec::with_capacity(node_vocab.len() * dim);
    for label in node_vocab.words() {
        let node = graph.id(label).expect("walk labels are graph nodes");
        rows.extend(role_model.vector(&role_token(role_of[node]))?);
    }
    EmbeddingModel::from_vectors(
        node_vocab.clone(),
        Matrix::from_vec(node_vocab.len(), dim, rows),
    )
}
