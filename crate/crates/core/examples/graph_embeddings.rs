//! Turn a thesaurus into a word graph and embed it two ways: DeepWalk, where
//! neighbours end up close, and Role2Vec, where nodes of equal degree class
//! share one vector.

use std::path::Path;

use amsem::corpus::read_corpus;
use amsem::graph::{deepwalk, dt_to_graph, role2vec, roles, RoleConfig, WalkConfig};
use amsem::thesaurus::{build_dt, HolingConfig};

fn main() -> amsem::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy_corpus.txt");
    let sentences = read_corpus(path, None)?;
    let dt = build_dt(
        &sentences,
        &HolingConfig {
            window: 2,
            min_word_feature_count: 1,
            ..HolingConfig::default()
        },
    )?;
    let graph = dt_to_graph(&dt, 5)?;
    println!(
        "graph: {} nodes, {} edges",
        graph.node_count(),
        graph.edge_count()
    );

    let walk = WalkConfig {
        walks_per_node: 10,
        walk_length: 20,
        dim: 32,
        epochs: 3,
        ..WalkConfig::default()
    };
    let dw = deepwalk(&graph, &walk)?;
    for (w, sim) in dw.nearest("ሄደ", 3)? {
        println!("deepwalk  ሄደ ~ {w} {sim:.3}");
    }

    let role_cfg = RoleConfig::default();
    let r = roles(&graph, &role_cfg);
    let rv = role2vec(&graph, &walk, &role_cfg)?;
    let id = graph.id("ሄደ").expect("ሄደ is in the graph");
    println!(
        "role2vec  ሄደ has role {} (degree {})",
        r[id],
        graph.degree(id)
    );
    for (w, sim) in rv.nearest("ሄደ", 3)? {
        println!("role2vec  ሄደ ~ {w} {sim:.3}");
    }
    Ok(())
}
