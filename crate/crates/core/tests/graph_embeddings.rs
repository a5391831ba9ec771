mod common;

use amsem::graph::{
    deepwalk, random_walks, role2vec, roles, RoleConfig, WalkConfig, WeightedGraph,
};
use common::cosine;

fn graph(nodes: &[&str], edges: &[(usize, usize)]) -> WeightedGraph {
    let mut g = WeightedGraph::new();
    for n in nodes {
        g.add_node(n);
    }
    for &(u, v) in edges {
        g.add_edge(u, v, 1.0).unwrap();
    }
    g
}

fn two_cliques() -> WeightedGraph {
    let mut edges = Vec::new();
    for base in [0, 4] {
        for i in 0..4 {
            for j in i + 1..4 {
                edges.push((base + i, base + j));
            }
        }
    }
    graph(&["a0", "a1", "a2", "a3", "b0", "b1", "b2", "b3"], &edges)
}

fn small_walks() -> WalkConfig {
    WalkConfig {
        walks_per_node: 20,
        walk_length: 20,
        dim: 16,
        window: 3,
        epochs: 5,
        ..WalkConfig::default()
    }
}

#[test]
fn deepwalk_separates_disconnected_cliques() {
    let g = two_cliques();
    let m = deepwalk(&g, &small_walks()).unwrap();
    let v: Vec<Vec<f64>> = g.labels().iter().map(|l| m.vector(l).unwrap()).collect();
    let (mut intra, mut inter) = (Vec::new(), Vec::new());
    for i in 0..8 {
        for j in i + 1..8 {
            let c = cosine(&v[i], &v[j]);
            if (i < 4) == (j < 4) {
                intra.push(c);
            } else {
                inter.push(c);
            }
        }
    }
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    assert!(
        mean(&intra) > mean(&inter),
        "intra {} inter {}",
        mean(&intra),
        mean(&inter)
    );
}

#[test]
fn deepwalk_is_deterministic_and_keeps_isolated_nodes() {
    let mut g = two_cliques();
    g.add_node("lonely");
    let a = deepwalk(&g, &small_walks()).unwrap();
    let b = deepwalk(&g, &small_walks()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.vocab().len(), g.node_count());
}

#[test]
fn walks_are_paths_and_counted() {
    let g = two_cliques();
    let cfg = small_walks();
    let walks = random_walks(&g, &cfg).unwrap();
    assert_eq!(walks.len(), cfg.walks_per_node * g.node_count());
    for w in &walks {
        assert_eq!(w.len(), cfg.walk_length);
        for pair in w.windows(2) {
            assert!(g.weight(pair[0], pair[1]).is_some());
        }
    }
}

#[test]
fn triangle_steps_are_uniform() {
    let g = graph(&["a", "b", "c"], &[(0, 1), (1, 2), (0, 2)]);
    let cfg = WalkConfig {
        walks_per_node: 100_000,
        walk_length: 2,
        ..WalkConfig::default()
    };
    let walks = random_walks(&g, &cfg).unwrap();
    let from_a: Vec<_> = walks.iter().filter(|w| w[0] == 0).collect();
    let to_b = from_a.iter().filter(|w| w[1] == 1).count() as f64 / from_a.len() as f64;
    assert!((to_b - 0.5).abs() < 0.01, "{to_b}");
}

fn star(leaves: usize) -> WeightedGraph {
    let names: Vec<String> = std::iter::once("hub".to_string())
        .chain((0..leaves).map(|i| format!("leaf{i}")))
        .collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let edges: Vec<(usize, usize)> = (1..=leaves).map(|i| (0, i)).collect();
    graph(&refs, &edges)
}

#[test]
fn star_leaves_share_one_embedding() {
    let g = star(5);
    assert_eq!(roles(&g, &RoleConfig::default()), [2, 1, 1, 1, 1, 1]);
    let m = role2vec(&g, &small_walks(), &RoleConfig::default()).unwrap();
    let first = m.vector("leaf0").unwrap();
    for i in 1..5 {
        assert_eq!(m.vector(&format!("leaf{i}")).unwrap(), first);
    }
    assert_ne!(m.vector("hub").unwrap(), first);
}

#[test]
fn regular_graph_has_a_single_role() {
    // 6-cycle: every node has degree 2
    let g = graph(
        &["a", "b", "c", "d", "e", "f"],
        &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)],
    );
    let m = role2vec(&g, &small_walks(), &RoleConfig::default()).unwrap();
    let first = m.vector("a").unwrap();
    for l in g.labels() {
        assert_eq!(m.vector(l).unwrap(), first);
    }
}
