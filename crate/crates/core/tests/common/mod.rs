#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use structnet::{NodeSet, StructureGraph, StructurePattern};

pub const GRAPH_FIXTURES: &[&str] = &[
    "fig1", "fig2", "fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig5c", "fig5d", "fig5e", "fig6a",
    "fig6b", "fig7a", "fig7b", "example2",
];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> StructureGraph {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    StructureGraph::from_json(&text).expect("fixture parses")
}

pub fn labels(g: &StructureGraph, set: &NodeSet) -> Vec<String> {
    g.labels_of(set)
}

pub fn set(g: &StructureGraph, labels: &[&str]) -> NodeSet {
    g.node_set(labels).unwrap()
}

/// Erdos–Renyi digraph on `n` nodes (self-loops included) with edge probability `p`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> StructureGraph {
    let labels = (1..=n).map(|i| i.to_string()).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    StructureGraph::new(labels, edges).unwrap()
}

/// The seeded corpus of random graphs (N in 1..=10, p = 0.3).
pub fn random_corpus(count: usize, seed: u64) -> Vec<StructureGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=10);
            random_graph(&mut rng, n, 0.3)
        })
        .collect()
}

/// Calls `visit` on every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    visit(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Largest number of allowed positions hit by a single permutation, i.e. the
/// largest nonvanishing term size in the permanent expansion.
pub fn brute_force_rank(p: &StructurePattern) -> usize {
    assert_eq!(p.rows(), p.cols());
    let mut best = 0;
    for_each_permutation(p.rows(), |perm| {
        let hits = perm
            .iter()
            .enumerate()
            .filter(|&(i, &j)| p.is_allowed(i, j))
            .count();
        best = best.max(hits);
    });
    best
}

/// Whether some permutation `sigma` has an edge `v -> sigma(v)` for every `v`.
pub fn brute_force_cover_exists(g: &StructureGraph) -> bool {
    let mut found = false;
    for_each_permutation(g.node_count(), |perm| {
        if !found
            && perm
                .iter()
                .enumerate()
                .all(|(v, &next)| g.has_edge(v, next))
        {
            found = true;
        }
    });
    found
}

/// Backtracking search for a successor assignment that forms a cycle cover.
/// Exhaustive over permutations, pruned on missing edges.
pub fn backtracking_cover_exists(g: &StructureGraph) -> bool {
    fn go(g: &StructureGraph, v: usize, used: &mut Vec<bool>) -> bool {
        if v == g.node_count() {
            return true;
        }
        for &next in g.successors(v) {
            if !used[next] {
                used[next] = true;
                if go(g, v + 1, used) {
                    return true;
                }
                used[next] = false;
            }
        }
        false
    }
    go(g, 0, &mut vec![false; g.node_count()])
}

/// Strictly layered graph: complete bidirectional edges between adjacent
/// layers, nothing else. Labels are `L<layer>.<k>`.
pub fn layered_graph(profile: &[usize]) -> StructureGraph {
    let mut labels = Vec::new();
    let mut layers: Vec<Vec<usize>> = Vec::new();
    for (layer, &size) in profile.iter().enumerate() {
        let mut ids = Vec::new();
        for k in 0..size {
            ids.push(labels.len());
            labels.push(format!("L{}.{}", layer + 1, k + 1));
        }
        layers.push(ids);
    }
    let mut edges = Vec::new();
    for pair in layers.windows(2) {
        for &u in &pair[0] {
            for &v in &pair[1] {
                edges.push((u, v));
                edges.push((v, u));
            }
        }
    }
    StructureGraph::new(labels, edges).unwrap()
}

/// Every profile with 1..=max_layers layers of 1..=max_size nodes each.
pub fn layer_profiles(max_layers: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_layers {
        let mut next = Vec::new();
        for prefix in &frontier {
            for size in 1..=max_size {
                let mut p = prefix.clone();
                p.push(size);
                out.push(p.clone());
                next.push(p);
            }
        }
        frontier = next;
    }
    out
}
