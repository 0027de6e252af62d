//! Exact combinatorial analysis: structural rank by maximum bipartite
//! matching, cycle covers, and null nodes.

use std::collections::VecDeque;

use serde::Serialize;

use crate::graph::{pattern_of, NodeId, NodeSet, StructureGraph, StructurePattern};

/// A set of allowed `(row, col)` positions, no row or column repeated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    row_to_col: Vec<Option<usize>>,
    col_to_row: Vec<Option<usize>>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.row_to_col.iter().filter(|c| c.is_some()).count()
    }

    /// Matched pairs ordered by row.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.row_to_col
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|j| (i, j)))
            .collect()
    }

    pub fn col_of(&self, row: usize) -> Option<usize> {
        self.row_to_col[row]
    }

    pub fn row_of(&self, col: usize) -> Option<usize> {
        self.col_to_row[col]
    }

    pub fn is_perfect(&self) -> bool {
        self.row_to_col.iter().all(Option::is_some) && self.col_to_row.iter().all(Option::is_some)
    }
}

/// Maximum-cardinality matching (Hopcroft–Karp).
///
/// Rows are scanned in ascending order and candidate columns in ascending
/// order, so the result is a deterministic function of the pattern.
pub fn max_matching(p: &StructurePattern) -> Matching {
    let adj = p.row_adjacency();
    let (n_rows, n_cols) = (p.rows(), p.cols());
    let mut row_to_col = vec![None; n_rows];
    let mut col_to_row = vec![None; n_cols];
    let mut dist = vec![usize::MAX; n_rows];

    loop {
        // BFS layering from free rows.
        let mut queue = VecDeque::new();
        for r in 0..n_rows {
            if row_to_col[r].is_none() {
                dist[r] = 0;
                queue.push_back(r);
            } else {
                dist[r] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(r) = queue.pop_front() {
            for &c in &adj[r] {
                match col_to_row[c] {
                    None => found = true,
                    Some(next) if dist[next] == usize::MAX => {
                        dist[next] = dist[r] + 1;
                        queue.push_back(next);
                    }
                    Some(_) => {}
                }
            }
        }
        if !found {
            break;
        }
        let mut cursor = vec![0usize; n_rows];
        for r in 0..n_rows {
            if row_to_col[r].is_none() {
                augment(
                    r,
                    &adj,
                    &mut row_to_col,
                    &mut col_to_row,
                    &mut dist,
                    &mut cursor,
                );
            }
        }
    }
    Matching {
        row_to_col,
        col_to_row,
    }
}

fn augment(
    r: usize,
    adj: &[Vec<usize>],
    row_to_col: &mut [Option<usize>],
    col_to_row: &mut [Option<usize>],
    dist: &mut [usize],
    cursor: &mut [usize],
) -> bool {
    while cursor[r] < adj[r].len() {
        let c = adj[r][cursor[r]];
        cursor[r] += 1;
        let ok = match col_to_row[c] {
            None => true,
            Some(next) => {
                dist[next] == dist[r].wrapping_add(1)
                    && augment(next, adj, row_to_col, col_to_row, dist, cursor)
            }
        };
        if ok {
            row_to_col[r] = Some(c);
            col_to_row[c] = Some(r);
            return true;
        }
    }
    dist[r] = usize::MAX;
    false
}

/// Generic rank of an arbitrary pattern.
pub fn pattern_rank(p: &StructurePattern) -> usize {
    max_matching(p).size()
}

/// GenRank(S(G)).
pub fn structural_rank(g: &StructureGraph) -> usize {
    pattern_rank(&pattern_of(g))
}

/// `N - GenRank(S(G))`, the number of edges a repair must add.
pub fn deficiency(g: &StructureGraph) -> usize {
    g.node_count() - structural_rank(g)
}

/// Pairwise node-disjoint directed cycles covering every node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleCover {
    pub cycles: Vec<Vec<NodeId>>,
}

impl CycleCover {
    /// Checks every cover invariant against `g`.
    pub fn validate(&self, g: &StructureGraph) -> Result<(), String> {
        let n = g.node_count();
        let mut seen = vec![false; n];
        for cycle in &self.cycles {
            if cycle.is_empty() {
                return Err("empty cycle".into());
            }
            for (k, &u) in cycle.iter().enumerate() {
                if u >= n {
                    return Err(format!("node index {u} out of range"));
                }
                if seen[u] {
                    return Err(format!("node {} covered twice", g.label(u)));
                }
                seen[u] = true;
                let v = cycle[(k + 1) % cycle.len()];
                if !g.has_edge(u, v) {
                    return Err(format!("missing edge {} -> {}", g.label(u), g.label(v)));
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(u) => Err(format!("node {} not covered", g.label(u))),
            None => Ok(()),
        }
    }

    pub fn labelled(&self, g: &StructureGraph) -> Vec<Vec<String>> {
        self.cycles.iter().map(|c| g.labels_of(c)).collect()
    }
}

/// Decomposes a perfect matching of S(G) into disjoint cycles.
///
/// A matched entry `(i, j)` is the edge `j -> i`. Cycles start at the
/// smallest uncovered node; `(i, i)` is a self-loop of length one.
pub fn cycle_cover(g: &StructureGraph) -> Option<CycleCover> {
    let m = max_matching(&pattern_of(g));
    if !m.is_perfect() {
        return None;
    }
    let n = g.node_count();
    let next: Vec<NodeId> = (0..n)
        .map(|j| m.row_of(j).expect("perfect matching"))
        .collect();
    let mut visited = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut u = start;
        while !visited[u] {
            visited[u] = true;
            cycle.push(u);
            u = next[u];
        }
        cycles.push(cycle);
    }
    Some(CycleCover { cycles })
}

/// Null nodes: coordinates that are nonzero in some kernel vector of a
/// generic matrix with pattern S(G).
///
/// Node `j` is a null node iff removing column `j` leaves the generic rank
/// unchanged (the column then lies generically in the span of the others).
/// Empty when S(G) has full generic rank.
pub fn null_nodes(g: &StructureGraph) -> NodeSet {
    let p = pattern_of(g);
    let rank = pattern_rank(&p);
    if rank == g.node_count() {
        return NodeSet::new();
    }
    (0..g.node_count())
        .filter(|&j| pattern_rank(&p.without_column(j)) == rank)
        .collect()
}
