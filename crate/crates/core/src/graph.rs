//! Structure graphs and their occupancy patterns.
//!
//! An edge `j -> i` means equation `i` may depend on variable `j`. The
//! structure matrix therefore has entry `(i, j)` allowed iff that edge exists.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Node index into [`StructureGraph::labels`] (file order).
pub type NodeId = usize;

/// Ordered set of node indices.
pub type NodeSet = BTreeSet<NodeId>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed graph document: {0}")]
    Json(String),
    #[error("graph must have at least one node")]
    Empty,
    #[error("empty node label at position {0}")]
    EmptyLabel(usize),
    #[error("duplicate node label {0:?}")]
    DuplicateLabel(String),
    #[error("edge refers to unknown node {0:?}")]
    UnknownLabel(String),
    #[error("edge index ({0}, {1}) out of range")]
    EdgeOutOfRange(usize, usize),
    #[error("duplicate edge {0:?} -> {1:?}")]
    DuplicateEdge(String, String),
    #[error("pattern position ({0}, {1}) outside {2}x{3}")]
    PatternOutOfRange(usize, usize, usize, usize),
    #[error("invalid expansion: {0}")]
    InvalidExpansion(String),
}

/// Directed dependence graph on `N >= 1` labelled nodes.
#[derive(Clone)]
pub struct StructureGraph {
    labels: Vec<String>,
    index: BTreeMap<String, NodeId>,
    edges: BTreeSet<(NodeId, NodeId)>,
    succ: Vec<Vec<NodeId>>,
    pred: Vec<Vec<NodeId>>,
}

impl StructureGraph {
    /// Builds a graph from labels and `(from, to)` index pairs.
    pub fn new<I>(labels: Vec<String>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        if labels.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut index = BTreeMap::new();
        for (pos, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(GraphError::EmptyLabel(pos));
            }
            if index.insert(label.clone(), pos).is_some() {
                return Err(GraphError::DuplicateLabel(label.clone()));
            }
        }
        let n = labels.len();
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::EdgeOutOfRange(u, v));
            }
            if !set.insert((u, v)) {
                return Err(GraphError::DuplicateEdge(
                    labels[u].clone(),
                    labels[v].clone(),
                ));
            }
        }
        Ok(Self::assemble(labels, index, set))
    }

    /// Convenience constructor from string labels and labelled edges.
    pub fn from_labeled(labels: &[&str], edges: &[(&str, &str)]) -> Result<Self, GraphError> {
        let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let lookup: BTreeMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut pairs = Vec::with_capacity(edges.len());
        for (from, to) in edges {
            let u = *lookup
                .get(from)
                .ok_or_else(|| GraphError::UnknownLabel(from.to_string()))?;
            let v = *lookup
                .get(to)
                .ok_or_else(|| GraphError::UnknownLabel(to.to_string()))?;
            pairs.push((u, v));
        }
        Self::new(labels, pairs)
    }

    fn assemble(
        labels: Vec<String>,
        index: BTreeMap<String, NodeId>,
        edges: BTreeSet<(NodeId, NodeId)>,
    ) -> Self {
        let n = labels.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for &(u, v) in &edges {
            succ[u].push(v);
            pred[v].push(u);
        }
        for list in pred.iter_mut() {
            list.sort_unstable();
        }
        Self {
            labels,
            index,
            edges,
            succ,
            pred,
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node]
    }

    pub fn node(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    /// Resolves a list of labels to a node set.
    pub fn node_set<S: AsRef<str>>(&self, labels: &[S]) -> Result<NodeSet, GraphError> {
        labels
            .iter()
            .map(|l| {
                self.node(l.as_ref())
                    .ok_or_else(|| GraphError::UnknownLabel(l.as_ref().to_string()))
            })
            .collect()
    }

    pub fn labels_of<'a, I: IntoIterator<Item = &'a NodeId>>(&self, nodes: I) -> Vec<String> {
        nodes.into_iter().map(|&n| self.labels[n].clone()).collect()
    }

    /// Edges as `(from, to)` in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, from: NodeId, to: NodeId) -> bool {
        self.edges.contains(&(from, to))
    }

    /// Nodes `v` with an edge `node -> v`, ascending.
    pub fn successors(&self, node: NodeId) -> &[NodeId] {
        &self.succ[node]
    }

    /// Nodes `u` with an edge `u -> node`, ascending.
    pub fn predecessors(&self, node: NodeId) -> &[NodeId] {
        &self.pred[node]
    }

    /// Returns a copy with `edge` added. Errors if it already exists.
    pub fn with_edge(&self, from: NodeId, to: NodeId) -> Result<Self, GraphError> {
        let n = self.node_count();
        if from >= n || to >= n {
            return Err(GraphError::EdgeOutOfRange(from, to));
        }
        if self.has_edge(from, to) {
            return Err(GraphError::DuplicateEdge(
                self.labels[from].clone(),
                self.labels[to].clone(),
            ));
        }
        let mut edges = self.edges.clone();
        edges.insert((from, to));
        Ok(Self::assemble(
            self.labels.clone(),
            self.index.clone(),
            edges,
        ))
    }

    /// Parses the JSON graph document.
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: GraphDocument =
            serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        doc.into_graph()
    }

    /// Serializes as a JSON document with one `[from, to]` pair per edge.
    pub fn to_json(&self) -> String {
        let doc = GraphDocument {
            nodes: self.labels.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(u, v)| EdgeSpec::Pair([self.labels[u].clone(), self.labels[v].clone()]))
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("graph document serializes")
    }
}

impl PartialEq for StructureGraph {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.edges == other.edges
    }
}

impl Eq for StructureGraph {}

impl fmt::Debug for StructureGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|&(u, v)| format!("{}->{}", self.labels[u], self.labels[v]))
            .collect();
        f.debug_struct("StructureGraph")
            .field("nodes", &self.labels)
            .field("edges", &edges)
            .finish()
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum EdgeSpec {
    Pair([String; 2]),
    Object {
        from: String,
        to: String,
        #[serde(default)]
        bidir: bool,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDocument {
    nodes: Vec<String>,
    edges: Vec<EdgeSpec>,
}

impl GraphDocument {
    fn into_graph(self) -> Result<StructureGraph, GraphError> {
        // Validate labels before resolving edges so duplicate labels are
        // reported as such rather than as an ambiguous lookup.
        let mut lookup = BTreeMap::new();
        for (pos, label) in self.nodes.iter().enumerate() {
            if label.is_empty() {
                return Err(GraphError::EmptyLabel(pos));
            }
            if lookup.insert(label.as_str(), pos).is_some() {
                return Err(GraphError::DuplicateLabel(label.clone()));
            }
        }
        let resolve = |label: &str| {
            lookup
                .get(label)
                .copied()
                .ok_or_else(|| GraphError::UnknownLabel(label.to_string()))
        };
        let mut pairs = Vec::new();
        for edge in &self.edges {
            match edge {
                EdgeSpec::Pair([from, to]) => pairs.push((resolve(from)?, resolve(to)?)),
                EdgeSpec::Object { from, to, bidir } => {
                    let (u, v) = (resolve(from)?, resolve(to)?);
                    pairs.push((u, v));
                    // a bidirectional self-loop is still a single edge
                    if *bidir && u != v {
                        pairs.push((v, u));
                    }
                }
            }
        }
        StructureGraph::new(self.nodes, pairs)
    }
}

/// Sparse boolean occupancy pattern of an `rows x cols` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructurePattern {
    rows: usize,
    cols: usize,
    allowed: BTreeSet<(usize, usize)>,
}

impl StructurePattern {
    pub fn new<I>(rows: usize, cols: usize, allowed: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let allowed: BTreeSet<_> = allowed.into_iter().collect();
        if let Some(&(i, j)) = allowed.iter().find(|&&(i, j)| i >= rows || j >= cols) {
            return Err(GraphError::PatternOutOfRange(i, j, rows, cols));
        }
        Ok(Self {
            rows,
            cols,
            allowed,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.allowed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.allowed.is_empty()
    }

    pub fn is_allowed(&self, row: usize, col: usize) -> bool {
        self.allowed.contains(&(row, col))
    }

    /// Allowed positions in row-major order.
    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.allowed.iter().copied()
    }

    /// Column lists per row, ascending.
    pub fn row_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.rows];
        for &(i, j) in &self.allowed {
            adj[i].push(j);
        }
        adj
    }

    pub fn transposed(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            allowed: self.allowed.iter().map(|&(i, j)| (j, i)).collect(),
        }
    }

    /// The pattern with column `col` removed; later columns shift left.
    pub fn without_column(&self, col: usize) -> Self {
        assert!(col < self.cols, "column {col} out of range");
        Self {
            rows: self.rows,
            cols: self.cols - 1,
            allowed: self
                .allowed
                .iter()
                .filter(|&&(_, j)| j != col)
                .map(|&(i, j)| (i, if j > col { j - 1 } else { j }))
                .collect(),
        }
    }

    /// Applies `row_perm[i]` to rows and `col_perm[j]` to columns.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            allowed: self
                .allowed
                .iter()
                .map(|&(i, j)| (row_perm[i], col_perm[j]))
                .collect(),
        }
    }
}

/// Structure matrix S(G): `(i, j)` allowed iff edge `j -> i`.
pub fn pattern_of(g: &StructureGraph) -> StructurePattern {
    let n = g.node_count();
    StructurePattern {
        rows: n,
        cols: n,
        allowed: g.edges().map(|(from, to)| (to, from)).collect(),
    }
}

/// Reverses every edge. Backward analysis is forward analysis of this graph.
pub fn transpose(g: &StructureGraph) -> StructureGraph {
    let edges = g.edges.iter().map(|&(u, v)| (v, u)).collect();
    StructureGraph::assemble(g.labels.clone(), g.index.clone(), edges)
}

/// `B^->`: every node reached by an edge leaving `b`.
pub fn forward_set(g: &StructureGraph, b: &NodeSet) -> NodeSet {
    b.iter()
        .flat_map(|&u| g.successors(u).iter().copied())
        .collect()
}

/// Rewrites a shared dependence through a new intermediate variable.
///
/// The new node receives an edge from every `support` node, carries a
/// self-loop, and feeds every `target`; the direct `support -> target` edges
/// are removed. Everything else is untouched.
pub fn expand_shared(
    g: &StructureGraph,
    support: &NodeSet,
    targets: &NodeSet,
    new_label: &str,
) -> Result<StructureGraph, GraphError> {
    let n = g.node_count();
    if targets.is_empty() {
        return Err(GraphError::InvalidExpansion("target set is empty".into()));
    }
    if let Some(&bad) = support.iter().chain(targets.iter()).find(|&&v| v >= n) {
        return Err(GraphError::InvalidExpansion(format!(
            "node index {bad} out of range"
        )));
    }
    if new_label.is_empty() {
        return Err(GraphError::EmptyLabel(n));
    }
    if g.node(new_label).is_some() {
        return Err(GraphError::DuplicateLabel(new_label.to_string()));
    }
    for &t in targets {
        for &s in support {
            if !g.has_edge(s, t) {
                return Err(GraphError::InvalidExpansion(format!(
                    "target {:?} does not depend on support node {:?}",
                    g.label(t),
                    g.label(s)
                )));
            }
        }
    }

    let hidden = n;
    let mut edges: BTreeSet<(NodeId, NodeId)> = g
        .edges()
        .filter(|(u, v)| !(support.contains(u) && targets.contains(v)))
        .collect();
    edges.extend(support.iter().map(|&s| (s, hidden)));
    edges.insert((hidden, hidden));
    edges.extend(targets.iter().map(|&t| (hidden, t)));

    let mut labels = g.labels.clone();
    labels.push(new_label.to_string());
    let mut index = g.index.clone();
    index.insert(new_label.to_string(), hidden);
    Ok(StructureGraph::assemble(labels, index, edges))
}
