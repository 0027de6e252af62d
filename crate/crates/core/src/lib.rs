//! Structural robustness analysis for structured systems of `N` equations
//! in `N` unknowns.
//!
//! A [`StructureGraph`] records which variables each equation may depend on
//! (edge `j -> i`: equation `i` uses `x_j`). From the graph alone the crate
//! computes the generic rank of the structure matrix, a cycle cover when one
//! exists, the null nodes, the minimax bottleneck and a minimal edge-addition
//! repair. A randomized numerical oracle and a nonlinear sampler check the
//! combinatorial answers independently.

pub mod bottleneck;
pub mod dot;
pub mod graph;
pub mod nonlinear;
pub mod numeric;
pub mod report;
pub mod structural;

pub use bottleneck::{
    backward_bottleneck, bottle_to_non_neck_edges, bottleneck_exists, exhaustive_minimax,
    minimax_bottleneck, repair, single_edge_fixes, Bottleneck, BottleneckError, BottleneckQuery,
    RepairPlan,
};
pub use graph::{
    expand_shared, forward_set, pattern_of, transpose, GraphError, NodeId, NodeSet, StructureGraph,
    StructurePattern,
};
pub use numeric::RandomizedConfig;
pub use report::{analyze, AnalysisReport};
pub use structural::{
    cycle_cover, deficiency, max_matching, null_nodes, structural_rank, CycleCover, Matching,
};
