//! One-shot structural analysis of a graph.

use serde::Serialize;

use crate::bottleneck::{backward_bottleneck, minimax_bottleneck, Bottleneck};
use crate::graph::{pattern_of, StructureGraph};
use crate::numeric::{generic_rank_numeric, RandomizedConfig};
use crate::structural::{cycle_cover, structural_rank, CycleCover};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericRank {
    pub rank: usize,
    pub trials: usize,
    pub rank_rel_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub edges: usize,
    pub structural_rank: usize,
    /// `N - structural_rank`.
    pub deficiency: usize,
    pub coverable: bool,
    pub cover: Option<CycleCover>,
    pub forward_bottleneck: Option<Bottleneck>,
    pub backward_bottleneck: Option<Bottleneck>,
    pub numeric_rank: NumericRank,
}

pub fn analyze(g: &StructureGraph, cfg: &RandomizedConfig) -> AnalysisReport {
    let rank = structural_rank(g);
    let deficiency = g.node_count() - rank;
    AnalysisReport {
        n: g.node_count(),
        edges: g.edge_count(),
        structural_rank: rank,
        deficiency,
        coverable: deficiency == 0,
        cover: cycle_cover(g),
        forward_bottleneck: minimax_bottleneck(g),
        backward_bottleneck: backward_bottleneck(g),
        numeric_rank: NumericRank {
            rank: generic_rank_numeric(&pattern_of(g), cfg),
            trials: cfg.trials,
            rank_rel_tol: cfg.rank_rel_tol,
        },
    }
}
