//! Bottlenecks: node sets whose forward set is strictly smaller.
//!
//! The minimax bottleneck (largest deficiency, then fewest nodes) has the
//! null nodes as its bottle and deficiency `m* = N - GenRank(S(G))`. Adding
//! any edge from that bottle to a node outside its neck lowers `m*` by one,
//! which drives the repair planner.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{forward_set, transpose, NodeId, NodeSet, StructureGraph};
use crate::structural::{deficiency, null_nodes};

/// Largest graph for which witnesses come from exhaustive subset search.
pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BottleneckError {
    #[error("bottle is empty")]
    EmptyBottle,
    #[error("node index {0} out of range")]
    NodeOutOfRange(NodeId),
    #[error("bottle has {bottle} nodes but its neck has {neck}; not a bottleneck")]
    NotDeficient { bottle: usize, neck: usize },
    #[error("graph is cycle coverable; there is no bottleneck to fix")]
    Coverable,
    #[error("deficiency must be at least 1")]
    ZeroDeficiency,
}

/// A bottle `B` with neck `K = B^->` and `|B| - |K| = deficiency > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bottleneck {
    pub bottle: NodeSet,
    pub neck: NodeSet,
    pub deficiency: usize,
}

impl Bottleneck {
    /// Computes the neck of `bottle` and checks it is a bottleneck.
    pub fn from_bottle(g: &StructureGraph, bottle: NodeSet) -> Result<Self, BottleneckError> {
        if bottle.is_empty() {
            return Err(BottleneckError::EmptyBottle);
        }
        if let Some(&v) = bottle.iter().find(|&&v| v >= g.node_count()) {
            return Err(BottleneckError::NodeOutOfRange(v));
        }
        let neck = forward_set(g, &bottle);
        if bottle.len() <= neck.len() {
            return Err(BottleneckError::NotDeficient {
                bottle: bottle.len(),
                neck: neck.len(),
            });
        }
        let deficiency = bottle.len() - neck.len();
        Ok(Self {
            bottle,
            neck,
            deficiency,
        })
    }

    /// Checks a claimed `(B, K)` pair against `g`.
    pub fn validate(&self, g: &StructureGraph) -> Result<(), String> {
        let expected = Self::from_bottle(g, self.bottle.clone()).map_err(|e| e.to_string())?;
        if expected.neck != self.neck {
            return Err(format!(
                "neck {:?} is not the forward set {:?}",
                g.labels_of(&self.neck),
                g.labels_of(&expected.neck)
            ));
        }
        if expected.deficiency != self.deficiency {
            return Err(format!(
                "deficiency {} but |B|-|K| = {}",
                self.deficiency, expected.deficiency
            ));
        }
        Ok(())
    }
}

/// The bottleneck of largest deficiency with the smallest bottle, or `None`
/// when the graph is cycle coverable.
pub fn minimax_bottleneck(g: &StructureGraph) -> Option<Bottleneck> {
    let m_star = deficiency(g);
    if m_star == 0 {
        return None;
    }
    let bottle = null_nodes(g);
    let neck = forward_set(g, &bottle);
    debug_assert_eq!(bottle.len() - neck.len(), m_star);
    Some(Bottleneck {
        bottle,
        neck,
        deficiency: m_star,
    })
}

/// `minimax_bottleneck` of the reversed graph: a set of equations (bottle)
/// that together depend on fewer variables (neck).
pub fn backward_bottleneck(g: &StructureGraph) -> Option<Bottleneck> {
    minimax_bottleneck(&transpose(g))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BottleneckQuery {
    pub exists: bool,
    pub witness: Option<Bottleneck>,
}

/// Whether an `m`-bottleneck exists, i.e. `1 <= m <= m*`.
///
/// For `N <= EXHAUSTIVE_LIMIT` the witness is the smallest bottle with
/// deficiency exactly `m` found by subset search (ties broken by the
/// ascending index list). Larger graphs get a witness by peeling nodes off
/// the minimax bottle: each removal lowers the deficiency by at most one, so
/// every value between `m*` and `0` is passed on the way down.
pub fn bottleneck_exists(g: &StructureGraph, m: usize) -> Result<BottleneckQuery, BottleneckError> {
    if m == 0 {
        return Err(BottleneckError::ZeroDeficiency);
    }
    let m_star = deficiency(g);
    if m > m_star {
        return Ok(BottleneckQuery {
            exists: false,
            witness: None,
        });
    }
    let witness = if g.node_count() <= EXHAUSTIVE_LIMIT {
        exhaustive_witness(g, m)
    } else {
        peel_witness(g, m)
    };
    Ok(BottleneckQuery {
        exists: true,
        witness,
    })
}

fn out_masks(g: &StructureGraph) -> Vec<u32> {
    (0..g.node_count())
        .map(|u| g.successors(u).iter().fold(0u32, |acc, &v| acc | (1 << v)))
        .collect()
}

fn mask_to_set(mask: u32) -> NodeSet {
    (0..32).filter(|&b| mask & (1 << b) != 0).collect()
}

fn is_lex_smaller(a: u32, b: u32) -> bool {
    mask_to_set(a).into_iter().lt(mask_to_set(b))
}

/// Smallest bottle with `|B| - |B^->| == m`, by full enumeration.
fn exhaustive_witness(g: &StructureGraph, m: usize) -> Option<Bottleneck> {
    let n = g.node_count();
    assert!(n <= EXHAUSTIVE_LIMIT);
    let out = out_masks(g);
    let mut forward = vec![0u32; 1 << n];
    let mut best: Option<u32> = None;
    for mask in 1u32..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        forward[mask as usize] = forward[(mask & (mask - 1)) as usize] | out[low];
        let size = mask.count_ones() as usize;
        let neck = forward[mask as usize].count_ones() as usize;
        if size != neck + m {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => {
                mask.count_ones() < b.count_ones()
                    || (mask.count_ones() == b.count_ones() && is_lex_smaller(mask, b))
            }
        };
        if better {
            best = Some(mask);
        }
    }
    best.map(|mask| {
        Bottleneck::from_bottle(g, mask_to_set(mask)).expect("deficient by construction")
    })
}

/// Every bottleneck with maximum deficiency and minimum bottle size, by
/// enumeration. Used to cross-check the null-node characterization.
pub fn exhaustive_minimax(g: &StructureGraph) -> Vec<Bottleneck> {
    let n = g.node_count();
    assert!(
        n <= EXHAUSTIVE_LIMIT,
        "exhaustive search limited to {EXHAUSTIVE_LIMIT} nodes"
    );
    let out = out_masks(g);
    let mut forward = vec![0u32; 1 << n];
    let mut best_key = (0i64, 0u32);
    let mut found: Vec<u32> = Vec::new();
    for mask in 1u32..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        forward[mask as usize] = forward[(mask & (mask - 1)) as usize] | out[low];
        let def = mask.count_ones() as i64 - forward[mask as usize].count_ones() as i64;
        if def <= 0 {
            continue;
        }
        // larger deficiency wins, then smaller bottle
        let key = (def, u32::MAX - mask.count_ones());
        if key > best_key {
            best_key = key;
            found.clear();
        }
        if key == best_key {
            found.push(mask);
        }
    }
    found
        .into_iter()
        .map(|mask| Bottleneck::from_bottle(g, mask_to_set(mask)).expect("deficient"))
        .collect()
}

fn peel_witness(g: &StructureGraph, m: usize) -> Option<Bottleneck> {
    let minimax = minimax_bottleneck(g)?;
    let mut bottle = minimax.bottle;
    let order: Vec<NodeId> = bottle.iter().rev().copied().collect();
    for v in order {
        let current = bottle.len() as i64 - forward_set(g, &bottle).len() as i64;
        if current == m as i64 {
            break;
        }
        bottle.remove(&v);
    }
    Bottleneck::from_bottle(g, bottle)
        .ok()
        .filter(|b| b.deficiency == m)
}

/// Every absent edge from the minimax bottle to a node outside its neck.
///
/// Not all of these lower the deficiency: the target must also be able to
/// absorb a new dependence, which only nodes of the backward minimax bottle
/// can (see [`single_edge_fixes`]).
pub fn bottle_to_non_neck_edges(
    g: &StructureGraph,
) -> Result<BTreeSet<(NodeId, NodeId)>, BottleneckError> {
    let minimax = minimax_bottleneck(g).ok_or(BottleneckError::Coverable)?;
    Ok(minimax
        .bottle
        .iter()
        .flat_map(|&u| (0..g.node_count()).map(move |v| (u, v)))
        .filter(|&(u, v)| !minimax.neck.contains(&v) && !g.has_edge(u, v))
        .collect())
}

/// Absent edges whose addition lowers the deficiency by exactly one.
///
/// Candidates come from [`bottle_to_non_neck_edges`]; each is added and the
/// structural rank recomputed, and only the ones that reduce the deficiency
/// are kept. The result equals the set of absent edges from the forward
/// minimax bottle into the backward minimax bottle.
pub fn single_edge_fixes(
    g: &StructureGraph,
) -> Result<BTreeSet<(NodeId, NodeId)>, BottleneckError> {
    let m_star = deficiency(g);
    let candidates = bottle_to_non_neck_edges(g)?;
    Ok(candidates
        .into_iter()
        .filter(|&(u, v)| {
            let patched = g.with_edge(u, v).expect("edge is new");
            deficiency(&patched) + 1 == m_star
        })
        .collect())
}

/// Edges that make a graph cycle coverable, one deficiency unit at a time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepairPlan {
    pub additions: Vec<(NodeId, NodeId)>,
    /// Deficiency before the first addition and after each one.
    pub trace: Vec<usize>,
}

impl RepairPlan {
    pub fn apply(&self, g: &StructureGraph) -> StructureGraph {
        self.additions.iter().fold(g.clone(), |acc, &(u, v)| {
            acc.with_edge(u, v).expect("plan edges are new")
        })
    }
}

/// Greedy repair: repeatedly add the smallest `(source, target)` index pair
/// among the current single-edge fixes until the deficiency reaches zero.
pub fn repair(g: &StructureGraph) -> Result<RepairPlan, BottleneckError> {
    let mut current = g.clone();
    let mut additions = Vec::new();
    let mut trace = vec![deficiency(&current)];
    while *trace.last().unwrap() > 0 {
        let fixes = single_edge_fixes(&current)?;
        // forward and backward bottles are both nonempty while m* > 0
        let &(u, v) = fixes.iter().next().expect("non-empty fix set");
        current = current.with_edge(u, v).expect("fix edges are new");
        additions.push((u, v));
        trace.push(deficiency(&current));
    }
    Ok(RepairPlan { additions, trace })
}
