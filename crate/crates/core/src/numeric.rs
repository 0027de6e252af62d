//! Randomized numerical oracle for generic rank, kernels and null nodes.
//!
//! Every allowed entry is drawn independently; exact zeros elsewhere. Each
//! trial owns a ChaCha stream seeded from `splitmix64(seed ^ splitmix64(trial))`
//! so trials are reproducible and independent of one another.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{pattern_of, NodeSet, StructureGraph, StructurePattern};

/// Magnitude-banded symmetric distribution: `|x|` uniform on `[low, high]`,
/// sign uniform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntryDistribution {
    pub low: f64,
    pub high: f64,
}

impl Default for EntryDistribution {
    fn default() -> Self {
        Self {
            low: 0.1,
            high: 1.0,
        }
    }
}

impl EntryDistribution {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let magnitude = rng.gen_range(self.low..=self.high);
        if rng.gen::<bool>() {
            magnitude
        } else {
            -magnitude
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizedConfig {
    pub seed: u64,
    pub trials: usize,
    /// Singular values at or below `rank_rel_tol * sigma_max` count as zero.
    pub rank_rel_tol: f64,
    /// Kernel coordinates at or below `coord_tol * |x|_inf` count as zero.
    pub coord_tol: f64,
    pub entry_dist: EntryDistribution,
}

impl Default for RandomizedConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 7,
            rank_rel_tol: 1e-8,
            coord_tol: 1e-6,
            entry_dist: EntryDistribution::default(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("tolerance {0} must lie in (0, 1)")]
    Tolerance(f64),
    #[error("entry distribution [{0}, {1}] must satisfy 0 < low <= high")]
    Distribution(f64, f64),
}

impl RandomizedConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(ConfigError::NoTrials);
        }
        for tol in [self.rank_rel_tol, self.coord_tol] {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(ConfigError::Tolerance(tol));
            }
        }
        let EntryDistribution { low, high } = self.entry_dist;
        if !(low > 0.0 && low <= high && high.is_finite()) {
            return Err(ConfigError::Distribution(low, high));
        }
        Ok(())
    }

    /// Independent generator for stream `stream` under this seed.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(mix(self.seed, stream))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `stream`: `splitmix64(seed ^ splitmix64(stream))`.
pub fn mix(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

pub(crate) fn fill<R: Rng + ?Sized>(
    p: &StructurePattern,
    dist: &EntryDistribution,
    rng: &mut R,
) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(p.rows(), p.cols());
    for (i, j) in p.positions() {
        m[(i, j)] = dist.sample(rng);
    }
    m
}

/// Random matrix respecting `p`, reproducible for a given `(seed, trial)`.
pub fn instantiate(p: &StructurePattern, cfg: &RandomizedConfig, trial: usize) -> DMatrix<f64> {
    fill(p, &cfg.entry_dist, &mut cfg.rng(trial as u64))
}

fn singular_values(m: &DMatrix<f64>) -> DVector<f64> {
    m.clone().svd(false, false).singular_values
}

/// Number of singular values above `rank_rel_tol * sigma_max`.
pub fn numeric_rank(m: &DMatrix<f64>, cfg: &RandomizedConfig) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = singular_values(m);
    let max = sv.max();
    if max <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > cfg.rank_rel_tol * max).count()
}

/// Generic rank estimate: the maximum numeric rank over `cfg.trials` draws.
pub fn generic_rank_numeric(p: &StructurePattern, cfg: &RandomizedConfig) -> usize {
    (0..cfg.trials)
        .map(|t| numeric_rank(&instantiate(p, cfg, t), cfg))
        .max()
        .unwrap_or(0)
}

/// Orthonormal basis of the right null space of `m`.
pub fn kernel_basis(m: &DMatrix<f64>, cfg: &RandomizedConfig) -> Vec<DVector<f64>> {
    let n = m.ncols();
    if n == 0 {
        return Vec::new();
    }
    // Pad with zero rows so the SVD returns all n right singular vectors.
    let rows = m.nrows().max(n);
    let mut square = DMatrix::zeros(rows, n);
    square.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let max = svd.singular_values.max();
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|&(_, &s)| max <= 0.0 || s <= cfg.rank_rel_tol * max)
        .map(|(k, _)| v_t.row(k).transpose())
        .collect()
}

/// Null nodes by majority vote over random kernel vectors.
///
/// Each trial draws a random combination of the kernel basis, so a
/// coordinate that is nonzero anywhere in the kernel is nonzero in the
/// combination with probability one regardless of which basis the SVD picks.
pub fn null_nodes_numeric(g: &StructureGraph, cfg: &RandomizedConfig) -> NodeSet {
    let p = pattern_of(g);
    let n = g.node_count();
    let mut votes = vec![0usize; n];
    for t in 0..cfg.trials {
        let mut rng = cfg.rng(t as u64);
        let a = fill(&p, &cfg.entry_dist, &mut rng);
        let basis = kernel_basis(&a, cfg);
        if basis.is_empty() {
            continue;
        }
        let mut x = DVector::zeros(n);
        for v in &basis {
            x += v * cfg.entry_dist.sample(&mut rng);
        }
        let scale = x.amax();
        for (j, vote) in votes.iter_mut().enumerate() {
            if x[j].abs() > cfg.coord_tol * scale {
                *vote += 1;
            }
        }
    }
    (0..n).filter(|&j| 2 * votes[j] > cfg.trials).collect()
}

/// `A x = b` where `A` follows `a_pattern` and `b` may be nonzero only on
/// the rows listed in `b_rows`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredLinearSystem {
    pub a_pattern: StructurePattern,
    pub b_rows: Vec<bool>,
}

#[derive(Debug, Error)]
pub enum LinearSystemError {
    #[error("malformed linear system document: {0}")]
    Json(String),
    #[error(transparent)]
    Pattern(#[from] crate::graph::GraphError),
    #[error("right-hand side row {0} outside 0..{1}")]
    RhsOutOfRange(usize, usize),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearSystemDocument {
    m: usize,
    n: usize,
    a_pattern: Vec<[usize; 2]>,
    b_pattern: Vec<usize>,
}

impl StructuredLinearSystem {
    pub fn new(a_pattern: StructurePattern, b_rows: Vec<bool>) -> Self {
        assert_eq!(
            a_pattern.rows(),
            b_rows.len(),
            "b must have one entry per row"
        );
        Self { a_pattern, b_rows }
    }

    pub fn from_json(text: &str) -> Result<Self, LinearSystemError> {
        let doc: LinearSystemDocument =
            serde_json::from_str(text).map_err(|e| LinearSystemError::Json(e.to_string()))?;
        let a_pattern =
            StructurePattern::new(doc.m, doc.n, doc.a_pattern.iter().map(|&[i, j]| (i, j)))?;
        let mut b_rows = vec![false; doc.m];
        for &k in &doc.b_pattern {
            if k >= doc.m {
                return Err(LinearSystemError::RhsOutOfRange(k, doc.m));
            }
            b_rows[k] = true;
        }
        Ok(Self { a_pattern, b_rows })
    }

    pub fn to_json(&self) -> String {
        let doc = LinearSystemDocument {
            m: self.a_pattern.rows(),
            n: self.a_pattern.cols(),
            a_pattern: self.a_pattern.positions().map(|(i, j)| [i, j]).collect(),
            b_pattern: (0..self.b_rows.len()).filter(|&k| self.b_rows[k]).collect(),
        };
        serde_json::to_string(&doc).expect("linear system serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Solvability {
    AlmostAlways,
    AlmostNever,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SolvabilityVerdict {
    pub verdict: Solvability,
    pub agreeing_trials: usize,
    pub trials: usize,
}

/// Decides whether a structured `A x = b` is solvable for almost every or
/// almost no choice of entries. Solvable in a trial iff
/// `rank(A) == rank([A | b])`; the verdict is the strict majority outcome
/// (ties go to `AlmostNever`).
pub fn classify_solvability(
    s: &StructuredLinearSystem,
    cfg: &RandomizedConfig,
) -> SolvabilityVerdict {
    let (m, n) = (s.a_pattern.rows(), s.a_pattern.cols());
    let mut solvable = 0;
    for t in 0..cfg.trials {
        let mut rng = cfg.rng(t as u64);
        let a = fill(&s.a_pattern, &cfg.entry_dist, &mut rng);
        let mut augmented = DMatrix::zeros(m, n + 1);
        augmented.view_mut((0, 0), (m, n)).copy_from(&a);
        for (k, &allowed) in s.b_rows.iter().enumerate() {
            if allowed {
                augmented[(k, n)] = cfg.entry_dist.sample(&mut rng);
            }
        }
        if numeric_rank(&a, cfg) == numeric_rank(&augmented, cfg) {
            solvable += 1;
        }
    }
    let verdict = if 2 * solvable > cfg.trials {
        Solvability::AlmostAlways
    } else {
        Solvability::AlmostNever
    };
    let agreeing_trials = match verdict {
        Solvability::AlmostAlways => solvable,
        Solvability::AlmostNever => cfg.trials - solvable,
    };
    SolvabilityVerdict {
        verdict,
        agreeing_trials,
        trials: cfg.trials,
    }
}
