//! Random nonlinear systems that respect a structure graph, with analytic
//! Jacobians, a damped Newton / Gauss–Newton solver, and robustness probes.
//!
//! Component `i` of a sampled function is
//! `c_i + sum over edges j -> i of a_ij x_j + b_ij tanh(x_j) + d_ij x_j^2`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{NodeId, StructureGraph};
use crate::numeric::{numeric_rank, RandomizedConfig};

const STREAM_FUNCTION: u64 = 0x5346_554e_4354_0001;
const STREAM_POINTS: u64 = 0x5346_554e_4354_0002;
const STREAM_OFFSET: u64 = 0x5346_554e_4354_0003;
const STREAM_PERTURB: u64 = 0x5346_554e_4354_0004;

/// Half-width of the box `[-2, 2]^N` used for random evaluation points.
pub const POINT_RADIUS: f64 = 2.0;

#[derive(Debug, Error, PartialEq)]
pub enum NonlinearError {
    #[error("point has {got} coordinates, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("non-finite input coordinate {0}")]
    NonFinite(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub equation: NodeId,
    pub variable: NodeId,
    pub linear: f64,
    pub saturating: f64,
    pub quadratic: f64,
}

impl Term {
    fn value(&self, x: f64) -> f64 {
        self.linear * x + self.saturating * x.tanh() + self.quadratic * x * x
    }

    fn derivative(&self, x: f64) -> f64 {
        let sech = 1.0 / x.cosh();
        self.linear + self.saturating * sech * sech + 2.0 * self.quadratic * x
    }
}

/// A concrete `F` in the family of functions respecting a graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuredFunction {
    n: usize,
    terms: Vec<Term>,
    constants: Vec<f64>,
}

impl StructuredFunction {
    /// Builds a function from explicit terms; every term must sit on an edge.
    pub fn new(g: &StructureGraph, terms: Vec<Term>, constants: Vec<f64>) -> Option<Self> {
        let n = g.node_count();
        let ok = constants.len() == n && terms.iter().all(|t| g.has_edge(t.variable, t.equation));
        ok.then_some(Self {
            n,
            terms,
            constants,
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn constants(&self) -> &[f64] {
        &self.constants
    }

    fn check(&self, x: &DVector<f64>) -> Result<(), NonlinearError> {
        if x.len() != self.n {
            return Err(NonlinearError::Dimension {
                expected: self.n,
                got: x.len(),
            });
        }
        match x.iter().position(|v| !v.is_finite()) {
            Some(k) => Err(NonlinearError::NonFinite(k)),
            None => Ok(()),
        }
    }

    pub fn eval(&self, x: &DVector<f64>) -> Result<DVector<f64>, NonlinearError> {
        self.check(x)?;
        let mut out = DVector::from_column_slice(&self.constants);
        for t in &self.terms {
            out[t.equation] += t.value(x[t.variable]);
        }
        Ok(out)
    }

    pub fn jacobian(&self, x: &DVector<f64>) -> Result<DMatrix<f64>, NonlinearError> {
        self.check(x)?;
        let mut jac = DMatrix::zeros(self.n, self.n);
        for t in &self.terms {
            jac[(t.equation, t.variable)] += t.derivative(x[t.variable]);
        }
        Ok(jac)
    }

    /// Adds an independent uniform draw from `[-delta, delta]` to every
    /// coefficient and constant. The result still respects the graph.
    pub fn perturbed<R: Rng + ?Sized>(&self, delta: f64, rng: &mut R) -> Self {
        let mut draw = |v: f64| {
            if delta > 0.0 {
                v + rng.gen_range(-delta..=delta)
            } else {
                v
            }
        };
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                linear: draw(t.linear),
                saturating: draw(t.saturating),
                quadratic: draw(t.quadratic),
                ..*t
            })
            .collect();
        let constants = self.constants.iter().map(|&c| draw(c)).collect();
        Self {
            n: self.n,
            terms,
            constants,
        }
    }
}

/// Draws every coefficient from `cfg.entry_dist`, which excludes a band
/// around zero, so no term vanishes.
pub fn sample_function(g: &StructureGraph, cfg: &RandomizedConfig) -> StructuredFunction {
    let mut rng = cfg.rng(STREAM_FUNCTION);
    let dist = cfg.entry_dist;
    let mut terms: Vec<Term> = g
        .edges()
        .map(|(from, to)| Term {
            equation: to,
            variable: from,
            linear: dist.sample(&mut rng),
            saturating: dist.sample(&mut rng),
            quadratic: dist.sample(&mut rng),
        })
        .collect();
    terms.sort_by_key(|t| (t.equation, t.variable));
    let constants = (0..g.node_count()).map(|_| dist.sample(&mut rng)).collect();
    StructuredFunction {
        n: g.node_count(),
        terms,
        constants,
    }
}

/// Uniform point in `[-POINT_RADIUS, POINT_RADIUS]^n`.
pub fn random_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-POINT_RADIUS..=POINT_RADIUS))
}

/// Reproducible random point for `(cfg.seed, index)`.
pub fn sample_point(n: usize, cfg: &RandomizedConfig, index: u64) -> DVector<f64> {
    let mut rng = cfg.rng(STREAM_POINTS ^ index.wrapping_mul(0x9E37_79B9));
    random_point(n, &mut rng)
}

/// Minimum and maximum Jacobian rank over `points` random points.
pub fn jacobian_rank_sweep(
    f: &StructuredFunction,
    points: usize,
    cfg: &RandomizedConfig,
) -> (usize, usize) {
    assert!(points >= 1, "sweep needs at least one point");
    let mut rng = cfg.rng(STREAM_POINTS);
    let mut lo = usize::MAX;
    let mut hi = 0;
    for _ in 0..points {
        let x = random_point(f.n, &mut rng);
        let rank = numeric_rank(&f.jacobian(&x).expect("finite point"), cfg);
        lo = lo.min(rank);
        hi = hi.max(rank);
    }
    (lo, hi)
}

/// Local dimension of the solution set of `F(X) = F(x0)`: `N - rank DF(x0)`.
pub fn manifold_dimension_at(
    f: &StructuredFunction,
    x0: &DVector<f64>,
    cfg: &RandomizedConfig,
) -> Result<usize, NonlinearError> {
    Ok(f.n - numeric_rank(&f.jacobian(x0)?, cfg))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    pub max_halvings: usize,
    pub residual_tol: f64,
    pub step_tol: f64,
    /// Relative singular-value cutoff for the least-squares step.
    pub pinv_rel_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            max_halvings: 30,
            residual_tol: 1e-10,
            step_tol: 1e-14,
            pinv_rel_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewtonReport {
    pub x: Vec<f64>,
    /// `|F(x) - C|_inf` at the returned point.
    pub residual: f64,
    pub iterations: usize,
    /// Residual reached `residual_tol`.
    pub converged: bool,
}

/// Damped Newton on `F(X) = target`.
///
/// The step solves `J s = -r` in the least-squares sense through an SVD, so
/// it is the Newton step when `J` is nonsingular and the Gauss–Newton step
/// otherwise. The step is halved until `|r|_2` decreases. Iteration stops
/// once `|r|_inf <= residual_tol`, the step falls below `step_tol`, or no
/// halving decreases the residual.
pub fn damped_newton(
    f: &StructuredFunction,
    target: &DVector<f64>,
    start: &DVector<f64>,
    opts: &NewtonOptions,
) -> Result<NewtonReport, NonlinearError> {
    let mut x = start.clone();
    let mut r = f.eval(&x)? - target;
    let mut iterations = 0;
    while r.amax() > opts.residual_tol && iterations < opts.max_iterations {
        iterations += 1;
        let jac = f.jacobian(&x)?;
        let svd = jac.svd(true, true);
        let cutoff = opts.pinv_rel_tol * svd.singular_values.max();
        let step = match svd.solve(&(-&r), cutoff) {
            Ok(s) => s,
            Err(_) => break,
        };
        if step.amax() <= opts.step_tol {
            break;
        }
        let norm = r.norm();
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = &x + &step * scale;
            if let Ok(value) = f.eval(&trial) {
                let trial_r = value - target;
                if trial_r.norm() < norm {
                    accepted = Some((trial, trial_r));
                    break;
                }
            }
            scale *= 0.5;
        }
        match accepted {
            Some((nx, nr)) => {
                x = nx;
                r = nr;
            }
            None => break,
        }
    }
    let residual = r.amax();
    Ok(NewtonReport {
        x: x.iter().copied().collect(),
        residual,
        iterations,
        converged: residual <= opts.residual_tol,
    })
}

/// Solves `F(X) = F(x0)` starting from `x0` moved by a uniform offset in
/// `[-offset, offset]^N`. `x0` is a root by construction.
pub fn solve_from_anchor(
    f: &StructuredFunction,
    x0: &DVector<f64>,
    offset: f64,
    cfg: &RandomizedConfig,
) -> Result<NewtonReport, NonlinearError> {
    let target = f.eval(x0)?;
    let mut start = x0.clone();
    if offset > 0.0 {
        let mut rng = cfg.rng(STREAM_OFFSET);
        start
            .iter_mut()
            .for_each(|v| *v += rng.gen_range(-offset..=offset));
    }
    damped_newton(f, &target, &start, &NewtonOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProbeVerdict {
    RobustObserved,
    FragileObserved,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessProbeResult {
    pub verdict: ProbeVerdict,
    pub base_solution: Vec<f64>,
    pub perturbed_solution: Option<Vec<f64>>,
    pub perturbation_size: f64,
    /// `|X* - x0|_2` for the accepted root, or for the best attempt.
    pub displacement: f64,
    /// Smallest `|F*(X) - C|_inf` reached.
    pub best_residual: f64,
}

/// Number of Gauss–Newton starts used to decide fragility.
pub const PROBE_STARTS: usize = 5;
/// A root counts as the continuation of `x0` within `100 delta (1 + |x0|)`.
pub const DISPLACEMENT_FACTOR: f64 = 100.0;
/// Fragile when every start stalls with residual above this multiple of delta.
pub const FRAGILE_RESIDUAL_RATIO: f64 = 1e-3;
/// Half-width of the random offsets for the extra starts.
pub const RESTART_SPREAD: f64 = 1.0;

/// Perturbs `F` by at most `delta` per coefficient (keeping its structure)
/// and looks for a solution of `F*(X) = F(x0)` near `x0`.
pub fn probe_robustness(
    f: &StructuredFunction,
    x0: &DVector<f64>,
    delta: f64,
    cfg: &RandomizedConfig,
) -> Result<RobustnessProbeResult, NonlinearError> {
    let target = f.eval(x0)?;
    let mut rng = cfg.rng(STREAM_PERTURB);
    let perturbed = f.perturbed(delta, &mut rng);
    let opts = NewtonOptions::default();
    let bound = DISPLACEMENT_FACTOR * delta * (1.0 + x0.norm());

    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    for start_index in 0..PROBE_STARTS {
        let start = if start_index == 0 {
            x0.clone()
        } else {
            x0 + DVector::from_fn(x0.len(), |_, _| {
                rng.gen_range(-RESTART_SPREAD..=RESTART_SPREAD)
            })
        };
        let report = damped_newton(&perturbed, &target, &start, &opts)?;
        let displacement = (DVector::from_column_slice(&report.x) - x0).norm();
        if report.converged && displacement <= bound {
            return Ok(RobustnessProbeResult {
                verdict: ProbeVerdict::RobustObserved,
                base_solution: x0.iter().copied().collect(),
                perturbed_solution: Some(report.x),
                perturbation_size: delta,
                displacement,
                best_residual: report.residual,
            });
        }
        if best.as_ref().is_none_or(|(r, _, _)| report.residual < *r) {
            best = Some((report.residual, report.x, displacement));
        }
    }
    let (best_residual, _, displacement) = best.expect("at least one start");
    let verdict = if best_residual > FRAGILE_RESIDUAL_RATIO * delta {
        ProbeVerdict::FragileObserved
    } else {
        ProbeVerdict::Inconclusive
    };
    Ok(RobustnessProbeResult {
        verdict,
        base_solution: x0.iter().copied().collect(),
        perturbed_solution: None,
        perturbation_size: delta,
        displacement,
        best_residual,
    })
}
