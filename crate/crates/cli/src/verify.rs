//! Numeric cross-checks of the structural analysis.

use structnet::nonlinear::{
    jacobian_rank_sweep, probe_robustness, sample_function, sample_point, solve_from_anchor,
    ProbeVerdict,
};
use structnet::numeric::{generic_rank_numeric, null_nodes_numeric};
use structnet::{null_nodes, pattern_of, structural_rank, RandomizedConfig, StructureGraph};

use crate::report::{CheckDoc, ProbeDoc, VerificationDoc};

pub const ANCHOR_OFFSET: f64 = 0.05;
pub const ANCHOR_RESIDUAL: f64 = 1e-10;

fn check(name: &str, passed: bool, detail: String) -> CheckDoc {
    CheckDoc {
        name: name.to_string(),
        passed,
        detail,
    }
}

fn braces(labels: &[String]) -> String {
    format!("{{{}}}", labels.join(","))
}

pub fn verify(
    g: &StructureGraph,
    cfg: &RandomizedConfig,
    points: usize,
    delta: f64,
) -> VerificationDoc {
    let n = g.node_count();
    let rank = structural_rank(g);
    let numeric = generic_rank_numeric(&pattern_of(g), cfg);
    let mut checks = vec![check(
        "rank agreement",
        rank == numeric,
        format!("structural {rank}, numeric {numeric}"),
    )];

    let null = g.labels_of(&null_nodes(g));
    let null_numeric = g.labels_of(&null_nodes_numeric(g, cfg));
    checks.push(check(
        "null-node agreement",
        null == null_numeric,
        format!(
            "structural {}, numeric {}",
            braces(&null),
            braces(&null_numeric)
        ),
    ));

    let f = sample_function(g, cfg);
    let sweep = jacobian_rank_sweep(&f, points, cfg);
    checks.push(check(
        "jacobian sweep",
        sweep.1 == rank,
        format!("min {}, max {} over {points} points", sweep.0, sweep.1),
    ));

    let x0 = sample_point(n, cfg, 0);
    let coverable = rank == n;
    let anchor_residual = if coverable {
        let report = solve_from_anchor(&f, &x0, ANCHOR_OFFSET, cfg).expect("finite anchor");
        checks.push(check(
            "anchored newton",
            report.residual <= ANCHOR_RESIDUAL,
            format!(
                "residual {:.3e} after {} iterations",
                report.residual, report.iterations
            ),
        ));
        Some(report.residual)
    } else {
        None
    };

    let probe = probe_robustness(&f, &x0, delta, cfg).expect("finite anchor");
    let expected = if coverable {
        ProbeVerdict::RobustObserved
    } else {
        ProbeVerdict::FragileObserved
    };
    checks.push(check(
        "robustness probe",
        probe.verdict == expected,
        format!(
            "{:?} (expected {:?}), delta {:.1e}, residual {:.3e}",
            probe.verdict, expected, delta, probe.best_residual
        ),
    ));

    let passed = checks.iter().all(|c| c.passed);
    VerificationDoc {
        seed: cfg.seed,
        structural_rank: rank,
        numeric_rank: numeric,
        null_nodes: null,
        null_nodes_numeric: null_numeric,
        points,
        sweep,
        anchor_residual,
        probe: ProbeDoc {
            delta,
            verdict: probe.verdict,
            expected,
            displacement: probe.displacement,
            best_residual: probe.best_residual,
        },
        checks,
        passed,
    }
}
