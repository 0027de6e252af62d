//! Label-based report documents, printed as text or JSON.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use structnet::bottleneck::{Bottleneck, RepairPlan};
use structnet::nonlinear::ProbeVerdict;
use structnet::numeric::{Solvability, SolvabilityVerdict};
use structnet::report::AnalysisReport;
use structnet::{NodeId, StructureGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BottleneckDoc {
    pub bottle: Vec<String>,
    pub neck: Vec<String>,
    pub deficiency: usize,
}

impl BottleneckDoc {
    pub fn new(g: &StructureGraph, b: &Bottleneck) -> Self {
        Self {
            bottle: g.labels_of(&b.bottle),
            neck: g.labels_of(&b.neck),
            deficiency: b.deficiency,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDoc {
    pub n: usize,
    pub edges: usize,
    pub structural_rank: usize,
    pub deficiency: usize,
    pub coverable: bool,
    pub cover: Option<Vec<Vec<String>>>,
    pub numeric_rank: usize,
    pub trials: usize,
    pub rank_rel_tol: f64,
    pub forward_bottleneck: Option<BottleneckDoc>,
    pub backward_bottleneck: Option<BottleneckDoc>,
}

impl AnalysisDoc {
    pub fn new(g: &StructureGraph, r: &AnalysisReport) -> Self {
        Self {
            n: r.n,
            edges: r.edges,
            structural_rank: r.structural_rank,
            deficiency: r.deficiency,
            coverable: r.coverable,
            cover: r.cover.as_ref().map(|c| c.labelled(g)),
            numeric_rank: r.numeric_rank.rank,
            trials: r.numeric_rank.trials,
            rank_rel_tol: r.numeric_rank.rank_rel_tol,
            forward_bottleneck: r
                .forward_bottleneck
                .as_ref()
                .map(|b| BottleneckDoc::new(g, b)),
            backward_bottleneck: r
                .backward_bottleneck
                .as_ref()
                .map(|b| BottleneckDoc::new(g, b)),
        }
    }
}

pub type Edge = [String; 2];

pub fn edge_doc(g: &StructureGraph, (u, v): (NodeId, NodeId)) -> Edge {
    [g.label(u).to_string(), g.label(v).to_string()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairDoc {
    pub additions: Vec<Edge>,
    pub trace: Vec<usize>,
}

impl RepairDoc {
    pub fn new(g: &StructureGraph, plan: &RepairPlan) -> Self {
        Self {
            additions: plan.additions.iter().map(|&e| edge_doc(g, e)).collect(),
            trace: plan.trace.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckDoc {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeDoc {
    pub delta: f64,
    pub verdict: ProbeVerdict,
    pub expected: ProbeVerdict,
    pub displacement: f64,
    pub best_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationDoc {
    pub seed: u64,
    pub structural_rank: usize,
    pub numeric_rank: usize,
    pub null_nodes: Vec<String>,
    pub null_nodes_numeric: Vec<String>,
    pub points: usize,
    pub sweep: (usize, usize),
    pub anchor_residual: Option<f64>,
    pub probe: ProbeDoc,
    pub checks: Vec<CheckDoc>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvabilityDoc {
    pub verdict: Solvability,
    pub agreeing_trials: usize,
    pub trials: usize,
}

impl From<&SolvabilityVerdict> for SolvabilityDoc {
    fn from(v: &SolvabilityVerdict) -> Self {
        Self {
            verdict: v.verdict,
            agreeing_trials: v.agreeing_trials,
            trials: v.trials,
        }
    }
}

/// Everything a command can report. Absent sections are omitted from JSON.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub analysis: Option<AnalysisDoc>,
    /// `Some(vec![])` is never produced; no cover is `None` with `coverable` false.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cover: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub repair: Option<RepairDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fixes: Option<Vec<Edge>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verification: Option<VerificationDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub solvability: Option<SolvabilityDoc>,
}

impl ReportDocument {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            ..Self::default()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(a) = &self.analysis {
            writeln!(out, "nodes: {}", a.n).unwrap();
            writeln!(out, "edges: {}", a.edges).unwrap();
            writeln!(out, "structural rank: {}", a.structural_rank).unwrap();
            writeln!(
                out,
                "numeric rank: {} ({} trials)",
                a.numeric_rank, a.trials
            )
            .unwrap();
            writeln!(out, "deficiency: {}", a.deficiency).unwrap();
            writeln!(out, "coverable: {}", if a.coverable { "yes" } else { "no" }).unwrap();
            if let Some(cycles) = &a.cover {
                let parts: Vec<String> = cycles
                    .iter()
                    .map(|c| format!("({})", c.join(" ")))
                    .collect();
                writeln!(out, "cover: {}", parts.join("")).unwrap();
            }
            for (name, b) in [
                ("forward", &a.forward_bottleneck),
                ("backward", &a.backward_bottleneck),
            ] {
                if let Some(b) = b {
                    writeln!(
                        out,
                        "{name} bottleneck: bottle {{{}}} neck {{{}}} m={}",
                        b.bottle.join(","),
                        b.neck.join(","),
                        b.deficiency
                    )
                    .unwrap();
                }
            }
        }
        if self.command == "cover" {
            match &self.cover {
                Some(cycles) => {
                    for c in cycles {
                        writeln!(out, "{}", c.join(" -> ")).unwrap();
                    }
                }
                None => writeln!(out, "none").unwrap(),
            }
        }
        if let Some(r) = &self.repair {
            if r.additions.is_empty() {
                writeln!(out, "no edges needed").unwrap();
            }
            for [u, v] in &r.additions {
                writeln!(out, "add {u} -> {v}").unwrap();
            }
            let trace: Vec<String> = r.trace.iter().map(usize::to_string).collect();
            writeln!(out, "deficiency trace: {}", trace.join(" ")).unwrap();
        }
        if let Some(fixes) = &self.fixes {
            writeln!(out, "single-edge fixes: {}", fixes.len()).unwrap();
            for [u, v] in fixes {
                writeln!(out, "{u} -> {v}").unwrap();
            }
        }
        if let Some(v) = &self.verification {
            writeln!(out, "seed: {}", v.seed).unwrap();
            for c in &v.checks {
                writeln!(
                    out,
                    "[{}] {}: {}",
                    if c.passed { "ok" } else { "FAIL" },
                    c.name,
                    c.detail
                )
                .unwrap();
            }
            writeln!(
                out,
                "verification: {}",
                if v.passed { "passed" } else { "failed" }
            )
            .unwrap();
        }
        if let Some(s) = &self.solvability {
            let verdict = match s.verdict {
                Solvability::AlmostAlways => "almost always solvable",
                Solvability::AlmostNever => "almost never solvable",
            };
            writeln!(
                out,
                "{verdict} ({}/{} trials agree)",
                s.agreeing_trials, s.trials
            )
            .unwrap();
        }
        out
    }
}
