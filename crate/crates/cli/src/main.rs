mod report;
mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use structnet::dot::to_dot;
use structnet::numeric::{classify_solvability, Solvability, StructuredLinearSystem};
use structnet::{
    analyze, cycle_cover, expand_shared, minimax_bottleneck, repair, single_edge_fixes,
    BottleneckError, RandomizedConfig, StructureGraph,
};

use report::{edge_doc, AnalysisDoc, RepairDoc, ReportDocument};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_FRAGILE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "structnet",
    version,
    about = "Structural robustness analysis of equation dependence graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Seed for every randomized computation
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random instantiations per numeric decision
    #[arg(long, global = true, default_value_t = 7)]
    trials: usize,
    /// Relative singular-value threshold for numeric rank
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Random points in the Jacobian sweep
    #[arg(long, global = true, default_value_t = 100)]
    points: usize,
    /// Emit the report as JSON
    #[arg(long, global = true)]
    json: bool,
    /// Write output to a file instead of stdout
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, coverability and minimax bottlenecks (exit 2 when not coverable)
    Analyze { file: PathBuf },
    /// Print a cycle cover, one cycle per line, or "none"
    Cover { file: PathBuf },
    /// Greedy minimal edge additions, or with --all every single-edge fix
    Repair {
        file: PathBuf,
        #[arg(long)]
        all: bool,
    },
    /// Cross-check structural results against numeric and nonlinear sampling
    Verify {
        file: PathBuf,
        /// Coefficient perturbation size for the robustness probe
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
    },
    /// Graphviz DOT with the minimax bottle blue and neck red
    Render { file: PathBuf },
    /// Generic solvability of a structured linear system (exit 2 when almost never)
    Solvable { file: PathBuf },
    /// Route a shared dependence through a new hidden variable
    Expand {
        file: PathBuf,
        /// Comma-separated labels the new variable depends on
        #[arg(long, value_delimiter = ',', required = true)]
        support: Vec<String>,
        /// Comma-separated labels that will depend on the new variable
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<String>,
        #[arg(long)]
        label: String,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_graph(path: &Path) -> Result<StructureGraph> {
    StructureGraph::from_json(&read(path)?)
        .with_context(|| format!("invalid graph file {}", path.display()))
}

fn emit(opts: &Opts, text: &str) -> Result<()> {
    match &opts.output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_report(opts: &Opts, doc: &ReportDocument) -> Result<()> {
    let text = if opts.json {
        doc.to_json()
    } else {
        doc.to_text()
    };
    emit(opts, &text)
}

fn config(opts: &Opts) -> Result<RandomizedConfig> {
    let cfg = RandomizedConfig {
        seed: opts.seed,
        trials: opts.trials,
        rank_rel_tol: opts.tol,
        ..RandomizedConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<u8> {
    let opts = &cli.opts;
    let cfg = config(opts)?;
    match &cli.command {
        Command::Analyze { file } => {
            let g = load_graph(file)?;
            let mut doc = ReportDocument::new("analyze");
            let analysis = AnalysisDoc::new(&g, &analyze(&g, &cfg));
            let coverable = analysis.coverable;
            doc.analysis = Some(analysis);
            emit_report(opts, &doc)?;
            Ok(if coverable { EXIT_OK } else { EXIT_FRAGILE })
        }
        Command::Cover { file } => {
            let g = load_graph(file)?;
            let mut doc = ReportDocument::new("cover");
            doc.cover = cycle_cover(&g).map(|c| c.labelled(&g));
            let found = doc.cover.is_some();
            emit_report(opts, &doc)?;
            Ok(if found { EXIT_OK } else { EXIT_FRAGILE })
        }
        Command::Repair { file, all } => {
            let g = load_graph(file)?;
            let mut doc = ReportDocument::new("repair");
            if *all {
                let fixes = match single_edge_fixes(&g) {
                    Ok(fixes) => fixes,
                    Err(BottleneckError::Coverable) => Default::default(),
                    Err(e) => return Err(e.into()),
                };
                doc.fixes = Some(fixes.into_iter().map(|e| edge_doc(&g, e)).collect());
            } else {
                doc.repair = Some(RepairDoc::new(&g, &repair(&g)?));
            }
            emit_report(opts, &doc)?;
            Ok(EXIT_OK)
        }
        Command::Verify { file, delta } => {
            if !(*delta > 0.0 && delta.is_finite()) {
                bail!("--delta must be positive");
            }
            if opts.points == 0 {
                bail!("--points must be at least 1");
            }
            let g = load_graph(file)?;
            let mut doc = ReportDocument::new("verify");
            let summary = verify::verify(&g, &cfg, opts.points, *delta);
            let passed = summary.passed;
            doc.verification = Some(summary);
            emit_report(opts, &doc)?;
            Ok(if passed { EXIT_OK } else { EXIT_ERROR })
        }
        Command::Render { file } => {
            let g = load_graph(file)?;
            emit(opts, &to_dot(&g, minimax_bottleneck(&g).as_ref()))?;
            Ok(EXIT_OK)
        }
        Command::Solvable { file } => {
            let system = StructuredLinearSystem::from_json(&read(file)?)
                .with_context(|| format!("invalid linear system file {}", file.display()))?;
            let verdict = classify_solvability(&system, &cfg);
            let mut doc = ReportDocument::new("solvable");
            doc.solvability = Some((&verdict).into());
            emit_report(opts, &doc)?;
            Ok(match verdict.verdict {
                Solvability::AlmostAlways => EXIT_OK,
                Solvability::AlmostNever => EXIT_FRAGILE,
            })
        }
        Command::Expand {
            file,
            support,
            targets,
            label,
        } => {
            let g = load_graph(file)?;
            let expanded = expand_shared(&g, &g.node_set(support)?, &g.node_set(targets)?, label)?;
            emit(opts, &(expanded.to_json() + "\n"))?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
