//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use structnet::nonlinear::{
    manifold_dimension_at, probe_robustness, sample_function, sample_point, solve_from_anchor,
    ProbeVerdict,
};
use structnet::numeric::{
    generic_rank_numeric, instantiate, kernel_basis, null_nodes_numeric, numeric_rank,
};
use structnet::{
    backward_bottleneck, bottleneck_exists, cycle_cover, deficiency, minimax_bottleneck,
    null_nodes, pattern_of, repair, single_edge_fixes, structural_rank, Bottleneck,
    RandomizedConfig, StructureGraph,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const FIXTURES: &[&str] = &[
    "fig1", "fig2", "fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig5c", "fig5d", "fig5e", "fig6a",
    "fig6b", "fig7a", "fig7b", "example2",
];

fn fixture_path(name: &str) -> PathBuf {
    [
        env!("CARGO_MANIFEST_DIR"),
        "..",
        "..",
        "fixtures",
        &format!("{name}.json"),
    ]
    .iter()
    .collect()
}

fn fixture(name: &str) -> StructureGraph {
    StructureGraph::from_json(&std::fs::read_to_string(fixture_path(name)).unwrap()).unwrap()
}

fn set(g: &StructureGraph, labels: &[&str]) -> BTreeSet<usize> {
    g.node_set(labels).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cfg(seed: u64) -> RandomizedConfig {
    RandomizedConfig::with_seed(seed)
}

fn fig1() -> Outcome {
    let g = fixture("fig1");
    ensure(structural_rank(&g) == 2, || {
        format!("structural rank {}", structural_rank(&g))
    })?;
    ensure(cycle_cover(&g).is_none(), || "unexpected cover".into())?;
    let b = minimax_bottleneck(&g).ok_or("no bottleneck")?;
    ensure(
        b.bottle == set(&g, &["1", "2"]) && b.neck == set(&g, &["3"]) && b.deficiency == 1,
        || format!("{b:?}"),
    )?;
    let c = cfg(42);
    let p = pattern_of(&g);
    for t in 0..c.trials {
        let r = numeric_rank(&instantiate(&p, &c, t), &c);
        ensure(r == 2, || format!("trial {t} numeric rank {r}"))?;
    }
    Ok("rank 2, no cover, bottle {1,2} neck {3}, numeric rank 2 in 7/7 trials".into())
}

fn fig2() -> Outcome {
    let g = fixture("fig2");
    ensure(structural_rank(&g) == 4, || "rank".into())?;
    let cover = cycle_cover(&g).ok_or("no cover")?;
    cover.validate(&g)?;
    Ok(format!("rank 4, cover {:?} validated", cover.labelled(&g)))
}

fn fig3() -> Outcome {
    let g = fixture("fig3a");
    let b = minimax_bottleneck(&g).ok_or("no bottleneck")?;
    ensure(b.deficiency == 1, || format!("m* {}", b.deficiency))?;
    ensure(
        b.bottle == set(&g, &["1", "2", "3"]) && b.neck == set(&g, &["4", "5"]),
        || format!("{b:?}"),
    )?;
    let g = fixture("fig3b");
    let cover = cycle_cover(&g).ok_or("fig3b not coverable")?;
    cover.validate(&g)?;
    Ok("fig3a m*=1 bottle {1,2,3} neck {4,5}; fig3b coverable".into())
}

fn example2() -> Outcome {
    let g = fixture("example2");
    let c = cfg(42);
    let a = instantiate(&pattern_of(&g), &c, 0);
    let dim = kernel_basis(&a, &c).len();
    ensure(dim == 1, || format!("kernel dimension {dim}"))?;
    let expected = set(&g, &["1", "2", "3"]);
    ensure(null_nodes(&g) == expected, || {
        "combinatorial null nodes".into()
    })?;
    ensure(null_nodes_numeric(&g, &c) == expected, || {
        "numeric null nodes".into()
    })?;
    let fixes = single_edge_fixes(&g).map_err(|e| e.to_string())?;
    ensure(fixes.len() == 9, || format!("{} fixes", fixes.len()))?;
    for &(u, v) in &fixes {
        let fixed = g.with_edge(u, v).unwrap();
        let cover = cycle_cover(&fixed).ok_or_else(|| format!("fix {u}->{v} leaves no cover"))?;
        cover.validate(&fixed)?;
    }
    Ok("kernel dim 1, null nodes {1,2,3} both ways, 9 fixes each coverable".into())
}

fn fig6a() -> Outcome {
    let g = fixture("fig6a");
    ensure(deficiency(&g) == 6, || format!("m* {}", deficiency(&g)))?;
    for m in 1..=6 {
        let q = bottleneck_exists(&g, m).map_err(|e| e.to_string())?;
        ensure(q.exists, || format!("no {m}-bottleneck"))?;
    }
    ensure(!bottleneck_exists(&g, 7).unwrap().exists, || {
        "7-bottleneck reported".into()
    })?;
    Bottleneck {
        bottle: set(&g, &["6", "7"]),
        neck: set(&g, &["15"]),
        deficiency: 1,
    }
    .validate(&g)?;
    let plan = repair(&g).map_err(|e| e.to_string())?;
    ensure(plan.additions.len() == 6, || {
        format!("{} repair edges", plan.additions.len())
    })?;
    ensure(cycle_cover(&plan.apply(&g)).is_some(), || {
        "repaired graph not coverable".into()
    })?;
    let b = minimax_bottleneck(&g).unwrap();
    Ok(format!(
        "m*=6, exists for 1..=6 not 7, witness ({{6,7}},{{15}}) valid, 6-edge repair; bottle {:?}",
        g.labels_of(&b.bottle)
    ))
}

fn fig7b() -> Outcome {
    let g = fixture("fig7b");
    let f = minimax_bottleneck(&g).ok_or("no forward bottleneck")?;
    ensure(
        f.bottle == set(&g, &["1", "2"]) && f.neck == set(&g, &["5"]) && f.deficiency == 1,
        || format!("{f:?}"),
    )?;
    let b = backward_bottleneck(&g).ok_or("no backward bottleneck")?;
    ensure(b.bottle == set(&g, &["3", "4"]), || format!("{b:?}"))?;
    Ok("forward ({1,2},{5},1), backward bottle {3,4}".into())
}

fn permutation_cover_exists(g: &StructureGraph) -> bool {
    fn go(g: &StructureGraph, perm: &mut Vec<usize>, k: usize) -> bool {
        let n = perm.len();
        if k == n {
            return (0..n).all(|v| g.has_edge(v, perm[v]));
        }
        for i in k..n {
            perm.swap(k, i);
            if go(g, perm, k + 1) {
                return true;
            }
            perm.swap(k, i);
        }
        false
    }
    go(g, &mut (0..g.node_count()).collect(), 0)
}

fn random_graph(rng: &mut ChaCha8Rng) -> StructureGraph {
    let n = rng.gen_range(1..=10);
    let labels = (1..=n).map(|i| i.to_string()).collect();
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|_| rng.gen_bool(0.3))
        .collect();
    StructureGraph::new(labels, edges).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut graphs: Vec<StructureGraph> = FIXTURES.iter().map(|n| fixture(n)).collect();
    graphs.extend((0..500).map(|_| random_graph(&mut rng)));
    let mut brute = 0;
    for (k, g) in graphs.iter().enumerate() {
        let c = cfg(k as u64);
        let r = structural_rank(g);
        let numeric = generic_rank_numeric(&pattern_of(g), &c);
        ensure(r == numeric, || {
            format!("graph {k}: structural {r} numeric {numeric}")
        })?;
        ensure(null_nodes(g) == null_nodes_numeric(g, &c), || {
            format!("graph {k}: null nodes differ")
        })?;
        let has_cover = cycle_cover(g).is_some();
        ensure(has_cover == (r == g.node_count()), || {
            format!("graph {k}: cover vs rank")
        })?;
        if g.node_count() <= 8 {
            brute += 1;
            ensure(permutation_cover_exists(g) == has_cover, || {
                format!("graph {k}: permutation search disagrees")
            })?;
        }
    }
    Ok(format!(
        "{} graphs, ranks and null nodes 100% agree, {brute} covers checked by permutation search",
        graphs.len()
    ))
}

fn layered(profile: &[usize]) -> StructureGraph {
    let mut labels = Vec::new();
    let mut layers: Vec<Vec<usize>> = Vec::new();
    for (l, &size) in profile.iter().enumerate() {
        layers.push(
            (0..size)
                .map(|k| {
                    labels.push(format!("L{}.{}", l + 1, k + 1));
                    labels.len() - 1
                })
                .collect(),
        );
    }
    let mut edges = Vec::new();
    for w in layers.windows(2) {
        for &u in &w[0] {
            for &v in &w[1] {
                edges.push((u, v));
                edges.push((v, u));
            }
        }
    }
    StructureGraph::new(labels, edges).unwrap()
}

fn layered_trophic() -> Outcome {
    let fig5d = deficiency(&fixture("fig5d"));
    let synthetic = deficiency(&layered(&[4, 3, 4, 2]));
    ensure(fig5d == 3 && synthetic == 3, || {
        format!("profile (4,3,4,2): fixture m*={fig5d}, layered m*={synthetic}")
    })?;
    let mut profiles: Vec<Vec<usize>> = vec![vec![]];
    let mut all = Vec::new();
    for _ in 0..4 {
        profiles = profiles
            .iter()
            .flat_map(|p| (1..=4).map(move |s| [p.clone(), vec![s]].concat()))
            .collect();
        all.extend(profiles.clone());
    }
    let mut failures = Vec::new();
    for p in &all {
        let odd: usize = p.iter().step_by(2).sum();
        let even: usize = p.iter().skip(1).step_by(2).sum();
        let m = deficiency(&layered(p));
        if m != odd.abs_diff(even) {
            failures.push(format!("{p:?}: m*={m} vs {}", odd.abs_diff(even)));
        }
    }
    ensure(failures.is_empty(), || {
        format!(
            "{}/{} profiles violate m* = |N_odd - N_even|, e.g. {}",
            failures.len(),
            all.len(),
            failures[0]
        )
    })?;
    Ok(format!(
        "{} profiles satisfy m* = |N_odd - N_even|, (4,3,4,2) gives 3",
        all.len()
    ))
}

fn nonlinear() -> Outcome {
    let mut summary = Vec::new();
    for name in ["fig1", "fig2", "example2"] {
        let g = fixture(name);
        let n = g.node_count();
        let r = structural_rank(&g);
        let mut exact = 0;
        for s in 0..50 {
            let c = cfg(s);
            let f = sample_function(&g, &c);
            for p in 0..10 {
                let rank = numeric_rank(&f.jacobian(&sample_point(n, &c, p)).unwrap(), &c);
                ensure(rank <= r, || {
                    format!("{name} seed {s} point {p}: rank {rank} above {r}")
                })?;
                exact += usize::from(rank == r);
            }
            let dim = manifold_dimension_at(&f, &sample_point(n, &c, 0), &c).unwrap();
            ensure(dim == n - r, || {
                format!("{name} seed {s}: manifold dimension {dim}")
            })?;
        }
        ensure(exact >= 475, || {
            format!("{name}: generic rank in {exact}/500 draws")
        })?;
        summary.push(format!("{name} {exact}/500"));
    }
    let mut anchored = 0;
    for name in FIXTURES {
        let g = fixture(name);
        if structural_rank(&g) != g.node_count() {
            continue;
        }
        for s in 0..50 {
            let c = cfg(s);
            let f = sample_function(&g, &c);
            let report =
                solve_from_anchor(&f, &sample_point(g.node_count(), &c, 0), 0.05, &c).unwrap();
            ensure(report.residual <= 1e-10, || {
                format!("{name} seed {s}: residual {:.3e}", report.residual)
            })?;
            anchored += 1;
        }
    }
    let (mut robust, mut fragile) = (0, 0);
    for s in 0..20 {
        let c = cfg(s);
        let g = fixture("fig2");
        let v =
            probe_robustness(&sample_function(&g, &c), &sample_point(4, &c, 0), 1e-3, &c).unwrap();
        robust += usize::from(v.verdict == ProbeVerdict::RobustObserved);
        let g = fixture("fig1");
        let v =
            probe_robustness(&sample_function(&g, &c), &sample_point(3, &c, 0), 1e-3, &c).unwrap();
        fragile += usize::from(v.verdict == ProbeVerdict::FragileObserved);
    }
    ensure(robust >= 19 && fragile >= 19, || {
        format!("probe: fig2 robust {robust}/20, fig1 fragile {fragile}/20")
    })?;
    Ok(format!(
        "jacobian generic rank {}, never above; {anchored}/{anchored} anchored solves; probe robust {robust}/20, fragile {fragile}/20",
        summary.join(", ")
    ))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_structnet");
    for name in ["fig1", "fig2", "example2", "fig6a"] {
        let path = fixture_path(name);
        for json in [false, true] {
            let run = || {
                let mut cmd = Command::new(bin);
                cmd.arg("verify").arg(&path).args(["--seed", "42"]);
                if json {
                    cmd.arg("--json");
                }
                cmd.output().expect("binary runs")
            };
            let (a, b) = (run(), run());
            ensure(a.status.code() == Some(0), || {
                format!("{name}: verify exit {:?}", a.status.code())
            })?;
            ensure(a.stdout == b.stdout && !a.stdout.is_empty(), || {
                format!("{name}: reports differ")
            })?;
        }
    }
    Ok("verify --seed 42 byte-identical across runs (text and JSON, 4 fixtures)".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("fig1 rank, cover, bottleneck", fig1),
        ("fig2 cover", fig2),
        ("fig3 bottleneck and intraguild fix", fig3),
        ("example2 null nodes and fixes", example2),
        ("fig6a bottleneck range and repair", fig6a),
        ("fig7b forward/backward bottlenecks", fig7b),
        ("oracle equivalence", oracle_equivalence),
        ("layered trophic deficiency", layered_trophic),
        ("nonlinear suite", nonlinear),
        ("determinism", determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or(e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
