//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Extraction goes through the `rooted-grid` binary so exit codes
//! and bundle bytes are exercised as a user sees them.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rooted_grid::bundle::{InstanceBundle, ResultBundle};
use rooted_grid::extract::{
    check_hypothesis, extract, replay, trace_from_jsonl, BoundPolicy, ExtractionProblem,
    HypothesisCertificate, ReductionRecord,
};
use rooted_grid::graph::{Graph, Subgraph, VertexId};
use rooted_grid::grid::{grid_graph, GridSpec};
use rooted_grid::instance::{generate_instance, Instance, InstanceKind, InstanceRecipe};
use rooted_grid::model::{
    check_augmentation, identity_grid_model, root_free_report, validate_model, Pseudomodel,
};
use rooted_grid::oracle::{
    enumerate_separations, enumerate_tangles, exhaustive_strict_blocking, min_vertex_cut,
    verify_output_row_property, EnumerationBudget,
};
use rooted_grid::par::Execution;
use rooted_grid::separation::{
    check_tangle_axioms, disjoint_paths, grid_tangle_members, menger, CutResult, Separation,
};

const PER_INSTANCE: Duration = Duration::from_secs(5);
const MENGER_TOTAL: Duration = Duration::from_secs(60);
const TANGLE_TOTAL: Duration = Duration::from_secs(120);
const ROW_PROPERTY_TOTAL: Duration = Duration::from_secs(60);

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

struct Run {
    code: i32,
    elapsed: Duration,
    stdout: String,
}

fn cli(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_rooted-grid"))
        .args(args)
        .env_remove("SEED")
        .output()
        .expect("spawn rooted-grid");
    Run {
        code: out.status.code().unwrap_or(-1),
        elapsed: start.elapsed(),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
    }
}

fn write_instance(dir: &Path, name: &str, recipe: &InstanceRecipe) -> (Instance, String) {
    let inst = generate_instance(recipe).unwrap_or_else(|e| panic!("{recipe:?}: {e}"));
    let path = dir.join(format!("{name}.json"));
    let bundle = InstanceBundle::from_instance(&inst, Some(recipe.clone())).unwrap();
    fs::write(&path, serde_json::to_string_pretty(&bundle).unwrap()).unwrap();
    (inst, path.to_string_lossy().into_owned())
}

fn good_recipes() -> Vec<InstanceRecipe> {
    let mut out = vec![InstanceRecipe::new(InstanceKind::IdentityGrid, 8, 2, 1, 0)];
    for degree in 2..=4 {
        for seed in 0..20 {
            let mut r = InstanceRecipe::new(InstanceKind::GridPlusRoots, 13, 2, 2, seed);
            r.degree = degree;
            out.push(r);
        }
    }
    out
}

fn measure_decreases(trace: &[ReductionRecord]) -> bool {
    let shrinking: Vec<&ReductionRecord> = trace
        .iter()
        .filter(|r| r.reduction.is_shrinking())
        .collect();
    shrinking.iter().all(|r| r.measure_after < r.measure_before)
        && shrinking
            .windows(2)
            .all(|w| w[1].measure_before <= w[0].measure_after)
}

fn criterion_1(dir: &Path, traces: &mut Vec<Vec<ReductionRecord>>) -> Verdict {
    let recipes = good_recipes();
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    for (i, r) in recipes.iter().enumerate() {
        let (inst, path) = write_instance(dir, &format!("good-{i}"), r);
        let out = dir.join(format!("good-{i}.result.json"));
        let run = cli(&[
            "extract",
            "--instance",
            &path,
            "--g",
            &r.g.to_string(),
            "--k",
            &r.k.to_string(),
            "--out",
            out.to_str().unwrap(),
        ]);
        slowest = slowest.max(run.elapsed);
        if run.code != 0 {
            failures.push(format!(
                "{:?} seed {} degree {}: exit {}",
                r.kind, r.seed, r.degree, run.code
            ));
            continue;
        }
        let bundle: ResultBundle =
            serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        let w = bundle.witness().unwrap();
        let mut report = validate_model(&w.augmented, &inst.host);
        report.extend(check_augmentation(&w, &inst.host));
        report.extend(root_free_report(&w.base, &inst.roots));
        if !report.is_valid() {
            failures.push(format!("seed {} degree {}: {report}", r.seed, r.degree));
        }
        if run.elapsed > PER_INSTANCE {
            failures.push(format!(
                "seed {} degree {}: {:?}",
                r.seed, r.degree, run.elapsed
            ));
        }
        traces.push(bundle.trace);
    }
    Verdict::new(
        failures.is_empty(),
        format!(
            "{}/{} instances certified, slowest {:.2} s{}",
            recipes.len() - failures.len(),
            recipes.len(),
            slowest.as_secs_f64(),
            failures
                .first()
                .map(|f| format!("; first failure: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn broken_recipes() -> Vec<InstanceRecipe> {
    let mut out = Vec::new();
    for seed in 0..10 {
        out.push(InstanceRecipe::new(
            InstanceKind::DetachedRoots,
            8,
            2,
            1,
            seed,
        ));
    }
    for seed in 0..15 {
        out.push(InstanceRecipe::new(
            InstanceKind::DetachedRoots,
            13,
            2,
            2,
            seed,
        ));
    }
    for seed in 0..25 {
        let mut r = InstanceRecipe::new(InstanceKind::BottleneckRoots, 13, 2, 2, seed);
        r.degree = 2 + (seed % 3) as u32;
        out.push(r);
    }
    out
}

fn criterion_2(dir: &Path) -> Verdict {
    let recipes = broken_recipes();
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    for (i, r) in recipes.iter().enumerate() {
        let (inst, path) = write_instance(dir, &format!("broken-{i}"), r);
        let run = cli(&[
            "extract",
            "--instance",
            &path,
            "--g",
            &r.g.to_string(),
            "--k",
            &r.k.to_string(),
        ]);
        slowest = slowest.max(run.elapsed);
        let label = format!("{:?} n={} seed {}", r.kind, r.n, r.seed);
        if run.code != 2 {
            failures.push(format!("{label}: exit {}", run.code));
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
        let row = value["certificate"]["row"].as_u64().unwrap() as u32;
        let sep: Separation =
            serde_json::from_value(value["certificate"]["separation"].clone()).unwrap();
        let image = inst
            .model
            .image_of_vertices(&inst.spec.row(row).unwrap())
            .unwrap();
        let row_is_full = inst
            .spec
            .row(row)
            .unwrap()
            .iter()
            .all(|v| inst.model.pattern.has_vertex(*v));
        let ok = sep.check(&inst.host).is_ok()
            && sep.order() < r.k as usize
            && inst.roots.is_subset(&sep.a.vertices)
            && row_is_full
            && image.is_subset(&sep.b.vertices)
            && run.elapsed <= PER_INSTANCE;
        if !ok {
            failures.push(format!("{label}: certificate rejected"));
        }
    }
    Verdict::new(
        failures.is_empty(),
        format!(
            "{}/{} certificates valid, slowest {:.2} s{}",
            recipes.len() - failures.len(),
            recipes.len(),
            slowest.as_secs_f64(),
            failures
                .first()
                .map(|f| format!("; first failure: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn random_graph(rng: &mut ChaCha8Rng) -> Graph {
    let nv = rng.gen_range(2..=12u32);
    let mut g = Graph::new();
    for v in 1..=nv {
        g.add_vertex(v);
    }
    let p = rng.gen_range(0.15..0.55);
    let mut id = 0;
    for u in 1..=nv {
        for v in u..=nv {
            let chance = if u == v { 0.05 } else { p };
            if rng.gen_bool(chance) {
                g.add_edge(id, u, v).unwrap();
                id += 1;
                if rng.gen_bool(0.1) {
                    g.add_edge(id, u, v).unwrap();
                    id += 1;
                }
            }
        }
    }
    g
}

fn random_subset(rng: &mut ChaCha8Rng, pool: &[VertexId], max: usize) -> BTreeSet<VertexId> {
    let size = rng.gen_range(1..=max.min(pool.len()));
    pool.choose_multiple(rng, size).copied().collect()
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let budget = EnumerationBudget {
        max_vertices: 12,
        max_order: 12,
        max_steps: 50_000_000,
        ..EnumerationBudget::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x3e17);
    let mut failures = Vec::new();
    let (mut cuts_checked, mut path_answers) = (0, 0);
    for case in 0..100 {
        let g = random_graph(&mut rng);
        let pool: Vec<VertexId> = g.vertices().iter().copied().collect();
        let sources = random_subset(&mut rng, &pool, 3);
        let targets = random_subset(&mut rng, &pool, 3);
        let oracle = min_vertex_cut(&g, &sources, &targets, &budget).unwrap();
        let flow = disjoint_paths(&g, &sources, &targets, usize::MAX);
        if flow.paths.len() != oracle {
            failures.push(format!(
                "case {case}: {} paths, oracle cut {oracle}",
                flow.paths.len()
            ));
            continue;
        }
        let k = rng.gen_range(1..=4);
        match menger(&g, &sources, &targets, k, &BTreeSet::new()).unwrap() {
            CutResult::Paths(paths) => {
                path_answers += 1;
                if paths.len() != k || oracle < k {
                    failures.push(format!(
                        "case {case}: {} paths for k={k}, oracle cut {oracle}",
                        paths.len()
                    ));
                }
            }
            CutResult::Cut {
                separator,
                separation,
            } => {
                cuts_checked += 1;
                if separator.len() != oracle || oracle >= k {
                    failures.push(format!(
                        "case {case}: cut {} for k={k}, oracle {oracle}",
                        separator.len()
                    ));
                    continue;
                }
                let all = enumerate_separations(&g, separator.len(), &budget, Execution::default())
                    .unwrap();
                if all.binary_search(&separation).is_err() && !all.contains(&separation) {
                    failures.push(format!("case {case}: cut separation not enumerated"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > MENGER_TOTAL {
        failures.push(format!("took {:.1} s", elapsed.as_secs_f64()));
    }
    Verdict::new(
        failures.is_empty(),
        format!(
            "100 graphs, {path_answers} path answers, {cuts_checked} cuts matched to enumerated separations, {:.2} s{}",
            elapsed.as_secs_f64(),
            failures.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
        ),
    )
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let spec = GridSpec::new(3).unwrap();
    let (g, m) = identity_grid_model(spec);
    let budget = EnumerationBudget::default();
    let exec = Execution::default();
    let seps = enumerate_separations(&g, 2, &budget, exec).unwrap();
    let t = grid_tangle_members(&m, spec, 3, &seps, exec).unwrap();
    let report = check_tangle_axioms(&t, &g, &seps, exec);
    let tangles = enumerate_tangles(&g, 3, &budget, exec).unwrap();
    let agrees = tangles.contains(&t);
    let elapsed = start.elapsed();
    Verdict::new(
        report.is_valid() && agrees && elapsed <= TANGLE_TOTAL,
        format!(
            "{} separations, {} members, {} violations, grid tangle among {} enumerated tangles: {agrees}, {:.2} s",
            seps.len(),
            t.members.len(),
            report.violations.len(),
            tangles.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let spec = GridSpec::new(5).unwrap();
    let (host, model) = identity_grid_model(spec);
    let problem = ExtractionProblem {
        host: host.clone(),
        roots: BTreeSet::from([spec.vertex(1, 1)]),
        spec,
        model: model.clone(),
        g: 2,
        k: 1,
        bound: BoundPolicy::Tight,
    };
    let result = match extract(&problem) {
        Ok(r) => r,
        Err(e) => return Verdict::new(false, format!("extraction failed: {e}")),
    };
    let budget = EnumerationBudget {
        max_vertices: 25,
        ..EnumerationBudget::default()
    };
    let exec = Execution::default();
    let seps = enumerate_separations(&host, 1, &budget, exec).unwrap();
    let report = verify_output_row_property(&result, &model, spec, &seps, exec);
    let elapsed = start.elapsed();
    Verdict::new(
        report.is_valid() && elapsed <= ROW_PROPERTY_TOTAL,
        format!(
            "{} separations of order < 2, {} violations, {:.2} s",
            seps.len(),
            report.violations.len(),
            elapsed.as_secs_f64()
        ),
    )
}

/// A random host with at most 8 vertices carrying a pseudomodel of a
/// pattern inside `G_2` or `G_3` that has at least one full row.
fn small_instance(
    rng: &mut ChaCha8Rng,
) -> (Graph, BTreeSet<VertexId>, GridSpec, Pseudomodel, usize) {
    let n = if rng.gen_bool(0.5) { 2 } else { 3 };
    let spec = GridSpec::new(n).unwrap();
    let grid = grid_graph(spec);
    let mut pattern_vertices: BTreeSet<VertexId> = spec.row(1).unwrap().into_iter().collect();
    if n == 2 {
        pattern_vertices.extend(spec.row(2).unwrap());
    } else {
        for v in spec.row(2).unwrap() {
            if rng.gen_bool(0.5) {
                pattern_vertices.insert(v);
            }
        }
    }
    let pattern = grid
        .restricted_to(&grid.induced(&pattern_vertices))
        .unwrap();
    let mut host = Graph::new();
    let mut next_v = 1;
    let mut next_e = 0;
    let mut branches = BTreeMap::new();
    let mut reps = BTreeMap::new();
    for &p in &pattern_vertices {
        let a = next_v;
        next_v += 1;
        host.add_vertex(a);
        let mut branch = Subgraph::from_vertices([a]);
        let room = 8 - (pattern_vertices.len() as u32 + (next_v - 1 - reps.len() as u32));
        if room > 0 && rng.gen_bool(0.25) {
            let b = next_v;
            next_v += 1;
            host.add_vertex(b);
            if rng.gen_bool(0.8) {
                host.add_edge(next_e, a, b).unwrap();
                branch.edges.insert(next_e);
                next_e += 1;
            }
            branch.vertices.insert(b);
        }
        reps.insert(p, branch.vertices.iter().copied().collect::<Vec<_>>());
        branches.insert(p, branch);
    }
    let mut edge_images = BTreeMap::new();
    for (e, u, v) in pattern.edges() {
        let a = *reps[&u].choose(rng).unwrap();
        let b = *reps[&v].choose(rng).unwrap();
        host.add_edge(next_e, a, b).unwrap();
        edge_images.insert(e, next_e);
        next_e += 1;
    }
    while next_v <= 8 && rng.gen_bool(0.6) {
        host.add_vertex(next_v);
        next_v += 1;
    }
    let all: Vec<VertexId> = host.vertices().iter().copied().collect();
    for _ in 0..rng.gen_range(0..6) {
        let u = *all.choose(rng).unwrap();
        let v = *all.choose(rng).unwrap();
        host.add_edge(next_e, u, v).unwrap();
        next_e += 1;
    }
    let k = rng.gen_range(1..=2usize);
    let roots = all.choose_multiple(rng, k).copied().collect();
    let model = Pseudomodel {
        pattern,
        branches,
        edge_images,
    };
    (host, roots, spec, model, k)
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a);
    let budget = EnumerationBudget::default();
    let exec = Execution::default();
    let (mut total, mut agree, mut violated) = (0, 0, 0);
    let mut failures = Vec::new();
    for case in 0..60 {
        let (host, roots, spec, model, k) = small_instance(&mut rng);
        assert!(host.vertex_count() <= 8);
        total += 1;
        let fast = check_hypothesis(&host, &roots, &model, spec, k, exec).unwrap();
        let slow =
            exhaustive_strict_blocking(&host, &roots, &model, spec, k, &budget, exec).unwrap();
        let same = match (&fast, &slow) {
            (HypothesisCertificate::Holds, None) => true,
            (HypothesisCertificate::Violated { certificate }, Some(_)) => {
                violated += 1;
                let s = &certificate.separation;
                let image = model
                    .image_of_vertices(&spec.row(certificate.row).unwrap())
                    .unwrap();
                s.check(&host).is_ok()
                    && s.order() < k
                    && roots.is_subset(&s.a.vertices)
                    && image.is_subset(&s.b.vertices)
            }
            _ => false,
        };
        if same {
            agree += 1;
        } else {
            failures.push(format!("case {case}: fast {fast:?}, exhaustive {slow:?}"));
        }
    }
    Verdict::new(
        agree == total && total >= 30 && violated > 0 && violated < total,
        format!(
            "{agree}/{total} agree ({violated} violated, {} hold){}",
            total - violated,
            failures
                .first()
                .map(|f| format!("; first failure: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn criterion_7(dir: &Path) -> Verdict {
    let mut failures = Vec::new();
    let recipes: Vec<InstanceRecipe> = good_recipes().into_iter().step_by(7).collect();
    for (i, r) in recipes.iter().enumerate() {
        let kind = serde_json::to_value(r.kind).unwrap();
        let gen = |name: &str| {
            let path = dir.join(name);
            let run = cli(&[
                "gen-instance",
                "--kind",
                kind.as_str().unwrap(),
                "--n",
                &r.n.to_string(),
                "--g",
                &r.g.to_string(),
                "--k",
                &r.k.to_string(),
                "--seed",
                &r.seed.to_string(),
                "--degree",
                &r.degree.to_string(),
                "--out",
                path.to_str().unwrap(),
            ]);
            assert_eq!(run.code, 0);
            (
                fs::read(&path).unwrap(),
                path.to_string_lossy().into_owned(),
            )
        };
        let (inst_a, path_a) = gen(&format!("det-{i}-a.json"));
        let (inst_b, _) = gen(&format!("det-{i}-b.json"));
        let mut outputs = Vec::new();
        for (run_id, extra) in [("p", None), ("s", Some("--sequential"))] {
            let out = dir.join(format!("det-{i}-{run_id}.result.json"));
            let mut args = vec!["extract", "--instance", &path_a, "--g", "2", "--k"];
            let k = r.k.to_string();
            args.push(&k);
            args.extend(["--out", out.to_str().unwrap()]);
            args.extend(extra);
            let run = cli(&args);
            let trace_path = format!("{}.trace.jsonl", out.display());
            outputs.push((
                run.code,
                fs::read(&out).unwrap_or_default(),
                fs::read(&trace_path).unwrap_or_default(),
            ));
        }
        if inst_a != inst_b || outputs[0] != outputs[1] || outputs[0].0 != 0 {
            failures.push(format!(
                "seed {} degree {}: outputs differ",
                r.seed, r.degree
            ));
            continue;
        }
        let bundle: ResultBundle = serde_json::from_slice(&outputs[0].1).unwrap();
        let trace = trace_from_jsonl(std::str::from_utf8(&outputs[0].2).unwrap()).unwrap();
        let problem = serde_json::from_slice::<InstanceBundle>(&inst_a)
            .unwrap()
            .to_problem(r.g, r.k, BoundPolicy::Tight)
            .unwrap();
        match replay(&problem, &trace) {
            Ok(result) if ResultBundle::from_result(&result).unwrap() == bundle => {}
            Ok(_) => failures.push(format!("seed {}: replay differs", r.seed)),
            Err(e) => failures.push(format!("seed {}: replay failed: {e}", r.seed)),
        }
    }
    Verdict::new(
        failures.is_empty(),
        format!(
            "{} recipes generated twice, extracted in both modes, replayed{}",
            recipes.len(),
            failures
                .first()
                .map(|f| format!("; first failure: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn criterion_8(traces: &[Vec<ReductionRecord>]) -> Verdict {
    let records: usize = traces
        .iter()
        .map(|t| t.iter().filter(|r| r.reduction.is_shrinking()).count())
        .sum();
    let bad = traces.iter().filter(|t| !measure_decreases(t)).count();
    Verdict::new(
        bad == 0 && records > 0,
        format!(
            "{} traces, {records} reduction records, {bad} traces with a non-decreasing step",
            traces.len()
        ),
    )
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut traces = Vec::new();
    let verdicts = [
        (
            "end-to-end extraction",
            criterion_1(dir.path(), &mut traces),
        ),
        ("blocking certificates", criterion_2(dir.path())),
        ("menger duality", criterion_3()),
        ("grid tangle axioms on G_3", criterion_4()),
        ("output row property on 5x5", criterion_5()),
        ("hypothesis check vs exhaustive search", criterion_6()),
        ("determinism and replay", criterion_7(dir.path())),
        ("induction measure", criterion_8(&traces)),
    ];
    let mut all = true;
    for (i, (name, v)) in verdicts.iter().enumerate() {
        all &= v.pass;
        println!(
            "criterion {} [{}] {name}: {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
