//! Sequential against data-parallel execution on the hot loops.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use rooted_grid::extract::{extract_with, BoundPolicy, ExtractionProblem};
use rooted_grid::grid::GridSpec;
use rooted_grid::instance::{generate_instance, InstanceKind, InstanceRecipe};
use rooted_grid::model::identity_grid_model;
use rooted_grid::oracle::{enumerate_separations, enumerate_tangles, EnumerationBudget};
use rooted_grid::par::Execution;
use rooted_grid::separation::{check_tangle_axioms, grid_tangle_members};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn separations(c: &mut Criterion) {
    let spec = GridSpec::new(3).unwrap();
    let (g, m) = identity_grid_model(spec);
    let budget = EnumerationBudget::default();
    let seps = enumerate_separations(&g, 2, &budget, Execution::Sequential).unwrap();
    let t = grid_tangle_members(&m, spec, 3, &seps, Execution::Sequential).unwrap();

    let mut group = c.benchmark_group("g3");
    for (name, exec) in MODES {
        group.bench_with_input(
            BenchmarkId::new("enumerate_separations", name),
            &exec,
            |b, &exec| b.iter(|| enumerate_separations(&g, 2, &budget, exec).unwrap()),
        );
        group.bench_with_input(
            BenchmarkId::new("tangle_axioms", name),
            &exec,
            |b, &exec| b.iter(|| check_tangle_axioms(&t, &g, &seps, exec)),
        );
        group.bench_with_input(
            BenchmarkId::new("enumerate_tangles", name),
            &exec,
            |b, &exec| b.iter(|| enumerate_tangles(&g, 3, &budget, exec).unwrap()),
        );
    }
    group.finish();
}

fn extraction(c: &mut Criterion) {
    let mut recipe = InstanceRecipe::new(InstanceKind::GridPlusRoots, 13, 2, 2, 11);
    recipe.degree = 3;
    let inst = generate_instance(&recipe).unwrap();
    let problem = ExtractionProblem {
        host: inst.host,
        roots: inst.roots,
        spec: inst.spec,
        model: inst.model,
        g: 2,
        k: 2,
        bound: BoundPolicy::Tight,
    };
    let mut group = c.benchmark_group("extract_13");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| extract_with(&problem, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, separations, extraction);
criterion_main!(benches);
