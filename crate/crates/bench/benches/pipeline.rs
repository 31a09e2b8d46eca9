use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use smnc_bench::{scaling_instance, SIZES};
use smnc_core::codes::{brute_force_solve, construct_code, direct_field, expand_solution, verify_solution};
use smnc_core::fixtures;
use smnc_core::instances::{gen_tight_field, realize_network};
use smnc_core::labeling::solvable;
use smnc_core::minimize::minimize;
use smnc_core::pipeline::run;
use smnc_core::region::basic_decomposition;
use smnc_core::{RegionState, SolveOptions};

fn decision(c: &mut Criterion) {
    let mut group = c.benchmark_group("decide");
    group.sample_size(20);
    for links in SIZES {
        let net = scaling_instance(links);
        group.throughput(Throughput::Elements(links as u64));
        group.bench_with_input(BenchmarkId::new("decompose", links), &net, |b, net| {
            b.iter(|| basic_decomposition(net))
        });
        group.bench_with_input(
            BenchmarkId::new("decompose_label_feasibility", links),
            &net,
            |b, net| b.iter(|| solvable(net)),
        );
    }
    group.finish();
}

fn construction(c: &mut Criterion) {
    let net = realize_network(&gen_tight_field(4).unwrap()).unwrap();
    let s = solvable(&net);
    c.bench_function("tight_field_4/construct_expand_verify", |b| {
        b.iter(|| {
            let code = construct_code(&s.labeled, direct_field(&s.labeled)).unwrap();
            let sol = expand_solution(&net, &s.state, &code);
            verify_solution(&net, &sol).unwrap();
        })
    });
    let state = RegionState::basic(&net);
    c.bench_function("tight_field_4/minimize", |b| b.iter(|| minimize(&state).unwrap()));
    c.bench_function("tight_field_4/pipeline_minimize", |b| {
        b.iter(|| {
            run(
                &net,
                SolveOptions {
                    minimize: true,
                    ..Default::default()
                },
            )
            .unwrap()
        })
    });
}

fn oracle(c: &mut Criterion) {
    let butterfly = fixtures::butterfly();
    let bottleneck = fixtures::bottleneck();
    c.bench_function("brute_force/butterfly", |b| {
        b.iter(|| brute_force_solve(&butterfly).unwrap())
    });
    c.bench_function("brute_force/bottleneck", |b| {
        b.iter(|| brute_force_solve(&bottleneck).unwrap())
    });
}

criterion_group!(benches, decision, construction, oracle);
criterion_main!(benches);
