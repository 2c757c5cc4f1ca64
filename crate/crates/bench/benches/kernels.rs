use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gstruct::invconn::{characteristic_connection, solve_equivariant};
use gstruct::numkernel::{nullspace, rank};
use gstruct::repdecomp::{casimir, isotypic_decompose, lambda3_action};
use gstruct::spaces::build;
use gstruct::spingeom::dirac_on_invariants;
use gstruct::{analyze, sp3catalog, AnalysisFlags, MetricParams, SpaceId, ToleranceProfile};
use gstruct_bench::low_rank;

fn linear_algebra(c: &mut Criterion) {
    let tol = ToleranceProfile::default();
    let mut group = c.benchmark_group("numkernel");
    for n in [32, 98, 196] {
        let m = low_rank(n + n / 2, n, n / 3);
        group.bench_with_input(BenchmarkId::new("nullspace", n), &m, |b, m| b.iter(|| nullspace(black_box(m), &tol)));
        group.bench_with_input(BenchmarkId::new("rank", n), &m, |b, m| b.iter(|| rank(black_box(m), &tol)));
    }
    group.finish();
}

fn representations(c: &mut Criterion) {
    let tol = ToleranceProfile::default();
    let rho = sp3catalog::derive_isotropy(&tol).unwrap();
    let lambda3 = lambda3_action(&rho).unwrap();
    let mut group = c.benchmark_group("repdecomp");
    group.sample_size(10);
    group.bench_function("casimir_lambda3", |b| b.iter(|| casimir(black_box(&lambda3))));
    group.bench_function("decompose_lambda3", |b| b.iter(|| isotypic_decompose(black_box(&lambda3), &tol).unwrap()));
    group.finish();
}

fn connections(c: &mut Criterion) {
    let tol = ToleranceProfile::default();
    let mut group = c.benchmark_group("invconn");
    group.sample_size(10);
    for id in SpaceId::ALL {
        let space = build(id, &MetricParams::uniform(id, 1.0, 1.0, 1.0), &tol).unwrap();
        group.bench_function(BenchmarkId::new("equivariant", id.slug()), |b| b.iter(|| solve_equivariant(black_box(&space), &tol)));
        group.bench_function(BenchmarkId::new("characteristic", id.slug()), |b| {
            b.iter(|| characteristic_connection(black_box(&space), &tol).unwrap())
        });
    }
    group.finish();
}

fn spin(c: &mut Criterion) {
    let tol = ToleranceProfile::default();
    let id = SpaceId::M2;
    let space = build(id, &MetricParams::uniform(id, 1.0, 0.8, 1.0), &tol).unwrap();
    let ch = characteristic_connection(&space, &tol).unwrap();
    c.bench_function("spingeom/dirac_m2", |b| b.iter(|| dirac_on_invariants(black_box(&space), &ch, &tol).unwrap()));
}

fn full_report(c: &mut Criterion) {
    let tol = ToleranceProfile::default();
    let flags = AnalysisFlags { holonomy: true, curvature: true, spin: true };
    let mut group = c.benchmark_group("analyze");
    group.sample_size(10);
    for id in [SpaceId::M3, SpaceId::M4] {
        let p = MetricParams::uniform(id, 1.0, 1.2, 0.9);
        group.bench_function(id.slug(), |b| b.iter(|| analyze(id, black_box(&p), flags, &tol).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, linear_algebra, representations, connections, spin, full_report);
criterion_main!(benches);
