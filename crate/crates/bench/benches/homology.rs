use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dihom::linalg::smith_factors;
use dihom::{
    cayley_ball, is_l_covering, magnitude_table, mpss_page, ph, pi_l_presentation, w_l_relations, FGAbelian, FieldKind,
    GenSet, PointedDigraph, Ring, SparseIntMatrix,
};
use dihom_bench::{cycle, grid, random_digraph};

fn path_homology(c: &mut Criterion) {
    let mut group = c.benchmark_group("ph");
    for (name, x) in [("grid3x3", grid(3, 3)), ("grid3x4", grid(3, 4)), ("random8", random_digraph(7, 8, 0.3))] {
        group.bench_with_input(BenchmarkId::new("q", name), &x, |b, x| b.iter(|| ph(black_box(x), &[Ring::Q], 3)));
        group.bench_with_input(BenchmarkId::new("z", name), &x, |b, x| b.iter(|| ph(black_box(x), &[Ring::Z], 3)));
    }
    group.finish();
}

fn magnitude(c: &mut Criterion) {
    let mut group = c.benchmark_group("magnitude");
    group.sample_size(10);
    for n in [4, 6, 8] {
        let x = cycle(n);
        group.bench_with_input(BenchmarkId::new("table", n), &x, |b, x| b.iter(|| magnitude_table(x, 3, FieldKind::Q)));
    }
    let x = grid(2, 3);
    group.bench_function("mpss_e2_grid2x3", |b| b.iter(|| mpss_page(&x, 2, 3, 2, FieldKind::Q)));
    group.finish();
}

fn fundamental(c: &mut Criterion) {
    let x = Arc::new(grid(4, 4));
    let pointed = PointedDigraph::new(x, 0).unwrap();
    c.bench_function("pi2_grid4x4", |b| b.iter(|| pi_l_presentation(black_box(&pointed), 2)));
}

fn covering(c: &mut Criterion) {
    let (total, base) = (cycle(24), cycle(6));
    let projection: Vec<usize> = (0..24).map(|i| i % 6).collect();
    c.bench_function("cover_check_c24_c6", |b| b.iter(|| is_l_covering(&total, &base, black_box(&projection), 3)));
}

fn cayley(c: &mut Criterion) {
    let z2: FGAbelian = "Z^2".parse().unwrap();
    let gens = GenSet::parse(&z2, "(1,0);(0,1);(1,1)").unwrap();
    c.bench_function("ball_z2_r4", |b| b.iter(|| cayley_ball(&z2, &gens, 4)));
    c.bench_function("relations_z2_l4", |b| b.iter(|| w_l_relations(&z2, &gens, 4)));
}

fn smith_form(c: &mut Criterion) {
    let rows: Vec<Vec<i64>> = (0..30).map(|i| (0..30).map(|j| ((i * 7 + j * 13) % 11) as i64 - 5).collect()).collect();
    let m = SparseIntMatrix::from_dense(&rows);
    c.bench_function("smith_30x30", |b| b.iter(|| smith_factors(black_box(&m))));
}

criterion_group!(benches, path_homology, magnitude, fundamental, covering, cayley, smith_form);
criterion_main!(benches);
