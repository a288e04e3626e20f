use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use inls_bench::{benchmark_system, gaussian_pair, grid};
use inls_core::evolution::Stepper;
use inls_core::groundstate::{self, GroundStateOptions};
use inls_core::Grid;

const SIZES: [usize; 3] = [1024, 2048, 4096];

fn laplacian(c: &mut Criterion) {
    let mut group = c.benchmark_group("radial_laplacian");
    for n in SIZES {
        let g = grid(n);
        let u = gaussian_pair(&g);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| g.laplacian(black_box(u.component(0))).unwrap())
        });
    }
    group.finish();
}

/// One fixed-point sweep, timed as a solve capped at a single iteration.
fn petviashvili_iteration(c: &mut Criterion) {
    let spec = benchmark_system();
    let opts = GroundStateOptions { max_iterations: 1, ..Default::default() };
    let mut group = c.benchmark_group("petviashvili_iteration");
    for n in SIZES {
        let g = grid(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| groundstate::solve(&spec, 1.0, black_box(&g), &opts).err())
        });
    }
    group.finish();
}

fn strang_step(c: &mut Criterion) {
    let spec = benchmark_system();
    let dt = 1e-4;
    let mut group = c.benchmark_group("strang_step");
    for n in SIZES {
        let g = grid(n);
        let stepper = Stepper::new(&spec, &Grid::from(g.clone()), dt, 1).unwrap();
        let mut u = gaussian_pair(&g);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| stepper.step(black_box(&mut u), dt))
        });
    }
    group.finish();
}

criterion_group!(benches, laplacian, petviashvili_iteration, strang_step);
criterion_main!(benches);
