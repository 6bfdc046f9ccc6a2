use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use gravidec::kernels::{evaluate_grid, grid_points, KernelKind, KernelParams};
use gravidec::matter::{coordinate_wavefunctional_exponent, FieldGrid, GaussianBall};
use gravidec::parallel::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn kernel_grid(c: &mut Criterion) {
    let params = KernelParams::natural(4.0, 1.0, 1e-3).unwrap();
    let rs: Vec<f64> = (1..=16).map(|i| 0.25 * i as f64).collect();
    let ts: Vec<f64> = (0..32).map(|i| -4.0 + 0.25 * i as f64).collect();
    let points = grid_points(&rs, &ts);
    let mut group = c.benchmark_group("noise_kernel_grid_512");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| evaluate_grid(KernelKind::Noise, black_box(&points), &params, exec).unwrap())
        });
    }
    group.finish();
}

fn wavefunctional(c: &mut Criterion) {
    let ball = GaussianBall::new(1.0, [0.0; 3], 1.0, 200.0).unwrap();
    let config =
        FieldGrid::ball_profile(&ball.with_phi0(0.9).unwrap(), Execution::Parallel).unwrap();
    let mut group = c.benchmark_group("wavefunctional_exponent");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| coordinate_wavefunctional_exponent(&ball, black_box(&config), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, kernel_grid, wavefunctional);
criterion_main!(benches);
