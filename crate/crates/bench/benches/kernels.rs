use std::hint::black_box;

use adiabat::large_spin::{LargeSpinParams, SpinBranches};
use adiabat::localization::{total_decoherence_factor, FactorMode, SpectralModel};
use adiabat::oracle::dense::tensor_product_factor;
use adiabat::oracle::grid::{sg_potential, Grid1D, GridPropagator, SgGridRun};
use adiabat::specfun::{wigner_small_d_matrix, HalfInteger};
use adiabat::stern_gerlach::SGParams;
use adiabat::Complex64;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn wigner(c: &mut Criterion) {
    let mut group = c.benchmark_group("wigner_small_d_matrix");
    for j in [10u32, 100] {
        group.bench_with_input(BenchmarkId::from_parameter(j), &j, |b, &j| {
            b.iter(|| wigner_small_d_matrix(HalfInteger::from_integer(j), black_box(0.7)))
        });
    }
    group.finish();
}

fn large_spin_overlap(c: &mut Criterion) {
    let mut group = c.benchmark_group("large_spin_overlap");
    for j in [20u32, 200] {
        let params = LargeSpinParams::new(HalfInteger::from_integer(j), 0.5, 1.0, 1.0).unwrap();
        let branches = SpinBranches::new(params).unwrap();
        group
            .bench_with_input(BenchmarkId::from_parameter(j), &branches, |b, br| b.iter(|| br.overlap(black_box(3.1))));
    }
    group.finish();
}

fn grid_step(c: &mut Criterion) {
    let params = SGParams::with_force(1.0, 1.0, 0.5, 0.0, std::f64::consts::FRAC_PI_2).unwrap();
    let mut group = c.benchmark_group("grid_step");
    for n in [1024usize, 4096] {
        let grid = Grid1D::centered(32.0, n).unwrap();
        let potential = sg_potential(&params);
        let mut prop = GridPropagator::new(grid, params.mass, 0.01, &potential).unwrap();
        let h = Complex64::new(0.5f64.sqrt(), 0.0);
        let mut field = SgGridRun::branch_superposition(&grid, &params, h, h);
        group.bench_function(BenchmarkId::from_parameter(n), |b| b.iter(|| prop.step(&mut field)));
    }
    group.finish();
}

fn tensor_product(c: &mut Criterion) {
    let model = SpectralModel::new(0.3, 0.0, 20.0).unwrap();
    let mut group = c.benchmark_group("localization_factor");
    let params = model.discretize(8).unwrap();
    group.bench_function("dense_n8", |b| b.iter(|| tensor_product_factor(&params, 0.7, -0.4, black_box(1.2)).unwrap()));
    let wide = model.discretize(2000).unwrap();
    group.bench_function("factorized_n2000", |b| {
        b.iter(|| total_decoherence_factor(&wide, 0.7, -0.4, black_box(1.2), FactorMode::Exact))
    });
    group.finish();
}

criterion_group!(benches, wigner, large_spin_overlap, grid_step, tensor_product);
criterion_main!(benches);
