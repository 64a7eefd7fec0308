//! Sequential vs rayon throughput on the crate's data-parallel inner loops:
//! fringe scans, parametric-bootstrap resampling, and seed sweeps of the
//! simulate→reconstruct pipeline.
//!
//! Run with `cargo bench -p slitomo-core`. The `parallel` feature must be on
//! (it is by default) so both code paths are available.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use slitomo_core::fringe::coincidence_rate;
use slitomo_core::measurement::{draw_counts, simulate_all_settings, MeasurementModel, NoiseModel};
use slitomo_core::par;
use slitomo_core::presets;
use slitomo_core::states::DensityMatrix;
use slitomo_core::stategen::{arm_states, mix_states};
use slitomo_core::tomography::{
    invert_least_squares, reconstruct, ReconstructionOptions, SettingProbabilities,
};

fn default_state() -> DensityMatrix {
    let geom = presets::geometry();
    let opt = presets::optics();
    let (p1, p2) = arm_states(&geom, &opt).unwrap();
    mix_states(&[0.87, 0.13], &[p1, p2]).unwrap()
}

fn bench_fringe_scan(c: &mut Criterion) {
    let geom = presets::geometry();
    let opt = presets::optics();
    let rho = default_state();
    let b = presets::DETECTOR_HALF_WIDTH;
    let mut group = c.benchmark_group("fringe_scan");
    for points in [512usize, 4096] {
        let step = 14.0e-3 / points as f64;
        let rate_at = |i: usize| {
            coincidence_rate(&rho, &geom, &opt, b, -7.0e-3 + i as f64 * step, 0.0)
        };
        group.bench_with_input(BenchmarkId::new("seq", points), &points, |bench, &n| {
            bench.iter(|| black_box(par::map_indexed_seq(n, rate_at)));
        });
        group.bench_with_input(BenchmarkId::new("par", points), &points, |bench, &n| {
            bench.iter(|| black_box(par::map_indexed_par(n, rate_at)));
        });
    }
    group.finish();
}

fn bench_bootstrap_resamples(c: &mut Criterion) {
    let model = MeasurementModel::preset().unwrap();
    let rho = default_state();
    let records = simulate_all_settings(&rho, &model, 100_000, NoiseModel::Multinomial, 7).unwrap();
    let sp = SettingProbabilities::from_records(&records).unwrap();
    let law: Vec<[f64; 4]> = slitomo_core::measurement::BasisSetting::all_nine()
        .iter()
        .map(|&s| *sp.get(s))
        .collect();

    let resample = |r: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(r as u64);
        let records: Vec<_> = slitomo_core::measurement::BasisSetting::all_nine()
            .iter()
            .zip(&law)
            .map(|(&setting, p)| slitomo_core::measurement::CountsRecord {
                setting,
                counts: draw_counts(&mut rng, p, 100_000, NoiseModel::Multinomial),
                total: 100_000,
                seed: r as u64,
            })
            .collect();
        let resampled = SettingProbabilities::from_records(&records).unwrap();
        black_box(invert_least_squares(&resampled, &model).unwrap())
    };

    let mut group = c.benchmark_group("bootstrap_resamples");
    group.sample_size(10);
    for n in [64usize, 200] {
        group.bench_with_input(BenchmarkId::new("seq", n), &n, |bench, &n| {
            bench.iter(|| black_box(par::map_indexed_seq(n, resample)));
        });
        group.bench_with_input(BenchmarkId::new("par", n), &n, |bench, &n| {
            bench.iter(|| black_box(par::map_indexed_par(n, resample)));
        });
    }
    group.finish();
}

fn bench_seed_sweep(c: &mut Criterion) {
    let model = MeasurementModel::preset().unwrap();
    let rho = default_state();
    let opts = ReconstructionOptions::default();
    let run = |seed: usize| {
        let records =
            simulate_all_settings(&rho, &model, 10_000, NoiseModel::Multinomial, seed as u64)
                .unwrap();
        let result = reconstruct(&records, &model, &opts).unwrap();
        black_box(result.eigenvalues)
    };

    let mut group = c.benchmark_group("simulate_reconstruct_sweep");
    group.sample_size(10);
    for seeds in [16usize, 64] {
        group.bench_with_input(BenchmarkId::new("seq", seeds), &seeds, |bench, &n| {
            bench.iter(|| black_box(par::map_indexed_seq(n, run)));
        });
        group.bench_with_input(BenchmarkId::new("par", seeds), &seeds, |bench, &n| {
            bench.iter(|| black_box(par::map_indexed_par(n, run)));
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_fringe_scan,
    bench_bootstrap_resamples,
    bench_seed_sweep
);
criterion_main!(benches);
