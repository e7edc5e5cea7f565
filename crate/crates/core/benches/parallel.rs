// SPDX-License-Identifier: Apache-2.0

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use noise_radiance::linewidth::fill_widths;
use noise_radiance::mc::{estimate_pfi, AmplitudeSetup, EstimateOptions};
use noise_radiance::noise::NoiseModel;
use noise_radiance::parallel::Execution;
use noise_radiance::rate::{spectrum, Mode, RateRequest};
use noise_radiance::system::{builtin_harmonic_oscillator, two_level_system, CouplingConstants};
use noise_radiance::units::Constants;
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_spectrum(c: &mut Criterion) {
    let mut spec = builtin_harmonic_oscillator(1.0, 1.0, 1.0, 8, Constants::reduced()).unwrap();
    fill_widths(&mut spec).unwrap();
    let coupling = CouplingConstants::new(1.0).unwrap();
    let noise = NoiseModel::exponential(0.5).unwrap();
    let grid: Vec<f64> = (1..=256).map(|j| 0.02 * j as f64).collect();
    let mut group = c.benchmark_group("spectrum");
    group.sample_size(10);
    for mode in [Mode::Regularized, Mode::Naive] {
        for (name, exec) in MODES {
            let mut req = RateRequest::new(spec.clone(), coupling, noise.clone(), grid.clone()).with_mode(mode);
            req.execution = exec;
            group.bench_with_input(BenchmarkId::new(mode.name(), name), &req, |b, req| {
                b.iter(|| black_box(spectrum(req).unwrap()))
            });
        }
    }
    group.finish();
}

fn bench_monte_carlo(c: &mut Criterion) {
    let spec = two_level_system(1.0, 1.0, 1.0, [0.0, 0.25], Constants::reduced()).unwrap();
    let noise = NoiseModel::exponential(1.0).unwrap();
    let mut group = c.benchmark_group("estimate_pfi");
    group.sample_size(10);
    for (name, execution) in MODES {
        let opts = EstimateOptions { dt: 0.02, n_samples: 500, seed: 1, setup: AmplitudeSetup::new(0, true, 1.0), execution };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| black_box(estimate_pfi(&spec, &noise, 1.5, 0, 20.0, opts).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_spectrum, bench_monte_carlo);
criterion_main!(benches);
