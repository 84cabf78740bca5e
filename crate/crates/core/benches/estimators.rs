//! Sequential against data-parallel range-angle spectrum estimation on
//! echo slices of the room scene.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use isac_ckm::dsp::{build_range_angle_spectrum_subset, Estimator};
use isac_ckm::par::ExecMode;
use isac_ckm::scenario::{EchoSimulator, ScenarioConfig};

fn spectra(c: &mut Criterion) {
    let cfg = ScenarioConfig::room();
    let slices = EchoSimulator::new(&cfg)
        .expect("preset frame")
        .beam_slices(&[], 0)
        .expect("preset synthesis");
    // Beams around the three echoes, as screening would select.
    let beams: Vec<usize> = (12..20).collect();
    let mut group = c.benchmark_group("range_angle_spectrum");
    group.sample_size(10);
    for est in [Estimator::Periodogram, Estimator::Music, Estimator::Capon] {
        for mode in [ExecMode::Sequential, ExecMode::Parallel] {
            let mut settings = cfg.estimator_settings(est);
            settings.mode = mode;
            let label = if mode == ExecMode::Sequential {
                "sequential"
            } else {
                "parallel"
            };
            group.bench_with_input(BenchmarkId::new(est.name(), label), &settings, |b, s| {
                b.iter(|| build_range_angle_spectrum_subset(&slices, s, &beams).expect("spectrum"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, spectra);
criterion_main!(benches);
