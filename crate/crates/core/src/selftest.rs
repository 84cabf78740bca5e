//! Built-in oracle checks run by the `selftest` command.

use crate::channel::{monostatic_echo_matrix, time_domain_reference_synthesis, EchoPath, NoiseSpec, PathParams};
use crate::dsp::{
    build_range_angle_spectrum, equalize_known_data, range_from_bin, slice_beams, Estimator, EstimatorSettings,
    MusicConfig,
};
use crate::par::ExecMode;
use crate::waveform::{build_sensing_frame, OfdmConfig, SensingFrameSpec};
use crate::{Result, C64, SPEED_OF_LIGHT};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn from(name: &str, r: Result<(bool, String)>) -> Self {
        let (passed, detail) = r.unwrap_or_else(|e| (false, e.to_string()));
        CheckResult {
            name: name.into(),
            passed,
            detail,
        }
    }
}

/// 64-subcarrier numerology: 5 MHz sampling, 16-sample prefix.
pub fn desk_config(num_symbols: usize) -> OfdmConfig {
    OfdmConfig {
        num_subcarriers: 64,
        bandwidth_hz: 5e6,
        symbols_per_frame: num_symbols,
        num_tx_elements: 4,
        num_rx_elements: 4,
        ..OfdmConfig::default()
    }
}

/// Worst relative entrywise error between frequency-domain synthesis and
/// the time-domain reference over `trials` random integer-delay scenes.
pub fn synthesis_oracle_error(trials: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let q = [2usize, 4][rng.random_range(0..2)];
        let mq = rng.random_range(1..=2);
        let cfg = desk_config(q * mq + rng.random_range(0..3));
        let sf = SensingFrameSpec {
            num_beams: q,
            symbols_per_subframe: mq,
            zc_root: 25,
        };
        let frame = build_sensing_frame(&cfg, &sf)?;
        let cp = cfg.cp_samples()?;
        let sample_len = SPEED_OF_LIGHT / cfg.sample_rate() / 2.0;
        let echoes: Vec<EchoPath> = (0..rng.random_range(1..=3))
            .map(|_| {
                let d = rng.random_range(1..cp);
                EchoPath {
                    path: PathParams {
                        geometric_length_m: d as f64 * sample_len,
                        angle_rad: rng.random_range(-1.2..1.2),
                        doppler_hz: rng.random_range(-2000.0..2000.0),
                        complex_gain: C64::from_polar(rng.random_range(0.1..1.0), rng.random_range(0.0..2.0 * PI)),
                        blocked_db: 0.0,
                        via_reflector: None,
                    },
                    rcs_m2: rng.random_range(0.5..2.0),
                }
            })
            .collect();
        let fast = monostatic_echo_matrix(&frame, &echoes, &cfg, &frame.beam_schedule, &NoiseSpec::noiseless())?;
        let slow = time_domain_reference_synthesis(&frame, &echoes, &cfg, &frame.beam_schedule)?;
        let scale = slow.grid.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let err = fast
            .matrix
            .iter()
            .zip(slow.grid.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        worst = worst.max(err / scale);
    }
    Ok(worst)
}

/// Argmax range of each estimator for one noiseless boresight echo at `range_m`.
pub fn single_target_ranges(range_m: f64, n_idft: usize) -> Result<Vec<(Estimator, f64)>> {
    let cfg = OfdmConfig {
        num_subcarriers: 256,
        bandwidth_hz: 20e6,
        symbols_per_frame: 8,
        ..OfdmConfig::default()
    };
    let sf = SensingFrameSpec {
        num_beams: 1,
        symbols_per_subframe: 8,
        zc_root: 25,
    };
    let frame = build_sensing_frame(&cfg, &sf)?;
    let echo = EchoPath {
        path: PathParams {
            geometric_length_m: range_m,
            angle_rad: 0.0,
            doppler_hz: 0.0,
            complex_gain: C64::new(1.0, 0.0),
            blocked_db: 0.0,
            via_reflector: None,
        },
        rcs_m2: 1.0,
    };
    let obs = monostatic_echo_matrix(&frame, &[echo], &cfg, &frame.beam_schedule, &NoiseSpec::noiseless())?;
    let slices = slice_beams(&equalize_known_data(&obs, &frame)?, 8, 1)?;
    [Estimator::Periodogram, Estimator::Music, Estimator::Capon]
        .into_iter()
        .map(|estimator| {
            let settings = EstimatorSettings {
                estimator,
                music: MusicConfig::default(),
                n_idft,
                delta_f: cfg.subcarrier_spacing_hz,
                mode: ExecMode::Sequential,
            };
            let s = build_range_angle_spectrum(&slices, &settings)?;
            let (bin, _, _) = s.peak();
            Ok((estimator, s.range(bin)))
        })
        .collect()
}

pub fn run_selftest() -> Vec<CheckResult> {
    let mut out = vec![CheckResult::from(
        "frequency-domain synthesis matches time-domain reference",
        synthesis_oracle_error(20, 7).map(|e| (e <= 1e-6, format!("worst relative error {e:.3e}"))),
    )];
    let n_idft = 2048;
    let bin_range = range_from_bin(37, 78.125e3, n_idft);
    let off_grid = 3.2;
    let on_bin = single_target_ranges(bin_range, n_idft);
    let arbitrary = single_target_ranges(off_grid, n_idft);
    out.push(CheckResult::from(
        "periodogram peaks at the on-bin delay",
        on_bin.map(|r| {
            let got = r[0].1;
            (
                (got - bin_range).abs() < 1e-9,
                format!("peak {got:.4} m, truth {bin_range:.4} m"),
            )
        }),
    ));
    for (k, name) in [(1usize, "music"), (2, "capon")] {
        out.push(CheckResult::from(
            &format!("{name} peaks within one grid step of truth"),
            arbitrary.as_ref().map_err(clone_err).map(|r| {
                let got = r[k].1;
                (
                    (got - off_grid).abs() <= 0.05 + 1e-9,
                    format!("peak {got:.4} m, truth {off_grid:.4} m"),
                )
            }),
        ));
    }
    out
}

fn clone_err(e: &crate::Error) -> crate::Error {
    crate::Error::Precondition(e.to_string())
}
