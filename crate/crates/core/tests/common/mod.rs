//! Independent geometry oracles and fixtures shared by integration targets.
#![allow(dead_code)]

use isac_ckm::channel::EchoPath;
use isac_ckm::channel::PathParams;
use isac_ckm::geom::Vec2;
use isac_ckm::scenario::{parse_config, ScenarioConfig};
use isac_ckm::waveform::{build_sensing_frame, OfdmConfig, SensingFrameSpec};
use isac_ckm::{C64, SPEED_OF_LIGHT};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub const ROOM_JSON: &str = include_str!("../../../../configs/room.json");

pub fn room() -> ScenarioConfig {
    parse_config(ROOM_JSON, &[]).expect("shipped preset is valid")
}

pub fn with(cfg: &ScenarioConfig, overrides: &[(&str, &str)]) -> ScenarioConfig {
    let o: Vec<(String, String)> = overrides.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    parse_config(&serde_json::to_string(cfg).unwrap(), &o).expect("valid overrides")
}

/// Closed-segment intersection by orientation tests.
pub fn segments_touch(p0: Vec2, p1: Vec2, q0: Vec2, q1: Vec2) -> bool {
    let orient = |a: Vec2, b: Vec2, c: Vec2| (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    let on = |a: Vec2, b: Vec2, c: Vec2| {
        c.x >= a.x.min(b.x) - 1e-12
            && c.x <= a.x.max(b.x) + 1e-12
            && c.y >= a.y.min(b.y) - 1e-12
            && c.y <= a.y.max(b.y) + 1e-12
    };
    let (d1, d2) = (orient(q0, q1, p0), orient(q0, q1, p1));
    let (d3, d4) = (orient(p0, p1, q0), orient(p0, p1, q1));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on(q0, q1, p0))
        || (d2 == 0.0 && on(q0, q1, p1))
        || (d3 == 0.0 && on(p0, p1, q0))
        || (d4 == 0.0 && on(p0, p1, q1))
}

pub fn blocked(cfg: &ScenarioConfig, a: Vec2, b: Vec2) -> bool {
    cfg.scene.obstacles.iter().any(|o| segments_touch(a, b, o.a, o.b))
}

/// Azimuth from boresight toward +x for the +y-facing array.
pub fn azimuth(cfg: &ScenarioConfig, p: Vec2) -> f64 {
    let bs = cfg.scene.bs_position;
    (p.x - bs.x).atan2(p.y - bs.y)
}

/// Codebook beam whose main lobe is nearest `theta`, in cyclic spatial frequency.
pub fn pointing_beam(theta: f64, q: usize, d_over_lambda: f64) -> usize {
    let u = 2.0 * d_over_lambda * theta.sin();
    (0..q)
        .min_by(|&a, &b| {
            let err = |k: usize| {
                let e = (u - 2.0 * k as f64 / q as f64).rem_euclid(2.0);
                e.min(2.0 - e)
            };
            err(a).total_cmp(&err(b)).then(a.cmp(&b))
        })
        .unwrap()
}

/// Codebook beam whose half-wavelength angle label is nearest `theta`.
pub fn label_beam(theta: f64, q: usize) -> usize {
    let label = |k: usize| {
        let u = 2.0 * k as f64 / q as f64;
        (if u >= 1.0 { u - 2.0 } else { u }).asin()
    };
    (0..q)
        .min_by(|&a, &b| {
            (label(a) - theta)
                .abs()
                .total_cmp(&(label(b) - theta).abs())
                .then(a.cmp(&b))
        })
        .unwrap()
}

pub fn cyclic_distance(a: usize, b: usize, q: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(q - d)
}

pub fn d_over_lambda(cfg: &ScenarioConfig) -> f64 {
    cfg.waveform.antenna_spacing_m / (SPEED_OF_LIGHT / cfg.waveform.carrier_frequency_hz)
}

/// Bounce point of the single-reflection path BS → reflector → `p`, if the
/// reflector segment and both legs allow it.
pub fn reflector_bounce(cfg: &ScenarioConfig, p: Vec2) -> Option<Vec2> {
    let bs = cfg.scene.bs_position;
    cfg.scene.reflectors.iter().find_map(|r| {
        let sign = if r.angle_sense == isac_ckm::channel::RotationSense::Cw {
            -1.0
        } else {
            1.0
        };
        let a = (sign * r.angle_deg).to_radians();
        let dir = Vec2::new(a.cos(), a.sin());
        let n = Vec2::new(-dir.y, dir.x);
        let side = |z: Vec2| (z - r.center).dot(n);
        if side(bs) * side(p) <= 0.0 {
            return None;
        }
        let image = p - n * (2.0 * side(p));
        // Intersection of BS→image with the reflector line.
        let t = side(bs) / (side(bs) - side(image));
        let b = bs + (image - bs) * t;
        let along = (b - r.center).dot(dir);
        if along.abs() > r.width_m / 2.0 || !(0.0..=1.0).contains(&t) {
            return None;
        }
        (!blocked(cfg, bs, b) && !blocked(cfg, b, p)).then_some(b)
    })
}

pub fn cell_has_obstacle(cfg: &ScenarioConfig, c: Vec2, size: f64) -> bool {
    let h = size / 2.0;
    let corners = [
        Vec2::new(c.x - h, c.y - h),
        Vec2::new(c.x + h, c.y - h),
        Vec2::new(c.x + h, c.y + h),
        Vec2::new(c.x - h, c.y + h),
    ];
    let inside = |p: Vec2| (p.x - c.x).abs() <= h && (p.y - c.y).abs() <= h;
    cfg.scene.obstacles.iter().any(|o| {
        inside(o.a) || inside(o.b) || (0..4).any(|k| segments_touch(o.a, o.b, corners[k], corners[(k + 1) % 4]))
    })
}

/// Random small-numerology frame and integer-sample-delay echoes for the
/// synthesis oracle.
pub fn random_oracle_case(rng: &mut ChaCha8Rng) -> (OfdmConfig, isac_ckm::waveform::FrameSpec, Vec<EchoPath>) {
    let q = [1usize, 2, 4, 8][rng.random_range(0..4)];
    let mq = rng.random_range(1..=3);
    let elements = [1usize, 2, 4, 8][rng.random_range(0..4)];
    let cfg = OfdmConfig {
        num_subcarriers: 64,
        bandwidth_hz: 5e6,
        symbols_per_frame: q * mq + rng.random_range(0..3),
        num_tx_elements: elements,
        num_rx_elements: [1usize, 2, 4][rng.random_range(0..3)],
        ..OfdmConfig::default()
    };
    let sf = SensingFrameSpec {
        num_beams: q,
        symbols_per_subframe: mq,
        zc_root: [1u64, 25, 29, 34][rng.random_range(0..4)],
    };
    let frame = build_sensing_frame(&cfg, &sf).expect("valid desk frame");
    let cp = (cfg.cp_duration_s * cfg.sample_rate()).round() as usize;
    // One sample of round-trip delay, as one-way path length.
    let sample_m = SPEED_OF_LIGHT / cfg.sample_rate() / 2.0;
    let echoes = (0..rng.random_range(1..=3))
        .map(|_| EchoPath {
            path: PathParams {
                geometric_length_m: rng.random_range(1..cp) as f64 * sample_m,
                angle_rad: rng.random_range(-1.4..1.4),
                doppler_hz: rng.random_range(-3000.0..3000.0),
                complex_gain: C64::from_polar(rng.random_range(0.05..1.0), rng.random_range(0.0..2.0 * PI)),
                blocked_db: 0.0,
                via_reflector: None,
            },
            rcs_m2: rng.random_range(0.1..3.0),
        })
        .collect();
    (cfg, frame, echoes)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Local maxima of `v` as indices, strongest first.
pub fn local_maxima(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len())
        .filter(|&i| {
            let left = i == 0 || v[i] > v[i - 1];
            let right = i + 1 == v.len() || v[i] >= v[i + 1];
            left && right && v[i] > 0.0
        })
        .collect();
    idx.sort_by(|&a, &b| v[b].total_cmp(&v[a]));
    idx
}

/// Room scene at desk numerology (64 subcarriers, 8 beams) so end-to-end
/// runs finish in well under a second.
pub fn desk() -> ScenarioConfig {
    with(
        &room(),
        &[
            ("waveform.num_subcarriers", "64"),
            ("waveform.bandwidth_hz", "5e6"),
            ("waveform.symbols_per_frame", "16"),
            ("frame.num_beams", "8"),
            ("frame.symbols_per_subframe", "2"),
            ("music.delay_grid.stop_m", "20"),
        ],
    )
}

/// Distance, in beam spacings, from `theta` to the nearest decision boundary
/// between adjacent codebook beams.
pub fn pointing_margin(theta: f64, q: usize, d_over_lambda: f64) -> f64 {
    let pos = d_over_lambda * theta.sin() * q as f64;
    (pos - pos.floor() - 0.5).abs()
}
