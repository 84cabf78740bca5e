mod common;

use common::*;
use isac_ckm::channel::{add_awgn, echo_gain, trace_rays, PathParams};
use isac_ckm::ckm::{ckm_from_json, ckm_load, ckm_save, ckm_to_json, top_beams, CkmGrid};
use isac_ckm::dsp::{
    capon_spectrum, mssp_fbcm_covariance, music_spectrum, periodogram_range, subtract_clutter, DelayGrid, Estimator,
    MusicConfig, RangeAngleSpectrum, RangeAxis,
};
use isac_ckm::geom::Vec2;
use isac_ckm::scenario::{sample_trajectory, TrajectoryConfig};
use isac_ckm::waveform::{build_isac_frame, build_sensing_frame, demap_qpsk, map_qpsk, OfdmConfig, SensingFrameSpec};
use isac_ckm::C64;
use ndarray::Array2;
use proptest::prelude::*;

fn complex_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Array2<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols)
        .prop_map(move |v| Array2::from_shape_fn((rows, cols), |(i, j)| C64::new(v[i * cols + j].0, v[i * cols + j].1)))
}

fn short_music() -> MusicConfig {
    MusicConfig {
        delay_grid: DelayGrid {
            start_m: 0.0,
            stop_m: 40.0,
            step_m: 0.25,
        },
        ..MusicConfig::default()
    }
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len())
        .max_by(|&a, &b| v[a].total_cmp(&v[b]).then(b.cmp(&a)))
        .unwrap()
}

fn spectrum(power: Array2<f64>) -> RangeAngleSpectrum {
    let q = power.ncols();
    RangeAngleSpectrum {
        power,
        range_start_m: 0.0,
        range_bin_m: 0.1,
        angles_rad: (0..q).map(|k| k as f64 * 0.01).collect(),
        estimator: Estimator::Capon,
        axis: RangeAxis::Grid(DelayGrid::default()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sensing_frames_have_unit_modulus_and_full_energy(root in prop::sample::select(vec![1u64, 25, 29, 60]),
                                                         q in 1usize..6, mq in 1usize..4, extra in 0usize..3) {
        let cfg = OfdmConfig { num_subcarriers: 64, bandwidth_hz: 5e6, symbols_per_frame: q * mq + extra, ..OfdmConfig::default() };
        let f = build_sensing_frame(&cfg, &SensingFrameSpec { num_beams: q, symbols_per_subframe: mq, zc_root: root }).unwrap();
        let energy: f64 = f.grid.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((energy - (64 * (q * mq + extra)) as f64).abs() < 1e-9);
        // Every scheduled beam exists and each gets its full subframe.
        prop_assert!(f.beam_schedule.iter().all(|&b| b < q));
        for b in 0..q {
            prop_assert!(f.beam_schedule.iter().filter(|&&s| s == b).count() >= mq);
        }
        prop_assert!(f.beam_schedule.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn isac_payload_round_trips(bits in prop::collection::vec(0u8..2, 0..200).prop_map(|mut b| { b.truncate(b.len() & !1); b }),
                                beam in 0usize..8) {
        let cfg = OfdmConfig { num_subcarriers: 64, bandwidth_hz: 5e6, symbols_per_frame: 4, ..OfdmConfig::default() };
        let sf = SensingFrameSpec { num_beams: 8, symbols_per_subframe: 1, zc_root: 25 };
        let f = build_isac_frame(&cfg, &sf, &bits, beam).unwrap();
        prop_assert!(f.beam_schedule.iter().all(|&b| b == beam));
        prop_assert_eq!(demap_qpsk(&f.data_symbols()), bits.clone());
        prop_assert!(map_qpsk(&bits).unwrap().iter().all(|s| (s.norm() - 1.0).abs() < 1e-12));
        prop_assert!(build_isac_frame(&cfg, &sf, &bits, 8).is_err());
    }

    #[test]
    fn top_beams_ignores_a_common_offset(a in prop::collection::vec(-150.0f64..0.0, 1..64),
                                         offset in -80.0f64..80.0, n in 1usize..6) {
        let b: Vec<f64> = a.iter().map(|v| v + offset).collect();
        let top = top_beams(&a, n);
        prop_assert_eq!(&top, &top_beams(&b, n));
        prop_assert_eq!(top.len(), n.min(a.len()));
        prop_assert!(top.windows(2).all(|w| a[w[0]] >= a[w[1]]));
        let floor = a[*top.last().unwrap()];
        prop_assert!((0..a.len()).filter(|i| !top.contains(i)).all(|i| a[i] <= floor));
    }

    #[test]
    fn ckm_json_round_trips(cells in prop::collection::vec(((0usize..9, 0usize..7), prop::collection::vec(-200.0f64..10.0, 8)), 0..20),
                            x0 in -5.0f64..5.0, y0 in -5.0f64..5.0, size in 0.1f64..2.0) {
        let mut g = CkmGrid::new(Vec2::new(x0, y0), size, (9, 7), 8, 3).unwrap();
        for ((ix, iy), rss) in &cells {
            let c = g.center(*ix, *iy);
            g.insert(c, rss).unwrap();
        }
        let text = ckm_to_json(&g);
        let back = ckm_from_json(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(ckm_to_json(&back), text);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckm.json");
        ckm_save(&g, &path).unwrap();
        prop_assert_eq!(ckm_load(&path).unwrap(), g);
    }

    #[test]
    fn clutter_subtraction_is_bounded_and_removes_itself(a in prop::collection::vec(0.0f64..10.0, 24),
                                                         b in prop::collection::vec(0.0f64..10.0, 24)) {
        let p = spectrum(Array2::from_shape_vec((6, 4), a).unwrap());
        let s = spectrum(Array2::from_shape_vec((6, 4), b).unwrap());
        let r = subtract_clutter(&p, &s).unwrap();
        prop_assert!(r.power.iter().zip(p.power.iter()).all(|(x, y)| *x >= 0.0 && x <= y));
        prop_assert!(subtract_clutter(&p, &p).unwrap().power.iter().all(|&x| x == 0.0));
        let zero = spectrum(Array2::zeros((6, 4)));
        prop_assert_eq!(subtract_clutter(&p, &zero).unwrap().power, p.power.clone());
        // A second pass against the same map only removes what the first left above it.
        let twice = subtract_clutter(&r, &s).unwrap();
        prop_assert!(twice.power.iter().zip(r.power.iter()).all(|(x, y)| x <= y));
    }

    #[test]
    fn fbcm_is_hermitian_and_persymmetric(h in complex_matrix(24, 3), rho in 0.2f64..0.8) {
        let r = mssp_fbcm_covariance(&h, rho).unwrap();
        let l = r.nrows();
        for i in 0..l {
            for j in 0..l {
                prop_assert_eq!(r[[i, j]], r[[l - 1 - i, l - 1 - j]].conj());
                prop_assert!((r[[i, j]] - r[[j, i]].conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn subspace_argmax_ignores_scaling(h in complex_matrix(32, 4), k in 1e-4f64..1e4) {
        let r = mssp_fbcm_covariance(&h, 0.4).unwrap();
        let rs = r.mapv(|z| z * k);
        let cfg = short_music();
        prop_assert_eq!(argmax(&music_spectrum(&r, &cfg, 78.125e3).unwrap()),
                        argmax(&music_spectrum(&rs, &cfg, 78.125e3).unwrap()));
        prop_assert_eq!(argmax(&capon_spectrum(&r, &cfg, 78.125e3).unwrap()),
                        argmax(&capon_spectrum(&rs, &cfg, 78.125e3).unwrap()));
    }

    #[test]
    fn periodogram_ignores_unit_modulus_rotation(h in complex_matrix(32, 3), phi in 0.0f64..6.3) {
        let rot = C64::from_polar(1.0, phi);
        let a = periodogram_range(&h, 128).unwrap();
        let b = periodogram_range(&h.mapv(|z| z * rot), 128).unwrap();
        prop_assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-9 * x.abs().max(1.0)));
    }

    #[test]
    fn rays_are_reciprocal(ax in -1.0f64..8.0, ay in 0.0f64..8.0, bx in -1.0f64..8.0, by in 0.0f64..8.0) {
        let scene = room().scene;
        let (a, b) = (Vec2::new(ax, ay), Vec2::new(bx, by));
        prop_assume!(a.distance(b) > 1e-3);
        let key = |r: &isac_ckm::channel::Ray| (r.via_reflector, (r.length_m * 1e9).round() as i64, (r.blocked_db * 1e9).round() as i64);
        let mut fwd: Vec<_> = trace_rays(&scene, a, b).iter().map(key).collect();
        let mut back: Vec<_> = trace_rays(&scene, b, a).iter().map(key).collect();
        fwd.sort();
        back.sort();
        prop_assert_eq!(fwd, back);
    }

    #[test]
    fn noise_is_a_pure_function_of_seed_and_stream(seed in any::<u64>(), stream in any::<u64>()) {
        let draw = |s: u64| {
            let mut m = Array2::<C64>::zeros((5, 7));
            add_awgn(&mut m, 0.3, seed, s);
            m
        };
        prop_assert_eq!(draw(stream), draw(stream));
        prop_assert_ne!(draw(stream), draw(stream.wrapping_add(1)));
    }

    #[test]
    fn doubling_rcs_scales_echo_amplitude_by_root_two(mag in 1e-6f64..1.0, phase in 0.0f64..6.3, rcs in 0.01f64..10.0) {
        let p = PathParams {
            geometric_length_m: 4.0,
            angle_rad: 0.1,
            doppler_hz: 0.0,
            complex_gain: C64::from_polar(mag, phase),
            blocked_db: 0.0,
            via_reflector: None,
        };
        let lambda = 0.0109;
        let ratio = echo_gain(&p, 2.0 * rcs, lambda) / echo_gain(&p, rcs, lambda);
        prop_assert!((ratio - C64::new(2f64.sqrt(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn beam_choices_stay_inside_the_codebook(theta in -1.55f64..1.55, q in prop::sample::select(vec![1usize, 2, 8, 64, 128])) {
        let p = pointing_beam(theta, q, 0.495);
        prop_assert!(p < q);
        prop_assert!(isac_ckm::waveform::nearest_beam_by_pointing(theta, q, 0.495) < q);
        prop_assert!(isac_ckm::waveform::nearest_beam_by_angle(theta, q) < q);
    }

    #[test]
    fn trajectory_steps_are_uniform(x1 in 0.5f64..8.0, y1 in -3.0f64..3.0, speed in 0.1f64..3.0) {
        let t = TrajectoryConfig { waypoints: vec![Vec2::new(0.0, 0.0), Vec2::new(x1, 0.0), Vec2::new(x1, y1)], speed_mps: speed, sample_period_s: 0.1 };
        let pts = sample_trajectory(&t);
        let step = speed * 0.1;
        // Path length along the polyline between samples is constant; the final partial step is shorter.
        let n = pts.len();
        for w in pts[..n - 1].windows(2) {
            prop_assert!(w[0].position.distance(w[1].position) <= step + 1e-9);
            prop_assert!((w[1].t_s - w[0].t_s - 0.1).abs() < 1e-9);
        }
        prop_assert_eq!(pts[n - 1].position, Vec2::new(x1, y1));
    }
}
