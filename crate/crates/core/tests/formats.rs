//! Output formats read the way an external plotting consumer reads them:
//! plain CSV splitting and untyped JSON.

mod common;

use common::*;
use isac_ckm::ckm::ckm_to_json;
use isac_ckm::dsp::export::{detections_csv, spectrum_csv, SpectrumSidecar, DETECTIONS_HEADER};
use isac_ckm::geom::Vec2;
use isac_ckm::scenario::{parse_run_log, run_environment_sensing, run_log_csv, AlignMethod, RunRecord, RUN_LOG_HEADER};
use serde_json::Value;

fn numbers(line: &str) -> Vec<f64> {
    line.split(',')
        .map(|v| v.parse::<f64>().expect("numeric field"))
        .collect()
}

#[test]
fn spectrum_csv_and_sidecar_describe_the_same_grid() {
    for est in ["periodogram", "music", "capon"] {
        let cfg = with(&desk(), &[("estimator", est)]);
        let out = run_environment_sensing(&cfg).unwrap();
        let csv = spectrum_csv(&out.spectrum);
        let side: Value =
            serde_json::from_str(&serde_json::to_string(&SpectrumSidecar::of(&out.spectrum)).unwrap()).unwrap();
        let rows: Vec<Vec<f64>> = csv.lines().map(numbers).collect();
        let bins = side["num_bins"].as_u64().unwrap() as usize;
        let beams = side["num_beams"].as_u64().unwrap() as usize;
        assert_eq!(side["estimator"], est);
        assert_eq!(rows.len(), bins);
        assert!(rows.iter().all(|r| r.len() == beams));
        assert!(rows.iter().flatten().all(|v| v.is_finite() && *v >= 0.0));
        let angles = side["angles_deg"].as_array().unwrap();
        assert_eq!(angles.len(), beams);
        assert_eq!(angles[0].as_f64(), Some(0.0));
        let step = side["range_bin_m"].as_f64().unwrap();
        match est {
            "periodogram" => {
                let n = side["n_idft"].as_u64().unwrap() as usize;
                assert_eq!(n, bins);
                assert!((step - 3e8 / (2.0 * n as f64 * 78.125e3)).abs() < 1e-12);
                assert!(side.get("delay_grid").is_none());
            }
            _ => {
                assert_eq!(side["delay_grid"]["step_m"].as_f64(), Some(step));
                assert_eq!(bins, 400);
            }
        }
        // Nine significant digits survive as written.
        let first = csv.lines().next().unwrap().split(',').next().unwrap();
        assert_eq!(first.split('e').next().unwrap().replace(['.', '-'], "").len(), 9);
    }
}

#[test]
fn detections_csv_has_header_and_typed_rows() {
    let out = run_environment_sensing(&desk()).unwrap();
    let text = detections_csv(&out.detections);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(DETECTIONS_HEADER));
    let rows: Vec<Vec<f64>> = lines.map(numbers).collect();
    assert_eq!(rows.len(), out.detections.len());
    for (r, d) in rows.iter().zip(&out.detections) {
        assert_eq!(r.len(), 6);
        assert!((r[0] - d.range_m).abs() < 1e-6);
        assert_eq!(r[5] as usize, d.num_cells);
    }
}

#[test]
fn ckm_json_is_self_describing() {
    let cfg = room();
    let mut g = cfg.empty_grid().unwrap();
    let rss: Vec<f64> = (0..64).map(|q| -40.0 - (q as f64 - 20.0).abs()).collect();
    g.insert(Vec2::new(1.0, 2.0), &rss).unwrap();
    let mut b = rss.clone();
    b[63] = f64::NEG_INFINITY;
    g.insert(Vec2::new(6.0, 6.0), &b).unwrap();
    let v: Value = serde_json::from_str(&ckm_to_json(&g)).unwrap();
    assert_eq!(v["version"], 1);
    assert_eq!(v["Q"], 64);
    assert_eq!(v["n_max"], 3);
    assert_eq!(v["extent"], serde_json::json!([13, 12]));
    assert_eq!(v["cell_size_m"].as_f64(), Some(0.5));
    let cells = v["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 2);
    for c in cells {
        let (ix, iy) = (c["ix"].as_u64().unwrap(), c["iy"].as_u64().unwrap());
        let center = c["center"].as_array().unwrap();
        assert!((center[0].as_f64().unwrap() - 0.5 * ix as f64).abs() < 1e-9);
        assert!((center[1].as_f64().unwrap() - (0.5 + 0.5 * iy as f64)).abs() < 1e-9);
        let all = c["rss_db"].as_array().unwrap();
        assert_eq!(all.len(), 64);
        let beams = c["beams"].as_array().unwrap();
        assert_eq!(beams.len(), 3);
        assert_eq!(beams[0]["q"], 20);
        let vals: Vec<f64> = beams.iter().map(|b| b["rss_db"].as_f64().unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        for b in beams {
            assert_eq!(all[b["q"].as_u64().unwrap() as usize], b["rss_db"]);
        }
    }
    // Zero-energy beams are stored at the floor, which stays valid JSON.
    assert_eq!(cells[1]["rss_db"][63].as_f64(), Some(-300.0));
}

#[test]
fn run_log_round_trips_and_splits_cleanly() {
    let records = vec![
        RunRecord {
            t_s: 0.0,
            ue_true: Vec2::new(0.0, 5.6),
            ue_est: Some(Vec2::new(0.012, 5.588)),
            los: true,
            method: AlignMethod::LocationBased,
            beam_index: 60,
            ue_rss_db: -21.123456,
            ckm_fallback: false,
        },
        RunRecord {
            t_s: 0.1,
            ue_true: Vec2::new(0.05, 5.6),
            ue_est: None,
            los: false,
            method: AlignMethod::CkmBased,
            beam_index: 7,
            ue_rss_db: -30.5,
            ckm_fallback: false,
        },
    ];
    let text = run_log_csv(&records);
    assert_eq!(parse_run_log(&text).unwrap(), records);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.join(","), RUN_LOG_HEADER);
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.iter().all(|r| r.len() == header.len()));
    assert_eq!(rows[1][3], "");
    assert_eq!(rows[0][5], "true");
    assert_eq!(rows[1][6], "ckm_based");
    assert!(parse_run_log("t,x\n").is_err());
}
