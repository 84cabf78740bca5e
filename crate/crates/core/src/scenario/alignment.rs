use super::sensing::{associate, streams, ue_target, EchoSimulator, Localizer};
use super::{location_based_beam, los_blocked, sample_trajectory, ScenarioConfig};
use crate::channel::{compute_paths, downlink_observation};
use crate::ckm::CkmGrid;
use crate::geom::Vec2;
use crate::par::map_indexed;
use crate::waveform::build_isac_frame;
use crate::{Error, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignMethod {
    LocationBased,
    CkmBased,
}

impl AlignMethod {
    pub fn name(self) -> &'static str {
        match self {
            AlignMethod::LocationBased => "location_based",
            AlignMethod::CkmBased => "ckm_based",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "location_based" => Some(AlignMethod::LocationBased),
            "ckm_based" => Some(AlignMethod::CkmBased),
            _ => None,
        }
    }
}

/// One row of the run log.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub t_s: f64,
    pub ue_true: Vec2,
    /// Present on sensing frames where the UE echo was associated.
    pub ue_est: Option<Vec2>,
    pub los: bool,
    pub method: AlignMethod,
    pub beam_index: usize,
    pub ue_rss_db: f64,
    /// The map had no entry near the UE and the location-based beam was used.
    pub ckm_fallback: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodSummary {
    pub mean_rss_db: f64,
    pub min_rss_db: f64,
    pub nlos_mean_rss_db: Option<f64>,
    /// Adjacent line-of-sight median minus the non-line-of-sight mean.
    pub nlos_drop_db: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlignmentSummary {
    pub frames: usize,
    pub nlos_frames: usize,
    pub sensing_frames: usize,
    pub localized_frames: usize,
    pub ckm_fallbacks: usize,
    /// Median RSS of line-of-sight frames within 1 m of a blocked frame.
    pub adjacent_los_median_db: Option<f64>,
    pub location_based: MethodSummary,
    pub ckm_based: MethodSummary,
    /// Mean per-frame RSS advantage of the map-based method while blocked.
    pub nlos_gain_db: Option<f64>,
}

pub struct AlignmentOutcome {
    pub records: Vec<RunRecord>,
    pub summary: AlignmentSummary,
}

/// `10·lg(‖Y‖²_F / M_symb)`.
fn frame_rss_db(y: &ndarray::Array2<crate::C64>) -> f64 {
    let e: f64 = y.iter().map(|z| z.norm_sqr()).sum();
    10.0 * (e / y.ncols() as f64).log10()
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    Some(if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    })
}

struct FrameResult {
    ue_est: Option<Vec2>,
    los: bool,
    location: (usize, f64),
    ckm: (usize, f64, bool),
}

/// Moves the UE along the trajectory, serving each frame slot with both the
/// location-based and the map-assisted beam under identical noise.
pub fn run_beam_alignment_eval(cfg: &ScenarioConfig, ckm: &CkmGrid) -> Result<AlignmentOutcome> {
    let q = cfg.frame.num_beams;
    if ckm.num_beams() != q {
        return Err(Error::param(format!(
            "map was built for {} beams, config uses {q}",
            ckm.num_beams()
        )));
    }
    let points = sample_trajectory(&cfg.trajectory);
    let scene = &cfg.scene;
    let pose = scene.pose();
    let lambda = cfg.waveform.wavelength();
    let d_over_lambda = cfg.waveform.antenna_spacing_m / lambda;
    let sim = EchoSimulator::new(cfg)?;
    let loc = Localizer::new(
        cfg,
        &sim,
        cfg.estimator,
        cfg.localization.clutter,
        cfg.localization.screen_margin_db,
    )?;
    let n_isac = cfg.sensing_interval_frames;

    let results = map_indexed(cfg.exec, points.len(), |k| -> Result<FrameResult> {
        let pt = points[k];
        let ue = ue_target(cfg, pt.position, pt.velocity);
        let los = !los_blocked(scene, scene.bs_position, pt.position);
        let ue_est = if k % n_isac == 0 {
            let slices = sim.beam_slices(std::slice::from_ref(&ue), streams::EVAL_ECHO + k as u64)?;
            let dets = loc.detect(&slices)?;
            associate(&dets, pt.position, cfg.association_gate_m).map(|d| d.position_xy)
        } else {
            None
        };
        let q_loc = location_based_beam(pt.position, &pose, q, d_over_lambda)?;
        let (q_ckm, fallback) = if los {
            (q_loc, false)
        } else {
            match ckm.query(pt.position) {
                Ok(c) => (c.best_beam(), false),
                Err(Error::NotFound(_)) => (q_loc, true),
                Err(e) => return Err(e),
            }
        };
        let paths = compute_paths(scene, &ue, lambda)?;
        let noise = cfg.noise.spec(streams::EVAL_DOWNLINK + k as u64);
        let rss = |beam: usize| -> Result<f64> {
            let frame = build_isac_frame(&cfg.waveform, &cfg.frame, &[], beam)?;
            let obs = downlink_observation(&frame, &paths, &cfg.waveform, &noise)?;
            Ok(frame_rss_db(&obs.matrix))
        };
        let r_loc = rss(q_loc)?;
        // Same beam and same noise stream give the same observation.
        let r_ckm = if q_ckm == q_loc { r_loc } else { rss(q_ckm)? };
        Ok(FrameResult {
            ue_est,
            los,
            location: (q_loc, r_loc),
            ckm: (q_ckm, r_ckm, fallback),
        })
    });

    let mut records = Vec::with_capacity(2 * points.len());
    let mut frames = Vec::with_capacity(points.len());
    for (pt, r) in points.iter().zip(results) {
        let r = r?;
        let base = |method, beam_index, ue_rss_db, ckm_fallback| RunRecord {
            t_s: pt.t_s,
            ue_true: pt.position,
            ue_est: r.ue_est,
            los: r.los,
            method,
            beam_index,
            ue_rss_db,
            ckm_fallback,
        };
        records.push(base(AlignMethod::LocationBased, r.location.0, r.location.1, false));
        records.push(base(AlignMethod::CkmBased, r.ckm.0, r.ckm.1, r.ckm.2));
        frames.push(r);
    }
    let summary = summarize(&points.iter().map(|p| p.position).collect::<Vec<_>>(), &frames, n_isac);
    Ok(AlignmentOutcome { records, summary })
}

fn summarize(pos: &[Vec2], frames: &[FrameResult], n_isac: usize) -> AlignmentSummary {
    let nlos: Vec<usize> = (0..frames.len()).filter(|&k| !frames[k].los).collect();
    let adjacent: Vec<f64> = (0..frames.len())
        .filter(|&k| frames[k].los && nlos.iter().any(|&j| pos[j].distance(pos[k]) <= 1.0))
        .map(|k| frames[k].location.1)
        .collect();
    let adjacent_los_median_db = median(&adjacent);
    let method = |rss: &dyn Fn(&FrameResult) -> f64| {
        let all: Vec<f64> = frames.iter().map(rss).collect();
        let blocked: Vec<f64> = nlos.iter().map(|&k| rss(&frames[k])).collect();
        let nlos_mean_rss_db = mean(&blocked);
        MethodSummary {
            mean_rss_db: mean(&all).unwrap_or(f64::NAN),
            min_rss_db: all.iter().copied().fold(f64::INFINITY, f64::min),
            nlos_mean_rss_db,
            nlos_drop_db: adjacent_los_median_db.zip(nlos_mean_rss_db).map(|(a, b)| a - b),
        }
    };
    let gains: Vec<f64> = nlos.iter().map(|&k| frames[k].ckm.1 - frames[k].location.1).collect();
    AlignmentSummary {
        frames: frames.len(),
        nlos_frames: nlos.len(),
        sensing_frames: frames.len().div_ceil(n_isac),
        localized_frames: frames.iter().filter(|f| f.ue_est.is_some()).count(),
        ckm_fallbacks: frames.iter().filter(|f| f.ckm.2).count(),
        adjacent_los_median_db,
        location_based: method(&|f| f.location.1),
        ckm_based: method(&|f| f.ckm.1),
        nlos_gain_db: mean(&gains),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }
}
