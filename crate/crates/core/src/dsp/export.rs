//! Text formats for spectra and detections.

use super::{DelayGrid, Detection, RangeAngleSpectrum, RangeAxis};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// Nine significant digits in scientific notation.
pub fn fmt_sig9(v: f64) -> String {
    format!("{v:.8e}")
}

/// One row per range bin, one column per beam, no header.
pub fn spectrum_csv(p: &RangeAngleSpectrum) -> String {
    let mut s = String::with_capacity(p.power.len() * 16);
    for row in p.power.rows() {
        let mut first = true;
        for v in row {
            if !first {
                s.push(',');
            }
            first = false;
            s.push_str(&fmt_sig9(*v));
        }
        s.push('\n');
    }
    s
}

/// Metadata accompanying [`spectrum_csv`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSidecar {
    pub estimator: String,
    pub num_bins: usize,
    pub num_beams: usize,
    pub range_start_m: f64,
    pub range_bin_m: f64,
    pub angles_deg: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_idft: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay_grid: Option<DelayGrid>,
}

impl SpectrumSidecar {
    pub fn of(p: &RangeAngleSpectrum) -> Self {
        let (n_idft, delay_grid) = match &p.axis {
            RangeAxis::Idft { n_idft } => (Some(*n_idft), None),
            RangeAxis::Grid(g) => (None, Some(g.clone())),
        };
        SpectrumSidecar {
            estimator: p.estimator.name().to_string(),
            num_bins: p.num_bins(),
            num_beams: p.num_beams(),
            range_start_m: p.range_start_m,
            range_bin_m: p.range_bin_m,
            angles_deg: p.angles_rad.iter().map(|a| a.to_degrees()).collect(),
            n_idft,
            delay_grid,
        }
    }
}

pub const DETECTIONS_HEADER: &str = "range_m,angle_deg,power_db,x,y,cells";

pub fn detections_csv(dets: &[Detection]) -> String {
    let mut s = String::from(DETECTIONS_HEADER);
    s.push('\n');
    for d in dets {
        let _ = writeln!(
            s,
            "{:.6},{:.6},{:.6},{:.6},{:.6},{}",
            d.range_m,
            d.angle_rad.to_degrees(),
            d.power_db,
            d.position_xy.x,
            d.position_xy.y,
            d.num_cells
        );
    }
    s
}
