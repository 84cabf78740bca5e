//! Radar estimation from echo observations to detections.

mod covariance;
mod detect;
mod doppler;
mod equalize;
pub mod export;
mod periodogram;
mod spectrum;
mod subspace;

pub use covariance::{mssp_covariance_forward, mssp_fbcm_covariance, smoothing_length};
pub use detect::{dbscan, extract_detections, Detection, DetectionConfig};
pub use doppler::{doppler_from_bin, range_doppler_map};
pub use equalize::{equalize_known_data, slice_beams};
pub use periodogram::{periodogram_range, range_from_bin, PeriodogramPlan};
pub use spectrum::{
    build_range_angle_spectrum, build_range_angle_spectrum_subset, subtract_clutter, EstimatorSettings,
    RangeAngleSpectrum, RangeAxis,
};
pub use subspace::{capon_spectrum, eval_quadratic_form, music_spectrum, quadratic_form_coeffs, DelaySteering};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Periodogram,
    Music,
    Capon,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Periodogram => "periodogram",
            Estimator::Music => "music",
            Estimator::Capon => "capon",
        }
    }

    /// Whether spectrum values track echo power and so admit clutter subtraction.
    pub fn power_faithful(self) -> bool {
        !matches!(self, Estimator::Music)
    }
}

impl std::str::FromStr for Estimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodogram" => Ok(Estimator::Periodogram),
            "music" => Ok(Estimator::Music),
            "capon" => Ok(Estimator::Capon),
            _ => Err(Error::param(format!("unknown estimator `{s}`"))),
        }
    }
}

/// Range window `[start, stop)` sampled every `step` metres.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelayGrid {
    pub start_m: f64,
    pub stop_m: f64,
    pub step_m: f64,
}

impl Default for DelayGrid {
    fn default() -> Self {
        DelayGrid {
            start_m: 0.0,
            stop_m: 60.0,
            step_m: 0.05,
        }
    }
}

impl DelayGrid {
    pub fn len(&self) -> usize {
        ((self.stop_m - self.start_m) / self.step_m - 1e-9).ceil().max(0.0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self, u: usize) -> f64 {
        self.start_m + u as f64 * self.step_m
    }

    pub fn ranges(&self) -> Vec<f64> {
        (0..self.len()).map(|u| self.range(u)).collect()
    }
}

/// Signal-subspace dimension selection.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ModelOrder {
    /// Eigenvalues above 1e-2 of the largest.
    #[default]
    Auto,
    Fixed(usize),
}

impl Serialize for ModelOrder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ModelOrder::Auto => s.serialize_str("auto"),
            ModelOrder::Fixed(k) => s.serialize_u64(*k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for ModelOrder {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Fixed(usize),
            Name(String),
        }
        match Repr::deserialize(d)? {
            Repr::Fixed(k) => Ok(ModelOrder::Fixed(k)),
            Repr::Name(s) if s == "auto" => Ok(ModelOrder::Auto),
            Repr::Name(s) => Err(serde::de::Error::custom(format!(
                "expected \"auto\" or an integer, got \"{s}\""
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MusicConfig {
    pub smoothing_rho: f64,
    pub model_order: ModelOrder,
    pub delay_grid: DelayGrid,
    /// Capon loading `ε`, relative to the mean eigenvalue.
    pub diagonal_loading: f64,
}

impl Default for MusicConfig {
    fn default() -> Self {
        MusicConfig {
            smoothing_rho: 0.4,
            model_order: ModelOrder::Auto,
            delay_grid: DelayGrid::default(),
            diagonal_loading: 1e-3,
        }
    }
}
