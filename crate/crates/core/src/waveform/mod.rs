//! OFDM numerology, known sequences, frames and the DFT beam codebook.

mod beam;
mod frame;
mod sequence;

pub use beam::{
    array_response, beam_angle, beam_spatial_frequency, dft_beam_vector, nearest_beam_by_angle,
    nearest_beam_by_pointing, steering_vector, Codebook,
};
pub use frame::{build_isac_frame, build_sensing_frame, FrameKind, FrameSpec};
pub use sequence::{demap_qpsk, generate_zc_sequence, known_sequence, largest_prime_at_most, map_qpsk};

use crate::{Error, Result, SPEED_OF_LIGHT};
use serde::{Deserialize, Serialize};

/// OFDM and array numerology of the prototype.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OfdmConfig {
    pub carrier_frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub subcarrier_spacing_hz: f64,
    pub num_subcarriers: usize,
    /// Symbol duration including the cyclic prefix.
    pub symbol_duration_s: f64,
    pub cp_duration_s: f64,
    pub symbols_per_frame: usize,
    pub antenna_spacing_m: f64,
    pub num_tx_elements: usize,
    pub num_rx_elements: usize,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        OfdmConfig {
            carrier_frequency_hz: 27.5e9,
            bandwidth_hz: 80e6,
            subcarrier_spacing_hz: 78.125e3,
            num_subcarriers: 1024,
            symbol_duration_s: 16e-6,
            cp_duration_s: 3.2e-6,
            symbols_per_frame: 1027,
            antenna_spacing_m: 5.4e-3,
            num_tx_elements: 16,
            num_rx_elements: 16,
        }
    }
}

const TIMING_TOL: f64 = 1e-9;

impl OfdmConfig {
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency_hz
    }

    /// Sample rate of the critically sampled baseband, `N_sc·Δf`.
    pub fn sample_rate(&self) -> f64 {
        self.num_subcarriers as f64 * self.subcarrier_spacing_hz
    }

    /// Useful (CP-free) symbol duration `1/Δf`.
    pub fn useful_duration_s(&self) -> f64 {
        1.0 / self.subcarrier_spacing_hz
    }

    pub fn frame_duration_s(&self) -> f64 {
        self.symbols_per_frame as f64 * self.symbol_duration_s
    }

    /// Range bin of an unpadded IDFT, `c/(2B)` with `B = N_sc·Δf`.
    pub fn range_resolution_m(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.sample_rate())
    }

    /// Cyclic prefix length in samples at [`Self::sample_rate`].
    pub fn cp_samples(&self) -> Result<usize> {
        let s = self.cp_duration_s * self.sample_rate();
        let r = s.round();
        if (s - r).abs() > 1e-6 || r < 1.0 {
            return Err(Error::param(format!("cp of {s} samples is not a positive integer")));
        }
        Ok(r as usize)
    }

    /// Field-named validation; the returned path is relative to this struct.
    pub fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        let positive = [
            ("carrier_frequency_hz", self.carrier_frequency_hz),
            ("bandwidth_hz", self.bandwidth_hz),
            ("subcarrier_spacing_hz", self.subcarrier_spacing_hz),
            ("symbol_duration_s", self.symbol_duration_s),
            ("cp_duration_s", self.cp_duration_s),
            ("antenna_spacing_m", self.antenna_spacing_m),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err((name, format!("must be positive and finite, got {v}")));
            }
        }
        let counts = [
            ("num_subcarriers", self.num_subcarriers),
            ("symbols_per_frame", self.symbols_per_frame),
            ("num_tx_elements", self.num_tx_elements),
            ("num_rx_elements", self.num_rx_elements),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err((name, "must be at least 1".into()));
            }
        }
        if self.sample_rate() > self.bandwidth_hz * (1.0 + TIMING_TOL) {
            return Err((
                "subcarrier_spacing_hz",
                format!(
                    "N_sc·Δf = {} Hz exceeds bandwidth {} Hz",
                    self.sample_rate(),
                    self.bandwidth_hz
                ),
            ));
        }
        let cp = self.symbol_duration_s - self.useful_duration_s();
        if (cp - self.cp_duration_s).abs() > TIMING_TOL * self.symbol_duration_s {
            return Err((
                "cp_duration_s",
                format!("must equal symbol_duration_s - 1/Δf = {cp:e} s"),
            ));
        }
        if self.cp_samples().is_err() {
            return Err(("cp_duration_s", "must span an integer number of samples".into()));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check().map_err(|(f, m)| Error::config(format!("waveform.{f}"), m))
    }
}

/// Beam sweep layout of a sensing frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensingFrameSpec {
    pub num_beams: usize,
    pub symbols_per_subframe: usize,
    pub zc_root: u64,
}

impl Default for SensingFrameSpec {
    fn default() -> Self {
        SensingFrameSpec {
            num_beams: 64,
            symbols_per_subframe: 16,
            zc_root: 25,
        }
    }
}

impl SensingFrameSpec {
    /// Transmit beam per symbol: beam `⌊m/M_q⌋`, trailing symbols repeat the last beam.
    pub fn beam_schedule(&self, symbols_per_frame: usize) -> Result<Vec<usize>> {
        let q = self.num_beams;
        let mq = self.symbols_per_subframe;
        if q == 0 || mq == 0 {
            return Err(Error::param("num_beams and symbols_per_subframe must be positive"));
        }
        if q * mq > symbols_per_frame {
            return Err(Error::param(format!(
                "{q} beams x {mq} symbols exceed the {symbols_per_frame}-symbol frame"
            )));
        }
        Ok((0..symbols_per_frame).map(|m| (m / mq).min(q - 1)).collect())
    }
}
