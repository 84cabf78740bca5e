use super::covariance::mssp_fbcm_covariance;
use super::periodogram::{range_from_bin, PeriodogramPlan};
use super::subspace::{capon_with_steering, music_with_steering, DelaySteering};
use super::{DelayGrid, Estimator, MusicConfig};
use crate::par::{map_slice, ExecMode};
use crate::waveform::beam_angle;
use crate::{Error, Result, C64};
use ndarray::Array2;

#[derive(Clone, Debug, PartialEq)]
pub enum RangeAxis {
    /// Zero-padded IDFT bins starting at 0 m.
    Idft {
        n_idft: usize,
    },
    Grid(DelayGrid),
}

/// Power over (range bin, beam).
#[derive(Clone, Debug, PartialEq)]
pub struct RangeAngleSpectrum {
    /// Row-major, `bins × Q`, every entry non-negative.
    pub power: Array2<f64>,
    pub range_start_m: f64,
    pub range_bin_m: f64,
    pub angles_rad: Vec<f64>,
    pub estimator: Estimator,
    pub axis: RangeAxis,
}

impl RangeAngleSpectrum {
    pub fn num_bins(&self) -> usize {
        self.power.nrows()
    }

    pub fn num_beams(&self) -> usize {
        self.power.ncols()
    }

    pub fn range(&self, bin: usize) -> f64 {
        self.range_start_m + bin as f64 * self.range_bin_m
    }

    /// (bin, beam, power) of the global maximum.
    pub fn peak(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for ((i, q), &v) in self.power.indexed_iter() {
            if v > best.2 {
                best = (i, q, v);
            }
        }
        best
    }
}

/// Everything needed to turn beam slices into spectrum columns.
#[derive(Clone, Debug)]
pub struct EstimatorSettings {
    pub estimator: Estimator,
    pub music: MusicConfig,
    pub n_idft: usize,
    pub delta_f: f64,
    pub mode: ExecMode,
}

enum Kernel {
    Periodogram(PeriodogramPlan),
    Subspace(DelaySteering),
}

impl Kernel {
    fn new(s: &EstimatorSettings) -> Self {
        match s.estimator {
            Estimator::Periodogram => Kernel::Periodogram(PeriodogramPlan::new(s.n_idft)),
            _ => Kernel::Subspace(DelaySteering::new(&s.music.delay_grid, s.delta_f)),
        }
    }

    fn bins(&self) -> usize {
        match self {
            Kernel::Periodogram(p) => p.n_idft(),
            Kernel::Subspace(z) => z.len(),
        }
    }

    fn column(&self, s: &EstimatorSettings, hq: &Array2<C64>) -> Result<Vec<f64>> {
        match (self, s.estimator) {
            (Kernel::Periodogram(p), _) => p.apply(hq),
            (Kernel::Subspace(z), Estimator::Music) => {
                let r = mssp_fbcm_covariance(hq, s.music.smoothing_rho)?;
                music_with_steering(&r, s.music.model_order, z)
            }
            (Kernel::Subspace(z), _) => {
                let r = mssp_fbcm_covariance(hq, s.music.smoothing_rho)?;
                capon_with_steering(&r, s.music.diagonal_loading, z)
            }
        }
    }
}

/// Range-angle spectrum with every beam column estimated.
pub fn build_range_angle_spectrum(slices: &[Array2<C64>], settings: &EstimatorSettings) -> Result<RangeAngleSpectrum> {
    let all: Vec<usize> = (0..slices.len()).collect();
    build_range_angle_spectrum_subset(slices, settings, &all)
}

/// Range-angle spectrum with only the listed beam columns estimated; other
/// columns stay zero.
pub fn build_range_angle_spectrum_subset(
    slices: &[Array2<C64>],
    settings: &EstimatorSettings,
    beams: &[usize],
) -> Result<RangeAngleSpectrum> {
    let q = slices.len();
    if q == 0 {
        return Err(Error::param("no beam slices"));
    }
    if slices.iter().any(|s| s.dim() != slices[0].dim()) {
        return Err(Error::param("beam slices have mixed dimensions"));
    }
    if let Some(&b) = beams.iter().find(|&&b| b >= q) {
        return Err(Error::param(format!("beam {b} outside {q} slices")));
    }
    let kernel = Kernel::new(settings);
    let cols = map_slice(settings.mode, beams, |&b| kernel.column(settings, &slices[b]));
    let mut power = Array2::<f64>::zeros((kernel.bins(), q));
    for (&b, col) in beams.iter().zip(cols) {
        power.column_mut(b).iter_mut().zip(col?).for_each(|(p, v)| *p = v);
    }
    let (range_start_m, range_bin_m, axis) = match settings.estimator {
        Estimator::Periodogram => (
            0.0,
            range_from_bin(1, settings.delta_f, settings.n_idft),
            RangeAxis::Idft {
                n_idft: settings.n_idft,
            },
        ),
        _ => {
            let g = settings.music.delay_grid.clone();
            (g.start_m, g.step_m, RangeAxis::Grid(g))
        }
    };
    Ok(RangeAngleSpectrum {
        power,
        range_start_m,
        range_bin_m,
        angles_rad: (0..q).map(|k| beam_angle(k, q)).collect(),
        estimator: settings.estimator,
        axis,
    })
}

/// `max(P - P_static, 0)` for power-faithful estimators.
pub fn subtract_clutter(p: &RangeAngleSpectrum, p_static: &RangeAngleSpectrum) -> Result<RangeAngleSpectrum> {
    if !p.estimator.power_faithful() {
        return Err(Error::param(format!(
            "clutter subtraction is undefined for {} pseudo-spectra",
            p.estimator.name()
        )));
    }
    if p.estimator != p_static.estimator || p.power.dim() != p_static.power.dim() || p.axis != p_static.axis {
        return Err(Error::param("clutter map does not match the live spectrum"));
    }
    let mut out = p.clone();
    out.power.zip_mut_with(&p_static.power, |a, b| *a = (*a - b).max(0.0));
    Ok(out)
}
