use super::{ClutterMode, ScenarioConfig};
use crate::channel::{compute_paths, monostatic_echo_matrix, EchoPath, Target, TargetKind};
use crate::dsp::{
    build_range_angle_spectrum, build_range_angle_spectrum_subset, equalize_known_data, extract_detections,
    slice_beams, subtract_clutter, Detection, Estimator, RangeAngleSpectrum,
};
use crate::geom::Vec2;
use crate::waveform::{build_sensing_frame, FrameSpec};
use crate::{Result, C64};
use ndarray::Array2;

/// Noise stream bases; each run kind draws from a disjoint family of streams.
pub(crate) mod streams {
    pub const STATIC: u64 = 1 << 40;
    pub const SENSE: u64 = 2 << 40;
    pub const CELL_ECHO: u64 = 3 << 40;
    pub const CELL_DOWNLINK: u64 = 4 << 40;
    pub const EVAL_ECHO: u64 = 5 << 40;
    pub const EVAL_DOWNLINK: u64 = 6 << 40;
}

/// Echo synthesis of the configured scene plus extra targets, through to
/// equalized per-beam slices.
pub struct EchoSimulator<'a> {
    cfg: &'a ScenarioConfig,
    frame: FrameSpec,
}

impl<'a> EchoSimulator<'a> {
    pub fn new(cfg: &'a ScenarioConfig) -> Result<Self> {
        let frame = build_sensing_frame(&cfg.waveform, &cfg.frame)?;
        Ok(EchoSimulator { cfg, frame })
    }

    pub fn frame(&self) -> &FrameSpec {
        &self.frame
    }

    pub fn echo_paths(&self, extra: &[Target]) -> Result<Vec<EchoPath>> {
        let lambda = self.cfg.waveform.wavelength();
        let mut out = Vec::new();
        for t in self.cfg.scene.targets.iter().chain(extra) {
            for path in compute_paths(&self.cfg.scene, t, lambda)? {
                if path.via_reflector.is_none() || self.cfg.echo_via_reflectors {
                    out.push(EchoPath { path, rcs_m2: t.rcs_m2 });
                }
            }
        }
        Ok(out)
    }

    pub fn beam_slices(&self, extra: &[Target], stream: u64) -> Result<Vec<Array2<C64>>> {
        let echoes = self.echo_paths(extra)?;
        let obs = monostatic_echo_matrix(
            &self.frame,
            &echoes,
            &self.cfg.waveform,
            &self.frame.beam_schedule,
            &self.cfg.noise.spec(stream),
        )?;
        let h = equalize_known_data(&obs, &self.frame)?;
        slice_beams(&h, self.cfg.frame.symbols_per_subframe, self.cfg.frame.num_beams)
    }
}

/// Turns echo slices into detections, optionally against a static-scene map.
pub struct Localizer {
    cfg: ScenarioConfig,
    estimator: Estimator,
    screen_margin_db: Option<f64>,
    static_map: Option<RangeAngleSpectrum>,
    static_periodogram: Option<RangeAngleSpectrum>,
    static_detections: Vec<Detection>,
}

impl Localizer {
    /// The static map is synthesized and estimated once here, then scaled by
    /// `localization.clutter_margin_db`.
    pub fn new(
        cfg: &ScenarioConfig,
        sim: &EchoSimulator<'_>,
        estimator: Estimator,
        clutter: ClutterMode,
        screen_margin_db: Option<f64>,
    ) -> Result<Self> {
        let gain = 10f64.powf(cfg.localization.clutter_margin_db / 10.0);
        let mut loc = Localizer {
            cfg: cfg.clone(),
            estimator,
            screen_margin_db: if clutter == ClutterMode::Subtract {
                screen_margin_db
            } else {
                None
            },
            static_map: None,
            static_periodogram: None,
            static_detections: Vec::new(),
        };
        if clutter == ClutterMode::Subtract {
            let slices = sim.beam_slices(&[], streams::STATIC)?;
            let mut map = build_range_angle_spectrum(&slices, &cfg.estimator_settings(estimator))?;
            loc.static_detections = extract_detections(&map, &cfg.detection, &cfg.scene.pose());
            if estimator.power_faithful() {
                map.power *= gain;
                loc.static_map = Some(map);
            }
            if loc.screen_margin_db.is_some() {
                let mut p = build_range_angle_spectrum(&slices, &cfg.estimator_settings(Estimator::Periodogram))?;
                p.power *= gain;
                loc.static_periodogram = Some(p);
            }
        }
        Ok(loc)
    }

    pub fn estimator(&self) -> Estimator {
        self.estimator
    }

    /// Beams whose periodogram residual comes within the screening margin of
    /// the strongest residual; every beam when screening is off.
    fn screened_beams(&self, slices: &[Array2<C64>]) -> Result<(Vec<usize>, Option<RangeAngleSpectrum>)> {
        let (Some(margin), Some(stat)) = (self.screen_margin_db, &self.static_periodogram) else {
            return Ok(((0..slices.len()).collect(), None));
        };
        let live = build_range_angle_spectrum(slices, &self.cfg.estimator_settings(Estimator::Periodogram))?;
        let resid = subtract_clutter(&live, stat)?;
        let col_max: Vec<f64> = resid
            .power
            .columns()
            .into_iter()
            .map(|c| c.iter().copied().fold(0.0, f64::max))
            .collect();
        let peak = col_max.iter().copied().fold(0.0, f64::max);
        let floor = peak * 10f64.powf(-margin / 10.0);
        let beams = if peak > 0.0 {
            (0..col_max.len()).filter(|&q| col_max[q] >= floor).collect()
        } else {
            Vec::new()
        };
        Ok((beams, Some(live)))
    }

    /// Spectrum that detection runs on.
    pub fn spectrum(&self, slices: &[Array2<C64>]) -> Result<RangeAngleSpectrum> {
        let (beams, periodogram) = self.screened_beams(slices)?;
        let live = match periodogram {
            Some(p) if self.estimator == Estimator::Periodogram => p,
            _ => build_range_angle_spectrum_subset(slices, &self.cfg.estimator_settings(self.estimator), &beams)?,
        };
        let Some(stat) = &self.static_map else {
            return Ok(live);
        };
        let mut resid = subtract_clutter(&live, stat)?;
        // Static peaks reshape when a new target joins the covariance; their
        // skirts survive subtraction, so the footprint of each one is blanked.
        let eps = self.cfg.detection.cluster_eps_m;
        let pose = self.cfg.scene.pose();
        let angles = resid.angles_rad.clone();
        let (start, step) = (resid.range_start_m, resid.range_bin_m);
        for ((i, q), v) in resid.power.indexed_iter_mut() {
            let p = pose.point_at(start + step * i as f64, angles[q]);
            if self.static_detections.iter().any(|s| s.position_xy.distance(p) <= eps) {
                *v = 0.0;
            }
        }
        Ok(resid)
    }

    pub fn detect_in(&self, spectrum: &RangeAngleSpectrum) -> Vec<Detection> {
        let mut dets = extract_detections(spectrum, &self.cfg.detection, &self.cfg.scene.pose());
        let eps = self.cfg.detection.cluster_eps_m;
        dets.retain(|d| {
            self.static_detections
                .iter()
                .all(|s| s.position_xy.distance(d.position_xy) > eps)
        });
        dets
    }

    pub fn detect(&self, slices: &[Array2<C64>]) -> Result<Vec<Detection>> {
        Ok(self.detect_in(&self.spectrum(slices)?))
    }
}

/// Detection nearest `truth` within `gate_m`.
pub fn associate(dets: &[Detection], truth: Vec2, gate_m: f64) -> Option<&Detection> {
    dets.iter()
        .map(|d| (d.position_xy.distance(truth), d))
        .filter(|(e, _)| *e <= gate_m)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, d)| d)
}

pub fn ue_target(cfg: &ScenarioConfig, position: Vec2, velocity: Vec2) -> Target {
    Target {
        kind: TargetKind::Ue,
        position,
        velocity,
        rcs_m2: cfg.ue.rcs_m2,
    }
}

pub struct SensingOutcome {
    pub spectrum: RangeAngleSpectrum,
    pub detections: Vec<Detection>,
}

/// One sensing frame of the scene, with the UE at `sensing.ue_position` if set.
pub fn run_environment_sensing(cfg: &ScenarioConfig) -> Result<SensingOutcome> {
    let sim = EchoSimulator::new(cfg)?;
    let extra: Vec<Target> = cfg
        .sensing
        .ue_position
        .map(|p| ue_target(cfg, p, Vec2::default()))
        .into_iter()
        .collect();
    let slices = sim.beam_slices(&extra, streams::SENSE)?;
    let loc = Localizer::new(cfg, &sim, cfg.estimator, cfg.sensing.clutter, None)?;
    let spectrum = loc.spectrum(&slices)?;
    let detections = loc.detect_in(&spectrum);
    Ok(SensingOutcome { spectrum, detections })
}
