use crate::channel::{NoiseConfig, Obstacle, Reflector, RotationSense, Scene, Target, TargetKind};
use crate::ckm::CkmGrid;
use crate::dsp::{DetectionConfig, Estimator, EstimatorSettings, MusicConfig};
use crate::geom::Vec2;
use crate::par::ExecMode;
use crate::waveform::{build_sensing_frame, OfdmConfig, SensingFrameSpec};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UeConfig {
    pub rcs_m2: f64,
}

impl Default for UeConfig {
    fn default() -> Self {
        UeConfig { rcs_m2: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub waypoints: Vec<Vec2>,
    pub speed_mps: f64,
    /// One frame slot per period.
    pub sample_period_s: f64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        TrajectoryConfig {
            waypoints: vec![Vec2::new(0.0, 5.6), Vec2::new(6.4, 5.6)],
            speed_mps: 0.5,
            sample_period_s: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeriodogramConfig {
    /// `N_IDFT / N_sc`.
    pub oversampling: usize,
}

impl Default for PeriodogramConfig {
    fn default() -> Self {
        PeriodogramConfig { oversampling: 8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CkmConfig {
    /// Centre of cell (0, 0).
    pub origin_xy: Vec2,
    pub cell_size_m: f64,
    pub extent: [usize; 2],
    pub n_max: usize,
}

impl Default for CkmConfig {
    fn default() -> Self {
        CkmConfig {
            origin_xy: Vec2::new(0.0, 0.5),
            cell_size_m: 0.5,
            extent: [13, 12],
            n_max: 3,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClutterMode {
    /// Detect on the raw spectrum.
    #[default]
    None,
    /// Remove a static-scene map: subtracted for power-faithful estimators,
    /// matched at detection level for MUSIC.
    Subtract,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensingConfig {
    /// UE placed in the scene for a one-shot sensing run.
    pub ue_position: Option<Vec2>,
    pub clutter: ClutterMode,
}

impl Default for SensingConfig {
    fn default() -> Self {
        SensingConfig {
            ue_position: Some(Vec2::new(6.4, 5.6)),
            clutter: ClutterMode::None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizationConfig {
    pub clutter: ClutterMode,
    /// Static maps are scaled up by this much before subtraction, so that
    /// small estimator-induced shifts of static peaks do not survive.
    pub clutter_margin_db: f64,
    /// Beams whose periodogram residual is this far below the strongest
    /// residual skip the configured estimator; `None` estimates every beam.
    pub screen_margin_db: Option<f64>,
}

impl Default for LocalizationConfig {
    fn default() -> Self {
        LocalizationConfig {
            clutter: ClutterMode::Subtract,
            clutter_margin_db: 3.0,
            screen_margin_db: Some(30.0),
        }
    }
}

/// Complete description of a run; every field has a default except the scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scene: Scene,
    pub waveform: OfdmConfig,
    pub frame: SensingFrameSpec,
    pub ue: UeConfig,
    pub trajectory: TrajectoryConfig,
    /// ISAC frames per sensing frame during beam-alignment evaluation.
    pub sensing_interval_frames: usize,
    pub estimator: Estimator,
    pub music: MusicConfig,
    pub periodogram: PeriodogramConfig,
    pub detection: DetectionConfig,
    pub noise: NoiseConfig,
    pub ckm: CkmConfig,
    pub association_gate_m: f64,
    /// Also synthesize target echoes that bounce off reflectors.
    pub echo_via_reflectors: bool,
    pub sensing: SensingConfig,
    pub localization: LocalizationConfig,
    pub exec: ExecMode,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scene: Scene::default(),
            waveform: OfdmConfig::default(),
            frame: SensingFrameSpec::default(),
            ue: UeConfig::default(),
            trajectory: TrajectoryConfig::default(),
            sensing_interval_frames: 10,
            estimator: Estimator::Capon,
            music: MusicConfig::default(),
            periodogram: PeriodogramConfig::default(),
            detection: DetectionConfig::default(),
            noise: NoiseConfig::default(),
            ckm: CkmConfig::default(),
            association_gate_m: 1.0,
            echo_via_reflectors: false,
            sensing: SensingConfig::default(),
            localization: LocalizationConfig::default(),
            exec: ExecMode::Parallel,
        }
    }
}

/// The room of the prototype experiment: base station at (3.2, 0) facing +y,
/// a 1 m scatterer 3.2 m ahead that blocks the line of sight, and a 2 m
/// metal reflector at (7, 4) that provides the detour path.
pub fn room_scene() -> Scene {
    Scene {
        bs_position: Vec2::new(3.2, 0.0),
        bs_boresight: Vec2::new(0.0, 1.0),
        targets: vec![
            Target::stationary(TargetKind::StaticScatterer, Vec2::new(3.2, 3.2), 1.0),
            Target::stationary(TargetKind::StaticScatterer, Vec2::new(7.0, 4.0), 2.0),
        ],
        reflectors: vec![Reflector {
            center: Vec2::new(7.0, 4.0),
            width_m: 2.0,
            angle_deg: 80.0,
            angle_sense: RotationSense::Cw,
            reflection_coeff: C64::new(-0.9, 0.0),
        }],
        obstacles: vec![Obstacle {
            a: Vec2::new(2.7, 3.2),
            b: Vec2::new(3.7, 3.2),
            blockage_loss_db: 20.0,
        }],
    }
}

impl ScenarioConfig {
    pub fn room() -> Self {
        ScenarioConfig {
            scene: room_scene(),
            ..ScenarioConfig::default()
        }
    }

    pub fn n_idft(&self) -> usize {
        self.periodogram.oversampling * self.waveform.num_subcarriers
    }

    pub fn estimator_settings(&self, estimator: Estimator) -> EstimatorSettings {
        EstimatorSettings {
            estimator,
            music: self.music.clone(),
            n_idft: self.n_idft(),
            delta_f: self.waveform.subcarrier_spacing_hz,
            mode: self.exec,
        }
    }

    pub fn empty_grid(&self) -> Result<CkmGrid> {
        CkmGrid::new(
            self.ckm.origin_xy,
            self.ckm.cell_size_m,
            (self.ckm.extent[0], self.ckm.extent[1]),
            self.frame.num_beams,
            self.ckm.n_max,
        )
    }

    /// Checks every cross-field invariant, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        self.waveform.validate()?;
        let f = &self.frame;
        let fail = |path: &str, msg: String| Err(Error::config(path, msg));
        if f.num_beams == 0 {
            return fail("frame.num_beams", "must be at least 1".into());
        }
        if f.symbols_per_subframe == 0 {
            return fail("frame.symbols_per_subframe", "must be at least 1".into());
        }
        if f.num_beams * f.symbols_per_subframe > self.waveform.symbols_per_frame {
            return fail(
                "frame.num_beams",
                format!(
                    "{} beams x {} symbols exceed {} symbols per frame",
                    f.num_beams, f.symbols_per_subframe, self.waveform.symbols_per_frame
                ),
            );
        }
        if let Err(e) = build_sensing_frame(&self.waveform, f) {
            return fail("frame.zc_root", e.to_string());
        }
        if let Err((p, m)) = self.scene.check() {
            return fail(&format!("scene.{p}"), m);
        }
        if !(self.ue.rcs_m2 > 0.0) {
            return fail("ue.rcs_m2", "must be positive".into());
        }
        let t = &self.trajectory;
        if t.waypoints.is_empty() || t.waypoints.iter().any(|p| !p.is_finite()) {
            return fail("trajectory.waypoints", "need at least one finite point".into());
        }
        if !(t.speed_mps > 0.0) {
            return fail("trajectory.speed_mps", "must be positive".into());
        }
        if !(t.sample_period_s > 0.0) {
            return fail("trajectory.sample_period_s", "must be positive".into());
        }
        if self.sensing_interval_frames == 0 {
            return fail("sensing_interval_frames", "must be at least 1".into());
        }
        let m = &self.music;
        if crate::dsp::smoothing_length(self.waveform.num_subcarriers, m.smoothing_rho).is_err() {
            return fail("music.smoothing_rho", "window must satisfy 2 <= L <= N_sc".into());
        }
        let g = &m.delay_grid;
        if !(g.step_m > 0.0) || !(g.stop_m > g.start_m) || g.start_m < 0.0 {
            return fail("music.delay_grid", "need 0 <= start < stop and step > 0".into());
        }
        if !(m.diagonal_loading >= 0.0) {
            return fail("music.diagonal_loading", "must be non-negative".into());
        }
        if self.periodogram.oversampling == 0 {
            return fail("periodogram.oversampling", "must be at least 1".into());
        }
        let d = &self.detection;
        if !(d.threshold_db > 0.0) {
            return fail("detection.threshold_db", "must be positive".into());
        }
        if !(d.cluster_eps_m > 0.0) {
            return fail("detection.cluster_eps_m", "must be positive".into());
        }
        if d.min_points == 0 {
            return fail("detection.min_points", "must be at least 1".into());
        }
        if let Some(s) = self.noise.snr_db {
            if !s.is_finite() {
                return fail("noise.snr_db", "must be finite or null".into());
            }
        }
        let c = &self.ckm;
        if !(c.cell_size_m > 0.0) {
            return fail("ckm.cell_size_m", "must be positive".into());
        }
        if c.extent[0] == 0 || c.extent[1] == 0 {
            return fail("ckm.extent", "must be nonzero".into());
        }
        if c.n_max == 0 || c.n_max > f.num_beams {
            return fail("ckm.n_max", format!("must lie in 1..={}", f.num_beams));
        }
        if !c.origin_xy.is_finite() {
            return fail("ckm.origin_xy", "must be finite".into());
        }
        if !(self.association_gate_m > 0.0) {
            return fail("association_gate_m", "must be positive".into());
        }
        if !(self.localization.clutter_margin_db >= 0.0) {
            return fail("localization.clutter_margin_db", "must be non-negative".into());
        }
        if let Some(s) = self.localization.screen_margin_db {
            if !(s > 0.0) {
                return fail("localization.screen_margin_db", "must be positive or null".into());
            }
        }
        Ok(())
    }
}

fn deserialize_config(v: Value) -> Result<ScenarioConfig> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        Error::config(
            if path == "." { String::new() } else { path },
            e.into_inner().to_string(),
        )
    })
}

fn set_dotted(root: &mut Value, key: &str, new: Value) -> Result<()> {
    let mut cur = root;
    for part in key.split('.') {
        cur = match cur {
            Value::Object(map) => map.get_mut(part),
            Value::Array(items) => part.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| Error::config(key, "unknown override key"))?;
    }
    *cur = new;
    Ok(())
}

/// Parses a JSON config, applies `key=value` overrides on dotted paths of
/// the defaults-resolved document, and validates the result.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<ScenarioConfig> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| Error::config(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    if doc.get("scene").is_none() {
        return Err(Error::config("scene", "missing required field"));
    }
    let mut cfg = deserialize_config(doc)?;
    if !overrides.is_empty() {
        let mut resolved = serde_json::to_value(&cfg).expect("config serializes");
        for (k, v) in overrides {
            let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.clone()));
            set_dotted(&mut resolved, k, value)?;
        }
        cfg = deserialize_config(resolved)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path, overrides: &[(String, String)]) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, overrides)
}

/// Pretty JSON of the fully resolved config; reloading it yields an equal config.
pub fn resolved_config_json(cfg: &ScenarioConfig) -> String {
    let mut s = serde_json::to_string_pretty(cfg).expect("config serializes");
    s.push('\n');
    s
}
