//! End-to-end scenarios: environment sensing, map construction and beam
//! alignment along a trajectory.

mod alignment;
mod config;
mod construction;
mod geometry;
mod logs;
mod sensing;

pub use alignment::{
    run_beam_alignment_eval, AlignMethod, AlignmentOutcome, AlignmentSummary, MethodSummary, RunRecord,
};
pub use config::{
    load_config, parse_config, resolved_config_json, room_scene, CkmConfig, ClutterMode, LocalizationConfig,
    PeriodogramConfig, ScenarioConfig, SensingConfig, TrajectoryConfig, UeConfig,
};
pub use construction::{run_ckm_construction, CellRecord, ConstructionOutcome, PositionSource};
pub use geometry::{cell_occupied, location_based_beam, los_blocked, sample_trajectory, TrajectoryPoint};
pub use logs::{construction_log_csv, parse_run_log, run_log_csv, CONSTRUCTION_LOG_HEADER, RUN_LOG_HEADER};
pub use sensing::{associate, run_environment_sensing, ue_target, EchoSimulator, Localizer, SensingOutcome};
