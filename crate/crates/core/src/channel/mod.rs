//! Planar scene geometry, propagation paths and observation synthesis.

mod noise;
mod paths;
mod reference;
mod scene;
mod synth;

pub use noise::{add_awgn, NoiseConfig, NoiseSpec};
pub use paths::{compute_paths, trace_rays, PathParams, Ray};
pub use reference::{time_domain_reference_synthesis, TimeDomainReference};
pub use scene::{Obstacle, Reflector, RotationSense, Scene, Target, TargetKind};
pub use synth::{
    downlink_observation, downlink_reference_power, echo_gain, echo_reference_power, monostatic_echo_matrix,
    ChannelObservation, EchoPath, ObservationKind,
};
