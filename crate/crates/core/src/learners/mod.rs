//! Training policies: best-response random exploration and gradient ascent with
//! divided-difference gradient estimates, OU exploration noise and kick-off scheduling.

mod config;
mod estimators;
mod noise;
mod player;
mod schedule;

pub use config::{LearnerConfig, LearnerKind, NoiseConfig};
pub use estimators::{
    clamp_gradient, divided_difference, gradient_action_update, gradient_basic, gradient_polynomial, GradientVariant,
    MomentumState,
};
pub use noise::{explore_random, OuNoise, OuParams};
pub use player::{Decision, Player, PlayerMap};
pub use schedule::{EpisodePhase, StepMode, TrainingSchedule};
