//! Continuous-flow simulation of a modular bulk-good production chain and the
//! per-player multi-objective utility.

mod config;
mod sim;
mod utility;

pub use config::{ActuatorSpec, BufferSpec, PenaltyShape, PlantConfig, UtilityWeights, BGLP_DEFAULT};
pub use sim::{Plant, StepOutcome};
pub use utility::{potential_value, utility, UtilityTerms};
