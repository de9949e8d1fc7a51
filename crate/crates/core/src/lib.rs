//! State-based potential games (SbPGs) for self-learning distributed production systems.
//!
//! The crate is split into four layers:
//!
//! - [`game`]: state and action types, support grids, performance maps, global
//!   interpolation and sampled verifiers for the potential-game conditions.
//! - [`learners`]: best-response and gradient-ascent players, divided-difference
//!   gradient estimators, Ornstein-Uhlenbeck exploration noise and the kick-off schedule.
//! - [`plant`]: a continuous-flow bulk-good plant (silos, hoppers, actuators, demand sink)
//!   together with its multi-objective player utility.
//! - [`harness`]: experiment configuration, training and test loops, metrics, sweeps
//!   and result export.

pub mod error;
pub mod game;
pub mod harness;
pub mod learners;
pub mod plant;

pub use error::{Error, Result};
