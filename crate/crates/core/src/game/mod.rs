//! Core SbPG abstractions: states, actions, support grids, performance maps,
//! global interpolation and the sampled potential-game verifiers.

mod grid;
mod interp;
mod maps;
mod reference;
mod state;
mod verify;

pub use grid::{CellIndex, SupportGrid};
pub use interp::{interpolate_action, interpolation_weights};
pub use maps::{
    read_map_csv, write_map_csv, BestResponseCell, BestResponseMap, GradientMap, MapRecord, PerformanceMap, Sample,
    StoredPolicy,
};
pub use reference::{Perturbed, ReferenceGame, StateBasedGame, TransitionRule};
pub use state::{ActionValue, StateVector};
pub use verify::{
    potential_residual, verify_potential_condition, verify_state_transition_condition, PotentialReport,
    TransitionReport,
};
