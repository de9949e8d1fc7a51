use super::config::{EnvironmentConfig, ExperimentConfig, PlantRef};
use crate::error::{Error, Result};
use crate::game::{ActionValue, ReferenceGame, StateBasedGame, StateVector};
use crate::plant::{potential_value, Plant};

/// What one joint control step produced.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub utilities: Vec<f64>,
    pub potential: f64,
    /// Liters lost to overflow during the step.
    pub overflow: f64,
    /// Mean total power in kW over the step.
    pub power: f64,
    /// Liters of unmet demand during the step.
    pub shortfall: f64,
    /// Level changes + drawn + overflow - inflow, in liters.
    pub mass_residual: f64,
}

/// A multi-player environment stepped with simultaneous actions.
pub trait Environment {
    fn players(&self) -> usize;
    fn state_dim(&self) -> usize;
    /// Restores the deterministic episode start.
    fn reset(&mut self);
    fn observe(&self, player: usize) -> StateVector;
    fn step(&mut self, actions: &[ActionValue]) -> Result<StepReport>;
}

pub struct PlantEnvironment {
    plant: Plant,
    period: f64,
}

impl PlantEnvironment {
    pub fn new(plant: Plant, period: f64) -> Self {
        Self { plant, period }
    }

    pub fn plant(&self) -> &Plant {
        &self.plant
    }
}

impl Environment for PlantEnvironment {
    fn players(&self) -> usize {
        self.plant.players()
    }

    fn state_dim(&self) -> usize {
        2
    }

    fn reset(&mut self) {
        self.plant.reset();
    }

    fn observe(&self, player: usize) -> StateVector {
        self.plant.observe_state(player)
    }

    fn step(&mut self, actions: &[ActionValue]) -> Result<StepReport> {
        let before: f64 = self.plant.levels().iter().sum();
        let outcome = self.plant.advance(actions, self.period)?;
        let after: f64 = self.plant.levels().iter().sum();
        let utilities = self.plant.utilities(&outcome)?;
        Ok(StepReport {
            potential: potential_value(&utilities),
            utilities,
            overflow: outcome.total_overflow(),
            power: outcome.total_power(),
            shortfall: outcome.shortfall(),
            mass_residual: (after - before) + outcome.demand_drawn + outcome.total_overflow() - outcome.source_inflow,
        })
    }
}

pub struct ReferenceEnvironment {
    game: ReferenceGame,
    initial: f64,
    state: Vec<f64>,
}

impl ReferenceEnvironment {
    pub fn new(game: ReferenceGame, initial_state: f64) -> Self {
        Self { game, initial: initial_state, state: vec![initial_state] }
    }

    pub fn state(&self) -> f64 {
        self.state[0]
    }
}

impl Environment for ReferenceEnvironment {
    fn players(&self) -> usize {
        self.game.players()
    }

    fn state_dim(&self) -> usize {
        1
    }

    fn reset(&mut self) {
        self.state = vec![self.initial];
    }

    fn observe(&self, _player: usize) -> StateVector {
        StateVector::clamped(self.state.clone()).expect("reference state is finite")
    }

    fn step(&mut self, actions: &[ActionValue]) -> Result<StepReport> {
        if actions.len() != self.players() {
            return Err(Error::config(format!("expected {} actions, got {}", self.players(), actions.len())));
        }
        let a: Vec<f64> = actions.iter().map(|a| a.get()).collect();
        let utilities = (0..self.players()).map(|i| self.game.utility(i, &a, &self.state)).collect();
        let potential = self.game.potential(&a, &self.state);
        self.state = self.game.transition(&a, &self.state);
        Ok(StepReport { utilities, potential, overflow: 0.0, power: 0.0, shortfall: 0.0, mass_residual: 0.0 })
    }
}

pub fn build_environment(config: &ExperimentConfig) -> Result<Box<dyn Environment + Send>> {
    match &config.environment {
        EnvironmentConfig::Plant { plant: PlantRef::Inline(p) } => {
            Ok(Box::new(PlantEnvironment::new(Plant::new(p.clone())?, config.cycle_time)))
        }
        EnvironmentConfig::Plant { plant: PlantRef::Named(n) } => {
            Err(Error::config(format!("plant {n:?} was not resolved")))
        }
        EnvironmentConfig::Reference { offsets, rule, initial_state } => {
            Ok(Box::new(ReferenceEnvironment::new(ReferenceGame::new(offsets.clone(), *rule)?, *initial_state)))
        }
    }
}
