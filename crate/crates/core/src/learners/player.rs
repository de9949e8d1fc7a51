use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::LearnerConfig;
use super::estimators::{
    clamp_gradient, gradient_action_update, gradient_basic, gradient_polynomial, GradientVariant, MomentumState,
};
use super::noise::{explore_random, OuNoise};
use super::schedule::{EpisodePhase, StepMode};
use crate::error::{Error, Result};
use crate::game::{
    interpolate_action, ActionValue, BestResponseMap, CellIndex, GradientMap, PerformanceMap, StateVector, SupportGrid,
};

#[derive(Debug, Clone)]
pub enum PlayerMap {
    BestResponse(BestResponseMap),
    Gradient(GradientMap),
}

impl PlayerMap {
    pub fn as_map(&self) -> &dyn PerformanceMap {
        match self {
            PlayerMap::BestResponse(m) => m,
            PlayerMap::Gradient(m) => m,
        }
    }
}

/// Action chosen at one control step, remembered until its utility is observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub cell: CellIndex,
    pub action: ActionValue,
    pub mode: StepMode,
}

/// A single self-learning player: its performance map, estimator state, exploration
/// noise and private random stream.
#[derive(Debug, Clone)]
pub struct Player {
    config: LearnerConfig,
    gamma: f64,
    map: PlayerMap,
    momentum: Option<MomentumState>,
    noise: Option<OuNoise>,
    rng: ChaCha8Rng,
}

impl Player {
    pub fn new(config: LearnerConfig, grid: SupportGrid, gamma: f64, rng: ChaCha8Rng) -> Result<Self> {
        config.validate()?;
        let variant = config.variant.gradient_variant();
        let map = match variant {
            None => PlayerMap::BestResponse(BestResponseMap::new(grid)),
            Some(_) => PlayerMap::Gradient(GradientMap::new(grid, config.stack_depth)?),
        };
        let momentum =
            (variant == Some(GradientVariant::Momentum)).then(|| MomentumState::new(config.beta, grid.cell_count()));
        let noise = match (variant, config.noise.enabled) {
            (Some(_), true) => Some(OuNoise::new(config.noise.params())?),
            _ => None,
        };
        Ok(Self { config, gamma, map, momentum, noise, rng })
    }

    /// Convenience constructor seeding the private stream directly.
    pub fn seeded(config: LearnerConfig, grid: SupportGrid, gamma: f64, seed: u64) -> Result<Self> {
        Self::new(config, grid, gamma, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn map(&self) -> &PlayerMap {
        &self.map
    }

    pub fn grid(&self) -> &SupportGrid {
        self.map.as_map().grid()
    }

    /// Called at the start of every episode.
    pub fn begin_episode(&mut self) {
        if let Some(n) = self.noise.as_mut() {
            n.reset();
        }
    }

    pub fn draw_mode(&mut self, phase: EpisodePhase) -> StepMode {
        let mode = phase.draw_mode(&mut self.rng);
        // exploitation needs at least one visited cell
        if mode == StepMode::Exploit && self.map.as_map().visited_count() == 0 {
            StepMode::Explore
        } else {
            mode
        }
    }

    pub fn select_action(&mut self, state: &StateVector, mode: StepMode) -> Result<Decision> {
        let cell = self.grid().locate_cell(state)?;
        let action = match mode {
            StepMode::Exploit => interpolate_action(self.map.as_map(), state, self.gamma)?,
            StepMode::Kickoff => explore_random(&mut self.rng),
            StepMode::Explore => match &self.map {
                PlayerMap::BestResponse(_) => explore_random(&mut self.rng),
                PlayerMap::Gradient(_) => self.gradient_step(cell)?,
            },
        };
        Ok(Decision { cell, action, mode })
    }

    /// Estimated utility gradient of `cell` according to the configured variant,
    /// updating the momentum state where applicable.
    pub fn estimate_gradient(&mut self, cell: CellIndex) -> Result<f64> {
        let PlayerMap::Gradient(map) = &self.map else {
            return Err(Error::config("best-response players do not estimate gradients"));
        };
        let stack = map.stack(cell);
        let limit = self.config.gradient_clip;
        let eps = self.config.epsilon_eq;
        if stack.len() < 2 {
            return Ok(0.0);
        }
        let n = stack.len();
        let raw = match self.config.variant.gradient_variant() {
            Some(GradientVariant::Polynomial) => gradient_polynomial(stack, eps),
            _ => gradient_basic(stack[n - 2], stack[n - 1], eps),
        };
        let raw = clamp_gradient(raw, limit);
        Ok(match self.momentum.as_mut() {
            Some(m) => m.update(cell, raw),
            None => raw,
        })
    }

    fn gradient_step(&mut self, cell: CellIndex) -> Result<ActionValue> {
        let grad = self.estimate_gradient(cell)?;
        let PlayerMap::Gradient(map) = &self.map else { unreachable!() };
        let current = map.latest(cell).action;
        let noise = match self.noise.as_mut() {
            Some(n) => n.step(&mut self.rng),
            None => 0.0,
        };
        gradient_action_update(current, grad, self.config.alpha, noise)
    }

    /// Feeds the observed utility of `decision` back into the map.
    pub fn record(&mut self, decision: &Decision, utility: f64) -> Result<()> {
        if decision.mode == StepMode::Exploit && !self.config.update_on_exploit {
            return Ok(());
        }
        match &mut self.map {
            PlayerMap::BestResponse(m) => {
                m.update(decision.cell, decision.action, utility)?;
            }
            PlayerMap::Gradient(m) => match decision.mode {
                StepMode::Kickoff => m.push_kickoff(decision.cell, decision.action, utility)?,
                _ => m.push(decision.cell, decision.action, utility)?,
            },
        }
        Ok(())
    }

    /// Exploitation action with no side effects.
    pub fn exploit(&self, state: &StateVector) -> Result<ActionValue> {
        interpolate_action(self.map.as_map(), state, self.gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Sample;
    use crate::learners::LearnerKind;

    fn grid() -> SupportGrid {
        SupportGrid::new(5, 2).unwrap()
    }

    fn state() -> StateVector {
        StateVector::new(vec![0.5, 0.5]).unwrap()
    }

    fn gradient_player(kind: LearnerKind) -> Player {
        let cfg = LearnerConfig { variant: kind, alpha: 0.5, ..LearnerConfig::default() };
        Player::seeded(cfg, grid(), 0.01, 1).unwrap()
    }

    #[test]
    fn fresh_cell_starts_from_pseudo_sample() {
        let mut p = gradient_player(LearnerKind::Grad1);
        let d = p.select_action(&state(), StepMode::Explore).unwrap();
        assert_eq!(d.action.get(), 0.0);
        p.record(&d, 2.0).unwrap();
        let PlayerMap::Gradient(m) = p.map() else { panic!() };
        assert_eq!(m.stack(d.cell), &[Sample::PSEUDO, Sample::new(0.0, 2.0)]);
        // equal actions: utility difference 2.0, step 0.5 * 2.0
        let d2 = p.select_action(&state(), StepMode::Explore).unwrap();
        assert!((d2.action.get() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exploit_on_single_cell() {
        let mut p = Player::seeded(LearnerConfig::default(), grid(), 0.01, 3).unwrap();
        assert!(matches!(p.select_action(&state(), StepMode::Exploit), Err(Error::PolicyNotReady)));
        let d = Decision { cell: CellIndex(0), action: ActionValue::new(0.42).unwrap(), mode: StepMode::Explore };
        p.record(&d, 1.0).unwrap();
        for s in [[0.9, 0.1], [0.5, 0.5]] {
            let st = StateVector::new(s.to_vec()).unwrap();
            assert!((p.select_action(&st, StepMode::Exploit).unwrap().action.get() - 0.42).abs() < 1e-15);
        }
    }

    #[test]
    fn momentum_player_smooths() {
        let mut p = gradient_player(LearnerKind::Grad2);
        let d = p.select_action(&state(), StepMode::Explore).unwrap();
        p.record(&d, 2.0).unwrap();
        // raw = 2.0, momentum = 0.6 * 2.0
        assert!((p.estimate_gradient(d.cell).unwrap() - 1.2).abs() < 1e-12);
    }

    #[test]
    fn best_response_rejects_gradient_queries() {
        let mut p = Player::seeded(LearnerConfig::default(), grid(), 0.01, 3).unwrap();
        assert!(p.estimate_gradient(CellIndex(0)).is_err());
    }

    #[test]
    fn draw_mode_falls_back_to_exploration_on_empty_map() {
        let mut p = gradient_player(LearnerKind::Grad1);
        let phase = EpisodePhase::ExploitMix { exploration_rate: 0.0 };
        assert_eq!(p.draw_mode(phase), StepMode::Explore);
    }
}
