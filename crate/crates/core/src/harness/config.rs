use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{ReferenceGame, SupportGrid, TransitionRule};
use crate::learners::LearnerConfig;
use crate::plant::PlantConfig;

/// A plant definition given by built-in name / file path, or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlantRef {
    Named(String),
    Inline(PlantConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvironmentConfig {
    Plant {
        plant: PlantRef,
    },
    /// Closed-form exact potential game on a shared scalar state.
    Reference {
        offsets: Vec<f64>,
        rule: TransitionRule,
        initial_state: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Support points per state dimension.
    pub resolution: usize,
    /// Interpolation smoothing.
    pub gamma: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { resolution: 40, gamma: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerOverride {
    pub player: usize,
    pub learner: LearnerConfig,
}

fn default_episodes() -> usize {
    20
}
fn default_episode_duration() -> f64 {
    10_000.0
}
fn default_cycle_time() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_episodes")]
    pub episodes: usize,
    /// Seconds per episode.
    #[serde(default = "default_episode_duration")]
    pub episode_duration: f64,
    /// Seconds between two player decisions.
    #[serde(default = "default_cycle_time")]
    pub cycle_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Wall-clock timings are written as zero unless enabled, keeping exports reproducible.
    #[serde(default)]
    pub record_wall_clock: bool,
    pub environment: EnvironmentConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub learner: LearnerConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<PlayerOverride>,
}

impl ExperimentConfig {
    /// Full-scale protocol (20 episodes of 10 000 s) on the default plant with the given learner.
    pub fn bglp(learner: LearnerConfig, seed: u64) -> Self {
        Self {
            seed,
            episodes: default_episodes(),
            episode_duration: default_episode_duration(),
            cycle_time: default_cycle_time(),
            output_dir: None,
            record_wall_clock: false,
            environment: EnvironmentConfig::Plant { plant: PlantRef::Inline(PlantConfig::bglp_default()) },
            grid: GridConfig::default(),
            learner,
            overrides: Vec::new(),
        }
    }

    pub fn from_toml(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.resolve(base)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read { path: path.into(), source })?;
        Self::from_toml(&text, path.parent())
    }

    /// Inlines referenced plant files so the config is self-contained.
    pub fn resolve(&mut self, base: Option<&Path>) -> Result<()> {
        if let EnvironmentConfig::Plant { plant } = &mut self.environment {
            match plant {
                PlantRef::Named(name) => *plant = PlantRef::Inline(PlantConfig::resolve(name, base)?),
                PlantRef::Inline(p) => p.normalize()?,
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn steps_per_episode(&self) -> usize {
        (self.episode_duration / self.cycle_time).round() as usize
    }

    pub fn training_interactions(&self) -> usize {
        self.episodes * self.steps_per_episode()
    }

    pub fn grid(&self) -> Result<SupportGrid> {
        SupportGrid::new(self.grid.resolution, self.state_dim())
    }

    pub fn players(&self) -> usize {
        match &self.environment {
            EnvironmentConfig::Plant { plant: PlantRef::Inline(p) } => p.actuators.len(),
            EnvironmentConfig::Plant { plant: PlantRef::Named(_) } => 0,
            EnvironmentConfig::Reference { offsets, .. } => offsets.len(),
        }
    }

    pub fn state_dim(&self) -> usize {
        match &self.environment {
            EnvironmentConfig::Plant { .. } => 2,
            EnvironmentConfig::Reference { .. } => 1,
        }
    }

    pub fn plant(&self) -> Option<&PlantConfig> {
        match &self.environment {
            EnvironmentConfig::Plant { plant: PlantRef::Inline(p) } => Some(p),
            _ => None,
        }
    }

    pub fn reference_game(&self) -> Option<Result<ReferenceGame>> {
        match &self.environment {
            EnvironmentConfig::Reference { offsets, rule, .. } => Some(ReferenceGame::new(offsets.clone(), *rule)),
            _ => None,
        }
    }

    pub fn learner_for(&self, player: usize) -> &LearnerConfig {
        self.overrides.iter().rev().find(|o| o.player == player).map(|o| &o.learner).unwrap_or(&self.learner)
    }

    /// Label used in comparison tables, e.g. `grad2` or `best-response`.
    pub fn method(&self) -> String {
        self.learner.variant.to_string()
    }

    pub fn validate(&self) -> Result<()> {
        if self.episodes == 0 {
            return Err(Error::config("episodes must be >= 1"));
        }
        if !(self.cycle_time.is_finite() && self.cycle_time > 0.0) {
            return Err(Error::config("cycle_time must be > 0"));
        }
        if !(self.episode_duration.is_finite() && self.episode_duration >= self.cycle_time) {
            return Err(Error::config("episode_duration must be >= cycle_time"));
        }
        let ratio = self.episode_duration / self.cycle_time;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return Err(Error::config(format!(
                "episode_duration {} is not divisible by cycle_time {}",
                self.episode_duration, self.cycle_time
            )));
        }
        if !(self.grid.gamma.is_finite() && self.grid.gamma >= 0.0) {
            return Err(Error::config("grid.gamma must be >= 0"));
        }
        match &self.environment {
            EnvironmentConfig::Plant { plant: PlantRef::Named(n) } => {
                return Err(Error::config(format!("plant {n:?} was not resolved")));
            }
            EnvironmentConfig::Plant { plant: PlantRef::Inline(p) } => {
                let steps = self.cycle_time / p.dt;
                if (steps - steps.round()).abs() > 1e-9 * steps || steps.round() < 1.0 {
                    return Err(Error::config(format!(
                        "cycle_time {} is not a multiple of the plant dt {}",
                        self.cycle_time, p.dt
                    )));
                }
            }
            EnvironmentConfig::Reference { initial_state, .. } => {
                self.reference_game().expect("reference environment")?;
                if !(0.0..=1.0).contains(initial_state) {
                    return Err(Error::config("initial_state must lie in [0, 1]"));
                }
            }
        }
        self.grid()?;
        let players = self.players();
        for o in &self.overrides {
            if o.player >= players {
                return Err(Error::config(format!("override for player {} but only {players} players", o.player)));
            }
        }
        for i in 0..players {
            let l = self.learner_for(i);
            l.validate()?;
            if l.kickoff_episodes > self.episodes {
                return Err(Error::config(format!(
                    "kickoff_episodes {} exceeds episodes {}",
                    l.kickoff_episodes, self.episodes
                )));
            }
        }
        Ok(())
    }
}
