use serde::{Deserialize, Serialize};

use super::estimators::GradientVariant;
use super::noise::OuParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearnerKind {
    BestResponse,
    Grad1,
    Grad2,
    Grad3,
}

impl LearnerKind {
    pub fn gradient_variant(self) -> Option<GradientVariant> {
        match self {
            LearnerKind::BestResponse => None,
            LearnerKind::Grad1 => Some(GradientVariant::Basic),
            LearnerKind::Grad2 => Some(GradientVariant::Momentum),
            LearnerKind::Grad3 => Some(GradientVariant::Polynomial),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LearnerKind::BestResponse => "best-response",
            LearnerKind::Grad1 => "grad1",
            LearnerKind::Grad2 => "grad2",
            LearnerKind::Grad3 => "grad3",
        }
    }
}

impl std::str::FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "best-response" => Ok(LearnerKind::BestResponse),
            "grad1" => Ok(LearnerKind::Grad1),
            "grad2" => Ok(LearnerKind::Grad2),
            "grad3" => Ok(LearnerKind::Grad3),
            other => Err(Error::config(format!("unknown learner {other:?}"))),
        }
    }
}

impl std::fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub enabled: bool,
    pub theta: f64,
    pub mu: f64,
    pub sigma: f64,
    pub clip: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        let p = OuParams::default();
        Self { enabled: false, theta: p.theta, mu: p.mu, sigma: p.sigma, clip: p.clip }
    }
}

impl NoiseConfig {
    pub fn params(&self) -> OuParams {
        OuParams { theta: self.theta, mu: self.mu, sigma: self.sigma, clip: self.clip }
    }
}

/// Hyperparameters of one player's learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerConfig {
    pub variant: LearnerKind,
    /// Learning rate of the gradient step.
    pub alpha: f64,
    /// Momentum weight (momentum variant only).
    pub beta: f64,
    pub kickoff_episodes: usize,
    /// Actions closer than this count as equal when forming divided differences.
    pub epsilon_eq: f64,
    /// Sliding-window depth of the per-cell sample stack.
    pub stack_depth: usize,
    pub gradient_clip: f64,
    /// Whether exploitation steps taken during training also update the map.
    pub update_on_exploit: bool,
    pub noise: NoiseConfig,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            variant: LearnerKind::BestResponse,
            alpha: 1.0,
            beta: 0.4,
            kickoff_episodes: 0,
            epsilon_eq: 1e-8,
            stack_depth: 8,
            gradient_clip: 1e3,
            update_on_exploit: true,
            noise: NoiseConfig::default(),
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::config(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(Error::config(format!("beta must lie in [0, 1), got {}", self.beta)));
        }
        if !(self.epsilon_eq.is_finite() && self.epsilon_eq > 0.0) {
            return Err(Error::config("epsilon_eq must be > 0"));
        }
        if self.stack_depth < 2 {
            return Err(Error::config("stack_depth must be >= 2"));
        }
        if !(self.gradient_clip.is_finite() && self.gradient_clip > 0.0) {
            return Err(Error::config("gradient_clip must be > 0"));
        }
        if self.variant == LearnerKind::BestResponse && self.kickoff_episodes > 0 {
            return Err(Error::config("kick-off episodes only apply to gradient learners"));
        }
        if self.noise.enabled {
            super::noise::OuNoise::new(self.noise.params())?;
        }
        Ok(())
    }
}
