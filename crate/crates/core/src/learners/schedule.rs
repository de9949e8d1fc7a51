use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Episode budget split into kick-off episodes followed by learning episodes whose
/// exploration rate decays linearly from 1 to 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrainingSchedule {
    total_episodes: usize,
    kickoff_episodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EpisodePhase {
    /// Uniform random actions feeding the sample stacks.
    RandomKickoff,
    /// Pure exploration (gradient steps for gradient learners).
    Gradient,
    /// Per-step choice between exploration (probability `exploration_rate`) and exploitation.
    ExploitMix { exploration_rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StepMode {
    Kickoff,
    Explore,
    Exploit,
}

impl TrainingSchedule {
    pub fn new(total_episodes: usize, kickoff_episodes: usize) -> Result<Self> {
        if total_episodes == 0 {
            return Err(Error::config("training needs at least one episode"));
        }
        if kickoff_episodes > total_episodes {
            return Err(Error::config(format!(
                "kick-off episodes ({kickoff_episodes}) exceed the episode budget ({total_episodes})"
            )));
        }
        Ok(Self { total_episodes, kickoff_episodes })
    }

    pub fn total_episodes(&self) -> usize {
        self.total_episodes
    }

    pub fn kickoff_episodes(&self) -> usize {
        self.kickoff_episodes
    }

    pub fn exploration_rate(&self, episode: usize) -> f64 {
        if episode < self.kickoff_episodes {
            return 1.0;
        }
        let span = self.total_episodes.saturating_sub(1 + self.kickoff_episodes);
        if span == 0 {
            return 1.0;
        }
        let progress = (episode - self.kickoff_episodes) as f64 / span as f64;
        (1.0 - progress).clamp(0.0, 1.0)
    }

    pub fn phase(&self, episode: usize) -> EpisodePhase {
        if episode < self.kickoff_episodes {
            return EpisodePhase::RandomKickoff;
        }
        match self.exploration_rate(episode) {
            r if r >= 1.0 => EpisodePhase::Gradient,
            r => EpisodePhase::ExploitMix { exploration_rate: r },
        }
    }
}

impl EpisodePhase {
    pub fn draw_mode<R: Rng + ?Sized>(&self, rng: &mut R) -> StepMode {
        match *self {
            EpisodePhase::RandomKickoff => StepMode::Kickoff,
            EpisodePhase::Gradient => StepMode::Explore,
            EpisodePhase::ExploitMix { exploration_rate } => {
                if rng.random::<f64>() < exploration_rate {
                    StepMode::Explore
                } else {
                    StepMode::Exploit
                }
            }
        }
    }
}
