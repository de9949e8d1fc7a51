//! Closed-form reference games used to exercise the potential-game verifiers and the learners.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A game in strategic form extended with a state and a state transition rule.
pub trait StateBasedGame {
    fn players(&self) -> usize;
    fn state_dim(&self) -> usize;
    fn utility(&self, player: usize, actions: &[f64], state: &[f64]) -> f64;
    fn potential(&self, actions: &[f64], state: &[f64]) -> f64;
    fn transition(&self, actions: &[f64], state: &[f64]) -> Vec<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TransitionRule {
    Identity,
    /// `s' = s + rate * (m - s)` with `m` the mean of `a_i - offset_i`.
    TowardMean {
        rate: f64,
    },
    /// Moves the state away from `m`; breaks the improvement condition.
    AwayFromMean {
        rate: f64,
    },
}

/// Exact potential game on a shared scalar state `s` in `[0, 1]`:
/// `phi(a, s) = -sum_i (a_i - s - offset_i)^2` and every player's utility equals `phi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceGame {
    pub offsets: Vec<f64>,
    pub rule: TransitionRule,
}

impl ReferenceGame {
    pub fn new(offsets: Vec<f64>, rule: TransitionRule) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::config("reference game needs at least one player"));
        }
        if offsets.iter().any(|o| !o.is_finite()) {
            return Err(Error::config("reference game offsets must be finite"));
        }
        if let TransitionRule::TowardMean { rate } | TransitionRule::AwayFromMean { rate } = rule {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::config(format!("transition rate {rate} outside [0, 1]")));
            }
        }
        Ok(Self { offsets, rule })
    }

    /// Target action of `player` at scalar state `s`.
    pub fn target(&self, player: usize, s: f64) -> f64 {
        s + self.offsets[player]
    }

    fn deviation_mean(&self, actions: &[f64]) -> f64 {
        actions.iter().zip(&self.offsets).map(|(a, o)| a - o).sum::<f64>() / actions.len() as f64
    }
}

impl StateBasedGame for ReferenceGame {
    fn players(&self) -> usize {
        self.offsets.len()
    }

    fn state_dim(&self) -> usize {
        1
    }

    fn utility(&self, _player: usize, actions: &[f64], state: &[f64]) -> f64 {
        self.potential(actions, state)
    }

    fn potential(&self, actions: &[f64], state: &[f64]) -> f64 {
        let s = state[0];
        -actions
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let d = a - self.target(i, s);
                d * d
            })
            .sum::<f64>()
    }

    fn transition(&self, actions: &[f64], state: &[f64]) -> Vec<f64> {
        let s = state[0];
        let m = self.deviation_mean(actions);
        let next = match self.rule {
            TransitionRule::Identity => s,
            TransitionRule::TowardMean { rate } => s + rate * (m - s),
            TransitionRule::AwayFromMean { rate } => s - rate * (m - s),
        };
        vec![next.clamp(0.0, 1.0)]
    }
}

/// Adds `coefficient * a_player^2` to one player's utility, leaving the potential intact.
#[derive(Debug, Clone)]
pub struct Perturbed<G> {
    pub inner: G,
    pub player: usize,
    pub coefficient: f64,
}

impl<G: StateBasedGame> StateBasedGame for Perturbed<G> {
    fn players(&self) -> usize {
        self.inner.players()
    }
    fn state_dim(&self) -> usize {
        self.inner.state_dim()
    }
    fn utility(&self, player: usize, actions: &[f64], state: &[f64]) -> f64 {
        let base = self.inner.utility(player, actions, state);
        if player == self.player {
            base + self.coefficient * actions[player] * actions[player]
        } else {
            base
        }
    }
    fn potential(&self, actions: &[f64], state: &[f64]) -> f64 {
        self.inner.potential(actions, state)
    }
    fn transition(&self, actions: &[f64], state: &[f64]) -> Vec<f64> {
        self.inner.transition(actions, state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimum_at_targets() {
        let g = ReferenceGame::new(vec![0.1, -0.2], TransitionRule::Identity).unwrap();
        let s = [0.5];
        assert_eq!(g.potential(&[0.6, 0.3], &s), 0.0);
        assert!(g.potential(&[0.7, 0.3], &s) < 0.0);
    }

    #[test]
    fn toward_mean_moves_state() {
        let g = ReferenceGame::new(vec![0.0], TransitionRule::TowardMean { rate: 0.5 }).unwrap();
        assert!((g.transition(&[1.0], &[0.2])[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_rate() {
        assert!(ReferenceGame::new(vec![0.0], TransitionRule::TowardMean { rate: 1.5 }).is_err());
        assert!(ReferenceGame::new(vec![], TransitionRule::Identity).is_err());
    }
}
