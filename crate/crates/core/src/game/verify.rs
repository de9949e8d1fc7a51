//! Sampled checks of the two state-based potential game conditions: unilateral utility
//! differences equal potential differences, and transitions never lower the potential.

use rand::Rng;
use serde::Serialize;

use super::reference::StateBasedGame;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialReport {
    pub passed: bool,
    pub samples: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionReport {
    pub passed: bool,
    pub samples: usize,
    pub violations: usize,
    /// Largest observed decrease `phi(a, s) - phi(a, s')`, zero if none.
    pub worst_drop: f64,
}

/// `|(u_i(a) - u_i(a'_i, a_-i)) - (phi(a) - phi(a'_i, a_-i))|` at one sample.
pub fn potential_residual<G: StateBasedGame + ?Sized>(
    game: &G,
    player: usize,
    actions: &[f64],
    deviation: f64,
    state: &[f64],
) -> f64 {
    let mut deviated = actions.to_vec();
    deviated[player] = deviation;
    let du = game.utility(player, actions, state) - game.utility(player, &deviated, state);
    let dphi = game.potential(actions, state) - game.potential(&deviated, state);
    (du - dphi).abs()
}

pub fn verify_potential_condition<G, R>(game: &G, samples: usize, tolerance: f64, rng: &mut R) -> PotentialReport
where
    G: StateBasedGame + ?Sized,
    R: Rng + ?Sized,
{
    let n = game.players();
    let mut actions = vec![0.0; n];
    let mut state = vec![0.0; game.state_dim()];
    let mut max_residual: f64 = 0.0;
    for _ in 0..samples {
        let player = rng.random_range(0..n);
        actions.iter_mut().for_each(|a| *a = rng.random::<f64>());
        state.iter_mut().for_each(|s| *s = rng.random::<f64>());
        let deviation = rng.random::<f64>();
        max_residual = max_residual.max(potential_residual(game, player, &actions, deviation, &state));
    }
    PotentialReport { passed: max_residual <= tolerance, samples, max_residual }
}

pub fn verify_state_transition_condition<G, R>(
    game: &G,
    samples: usize,
    tolerance: f64,
    rng: &mut R,
) -> TransitionReport
where
    G: StateBasedGame + ?Sized,
    R: Rng + ?Sized,
{
    let mut actions = vec![0.0; game.players()];
    let mut state = vec![0.0; game.state_dim()];
    let mut violations = 0;
    let mut worst_drop: f64 = 0.0;
    for _ in 0..samples {
        actions.iter_mut().for_each(|a| *a = rng.random::<f64>());
        state.iter_mut().for_each(|s| *s = rng.random::<f64>());
        let next = game.transition(&actions, &state);
        let drop = game.potential(&actions, &state) - game.potential(&actions, &next);
        if drop > tolerance {
            violations += 1;
        }
        worst_drop = worst_drop.max(drop);
    }
    TransitionReport { passed: violations == 0, samples, violations, worst_drop }
}
