use std::time::Instant;

use log::{debug, info};

use super::config::ExperimentConfig;
use super::env::{build_environment, Environment, StepReport};
use super::metrics::{convergence_episode, EpisodeMetrics, MetricsAccumulator, RunSummary};
use super::seed::player_rng;
use crate::error::{Error, Result};
use crate::game::{interpolate_action, ActionValue, PerformanceMap, StateVector};
use crate::learners::{Decision, Player, TrainingSchedule};

/// Fraction of the final training potential that counts as converged.
const CONVERGENCE_FRACTION: f64 = 0.95;

/// One joint control step as seen by an observer.
#[derive(Debug, Clone)]
pub struct StepTrace<'a> {
    pub episode: usize,
    pub step: usize,
    pub states: &'a [StateVector],
    pub decisions: &'a [Decision],
    pub report: &'a StepReport,
}

pub struct TrainingOutcome {
    pub players: Vec<Player>,
    pub metrics: Vec<EpisodeMetrics>,
}

/// Everything a completed run produced.
pub struct RunArtifacts {
    pub config: ExperimentConfig,
    pub players: Vec<Player>,
    pub summary: RunSummary,
}

fn make_players(config: &ExperimentConfig, env: &dyn Environment) -> Result<Vec<Player>> {
    let grid = config.grid()?;
    if env.state_dim() != grid.dim() {
        return Err(Error::Dimension { expected: grid.dim(), got: env.state_dim() });
    }
    (0..env.players())
        .map(|i| Player::new(config.learner_for(i).clone(), grid, config.grid.gamma, player_rng(config.seed, i)))
        .collect()
}

pub fn run_training(config: &ExperimentConfig) -> Result<TrainingOutcome> {
    run_training_traced(config, |_| {})
}

/// Training loop with a per-step observer. Every step all players observe the same
/// pre-step state, choose simultaneously, then learn from their own utility.
pub fn run_training_traced<F>(config: &ExperimentConfig, mut observer: F) -> Result<TrainingOutcome>
where
    F: FnMut(&StepTrace<'_>),
{
    config.validate()?;
    let mut env = build_environment(config)?;
    let mut players = make_players(config, env.as_ref())?;
    let schedules = players
        .iter()
        .map(|p| TrainingSchedule::new(config.episodes, p.config().kickoff_episodes))
        .collect::<Result<Vec<_>>>()?;
    let steps = config.steps_per_episode();
    let n = players.len();
    let mut metrics = Vec::with_capacity(config.episodes);
    let mut states = Vec::with_capacity(n);
    let mut decisions = Vec::with_capacity(n);
    let mut actions = Vec::with_capacity(n);

    for episode in 0..config.episodes {
        let started = Instant::now();
        env.reset();
        players.iter_mut().for_each(Player::begin_episode);
        let phases: Vec<_> = schedules.iter().map(|s| s.phase(episode)).collect();
        let mut acc = MetricsAccumulator::default();
        for step in 0..steps {
            states.clear();
            decisions.clear();
            actions.clear();
            for (i, p) in players.iter_mut().enumerate() {
                let state = env.observe(i);
                let mode = p.draw_mode(phases[i]);
                let d = p.select_action(&state, mode)?;
                states.push(state);
                actions.push(d.action);
                decisions.push(d);
            }
            let report = env.step(&actions)?;
            for ((p, d), u) in players.iter_mut().zip(&decisions).zip(&report.utilities) {
                p.record(d, *u)?;
            }
            acc.add(&report);
            observer(&StepTrace { episode, step, states: &states, decisions: &decisions, report: &report });
        }
        let wall = if config.record_wall_clock { started.elapsed().as_secs_f64() } else { 0.0 };
        let m = acc.finish(episode, config.episode_duration, wall);
        debug!(
            "episode {episode}: phase {:?} potential {:.4} power {:.4} overflow {:.5} shortfall {:.5}",
            phases[0], m.potential, m.power_kws, m.overflow_lps, m.demand_shortfall_lps
        );
        metrics.push(m);
    }
    Ok(TrainingOutcome { players, metrics })
}

/// One pure-exploitation episode: no noise, no map updates.
pub fn run_test(config: &ExperimentConfig, policies: &[&dyn PerformanceMap]) -> Result<EpisodeMetrics> {
    config.validate()?;
    let mut env = build_environment(config)?;
    if policies.len() != env.players() {
        return Err(Error::Dimension { expected: env.players(), got: policies.len() });
    }
    if policies.iter().any(|p| p.visited_count() == 0) {
        return Err(Error::PolicyNotReady);
    }
    let started = Instant::now();
    env.reset();
    let mut acc = MetricsAccumulator::default();
    let mut actions: Vec<ActionValue> = Vec::with_capacity(policies.len());
    for _ in 0..config.steps_per_episode() {
        actions.clear();
        for (i, p) in policies.iter().enumerate() {
            actions.push(interpolate_action(*p, &env.observe(i), config.grid.gamma)?);
        }
        acc.add(&env.step(&actions)?);
    }
    let wall = if config.record_wall_clock { started.elapsed().as_secs_f64() } else { 0.0 };
    Ok(acc.finish(config.episodes, config.episode_duration, wall))
}

/// Training followed by the test episode.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunArtifacts> {
    let TrainingOutcome { players, metrics } = run_training(config)?;
    let maps: Vec<&dyn PerformanceMap> = players.iter().map(|p| p.map().as_map()).collect();
    let test = run_test(config, &maps)?;
    let potentials: Vec<f64> = metrics.iter().map(|m| m.potential).collect();
    let summary = RunSummary {
        method: config.method(),
        kickoff_episodes: config.learner.kickoff_episodes,
        episodes: config.episodes,
        steps_per_episode: config.steps_per_episode(),
        training_interactions: config.training_interactions(),
        training_seconds: config.episodes as f64 * config.episode_duration,
        convergence_episode: convergence_episode(&potentials, CONVERGENCE_FRACTION),
        training: metrics,
        test,
    };
    info!(
        "{} (kick-off {}): test potential {:.4}, power {:.4} kW, overflow {:.5} L/s, shortfall {:.5} L/s",
        summary.method,
        summary.kickoff_episodes,
        test.potential,
        test.power_kws,
        test.overflow_lps,
        test.demand_shortfall_lps
    );
    Ok(RunArtifacts { config: config.clone(), players, summary })
}
