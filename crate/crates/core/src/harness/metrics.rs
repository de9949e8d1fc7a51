use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Per-episode averages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    pub episode: usize,
    /// Mean overflow in L/s.
    pub overflow_lps: f64,
    /// Mean total power in kW.
    pub power_kws: f64,
    /// Mean unmet demand in L/s.
    pub demand_shortfall_lps: f64,
    /// Mean potential per step.
    pub potential: f64,
    pub wall_clock_s: f64,
}

#[derive(Debug, Default)]
pub(crate) struct MetricsAccumulator {
    overflow: f64,
    power: f64,
    shortfall: f64,
    potential: f64,
    steps: usize,
}

impl MetricsAccumulator {
    pub(crate) fn add(&mut self, r: &super::env::StepReport) {
        self.overflow += r.overflow;
        self.power += r.power;
        self.shortfall += r.shortfall;
        self.potential += r.potential;
        self.steps += 1;
    }

    pub(crate) fn finish(self, episode: usize, duration: f64, wall_clock_s: f64) -> EpisodeMetrics {
        let n = self.steps.max(1) as f64;
        EpisodeMetrics {
            episode,
            overflow_lps: self.overflow / duration,
            power_kws: self.power / n,
            demand_shortfall_lps: self.shortfall / duration,
            potential: self.potential / n,
            wall_clock_s,
        }
    }
}

/// First episode whose mean potential reaches `fraction` of the final training
/// episode's potential (measured as `final - (1 - fraction) |final|`, so negative
/// potentials work too). Returns the series length if never reached.
pub fn convergence_episode(potentials: &[f64], fraction: f64) -> usize {
    let Some(&last) = potentials.last() else {
        return 0;
    };
    let threshold = last - (1.0 - fraction) * last.abs();
    potentials.iter().position(|&p| p >= threshold).unwrap_or(potentials.len())
}

/// Relative change of `power` against `baseline`, in percent. A zero baseline
/// (environments without power draw) yields zero.
pub fn power_delta_pct(power: f64, baseline: f64) -> f64 {
    if baseline == 0.0 {
        return 0.0;
    }
    (power - baseline) / baseline * 100.0
}

/// Condensed outcome of one training + test run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub method: String,
    pub kickoff_episodes: usize,
    pub episodes: usize,
    pub steps_per_episode: usize,
    pub training_interactions: usize,
    /// Simulated seconds of training.
    pub training_seconds: f64,
    pub convergence_episode: usize,
    pub training: Vec<EpisodeMetrics>,
    pub test: EpisodeMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub method: String,
    pub kickoff_episodes: usize,
    pub training_interactions: usize,
    pub training_seconds: f64,
    pub overflow_lps: f64,
    pub power_kws: f64,
    pub demand_shortfall_lps: f64,
    pub potential: f64,
    /// Power change against the first (benchmark) row, in percent.
    pub power_delta_pct: f64,
    /// Training interactions relative to the benchmark.
    pub interactions_ratio: f64,
    pub convergence_episode: usize,
    /// Interactions until convergence relative to the benchmark's.
    pub convergence_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

/// Tabulates runs against the first one, which serves as the benchmark.
pub fn compare_runs(runs: &[RunSummary]) -> ComparisonTable {
    let Some(base) = runs.first() else {
        return ComparisonTable { rows: Vec::new() };
    };
    let base_conv = (base.convergence_episode * base.steps_per_episode) as f64;
    let rows = runs
        .iter()
        .map(|r| {
            let conv = (r.convergence_episode * r.steps_per_episode) as f64;
            ComparisonRow {
                method: r.method.clone(),
                kickoff_episodes: r.kickoff_episodes,
                training_interactions: r.training_interactions,
                training_seconds: r.training_seconds,
                overflow_lps: r.test.overflow_lps,
                power_kws: r.test.power_kws,
                demand_shortfall_lps: r.test.demand_shortfall_lps,
                potential: r.test.potential,
                power_delta_pct: power_delta_pct(r.test.power_kws, base.test.power_kws),
                interactions_ratio: r.training_interactions as f64 / base.training_interactions as f64,
                convergence_episode: r.convergence_episode,
                convergence_ratio: if base_conv > 0.0 { conv / base_conv } else { f64::NAN },
            }
        })
        .collect();
    ComparisonTable { rows }
}

impl ComparisonTable {
    /// Fixed-width text rendering.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<14} {:>3} {:>12} {:>12} {:>10} {:>9} {:>10} {:>10} {:>8} {:>6} {:>5}",
            "method",
            "ko",
            "interactions",
            "train_s",
            "overflow",
            "power",
            "demand",
            "potential",
            "dP[%]",
            "ratio",
            "conv"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<14} {:>3} {:>12} {:>12.0} {:>10.4} {:>9.4} {:>10.4} {:>10.4} {:>8.2} {:>6.2} {:>5}",
                r.method,
                r.kickoff_episodes,
                r.training_interactions,
                r.training_seconds,
                r.overflow_lps,
                r.power_kws,
                r.demand_shortfall_lps,
                r.potential,
                r.power_delta_pct,
                r.interactions_ratio,
                r.convergence_episode
            );
        }
        s
    }
}
