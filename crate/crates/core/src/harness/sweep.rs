//! Deterministic grid search over configuration parameters.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::metrics::RunSummary;
use super::train::run_experiment;
use crate::error::{Error, Result};

/// Parameter grid keyed by dotted config paths, e.g. `"learner.alpha" = [0.5, 1.0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub parameters: BTreeMap<String, Vec<toml::Value>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rank: usize,
    pub label: String,
    pub summary: RunSummary,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    /// Best first: highest test potential, ties broken by label.
    pub results: Vec<SweepResult>,
    pub best: ExperimentConfig,
}

impl SweepGrid {
    pub fn from_toml(text: &str) -> Result<Self> {
        let g: SweepGrid = toml::from_str(text)?;
        if g.parameters.is_empty() || g.parameters.values().any(Vec::is_empty) {
            return Err(Error::config("sweep grid must list at least one value per parameter"));
        }
        Ok(g)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Read { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    /// Cartesian product of the grid applied to `template`, in lexicographic order.
    pub fn expand(&self, template: &ExperimentConfig) -> Result<Vec<(String, ExperimentConfig)>> {
        if self.parameters.is_empty() || self.parameters.values().any(Vec::is_empty) {
            return Err(Error::config("sweep grid must list at least one value per parameter"));
        }
        let base = toml::Table::try_from(template)?;
        let keys: Vec<&String> = self.parameters.keys().collect();
        let mut cases: Vec<Vec<usize>> = vec![vec![]];
        for k in &keys {
            let n = self.parameters[*k].len();
            cases = cases.into_iter().flat_map(|c| (0..n).map(move |i| [c.clone(), vec![i]].concat())).collect();
        }
        cases
            .into_iter()
            .map(|choice| {
                let mut table = base.clone();
                let mut label = Vec::new();
                for (k, &i) in keys.iter().zip(&choice) {
                    let v = &self.parameters[*k][i];
                    set_path(&mut table, k, v.clone())?;
                    label.push(format!("{k}={v}"));
                }
                let mut cfg: ExperimentConfig = table.try_into()?;
                cfg.resolve(None)?;
                cfg.validate()?;
                Ok((label.join(","), cfg))
            })
            .collect()
    }
}

fn set_path(table: &mut toml::Table, path: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = path.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| Error::config("empty sweep parameter"))?;
    let mut cur = table;
    for p in parts {
        cur = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::config(format!("sweep path {path:?} crosses a non-table value")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

/// Runs every grid point with the template's seed and ranks by test potential.
/// Results are written to `<out>/sweep.csv` and `<out>/best_config.toml` when `out` is set.
pub fn run_sweep(template: &ExperimentConfig, grid: &SweepGrid, out: Option<&Path>) -> Result<SweepReport> {
    let cases = grid.expand(template)?;
    let mut runs: Vec<(String, ExperimentConfig, RunSummary)> = cases
        .into_par_iter()
        .map(|(label, cfg)| run_experiment(&cfg).map(|r| (label, cfg, r.summary)))
        .collect::<Result<_>>()?;
    runs.sort_by(|a, b| b.2.test.potential.total_cmp(&a.2.test.potential).then_with(|| a.0.cmp(&b.0)));
    let best = runs[0].1.clone();
    let results: Vec<SweepResult> = runs
        .into_iter()
        .enumerate()
        .map(|(rank, (label, _, summary))| SweepResult { rank: rank + 1, label, summary })
        .collect();
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("sweep.csv"))?;
        w.write_record([
            "rank",
            "label",
            "potential",
            "power_kws",
            "overflow_lps",
            "demand_shortfall_lps",
            "convergence_episode",
        ])?;
        for r in &results {
            let t = &r.summary.test;
            w.write_record([
                r.rank.to_string(),
                r.label.clone(),
                t.potential.to_string(),
                t.power_kws.to_string(),
                t.overflow_lps.to_string(),
                t.demand_shortfall_lps.to_string(),
                r.summary.convergence_episode.to_string(),
            ])?;
        }
        w.flush()?;
        fs::write(dir.join("best_config.toml"), best.to_toml()?)?;
    }
    Ok(SweepReport { results, best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{LearnerConfig, LearnerKind};

    fn template() -> ExperimentConfig {
        let learner = LearnerConfig { variant: LearnerKind::Grad2, ..LearnerConfig::default() };
        ExperimentConfig::bglp(learner, 1)
    }

    #[test]
    fn expands_cartesian_product() {
        let g = SweepGrid::from_toml("[parameters]\n\"learner.alpha\" = [0.5, 1.0]\n\"learner.beta\" = [0.0, 0.4]\n")
            .unwrap();
        let cases = g.expand(&template()).unwrap();
        assert_eq!(cases.len(), 4);
        assert!(cases.iter().any(|(_, c)| c.learner.alpha == 0.5 && c.learner.beta == 0.4));
        assert_eq!(cases[0].0, "learner.alpha=0.5,learner.beta=0.0");
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(SweepGrid::from_toml("[parameters]\n").is_err());
        assert!(SweepGrid::from_toml("[parameters]\n\"learner.alpha\" = []\n").is_err());
    }

    #[test]
    fn unknown_parameter_rejected() {
        let g = SweepGrid::from_toml("[parameters]\n\"learner.nope\" = [1]\n").unwrap();
        assert!(g.expand(&template()).is_err());
    }
}
