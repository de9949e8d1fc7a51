use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::config::ExperimentConfig;
use super::metrics::{compare_runs, EpisodeMetrics, RunSummary};
use super::train::RunArtifacts;
use crate::error::{Error, Result};
use crate::game::{read_map_csv, write_map_csv, StoredPolicy};

pub const METRICS_HEADER: [&str; 6] =
    ["episode", "overflow_lps", "power_kws", "demand_shortfall_lps", "potential", "wall_clock_s"];

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_metrics(path: &Path, metrics: &[EpisodeMetrics]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(METRICS_HEADER)?;
    for m in metrics {
        w.write_record([
            m.episode.to_string(),
            m.overflow_lps.to_string(),
            m.power_kws.to_string(),
            m.demand_shortfall_lps.to_string(),
            m.potential.to_string(),
            m.wall_clock_s.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Writes a completed run into `dir`:
///
/// - `metrics.csv`: one row per training episode
/// - `summary.json` and `comparison.json`: run summary and its comparison-table row
/// - `maps/player_<i>.csv`: every player's performance map
/// - `config.toml`: the resolved configuration snapshot
///
/// On failure the artifacts stay untouched in memory.
pub fn export_results(run: &RunArtifacts, dir: &Path) -> Result<Vec<PathBuf>> {
    let maps_dir = dir.join("maps");
    fs::create_dir_all(&maps_dir)?;
    let mut written = Vec::new();

    let p = dir.join("metrics.csv");
    write_metrics(&p, &run.summary.training)?;
    written.push(p);

    let p = dir.join("summary.json");
    write_json(&p, &run.summary)?;
    written.push(p);

    let p = dir.join("comparison.json");
    write_json(&p, &compare_runs(std::slice::from_ref(&run.summary)))?;
    written.push(p);

    for (i, player) in run.players.iter().enumerate() {
        let p = maps_dir.join(format!("player_{i}.csv"));
        let mut w = create(&p)?;
        write_map_csv(player.map().as_map(), &mut w)?;
        w.flush()?;
        written.push(p);
    }

    let p = dir.join("config.toml");
    let mut snapshot = run.config.clone();
    snapshot.output_dir = None;
    fs::write(&p, snapshot.to_toml()?)?;
    written.push(p);
    Ok(written)
}

/// Restores exploitation policies from `<dir>/maps`, or from `dir` itself when it
/// directly holds the `player_<i>.csv` files.
pub fn load_policies(dir: &Path, config: &ExperimentConfig) -> Result<Vec<StoredPolicy>> {
    let grid = config.grid()?;
    let maps = if dir.join("maps").is_dir() { dir.join("maps") } else { dir.to_path_buf() };
    (0..config.players())
        .map(|i| {
            let path = maps.join(format!("player_{i}.csv"));
            let f = File::open(&path).map_err(|source| Error::Read { path: path.clone(), source })?;
            read_map_csv(grid, f)
        })
        .collect()
}

pub fn read_summary(dir: &Path) -> Result<RunSummary> {
    let path = dir.join("summary.json");
    let text = fs::read_to_string(&path).map_err(|source| Error::Read { path, source })?;
    Ok(serde_json::from_str(&text)?)
}
