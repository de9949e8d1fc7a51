use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use log::info;
use sbpg::game::{
    verify_potential_condition, verify_state_transition_condition, PerformanceMap, Perturbed, ReferenceGame,
    TransitionRule,
};
use sbpg::harness::{
    compare_runs, export_results, load_policies, read_summary, run_experiment, run_sweep, run_test, stream_rng,
    ExperimentConfig, SweepGrid, METRICS_HEADER,
};
use sbpg::learners::{LearnerConfig, LearnerKind};

#[derive(Parser)]
#[command(name = "sbpg", version, about = "State-based potential game learning on a bulk-good plant")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train players, run the test episode and export results.
    Train {
        /// Experiment config; the built-in plant protocol is used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        learner: Option<LearnerKind>,
        #[arg(long)]
        kickoff: Option<usize>,
        #[arg(long)]
        episodes: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one exploitation episode from exported maps.
    Test {
        #[arg(long)]
        maps: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Write the test metrics as CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a comparison table over exported runs; the first run is the baseline.
    Compare {
        #[arg(long, num_args = 1.., required = true)]
        runs: Vec<PathBuf>,
        /// Also write the table as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid search over config parameters.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the potential and transition conditions on the reference games.
    Verify {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn train(
    config: Option<PathBuf>,
    learner: Option<LearnerKind>,
    kickoff: Option<usize>,
    episodes: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> anyhow::Result<()> {
    let mut cfg = match &config {
        Some(path) => ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => ExperimentConfig::bglp(LearnerConfig::default(), 0),
    };
    if let Some(kind) = learner {
        cfg.learner.variant = kind;
        if kind == LearnerKind::BestResponse {
            cfg.learner.kickoff_episodes = 0;
        }
    }
    if let Some(k) = kickoff {
        cfg.learner.kickoff_episodes = k;
    }
    if let Some(e) = episodes {
        cfg.episodes = e;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = out {
        cfg.output_dir = Some(o);
    }
    cfg.validate()?;
    let run = run_experiment(&cfg)?;
    let table = compare_runs(std::slice::from_ref(&run.summary));
    print!("{}", table.render());
    if let Some(dir) = &cfg.output_dir {
        let files = export_results(&run, dir).with_context(|| format!("exporting to {}", dir.display()))?;
        info!("wrote {} files to {}", files.len(), dir.display());
    }
    Ok(())
}

fn test(maps: &Path, config: &Path, out: Option<&Path>) -> anyhow::Result<()> {
    let cfg = ExperimentConfig::load(config).with_context(|| format!("loading {}", config.display()))?;
    let policies = load_policies(maps, &cfg)?;
    let refs: Vec<&dyn PerformanceMap> = policies.iter().map(|p| p as &dyn PerformanceMap).collect();
    let m = run_test(&cfg, &refs)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(METRICS_HEADER)?;
    w.serialize((m.episode, m.overflow_lps, m.power_kws, m.demand_shortfall_lps, m.potential, m.wall_clock_s))?;
    let text = String::from_utf8(w.into_inner()?)?;
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn compare(runs: &[PathBuf], out: Option<&Path>) -> anyhow::Result<()> {
    let summaries = runs
        .iter()
        .map(|d| read_summary(d).with_context(|| format!("reading run {}", d.display())))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let table = compare_runs(&summaries);
    print!("{}", table.render());
    if let Some(path) = out {
        fs::write(path, serde_json::to_string_pretty(&table)? + "\n")?;
    }
    Ok(())
}

fn sweep(config: &Path, grid: &Path, out: Option<&Path>) -> anyhow::Result<()> {
    let cfg = ExperimentConfig::load(config).with_context(|| format!("loading {}", config.display()))?;
    let grid = SweepGrid::load(grid)?;
    let report = run_sweep(&cfg, &grid, out)?;
    println!("rank,label,potential,power_kws,overflow_lps,demand_shortfall_lps");
    for r in &report.results {
        let t = &r.summary.test;
        println!(
            "{},{},{},{},{},{}",
            r.rank, r.label, t.potential, t.power_kws, t.overflow_lps, t.demand_shortfall_lps
        );
    }
    Ok(())
}

fn verify(samples: usize, seed: u64) -> anyhow::Result<()> {
    let offsets = vec![0.1, -0.2, 0.3, 0.0, -0.1];
    let mut ok = true;
    let mut check = |label: &str, expected: bool, passed: bool, detail: String| {
        let verdict = if passed == expected { "ok" } else { "UNEXPECTED" };
        ok &= passed == expected;
        println!("{label:<40} passed={passed:<5} expected={expected:<5} {detail} [{verdict}]");
    };

    let exact = ReferenceGame::new(offsets.clone(), TransitionRule::TowardMean { rate: 0.5 })?;
    let r = verify_potential_condition(&exact, samples, 1e-9, &mut stream_rng(seed, 1));
    check("potential: exact game", true, r.passed, format!("max_residual={:e}", r.max_residual));

    let perturbed = Perturbed { inner: exact.clone(), player: 0, coefficient: 0.5 };
    let r = verify_potential_condition(&perturbed, samples, 1e-9, &mut stream_rng(seed, 2));
    check("potential: perturbed game", false, r.passed, format!("max_residual={:e}", r.max_residual));

    let rules = [
        ("transition: identity", TransitionRule::Identity, true),
        ("transition: toward mean", TransitionRule::TowardMean { rate: 0.5 }, true),
        ("transition: away from mean", TransitionRule::AwayFromMean { rate: 0.5 }, false),
    ];
    for (i, (label, rule, expected)) in rules.into_iter().enumerate() {
        let game = ReferenceGame::new(offsets.clone(), rule)?;
        let r = verify_state_transition_condition(&game, samples, 1e-12, &mut stream_rng(seed, 3 + i as u64));
        check(label, expected, r.passed, format!("violations={} worst_drop={:e}", r.violations, r.worst_drop));
    }
    if !ok {
        bail!("reference game verification produced unexpected results");
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Train { config, learner, kickoff, episodes, seed, out } => {
            train(config, learner, kickoff, episodes, seed, out)
        }
        Command::Test { maps, config, out } => test(&maps, &config, out.as_deref()),
        Command::Compare { runs, out } => compare(&runs, out.as_deref()),
        Command::Sweep { config, grid, out } => sweep(&config, &grid, out.as_deref()),
        Command::Verify { samples, seed } => verify(samples, seed),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SBPG_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
