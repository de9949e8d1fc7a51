use std::fs;

use sbpg::game::{PerformanceMap, TransitionRule};
use sbpg::harness::{
    compare_runs, export_results, load_policies, read_summary, run_experiment, run_test, run_training,
    run_training_traced, EnvironmentConfig, ExperimentConfig, SweepGrid, METRICS_HEADER,
};
use sbpg::learners::{LearnerConfig, LearnerKind};
use sbpg::Error;

fn short(kind: LearnerKind, kickoff: usize) -> ExperimentConfig {
    let learner = LearnerConfig { variant: kind, kickoff_episodes: kickoff, ..LearnerConfig::default() };
    let mut cfg = ExperimentConfig::bglp(learner, 11);
    cfg.episodes = 3;
    cfg.episode_duration = 1_000.0;
    cfg
}

fn reference(episodes: usize) -> ExperimentConfig {
    let mut cfg = short(LearnerKind::Grad1, 0);
    cfg.episodes = episodes;
    cfg.environment = EnvironmentConfig::Reference {
        offsets: vec![0.1, -0.1, 0.2],
        rule: TransitionRule::TowardMean { rate: 0.3 },
        initial_state: 0.5,
    };
    cfg
}

fn read_dir_sorted(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in walk(dir) {
        out.push((entry.strip_prefix(dir).unwrap().display().to_string(), fs::read(&entry).unwrap()));
    }
    out.sort();
    out
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut files = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            files.extend(walk(&p));
        } else {
            files.push(p);
        }
    }
    files
}

#[test]
fn reference_game_smoke_run() {
    let run = run_experiment(&reference(1)).unwrap();
    let m = &run.summary.training[0];
    assert!(m.potential.is_finite() && m.power_kws.is_finite());
    assert_eq!(run.players.len(), 3);
    assert!(run.players.iter().all(|p| p.map().as_map().visited_count() > 0));
    assert!(run.summary.test.potential.is_finite());
}

#[test]
fn interaction_count_follows_protocol() {
    let cfg = ExperimentConfig::bglp(LearnerConfig::default(), 0);
    assert_eq!(cfg.steps_per_episode(), 1_000);
    assert_eq!(cfg.training_interactions(), 20_000);
    let run = run_experiment(&short(LearnerKind::BestResponse, 0)).unwrap();
    assert_eq!(run.summary.training_interactions, 300);
    assert_eq!(run.summary.training.len(), 3);
}

#[test]
fn training_is_deterministic() {
    for (kind, ko) in [(LearnerKind::BestResponse, 0), (LearnerKind::Grad2, 1), (LearnerKind::Grad3, 0)] {
        let cfg = short(kind, ko);
        let a = run_experiment(&cfg).unwrap().summary;
        let b = run_experiment(&cfg).unwrap().summary;
        assert_eq!(a, b, "{kind}");
    }
}

#[test]
fn noisy_training_is_deterministic() {
    let mut cfg = short(LearnerKind::Grad1, 0);
    cfg.learner.noise.enabled = true;
    let trace = |cfg: &ExperimentConfig| {
        let mut actions = Vec::new();
        run_training_traced(cfg, |t| actions.extend(t.decisions.iter().map(|d| d.action.get().to_bits()))).unwrap();
        actions
    };
    assert_eq!(trace(&cfg), trace(&cfg));
}

#[test]
fn different_seeds_differ() {
    let a = short(LearnerKind::BestResponse, 0);
    let mut b = a.clone();
    b.seed += 1;
    assert_ne!(run_experiment(&a).unwrap().summary.training, run_experiment(&b).unwrap().summary.training);
}

#[test]
fn test_episode_is_pure_exploitation() {
    let cfg = short(LearnerKind::Grad1, 1);
    let trained = run_training(&cfg).unwrap();
    let maps: Vec<&dyn PerformanceMap> = trained.players.iter().map(|p| p.map().as_map()).collect();
    let first = run_test(&cfg, &maps).unwrap();
    let mut reseeded = cfg.clone();
    reseeded.seed = 999;
    reseeded.learner.noise.enabled = true;
    assert_eq!(first, run_test(&reseeded, &maps).unwrap());
    assert_eq!(first, run_test(&cfg, &maps).unwrap());
}

#[test]
fn untrained_maps_are_rejected() {
    let cfg = short(LearnerKind::Grad1, 0);
    let grid = cfg.grid().unwrap();
    let empty: Vec<sbpg::game::BestResponseMap> = (0..5).map(|_| sbpg::game::BestResponseMap::new(grid)).collect();
    let maps: Vec<&dyn PerformanceMap> = empty.iter().map(|m| m as &dyn PerformanceMap).collect();
    assert!(matches!(run_test(&cfg, &maps), Err(Error::PolicyNotReady)));
}

#[test]
fn invalid_config_fails_before_training() {
    let mut cfg = short(LearnerKind::Grad1, 0);
    cfg.episode_duration = 1_005.0;
    assert!(run_training(&cfg).is_err());
    let mut cfg = short(LearnerKind::BestResponse, 2);
    cfg.learner.kickoff_episodes = 2;
    assert!(run_training(&cfg).is_err());
    let mut cfg = short(LearnerKind::Grad1, 0);
    cfg.learner.kickoff_episodes = 7;
    assert!(run_training(&cfg).is_err());
}

#[test]
fn export_layout_and_byte_identity() {
    let cfg = short(LearnerKind::Grad2, 1);
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    export_results(&run_experiment(&cfg).unwrap(), dir_a.path()).unwrap();
    export_results(&run_experiment(&cfg).unwrap(), dir_b.path()).unwrap();
    let a = read_dir_sorted(dir_a.path());
    assert_eq!(a, read_dir_sorted(dir_b.path()));

    let names: Vec<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
    let maps = names.iter().filter(|n| n.starts_with("maps")).count();
    assert_eq!(maps, 5);
    assert!(names.contains(&"config.toml") && names.contains(&"metrics.csv") && names.contains(&"comparison.json"));

    let metrics = fs::read_to_string(dir_a.path().join("metrics.csv")).unwrap();
    let mut lines = metrics.lines();
    assert_eq!(lines.next().unwrap(), METRICS_HEADER.join(","));
    assert_eq!(lines.count(), cfg.episodes);
}

#[test]
fn exported_snapshot_reproduces_the_run() {
    let cfg = short(LearnerKind::Grad1, 1);
    let run = run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    export_results(&run, dir.path()).unwrap();
    let reloaded = ExperimentConfig::load(&dir.path().join("config.toml")).unwrap();
    let rerun = run_experiment(&reloaded).unwrap();
    assert_eq!(rerun.summary, run.summary);
    assert_eq!(read_summary(dir.path()).unwrap(), run.summary);

    let policies = load_policies(dir.path(), &reloaded).unwrap();
    let maps: Vec<&dyn PerformanceMap> = policies.iter().map(|p| p as &dyn PerformanceMap).collect();
    assert_eq!(run_test(&reloaded, &maps).unwrap(), run.summary.test);
}

#[test]
fn unwritable_directory_keeps_results() {
    let run = run_experiment(&short(LearnerKind::BestResponse, 0)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    assert!(export_results(&run, &blocker.join("out")).is_err());
    assert_eq!(run.summary.training.len(), 3);
}

#[test]
fn comparison_against_a_baseline() {
    let br = run_experiment(&short(LearnerKind::BestResponse, 0)).unwrap().summary;
    let g = run_experiment(&short(LearnerKind::Grad1, 1)).unwrap().summary;
    let table = compare_runs(&[br.clone(), g.clone()]);
    assert_eq!(table.rows.len(), 2);
    assert_eq!(table.rows[0].power_delta_pct, 0.0);
    let want = (g.test.power_kws - br.test.power_kws) / br.test.power_kws * 100.0;
    assert!((table.rows[1].power_delta_pct - want).abs() < 1e-12);
    assert!(table.render().contains("grad1"));
}

#[test]
fn sweep_ranks_and_persists() {
    let cfg = short(LearnerKind::Grad2, 0);
    let grid =
        SweepGrid::from_toml("[parameters]\n\"learner.alpha\" = [0.5, 1.0]\n\"learner.beta\" = [0.4]\n").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = sbpg::harness::run_sweep(&cfg, &grid, Some(dir.path())).unwrap();
    assert_eq!(report.results.len(), 2);
    assert!(report.results[0].summary.test.potential >= report.results[1].summary.test.potential);
    assert!(report.results.iter().any(|r| r.label == "learner.alpha=0.5,learner.beta=0.4"));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let best = ExperimentConfig::load(&dir.path().join("best_config.toml")).unwrap();
    assert_eq!(best, report.best);
}
