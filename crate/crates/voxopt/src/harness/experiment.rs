//! The experiment runner: executes one configured (environment,
//! algorithm) pair over a list of seeds and writes the result files.
//!
//! Per seed: `trace_<seed>.csv` (schema `step,payoff,best,wall_ms`) and
//! `best_<seed>.pbd`, plus optional `variance_<seed>.csv` and
//! `robustness_<seed>.csv`. Aggregated: `summary.csv` (per-seed best rows
//! and one mean/std row) and optional `curves.svg`. All content except
//! wall-clock columns is bit-stable across reruns of the same config;
//! disable `record_timing` to pin the wall column to zero too.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::VoxError;
use crate::harness::analysis::{design_variance, robustness_curve, RecordingEnv, RobustnessPoint};
use crate::harness::config::ExperimentConfig;
use crate::harness::svg::{line_plot, Series};
use crate::run::{run_with_timing, RunOutcome};

/// Everything one seed produced.
#[derive(Debug)]
pub struct SeedRun {
    pub seed: u64,
    pub outcome: RunOutcome,
    /// Proposal variance from step `variance_window` on (when recorded).
    pub variance: Option<Vec<f64>>,
    pub robustness: Option<Vec<RobustnessPoint>>,
}

/// Result of a whole experiment, with the aggregate statistics that also
/// land in `summary.csv`.
#[derive(Debug)]
pub struct ExperimentResult {
    pub runs: Vec<SeedRun>,
    pub mean_best: f64,
    pub std_best: f64,
    pub out_dir: PathBuf,
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    (mean, std)
}

fn run_one_seed(cfg: &ExperimentConfig, seed: u64) -> Result<SeedRun, VoxError> {
    let env = cfg.environment.build(seed)?;
    let budget = crate::env::Budget::new(cfg.budget)?;
    let (outcome, designs) = if cfg.analysis.record_designs {
        let recorder = RecordingEnv::new(env.as_ref());
        let mut algo = cfg.algorithm.build(&recorder)?;
        let outcome =
            run_with_timing(&recorder, algo.as_mut(), budget, seed, cfg.record_timing)?;
        (outcome, Some(recorder.into_log()))
    } else {
        let mut algo = cfg.algorithm.build(env.as_ref())?;
        let outcome =
            run_with_timing(env.as_ref(), algo.as_mut(), budget, seed, cfg.record_timing)?;
        (outcome, None)
    };

    let variance = match designs {
        Some(designs) if designs.len() >= cfg.analysis.variance_window => Some(
            design_variance(&designs, cfg.analysis.variance_window)?,
        ),
        _ => None,
    };
    let robustness = if cfg.analysis.robustness_probs.is_empty() {
        None
    } else {
        Some(robustness_curve(
            &outcome.best,
            env.as_ref(),
            &cfg.analysis.robustness_probs,
            cfg.analysis.robustness_samples,
            seed,
        )?)
    };
    Ok(SeedRun {
        seed,
        outcome,
        variance,
        robustness,
    })
}

fn write_trace(path: &Path, outcome: &RunOutcome) -> Result<(), VoxError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "step,payoff,best,wall_ms")?;
    for r in &outcome.trace {
        writeln!(f, "{},{},{},{}", r.step, r.payoff, r.best_so_far, r.wall_ms)?;
    }
    Ok(())
}

fn write_summary(path: &Path, runs: &[SeedRun], mean: f64, std: f64) -> Result<(), VoxError> {
    // Written to a sibling temp file first so a crash cannot leave a
    // half-written summary behind.
    let tmp = path.with_extension("csv.tmp");
    {
        let mut f = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        writeln!(f, "seed,best,mean,std")?;
        for run in runs {
            writeln!(f, "{},{},,", run.seed, run.outcome.best_payoff)?;
        }
        writeln!(f, "aggregate,,{mean},{std}")?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn write_curves_svg(path: &Path, runs: &[SeedRun]) -> Result<(), VoxError> {
    let series: Vec<Series> = runs
        .iter()
        .map(|run| Series {
            label: format!("seed {}", run.seed),
            points: run
                .outcome
                .trace
                .iter()
                .map(|r| (r.step as f64, r.best_so_far))
                .collect(),
        })
        .collect();
    std::fs::write(path, line_plot(&series, "best payoff so far", "evaluation", "best payoff"))?;
    Ok(())
}

/// Runs every seed of the experiment (in parallel worker slots) and
/// writes all result files into `cfg.out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, VoxError> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let threads = if cfg.jobs == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        cfg.jobs
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.min(cfg.seeds.len().max(1)))
        .build()
        .map_err(|e| VoxError::Config(format!("worker pool: {e}")))?;
    let runs: Result<Vec<SeedRun>, VoxError> = pool.install(|| {
        cfg.seeds
            .par_iter()
            .map(|&seed| run_one_seed(cfg, seed))
            .collect()
    });
    let runs = runs?;

    for run in &runs {
        write_trace(&cfg.out_dir.join(format!("trace_{}.csv", run.seed)), &run.outcome)?;
        run.outcome
            .best
            .save_pbd(&cfg.out_dir.join(format!("best_{}.pbd", run.seed)))?;
        if let Some(variance) = &run.variance {
            let mut f = std::io::BufWriter::new(std::fs::File::create(
                cfg.out_dir.join(format!("variance_{}.csv", run.seed)),
            )?);
            writeln!(f, "step,variance")?;
            for (k, v) in variance.iter().enumerate() {
                writeln!(f, "{},{}", cfg.analysis.variance_window + k, v)?;
            }
        }
        if let Some(points) = &run.robustness {
            let mut f = std::io::BufWriter::new(std::fs::File::create(
                cfg.out_dir.join(format!("robustness_{}.csv", run.seed)),
            )?);
            writeln!(f, "error_prob,mean_payoff")?;
            for p in points {
                writeln!(f, "{},{}", p.error_prob, p.mean_payoff)?;
            }
        }
    }

    let bests: Vec<f64> = runs.iter().map(|r| r.outcome.best_payoff).collect();
    let (mean_best, std_best) = mean_std(&bests);
    write_summary(&cfg.out_dir.join("summary.csv"), &runs, mean_best, std_best)?;
    if cfg.analysis.curves_svg {
        write_curves_svg(&cfg.out_dir.join("curves.svg"), &runs)?;
    }
    Ok(ExperimentResult {
        runs,
        mean_best,
        std_best,
        out_dir: cfg.out_dir.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ExperimentConfig;

    fn config_in(dir: &Path, extra: &str) -> ExperimentConfig {
        let text = format!(
            r#"
            [environment]
            kind = "synthetic"
            n = 10

            [algorithm]
            kind = "random"

            [run]
            budget = 40
            seeds = [1, 2, 3, 4, 5]
            out_dir = "{}"
            jobs = 2
            record_timing = false
            {extra}
            "#,
            dir.display()
        );
        ExperimentConfig::from_toml_str(&text).unwrap()
    }

    #[test]
    fn five_seeds_produce_files_and_consistent_summary() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config_in(dir.path(), "");
        let result = run_experiment(&cfg).unwrap();
        assert_eq!(result.runs.len(), 5);

        let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        let lines: Vec<&str> = summary.lines().collect();
        assert_eq!(lines.len(), 1 + 5 + 1, "header, five seeds, aggregate");
        assert_eq!(lines[0], "seed,best,mean,std");
        assert!(lines[6].starts_with("aggregate,,"));

        // The aggregate must equal a recomputation from the seed rows.
        let bests: Vec<f64> = lines[1..6]
            .iter()
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        let (mean, std) = mean_std(&bests);
        let agg: Vec<&str> = lines[6].split(',').collect();
        let (mean_csv, std_csv): (f64, f64) =
            (agg[2].parse().unwrap(), agg[3].parse().unwrap());
        assert!((mean - mean_csv).abs() < 1e-12);
        assert!((std - std_csv).abs() < 1e-12);

        for seed in 1..=5u64 {
            assert!(dir.path().join(format!("trace_{seed}.csv")).exists());
            let best =
                crate::design::Design::load_pbd(&dir.path().join(format!("best_{seed}.pbd")))
                    .unwrap();
            assert_eq!(best.len(), 10);
        }
        assert!(dir.path().join("curves.svg").exists());
    }

    #[test]
    fn reruns_are_bit_identical_with_timing_disabled() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        run_experiment(&config_in(dir_a.path(), "")).unwrap();
        run_experiment(&config_in(dir_b.path(), "")).unwrap();
        for name in ["trace_1.csv", "trace_5.csv", "summary.csv"] {
            let a = std::fs::read(dir_a.path().join(name)).unwrap();
            let b = std::fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between identical reruns");
        }
    }

    #[test]
    fn analysis_files_appear_when_enabled() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config_in(
            dir.path(),
            "\n[analysis]\nvariance_window = 10\nrecord_designs = true\nrobustness_probs = [0.0, 0.1]\nrobustness_samples = 4\n",
        );
        let result = run_experiment(&cfg).unwrap();
        let variance = std::fs::read_to_string(dir.path().join("variance_1.csv")).unwrap();
        let mut lines = variance.lines();
        assert_eq!(lines.next(), Some("step,variance"));
        assert_eq!(
            variance.lines().count(),
            1 + (40 - 10 + 1),
            "one row per step from the window end"
        );
        assert!(lines.next().unwrap().starts_with("10,"));

        let robustness = std::fs::read_to_string(dir.path().join("robustness_1.csv")).unwrap();
        assert_eq!(robustness.lines().next(), Some("error_prob,mean_payoff"));
        assert_eq!(robustness.lines().count(), 3);
        // p = 0 row is the exact payoff of the stored best design.
        let p0: f64 = robustness
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap();
        assert_eq!(p0, result.runs[0].outcome.best_payoff);
    }

    #[test]
    fn trace_csv_matches_the_frozen_schema() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config_in(dir.path(), "");
        cfg.budget = 5;
        cfg.seeds = vec![9];
        run_experiment(&cfg).unwrap();
        let trace = std::fs::read_to_string(dir.path().join("trace_9.csv")).unwrap();
        let lines: Vec<&str> = trace.lines().collect();
        assert_eq!(lines[0], "step,payoff,best,wall_ms");
        assert_eq!(lines.len(), 6);
        for (k, line) in lines[1..].iter().enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 4);
            assert_eq!(fields[0], (k + 1).to_string());
            assert_eq!(fields[3], "0", "timing disabled pins wall_ms to 0");
        }
    }
}
