//! Driving a whole multi-seed experiment from a TOML config.
//!
//! The harness owns everything the `voxopt` binary's `run` subcommand does:
//! it parses the config, runs every seed, writes one trace CSV per seed plus
//! `summary.csv`, and optionally emits variance/robustness analyses and a
//! learning-curve SVG. This example feeds it an inline config string and
//! then lists what landed in the output directory.
//!
//! Run with: cargo run --release --example experiment_harness

use voxopt::harness::{run_experiment, ExperimentConfig};
use voxopt::VoxError;

const CONFIG: &str = r#"
[environment]
kind = "synthetic"
n = 16

[algorithm]
kind = "ea"
population = 40
parents_mating = 8
keep_parents = 2
gene_mutation_rate = 0.2

[run]
budget = 600
seeds = [0, 1, 2]
out_dir = "harness_out"
jobs = 1
record_timing = false

[analysis]
variance_window = 50
record_designs = true
robustness_probs = [0.0, 0.05, 0.10]
robustness_samples = 25
curves_svg = true
"#;

fn main() -> Result<(), VoxError> {
    let cfg = ExperimentConfig::from_toml_str(CONFIG)?;
    let result = run_experiment(&cfg)?;

    println!(
        "best payoff over {} seeds: mean {:.4}, std {:.4}",
        result.runs.len(),
        result.mean_best,
        result.std_best
    );
    for run in &result.runs {
        let late_var = run
            .variance
            .as_ref()
            .and_then(|v| v.last().copied())
            .unwrap_or(f64::NAN);
        println!(
            "  seed {}: best {:.4}, late proposal variance {:.4}",
            run.seed, run.outcome.best_payoff, late_var
        );
        if let Some(curve) = &run.robustness {
            print!("    robustness:");
            for pt in curve {
                print!("  p={:.2} -> {:.4}", pt.error_prob, pt.mean_payoff);
            }
            println!();
        }
    }

    let mut files: Vec<String> = std::fs::read_dir(&result.out_dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    files.sort();
    println!("files in {}:", result.out_dir.display());
    for f in files {
        println!("  {f}");
    }
    Ok(())
}
