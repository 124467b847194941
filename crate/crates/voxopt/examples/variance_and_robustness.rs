//! Post-hoc analysis of an optimization run: proposal variance and
//! fabrication-error robustness.
//!
//! Two learners run on a 16×16 still-life task. Wrapping the environment in
//! a [`RecordingEnv`] captures every proposed design, which feeds the
//! rolling proposal-variance curve — a direct read on whether a policy has
//! actually converged or is still exploring. The best design of each run is
//! then re-evaluated under random voxel errors to produce a robustness
//! curve, and both diagnostics land in `analysis.svg`.
//!
//! Run with: cargo run --release --example variance_and_robustness

use voxopt::gol::GolEnv;
use voxopt::harness::{design_variance, line_plot, robustness_curve, RecordingEnv, Series};
use voxopt::opt::{BatchPpo, BppoConfig, IndependentQLearning, IqlConfig};
use voxopt::{run_optimization, Budget, Optimizer, PayoffEnvironment, VoxError};

const BUDGET: usize = 1200;
const WINDOW: usize = 50;
const SEED: u64 = 11;

fn record_run(
    env: &GolEnv,
    algo: &mut dyn Optimizer,
) -> Result<(f64, Vec<f64>, Vec<voxopt::Design>), VoxError> {
    let recording = RecordingEnv::new(env);
    let outcome = run_optimization(&recording, algo, Budget::new(BUDGET)?, SEED)?;
    let log = recording.into_log();
    let variance = design_variance(&log, WINDOW)?;
    Ok((outcome.best_payoff, variance, vec![outcome.best]))
}

fn main() -> Result<(), VoxError> {
    let env = GolEnv::new(16, 16)?;

    // A policy-gradient learner whose proposals collapse as it converges.
    let mut ppo = BatchPpo::new(
        BppoConfig {
            rollout_size: 25,
            updates_per_rollout: 40,
            minibatch: 1024,
            hidden: vec![32, 32],
            lr: 3e-3,
            entropy_coef: 0.0,
            ..BppoConfig::default()
        },
        env.shape(),
    );
    // A value learner with an epsilon floor: it keeps exploring forever, so
    // its proposal variance never drops to zero.
    let mut iql = IndependentQLearning::new(IqlConfig::default(), env.shape());

    let (ppo_best, ppo_var, ppo_designs) = record_run(&env, &mut ppo)?;
    let (iql_best, iql_var, iql_designs) = record_run(&env, &mut iql)?;

    println!("best payoff   ppo {ppo_best:.4}   iql {iql_best:.4}");
    println!(
        "late proposal variance   ppo {:.4}   iql {:.4}",
        ppo_var.last().copied().unwrap_or(f64::NAN),
        iql_var.last().copied().unwrap_or(f64::NAN),
    );

    // Robustness: re-evaluate each best design while flipping voxels to
    // uniform random bits with probability p. p = 0 reproduces the exact
    // payoff; the curve should decay monotonically as errors grow.
    let probs = [0.0, 0.05, 0.10, 0.20];
    let mut robust_series = Vec::new();
    for (label, best) in [("ppo", &ppo_designs[0]), ("iql", &iql_designs[0])] {
        let curve = robustness_curve(best, &env, &probs, 40, SEED)?;
        print!("robustness {label}:");
        for pt in &curve {
            print!("  p={:.2} -> {:.4}", pt.error_prob, pt.mean_payoff);
        }
        println!();
        robust_series.push(Series {
            label: label.to_string(),
            points: curve.iter().map(|p| (p.error_prob, p.mean_payoff)).collect(),
        });
    }

    let var_series: Vec<Series> = [("ppo", &ppo_var), ("iql", &iql_var)]
        .into_iter()
        .map(|(label, var)| Series {
            label: label.to_string(),
            points: var
                .iter()
                .enumerate()
                .map(|(i, v)| ((WINDOW + i) as f64, *v))
                .collect(),
        })
        .collect();

    std::fs::write(
        "variance.svg",
        line_plot(&var_series, "proposal variance", "evaluation", "variance"),
    )?;
    std::fs::write(
        "robustness.svg",
        line_plot(&robust_series, "fabrication robustness", "error probability", "mean payoff"),
    )?;
    println!("wrote variance.svg and robustness.svg");
    Ok(())
}
