//! The optimization run loop: best-of-T search under a fixed budget.
//!
//! Performance is measured as the best payoff seen over the whole run,
//! so the loop tracks the running maximum and logs one record per
//! evaluation. Gradient-based optimizers are fed the constraint-mapped
//! design together with the payoff gradient at that binary point; all
//! other optimizers observe exactly the design they proposed, keeping
//! per-agent credit assignment on the chosen actions.

use std::time::Instant;

use crate::design::Design;
use crate::env::{Budget, PayoffEnvironment};
use crate::error::VoxError;
use crate::opt::Optimizer;

/// Per-evaluation log record.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Evaluation index, counting from 1.
    pub step: usize,
    /// Payoff of this step's design.
    pub payoff: f64,
    /// Running maximum payoff up to and including this step.
    pub best_so_far: f64,
    /// Wall time spent on this step in milliseconds; 0 when timing is off.
    pub wall_ms: f64,
}

/// Everything produced by one optimization run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// The evaluated design that attained `best_payoff`.
    pub best: Design,
    pub best_payoff: f64,
    /// One record per evaluation, in order.
    pub trace: Vec<RunRecord>,
}

/// Runs `algo` against `env` for exactly `budget.total_evaluations`
/// evaluations and returns the best design found.
///
/// The optimizer is first `reset` with `seed` and the budget, then
/// `propose`/`observe` strictly alternate. Exhausting the budget is normal
/// termination, not an error.
pub fn run_optimization(
    env: &dyn PayoffEnvironment,
    algo: &mut dyn Optimizer,
    budget: Budget,
    seed: u64,
) -> Result<RunOutcome, VoxError> {
    run_with_timing(env, algo, budget, seed, true)
}

/// [`run_optimization`] with explicit control over wall-time recording.
///
/// With `record_timing == false` every `wall_ms` is exactly 0.0, so traces
/// from identical `(env, algo config, budget, seed)` are bit-identical
/// across runs — the mode used by determinism checks.
pub fn run_with_timing(
    env: &dyn PayoffEnvironment,
    algo: &mut dyn Optimizer,
    budget: Budget,
    seed: u64,
    record_timing: bool,
) -> Result<RunOutcome, VoxError> {
    if algo.requires_gradient() && !env.differentiable() {
        return Err(VoxError::IncompatibleAlgorithm {
            algo: algo.name().to_string(),
            env: env.name().to_string(),
        });
    }

    let total = budget.total_evaluations;
    algo.reset(seed, total);

    let mut trace = Vec::with_capacity(total);
    let mut best: Option<(Design, f64)> = None;
    for step in 0..total {
        let started = Instant::now();
        let proposal = algo.propose(step);
        let (evaluated, payoff) = if algo.requires_gradient() {
            let mapped = env.apply_constraints(&proposal);
            let (payoff, grad) = env.evaluate_with_grad(&mapped)?;
            algo.observe(&mapped, payoff, Some(&grad));
            (mapped, payoff)
        } else {
            let payoff = env.evaluate(&proposal);
            algo.observe(&proposal, payoff, None);
            (proposal, payoff)
        };

        if best.as_ref().is_none_or(|(_, b)| payoff > *b) {
            best = Some((evaluated, payoff));
        }
        let best_so_far = best.as_ref().expect("set on first step").1;
        let wall_ms = if record_timing {
            started.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        trace.push(RunRecord {
            step: step + 1,
            payoff,
            best_so_far,
            wall_ms,
        });
    }

    let (best, best_payoff) = best.expect("budget is at least one evaluation");
    Ok(RunOutcome {
        best,
        best_payoff,
        trace,
    })
}
