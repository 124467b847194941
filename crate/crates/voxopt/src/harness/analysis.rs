//! Post-hoc analyses of optimization runs: proposal variance over a
//! sliding window, and payoff robustness under random voxel errors.

use std::sync::Mutex;

use rand::Rng;

use crate::design::{Design, GridShape};
use crate::env::PayoffEnvironment;
use crate::error::VoxError;
use crate::seed::{stream_rng, STREAM_ANALYSIS};

/// Environment decorator that records every evaluated design, so a run's
/// proposal stream can be analyzed afterwards.
pub struct RecordingEnv<'a> {
    inner: &'a dyn PayoffEnvironment,
    log: Mutex<Vec<Design>>,
}

impl<'a> RecordingEnv<'a> {
    pub fn new(inner: &'a dyn PayoffEnvironment) -> Self {
        Self {
            inner,
            log: Mutex::new(Vec::new()),
        }
    }

    /// The evaluated designs, in evaluation order.
    pub fn into_log(self) -> Vec<Design> {
        self.log.into_inner().expect("no poisoned lock: recording never panics")
    }
}

impl PayoffEnvironment for RecordingEnv<'_> {
    fn shape(&self) -> GridShape {
        self.inner.shape()
    }

    fn name(&self) -> &str {
        self.inner.name()
    }

    fn differentiable(&self) -> bool {
        self.inner.differentiable()
    }

    fn evaluate(&self, d: &Design) -> f64 {
        self.log.lock().expect("recording lock").push(d.clone());
        self.inner.evaluate(d)
    }

    fn evaluate_with_grad(&self, d: &Design) -> Result<(f64, Vec<f64>), VoxError> {
        self.log.lock().expect("recording lock").push(d.clone());
        self.inner.evaluate_with_grad(d)
    }

    fn apply_constraints(&self, d: &Design) -> Design {
        self.inner.apply_constraints(d)
    }
}

/// Sliding-window proposal variance: at each step `t >= window` (1-based),
/// the mean over voxels of the Bernoulli variance `p (1 - p)`, where `p`
/// is that voxel's material frequency over the `window` most recent
/// designs. Returns one value per step from `window` to `designs.len()`.
///
/// High values mean the optimizer is still proposing diverse designs;
/// converged greedy proposals drive it toward zero.
pub fn design_variance(designs: &[Design], window: usize) -> Result<Vec<f64>, VoxError> {
    if window == 0 {
        return Err(VoxError::Config("variance window must be positive".into()));
    }
    if designs.len() < window {
        return Err(VoxError::InsufficientHistory {
            required: window,
            got: designs.len(),
        });
    }
    let n = designs[0].len();
    if designs.iter().any(|d| d.len() != n) {
        return Err(VoxError::ShapeMismatch(
            "all recorded designs must share one shape".into(),
        ));
    }
    // Rolling per-voxel counts of material over the window.
    let mut counts = vec![0u32; n];
    for d in &designs[..window] {
        for (c, &b) in counts.iter_mut().zip(d.bits()) {
            *c += u32::from(b);
        }
    }
    let variance_of = |counts: &[u32]| {
        counts
            .iter()
            .map(|&c| {
                let p = f64::from(c) / window as f64;
                p * (1.0 - p)
            })
            .sum::<f64>()
            / n as f64
    };
    let mut out = Vec::with_capacity(designs.len() - window + 1);
    out.push(variance_of(&counts));
    for t in window..designs.len() {
        let (incoming, outgoing) = (designs[t].bits(), designs[t - window].bits());
        for ((c, &inc), &out_bit) in counts.iter_mut().zip(incoming).zip(outgoing) {
            *c += u32::from(inc);
            *c -= u32::from(out_bit);
        }
        out.push(variance_of(&counts));
    }
    Ok(out)
}

/// One point of a robustness curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessPoint {
    pub error_prob: f64,
    pub mean_payoff: f64,
}

/// Evaluates `best` under random fabrication errors: for each probability
/// `p`, every voxel is independently resampled to a uniform random bit
/// with probability `p`, and the mean payoff over `samples_per_prob`
/// perturbed designs is reported. `p = 0` is evaluated exactly (a single
/// unperturbed evaluation, no sampling noise).
pub fn robustness_curve(
    best: &Design,
    env: &dyn PayoffEnvironment,
    error_probs: &[f64],
    samples_per_prob: usize,
    seed: u64,
) -> Result<Vec<RobustnessPoint>, VoxError> {
    if best.shape() != env.shape() {
        return Err(VoxError::ShapeMismatch(format!(
            "design shape {:?} does not match environment {:?}",
            best.shape(),
            env.shape()
        )));
    }
    if error_probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(VoxError::Config(
            "error probabilities must lie in [0, 1]".into(),
        ));
    }
    if samples_per_prob == 0 {
        return Err(VoxError::Config(
            "robustness needs at least one sample per probability".into(),
        ));
    }
    let mut rng = stream_rng(seed, STREAM_ANALYSIS);
    let mut out = Vec::with_capacity(error_probs.len());
    for &p in error_probs {
        let mean = if p == 0.0 {
            env.evaluate(best)
        } else {
            let mut total = 0.0;
            for _ in 0..samples_per_prob {
                let mut noisy = best.clone();
                for i in 0..noisy.len() {
                    if rng.random::<f64>() < p {
                        noisy.set(i, u8::from(rng.random::<bool>()));
                    }
                }
                total += env.evaluate(&noisy);
            }
            total / samples_per_prob as f64
        };
        out.push(RobustnessPoint {
            error_prob: p,
            mean_payoff: mean,
        });
    }
    Ok(out)
}
