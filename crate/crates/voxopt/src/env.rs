//! The payoff environment interface and the synthetic oracle environment.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::design::{hamming_payoff, Design, GridShape};
use crate::error::VoxError;

/// A deterministic mapping from designs to scalar payoffs.
///
/// Implementations must be pure: identical designs yield bit-identical
/// payoffs within one process configuration. Shipped environments report
/// payoffs in `[0, 1]` except the Game-of-Life score, which can go slightly
/// negative and is reported as-is.
pub trait PayoffEnvironment: Send + Sync {
    fn shape(&self) -> GridShape;

    fn agent_count(&self) -> usize {
        self.shape().len()
    }

    /// Whether payoff gradients are available via [`Self::evaluate_with_grad`].
    fn differentiable(&self) -> bool {
        false
    }

    /// Short name used in error messages and CLI output.
    fn name(&self) -> &str;

    fn evaluate(&self, d: &Design) -> f64;

    /// Payoff together with its gradient with respect to the design bits,
    /// evaluated at the (post-constraint) binary point.
    fn evaluate_with_grad(&self, _d: &Design) -> Result<(f64, Vec<f64>), VoxError> {
        Err(VoxError::NotDifferentiable)
    }

    /// Projects a raw design onto the environment's fabricable set.
    /// Identity for environments without fabrication constraints.
    fn apply_constraints(&self, d: &Design) -> Design {
        d.clone()
    }
}

/// Evaluation budget of one optimization run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub total_evaluations: usize,
}

impl Budget {
    pub fn new(total_evaluations: usize) -> Result<Self, VoxError> {
        if total_evaluations == 0 {
            return Err(VoxError::Config("budget must be >= 1".into()));
        }
        Ok(Self { total_evaluations })
    }
}

/// Wrapper that counts evaluations, used to verify the budget law.
pub struct CountingEnv<'a> {
    inner: &'a dyn PayoffEnvironment,
    calls: AtomicUsize,
}

impl<'a> CountingEnv<'a> {
    pub fn new(inner: &'a dyn PayoffEnvironment) -> Self {
        Self {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }
}

impl PayoffEnvironment for CountingEnv<'_> {
    fn shape(&self) -> GridShape {
        self.inner.shape()
    }

    fn differentiable(&self) -> bool {
        self.inner.differentiable()
    }

    fn name(&self) -> &str {
        self.inner.name()
    }

    fn evaluate(&self, d: &Design) -> f64 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.evaluate(d)
    }

    fn evaluate_with_grad(&self, d: &Design) -> Result<(f64, Vec<f64>), VoxError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.evaluate_with_grad(d)
    }

    fn apply_constraints(&self, d: &Design) -> Design {
        self.inner.apply_constraints(d)
    }
}

/// Separable oracle environment: payoff `1 - hamming(d, target)/N`.
///
/// The unique optimum is the target itself with payoff exactly 1. The
/// continuous relaxation `1 - mean((p_i - target_i)^2)` agrees with the
/// discrete payoff at binary points and has gradient `2 (target_i - p_i) / N`,
/// so exact gradients are available for the gradient-descent baseline.
#[derive(Debug, Clone)]
pub struct SyntheticSeparableEnv {
    target: Vec<u8>,
    shape: GridShape,
}

impl SyntheticSeparableEnv {
    pub fn new(target: Vec<u8>, shape: GridShape) -> Result<Self, VoxError> {
        if target.len() != shape.len() {
            return Err(VoxError::LengthMismatch {
                expected: shape.len(),
                got: target.len(),
            });
        }
        if let Some(&bad) = target.iter().find(|&&b| b > 1) {
            return Err(VoxError::NonBinaryValue(bad));
        }
        Ok(Self { target, shape })
    }

    /// Target drawn uniformly from the given generator.
    pub fn random<R: rand::Rng>(shape: GridShape, rng: &mut R) -> Self {
        let target = (0..shape.len())
            .map(|_| if rng.random::<bool>() { 1 } else { 0 })
            .collect();
        Self { target, shape }
    }

    pub fn target(&self) -> &[u8] {
        &self.target
    }
}

impl PayoffEnvironment for SyntheticSeparableEnv {
    fn shape(&self) -> GridShape {
        self.shape
    }

    fn differentiable(&self) -> bool {
        true
    }

    fn name(&self) -> &str {
        "synthetic"
    }

    fn evaluate(&self, d: &Design) -> f64 {
        hamming_payoff(d, &self.target).expect("design matches environment shape")
    }

    fn evaluate_with_grad(&self, d: &Design) -> Result<(f64, Vec<f64>), VoxError> {
        let payoff = self.evaluate(d);
        let n = self.target.len() as f64;
        let grad = d
            .bits()
            .iter()
            .zip(&self.target)
            .map(|(&b, &t)| 2.0 * (t as f64 - b as f64) / n)
            .collect();
        Ok((payoff, grad))
    }
}
