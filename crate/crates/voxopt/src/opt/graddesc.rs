//! Gradient ascent on a continuous latent design with straight-through
//! quantization.
//!
//! The latent lives in `[0,1]^N`. Each step quantizes it at 0.5 (with 0.5
//! mapping to material), the run loop applies the environment's constraint
//! mapping and evaluates payoff and gradient at the resulting binary design,
//! and the gradient is copied straight through onto the latent for an
//! Adam-with-Nesterov ascent step under a cosine-warmup schedule.

use rand::Rng;

use crate::design::{Design, GridShape};
use crate::nn::{straight_through_grad, AdamConfig, AdamState, LrSchedule};
use crate::opt::Optimizer;
use crate::seed::{stream_rng, STREAM_ALGO};

#[derive(Debug, Clone, PartialEq)]
pub struct GradDescConfig {
    pub peak_lr: f64,
    /// Fraction of the budget spent on the linear warmup ramp.
    pub warmup_fraction: f64,
}

impl Default for GradDescConfig {
    fn default() -> Self {
        Self {
            peak_lr: 0.01,
            warmup_fraction: 0.1,
        }
    }
}

pub struct GradientDescent {
    config: GradDescConfig,
    shape: GridShape,
    latent: Vec<f64>,
    adam: AdamState,
    schedule: LrSchedule,
    observed: u64,
}

impl GradientDescent {
    pub fn new(config: GradDescConfig, shape: GridShape) -> Self {
        let n = shape.len();
        Self {
            config,
            shape,
            latent: vec![0.5; n],
            adam: AdamState::new(n, AdamConfig::with_nesterov()),
            schedule: LrSchedule::Constant(0.0),
            observed: 0,
        }
    }

    /// Quantization rule: latent ≥ 0.5 becomes material (so exactly 0.5
    /// rounds up).
    pub fn quantize(latent: &[f64], shape: GridShape) -> Design {
        let bits: Vec<u8> = latent.iter().map(|&v| u8::from(v >= 0.5)).collect();
        Design::new(bits, shape).expect("one bit per latent entry")
    }

    /// Current latent vector (exposed for tests and examples).
    pub fn latent(&self) -> &[f64] {
        &self.latent
    }

    /// Overrides the latent (clamped to `[0,1]`); handy for warm starts.
    pub fn set_latent(&mut self, latent: &[f64]) {
        assert_eq!(latent.len(), self.latent.len(), "latent length mismatch");
        self.latent = latent.iter().map(|&v| v.clamp(0.0, 1.0)).collect();
    }
}

impl Optimizer for GradientDescent {
    fn name(&self) -> &'static str {
        "graddesc"
    }

    fn reset(&mut self, seed: u64, total_evaluations: usize) {
        let mut rng = stream_rng(seed, STREAM_ALGO);
        self.latent = (0..self.shape.len())
            .map(|_| rng.random_range(0.0..1.0))
            .collect();
        self.adam = AdamState::new(self.shape.len(), AdamConfig::with_nesterov());
        let total = total_evaluations as u64;
        let warmup = (self.config.warmup_fraction * total as f64).round() as u64;
        self.schedule = LrSchedule::CosineWarmup {
            peak: self.config.peak_lr,
            warmup: warmup.min(total),
            total,
        };
        self.observed = 0;
    }

    fn propose(&mut self, _step: usize) -> Design {
        Self::quantize(&self.latent, self.shape)
    }

    fn observe(&mut self, _design: &Design, _payoff: f64, grad: Option<&[f64]>) {
        let grad = grad.expect("gradient optimizer requires evaluate_with_grad");
        assert_eq!(grad.len(), self.latent.len(), "gradient length mismatch");
        let lr = self.schedule.at(self.observed);
        self.observed += 1;
        // straight-through: the payoff gradient at the binary point acts
        // directly on the latent; negated because Adam descends
        let descent: Vec<f64> = grad.iter().map(|&g| -straight_through_grad(g)).collect();
        self.adam.step(&mut self.latent, &descent, lr);
        for v in &mut self.latent {
            *v = v.clamp(0.0, 1.0);
        }
    }

    fn requires_gradient(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{PayoffEnvironment, SyntheticSeparableEnv};

    #[test]
    fn default_peak_learning_rate_is_pinned() {
        assert_eq!(GradDescConfig::default().peak_lr, 0.01);
    }

    #[test]
    fn threshold_rounds_half_to_material() {
        let shape = GridShape::new(4, 1, 1).unwrap();
        let d = GradientDescent::quantize(&[0.5, 0.49999, 0.500001, 0.0], shape);
        assert_eq!(d.bits(), &[1, 0, 1, 0]);
    }

    #[test]
    fn zero_gradient_at_the_optimum_is_a_fixed_point() {
        let shape = GridShape::new(4, 1, 1).unwrap();
        let target = vec![1u8, 0, 1, 1];
        let env = SyntheticSeparableEnv::new(target.clone(), shape).unwrap();
        let mut gd = GradientDescent::new(GradDescConfig::default(), shape);
        gd.reset(1, 100);
        gd.set_latent(&[1.0, 0.0, 1.0, 1.0]);
        for _ in 0..20 {
            let d = gd.propose(0);
            assert_eq!(d.bits(), &target[..]);
            let (r, g) = env.evaluate_with_grad(&d).unwrap();
            assert_eq!(r, 1.0);
            gd.observe(&d, r, Some(&g));
        }
        assert_eq!(gd.latent(), &[1.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn ascends_to_the_synthetic_optimum() {
        let shape = GridShape::new(4, 2, 1).unwrap();
        let target = vec![1u8, 0, 1, 1, 0, 0, 1, 0];
        let env = SyntheticSeparableEnv::new(target, shape).unwrap();
        let mut gd = GradientDescent::new(GradDescConfig::default(), shape);
        gd.reset(7, 400);
        let mut best = 0.0f64;
        for step in 0..400 {
            let d = gd.propose(step);
            let (r, g) = env.evaluate_with_grad(&d).unwrap();
            best = best.max(r);
            gd.observe(&d, r, Some(&g));
        }
        assert_eq!(best, 1.0, "gradient ascent must reach the optimum");
    }

    #[test]
    fn latent_stays_in_the_unit_box() {
        let shape = GridShape::new(3, 1, 1).unwrap();
        let mut gd = GradientDescent::new(GradDescConfig::default(), shape);
        gd.reset(3, 50);
        // adversarial gradients trying to push the latent out of range
        for _ in 0..50 {
            let d = gd.propose(0);
            gd.observe(&d, 0.0, Some(&[1e6, -1e6, 1e6]));
            for &v in gd.latent() {
                assert!((0.0..=1.0).contains(&v), "latent escaped: {v}");
            }
        }
    }

    #[test]
    fn requires_gradient_flag_is_set() {
        let shape = GridShape::new(2, 1, 1).unwrap();
        let gd = GradientDescent::new(GradDescConfig::default(), shape);
        assert!(gd.requires_gradient());
    }
}
