//! Adam optimizer over flat parameter vectors, with an optional Nesterov
//! momentum variant and a cosine-with-warmup learning-rate schedule.
//!
//! `AdamState::step` always *descends* the supplied gradient; callers that
//! maximize an objective negate the gradient first.

#[derive(Debug, Clone, Copy)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// When set, applies Nesterov-style momentum (constant schedule): the
    /// update blends the bias-corrected first moment with the current
    /// gradient, each corrected one step apart.
    pub nesterov: bool,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            nesterov: false,
        }
    }
}

impl AdamConfig {
    pub fn with_nesterov() -> Self {
        Self {
            nesterov: true,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdamState {
    config: AdamConfig,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(param_count: usize, config: AdamConfig) -> Self {
        Self {
            config,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
            t: 0,
        }
    }

    /// Number of steps taken so far.
    pub fn steps(&self) -> u64 {
        self.t
    }

    /// Clears moments and the step counter (used when a model is
    /// reinitialized mid-run).
    pub fn reset(&mut self) {
        self.m.fill(0.0);
        self.v.fill(0.0);
        self.t = 0;
    }

    /// One descent step in place: `params -= lr * update(grad)`.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        assert_eq!(params.len(), self.m.len(), "parameter count mismatch");
        assert_eq!(grad.len(), self.m.len(), "gradient count mismatch");
        self.t += 1;
        let AdamConfig {
            beta1,
            beta2,
            eps,
            nesterov,
        } = self.config;
        let t = self.t as i32;
        let bc1 = 1.0 - beta1.powi(t);
        let bc2 = 1.0 - beta2.powi(t);
        let bc1_next = 1.0 - beta1.powi(t + 1);
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
            let v_hat = self.v[i] / bc2;
            let numer = if nesterov {
                beta1 * self.m[i] / bc1_next + (1.0 - beta1) * g / bc1
            } else {
                self.m[i] / bc1
            };
            params[i] -= lr * numer / (v_hat.sqrt() + eps);
        }
    }
}

/// Learning-rate schedule evaluated per optimizer step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LrSchedule {
    Constant(f64),
    /// Linear ramp from 0 to `peak` over `warmup` steps, then cosine decay to
    /// 0 at `total`. With `warmup == 0` the schedule starts at `peak`.
    CosineWarmup {
        peak: f64,
        warmup: u64,
        total: u64,
    },
}

impl LrSchedule {
    pub fn at(&self, step: u64) -> f64 {
        match *self {
            LrSchedule::Constant(lr) => lr,
            LrSchedule::CosineWarmup {
                peak,
                warmup,
                total,
            } => {
                if step < warmup {
                    peak * step as f64 / warmup as f64
                } else if step >= total {
                    0.0
                } else if step == warmup {
                    peak
                } else {
                    let span = (total - warmup) as f64;
                    let progress = (step - warmup) as f64 / span;
                    peak * 0.5 * (1.0 + (std::f64::consts::PI * progress).cos())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Scalar transcription of Adam with bias correction, kept deliberately
    /// separate from the vectorized implementation.
    fn adam_scalar(grads: &[f64], lr: f64, nesterov: bool) -> f64 {
        let (b1, b2, eps) = (0.9, 0.999, 1e-8);
        let (mut theta, mut m, mut v) = (0.0f64, 0.0f64, 0.0f64);
        for (k, &g) in grads.iter().enumerate() {
            let t = (k + 1) as i32;
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let v_hat = v / (1.0 - b2.powi(t));
            let numer = if nesterov {
                b1 * m / (1.0 - b1.powi(t + 1)) + (1.0 - b1) * g / (1.0 - b1.powi(t))
            } else {
                m / (1.0 - b1.powi(t))
            };
            theta -= lr * numer / (v_hat.sqrt() + eps);
        }
        theta
    }

    #[test]
    fn matches_scalar_oracle_over_several_steps() {
        for nesterov in [false, true] {
            let grads = [0.5, -0.25, 1.5, 0.03, -2.0];
            let config = AdamConfig {
                nesterov,
                ..AdamConfig::default()
            };
            let mut st = AdamState::new(1, config);
            let mut p = [0.0f64];
            for (k, &g) in grads.iter().enumerate() {
                st.step(&mut p, &[g], 0.01);
                let want = adam_scalar(&grads[..=k], 0.01, nesterov);
                assert_relative_eq!(p[0], want, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn first_step_magnitude_is_roughly_lr() {
        // bias correction cancels the moment decay on step one, so the update
        // is ~lr * sign(g) regardless of gradient scale
        for &g in &[1e-3, 0.5, 40.0] {
            let mut st = AdamState::new(1, AdamConfig::default());
            let mut p = [0.0f64];
            st.step(&mut p, &[g], 0.01);
            assert_relative_eq!(p[0], -0.01, max_relative = 1e-4);
        }
    }

    #[test]
    fn descends_positive_gradients_and_ascends_negated_ones() {
        let mut st = AdamState::new(2, AdamConfig::default());
        let mut p = [1.0f64, 1.0];
        st.step(&mut p, &[0.3, -0.3], 0.1);
        assert!(p[0] < 1.0);
        assert!(p[1] > 1.0);
    }

    #[test]
    fn reset_clears_history() {
        let mut st = AdamState::new(1, AdamConfig::default());
        let mut p = [0.0f64];
        st.step(&mut p, &[1.0], 0.01);
        st.step(&mut p, &[1.0], 0.01);
        assert_eq!(st.steps(), 2);
        st.reset();
        assert_eq!(st.steps(), 0);
        let mut q = [0.0f64];
        let mut fresh = AdamState::new(1, AdamConfig::default());
        let before = p[0];
        st.step(&mut p, &[0.7], 0.01);
        fresh.step(&mut q, &[0.7], 0.01);
        // same delta as a fresh state (up to rounding in the subtraction)
        assert_relative_eq!(p[0] - before, q[0], max_relative = 1e-12);
    }

    #[test]
    fn per_coordinate_state_is_independent() {
        // a vector step must equal two scalar optimizers run side by side
        let mut joint = AdamState::new(2, AdamConfig::default());
        let mut pj = [0.1f64, -0.2];
        let mut a = AdamState::new(1, AdamConfig::default());
        let mut pa = [0.1f64];
        let mut b = AdamState::new(1, AdamConfig::default());
        let mut pb = [-0.2f64];
        for (ga, gb) in [(0.5, -1.0), (0.2, 0.9), (-0.7, 0.0)] {
            joint.step(&mut pj, &[ga, gb], 0.05);
            a.step(&mut pa, &[ga], 0.05);
            b.step(&mut pb, &[gb], 0.05);
        }
        assert_eq!(pj[0], pa[0]);
        assert_eq!(pj[1], pb[0]);
    }

    #[test]
    fn cosine_warmup_hits_exact_endpoints() {
        let s = LrSchedule::CosineWarmup {
            peak: 0.01,
            warmup: 100,
            total: 1000,
        };
        assert_eq!(s.at(0), 0.0);
        assert_eq!(s.at(100), 0.01);
        assert_eq!(s.at(1000), 0.0);
        assert_eq!(s.at(2000), 0.0);
        // midpoint of the decay phase is half the peak
        assert_relative_eq!(s.at(550), 0.005, max_relative = 1e-12);
        // ramp is linear
        assert_relative_eq!(s.at(50), 0.005, max_relative = 1e-12);
    }

    #[test]
    fn zero_warmup_starts_at_peak() {
        let s = LrSchedule::CosineWarmup {
            peak: 0.01,
            warmup: 0,
            total: 10,
        };
        assert_eq!(s.at(0), 0.01);
        assert_eq!(s.at(10), 0.0);
    }

    #[test]
    fn constant_schedule_is_flat() {
        let s = LrSchedule::Constant(3e-4);
        assert_eq!(s.at(0), 3e-4);
        assert_eq!(s.at(123456), 3e-4);
    }

    #[test]
    fn schedule_is_monotone_within_phases() {
        let s = LrSchedule::CosineWarmup {
            peak: 1.0,
            warmup: 10,
            total: 60,
        };
        for k in 0..10 {
            assert!(s.at(k) < s.at(k + 1), "warmup must increase at {k}");
        }
        for k in 10..60 {
            assert!(s.at(k) > s.at(k + 1), "decay must decrease at {k}");
        }
    }
}
