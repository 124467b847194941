//! Minimal neural-network substrate: MLP forward/backward, Adam with
//! optional Nesterov momentum, learning-rate schedules, straight-through
//! estimation, and flat-array checkpoints.

mod adam;
mod checkpoint;
mod mlp;

pub use adam::{AdamConfig, AdamState, LrSchedule};
pub use checkpoint::{load_model, save_model};
pub use mlp::{Gradients, MlpModel, OutputHead, TrainCache};

/// Straight-through forward pass: the non-differentiable sample replaces the
/// probability in the forward value.
#[inline]
pub fn straight_through(sample: f64, _prob: f64) -> f64 {
    sample
}

/// Straight-through backward pass: the upstream gradient w.r.t. the sample is
/// copied to the probability unchanged (identity Jacobian).
#[inline]
pub fn straight_through_grad(upstream: f64) -> f64 {
    upstream
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_value_is_the_sample() {
        assert_eq!(straight_through(1.0, 0.7), 1.0);
        assert_eq!(straight_through(0.0, 0.7), 0.0);
    }

    #[test]
    fn backward_is_identity() {
        assert_eq!(straight_through_grad(1.0), 1.0);
        assert_eq!(straight_through_grad(-2.5), -2.5);
    }

    #[test]
    fn chain_rule_through_a_critic_matches_manual_composition() {
        // critic C(a) = 3 a^2 + a, policy prob p = sigmoid(theta).
        // With a = straight_through(sample, p), dC/dtheta computed via the
        // straight-through path must equal (dC/da at the sample) * dp/dtheta.
        let theta = 0.3f64;
        let p = 1.0 / (1.0 + (-theta).exp());
        let sample = 1.0;
        let a = straight_through(sample, p);
        let dc_da = 6.0 * a + 1.0;
        let dc_dp = straight_through_grad(dc_da);
        let dp_dtheta = p * (1.0 - p);
        let got = dc_dp * dp_dtheta;
        let want = (6.0 * sample + 1.0) * (p * (1.0 - p));
        assert_eq!(got, want);
    }
}
