//! Batch proximal policy optimization over per-voxel agents.
//!
//! A shared policy network maps each agent's positional encoding to a
//! Bernoulli probability. Rollouts of whole designs are sampled from a
//! frozen policy snapshot; advantages are payoffs relative to the rollout
//! mean, identical across the agents of one design. Updates maximize the
//! clipped surrogate plus an entropy bonus on minibatches of (agent, action)
//! samples.

use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::design::{Design, GridShape};
use crate::nn::{AdamConfig, AdamState, MlpModel, OutputHead};
use crate::opt::Optimizer;
use crate::posenc::PositionalEncoder;
use crate::seed::{stream_rng, STREAM_ALGO};

#[derive(Debug, Clone, PartialEq)]
pub struct BppoConfig {
    /// Designs sampled per rollout from the frozen policy.
    pub rollout_size: usize,
    /// Gradient updates performed after each rollout.
    pub updates_per_rollout: usize,
    /// Clip range for the policy ratio.
    pub clip: f64,
    /// Weight of the Bernoulli entropy bonus.
    pub entropy_coef: f64,
    pub lr: f64,
    pub hidden: Vec<usize>,
    /// (agent, action) samples per update minibatch.
    pub minibatch: usize,
    /// Positional-encoding frequency bands.
    pub bands: usize,
}

impl Default for BppoConfig {
    fn default() -> Self {
        Self {
            rollout_size: 32,
            updates_per_rollout: 66,
            clip: 0.4978,
            entropy_coef: 0.005759,
            lr: 1e-4,
            hidden: vec![126, 126, 126, 126],
            minibatch: 10_000,
            bands: 8,
        }
    }
}

/// The clipped surrogate for one sample: `min(ρ·A, clip(ρ, 1−ε, 1+ε)·A)`.
pub fn clipped_objective(rho: f64, advantage: f64, clip: f64) -> f64 {
    let clipped = rho.clamp(1.0 - clip, 1.0 + clip);
    (rho * advantage).min(clipped * advantage)
}

/// Probabilities are kept away from exactly 0/1 so ratios and entropy stay
/// finite even when the network saturates in f64.
const PROB_FLOOR: f64 = 1e-12;

fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)
}

pub struct BatchPpo {
    config: BppoConfig,
    shape: GridShape,
    rng: ChaCha12Rng,
    encodings: Array2<f64>,
    policy: MlpModel,
    adam: AdamState,
    /// Rollout designs waiting for evaluation (proposal order).
    pending: Vec<Design>,
    next_pending: usize,
    /// Payoffs collected for the current rollout.
    payoffs: Vec<f64>,
    /// π_old(a=1 | O(n)) per agent, frozen at rollout sampling time.
    old_probs: Vec<f64>,
}

impl BatchPpo {
    pub fn new(config: BppoConfig, shape: GridShape) -> Self {
        let enc = PositionalEncoder::new(shape, config.bands);
        let encodings = enc.encode_all();
        let mut sizes = vec![enc.dim()];
        sizes.extend_from_slice(&config.hidden);
        sizes.push(1);
        let policy = MlpModel::new(&sizes, OutputHead::Sigmoid, 0);
        let adam = AdamState::new(policy.param_count(), AdamConfig::default());
        Self {
            config,
            shape,
            rng: ChaCha12Rng::seed_from_u64(0),
            encodings,
            policy,
            adam,
            pending: Vec::new(),
            next_pending: 0,
            payoffs: Vec::new(),
            old_probs: Vec::new(),
        }
    }

    /// Samples a fresh rollout from the current policy and freezes its
    /// probabilities as π_old.
    fn start_rollout(&mut self) {
        let n = self.shape.len();
        let probs = self
            .policy
            .forward_batch(&self.encodings.view())
            .expect("policy dims");
        self.old_probs = probs.column(0).iter().map(|&p| clamp_prob(p)).collect();
        self.pending = (0..self.config.rollout_size)
            .map(|_| {
                let bits: Vec<u8> = (0..n)
                    .map(|i| u8::from(self.rng.random_range(0.0..1.0) < self.old_probs[i]))
                    .collect();
                Design::new(bits, self.shape).expect("one bit per agent")
            })
            .collect();
        self.next_pending = 0;
        self.payoffs.clear();
    }

    /// The post-rollout update phase: 66 clipped-surrogate steps on
    /// minibatches sampled from the rollout's (design, agent) pairs.
    fn update_phase(&mut self) {
        let n = self.shape.len();
        let rollout = self.pending.len();
        let baseline = self.payoffs.iter().sum::<f64>() / rollout as f64;
        let advantages: Vec<f64> = self.payoffs.iter().map(|r| r - baseline).collect();
        let total = rollout * n;
        let mb = self.config.minibatch.min(total);
        for _ in 0..self.config.updates_per_rollout {
            // sample (design, agent) pairs uniformly with replacement
            let picks: Vec<(usize, usize)> = (0..mb)
                .map(|_| {
                    let flat = self.rng.random_range(0..total);
                    (flat / n, flat % n)
                })
                .collect();
            let mut rows = Array2::zeros((mb, self.encodings.ncols()));
            for (k, &(_, agent)) in picks.iter().enumerate() {
                rows.row_mut(k).assign(&self.encodings.row(agent));
            }
            let cache = self.policy.forward_cached(&rows.view()).expect("policy dims");
            let out = cache.output();
            let mut upstream = Array2::zeros((mb, 1));
            for (k, &(b, agent)) in picks.iter().enumerate() {
                let p = clamp_prob(out[(k, 0)]);
                let p_old = self.old_probs[agent];
                let a = self.pending[b].bits()[agent];
                let adv = advantages[b];
                let (rho, drho_dp) = if a == 1 {
                    (p / p_old, 1.0 / p_old)
                } else {
                    ((1.0 - p) / (1.0 - p_old), -1.0 / (1.0 - p_old))
                };
                // min(ρA, clip(ρ)A): the clipped branch has zero gradient
                // when it is strictly active (ρ outside the clip range)
                let unclipped = rho * adv;
                let clipped = rho.clamp(1.0 - self.config.clip, 1.0 + self.config.clip) * adv;
                let dsurr_drho = if unclipped <= clipped { adv } else { 0.0 };
                let dentropy_dp = (1.0 - p).ln() - p.ln();
                let dobj_dp = dsurr_drho * drho_dp + self.config.entropy_coef * dentropy_dp;
                // maximize: negate for Adam; average over the minibatch
                upstream[(k, 0)] = -dobj_dp / mb as f64;
            }
            let grads = self.policy.backward(&cache, &upstream.view());
            self.adam
                .step(self.policy.params_mut(), &grads.params, self.config.lr);
        }
        self.pending.clear();
        self.next_pending = 0;
        self.payoffs.clear();
    }
}

impl Optimizer for BatchPpo {
    fn name(&self) -> &'static str {
        "bppo"
    }

    fn reset(&mut self, seed: u64, _total_evaluations: usize) {
        self.rng = stream_rng(seed, STREAM_ALGO);
        let policy_seed = self.rng.random();
        self.policy.reinitialize(policy_seed);
        self.adam.reset();
        self.pending.clear();
        self.next_pending = 0;
        self.payoffs.clear();
        self.old_probs.clear();
    }

    fn propose(&mut self, _step: usize) -> Design {
        if self.next_pending >= self.pending.len() {
            self.start_rollout();
        }
        let d = self.pending[self.next_pending].clone();
        self.next_pending += 1;
        d
    }

    fn observe(&mut self, _design: &Design, payoff: f64, _grad: Option<&[f64]>) {
        self.payoffs.push(payoff);
        if self.payoffs.len() == self.pending.len() {
            self.update_phase();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn clip_matches_worked_example() {
        // ρ=2, A=1, ε=0.4978 → min(2, 1.4978) = 1.4978
        assert_relative_eq!(clipped_objective(2.0, 1.0, 0.4978), 1.4978, max_relative = 1e-12);
    }

    #[test]
    fn ratio_one_leaves_clip_inactive() {
        for &adv in &[-1.0, -0.3, 0.0, 0.5, 2.0] {
            assert_eq!(clipped_objective(1.0, adv, 0.4978), adv);
        }
    }

    #[test]
    fn negative_advantage_clips_from_below() {
        // for A<0, min picks the *more* negative branch: ρ clamped upward
        // means clip(ρ)·A is larger (less negative), so the unclipped term
        // wins at high ρ
        assert_eq!(clipped_objective(3.0, -1.0, 0.5), -3.0);
        // at low ρ the clipped branch floors at (1-ε)·A
        assert_eq!(clipped_objective(0.1, -1.0, 0.5), -0.5);
    }

    #[test]
    fn defaults_match_documented_table() {
        let cfg = BppoConfig::default();
        assert_eq!(cfg.rollout_size, 32);
        assert_eq!(cfg.updates_per_rollout, 66);
        assert_eq!(cfg.clip, 0.4978);
        assert_eq!(cfg.entropy_coef, 0.005759);
        assert_eq!(cfg.lr, 1e-4);
        assert_eq!(cfg.hidden, vec![126, 126, 126, 126]);
        assert_eq!(cfg.minibatch, 10_000);
    }

    fn small_config() -> BppoConfig {
        BppoConfig {
            rollout_size: 8,
            updates_per_rollout: 4,
            hidden: vec![12, 12],
            minibatch: 64,
            bands: 1,
            ..BppoConfig::default()
        }
    }

    #[test]
    fn equal_payoffs_without_entropy_leave_policy_unchanged() {
        let shape = GridShape::new(3, 2, 1).unwrap();
        let cfg = BppoConfig {
            entropy_coef: 0.0,
            ..small_config()
        };
        let mut ppo = BatchPpo::new(cfg, shape);
        ppo.reset(4, 100);
        let before = ppo.policy.params().to_vec();
        for step in 0..8 {
            let d = ppo.propose(step);
            ppo.observe(&d, 0.42, None); // identical payoffs → zero advantage
        }
        assert_eq!(ppo.policy.params(), &before[..]);
    }

    #[test]
    fn updates_are_invariant_to_payoff_shifts() {
        let shape = GridShape::new(3, 2, 1).unwrap();
        let mut a = BatchPpo::new(small_config(), shape);
        let mut b = BatchPpo::new(small_config(), shape);
        a.reset(9, 100);
        b.reset(9, 100);
        // dyadic payoffs and shift keep all f64 sums exact, so the shifted
        // run's advantages are bit-identical to the unshifted run's
        let payoffs = [0.0, 0.25, 0.5, 1.0, 0.75, 0.25, 0.5, 0.0];
        for step in 0..8 {
            let da = a.propose(step);
            let db = b.propose(step);
            assert_eq!(da.bits(), db.bits());
            a.observe(&da, payoffs[step], None);
            b.observe(&db, payoffs[step] + 2.0, None);
        }
        // advantages are identical, so the trained parameters must be too
        assert_eq!(a.policy.params(), b.policy.params());
    }

    #[test]
    fn positive_advantage_for_ones_increases_one_probabilities() {
        // payoff = fraction of ones → designs above the rollout mean push
        // the policy toward action 1
        let shape = GridShape::new(3, 3, 1).unwrap();
        let cfg = BppoConfig {
            lr: 5e-3,
            updates_per_rollout: 10,
            ..small_config()
        };
        let mut ppo = BatchPpo::new(cfg, shape);
        ppo.reset(2, 1000);
        let n = shape.len() as f64;
        let before: f64 = {
            let p = ppo.policy.forward_batch(&ppo.encodings.view()).unwrap();
            p.iter().sum::<f64>() / n
        };
        for step in 0..400 {
            let d = ppo.propose(step);
            let r = d.count_ones() as f64 / n;
            ppo.observe(&d, r, None);
        }
        let after: f64 = {
            let p = ppo.policy.forward_batch(&ppo.encodings.view()).unwrap();
            p.iter().sum::<f64>() / n
        };
        assert!(
            after > before + 0.2,
            "mean one-probability {before:.3} -> {after:.3}"
        );
    }

    #[test]
    fn rollouts_are_sampled_from_a_frozen_snapshot() {
        let shape = GridShape::new(2, 2, 1).unwrap();
        let mut ppo = BatchPpo::new(small_config(), shape);
        ppo.reset(5, 100);
        let first = ppo.propose(0);
        let frozen = ppo.old_probs.clone();
        for step in 1..8 {
            ppo.propose(step);
            // π_old must not move while the rollout is in flight
            assert_eq!(ppo.old_probs, frozen);
        }
        drop(first);
    }
}
