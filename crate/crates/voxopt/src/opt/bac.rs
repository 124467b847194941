//! Bandit actor-critic: a learned differentiable surrogate of the payoff
//! (the critic) plus a per-voxel stochastic policy improved against it.
//!
//! Per outer step the critic is refreshed on the replay buffer, the policy
//! is *reinitialized* and ascended against the critic through a
//! straight-through estimator with heavy per-step gradient masking, and one
//! joint action sampled from the improved policy is sent to the environment.

use ndarray::{s, Array2};
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::buffer::ExperienceBuffer;
use crate::design::{Design, GridShape};
use crate::nn::{AdamConfig, AdamState, MlpModel, OutputHead};
use crate::opt::{random_design, Optimizer};
use crate::posenc::PositionalEncoder;
use crate::seed::{stream_rng, STREAM_ALGO, STREAM_BUFFER};

/// Critic architecture selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticKind {
    /// Shared per-agent trunk on `[posenc(i), a_i]`, mean-pooled over agents,
    /// then a scalar head. Size-independent of N except through the pooling.
    Pooled,
    /// Plain MLP on the flat action vector (ablation variant).
    Flat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacConfig {
    /// Critic gradient steps per outer step (U).
    pub critic_steps: usize,
    /// Policy gradient steps per outer step (G).
    pub policy_steps: usize,
    /// Batch size for critic regression (B); also the number of uniform
    /// warmup samples collected before training starts.
    pub batch: usize,
    pub critic_lr: f64,
    pub policy_lr: f64,
    pub critic_hidden: Vec<usize>,
    pub policy_hidden: Vec<usize>,
    /// Fraction of agents whose policy gradients are zeroed each step (m);
    /// exactly `round(m·N)` agents are masked.
    pub mask_fraction: f64,
    /// Outer-step period for critic reinitialization.
    pub critic_reinit_period: usize,
    /// After a reinitialization the critic trains `multiplier · U` steps.
    pub reinit_burst_multiplier: usize,
    /// Positional-encoding frequency bands.
    pub bands: usize,
    pub critic: CriticKind,
}

impl Default for BacConfig {
    fn default() -> Self {
        Self {
            critic_steps: 128,
            policy_steps: 1024,
            batch: 32,
            critic_lr: 1e-4,
            policy_lr: 1e-3,
            critic_hidden: vec![256, 256],
            policy_hidden: vec![128, 128],
            mask_fraction: 0.95,
            critic_reinit_period: 250,
            reinit_burst_multiplier: 512,
            bands: 8,
            critic: CriticKind::Pooled,
        }
    }
}

/// Number of agents masked per policy step: `round(fraction · n)`.
pub fn masked_count(fraction: f64, n: usize) -> usize {
    (fraction * n as f64).round() as usize
}

/// Run counters exposed for bookkeeping checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BacStats {
    pub critic_reinits: usize,
    pub critic_update_steps: usize,
    pub policy_reinits: usize,
    pub policy_update_steps: usize,
}

/// The payoff surrogate. Both variants regress design → payoff and expose
/// the gradient of their prediction with respect to the action bits.
enum Critic {
    Pooled {
        trunk: MlpModel,
        head: MlpModel,
        trunk_adam: AdamState,
        head_adam: AdamState,
    },
    Flat {
        model: MlpModel,
        adam: AdamState,
    },
}

impl Critic {
    fn build(cfg: &BacConfig, n: usize, enc_dim: usize) -> Self {
        match cfg.critic {
            CriticKind::Pooled => {
                let mut trunk_sizes = vec![enc_dim + 1];
                trunk_sizes.extend_from_slice(&cfg.critic_hidden);
                let trunk = MlpModel::new(&trunk_sizes, OutputHead::Relu, 0);
                let head = MlpModel::new(&[*cfg.critic_hidden.last().unwrap(), 1], OutputHead::Linear, 0);
                let trunk_adam = AdamState::new(trunk.param_count(), AdamConfig::default());
                let head_adam = AdamState::new(head.param_count(), AdamConfig::default());
                Critic::Pooled {
                    trunk,
                    head,
                    trunk_adam,
                    head_adam,
                }
            }
            CriticKind::Flat => {
                let mut sizes = vec![n];
                sizes.extend_from_slice(&cfg.critic_hidden);
                sizes.push(1);
                let model = MlpModel::new(&sizes, OutputHead::Linear, 0);
                let adam = AdamState::new(model.param_count(), AdamConfig::default());
                Critic::Flat { model, adam }
            }
        }
    }

    fn reinitialize(&mut self, seed: u64) {
        match self {
            Critic::Pooled {
                trunk,
                head,
                trunk_adam,
                head_adam,
            } => {
                trunk.reinitialize(seed);
                head.reinitialize(seed.wrapping_add(1));
                trunk_adam.reset();
                head_adam.reset();
            }
            Critic::Flat { model, adam } => {
                model.reinitialize(seed);
                adam.reset();
            }
        }
    }

    /// Per-agent input rows `[posenc(i), a_i]` for a batch of designs.
    fn pooled_rows(designs: &[&Design], encodings: &Array2<f64>) -> Array2<f64> {
        let n = encodings.nrows();
        let dim = encodings.ncols();
        let mut rows = Array2::zeros((designs.len() * n, dim + 1));
        for (b, d) in designs.iter().enumerate() {
            for i in 0..n {
                let mut row = rows.row_mut(b * n + i);
                row.slice_mut(s![..dim]).assign(&encodings.row(i));
                row[dim] = d.bits()[i] as f64;
            }
        }
        rows
    }

    /// Predicted payoffs for a batch of designs.
    fn values(&self, designs: &[&Design], encodings: &Array2<f64>) -> Vec<f64> {
        match self {
            Critic::Pooled { trunk, head, .. } => {
                let n = encodings.nrows();
                let rows = Self::pooled_rows(designs, encodings);
                let feats = trunk.forward_batch(&rows.view()).expect("trunk dims");
                let h = feats.ncols();
                let mut pooled = Array2::zeros((designs.len(), h));
                for b in 0..designs.len() {
                    let block = feats.slice(s![b * n..(b + 1) * n, ..]);
                    pooled
                        .row_mut(b)
                        .assign(&block.mean_axis(ndarray::Axis(0)).unwrap());
                }
                let out = head.forward_batch(&pooled.view()).expect("head dims");
                out.column(0).to_vec()
            }
            Critic::Flat { model, .. } => {
                let mut rows = Array2::zeros((designs.len(), designs[0].bits().len()));
                for (b, d) in designs.iter().enumerate() {
                    for (i, &bit) in d.bits().iter().enumerate() {
                        rows[(b, i)] = bit as f64;
                    }
                }
                let out = model.forward_batch(&rows.view()).expect("flat dims");
                out.column(0).to_vec()
            }
        }
    }

    /// One Adam step minimizing mean squared regression error on `batch`.
    fn train_step(&mut self, batch: &[(&Design, f64)], encodings: &Array2<f64>, lr: f64) {
        let designs: Vec<&Design> = batch.iter().map(|(d, _)| *d).collect();
        match self {
            Critic::Pooled {
                trunk,
                head,
                trunk_adam,
                head_adam,
            } => {
                let n = encodings.nrows();
                let b_count = designs.len();
                let rows = Self::pooled_rows(&designs, encodings);
                let trunk_cache = trunk.forward_cached(&rows.view()).expect("trunk dims");
                let feats = trunk_cache.output();
                let h = feats.ncols();
                let mut pooled = Array2::zeros((b_count, h));
                for b in 0..b_count {
                    let block = feats.slice(s![b * n..(b + 1) * n, ..]);
                    pooled
                        .row_mut(b)
                        .assign(&block.mean_axis(ndarray::Axis(0)).unwrap());
                }
                let head_cache = head.forward_cached(&pooled.view()).expect("head dims");
                let out = head_cache.output();
                let mut upstream = Array2::zeros((b_count, 1));
                for (b, (_, r)) in batch.iter().enumerate() {
                    upstream[(b, 0)] = 2.0 * (out[(b, 0)] - r) / b_count as f64;
                }
                let head_grads = head.backward(&head_cache, &upstream.view());
                // distribute pooled-feature gradients back to agent rows
                let mut trunk_upstream = Array2::zeros((b_count * n, h));
                for b in 0..b_count {
                    let per_row = head_grads.input.row(b).mapv(|v| v / n as f64);
                    for i in 0..n {
                        trunk_upstream.row_mut(b * n + i).assign(&per_row);
                    }
                }
                let trunk_grads = trunk.backward(&trunk_cache, &trunk_upstream.view());
                head_adam.step(head.params_mut(), &head_grads.params, lr);
                trunk_adam.step(trunk.params_mut(), &trunk_grads.params, lr);
            }
            Critic::Flat { model, adam } => {
                let b_count = designs.len();
                let n = designs[0].bits().len();
                let mut rows = Array2::zeros((b_count, n));
                for (b, d) in designs.iter().enumerate() {
                    for (i, &bit) in d.bits().iter().enumerate() {
                        rows[(b, i)] = bit as f64;
                    }
                }
                let cache = model.forward_cached(&rows.view()).expect("flat dims");
                let out = cache.output();
                let mut upstream = Array2::zeros((b_count, 1));
                for (b, (_, r)) in batch.iter().enumerate() {
                    upstream[(b, 0)] = 2.0 * (out[(b, 0)] - r) / b_count as f64;
                }
                let grads = model.backward(&cache, &upstream.view());
                adam.step(model.params_mut(), &grads.params, lr);
            }
        }
    }

    /// Gradient of the predicted payoff with respect to each action bit,
    /// evaluated at the given joint action.
    fn action_grad(&self, bits: &[u8], encodings: &Array2<f64>) -> Vec<f64> {
        match self {
            Critic::Pooled { trunk, head, .. } => {
                let n = encodings.nrows();
                let dim = encodings.ncols();
                let mut rows = Array2::zeros((n, dim + 1));
                rows.slice_mut(s![.., ..dim]).assign(encodings);
                for (i, &b) in bits.iter().enumerate() {
                    rows[(i, dim)] = b as f64;
                }
                let trunk_cache = trunk.forward_cached(&rows.view()).expect("trunk dims");
                let feats = trunk_cache.output();
                let pooled = feats
                    .mean_axis(ndarray::Axis(0))
                    .unwrap()
                    .into_shape_with_order((1, feats.ncols()))
                    .unwrap();
                let head_cache = head.forward_cached(&pooled.view()).expect("head dims");
                let one = Array2::from_elem((1, 1), 1.0);
                let head_grads = head.backward(&head_cache, &one.view());
                let mut trunk_upstream = Array2::zeros((n, feats.ncols()));
                let per_row = head_grads.input.row(0).mapv(|v| v / n as f64);
                for i in 0..n {
                    trunk_upstream.row_mut(i).assign(&per_row);
                }
                let trunk_grads = trunk.backward(&trunk_cache, &trunk_upstream.view());
                trunk_grads.input.column(dim).to_vec()
            }
            Critic::Flat { model, .. } => {
                let n = bits.len();
                let mut row = Array2::zeros((1, n));
                for (i, &b) in bits.iter().enumerate() {
                    row[(0, i)] = b as f64;
                }
                let cache = model.forward_cached(&row.view()).expect("flat dims");
                let one = Array2::from_elem((1, 1), 1.0);
                let grads = model.backward(&cache, &one.view());
                grads.input.row(0).to_vec()
            }
        }
    }
}

pub struct BanditActorCritic {
    config: BacConfig,
    shape: GridShape,
    rng: ChaCha12Rng,
    buffer_rng: ChaCha12Rng,
    buffer: ExperienceBuffer,
    encodings: Array2<f64>,
    policy: MlpModel,
    policy_adam: AdamState,
    critic: Critic,
    /// Post-warmup proposals made so far.
    outer_steps: usize,
    stats: BacStats,
}

impl BanditActorCritic {
    pub fn new(config: BacConfig, shape: GridShape) -> Self {
        assert!(
            (0.0..=1.0).contains(&config.mask_fraction),
            "mask_fraction must be a fraction"
        );
        assert!(!config.critic_hidden.is_empty(), "critic needs hidden layers");
        let enc = PositionalEncoder::new(shape, config.bands);
        let encodings = enc.encode_all();
        let mut policy_sizes = vec![enc.dim()];
        policy_sizes.extend_from_slice(&config.policy_hidden);
        policy_sizes.push(1);
        let policy = MlpModel::new(&policy_sizes, OutputHead::Sigmoid, 0);
        let policy_adam = AdamState::new(policy.param_count(), AdamConfig::default());
        let critic = Critic::build(&config, shape.len(), enc.dim());
        Self {
            buffer: ExperienceBuffer::new(config.batch.max(1)),
            config,
            shape,
            rng: ChaCha12Rng::seed_from_u64(0),
            buffer_rng: ChaCha12Rng::seed_from_u64(0),
            encodings,
            policy,
            policy_adam,
            critic,
            outer_steps: 0,
            stats: BacStats::default(),
        }
    }

    pub fn stats(&self) -> BacStats {
        self.stats
    }

    /// Critic prediction for a design (exposed for tests and examples).
    pub fn critic_value(&self, design: &Design) -> f64 {
        self.critic.values(&[design], &self.encodings)[0]
    }

    fn critic_phase(&mut self) {
        let period = self.config.critic_reinit_period;
        let steps = if period > 0 && self.outer_steps > 0 && self.outer_steps % period == 0 {
            let seed = self.rng.random();
            self.critic.reinitialize(seed);
            self.stats.critic_reinits += 1;
            self.config.reinit_burst_multiplier * self.config.critic_steps
        } else {
            self.config.critic_steps
        };
        for _ in 0..steps {
            let batch = self
                .buffer
                .sample(self.config.batch, &mut self.buffer_rng)
                .expect("buffer holds warmup samples");
            let batch: Vec<(&Design, f64)> = batch.iter().map(|(d, r)| (d, *r)).collect();
            self.critic
                .train_step(&batch, &self.encodings, self.config.critic_lr);
            self.stats.critic_update_steps += 1;
        }
    }

    /// Reinitializes the policy and ascends it against the critic for G
    /// steps using straight-through gradients with per-step masking.
    fn policy_phase(&mut self) {
        let seed = self.rng.random();
        self.policy.reinitialize(seed);
        self.policy_adam.reset();
        self.stats.policy_reinits += 1;
        self.policy_improve_steps();
    }

    /// The G ascent steps of the policy phase (without the reinit).
    fn policy_improve_steps(&mut self) {
        let n = self.shape.len();
        let masked = masked_count(self.config.mask_fraction, n);
        for _ in 0..self.config.policy_steps {
            let cache = self
                .policy
                .forward_cached(&self.encodings.view())
                .expect("policy dims");
            let probs = cache.output();
            let bits: Vec<u8> = (0..n)
                .map(|i| u8::from(self.rng.random_range(0.0..1.0) < probs[(i, 0)]))
                .collect();
            let dc_da = self.critic.action_grad(&bits, &self.encodings);
            let mut upstream = Array2::zeros((n, 1));
            for i in 0..n {
                // straight-through: d payoff / d prob ≈ d payoff / d action;
                // negated because Adam descends and we maximize
                upstream[(i, 0)] = -dc_da[i];
            }
            for i in sample(&mut self.rng, n, masked) {
                upstream[(i, 0)] = 0.0;
            }
            let grads = self.policy.backward(&cache, &upstream.view());
            self.policy_adam
                .step(self.policy.params_mut(), &grads.params, self.config.policy_lr);
            self.stats.policy_update_steps += 1;
        }
    }

    fn sample_from_policy(&mut self) -> Design {
        let probs = self
            .policy
            .forward_batch(&self.encodings.view())
            .expect("policy dims");
        let bits: Vec<u8> = (0..self.shape.len())
            .map(|i| u8::from(self.rng.random_range(0.0..1.0) < probs[(i, 0)]))
            .collect();
        Design::new(bits, self.shape).expect("one bit per agent")
    }
}

impl Optimizer for BanditActorCritic {
    fn name(&self) -> &'static str {
        "bac"
    }

    fn reset(&mut self, seed: u64, total_evaluations: usize) {
        self.rng = stream_rng(seed, STREAM_ALGO);
        self.buffer_rng = stream_rng(seed, STREAM_BUFFER);
        // the replay buffer is unbounded within a run: every experience is
        // recorded, and a run makes at most `total_evaluations` of them
        self.buffer = ExperienceBuffer::new(total_evaluations.max(1));
        let critic_seed = self.rng.random();
        self.critic.reinitialize(critic_seed);
        let policy_seed = self.rng.random();
        self.policy.reinitialize(policy_seed);
        self.policy_adam.reset();
        self.outer_steps = 0;
        self.stats = BacStats::default();
    }

    fn propose(&mut self, step: usize) -> Design {
        if step < self.config.batch {
            // warmup: collect B experiences from uniformly sampled actions
            return random_design(self.shape, &mut self.rng);
        }
        self.critic_phase();
        self.policy_phase();
        self.outer_steps += 1;
        self.sample_from_policy()
    }

    fn observe(&mut self, design: &Design, payoff: f64, _grad: Option<&[f64]>) {
        self.buffer.push(design.clone(), payoff);
    }
}
