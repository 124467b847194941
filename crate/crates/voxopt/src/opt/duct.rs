//! Decoupled UCB over per-voxel agents with a noise-perturbed exploration
//! term.
//!
//! Every voxel keeps independent visit counts and reward sums per action.
//! After a uniform-random warmup phase, each agent picks
//! `argmax_a  w_a/v_a + g·c·sqrt(v_0+v_1)/v_a` with `g` drawn fresh per
//! (step, agent) from a normal distribution; all agents then share the
//! observed payoff.

use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_distr::{Distribution, Normal};

use crate::design::{Design, GridShape};
use crate::opt::{random_design, Optimizer};
use crate::seed::{stream_rng, STREAM_ALGO};

#[derive(Debug, Clone, PartialEq)]
pub struct DuctConfig {
    /// Exploration constant `c`.
    pub exploration: f64,
    /// Mean of the multiplicative exploration noise `g`.
    pub noise_mean: f64,
    /// Standard deviation of the exploration noise (the distribution is
    /// specified only by its mean; unit variance is the documented default).
    pub noise_std: f64,
    /// When false, `g` is pinned to 1 (deterministic UCB scores).
    pub noise_enabled: bool,
    /// Number of initial steps with uniformly random joint actions.
    pub warmup_random_steps: usize,
}

impl Default for DuctConfig {
    fn default() -> Self {
        Self {
            exploration: 0.2145,
            noise_mean: 0.3242,
            noise_std: 1.0,
            noise_enabled: true,
            warmup_random_steps: 50,
        }
    }
}

/// Scores one agent's two actions and returns the argmax (ties and fully
/// unvisited agents resolve to action 0; a single unvisited action is taken
/// unconditionally).
pub fn duct_select(visits: [u64; 2], reward_sums: [f64; 2], c: f64, g: f64) -> u8 {
    if visits[0] == 0 {
        return 0;
    }
    if visits[1] == 0 {
        return 1;
    }
    let total = (visits[0] + visits[1]) as f64;
    let score = |a: usize| {
        reward_sums[a] / visits[a] as f64 + g * c * total.sqrt() / visits[a] as f64
    };
    if score(1) > score(0) {
        1
    } else {
        0
    }
}

pub struct NoisyDuct {
    config: DuctConfig,
    shape: GridShape,
    rng: ChaCha12Rng,
    /// visits[n][a] — how often agent n played action a.
    visits: Vec<[u64; 2]>,
    /// reward_sums[n][a] — total payoff credited to agent n's action a.
    reward_sums: Vec<[f64; 2]>,
}

impl NoisyDuct {
    pub fn new(config: DuctConfig, shape: GridShape) -> Self {
        let n = shape.len();
        Self {
            config,
            shape,
            rng: ChaCha12Rng::seed_from_u64(0),
            visits: vec![[0, 0]; n],
            reward_sums: vec![[0.0, 0.0]; n],
        }
    }

    /// Total visits per agent (both actions). Uniform across agents by
    /// construction: every observation updates every agent once.
    pub fn visit_total(&self, agent: usize) -> u64 {
        self.visits[agent][0] + self.visits[agent][1]
    }
}

impl Optimizer for NoisyDuct {
    fn name(&self) -> &'static str {
        "duct"
    }

    fn reset(&mut self, seed: u64, _total_evaluations: usize) {
        self.rng = stream_rng(seed, STREAM_ALGO);
        self.visits.fill([0, 0]);
        self.reward_sums.fill([0.0, 0.0]);
    }

    fn propose(&mut self, step: usize) -> Design {
        if step < self.config.warmup_random_steps {
            return random_design(self.shape, &mut self.rng);
        }
        let noise = Normal::new(self.config.noise_mean, self.config.noise_std)
            .expect("valid normal parameters");
        let bits: Vec<u8> = (0..self.shape.len())
            .map(|n| {
                // one noise draw per (step, agent), shared by both actions
                let g = if self.config.noise_enabled {
                    noise.sample(&mut self.rng)
                } else {
                    1.0
                };
                duct_select(self.visits[n], self.reward_sums[n], self.config.exploration, g)
            })
            .collect();
        Design::new(bits, self.shape).expect("one bit per agent")
    }

    fn observe(&mut self, design: &Design, payoff: f64, _grad: Option<&[f64]>) {
        for (n, &a) in design.bits().iter().enumerate() {
            let a = a as usize;
            self.visits[n][a] += 1;
            self.reward_sums[n][a] += payoff;
        }
    }
}
