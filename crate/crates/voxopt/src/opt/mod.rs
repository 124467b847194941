//! Optimization algorithms over binary voxel designs.
//!
//! All algorithms implement [`Optimizer`]: the run loop alternates
//! `propose` / `observe` under a fixed evaluation budget. Batch-oriented
//! algorithms (the evolutionary algorithm, batch PPO) buffer whole
//! generations or rollouts internally while still exposing the one-design-
//! at-a-time interface.

mod bac;
mod bppo;
mod duct;
mod ea;
mod graddesc;
mod iql;
mod random;

pub use bac::{masked_count, BacConfig, BacStats, BanditActorCritic, CriticKind};
pub use bppo::{clipped_objective, BatchPpo, BppoConfig};
pub use duct::{duct_select, DuctConfig, NoisyDuct};
pub use ea::{ea_generation, EaConfig, EvolutionaryAlgorithm};
pub use graddesc::{GradDescConfig, GradientDescent};
pub use iql::{epsilon_at, IndependentQLearning, IqlConfig};
pub use random::RandomSearch;

use crate::design::{Design, GridShape};
use crate::env::PayoffEnvironment;
use crate::error::VoxError;

/// A sequential design optimizer.
///
/// The contract with the run loop: `reset` is called once with the run seed
/// and total budget, then `propose`/`observe` strictly alternate, with `step`
/// counting evaluations from 0. `observe` receives exactly the design that
/// was evaluated together with its payoff, and — only for gradient-based
/// optimizers — the payoff gradient at that design.
pub trait Optimizer: Send {
    fn name(&self) -> &'static str;

    /// Reinitializes all internal state from the run seed. `total_evaluations`
    /// is the budget `T` (some schedules depend on it).
    fn reset(&mut self, seed: u64, total_evaluations: usize);

    /// Produces the design to evaluate at `step` (0-based).
    fn propose(&mut self, step: usize) -> Design;

    /// Feeds back the evaluated design and payoff; `grad` is present only
    /// when [`Optimizer::requires_gradient`] is true.
    fn observe(&mut self, design: &Design, payoff: f64, grad: Option<&[f64]>);

    /// Whether this optimizer needs `evaluate_with_grad` (and a
    /// differentiable environment).
    fn requires_gradient(&self) -> bool {
        false
    }
}

/// Algorithm selector with per-algorithm configuration, as read from run
/// configuration files.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgorithmConfig {
    RandomSearch,
    Duct(DuctConfig),
    Ea(EaConfig),
    Iql(IqlConfig),
    Bac(BacConfig),
    Bppo(BppoConfig),
    GradDesc(GradDescConfig),
}

impl AlgorithmConfig {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmConfig::RandomSearch => "random",
            AlgorithmConfig::Duct(_) => "duct",
            AlgorithmConfig::Ea(_) => "ea",
            AlgorithmConfig::Iql(_) => "iql",
            AlgorithmConfig::Bac(_) => "bac",
            AlgorithmConfig::Bppo(_) => "bppo",
            AlgorithmConfig::GradDesc(_) => "graddesc",
        }
    }

    /// Instantiates the optimizer for `env`, checking compatibility.
    pub fn build(&self, env: &dyn PayoffEnvironment) -> Result<Box<dyn Optimizer>, VoxError> {
        let shape = env.shape();
        let opt: Box<dyn Optimizer> = match self {
            AlgorithmConfig::RandomSearch => Box::new(RandomSearch::new(shape)),
            AlgorithmConfig::Duct(cfg) => Box::new(NoisyDuct::new(cfg.clone(), shape)),
            AlgorithmConfig::Ea(cfg) => Box::new(EvolutionaryAlgorithm::new(cfg.clone(), shape)),
            AlgorithmConfig::Iql(cfg) => Box::new(IndependentQLearning::new(cfg.clone(), shape)),
            AlgorithmConfig::Bac(cfg) => Box::new(BanditActorCritic::new(cfg.clone(), shape)),
            AlgorithmConfig::Bppo(cfg) => Box::new(BatchPpo::new(cfg.clone(), shape)),
            AlgorithmConfig::GradDesc(cfg) => Box::new(GradientDescent::new(cfg.clone(), shape)),
        };
        if opt.requires_gradient() && !env.differentiable() {
            return Err(VoxError::IncompatibleAlgorithm {
                algo: self.name().to_string(),
                env: env.name().to_string(),
            });
        }
        Ok(opt)
    }
}

/// Draws a uniformly random binary design — the shared warmup/baseline move.
pub(crate) fn random_design(shape: GridShape, rng: &mut impl rand::Rng) -> Design {
    let bits: Vec<u8> = (0..shape.len()).map(|_| rng.random_range(0..2u8)).collect();
    Design::new(bits, shape).expect("bits generated to match shape")
}
