//! voxopt: black-box and gradient-based optimization of binary voxel
//! topologies, with payoff environments ranging from cellular automata to a
//! 2D finite-difference time-domain electromagnetic solver.
//!
//! The crate is organized around three ideas:
//!
//! * a [`design::Design`] is a flat binary voxel grid with row-major,
//!   x-fastest addressing;
//! * a [`env::PayoffEnvironment`] scores designs in `[0, 1]` (and may expose
//!   gradients or fabrication constraints);
//! * an optimizer proposes designs under a strict evaluation budget, and the
//!   run harness records traces, best designs, and summaries.
//!
//! See the `examples/` directory for end-to-end usage of each capability.

pub mod buffer;
pub mod design;
pub mod env;
pub mod error;
pub mod fdtd;
pub mod gol;
pub mod harness;
pub mod nn;
pub mod opt;
pub mod posenc;
pub mod run;
pub mod seed;

pub use design::{Design, GridShape};
pub use env::{Budget, PayoffEnvironment, SyntheticSeparableEnv};
pub use error::VoxError;
pub use opt::{AlgorithmConfig, Optimizer};
pub use run::{run_optimization, run_with_timing, RunOutcome, RunRecord};
