//! Search for dense still lifes in Conway's Game of Life.
//!
//! The payoff is `alive_ratio − changed_ratio` after one automaton step, so
//! the optimizer is pushed toward patterns that are both dense and frozen.
//! Batch PPO treats every cell as a bandit agent sharing one policy network
//! over sinusoidal positional features. The best pattern found is printed
//! and rendered to an SVG next to the working directory.
//!
//! ```bash
//! cargo run --release --example gol_still_life
//! ```

use std::fs;

use voxopt::gol::{gol_payoff, GolEnv};
use voxopt::harness::design_svg;
use voxopt::opt::{BatchPpo, BppoConfig};
use voxopt::{run_optimization, Budget, PayoffEnvironment, VoxError};

fn main() -> Result<(), VoxError> {
    let env = GolEnv::default();
    let shape = env.shape();
    let budget = Budget::new(2000)?;
    let seed = 3;

    // Desk-scale network: entropy regularization off because the payoff
    // differences between designs are tiny compared to photonics tasks.
    let config = BppoConfig {
        rollout_size: 32,
        updates_per_rollout: 40,
        minibatch: 2048,
        hidden: vec![32, 32],
        lr: 3e-3,
        entropy_coef: 0.0,
        ..BppoConfig::default()
    };
    let mut algo = BatchPpo::new(config, shape);
    let outcome = run_optimization(&env, &mut algo, budget, seed)?;

    println!(
        "best payoff {:.4} ({} alive cells of {})",
        outcome.best_payoff,
        outcome.best.count_ones(),
        shape.len()
    );
    println!("payoff recomputed from the design: {:.4}", gol_payoff(&outcome.best)?);

    for y in (0..shape.ny).rev() {
        let row: String = (0..shape.nx)
            .map(|x| if outcome.best.at(x, y, 0) == 1 { '#' } else { '.' })
            .collect();
        println!("{row}");
    }

    let svg = design_svg(&outcome.best);
    fs::write("gol_best.svg", svg).expect("write gol_best.svg");
    println!("wrote gol_best.svg");
    Ok(())
}
