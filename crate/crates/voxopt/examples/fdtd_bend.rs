//! Route light around a 90° corner with the 2D FDTD environment.
//!
//! A waveguide enters from the left and exits through the bottom; the
//! design region in the corner decides how much power makes the turn.
//! Three designs are compared: empty (light sprays into the corner),
//! a hand-drawn L-bend of solid silicon, and a short Batch PPO run that
//! beats both. The final field of the best design is written as an SVG.
//!
//! This example runs a few hundred wave simulations; expect roughly a
//! minute in release mode.
//!
//! ```bash
//! cargo run --release --example fdtd_bend
//! ```

use std::fs;

use voxopt::fdtd::{FdtdEnv, FdtdTaskConfig};
use voxopt::harness::field_svg;
use voxopt::opt::{BatchPpo, BppoConfig};
use voxopt::{run_optimization, Budget, Design, PayoffEnvironment, VoxError};

fn main() -> Result<(), VoxError> {
    let env = FdtdEnv::bend(FdtdTaskConfig::default())?;
    let shape = env.shape();

    let empty = Design::zeros(shape);
    println!("all-air corner transmission:   {:.4}", env.evaluate(&empty));

    // Hand-drawn L: keep the lower-left block of the design square solid so
    // the input guide sweeps into the downward guide.
    let mut bend = Design::zeros(shape);
    for y in 0..shape.ny {
        for x in 0..shape.nx {
            if x <= shape.nx / 2 || y <= shape.ny / 2 {
                bend.set(shape.index(x, y, 0), 1);
            }
        }
    }
    println!("hand-drawn L transmission:     {:.4}", env.evaluate(&bend));

    let config = BppoConfig {
        rollout_size: 25,
        updates_per_rollout: 40,
        minibatch: 2048,
        hidden: vec![64, 64],
        lr: 3e-4,
        ..BppoConfig::default()
    };
    let mut algo = BatchPpo::new(config, shape);
    let outcome = run_optimization(&env, &mut algo, Budget::new(250)?, 1)?;
    println!("optimized transmission (T=250): {:.4}", outcome.best_payoff);

    let sim = env.simulate_design(&outcome.best)?;
    fs::write("bend_field.svg", field_svg(&sim.final_ez)).expect("write bend_field.svg");
    println!("wrote bend_field.svg");
    Ok(())
}
