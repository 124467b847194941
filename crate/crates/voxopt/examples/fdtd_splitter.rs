//! Split one waveguide into two with a target power ratio.
//!
//! The splitter scene feeds light into a central design region with two
//! output guides. The payoff is `1 − MSE` between the measured output
//! power fractions and the requested targets (65%/35% here). This example
//! inspects the raw detector fluxes for a few hand-built designs rather
//! than optimizing, to show how the measurement works.
//!
//! ```bash
//! cargo run --release --example fdtd_splitter
//! ```

use voxopt::fdtd::{FdtdEnv, FdtdTaskConfig, PhotonicsTask};
use voxopt::{Design, PayoffEnvironment, VoxError};

fn report(env: &FdtdEnv, label: &str, d: &Design) -> Result<(), VoxError> {
    let sim = env.simulate_design(d)?;
    // Detector order: input, top output, bottom output.
    let input = sim.fluxes[0].max(f64::MIN_POSITIVE);
    let top = sim.fluxes[1] / input;
    let bottom = sim.fluxes[2] / input;
    let payoff = env.evaluate(d);
    println!("{label}: top {top:.3}, bottom {bottom:.3}, payoff {payoff:.4}");
    Ok(())
}

fn main() -> Result<(), VoxError> {
    let env = FdtdEnv::splitter(FdtdTaskConfig::default(), (0.65, 0.35))?;
    let shape = env.shape();
    if let PhotonicsTask::Splitter { targets } = env.task() {
        println!("targets: top {:.2}, bottom {:.2}", targets.0, targets.1);
    }

    report(&env, "all air      ", &Design::zeros(shape))?;
    report(&env, "solid block  ", &Design::ones(shape))?;

    // A crude Y: a trunk through the middle third, a vertical junction bar,
    // and one arm toward each output guide.
    let mut y_split = Design::zeros(shape);
    for y in 0..shape.ny {
        for x in 0..shape.nx {
            let trunk = x < shape.nx / 2 && (shape.ny / 3..2 * shape.ny / 3).contains(&y);
            let junction = x == shape.nx / 2;
            let arms = x > shape.nx / 2 && (y < shape.ny / 3 || y >= 2 * shape.ny / 3);
            if trunk || junction || arms {
                y_split.set(shape.index(x, y, 0), 1);
            }
        }
    }
    report(&env, "solid Y trunk", &y_split)?;
    Ok(())
}
