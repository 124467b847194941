//! Command-line front end: run configured experiments, evaluate stored
//! designs, probe robustness, and render designs or field snapshots to
//! SVG. All heavy lifting lives in the library.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use voxopt::fdtd::{load_snapshot, FdtdEnv};
use voxopt::harness::{
    design_svg, field_svg, robustness_curve, run_experiment, EnvironmentConfig, ExperimentConfig,
};
use voxopt::{Design, VoxError};

#[derive(Parser)]
#[command(
    name = "voxopt",
    version,
    about = "Binary-topology optimization: bandit optimizers against \
             Game-of-Life, synthetic, and photonic payoff environments"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment described by a TOML config file.
    Run {
        config: PathBuf,
        /// Replace the config's seed list with this single seed.
        #[arg(long)]
        seed_override: Option<u64>,
        /// Override the evaluation budget T.
        #[arg(long)]
        budget: Option<usize>,
        /// Override the output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Override the parallel worker count (0 = all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Evaluate a stored design in an environment and print its payoff.
    ///
    /// ENV is an environment kind (gol, synthetic, fdtd_bend,
    /// fdtd_splitter) with default parameters, or a config file path
    /// whose [environment] section is used.
    Eval {
        env: String,
        design: PathBuf,
        /// Master seed for seeded environments (synthetic targets).
        #[arg(long)]
        seed_override: Option<u64>,
        /// For FDTD environments: also write the final field snapshot.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Evaluate a stored design under random voxel errors using the
    /// config's environment and analysis settings.
    Robustness {
        config: PathBuf,
        design: PathBuf,
        /// Master seed for the perturbation draws (default: the config's
        /// first seed).
        #[arg(long)]
        seed_override: Option<u64>,
        /// Also write robustness.csv into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Render a design (.pbd) or field snapshot to an SVG image.
    Render {
        input: PathBuf,
        /// Output SVG path.
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn percent(p: f64) -> String {
    format!("{:.1}%", p * 100.0)
}

fn environment_spec(arg: &str) -> Result<EnvironmentConfig, VoxError> {
    Ok(match arg {
        "gol" => EnvironmentConfig::Gol {
            width: 32,
            height: 32,
        },
        "synthetic" => EnvironmentConfig::Synthetic { n: 16 },
        "fdtd_bend" => EnvironmentConfig::FdtdBend(Default::default()),
        "fdtd_splitter" => EnvironmentConfig::FdtdSplitter {
            task: Default::default(),
            targets: voxopt::fdtd::PhotonicsTask::DEFAULT_SPLIT,
        },
        path if Path::new(path).is_file() => {
            ExperimentConfig::from_path(Path::new(path))?.environment
        }
        other => {
            return Err(VoxError::Config(format!(
                "unknown environment `{other}` (expected gol, synthetic, fdtd_bend, \
                 fdtd_splitter, or a config file path)"
            )))
        }
    })
}

fn cmd_run(
    config: &Path,
    seed_override: Option<u64>,
    budget: Option<usize>,
    out_dir: Option<PathBuf>,
    jobs: Option<usize>,
) -> Result<(), VoxError> {
    let mut cfg = ExperimentConfig::from_path(config)?;
    if let Some(seed) = seed_override {
        cfg.seeds = vec![seed];
    }
    if let Some(t) = budget {
        if t == 0 {
            return Err(VoxError::Config("--budget must be at least 1".into()));
        }
        cfg.budget = t;
    }
    if let Some(dir) = out_dir {
        cfg.out_dir = dir;
    }
    if let Some(j) = jobs {
        cfg.jobs = j;
    }

    println!(
        "{} x {} | T = {} | {} seed(s) -> {}",
        cfg.environment.kind_name(),
        cfg.algorithm.name(),
        cfg.budget,
        cfg.seeds.len(),
        cfg.out_dir.display()
    );
    let result = run_experiment(&cfg)?;
    for run in &result.runs {
        println!(
            "  seed {:>3}: best {}",
            run.seed,
            percent(run.outcome.best_payoff)
        );
    }
    println!(
        "aggregate: mean {} | std {}",
        percent(result.mean_best),
        percent(result.std_best)
    );
    Ok(())
}

fn cmd_eval(
    env_arg: &str,
    design: &Path,
    seed_override: Option<u64>,
    snapshot: Option<PathBuf>,
) -> Result<(), VoxError> {
    let spec = environment_spec(env_arg)?;
    let env = spec.build(seed_override.unwrap_or(0))?;
    let d = Design::load_pbd(design)?;
    if d.shape() != env.shape() {
        return Err(VoxError::ShapeMismatch(format!(
            "design is {:?} but {} expects {:?}",
            d.shape(),
            env.name(),
            env.shape()
        )));
    }
    let payoff = env.evaluate(&d);
    println!("{}: payoff {} ({payoff})", env.name(), percent(payoff));

    if let Some(out) = snapshot {
        let fdtd = match &spec {
            EnvironmentConfig::FdtdBend(task) => FdtdEnv::bend(task.clone())?,
            EnvironmentConfig::FdtdSplitter { task, targets } => {
                FdtdEnv::splitter(task.clone(), *targets)?
            }
            _ => {
                return Err(VoxError::Config(
                    "--snapshot needs an FDTD environment".into(),
                ))
            }
        };
        let sim = fdtd.simulate_design(&d)?;
        voxopt::fdtd::save_snapshot(&out, &sim.final_ez)?;
        println!("field snapshot -> {}", out.display());
    }
    Ok(())
}

fn cmd_robustness(
    config: &Path,
    design: &Path,
    seed_override: Option<u64>,
    out_dir: Option<PathBuf>,
) -> Result<(), VoxError> {
    let cfg = ExperimentConfig::from_path(config)?;
    let seed = seed_override.unwrap_or(cfg.seeds[0]);
    let env = cfg.environment.build(seed)?;
    let d = Design::load_pbd(design)?;
    let probs = if cfg.analysis.robustness_probs.is_empty() {
        vec![0.0, 0.05, 0.10]
    } else {
        cfg.analysis.robustness_probs.clone()
    };
    let points = robustness_curve(
        &d,
        env.as_ref(),
        &probs,
        cfg.analysis.robustness_samples,
        seed,
    )?;
    println!("error_prob  mean_payoff");
    for p in &points {
        println!("{:>10.3}  {}", p.error_prob, percent(p.mean_payoff));
    }
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(&dir)?;
        let path = dir.join("robustness.csv");
        let mut text = String::from("error_prob,mean_payoff\n");
        for p in &points {
            text.push_str(&format!("{},{}\n", p.error_prob, p.mean_payoff));
        }
        std::fs::write(&path, text)?;
        println!("robustness table -> {}", path.display());
    }
    Ok(())
}

fn cmd_render(input: &Path, out: &Path) -> Result<(), VoxError> {
    let mut head = [0u8; 4];
    {
        use std::io::Read;
        let mut f = std::fs::File::open(input)?;
        let n = f.read(&mut head)?;
        if n < 4 {
            return Err(VoxError::Format(
                "input too short to be a design or snapshot".into(),
            ));
        }
    }
    let svg = match &head {
        b"FLD " => field_svg(&load_snapshot(input)?),
        b"PBD " => {
            let d = Design::load_pbd(input)?;
            if d.shape().nz != 1 {
                return Err(VoxError::Format("can only render 2D designs".into()));
            }
            design_svg(&d)
        }
        _ => {
            return Err(VoxError::Format(
                "unrecognized input: expected a PBD design or FLD snapshot".into(),
            ))
        }
    };
    std::fs::write(out, svg)?;
    println!("rendered {} -> {}", input.display(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run {
            config,
            seed_override,
            budget,
            out_dir,
            jobs,
        } => cmd_run(&config, seed_override, budget, out_dir, jobs),
        Cmd::Eval {
            env,
            design,
            seed_override,
            snapshot,
        } => cmd_eval(&env, &design, seed_override, snapshot),
        Cmd::Robustness {
            config,
            design,
            seed_override,
            out_dir,
        } => cmd_robustness(&config, &design, seed_override, out_dir),
        Cmd::Render { input, out } => cmd_render(&input, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
