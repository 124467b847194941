//! Experiment configuration files.
//!
//! The format is TOML with four sections: `[environment]`, `[algorithm]`,
//! `[run]`, and optional `[analysis]`. Every key is checked: unknown keys
//! are hard errors rather than silently ignored defaults, so a misspelled
//! hyperparameter cannot quietly run the default instead.
//!
//! ```toml
//! [environment]
//! kind = "gol"            # gol | synthetic | fdtd_bend | fdtd_splitter
//! width = 32
//! height = 32
//!
//! [algorithm]
//! kind = "bppo"           # random | duct | ea | iql | bac | bppo | graddesc
//! rollout_size = 32
//!
//! [run]
//! budget = 2000
//! seeds = [1, 2, 3, 4, 5]
//! out_dir = "out/gol_bppo"
//!
//! [analysis]
//! variance_window = 50
//! robustness_probs = [0.0, 0.05, 0.1]
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::env::{PayoffEnvironment, SyntheticSeparableEnv};
use crate::error::VoxError;
use crate::fdtd::{
    AnchorEdge, FabricationConstraint, FdtdEnv, FdtdTaskConfig, PhotonicsTask,
};
use crate::gol::GolEnv;
use crate::opt::{
    AlgorithmConfig, BacConfig, BppoConfig, CriticKind, DuctConfig, EaConfig, GradDescConfig,
    IqlConfig,
};
use crate::seed::{stream_rng, STREAM_ENV};

/// Which payoff environment an experiment runs against, with its
/// parameters resolved.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvironmentConfig {
    Gol {
        width: usize,
        height: usize,
    },
    /// Separable oracle over `n` voxels; the hidden target is drawn from
    /// the environment stream of each run's master seed.
    Synthetic {
        n: usize,
    },
    FdtdBend(FdtdTaskConfig),
    FdtdSplitter {
        task: FdtdTaskConfig,
        targets: (f64, f64),
    },
}

impl EnvironmentConfig {
    /// Instantiates the environment for one run. `seed` is the run's
    /// master seed; only the synthetic environment consumes it (to draw
    /// its hidden target).
    pub fn build(&self, seed: u64) -> Result<Box<dyn PayoffEnvironment>, VoxError> {
        match self {
            Self::Gol { width, height } => Ok(Box::new(GolEnv::new(*width, *height)?)),
            Self::Synthetic { n } => {
                let shape = crate::design::GridShape::new_2d(*n, 1)?;
                let mut rng = stream_rng(seed, STREAM_ENV);
                Ok(Box::new(SyntheticSeparableEnv::random(shape, &mut rng)))
            }
            Self::FdtdBend(task) => Ok(Box::new(FdtdEnv::bend(task.clone())?)),
            Self::FdtdSplitter { task, targets } => {
                Ok(Box::new(FdtdEnv::splitter(task.clone(), *targets)?))
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Gol { .. } => "gol",
            Self::Synthetic { .. } => "synthetic",
            Self::FdtdBend(_) => "fdtd_bend",
            Self::FdtdSplitter { .. } => "fdtd_splitter",
        }
    }
}

/// Analysis toggles of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    /// Sliding window for the proposal-variance curve.
    pub variance_window: usize,
    /// Record every proposed design (needed for the variance curve).
    pub record_designs: bool,
    /// Error probabilities for the robustness curve of the best design;
    /// empty disables the analysis.
    pub robustness_probs: Vec<f64>,
    /// Perturbed evaluations per probability (p = 0 is always exact).
    pub robustness_samples: usize,
    /// Emit `curves.svg` with the per-seed learning curves.
    pub curves_svg: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            variance_window: 50,
            record_designs: false,
            robustness_probs: vec![],
            robustness_samples: 20,
            curves_svg: true,
        }
    }
}

/// A fully resolved experiment: environment x algorithm x run plan.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub environment: EnvironmentConfig,
    pub algorithm: AlgorithmConfig,
    pub budget: usize,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    /// Parallel worker slots; 0 means one per available core.
    pub jobs: usize,
    /// When false, wall_ms is recorded as 0.0 so traces are bit-stable.
    pub record_timing: bool,
    pub analysis: AnalysisConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, VoxError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e| VoxError::Config(format!("config is not valid TOML: {e}")))?;
        let mut root = Section::from_value("top level", toml::Value::Table(table))?;
        let environment = parse_environment(root.take_section("environment")?)?;
        let algorithm = parse_algorithm(root.take_section("algorithm")?)?;
        let run = root.take_section("run")?;
        let analysis = match root.take_optional_section("analysis")? {
            Some(s) => parse_analysis(s)?,
            None => AnalysisConfig::default(),
        };
        root.finish()?;

        let mut run = run;
        let budget = run.take_usize("budget")?;
        if budget == 0 {
            return Err(VoxError::Config("run.budget must be at least 1".into()));
        }
        let seeds = run.take_u64_array("seeds")?;
        if seeds.is_empty() {
            return Err(VoxError::Config("run.seeds must not be empty".into()));
        }
        let out_dir = PathBuf::from(run.take_string_or("out_dir", "out")?);
        let jobs = run.take_usize_or("jobs", 0)?;
        let record_timing = run.take_bool_or("record_timing", true)?;
        run.finish()?;

        Ok(Self {
            environment,
            algorithm,
            budget,
            seeds,
            out_dir,
            jobs,
            record_timing,
            analysis,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self, VoxError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }
}

/// A TOML table that tracks key consumption: any key left over when the
/// section is finished is a hard error.
struct Section {
    name: String,
    entries: BTreeMap<String, toml::Value>,
}

impl Section {
    fn from_value(name: &str, value: toml::Value) -> Result<Self, VoxError> {
        match value {
            toml::Value::Table(t) => Ok(Self {
                name: name.to_string(),
                entries: t.into_iter().collect(),
            }),
            _ => Err(VoxError::Config(format!("{name} must be a table"))),
        }
    }

    fn take(&mut self, key: &str) -> Option<toml::Value> {
        self.entries.remove(key)
    }

    fn take_required(&mut self, key: &str) -> Result<toml::Value, VoxError> {
        self.take(key).ok_or_else(|| {
            VoxError::Config(format!("missing required key `{key}` in [{}]", self.name))
        })
    }

    fn take_section(&mut self, key: &str) -> Result<Section, VoxError> {
        Section::from_value(key, self.take_required(key)?)
    }

    fn take_optional_section(&mut self, key: &str) -> Result<Option<Section>, VoxError> {
        self.take(key)
            .map(|v| Section::from_value(key, v))
            .transpose()
    }

    fn bad(&self, key: &str, wanted: &str) -> VoxError {
        VoxError::Config(format!("[{}] {key} must be {wanted}", self.name))
    }

    fn take_string(&mut self, key: &str) -> Result<String, VoxError> {
        match self.take_required(key)? {
            toml::Value::String(s) => Ok(s),
            _ => Err(self.bad(key, "a string")),
        }
    }

    fn take_string_or(&mut self, key: &str, default: &str) -> Result<String, VoxError> {
        match self.take(key) {
            None => Ok(default.to_string()),
            Some(toml::Value::String(s)) => Ok(s),
            Some(_) => Err(self.bad(key, "a string")),
        }
    }

    fn take_usize(&mut self, key: &str) -> Result<usize, VoxError> {
        match self.take_required(key)? {
            toml::Value::Integer(i) if i >= 0 => Ok(i as usize),
            _ => Err(self.bad(key, "a non-negative integer")),
        }
    }

    fn take_usize_or(&mut self, key: &str, default: usize) -> Result<usize, VoxError> {
        match self.take(key) {
            None => Ok(default),
            Some(toml::Value::Integer(i)) if i >= 0 => Ok(i as usize),
            Some(_) => Err(self.bad(key, "a non-negative integer")),
        }
    }

    fn take_f64_or(&mut self, key: &str, default: f64) -> Result<f64, VoxError> {
        match self.take(key) {
            None => Ok(default),
            Some(toml::Value::Float(f)) => Ok(f),
            Some(toml::Value::Integer(i)) => Ok(i as f64),
            Some(_) => Err(self.bad(key, "a number")),
        }
    }

    fn take_bool_or(&mut self, key: &str, default: bool) -> Result<bool, VoxError> {
        match self.take(key) {
            None => Ok(default),
            Some(toml::Value::Boolean(b)) => Ok(b),
            Some(_) => Err(self.bad(key, "a boolean")),
        }
    }

    fn take_u64_array(&mut self, key: &str) -> Result<Vec<u64>, VoxError> {
        match self.take_required(key)? {
            toml::Value::Array(items) => items
                .into_iter()
                .map(|v| match v {
                    toml::Value::Integer(i) if i >= 0 => Ok(i as u64),
                    _ => Err(self.bad(key, "an array of non-negative integers")),
                })
                .collect(),
            _ => Err(self.bad(key, "an array of non-negative integers")),
        }
    }

    fn take_usize_array_or(
        &mut self,
        key: &str,
        default: &[usize],
    ) -> Result<Vec<usize>, VoxError> {
        match self.take(key) {
            None => Ok(default.to_vec()),
            Some(toml::Value::Array(items)) => items
                .into_iter()
                .map(|v| match v {
                    toml::Value::Integer(i) if i > 0 => Ok(i as usize),
                    _ => Err(self.bad(key, "an array of positive integers")),
                })
                .collect(),
            Some(_) => Err(self.bad(key, "an array of positive integers")),
        }
    }

    fn take_f64_array_or(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>, VoxError> {
        match self.take(key) {
            None => Ok(default.to_vec()),
            Some(toml::Value::Array(items)) => items
                .into_iter()
                .map(|v| match v {
                    toml::Value::Float(f) => Ok(f),
                    toml::Value::Integer(i) => Ok(i as f64),
                    _ => Err(self.bad(key, "an array of numbers")),
                })
                .collect(),
            Some(_) => Err(self.bad(key, "an array of numbers")),
        }
    }

    fn finish(self) -> Result<(), VoxError> {
        if self.entries.is_empty() {
            Ok(())
        } else {
            let keys: Vec<&str> = self.entries.keys().map(String::as_str).collect();
            Err(VoxError::Config(format!(
                "unknown key(s) in [{}]: {}",
                self.name,
                keys.join(", ")
            )))
        }
    }
}

fn parse_fabrication(section: &mut Section) -> Result<FabricationConstraint, VoxError> {
    let mode = section.take_string_or("fabrication", "none")?;
    match mode.as_str() {
        "none" => {
            // An anchor without the constraint is a configuration slip.
            if section.take("anchor").is_some() {
                return Err(VoxError::Config(
                    "`anchor` requires fabrication = \"connected\"".into(),
                ));
            }
            Ok(FabricationConstraint::None)
        }
        "connected" => {
            let anchor = match section.take_string_or("anchor", "bottom")?.as_str() {
                "bottom" => AnchorEdge::Bottom,
                "top" => AnchorEdge::Top,
                "left" => AnchorEdge::Left,
                "right" => AnchorEdge::Right,
                other => {
                    return Err(VoxError::Config(format!(
                        "unknown anchor `{other}` (expected bottom/top/left/right)"
                    )))
                }
            };
            Ok(FabricationConstraint::ConnectedNoCavities { anchor })
        }
        other => Err(VoxError::Config(format!(
            "unknown fabrication mode `{other}` (expected none/connected)"
        ))),
    }
}

fn parse_fdtd_task(section: &mut Section) -> Result<FdtdTaskConfig, VoxError> {
    let d = FdtdTaskConfig::default();
    let settle = section.take_usize_or("settle_periods", 0)?;
    Ok(FdtdTaskConfig {
        voxels: section.take_usize_or("voxels", d.voxels)?,
        voxel_cell: section.take_usize_or("voxel_cell", d.voxel_cell)?,
        dx: section.take_f64_or("dx", d.dx)?,
        wavelength: section.take_f64_or("wavelength", d.wavelength)?,
        eps_material: section.take_f64_or("eps_material", d.eps_material)?,
        courant: section.take_f64_or("courant", d.courant)?,
        guide_voxels: section.take_usize_or("guide_voxels", d.guide_voxels)?,
        pml_cells: section.take_usize_or("pml_cells", d.pml_cells)?,
        fabrication: parse_fabrication(section)?,
        settle_periods: (settle > 0).then_some(settle),
    })
}

fn parse_environment(mut s: Section) -> Result<EnvironmentConfig, VoxError> {
    let kind = s.take_string("kind")?;
    let env = match kind.as_str() {
        "gol" => EnvironmentConfig::Gol {
            width: s.take_usize_or("width", 32)?,
            height: s.take_usize_or("height", 32)?,
        },
        "synthetic" => EnvironmentConfig::Synthetic {
            n: s.take_usize_or("n", 16)?,
        },
        "fdtd_bend" => EnvironmentConfig::FdtdBend(parse_fdtd_task(&mut s)?),
        "fdtd_splitter" => {
            let task = parse_fdtd_task(&mut s)?;
            let t = s.take_f64_array_or(
                "targets",
                &[PhotonicsTask::DEFAULT_SPLIT.0, PhotonicsTask::DEFAULT_SPLIT.1],
            )?;
            if t.len() != 2 || t[0] < 0.0 || t[1] < 0.0 || t[0] + t[1] > 1.0 {
                return Err(VoxError::Config(
                    "splitter targets must be two non-negative fractions summing to at most 1"
                        .into(),
                ));
            }
            EnvironmentConfig::FdtdSplitter {
                task,
                targets: (t[0], t[1]),
            }
        }
        other => {
            return Err(VoxError::Config(format!(
                "unknown environment kind `{other}` \
                 (expected gol/synthetic/fdtd_bend/fdtd_splitter)"
            )))
        }
    };
    s.finish()?;
    Ok(env)
}

fn parse_algorithm(mut s: Section) -> Result<AlgorithmConfig, VoxError> {
    let kind = s.take_string("kind")?;
    let algo = match kind.as_str() {
        "random" => AlgorithmConfig::RandomSearch,
        "duct" => {
            let d = DuctConfig::default();
            AlgorithmConfig::Duct(DuctConfig {
                exploration: s.take_f64_or("exploration", d.exploration)?,
                noise_mean: s.take_f64_or("noise_mean", d.noise_mean)?,
                noise_std: s.take_f64_or("noise_std", d.noise_std)?,
                noise_enabled: s.take_bool_or("noise_enabled", d.noise_enabled)?,
                warmup_random_steps: s
                    .take_usize_or("warmup_random_steps", d.warmup_random_steps)?,
            })
        }
        "ea" => {
            let d = EaConfig::default();
            AlgorithmConfig::Ea(EaConfig {
                population: s.take_usize_or("population", d.population)?,
                parents_mating: s.take_usize_or("parents_mating", d.parents_mating)?,
                keep_parents: s.take_usize_or("keep_parents", d.keep_parents)?,
                gene_mutation_rate: s.take_f64_or("gene_mutation_rate", d.gene_mutation_rate)?,
            })
        }
        "iql" => {
            let d = IqlConfig::default();
            AlgorithmConfig::Iql(IqlConfig {
                lr: s.take_f64_or("lr", d.lr)?,
                batch: s.take_usize_or("batch", d.batch)?,
                buffer_capacity: s.take_usize_or("buffer_capacity", d.buffer_capacity)?,
                hidden: s.take_usize_array_or("hidden", &d.hidden)?,
                eps_start: s.take_f64_or("eps_start", d.eps_start)?,
                eps_end: s.take_f64_or("eps_end", d.eps_end)?,
                eps_anneal_fraction: s
                    .take_f64_or("eps_anneal_fraction", d.eps_anneal_fraction)?,
                bands: s.take_usize_or("bands", d.bands)?,
            })
        }
        "bac" => {
            let d = BacConfig::default();
            let critic = match s.take_string_or("critic", "pooled")?.as_str() {
                "pooled" => CriticKind::Pooled,
                "flat" => CriticKind::Flat,
                other => {
                    return Err(VoxError::Config(format!(
                        "unknown critic `{other}` (expected pooled/flat)"
                    )))
                }
            };
            AlgorithmConfig::Bac(BacConfig {
                critic_steps: s.take_usize_or("critic_steps", d.critic_steps)?,
                policy_steps: s.take_usize_or("policy_steps", d.policy_steps)?,
                batch: s.take_usize_or("batch", d.batch)?,
                critic_lr: s.take_f64_or("critic_lr", d.critic_lr)?,
                policy_lr: s.take_f64_or("policy_lr", d.policy_lr)?,
                critic_hidden: s.take_usize_array_or("critic_hidden", &d.critic_hidden)?,
                policy_hidden: s.take_usize_array_or("policy_hidden", &d.policy_hidden)?,
                mask_fraction: s.take_f64_or("mask_fraction", d.mask_fraction)?,
                critic_reinit_period: s
                    .take_usize_or("critic_reinit_period", d.critic_reinit_period)?,
                reinit_burst_multiplier: s
                    .take_usize_or("reinit_burst_multiplier", d.reinit_burst_multiplier)?,
                bands: s.take_usize_or("bands", d.bands)?,
                critic,
            })
        }
        "bppo" => {
            let d = BppoConfig::default();
            AlgorithmConfig::Bppo(BppoConfig {
                rollout_size: s.take_usize_or("rollout_size", d.rollout_size)?,
                updates_per_rollout: s
                    .take_usize_or("updates_per_rollout", d.updates_per_rollout)?,
                clip: s.take_f64_or("clip", d.clip)?,
                entropy_coef: s.take_f64_or("entropy_coef", d.entropy_coef)?,
                lr: s.take_f64_or("lr", d.lr)?,
                hidden: s.take_usize_array_or("hidden", &d.hidden)?,
                minibatch: s.take_usize_or("minibatch", d.minibatch)?,
                bands: s.take_usize_or("bands", d.bands)?,
            })
        }
        "graddesc" => {
            let d = GradDescConfig::default();
            AlgorithmConfig::GradDesc(GradDescConfig {
                peak_lr: s.take_f64_or("peak_lr", d.peak_lr)?,
                warmup_fraction: s.take_f64_or("warmup_fraction", d.warmup_fraction)?,
            })
        }
        other => {
            return Err(VoxError::Config(format!(
                "unknown algorithm kind `{other}` \
                 (expected random/duct/ea/iql/bac/bppo/graddesc)"
            )))
        }
    };
    s.finish()?;
    Ok(algo)
}

fn parse_analysis(mut s: Section) -> Result<AnalysisConfig, VoxError> {
    let d = AnalysisConfig::default();
    let cfg = AnalysisConfig {
        variance_window: s.take_usize_or("variance_window", d.variance_window)?,
        record_designs: s.take_bool_or("record_designs", d.record_designs)?,
        robustness_probs: s.take_f64_array_or("robustness_probs", &d.robustness_probs)?,
        robustness_samples: s.take_usize_or("robustness_samples", d.robustness_samples)?,
        curves_svg: s.take_bool_or("curves_svg", d.curves_svg)?,
    };
    if cfg.variance_window == 0 {
        return Err(VoxError::Config("variance_window must be positive".into()));
    }
    if cfg
        .robustness_probs
        .iter()
        .any(|&p| !(0.0..=1.0).contains(&p))
    {
        return Err(VoxError::Config(
            "robustness_probs must lie in [0, 1]".into(),
        ));
    }
    s.finish()?;
    Ok(cfg)
}
