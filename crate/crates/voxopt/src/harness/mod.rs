//! Experiment plumbing: config files, the seeded experiment runner, run
//! analyses (proposal variance, robustness curves), and SVG plots.

pub mod analysis;
pub mod config;
pub mod experiment;
pub mod svg;

pub use analysis::{design_variance, robustness_curve, RecordingEnv, RobustnessPoint};
pub use config::{AnalysisConfig, EnvironmentConfig, ExperimentConfig};
pub use experiment::{mean_std, run_experiment, ExperimentResult, SeedRun};
pub use svg::{design_svg, field_svg, line_plot, Series};
