//! 2D finite-difference time-domain electromagnetics and the photonic
//! design tasks built on it.

pub mod fabrication;
pub mod grid;
pub mod scene;
pub mod snapshot;
pub mod tasks;

pub use fabrication::{apply_fabrication, satisfies_fabrication, AnchorEdge, FabricationConstraint};
pub use grid::{BoundaryY, PmlSides, PmlSpec, YeeGrid2D, C0, EPS0, MU0};
pub use snapshot::{load_snapshot, read_snapshot, save_snapshot, write_snapshot};
pub use scene::{Detector, DesignRegion, FluxDirection, Line, Rect, SceneSpec, SimOutput, SourceSpec};
pub use tasks::{
    bend_scene, evaluate_bend, evaluate_splitter, split_quality, splitter_scene,
    straight_guide_scene, FdtdEnv, FdtdTaskConfig, PhotonicsTask,
};
