//! Photonic design tasks: the 90° waveguide bend and the 1→2 splitter.
//!
//! Each task wraps a scene template around the design region and scores a
//! design by simulated transmission. The bend rewards power routed from a
//! horizontal input waveguide into a vertical output waveguide; the
//! splitter rewards matching a target split ratio between two output
//! waveguides. Payoffs are normalized to [0, 1].

use crate::design::{Design, GridShape};
use crate::env::PayoffEnvironment;
use crate::error::VoxError;
use crate::fdtd::fabrication::{apply_fabrication, FabricationConstraint};
use crate::fdtd::grid::{PmlSides, PmlSpec};
use crate::fdtd::scene::{
    DesignRegion, Detector, FluxDirection, Line, Rect, SceneSpec, SourceSpec,
};

/// Cells between the absorbing layer and the design region on the input
/// side; waveguides run through this region.
const INPUT_RUN: usize = 44;
/// Cells of padding on sides without waveguides.
const PAD: usize = 20;
/// Source distance from the inner absorbing-layer face, in cells.
const SOURCE_OFFSET: usize = 8;
/// Input-detector distance upstream of the design region, in cells.
const DET_OFFSET: usize = 8;
/// Output-detector distance downstream of the design region, in cells.
const OUT_DET_OFFSET: usize = 26;
/// Detector halo beyond each waveguide edge, in cells.
const DET_MARGIN: usize = 6;

/// Shared geometry and material parameters of the photonics tasks.
#[derive(Debug, Clone, PartialEq)]
pub struct FdtdTaskConfig {
    /// Design region side length, in voxels (the region is square).
    pub voxels: usize,
    /// Grid cells per voxel side.
    pub voxel_cell: usize,
    /// Grid spacing in meters.
    pub dx: f64,
    /// Source vacuum wavelength in meters.
    pub wavelength: f64,
    /// Relative permittivity of placed material (and the waveguides).
    pub eps_material: f64,
    /// Target Courant factor.
    pub courant: f64,
    /// Waveguide width in voxels.
    pub guide_voxels: usize,
    /// Absorbing-layer thickness in cells.
    pub pml_cells: usize,
    /// Fabrication constraint applied to designs before simulation.
    pub fabrication: FabricationConstraint,
    /// Settle time before flux sampling, in optical periods
    /// (`None` sizes it to three material-speed domain transits).
    pub settle_periods: Option<usize>,
}

impl Default for FdtdTaskConfig {
    fn default() -> Self {
        Self {
            voxels: 12,
            voxel_cell: 4,
            dx: 40e-9,
            wavelength: 1550e-9,
            eps_material: 12.25,
            courant: 0.9,
            guide_voxels: 3,
            pml_cells: 12,
            fabrication: FabricationConstraint::None,
            settle_periods: None,
        }
    }
}

impl FdtdTaskConfig {
    fn guide_cells(&self) -> usize {
        self.guide_voxels * self.voxel_cell
    }

    fn design_cells(&self) -> usize {
        self.voxels * self.voxel_cell
    }

    fn settle_for(&self, nx: usize, ny: usize) -> usize {
        match self.settle_periods {
            Some(p) => p,
            None => {
                let transits = 3.0 * (nx + ny) as f64 * self.dx * self.eps_material.sqrt()
                    / self.wavelength;
                (transits.ceil() as usize).max(6)
            }
        }
    }

    fn base_scene(&self, nx: usize, ny: usize) -> SceneSpec {
        SceneSpec {
            nx,
            ny,
            dx: self.dx,
            courant: self.courant,
            wavelength: self.wavelength,
            eps_background: 1.0,
            rects: vec![],
            design: None,
            source: SourceSpec {
                line: Line::Vertical { x: 0, y0: 0, y1: 1 },
                amplitude: 1.0,
                ramp_periods: 3.0,
            },
            detectors: vec![],
            pml: PmlSpec {
                thickness: self.pml_cells,
                sides: PmlSides::ALL,
                ..PmlSpec::default()
            },
            settle_periods: self.settle_for(nx, ny),
        }
    }
}

/// The 90° bend scene: a horizontal input waveguide from the left meets a
/// vertical output waveguide leaving through the bottom; the design region
/// is the corner block joining them. Detectors: `[input (+x), output (−y)]`.
pub fn bend_scene(cfg: &FdtdTaskConfig) -> SceneSpec {
    let (k, dw, w, pml) = (
        cfg.voxel_cell,
        cfg.design_cells(),
        cfg.guide_cells(),
        cfg.pml_cells,
    );
    let x0 = pml + INPUT_RUN;
    let y0 = pml + INPUT_RUN;
    let nx = x0 + dw + PAD + pml;
    let ny = y0 + dw + PAD + pml;
    let cy = y0 + dw / 2;
    let cx = x0 + dw / 2;
    let (gy0, gy1) = (cy - w / 2, cy - w / 2 + w);
    let (gx0, gx1) = (cx - w / 2, cx - w / 2 + w);

    let mut scene = cfg.base_scene(nx, ny);
    scene.rects = vec![
        (Rect::new(0, gy0, x0, gy1), cfg.eps_material),
        (Rect::new(gx0, 0, gx1, y0), cfg.eps_material),
    ];
    scene.design = Some(DesignRegion {
        origin: (x0, y0),
        voxels: (cfg.voxels, cfg.voxels),
        cell: k,
        eps_material: cfg.eps_material,
    });
    scene.source.line = Line::Vertical {
        x: pml + SOURCE_OFFSET,
        y0: gy0,
        y1: gy1,
    };
    scene.detectors = vec![
        Detector {
            line: Line::Vertical {
                x: x0 - DET_OFFSET,
                y0: gy0 - DET_MARGIN,
                y1: gy1 + DET_MARGIN,
            },
            direction: FluxDirection::PlusX,
        },
        Detector {
            line: Line::Horizontal {
                y: y0 - OUT_DET_OFFSET,
                x0: gx0 - DET_MARGIN,
                x1: gx1 + DET_MARGIN,
            },
            direction: FluxDirection::MinusY,
        },
    ];
    scene
}

/// The 1→2 splitter scene: one input waveguide from the left, two output
/// waveguides to the right. Detectors: `[input (+x), top out, bottom out]`.
pub fn splitter_scene(cfg: &FdtdTaskConfig) -> SceneSpec {
    let (k, dw, w, pml) = (
        cfg.voxel_cell,
        cfg.design_cells(),
        cfg.guide_cells(),
        cfg.pml_cells,
    );
    let x0 = pml + INPUT_RUN;
    let y0 = pml + PAD + DET_MARGIN;
    let nx = x0 + dw + INPUT_RUN + pml;
    let ny = y0 + dw + PAD + DET_MARGIN + pml;
    let cy = y0 + dw / 2;
    let (gy0, gy1) = (cy - w / 2, cy - w / 2 + w);
    // Output branch centers, pulled in from the design corners by about a
    // fifth of the region height.
    let pull = (dw * 5 + 12) / 24;
    let c_bottom = y0 + pull;
    let c_top = y0 + dw - pull;
    let x1 = x0 + dw;

    let mut scene = cfg.base_scene(nx, ny);
    scene.rects = vec![
        (Rect::new(0, gy0, x0, gy1), cfg.eps_material),
        (
            Rect::new(x1, c_top - w / 2, nx, c_top - w / 2 + w),
            cfg.eps_material,
        ),
        (
            Rect::new(x1, c_bottom - w / 2, nx, c_bottom - w / 2 + w),
            cfg.eps_material,
        ),
    ];
    scene.design = Some(DesignRegion {
        origin: (x0, y0),
        voxels: (cfg.voxels, cfg.voxels),
        cell: k,
        eps_material: cfg.eps_material,
    });
    scene.source.line = Line::Vertical {
        x: pml + SOURCE_OFFSET,
        y0: gy0,
        y1: gy1,
    };
    let det = |center: usize| Detector {
        line: Line::Vertical {
            x: x1 + DET_OFFSET,
            y0: center - w / 2 - DET_MARGIN,
            y1: center - w / 2 + w + DET_MARGIN,
        },
        direction: FluxDirection::PlusX,
    };
    scene.detectors = vec![
        Detector {
            line: Line::Vertical {
                x: x0 - DET_OFFSET,
                y0: gy0 - DET_MARGIN,
                y1: gy1 + DET_MARGIN,
            },
            direction: FluxDirection::PlusX,
        },
        det(c_top),
        det(c_bottom),
    ];
    scene
}

/// A straight waveguide crossing the whole domain, used as the low-loss
/// transmission oracle. Geometry is fixed in physical units so the scene
/// can be built at different resolutions. Detectors: `[input, downstream]`.
pub fn straight_guide_scene(dx: f64) -> SceneSpec {
    let cells = |meters: f64| (meters / dx).round() as usize;
    let cfg = FdtdTaskConfig {
        dx,
        ..FdtdTaskConfig::default()
    };
    let nx = cells(8.0e-6);
    let ny = cells(2.4e-6);
    let w = cells(480e-9);
    let gy0 = ny / 2 - w / 2;
    let halo = cells(240e-9);

    let mut scene = cfg.base_scene(nx, ny);
    scene.rects = vec![(Rect::new(0, gy0, nx, gy0 + w), cfg.eps_material)];
    scene.source.line = Line::Vertical {
        x: cfg.pml_cells + SOURCE_OFFSET,
        y0: gy0,
        y1: gy0 + w,
    };
    let det = |x: usize| Detector {
        line: Line::Vertical {
            x,
            y0: gy0 - halo,
            y1: gy0 + w + halo,
        },
        direction: FluxDirection::PlusX,
    };
    scene.detectors = vec![det(cells(2.0e-6)), det(nx - cfg.pml_cells - cells(0.8e-6))];
    scene
}

/// Transmission: output power over input power, clamped to [0, 1].
fn transmission(input: f64, output: f64) -> f64 {
    (output / input.max(f64::MIN_POSITIVE)).clamp(0.0, 1.0)
}

/// Splitter quality: `1 − mean((fraction_i − target_i)²)`, clamped to
/// [0, 1]. Perfect matching scores 1.
pub fn split_quality(fractions: (f64, f64), targets: (f64, f64)) -> f64 {
    let mse = ((fractions.0 - targets.0).powi(2) + (fractions.1 - targets.1).powi(2)) / 2.0;
    (1.0 - mse).clamp(0.0, 1.0)
}

/// Simulates the bend task and returns the transmission payoff.
pub fn evaluate_bend(d: &Design, cfg: &FdtdTaskConfig) -> Result<f64, VoxError> {
    let out = bend_scene(cfg).simulate(Some(d))?;
    Ok(transmission(out.fluxes[0], out.fluxes[1]))
}

/// Simulates the splitter task and returns `1 − MSE` against the target
/// split fractions.
pub fn evaluate_splitter(
    d: &Design,
    cfg: &FdtdTaskConfig,
    targets: (f64, f64),
) -> Result<f64, VoxError> {
    let out = splitter_scene(cfg).simulate(Some(d))?;
    let input = out.fluxes[0].max(f64::MIN_POSITIVE);
    Ok(split_quality(
        (out.fluxes[1] / input, out.fluxes[2] / input),
        targets,
    ))
}

/// Which photonics task an [`FdtdEnv`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhotonicsTask {
    Bend,
    /// Target output fractions (top, bottom); the standard task is
    /// (0.65, 0.35).
    Splitter { targets: (f64, f64) },
}

impl PhotonicsTask {
    pub const DEFAULT_SPLIT: (f64, f64) = (0.65, 0.35);
}

/// The FDTD payoff environment. Designs are projected through the
/// configured fabrication constraint before simulation, so the payoff is
/// always that of a manufacturable design.
#[derive(Debug, Clone)]
pub struct FdtdEnv {
    config: FdtdTaskConfig,
    task: PhotonicsTask,
    scene: SceneSpec,
    shape: GridShape,
}

impl FdtdEnv {
    pub fn bend(config: FdtdTaskConfig) -> Result<Self, VoxError> {
        Self::new(config, PhotonicsTask::Bend)
    }

    pub fn splitter(config: FdtdTaskConfig, targets: (f64, f64)) -> Result<Self, VoxError> {
        Self::new(config, PhotonicsTask::Splitter { targets })
    }

    pub fn new(config: FdtdTaskConfig, task: PhotonicsTask) -> Result<Self, VoxError> {
        if config.voxels == 0 || config.voxel_cell == 0 || config.guide_voxels == 0 {
            return Err(VoxError::Config(
                "voxel counts and sizes must be positive".into(),
            ));
        }
        if config.guide_voxels > config.voxels {
            return Err(VoxError::Config(
                "waveguide cannot be wider than the design region".into(),
            ));
        }
        let scene = match task {
            PhotonicsTask::Bend => bend_scene(&config),
            PhotonicsTask::Splitter { .. } => splitter_scene(&config),
        };
        let shape = GridShape::new_2d(config.voxels, config.voxels)?;
        // Validate the template once so later failures can only be
        // simulation-level.
        scene.permittivity(Some(&Design::zeros(shape)))?;
        Ok(Self {
            config,
            task,
            scene,
            shape,
        })
    }

    pub fn config(&self) -> &FdtdTaskConfig {
        &self.config
    }

    pub fn task(&self) -> PhotonicsTask {
        self.task
    }

    pub fn scene(&self) -> &SceneSpec {
        &self.scene
    }

    /// Runs the full simulation for `d` (after fabrication mapping) and
    /// returns the raw output: detector fluxes plus the final field,
    /// e.g. for snapshot export.
    pub fn simulate_design(&self, d: &Design) -> Result<crate::fdtd::scene::SimOutput, VoxError> {
        let mapped = apply_fabrication(d, self.config.fabrication)?;
        self.scene.simulate(Some(&mapped))
    }

    /// Payoff with errors surfaced (divergence, shape mismatch).
    pub fn payoff(&self, d: &Design) -> Result<f64, VoxError> {
        let mapped = apply_fabrication(d, self.config.fabrication)?;
        let out = self.scene.simulate(Some(&mapped))?;
        let input = out.fluxes[0].max(f64::MIN_POSITIVE);
        Ok(match self.task {
            PhotonicsTask::Bend => transmission(out.fluxes[0], out.fluxes[1]),
            PhotonicsTask::Splitter { targets } => split_quality(
                (out.fluxes[1] / input, out.fluxes[2] / input),
                targets,
            ),
        })
    }
}

impl PayoffEnvironment for FdtdEnv {
    fn shape(&self) -> GridShape {
        self.shape
    }

    fn name(&self) -> &str {
        match self.task {
            PhotonicsTask::Bend => "fdtd_bend",
            PhotonicsTask::Splitter { .. } => "fdtd_splitter",
        }
    }

    fn evaluate(&self, d: &Design) -> f64 {
        match self.payoff(d) {
            Ok(p) => p,
            // A diverged run signals an unusable design rather than a
            // caller error; score it at the floor so optimization can
            // continue.
            Err(VoxError::SimulationDiverged { .. }) => 0.0,
            Err(e) => panic!("fdtd evaluation failed: {e}"),
        }
    }

    fn apply_constraints(&self, d: &Design) -> Design {
        apply_fabrication(d, self.config.fabrication)
            .expect("designs of this environment's shape are 2D")
    }
}
