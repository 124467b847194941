//! Simulation scenes: geometry, source, detectors, and the run protocol.
//!
//! A scene assembles a permittivity map from axis-aligned rectangles plus
//! an optional design region (each design voxel covering a k×k block of
//! grid cells), drives the simulation with a ramped continuous-wave line
//! source, and reports the time-averaged directed Poynting flux through
//! each detector over exactly one optical period at the end of the run.

use ndarray::Array2;

use crate::design::Design;
use crate::error::VoxError;
use crate::fdtd::grid::{BoundaryY, PmlSpec, YeeGrid2D, C0};

/// Half-open cell-index rectangle: x in [x0, x1), y in [y0, y1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl Rect {
    pub fn new(x0: usize, y0: usize, x1: usize, y1: usize) -> Self {
        Self { x0, y0, x1, y1 }
    }
}

/// Where the design voxels sit in the cell grid: the region spans
/// `voxels * cell` cells per axis starting at `origin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignRegion {
    pub origin: (usize, usize),
    /// Voxel counts (x, y).
    pub voxels: (usize, usize),
    /// Grid cells per voxel side.
    pub cell: usize,
    /// Relative permittivity of a filled voxel; empty voxels take the
    /// scene background.
    pub eps_material: f64,
}

impl DesignRegion {
    pub fn rect(&self) -> Rect {
        Rect::new(
            self.origin.0,
            self.origin.1,
            self.origin.0 + self.voxels.0 * self.cell,
            self.origin.1 + self.voxels.1 * self.cell,
        )
    }
}

/// A grid-aligned line of Ez nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Line {
    /// x fixed, y in [y0, y1).
    Vertical { x: usize, y0: usize, y1: usize },
    /// y fixed, x in [x0, x1).
    Horizontal { y: usize, x0: usize, x1: usize },
}

impl Line {
    fn nodes(&self) -> Vec<(usize, usize)> {
        match *self {
            Line::Vertical { x, y0, y1 } => (y0..y1).map(|y| (x, y)).collect(),
            Line::Horizontal { y, x0, x1 } => (x0..x1).map(|x| (x, y)).collect(),
        }
    }
}

/// Direction of positive measured power through a detector line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxDirection {
    PlusX,
    MinusX,
    PlusY,
    MinusY,
}

/// A flux detector: power through `line` is reported positive when it
/// flows in `direction`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detector {
    pub line: Line,
    pub direction: FluxDirection,
}

/// Ramped continuous-wave soft source distributed along a line of nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub line: Line,
    pub amplitude: f64,
    /// Raised-cosine ramp length in optical periods.
    pub ramp_periods: f64,
}

/// Full scene description.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub nx: usize,
    pub ny: usize,
    /// Grid spacing in meters.
    pub dx: f64,
    /// Target Courant factor; the actual time step is slightly smaller so
    /// an optical period is an integer number of steps.
    pub courant: f64,
    /// Source vacuum wavelength in meters.
    pub wavelength: f64,
    pub eps_background: f64,
    /// Painted first, in order.
    pub rects: Vec<(Rect, f64)>,
    pub design: Option<DesignRegion>,
    pub source: SourceSpec,
    pub detectors: Vec<Detector>,
    pub pml: PmlSpec,
    /// Steps before flux sampling, in optical periods; must cover the
    /// source ramp.
    pub settle_periods: usize,
}

/// Result of one simulation.
#[derive(Debug, Clone)]
pub struct SimOutput {
    /// Time-averaged directed power per detector, in`detectors` order.
    pub fluxes: Vec<f64>,
    /// Ez at the final step, for snapshots and rendering.
    pub final_ez: Array2<f64>,
}

/// Factor by which |Ez| may exceed the source amplitude before the run is
/// declared divergent.
const DIVERGENCE_FACTOR: f64 = 1e6;

impl SceneSpec {
    /// Steps per optical period: the period is divided into the smallest
    /// integer step count that satisfies the CFL bound at `courant`.
    pub fn samples_per_period(&self) -> usize {
        let period = self.wavelength / C0;
        let dt_max = self.courant * self.dx / (C0 * std::f64::consts::SQRT_2);
        (period / dt_max).ceil() as usize
    }

    /// The actual time step: an exact integer fraction of the period.
    pub fn dt(&self) -> f64 {
        self.wavelength / C0 / self.samples_per_period() as f64
    }

    /// Total simulated steps: settle phase plus one sampled period.
    pub fn total_steps(&self) -> usize {
        (self.settle_periods + 1) * self.samples_per_period()
    }

    /// Builds the permittivity map for a design (or `None` when the scene
    /// has no design region).
    pub fn permittivity(&self, design: Option<&Design>) -> Result<Array2<f64>, VoxError> {
        let mut eps = Array2::from_elem((self.nx, self.ny), self.eps_background);
        for &(rect, value) in &self.rects {
            if rect.x1 > self.nx || rect.y1 > self.ny {
                return Err(VoxError::Config(format!(
                    "rectangle ({},{})..({},{}) outside the {}x{} grid",
                    rect.x0, rect.y0, rect.x1, rect.y1, self.nx, self.ny
                )));
            }
            for i in rect.x0..rect.x1 {
                for j in rect.y0..rect.y1 {
                    eps[(i, j)] = value;
                }
            }
        }
        match (&self.design, design) {
            (None, None) => {}
            (None, Some(_)) => {
                return Err(VoxError::Config(
                    "scene has no design region but a design was supplied".into(),
                ))
            }
            (Some(_), None) => {
                return Err(VoxError::Config(
                    "scene requires a design for its design region".into(),
                ))
            }
            (Some(region), Some(d)) => {
                let shape = d.shape();
                if (shape.nx, shape.ny, shape.nz) != (region.voxels.0, region.voxels.1, 1) {
                    return Err(VoxError::ShapeMismatch(format!(
                        "design is {}x{}x{}, design region expects {}x{}x1",
                        shape.nx, shape.ny, shape.nz, region.voxels.0, region.voxels.1
                    )));
                }
                let r = region.rect();
                if r.x1 > self.nx || r.y1 > self.ny {
                    return Err(VoxError::Config(
                        "design region does not fit the grid".into(),
                    ));
                }
                for vy in 0..region.voxels.1 {
                    for vx in 0..region.voxels.0 {
                        let value = if d.bits()[shape.index(vx, vy, 0)] == 1 {
                            region.eps_material
                        } else {
                            self.eps_background
                        };
                        for i in 0..region.cell {
                            for j in 0..region.cell {
                                eps[(
                                    region.origin.0 + vx * region.cell + i,
                                    region.origin.1 + vy * region.cell + j,
                                )] = value;
                            }
                        }
                    }
                }
            }
        }
        Ok(eps)
    }

    fn validate_lines(&self) -> Result<(), VoxError> {
        let in_bounds = |line: &Line| -> bool {
            match *line {
                Line::Vertical { x, y0, y1 } => x < self.nx && y0 < y1 && y1 <= self.ny,
                Line::Horizontal { y, x0, x1 } => y < self.ny && x0 < x1 && x1 <= self.nx,
            }
        };
        if !in_bounds(&self.source.line) {
            return Err(VoxError::Config("source line out of bounds".into()));
        }
        let d = self.pml.thickness;
        let sides = self.pml.sides;
        let outside_pml = |line: &Line| -> bool {
            line.nodes().iter().all(|&(x, y)| {
                (!sides.left || x >= d)
                    && (!sides.right || x < self.nx - d)
                    && (!sides.bottom || y >= d)
                    && (!sides.top || y < self.ny - d)
            })
        };
        for det in &self.detectors {
            if !in_bounds(&det.line) {
                return Err(VoxError::Config("detector line out of bounds".into()));
            }
            if !outside_pml(&det.line) {
                return Err(VoxError::Config(
                    "detector lines must lie outside the absorbing layer".into(),
                ));
            }
            let axis_ok = matches!(
                (det.line, det.direction),
                (Line::Vertical { .. }, FluxDirection::PlusX | FluxDirection::MinusX)
                    | (Line::Horizontal { .. }, FluxDirection::PlusY | FluxDirection::MinusY)
            );
            if !axis_ok {
                return Err(VoxError::Config(
                    "detector direction must be normal to its line".into(),
                ));
            }
        }
        Ok(())
    }

    /// Runs the scene and returns per-detector time-averaged flux.
    pub fn simulate(&self, design: Option<&Design>) -> Result<SimOutput, VoxError> {
        self.validate_lines()?;
        let m = self.samples_per_period();
        let total = self.total_steps();
        let ramp_steps = (self.source.ramp_periods * m as f64).ceil() as usize;
        if self.settle_periods * m < ramp_steps {
            return Err(VoxError::NotSteadyState {
                step: self.settle_periods * m,
                required: ramp_steps,
            });
        }

        let eps = self.permittivity(design)?;
        let mut grid = YeeGrid2D::new(eps, self.dx, self.dt(), &self.pml, BoundaryY::Pec)?;

        let omega = 2.0 * std::f64::consts::PI * C0 / self.wavelength;
        let source_nodes = self.source.line.nodes();
        let detector_nodes: Vec<Vec<(usize, usize)>> =
            self.detectors.iter().map(|d| d.line.nodes()).collect();
        let mut flux_sums = vec![0.0f64; self.detectors.len()];
        let mut h_before: Vec<Vec<f64>> = detector_nodes
            .iter()
            .map(|nodes| vec![0.0; nodes.len()])
            .collect();

        let guard = DIVERGENCE_FACTOR * self.source.amplitude.abs().max(f64::MIN_POSITIVE);
        let sampling_start = total - m;

        for n in 0..total {
            let sampling = n >= sampling_start;
            if sampling {
                for (k, nodes) in detector_nodes.iter().enumerate() {
                    let tangential_is_hy = matches!(
                        self.detectors[k].direction,
                        FluxDirection::PlusX | FluxDirection::MinusX
                    );
                    for (slot, &(x, y)) in h_before[k].iter_mut().zip(nodes) {
                        *slot = if tangential_is_hy {
                            grid.hy_at_node(x, y)
                        } else {
                            grid.hx_at_node(x, y)
                        };
                    }
                }
            }
            grid.update_h();
            if sampling {
                for (k, nodes) in detector_nodes.iter().enumerate() {
                    let dir = self.detectors[k].direction;
                    let mut p = 0.0;
                    for (slot, &(x, y)) in h_before[k].iter().zip(nodes) {
                        let ez = grid.ez(x, y);
                        match dir {
                            FluxDirection::PlusX | FluxDirection::MinusX => {
                                let hy = 0.5 * (slot + grid.hy_at_node(x, y));
                                p += -ez * hy;
                            }
                            FluxDirection::PlusY | FluxDirection::MinusY => {
                                let hx = 0.5 * (slot + grid.hx_at_node(x, y));
                                p += ez * hx;
                            }
                        }
                    }
                    let sign = match dir {
                        FluxDirection::PlusX | FluxDirection::PlusY => 1.0,
                        FluxDirection::MinusX | FluxDirection::MinusY => -1.0,
                    };
                    flux_sums[k] += sign * p * self.dx;
                }
            }
            grid.update_e();
            let t = (n + 1) as f64 * self.dt();
            let ramp = if ramp_steps == 0 || n + 1 >= ramp_steps {
                1.0
            } else {
                let x = (n + 1) as f64 / ramp_steps as f64;
                0.5 * (1.0 - (std::f64::consts::PI * x).cos())
            };
            let drive = self.source.amplitude * ramp * (omega * t).sin();
            for &(x, y) in &source_nodes {
                grid.inject_ez(x, y, drive);
            }
            if n % 64 == 0 || n + 1 == total {
                let max_abs = grid.max_abs_ez();
                if max_abs > guard {
                    return Err(VoxError::SimulationDiverged {
                        max_abs,
                        bound: guard,
                    });
                }
            }
        }

        Ok(SimOutput {
            fluxes: flux_sums.iter().map(|s| s / m as f64).collect(),
            final_ez: grid.ez_field(),
        })
    }
}
