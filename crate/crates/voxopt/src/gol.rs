//! Game-of-Life stability environment.
//!
//! The payoff rewards designs that are both densely populated and stable
//! under one Conway step: alive-cell ratio minus changed-cell ratio. A
//! perfect still life scores exactly its alive ratio; chaotic patterns are
//! penalized by the cells they flip. Cells beyond the grid border are dead.

use ndarray::{Array2, ArrayView2};

use crate::design::{Design, GridShape};
use crate::env::PayoffEnvironment;
use crate::error::VoxError;

/// Applies one step of Conway's rules on the 8-neighborhood with a dead
/// border: a live cell survives with 2 or 3 live neighbors, a dead cell
/// with exactly 3 live neighbors becomes alive, everything else is dead.
pub fn gol_step(grid: &ArrayView2<u8>) -> Array2<u8> {
    let (ny, nx) = grid.dim();
    let mut next = Array2::<u8>::zeros((ny, nx));
    for y in 0..ny {
        for x in 0..nx {
            let mut neighbors = 0u8;
            let y0 = y.saturating_sub(1);
            let x0 = x.saturating_sub(1);
            let y1 = (y + 1).min(ny.saturating_sub(1));
            let x1 = (x + 1).min(nx.saturating_sub(1));
            for yy in y0..=y1 {
                for xx in x0..=x1 {
                    if (yy, xx) != (y, x) {
                        neighbors += grid[(yy, xx)];
                    }
                }
            }
            let alive = grid[(y, x)] == 1;
            next[(y, x)] = u8::from(if alive {
                neighbors == 2 || neighbors == 3
            } else {
                neighbors == 3
            });
        }
    }
    next
}

/// Stability payoff: `alive_ratio(d) − changed_ratio(gol_step(d), d)`, with
/// both ratios counted over all N cells. Not clamped — unstable designs can
/// score below zero.
pub fn gol_payoff(d: &Design) -> Result<f64, VoxError> {
    let shape = d.shape();
    if shape.nz != 1 {
        return Err(VoxError::ShapeMismatch(format!(
            "game-of-life designs are 2D, got nz = {}",
            shape.nz
        )));
    }
    let n = shape.len() as f64;
    let grid = Array2::from_shape_vec((shape.ny, shape.nx), d.bits().to_vec())
        .expect("design length matches its shape");
    let next = gol_step(&grid.view());

    let alive = grid.iter().filter(|&&c| c == 1).count() as f64;
    let changed = grid
        .iter()
        .zip(next.iter())
        .filter(|(a, b)| a != b)
        .count() as f64;
    Ok((alive - changed) / n)
}

/// The Game-of-Life environment over a `width × height` design grid.
#[derive(Debug, Clone)]
pub struct GolEnv {
    shape: GridShape,
}

impl GolEnv {
    pub fn new(width: usize, height: usize) -> Result<Self, VoxError> {
        Ok(Self {
            shape: GridShape::new_2d(width, height)?,
        })
    }
}

impl Default for GolEnv {
    /// The standard benchmark grid: 32×32, i.e. 1024 agents.
    fn default() -> Self {
        Self::new(32, 32).expect("default grid dimensions are valid")
    }
}

impl PayoffEnvironment for GolEnv {
    fn shape(&self) -> GridShape {
        self.shape
    }

    fn name(&self) -> &str {
        "gol"
    }

    fn evaluate(&self, d: &Design) -> f64 {
        gol_payoff(d).expect("run loop only evaluates designs of this environment's shape")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{stream_rng, STREAM_ENV};
    use rand::Rng;

    fn design_from_rows(rows: &[&str]) -> Design {
        let ny = rows.len();
        let nx = rows[0].len();
        let bits: Vec<u8> = rows
            .iter()
            .flat_map(|r| r.chars().map(|c| if c == '1' { 1u8 } else { 0u8 }))
            .collect();
        Design::new(bits, GridShape::new_2d(nx, ny).unwrap()).unwrap()
    }

    fn grid_of(d: &Design) -> Array2<u8> {
        let s = d.shape();
        Array2::from_shape_vec((s.ny, s.nx), d.bits().to_vec()).unwrap()
    }

    /// Independent reference: neighbor counts via a zero-padded array and
    /// eight shifted window sums, structurally unlike the per-cell loop.
    fn gol_step_reference(grid: &ArrayView2<u8>) -> Array2<u8> {
        let (ny, nx) = grid.dim();
        let mut padded = Array2::<u32>::zeros((ny + 2, nx + 2));
        for y in 0..ny {
            for x in 0..nx {
                padded[(y + 1, x + 1)] = u32::from(grid[(y, x)]);
            }
        }
        let mut counts = Array2::<u32>::zeros((ny, nx));
        for dy in 0..3 {
            for dx in 0..3 {
                if (dy, dx) == (1, 1) {
                    continue;
                }
                let window = padded.slice(ndarray::s![dy..dy + ny, dx..dx + nx]);
                counts = counts + &window;
            }
        }
        let mut next = Array2::<u8>::zeros((ny, nx));
        for y in 0..ny {
            for x in 0..nx {
                let c = counts[(y, x)];
                next[(y, x)] = u8::from(if grid[(y, x)] == 1 {
                    c == 2 || c == 3
                } else {
                    c == 3
                });
            }
        }
        next
    }

    #[test]
    fn empty_grid_is_a_fixed_point_scoring_zero() {
        let d = Design::zeros(GridShape::new_2d(6, 6).unwrap());
        let grid = grid_of(&d);
        assert_eq!(gol_step(&grid.view()), grid);
        assert_eq!(gol_payoff(&d).unwrap(), 0.0);
    }

    #[test]
    fn block_is_a_still_life() {
        let d = design_from_rows(&["0000", "0110", "0110", "0000"]);
        let grid = grid_of(&d);
        assert_eq!(gol_step(&grid.view()), grid);
    }

    #[test]
    fn block_in_ten_by_ten_scores_exactly_four_percent() {
        let mut rows = vec!["0000000000"; 10];
        rows[4] = "0001100000";
        rows[5] = "0001100000";
        let d = design_from_rows(&rows);
        assert_eq!(gol_payoff(&d).unwrap(), 0.04);
    }

    #[test]
    fn blinker_oscillates_and_scores_negative() {
        let horizontal = design_from_rows(&["00000", "00000", "01110", "00000", "00000"]);
        let vertical = design_from_rows(&["00000", "00100", "00100", "00100", "00000"]);
        assert_eq!(gol_step(&grid_of(&horizontal).view()), grid_of(&vertical));
        assert_eq!(gol_step(&grid_of(&vertical).view()), grid_of(&horizontal));
        // 3 alive, 4 changed out of 25.
        assert_eq!(gol_payoff(&horizontal).unwrap(), (3.0 - 4.0) / 25.0);
    }

    #[test]
    fn known_still_lifes_change_nothing() {
        let beehive = design_from_rows(&[
            "000000", "001100", "010010", "001100", "000000",
        ]);
        let loaf = design_from_rows(&[
            "000000", "001100", "010010", "001010", "000100", "000000",
        ]);
        for d in [beehive, loaf] {
            let grid = grid_of(&d);
            assert_eq!(gol_step(&grid.view()), grid, "pattern is not still");
            let alive = d.bits().iter().filter(|&&b| b == 1).count() as f64;
            assert_eq!(gol_payoff(&d).unwrap(), alive / d.shape().len() as f64);
        }
    }

    #[test]
    fn step_matches_the_padded_window_reference_on_random_grids() {
        let mut rng = stream_rng(100, STREAM_ENV);
        for _ in 0..1000 {
            let (ny, nx) = (rng.random_range(1..14), rng.random_range(1..14));
            let grid =
                Array2::from_shape_fn((ny, nx), |_| rng.random_range(0..2u8));
            assert_eq!(gol_step(&grid.view()), gol_step_reference(&grid.view()));
        }
    }

    #[test]
    fn payoff_is_mirror_invariant() {
        let shape = GridShape::new_2d(9, 7).unwrap();
        let mut rng = stream_rng(7, STREAM_ENV);
        for _ in 0..100 {
            let bits: Vec<u8> = (0..shape.len()).map(|_| rng.random_range(0..2u8)).collect();
            let d = Design::new(bits.clone(), shape).unwrap();

            let mut flipped_x = vec![0u8; shape.len()];
            let mut flipped_y = vec![0u8; shape.len()];
            for y in 0..shape.ny {
                for x in 0..shape.nx {
                    let src = shape.index(x, y, 0);
                    flipped_x[shape.index(shape.nx - 1 - x, y, 0)] = bits[src];
                    flipped_y[shape.index(x, shape.ny - 1 - y, 0)] = bits[src];
                }
            }
            let p = gol_payoff(&d).unwrap();
            assert_eq!(p, gol_payoff(&Design::new(flipped_x, shape).unwrap()).unwrap());
            assert_eq!(p, gol_payoff(&Design::new(flipped_y, shape).unwrap()).unwrap());
        }
    }

    #[test]
    fn random_density_half_scores_near_the_documented_reference() {
        let env = GolEnv::default();
        assert_eq!(env.shape().len(), 1024);
        let mut rng = stream_rng(42, STREAM_ENV);
        let samples = 500;
        let mut total = 0.0;
        for _ in 0..samples {
            let bits: Vec<u8> = (0..env.shape().len())
                .map(|_| rng.random_range(0..2u8))
                .collect();
            total += env.evaluate(&Design::new(bits, env.shape()).unwrap());
        }
        let mean = total / samples as f64;
        assert!(
            (0.02..=0.08).contains(&mean),
            "mean random payoff {mean} far from the ~0.04 reference"
        );
    }

    #[test]
    fn three_dimensional_designs_are_rejected() {
        let d = Design::zeros(GridShape::new(3, 3, 2).unwrap());
        assert!(matches!(gol_payoff(&d), Err(VoxError::ShapeMismatch(_))));
    }
}
