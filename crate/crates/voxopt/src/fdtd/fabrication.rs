//! Fabrication constraints for additively manufactured designs.
//!
//! Two-photon-style polymer fabrication cannot print floating material and
//! cannot leave fully enclosed air cavities. The mapping enforces both by
//! construction: material is kept only where it is 4-connected to the
//! anchor (substrate) edge, and air is kept only where it is 4-connected
//! to the design-region boundary. Everything else is rewritten. The
//! mapping is a projection: applying it twice equals applying it once.

use crate::design::{Design, GridShape};
use crate::error::VoxError;

/// The design-region edge that acts as the substrate for connectivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnchorEdge {
    #[default]
    Bottom,
    Top,
    Left,
    Right,
}

/// Fabrication constraint mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FabricationConstraint {
    /// No constraint: the identity mapping (subtractive processes).
    #[default]
    None,
    /// Every material voxel must connect to the anchor edge; no enclosed
    /// air cavities (additive processes).
    ConnectedNoCavities { anchor: AnchorEdge },
}

/// Breadth-first 4-connected flood fill over cells of `value`, starting
/// from all seed cells that hold `value`. Returns the reached mask.
fn flood(bits: &[u8], shape: GridShape, seeds: &[usize], value: u8) -> Vec<bool> {
    let (nx, ny) = (shape.nx, shape.ny);
    let mut reached = vec![false; bits.len()];
    let mut queue: Vec<usize> = Vec::new();
    for &s in seeds {
        if bits[s] == value && !reached[s] {
            reached[s] = true;
            queue.push(s);
        }
    }
    while let Some(n) = queue.pop() {
        let x = n % nx;
        let y = n / nx;
        let mut visit = |m: usize| {
            if bits[m] == value && !reached[m] {
                reached[m] = true;
                queue.push(m);
            }
        };
        if x > 0 {
            visit(n - 1);
        }
        if x + 1 < nx {
            visit(n + 1);
        }
        if y > 0 {
            visit(n - nx);
        }
        if y + 1 < ny {
            visit(n + nx);
        }
    }
    reached
}

fn edge_indices(shape: GridShape, edge: AnchorEdge) -> Vec<usize> {
    let (nx, ny) = (shape.nx, shape.ny);
    match edge {
        AnchorEdge::Bottom => (0..nx).collect(),
        AnchorEdge::Top => (0..nx).map(|x| x + nx * (ny - 1)).collect(),
        AnchorEdge::Left => (0..ny).map(|y| nx * y).collect(),
        AnchorEdge::Right => (0..ny).map(|y| nx - 1 + nx * y).collect(),
    }
}

fn boundary_indices(shape: GridShape) -> Vec<usize> {
    let mut ids = Vec::new();
    ids.extend(edge_indices(shape, AnchorEdge::Bottom));
    ids.extend(edge_indices(shape, AnchorEdge::Top));
    ids.extend(edge_indices(shape, AnchorEdge::Left));
    ids.extend(edge_indices(shape, AnchorEdge::Right));
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// Projects a 2D design onto the fabricable set.
///
/// `ConnectedNoCavities` first removes material not 4-connected to the
/// anchor edge, then fills air regions not 4-connected to the design
/// boundary. The result satisfies both constraints and is a fixed point of
/// the mapping.
pub fn apply_fabrication(d: &Design, c: FabricationConstraint) -> Result<Design, VoxError> {
    let shape = d.shape();
    if shape.nz != 1 {
        return Err(VoxError::ShapeMismatch(format!(
            "fabrication mapping is defined for 2D designs, got nz = {}",
            shape.nz
        )));
    }
    let anchor = match c {
        FabricationConstraint::None => return Ok(d.clone()),
        FabricationConstraint::ConnectedNoCavities { anchor } => anchor,
    };

    let mut bits = d.bits().to_vec();
    // Pass 1: material not reachable from the anchor edge becomes air.
    let anchored = flood(&bits, shape, &edge_indices(shape, anchor), 1);
    for (b, ok) in bits.iter_mut().zip(&anchored) {
        if *b == 1 && !ok {
            *b = 0;
        }
    }
    // Pass 2: air not reachable from the region boundary becomes material.
    let vented = flood(&bits, shape, &boundary_indices(shape), 0);
    for (b, ok) in bits.iter_mut().zip(&vented) {
        if *b == 0 && !ok {
            *b = 1;
        }
    }
    Design::new(bits, shape)
}

/// Checks the two fabrication invariants directly: every material voxel
/// 4-connected to the anchor edge, every air voxel 4-connected to the
/// design boundary.
pub fn satisfies_fabrication(d: &Design, c: FabricationConstraint) -> bool {
    let anchor = match c {
        FabricationConstraint::None => return true,
        FabricationConstraint::ConnectedNoCavities { anchor } => anchor,
    };
    let shape = d.shape();
    if shape.nz != 1 {
        return false;
    }
    let bits = d.bits();
    let anchored = flood(bits, shape, &edge_indices(shape, anchor), 1);
    let vented = flood(bits, shape, &boundary_indices(shape), 0);
    bits.iter()
        .enumerate()
        .all(|(n, &b)| if b == 1 { anchored[n] } else { vented[n] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{stream_rng, STREAM_ENV};
    use rand::Rng;

    fn design_from_rows(rows: &[&str]) -> Design {
        // Row 0 is written at the TOP, so reverse to make "bottom" the
        // first stored row (y = 0).
        let ny = rows.len();
        let nx = rows[0].len();
        let bits: Vec<u8> = rows
            .iter()
            .rev()
            .flat_map(|r| r.chars().map(|c| if c == '1' { 1u8 } else { 0u8 }))
            .collect();
        Design::new(bits, GridShape::new_2d(nx, ny).unwrap()).unwrap()
    }

    const BOTTOM: FabricationConstraint = FabricationConstraint::ConnectedNoCavities {
        anchor: AnchorEdge::Bottom,
    };

    #[test]
    fn none_mode_is_the_identity() {
        let d = design_from_rows(&["10101", "01010", "00100"]);
        let out = apply_fabrication(&d, FabricationConstraint::None).unwrap();
        assert_eq!(out.bits(), d.bits());
    }

    #[test]
    fn fully_solid_design_is_unchanged() {
        let shape = GridShape::new_2d(6, 5).unwrap();
        let d = Design::new(vec![1; 30], shape).unwrap();
        let out = apply_fabrication(&d, BOTTOM).unwrap();
        assert_eq!(out.bits(), d.bits());
        assert!(satisfies_fabrication(&out, BOTTOM));
    }

    #[test]
    fn floating_center_voxel_is_removed() {
        let d = design_from_rows(&[
            "00000", //
            "00000", //
            "00100", //
            "00000", //
            "00000",
        ]);
        let out = apply_fabrication(&d, BOTTOM).unwrap();
        assert!(out.bits().iter().all(|&b| b == 0), "expected all-air output");
    }

    #[test]
    fn anchored_ring_keeps_its_wall_and_fills_the_cavity() {
        let ring = design_from_rows(&[
            "00000", //
            "01110", //
            "01010", //
            "01110", //
            "01110", // touches the bottom edge
        ]);
        let solid = design_from_rows(&[
            "00000", //
            "01110", //
            "01110", //
            "01110", //
            "01110",
        ]);
        let out = apply_fabrication(&ring, BOTTOM).unwrap();
        assert_eq!(out.bits(), solid.bits());
    }

    #[test]
    fn anchor_edge_selects_which_material_survives() {
        // A bar along the top edge floats for a bottom anchor but is
        // grounded for a top anchor.
        let d = design_from_rows(&[
            "11111", //
            "00000", //
            "00000",
        ]);
        let bottom = apply_fabrication(&d, BOTTOM).unwrap();
        assert!(bottom.bits().iter().all(|&b| b == 0));
        let top = apply_fabrication(
            &d,
            FabricationConstraint::ConnectedNoCavities {
                anchor: AnchorEdge::Top,
            },
        )
        .unwrap();
        assert_eq!(top.bits(), d.bits());
    }

    #[test]
    fn removal_can_open_a_cavity_that_then_stays_air() {
        // The cavity's lid is floating; removing it vents the cavity, so
        // pass 2 must leave the former cavity as air.
        let d = design_from_rows(&[
            "01110", // floating ring with an interior air pocket...
            "01010", //
            "00000", // ...separated from the anchored base by a gap row
            "01110", //
            "01110",
        ]);
        let out = apply_fabrication(&d, BOTTOM).unwrap();
        let expect = design_from_rows(&[
            "00000", //
            "00000", //
            "00000", //
            "01110", //
            "01110",
        ]);
        assert_eq!(out.bits(), expect.bits());
        assert!(satisfies_fabrication(&out, BOTTOM));
    }

    #[test]
    fn mapping_is_idempotent_and_valid_on_random_designs() {
        let shape = GridShape::new_2d(12, 10).unwrap();
        let mut rng = stream_rng(33, STREAM_ENV);
        let anchors = [
            AnchorEdge::Bottom,
            AnchorEdge::Top,
            AnchorEdge::Left,
            AnchorEdge::Right,
        ];
        for k in 0..10_000 {
            let density = 0.2 + 0.6 * (k % 7) as f64 / 6.0;
            let bits: Vec<u8> = (0..shape.len())
                .map(|_| u8::from(rng.random_range(0.0..1.0) < density))
                .collect();
            let d = Design::new(bits, shape).unwrap();
            let c = FabricationConstraint::ConnectedNoCavities {
                anchor: anchors[k % 4],
            };
            let once = apply_fabrication(&d, c).unwrap();
            assert!(satisfies_fabrication(&once, c), "invariants violated");
            let twice = apply_fabrication(&once, c).unwrap();
            assert_eq!(once.bits(), twice.bits(), "mapping not idempotent");
        }
    }

    #[test]
    fn three_dimensional_designs_are_rejected() {
        let d = Design::zeros(GridShape::new(3, 3, 2).unwrap());
        assert!(matches!(
            apply_fabrication(&d, BOTTOM),
            Err(VoxError::ShapeMismatch(_))
        ));
    }
}
