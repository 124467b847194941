//! Project arbitrary bit grids onto manufacturable geometries.
//!
//! Additive processes cannot print floating material or seal off hollow
//! pockets. The `connected` fabrication constraint removes every material
//! voxel with no path to the anchor edge, then fills air cavities that are
//! sealed away from the outside. The mapping is idempotent, so optimizers
//! can be trained directly on the projected designs.
//!
//! ```bash
//! cargo run --release --example fabrication_masks
//! ```

use voxopt::fdtd::{apply_fabrication, satisfies_fabrication, AnchorEdge, FabricationConstraint};
use voxopt::{Design, GridShape, VoxError};

fn show(label: &str, d: &Design) {
    println!("{label}:");
    let shape = d.shape();
    for y in (0..shape.ny).rev() {
        let row: String = (0..shape.nx)
            .map(|x| if d.at(x, y, 0) == 1 { '#' } else { '.' })
            .collect();
        println!("  {row}");
    }
}

fn grid(rows: &[&str]) -> Result<Design, VoxError> {
    // Rows are written top-down; the grid stores y upward.
    let ny = rows.len();
    let nx = rows[0].len();
    let shape = GridShape::new_2d(nx, ny)?;
    let mut d = Design::zeros(shape);
    for (r, row) in rows.iter().enumerate() {
        for (x, c) in row.chars().enumerate() {
            if c == '#' {
                d.set(shape.index(x, ny - 1 - r, 0), 1);
            }
        }
    }
    Ok(d)
}

fn main() -> Result<(), VoxError> {
    let constraint = FabricationConstraint::ConnectedNoCavities {
        anchor: AnchorEdge::Bottom,
    };

    // A floating island (top-left) and a sealed pocket inside the blob.
    let raw = grid(&[
        "##......",
        "........",
        "..####..",
        "..#..#..",
        "..####..",
        "..#.....",
        "..#.....",
    ])?;
    show("raw design", &raw);
    println!("manufacturable: {}", satisfies_fabrication(&raw, constraint));

    let mapped = apply_fabrication(&raw, constraint)?;
    show("after projection (anchor: bottom)", &mapped);
    println!("manufacturable: {}", satisfies_fabrication(&mapped, constraint));

    let twice = apply_fabrication(&mapped, constraint)?;
    println!("projection is idempotent: {}", twice == mapped);

    // The anchor edge decides which voxels count as grounded.
    let left = apply_fabrication(
        &raw,
        FabricationConstraint::ConnectedNoCavities {
            anchor: AnchorEdge::Left,
        },
    )?;
    show("same raw design, anchor: left", &left);
    Ok(())
}
