//! Persistence formats: PBD design files, field snapshots, and SVG renders.
//!
//! Designs travel between runs (and into `voxopt eval` / `voxopt render`)
//! as PBD text: a `PBD <width> <height> <depth>` header followed by one
//! `0`/`1` row per grid line. Field snapshots use the same style of self-describing
//! text format. Both round-trip exactly, which this example demonstrates.
//!
//! Run with: cargo run --release --example design_io

use ndarray::Array2;
use voxopt::fdtd::{load_snapshot, save_snapshot};
use voxopt::harness::design_svg;
use voxopt::seed::{stream_rng, STREAM_ENV};
use voxopt::{Design, GridShape, VoxError};

fn main() -> Result<(), VoxError> {
    // A small random design, serialized to PBD text.
    let shape = GridShape::new_2d(6, 4)?;
    let design = Design::random(shape, &mut stream_rng(42, STREAM_ENV));
    let text = design.to_pbd_string();
    println!("PBD text for a random 6x4 design:\n{text}");

    // Text -> design -> text round-trips exactly.
    let parsed = Design::from_pbd_str(&text)?;
    assert_eq!(parsed, design);
    assert_eq!(parsed.to_pbd_string(), text);
    println!("string round-trip: ok");

    // Same through a file.
    let dir = std::env::temp_dir().join("voxopt_design_io");
    std::fs::create_dir_all(&dir)?;
    let pbd_path = dir.join("design.pbd");
    design.save_pbd(&pbd_path)?;
    let loaded = Design::load_pbd(&pbd_path)?;
    assert_eq!(loaded, design);
    println!("file round-trip: ok ({})", pbd_path.display());

    // Field snapshots hold a 2-D array of floats, e.g. the final Ez field
    // of a simulation. Full f64 precision survives the round trip.
    let field = Array2::from_shape_fn((8, 5), |(x, y)| (x as f64 - 3.5) * 0.25 + y as f64 * 1e-9);
    let snap_path = dir.join("field.fld");
    save_snapshot(&snap_path, &field)?;
    let restored = load_snapshot(&snap_path)?;
    assert_eq!(restored, field);
    println!("snapshot round-trip: ok ({})", snap_path.display());

    // Designs render to standalone SVG for quick inspection.
    let svg_path = dir.join("design.svg");
    std::fs::write(&svg_path, design_svg(&design))?;
    println!("wrote {}", svg_path.display());
    Ok(())
}
