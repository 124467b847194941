//! Binary designs on a 3D grid and the PBD interchange format.
//!
//! A design is a flat binary vector together with the grid shape it lives on.
//! Agent `n` maps to grid coordinates in row-major order with x fastest:
//! `n = x + nx * (y + ny * z)`.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::VoxError;

/// Grid extents of a design space. `nz = 1` for 2D problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridShape {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl GridShape {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self, VoxError> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(VoxError::InvalidShape { nx, ny, nz });
        }
        Ok(Self { nx, ny, nz })
    }

    /// 2D convenience constructor (`nz = 1`).
    pub fn new_2d(nx: usize, ny: usize) -> Result<Self, VoxError> {
        Self::new(nx, ny, 1)
    }

    /// Total number of agents (voxels).
    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid coordinates of agent `n`, row-major with x fastest.
    pub fn coords(&self, n: usize) -> (usize, usize, usize) {
        debug_assert!(n < self.len());
        let x = n % self.nx;
        let y = (n / self.nx) % self.ny;
        let z = n / (self.nx * self.ny);
        (x, y, z)
    }

    /// Flat agent index of grid coordinates.
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        debug_assert!(x < self.nx && y < self.ny && z < self.nz);
        x + self.nx * (y + self.ny * z)
    }
}

impl fmt::Display for GridShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.nx, self.ny, self.nz)
    }
}

/// A joint binary action: one bit per voxel of the grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Design {
    bits: Vec<u8>,
    shape: GridShape,
}

impl Design {
    /// Builds a design from raw bits; every entry must be 0 or 1 and the
    /// length must match the shape.
    pub fn new(bits: Vec<u8>, shape: GridShape) -> Result<Self, VoxError> {
        if bits.len() != shape.len() {
            return Err(VoxError::LengthMismatch {
                expected: shape.len(),
                got: bits.len(),
            });
        }
        if let Some(&bad) = bits.iter().find(|&&b| b > 1) {
            return Err(VoxError::NonBinaryValue(bad));
        }
        Ok(Self { bits, shape })
    }

    /// All-zero design.
    pub fn zeros(shape: GridShape) -> Self {
        Self {
            bits: vec![0; shape.len()],
            shape,
        }
    }

    /// All-one design.
    pub fn ones(shape: GridShape) -> Self {
        Self {
            bits: vec![1; shape.len()],
            shape,
        }
    }

    /// Uniform random design drawn from the given generator.
    pub fn random<R: rand::Rng>(shape: GridShape, rng: &mut R) -> Self {
        let bits = (0..shape.len())
            .map(|_| if rng.random::<bool>() { 1 } else { 0 })
            .collect();
        Self { bits, shape }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, n: usize) -> u8 {
        self.bits[n]
    }

    pub fn set(&mut self, n: usize, value: u8) {
        debug_assert!(value <= 1);
        self.bits[n] = value;
    }

    /// Bit at grid coordinates.
    pub fn at(&self, x: usize, y: usize, z: usize) -> u8 {
        self.bits[self.shape.index(x, y, z)]
    }

    /// Number of set bits.
    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Serializes to the PBD text format: one `PBD <nx> <ny> <nz>` header
    /// line, then nz blocks of ny lines of nx characters in {0,1}.
    pub fn write_pbd<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let s = self.shape;
        writeln!(w, "PBD {} {} {}", s.nx, s.ny, s.nz)?;
        let mut line = String::with_capacity(s.nx + 1);
        for z in 0..s.nz {
            for y in 0..s.ny {
                line.clear();
                for x in 0..s.nx {
                    line.push(if self.at(x, y, z) == 1 { '1' } else { '0' });
                }
                writeln!(w, "{line}")?;
            }
        }
        Ok(())
    }

    pub fn to_pbd_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_pbd(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("PBD output is ASCII")
    }

    /// Parses the PBD text format produced by [`Design::write_pbd`].
    pub fn read_pbd<R: BufRead>(r: &mut R) -> Result<Self, VoxError> {
        let mut header = String::new();
        r.read_line(&mut header)?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "PBD" {
            return Err(VoxError::Format(format!(
                "bad PBD header: {:?}",
                header.trim_end()
            )));
        }
        let parse = |s: &str| -> Result<usize, VoxError> {
            s.parse()
                .map_err(|_| VoxError::Format(format!("bad PBD dimension {s:?}")))
        };
        let shape = GridShape::new(parse(fields[1])?, parse(fields[2])?, parse(fields[3])?)?;
        let mut bits = vec![0u8; shape.len()];
        let mut line = String::new();
        for z in 0..shape.nz {
            for y in 0..shape.ny {
                line.clear();
                if r.read_line(&mut line)? == 0 {
                    return Err(VoxError::Format("unexpected end of PBD data".into()));
                }
                let row = line.trim_end_matches(['\n', '\r']);
                if row.len() != shape.nx {
                    return Err(VoxError::Format(format!(
                        "PBD row z={z} y={y} has {} characters, expected {}",
                        row.len(),
                        shape.nx
                    )));
                }
                for (x, ch) in row.chars().enumerate() {
                    bits[shape.index(x, y, z)] = match ch {
                        '0' => 0,
                        '1' => 1,
                        other => {
                            return Err(VoxError::Format(format!(
                                "PBD row contains {other:?}, expected 0 or 1"
                            )))
                        }
                    };
                }
            }
        }
        Ok(Self { bits, shape })
    }

    pub fn from_pbd_str(s: &str) -> Result<Self, VoxError> {
        Self::read_pbd(&mut s.as_bytes())
    }

    pub fn save_pbd(&self, path: &std::path::Path) -> Result<(), VoxError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_pbd(&mut f)?;
        Ok(())
    }

    pub fn load_pbd(path: &std::path::Path) -> Result<Self, VoxError> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_pbd(&mut f)
    }
}

/// Payoff of a design against a binary target: `1 - hamming/N`.
pub fn hamming_payoff(d: &Design, target: &[u8]) -> Result<f64, VoxError> {
    if d.len() != target.len() {
        return Err(VoxError::LengthMismatch {
            expected: target.len(),
            got: d.len(),
        });
    }
    let differing = d
        .bits()
        .iter()
        .zip(target)
        .filter(|(a, b)| a != b)
        .count();
    Ok(1.0 - differing as f64 / target.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn shape_indexing_roundtrip() {
        let s = GridShape::new(3, 4, 2).unwrap();
        assert_eq!(s.len(), 24);
        for n in 0..s.len() {
            let (x, y, z) = s.coords(n);
            assert_eq!(s.index(x, y, z), n);
        }
        // x is the fastest axis
        assert_eq!(s.coords(1), (1, 0, 0));
        assert_eq!(s.coords(3), (0, 1, 0));
        assert_eq!(s.coords(12), (0, 0, 1));
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(GridShape::new(0, 4, 1).is_err());
        assert!(GridShape::new(4, 1, 0).is_err());
    }

    #[test]
    fn non_binary_bits_rejected() {
        let s = GridShape::new_2d(2, 1).unwrap();
        assert!(Design::new(vec![0, 2], s).is_err());
        assert!(Design::new(vec![0, 1, 1], s).is_err());
    }

    #[test]
    fn hamming_identity_is_one() {
        let s = GridShape::new_2d(4, 1).unwrap();
        let d = Design::new(vec![1, 0, 1, 1], s).unwrap();
        assert_eq!(hamming_payoff(&d, &[1, 0, 1, 1]).unwrap(), 1.0);
    }

    #[test]
    fn hamming_complement_is_zero() {
        let s = GridShape::new_2d(5, 1).unwrap();
        let d = Design::new(vec![1, 0, 1, 1, 0], s).unwrap();
        assert_eq!(hamming_payoff(&d, &[0, 1, 0, 0, 1]).unwrap(), 0.0);
    }

    #[test]
    fn hamming_one_bit_of_four() {
        let s = GridShape::new_2d(4, 1).unwrap();
        let d = Design::new(vec![1, 0, 1, 0], s).unwrap();
        assert_eq!(hamming_payoff(&d, &[1, 0, 0, 0]).unwrap(), 0.75);
    }

    #[test]
    fn hamming_length_mismatch_errors() {
        let s = GridShape::new_2d(4, 1).unwrap();
        let d = Design::new(vec![1, 0, 1, 0], s).unwrap();
        assert!(hamming_payoff(&d, &[1, 0, 0]).is_err());
    }

    #[test]
    fn pbd_golden_string() {
        let s = GridShape::new(3, 2, 1).unwrap();
        let mut d = Design::zeros(s);
        d.set(s.index(0, 0, 0), 1);
        d.set(s.index(2, 1, 0), 1);
        assert_eq!(d.to_pbd_string(), "PBD 3 2 1\n100\n001\n");
    }

    #[test]
    fn pbd_rejects_garbage() {
        assert!(Design::from_pbd_str("PBX 2 2 1\n00\n00\n").is_err());
        assert!(Design::from_pbd_str("PBD 2 2 1\n00\n0\n").is_err());
        assert!(Design::from_pbd_str("PBD 2 2 1\n00\nx0\n").is_err());
        assert!(Design::from_pbd_str("PBD 2 2 1\n00\n").is_err());
    }

    proptest! {
        #[test]
        fn pbd_roundtrip(nx in 1usize..6, ny in 1usize..6, nz in 1usize..4, seed in 0u64..1000) {
            use rand::SeedableRng;
            let shape = GridShape::new(nx, ny, nz).unwrap();
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            let d = Design::random(shape, &mut rng);
            let back = Design::from_pbd_str(&d.to_pbd_string()).unwrap();
            prop_assert_eq!(d, back);
        }
    }
}
