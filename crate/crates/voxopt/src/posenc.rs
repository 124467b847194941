//! Sine/cosine positional encoding of agent grid positions.
//!
//! Each axis coordinate is normalized to `[-1, 1]` (an axis of length 1 maps
//! to 0) and expanded into `2b + 1` features: the raw coordinate followed by
//! `sin(2^k pi a)` and `cos(2^k pi a)` for `k = 0..b`. The three axis blocks
//! are concatenated, so the output length is `3 (2b + 1)` regardless of grid
//! dimensionality; 2D grids simply contribute a constant z block.

use std::f64::consts::PI;

use crate::design::GridShape;
use crate::error::VoxError;

#[derive(Debug, Clone, Copy)]
pub struct PositionalEncoder {
    shape: GridShape,
    bands: usize,
}

impl PositionalEncoder {
    pub fn new(shape: GridShape, bands: usize) -> Self {
        assert!(bands >= 1, "need at least one band");
        Self { shape, bands }
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    /// Output vector length, `3 (2b + 1)`.
    pub fn dim(&self) -> usize {
        3 * (2 * self.bands + 1)
    }

    /// Normalized coordinate of index `i` on an axis of length `len`.
    fn normalize(i: usize, len: usize) -> f64 {
        if len <= 1 {
            0.0
        } else {
            -1.0 + 2.0 * i as f64 / (len - 1) as f64
        }
    }

    fn fill_axis(&self, a: f64, out: &mut Vec<f64>) {
        out.push(a);
        for k in 0..self.bands {
            out.push((f64::powi(2.0, k as i32) * PI * a).sin());
        }
        for k in 0..self.bands {
            out.push((f64::powi(2.0, k as i32) * PI * a).cos());
        }
    }

    /// Encoding of agent `n`.
    pub fn encode(&self, n: usize) -> Result<Vec<f64>, VoxError> {
        let count = self.shape.len();
        if n >= count {
            return Err(VoxError::IndexOutOfRange { index: n, count });
        }
        let (x, y, z) = self.shape.coords(n);
        let mut out = Vec::with_capacity(self.dim());
        self.fill_axis(Self::normalize(x, self.shape.nx), &mut out);
        self.fill_axis(Self::normalize(y, self.shape.ny), &mut out);
        self.fill_axis(Self::normalize(z, self.shape.nz), &mut out);
        Ok(out)
    }

    /// Row-major matrix of all agent encodings, one row per agent.
    pub fn encode_all(&self) -> ndarray::Array2<f64> {
        let n = self.shape.len();
        let mut m = ndarray::Array2::zeros((n, self.dim()));
        for i in 0..n {
            let row = self.encode(i).expect("index in range");
            m.row_mut(i).assign(&ndarray::ArrayView1::from(&row));
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn center_agent_encodes_to_zeros_and_ones() {
        // 3x3x1 grid: agent 4 sits at the center, normalized (0, 0, 0).
        let enc = PositionalEncoder::new(GridShape::new(3, 3, 1).unwrap(), 1);
        let v = enc.encode(4).unwrap();
        let expected = [0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0];
        assert_eq!(v.len(), expected.len());
        for (got, want) in v.iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn axis_feature_at_plus_one() {
        // f(1) = [1, sin(pi), sin(2 pi), cos(pi), cos(2 pi)] = [1, 0, 0, -1, 1]
        let enc = PositionalEncoder::new(GridShape::new(5, 1, 1).unwrap(), 2);
        let v = enc.encode(4).unwrap();
        let expected = [1.0, 0.0, 0.0, -1.0, 1.0];
        for (got, want) in v[..5].iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn default_band_count_gives_dim_51() {
        let enc = PositionalEncoder::new(GridShape::new(32, 32, 1).unwrap(), 8);
        assert_eq!(enc.dim(), 51);
        assert_eq!(enc.encode(0).unwrap().len(), 51);
    }

    #[test]
    fn out_of_range_index_errors() {
        let enc = PositionalEncoder::new(GridShape::new(2, 2, 1).unwrap(), 1);
        assert!(enc.encode(4).is_err());
    }

    #[test]
    fn injective_on_desk_scale_grids() {
        for shape in [
            GridShape::new(32, 32, 1).unwrap(),
            GridShape::new(12, 1, 1).unwrap(),
            GridShape::new(4, 5, 3).unwrap(),
        ] {
            let enc = PositionalEncoder::new(shape, 8);
            let mut seen: Vec<Vec<u64>> = Vec::with_capacity(shape.len());
            for n in 0..shape.len() {
                let key: Vec<u64> = enc
                    .encode(n)
                    .unwrap()
                    .iter()
                    .map(|f| f.to_bits())
                    .collect();
                assert!(!seen.contains(&key), "duplicate encoding in {shape}");
                seen.push(key);
            }
        }
    }

    #[test]
    fn mirror_symmetry_flips_odd_components() {
        let shape = GridShape::new(9, 1, 1).unwrap();
        let bands = 3;
        let enc = PositionalEncoder::new(shape, bands);
        for x in 0..shape.nx {
            let mirrored = shape.nx - 1 - x;
            let a = enc.encode(x).unwrap();
            let b = enc.encode(mirrored).unwrap();
            // x block: coordinate and sin terms negate, cos terms match exactly
            assert_abs_diff_eq!(a[0], -b[0], epsilon = 1e-12);
            for k in 0..bands {
                assert_abs_diff_eq!(a[1 + k], -b[1 + k], epsilon = 1e-12);
                assert_eq!(a[1 + bands + k], b[1 + bands + k]);
            }
        }
    }

    #[test]
    fn encode_is_deterministic() {
        let enc = PositionalEncoder::new(GridShape::new(7, 5, 1).unwrap(), 4);
        for n in 0..35 {
            assert_eq!(enc.encode(n).unwrap(), enc.encode(n).unwrap());
        }
    }
}
