//! Multilayer perceptron with ReLU hidden layers and a flat parameter store.
//!
//! Parameters live in one contiguous `Vec<f64>` (per layer: weights in
//! row-major `[out][in]` order, then biases), which keeps the Adam state,
//! checkpoints, and reinitialization trivial.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::error::VoxError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputHead {
    Sigmoid,
    Linear,
    /// ReLU on the final layer — used for feature trunks that feed into
    /// another network rather than producing a prediction directly.
    Relu,
}

impl OutputHead {
    pub fn tag(&self) -> &'static str {
        match self {
            OutputHead::Sigmoid => "sigmoid",
            OutputHead::Linear => "linear",
            OutputHead::Relu => "relu",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self, VoxError> {
        match tag {
            "sigmoid" => Ok(OutputHead::Sigmoid),
            "linear" => Ok(OutputHead::Linear),
            "relu" => Ok(OutputHead::Relu),
            other => Err(VoxError::Format(format!("unknown output head {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct LayerLayout {
    w_off: usize,
    b_off: usize,
    rows: usize,
    cols: usize,
}

#[derive(Debug, Clone)]
pub struct MlpModel {
    layer_sizes: Vec<usize>,
    output_head: OutputHead,
    params: Vec<f64>,
    layout: Vec<LayerLayout>,
}

/// Per-layer activations kept for the backward pass. `activations[0]` is the
/// input batch, the last entry is the network output.
pub struct TrainCache {
    activations: Vec<Array2<f64>>,
}

impl TrainCache {
    pub fn output(&self) -> &Array2<f64> {
        self.activations.last().expect("cache holds the output")
    }
}

/// Flat parameter gradient plus the gradient w.r.t. the input batch.
pub struct Gradients {
    pub params: Vec<f64>,
    pub input: Array2<f64>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl MlpModel {
    /// Builds a model with freshly initialized parameters.
    ///
    /// `layer_sizes` lists input dim, hidden dims, output dim; at least one
    /// weight layer is required.
    pub fn new(layer_sizes: &[usize], output_head: OutputHead, seed: u64) -> Self {
        assert!(
            layer_sizes.len() >= 2,
            "need at least input and output sizes"
        );
        assert!(
            layer_sizes.iter().all(|&s| s > 0),
            "layer sizes must be positive"
        );
        let mut layout = Vec::with_capacity(layer_sizes.len() - 1);
        let mut off = 0;
        for w in layer_sizes.windows(2) {
            let (cols, rows) = (w[0], w[1]);
            layout.push(LayerLayout {
                w_off: off,
                b_off: off + rows * cols,
                rows,
                cols,
            });
            off += rows * cols + rows;
        }
        let mut model = Self {
            layer_sizes: layer_sizes.to_vec(),
            output_head,
            params: vec![0.0; off],
            layout,
        };
        model.reinitialize(seed);
        model
    }

    /// Rebuilds a model from a saved flat parameter vector.
    pub fn from_parts(
        layer_sizes: &[usize],
        output_head: OutputHead,
        params: Vec<f64>,
    ) -> Result<Self, VoxError> {
        if layer_sizes.len() < 2 || layer_sizes.iter().any(|&s| s == 0) {
            return Err(VoxError::Format(format!(
                "invalid layer sizes {layer_sizes:?}"
            )));
        }
        let mut model = Self::new(layer_sizes, output_head, 0);
        if params.len() != model.params.len() {
            return Err(VoxError::LengthMismatch {
                expected: model.params.len(),
                got: params.len(),
            });
        }
        model.params = params;
        Ok(model)
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn output_head(&self) -> OutputHead {
        self.output_head
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Draws fresh parameters uniformly from `±sqrt(1/fan_in)` per layer,
    /// weights first (row-major), then biases. Deterministic per seed.
    pub fn reinitialize(&mut self, seed: u64) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        for lay in &self.layout {
            let bound = (1.0 / lay.cols as f64).sqrt();
            for i in 0..lay.rows * lay.cols {
                self.params[lay.w_off + i] = rng.random_range(-bound..bound);
            }
            for i in 0..lay.rows {
                self.params[lay.b_off + i] = rng.random_range(-bound..bound);
            }
        }
    }

    fn weight_view(&self, l: usize) -> ArrayView2<'_, f64> {
        let lay = self.layout[l];
        ArrayView2::from_shape(
            (lay.rows, lay.cols),
            &self.params[lay.w_off..lay.w_off + lay.rows * lay.cols],
        )
        .expect("contiguous weight block")
    }

    fn bias_view(&self, l: usize) -> ArrayView1<'_, f64> {
        let lay = self.layout[l];
        ArrayView1::from(&self.params[lay.b_off..lay.b_off + lay.rows])
    }

    fn check_input(&self, cols: usize) -> Result<(), VoxError> {
        if cols != self.input_dim() {
            return Err(VoxError::ShapeMismatch(format!(
                "input has {cols} features, model expects {}",
                self.input_dim()
            )));
        }
        Ok(())
    }

    /// Batched forward pass; rows are independent samples.
    pub fn forward_batch(&self, x: &ArrayView2<f64>) -> Result<Array2<f64>, VoxError> {
        let mut cache = self.forward_cached(x)?;
        Ok(cache.activations.pop().expect("cache holds the output"))
    }

    /// Single-sample forward pass.
    pub fn forward(&self, x: &ArrayView1<f64>) -> Result<Array1<f64>, VoxError> {
        let x2 = x
            .to_owned()
            .into_shape_with_order((1, x.len()))
            .expect("1 x n reshape");
        let out = self.forward_batch(&x2.view())?;
        Ok(out.row(0).to_owned())
    }

    /// Forward pass that keeps per-layer activations for [`Self::backward`].
    pub fn forward_cached(&self, x: &ArrayView2<f64>) -> Result<TrainCache, VoxError> {
        self.check_input(x.ncols())?;
        let last = self.layout.len() - 1;
        let mut activations = Vec::with_capacity(self.layout.len() + 1);
        activations.push(x.to_owned());
        for l in 0..self.layout.len() {
            let mut z = activations[l].dot(&self.weight_view(l).t());
            z += &self.bias_view(l);
            if l < last {
                z.mapv_inplace(|v| v.max(0.0));
            } else {
                match self.output_head {
                    OutputHead::Sigmoid => z.mapv_inplace(sigmoid),
                    OutputHead::Linear => {}
                    OutputHead::Relu => z.mapv_inplace(|v| v.max(0.0)),
                }
            }
            activations.push(z);
        }
        Ok(TrainCache { activations })
    }

    /// Reverse pass. `upstream` is dLoss/dOutput for the cached batch;
    /// returns flat parameter gradients plus the input gradient.
    pub fn backward(&self, cache: &TrainCache, upstream: &ArrayView2<f64>) -> Gradients {
        let last = self.layout.len() - 1;
        let out = cache.output();
        assert_eq!(
            upstream.dim(),
            out.dim(),
            "upstream gradient must match the output shape"
        );

        let mut grad = vec![0.0; self.params.len()];
        // delta = dLoss/dZ at the current layer
        let mut delta = match self.output_head {
            OutputHead::Sigmoid => {
                let mut d = upstream.to_owned();
                d.zip_mut_with(out, |u, &y| *u *= y * (1.0 - y));
                d
            }
            OutputHead::Linear => upstream.to_owned(),
            OutputHead::Relu => {
                let mut d = upstream.to_owned();
                d.zip_mut_with(out, |u, &y| {
                    if y <= 0.0 {
                        *u = 0.0;
                    }
                });
                d
            }
        };

        for l in (0..=last).rev() {
            let lay = self.layout[l];
            let a_prev = &cache.activations[l];
            let dw = delta.t().dot(a_prev);
            grad[lay.w_off..lay.w_off + lay.rows * lay.cols]
                .copy_from_slice(dw.as_standard_layout().as_slice().unwrap());
            let db = delta.sum_axis(Axis(0));
            grad[lay.b_off..lay.b_off + lay.rows].copy_from_slice(db.as_slice().unwrap());

            let mut d_prev = delta.dot(&self.weight_view(l));
            if l > 0 {
                // ReLU mask: post-activation > 0 iff pre-activation > 0
                d_prev.zip_mut_with(a_prev, |d, &a| {
                    if a <= 0.0 {
                        *d = 0.0;
                    }
                });
            }
            delta = d_prev;
        }

        Gradients {
            params: grad,
            input: delta,
        }
    }
}
