//! Feed-forward networks and their concrete evaluation.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Activation {
    /// `max(x, 0)` componentwise.
    ReLU,
    /// Identity.
    Linear,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::ReLU => x.max(0.0),
            Activation::Linear => x,
        }
    }
}

/// Fully connected layer `act(W x + b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    weight: Matrix,
    bias: Vec<f64>,
    activation: Activation,
}

impl Layer {
    pub fn new(weight: Matrix, bias: Vec<f64>, activation: Activation) -> Result<Self> {
        if bias.len() != weight.rows() {
            return Err(Error::DimensionMismatch { context: "layer bias", expected: weight.rows(), found: bias.len() });
        }
        if !weight.is_finite() || bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidModel("layer parameters must be finite".into()));
        }
        Ok(Self { weight, bias, activation })
    }

    pub fn weight(&self) -> &Matrix {
        &self.weight
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn input_dim(&self) -> usize {
        self.weight.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        (0..self.output_dim())
            .map(|i| self.activation.apply(dot(self.weight.row(i), x) + self.bias[i]))
            .collect()
    }
}

/// Sequential feed-forward network.
#[derive(Clone, Debug, PartialEq)]
pub struct Ffnn {
    layers: Vec<Layer>,
}

impl Ffnn {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidModel("network has no layers".into()));
        }
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[0].output_dim() != pair[1].input_dim() {
                return Err(Error::InvalidModel(format!(
                    "layer {} outputs {} values but layer {} expects {}",
                    k,
                    pair[0].output_dim(),
                    k + 1,
                    pair[1].input_dim()
                )));
            }
        }
        Ok(Self { layers })
    }

    /// Network with layer widths `sizes` (input first), ReLU hidden layers,
    /// a linear output layer, and weights and biases drawn uniformly from
    /// `[-scale, scale]`.
    pub fn random(sizes: &[usize], scale: f64, seed: u64) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::InvalidModel("need at least input and output sizes".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.random_range(-scale..=scale)).collect() };
        let last = sizes.len() - 2;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(k, w)| {
                let weight = Matrix::from_vec(w[1], w[0], draw(w[0] * w[1]))?;
                let act = if k == last { Activation::Linear } else { Activation::ReLU };
                Layer::new(weight, draw(w[1]), act)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].output_dim()
    }

    /// Number of ReLU neurons.
    pub fn num_relu_neurons(&self) -> usize {
        self.layers.iter().filter(|l| l.activation == Activation::ReLU).map(|l| l.output_dim()).sum()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch { context: "network input", expected: self.input_dim(), found: x.len() });
        }
        let mut h = x.to_vec();
        for layer in &self.layers {
            h = layer.forward(&h);
        }
        Ok(h)
    }
}
