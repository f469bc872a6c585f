//! Feed-forward view of the stacked RBMs plus sigmoid output node:
//! packing/unpacking of the flat parameter vector, the regularized MSE
//! objective with its backpropagation gradient, and L-BFGS fine-tuning.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::lbfgs::{minimize, LbfgsOptions};
use super::rbm::{RbmLayer, WEIGHT_INIT_STD};
use super::{sigmoid, DbnError, DbnHyperparams};

/// Stream offset separating fine-tune initialization from pretraining draws.
const FINE_TUNE_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

/// Gradient-norm stopping threshold for fine-tuning.
pub const FINE_TUNE_GRAD_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetDims {
    pub input: usize,
    pub hidden1: usize,
    pub hidden2: usize,
}

impl NetDims {
    pub fn n_params(&self) -> usize {
        self.input * self.hidden1
            + self.hidden1
            + self.hidden1 * self.hidden2
            + self.hidden2
            + self.hidden2
            + 1
    }
}

/// Flattens [W1, b1, W2, b2, w_out, b_out] into one parameter vector.
pub fn pack_params(layers: &[RbmLayer; 2], output_weights: &Array1<f64>, output_bias: f64) -> Vec<f64> {
    let mut theta = Vec::new();
    theta.extend(layers[0].weights.iter());
    theta.extend(layers[0].hidden_bias.iter());
    theta.extend(layers[1].weights.iter());
    theta.extend(layers[1].hidden_bias.iter());
    theta.extend(output_weights.iter());
    theta.push(output_bias);
    theta
}

type Unpacked = (Array2<f64>, Array1<f64>, Array2<f64>, Array1<f64>, Array1<f64>, f64);

fn unpack(theta: &[f64], dims: &NetDims) -> Unpacked {
    let (input, h1, h2) = (dims.input, dims.hidden1, dims.hidden2);
    let mut at = 0usize;
    let mut take = |n: usize| {
        let slice = &theta[at..at + n];
        at += n;
        slice.to_vec()
    };
    let w1 = Array2::from_shape_vec((input, h1), take(input * h1)).expect("w1 shape");
    let b1 = Array1::from_vec(take(h1));
    let w2 = Array2::from_shape_vec((h1, h2), take(h1 * h2)).expect("w2 shape");
    let b2 = Array1::from_vec(take(h2));
    let w3 = Array1::from_vec(take(h2));
    let b3 = theta[at];
    (w1, b1, w2, b2, w3, b3)
}

/// Forward pass over a batch; returns predictions in (0,1).
pub fn predict_batch(theta: &[f64], dims: &NetDims, x: ArrayView2<f64>) -> Array1<f64> {
    let (w1, b1, w2, b2, w3, b3) = unpack(theta, dims);
    let h1 = (x.dot(&w1) + &b1).mapv(sigmoid);
    let h2 = (h1.dot(&w2) + &b2).mapv(sigmoid);
    (h2.dot(&w3) + b3).mapv(sigmoid)
}

/// Objective MSE + (ω/2)·‖weights‖² (biases unpenalized) and its analytic
/// gradient in the packed layout.
pub fn objective_and_gradient(
    theta: &[f64],
    dims: &NetDims,
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    weight_cost: f64,
) -> (f64, Vec<f64>) {
    let n = x.nrows() as f64;
    let (w1, b1, w2, b2, w3, b3) = unpack(theta, dims);

    let h1 = (x.dot(&w1) + &b1).mapv(sigmoid);
    let h2 = (h1.dot(&w2) + &b2).mapv(sigmoid);
    let p = (h2.dot(&w3) + b3).mapv(sigmoid);

    let residual = &p - &y;
    let mse = residual.mapv(|r| r * r).sum() / n;
    let penalty = 0.5
        * weight_cost
        * (w1.mapv(|v| v * v).sum() + w2.mapv(|v| v * v).sum() + w3.mapv(|v| v * v).sum());
    let value = mse + penalty;

    // Backpropagation through the three sigmoid stages.
    let dz3 = residual.mapv(|r| 2.0 * r / n) * &p.mapv(|v| v * (1.0 - v));
    let grad_w3 = h2.t().dot(&dz3) + &(weight_cost * &w3);
    let grad_b3 = dz3.sum();

    let dh2 = outer_rows(&dz3, &w3);
    let dz2 = dh2 * &h2.mapv(|v| v * (1.0 - v));
    let grad_w2 = h1.t().dot(&dz2) + &(weight_cost * &w2);
    let grad_b2 = dz2.sum_axis(Axis(0));

    let dh1 = dz2.dot(&w2.t());
    let dz1 = dh1 * &h1.mapv(|v| v * (1.0 - v));
    let grad_w1 = x.t().dot(&dz1) + &(weight_cost * &w1);
    let grad_b1 = dz1.sum_axis(Axis(0));

    let mut grad = Vec::with_capacity(dims.n_params());
    grad.extend(grad_w1.iter());
    grad.extend(grad_b1.iter());
    grad.extend(grad_w2.iter());
    grad.extend(grad_b2.iter());
    grad.extend(grad_w3.iter());
    grad.push(grad_b3);
    (value, grad)
}

/// Row-wise scalar × vector product: out[s, j] = dz[s] * w[j].
fn outer_rows(dz: &Array1<f64>, w: &Array1<f64>) -> Array2<f64> {
    let mut out = Array2::zeros((dz.len(), w.len()));
    for (s, &d) in dz.iter().enumerate() {
        for (j, &wj) in w.iter().enumerate() {
            out[[s, j]] = d * wj;
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct FineTuneOutcome {
    pub layers: [RbmLayer; 2],
    pub output_weights: Array1<f64>,
    pub output_bias: f64,
    pub iterations: usize,
    pub final_mse: f64,
    pub final_mae: f64,
    pub grad_norm: f64,
    pub line_search_warning: bool,
}

/// End-to-end supervised optimization of the full network (all weights and
/// hidden biases jointly) against labels in [0,1].
pub fn fine_tune(
    layers: &[RbmLayer; 2],
    features: ArrayView2<f64>,
    labels: ArrayView1<f64>,
    hp: &DbnHyperparams,
) -> Result<FineTuneOutcome, DbnError> {
    hp.validate()?;
    if features.nrows() != labels.len() || features.nrows() == 0 {
        return Err(DbnError::ShapeMismatch {
            expected: format!("{} labels", features.nrows()),
            got: format!("{}", labels.len()),
        });
    }
    if features.ncols() != layers[0].n_visible() || layers[0].n_hidden() != layers[1].n_visible() {
        return Err(DbnError::ShapeMismatch {
            expected: format!(
                "feature width {} and stacked layers",
                layers[0].n_visible()
            ),
            got: format!(
                "width {}, layer1 {}→{}, layer2 {}→{}",
                features.ncols(),
                layers[0].n_visible(),
                layers[0].n_hidden(),
                layers[1].n_visible(),
                layers[1].n_hidden()
            ),
        });
    }
    if let Some(bad) = labels.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(DbnError::InputOutOfRange(*bad));
    }

    let dims = NetDims {
        input: layers[0].n_visible(),
        hidden1: layers[0].n_hidden(),
        hidden2: layers[1].n_hidden(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(hp.rng_seed ^ FINE_TUNE_SEED_OFFSET);
    let normal = Normal::new(0.0, WEIGHT_INIT_STD).expect("valid normal");
    let output_weights = Array1::from_shape_fn(dims.hidden2, |_| normal.sample(&mut rng));
    let theta0 = pack_params(layers, &output_weights, 0.0);

    let opts = LbfgsOptions {
        max_iters: hp.finetune_max_iters,
        grad_tol: FINE_TUNE_GRAD_TOL,
        ..LbfgsOptions::default()
    };
    let outcome = minimize(
        |theta| objective_and_gradient(theta, &dims, features, labels, hp.weight_cost),
        theta0,
        &opts,
    );
    if outcome.position.iter().any(|v| !v.is_finite()) {
        return Err(DbnError::Divergence);
    }

    let (w1, b1, w2, b2, w3, b3) = unpack(&outcome.position, &dims);
    let tuned = [
        RbmLayer {
            weights: w1,
            visible_bias: layers[0].visible_bias.clone(),
            hidden_bias: b1,
        },
        RbmLayer {
            weights: w2,
            visible_bias: layers[1].visible_bias.clone(),
            hidden_bias: b2,
        },
    ];

    let predictions = predict_batch(&outcome.position, &dims, features);
    let residuals = &predictions - &labels;
    let final_mse = residuals.mapv(|r| r * r).sum() / labels.len() as f64;
    let final_mae = residuals.mapv(f64::abs).sum() / labels.len() as f64;

    Ok(FineTuneOutcome {
        layers: tuned,
        output_weights: w3,
        output_bias: b3,
        iterations: outcome.iterations,
        final_mse,
        final_mae,
        grad_norm: outcome.grad_norm,
        line_search_warning: outcome.line_search_failed,
    })
}
