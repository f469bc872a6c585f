//! Restricted Boltzmann machine layers and contrastive-divergence training.
//!
//! Real-valued inputs in [0,1] are treated as Bernoulli means: probabilities
//! are used as values everywhere except the hidden states driving the Gibbs
//! step, which are sampled binary.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{sigmoid, DbnError, DbnHyperparams};

/// Standard deviation of the Gaussian weight initialization.
pub const WEIGHT_INIT_STD: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbmLayer {
    /// visible × hidden weight matrix.
    pub weights: Array2<f64>,
    pub visible_bias: Array1<f64>,
    pub hidden_bias: Array1<f64>,
}

impl RbmLayer {
    pub fn zeros(n_visible: usize, n_hidden: usize) -> Self {
        RbmLayer {
            weights: Array2::zeros((n_visible, n_hidden)),
            visible_bias: Array1::zeros(n_visible),
            hidden_bias: Array1::zeros(n_hidden),
        }
    }

    pub fn random_init<R: Rng>(n_visible: usize, n_hidden: usize, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, WEIGHT_INIT_STD).expect("valid normal");
        RbmLayer {
            weights: Array2::from_shape_fn((n_visible, n_hidden), |_| normal.sample(rng)),
            visible_bias: Array1::zeros(n_visible),
            hidden_bias: Array1::zeros(n_hidden),
        }
    }

    pub fn n_visible(&self) -> usize {
        self.weights.nrows()
    }

    pub fn n_hidden(&self) -> usize {
        self.weights.ncols()
    }

    /// p(h=1|v) = σ(vW + b_h), row per batch sample.
    pub fn hidden_probabilities(&self, visible: ArrayView2<f64>) -> Array2<f64> {
        (visible.dot(&self.weights) + &self.hidden_bias).mapv(sigmoid)
    }

    /// p(v=1|h) = σ(hWᵀ + b_v).
    pub fn visible_probabilities(&self, hidden: ArrayView2<f64>) -> Array2<f64> {
        (hidden.dot(&self.weights.t()) + &self.visible_bias).mapv(sigmoid)
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|x| x.is_finite())
            && self.visible_bias.iter().all(|x| x.is_finite())
            && self.hidden_bias.iter().all(|x| x.is_finite())
    }
}

/// A weight/bias-shaped increment: gradients and momentum velocities.
#[derive(Debug, Clone)]
pub struct RbmDelta {
    pub weights: Array2<f64>,
    pub visible_bias: Array1<f64>,
    pub hidden_bias: Array1<f64>,
}

impl RbmDelta {
    pub fn zeros_like(layer: &RbmLayer) -> Self {
        RbmDelta {
            weights: Array2::zeros(layer.weights.raw_dim()),
            visible_bias: Array1::zeros(layer.visible_bias.raw_dim()),
            hidden_bias: Array1::zeros(layer.hidden_bias.raw_dim()),
        }
    }
}

fn bernoulli_sample<R: Rng>(probs: &Array2<f64>, rng: &mut R) -> Array2<f64> {
    probs.mapv(|p| if rng.random::<f64>() < p { 1.0 } else { 0.0 })
}

fn check_batch(layer: &RbmLayer, batch: ArrayView2<f64>) -> Result<(), DbnError> {
    if batch.nrows() == 0 || batch.ncols() != layer.n_visible() {
        return Err(DbnError::ShapeMismatch {
            expected: format!("non-empty batch of width {}", layer.n_visible()),
            got: format!("{}×{}", batch.nrows(), batch.ncols()),
        });
    }
    Ok(())
}

/// CD-k estimate of the log-likelihood gradient, averaged over the batch:
/// ⟨v⁺h⁺⟩ − ⟨v⁻h⁻⟩ for the weights and the matching bias differences.
/// Weight decay is not included here.
pub fn cd_gradient<R: Rng>(
    layer: &RbmLayer,
    batch: ArrayView2<f64>,
    cd_k: usize,
    rng: &mut R,
) -> Result<RbmDelta, DbnError> {
    check_batch(layer, batch)?;
    let n = batch.nrows() as f64;

    let ph0 = layer.hidden_probabilities(batch);
    let mut h_state = bernoulli_sample(&ph0, rng);
    let mut pv = layer.visible_probabilities(h_state.view());
    let mut ph = layer.hidden_probabilities(pv.view());
    for _ in 1..cd_k {
        h_state = bernoulli_sample(&ph, rng);
        pv = layer.visible_probabilities(h_state.view());
        ph = layer.hidden_probabilities(pv.view());
    }

    let positive = batch.t().dot(&ph0);
    let negative = pv.t().dot(&ph);
    Ok(RbmDelta {
        weights: (positive - negative) / n,
        visible_bias: (batch.sum_axis(Axis(0)) - pv.sum_axis(Axis(0))) / n,
        hidden_bias: (ph0.sum_axis(Axis(0)) - ph.sum_axis(Axis(0))) / n,
    })
}

/// One momentum CD-k step: velocity ← ν·velocity + ε·(gradient − ω·W),
/// weights += velocity.
pub fn rbm_cd_update<R: Rng>(
    layer: &mut RbmLayer,
    batch: ArrayView2<f64>,
    hp: &DbnHyperparams,
    momentum: f64,
    velocity: &mut RbmDelta,
    rng: &mut R,
) -> Result<(), DbnError> {
    let mut grad = cd_gradient(layer, batch, hp.cd_k, rng)?;
    grad.weights -= &(hp.weight_cost * &layer.weights);

    velocity.weights = momentum * &velocity.weights + hp.learning_rate * &grad.weights;
    velocity.visible_bias =
        momentum * &velocity.visible_bias + hp.learning_rate * &grad.visible_bias;
    velocity.hidden_bias = momentum * &velocity.hidden_bias + hp.learning_rate * &grad.hidden_bias;

    layer.weights += &velocity.weights;
    layer.visible_bias += &velocity.visible_bias;
    layer.hidden_bias += &velocity.hidden_bias;

    if !layer.is_finite() {
        return Err(DbnError::Divergence);
    }
    Ok(())
}

/// Mean squared single-step reconstruction error using probabilities
/// throughout (deterministic).
pub fn reconstruction_error(layer: &RbmLayer, data: ArrayView2<f64>) -> f64 {
    let ph = layer.hidden_probabilities(data);
    let pv = layer.visible_probabilities(ph.view());
    let diff = &data.to_owned() - &pv;
    diff.mapv(|x| x * x).sum() / data.len() as f64
}

/// Greedy layer-wise pretraining: layer 1 on the raw features, layer 2 on
/// layer 1's hidden probabilities. Both layers are initialized from the
/// seeded RNG before any training, so `pretrain_epochs = 0` returns the raw
/// initialization.
pub fn pretrain(features: ArrayView2<f64>, hp: &DbnHyperparams) -> Result<[RbmLayer; 2], DbnError> {
    hp.validate()?;
    if features.nrows() == 0 || features.ncols() == 0 {
        return Err(DbnError::ShapeMismatch {
            expected: "non-empty feature matrix".into(),
            got: format!("{}×{}", features.nrows(), features.ncols()),
        });
    }
    if let Some(bad) = features.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(DbnError::InputOutOfRange(*bad));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(hp.rng_seed);
    let mut layer1 = RbmLayer::random_init(features.ncols(), hp.n1, &mut rng);
    let mut layer2 = RbmLayer::random_init(hp.n1, hp.n2, &mut rng);

    train_layer(&mut layer1, features, hp, &mut rng)?;
    let hidden = layer1.hidden_probabilities(features);
    train_layer(&mut layer2, hidden.view(), hp, &mut rng)?;
    Ok([layer1, layer2])
}

fn train_layer<R: Rng>(
    layer: &mut RbmLayer,
    data: ArrayView2<f64>,
    hp: &DbnHyperparams,
    rng: &mut R,
) -> Result<(), DbnError> {
    let mut velocity = RbmDelta::zeros_like(layer);
    let mut indices: Vec<usize> = (0..data.nrows()).collect();
    for epoch in 0..hp.pretrain_epochs {
        let momentum = if epoch < hp.momentum_switch_epoch {
            hp.momentum_start
        } else {
            hp.momentum_end
        };
        indices.shuffle(rng);
        for chunk in indices.chunks(hp.batch_size) {
            let batch = data.select(Axis(0), chunk);
            rbm_cd_update(layer, batch.view(), hp, momentum, &mut velocity, rng)?;
        }
    }
    Ok(())
}
