//! Small fully connected regression network trained with Adam.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{extract_features, Standardizer, FEATURE_VERSION};
use crate::error::{param, Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetConfig {
    pub hidden: usize,
    pub hidden_layers: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Learning-rate factor applied every `decay_every` epochs.
    pub gamma: f64,
    pub decay_every: usize,
    pub batch_size: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl NetConfig {
    /// Surrogate used for linear datasets.
    pub fn linear(seed: u64) -> Self {
        Self {
            hidden: 4,
            hidden_layers: 2,
            epochs: 4000,
            learning_rate: 0.01,
            gamma: 0.95,
            decay_every: 100,
            batch_size: 256,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed,
        }
    }

    /// Surrogate used for nonlinear datasets.
    pub fn nonlinear(seed: u64) -> Self {
        Self {
            hidden: 11,
            epochs: 8000,
            gamma: 0.975,
            ..Self::linear(seed)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.batch_size == 0 || self.decay_every == 0 {
            return Err(param("network sizes and schedule must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.gamma > 0.0 && self.epsilon > 0.0) {
            return Err(param("learning rate, gamma and epsilon must be positive"));
        }
        if !((0.0..1.0).contains(&self.beta1) && (0.0..1.0).contains(&self.beta2)) {
            return Err(param("Adam betas must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Dense layers with tanh on every hidden layer and a linear output.
/// Parameters are one flat vector: for each layer the row-major weights
/// `[out][in]` followed by the biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub sizes: Vec<usize>,
    pub params: Vec<f64>,
}

fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

impl Mlp {
    /// Weights uniform in `±1/√fan_in`, biases zero.
    pub fn new<R: Rng>(sizes: &[usize], rng: &mut R) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) || *sizes.last().unwrap() != 1 {
            return Err(param(format!("invalid layer sizes {sizes:?}")));
        }
        let mut params = Vec::with_capacity(param_count(sizes));
        for w in sizes.windows(2) {
            let bound = 1.0 / (w[0] as f64).sqrt();
            params.extend((0..w[0] * w[1]).map(|_| rng.random_range(-bound..=bound)));
            params.extend(std::iter::repeat_n(0.0, w[1]));
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            params,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        let mut act = x.to_vec();
        let mut next = Vec::new();
        let mut off = 0;
        let layers = self.sizes.len() - 1;
        for (l, w) in self.sizes.windows(2).enumerate() {
            let (fan_in, fan_out) = (w[0], w[1]);
            let weights = &self.params[off..off + fan_in * fan_out];
            let bias = &self.params[off + fan_in * fan_out..off + fan_in * fan_out + fan_out];
            next.clear();
            for o in 0..fan_out {
                let z = bias[o] + dot(&weights[o * fan_in..(o + 1) * fan_in], &act);
                next.push(if l + 1 < layers { z.tanh() } else { z });
            }
            std::mem::swap(&mut act, &mut next);
            off += fan_in * fan_out + fan_out;
        }
        act[0]
    }

    /// Mean squared error over `rows` (flat, `input_dim` per row) and its
    /// gradient, accumulated into `grad` (which is overwritten).
    pub fn loss_and_gradient(&self, rows: &[f64], targets: &[f64], grad: &mut [f64]) -> f64 {
        let dim = self.input_dim();
        let layers = self.sizes.len() - 1;
        let m = targets.len() as f64;
        grad.fill(0.0);
        let mut acts: Vec<Vec<f64>> = self.sizes.iter().map(|&s| vec![0.0; s]).collect();
        let mut deltas: Vec<Vec<f64>> = self.sizes.iter().map(|&s| vec![0.0; s]).collect();
        let offsets = self.offsets();
        let mut loss = 0.0;
        for (r, &y) in rows.chunks_exact(dim).zip(targets) {
            acts[0].copy_from_slice(r);
            for l in 0..layers {
                let (fan_in, fan_out) = (self.sizes[l], self.sizes[l + 1]);
                let off = offsets[l];
                let (head, tail) = acts.split_at_mut(l + 1);
                let input = &head[l];
                for o in 0..fan_out {
                    let z = self.params[off + fan_in * fan_out + o]
                        + dot(&self.params[off + o * fan_in..off + (o + 1) * fan_in], input);
                    tail[0][o] = if l + 1 < layers { z.tanh() } else { z };
                }
            }
            let err = acts[layers][0] - y;
            loss += err * err / m;
            deltas[layers][0] = 2.0 * err / m;
            for l in (0..layers).rev() {
                let (fan_in, fan_out) = (self.sizes[l], self.sizes[l + 1]);
                let off = offsets[l];
                let (dhead, dtail) = deltas.split_at_mut(l + 1);
                let delta_out = &dtail[0];
                let input = &acts[l];
                for o in 0..fan_out {
                    let d = delta_out[o];
                    grad[off + fan_in * fan_out + o] += d;
                    let gw = &mut grad[off + o * fan_in..off + (o + 1) * fan_in];
                    gw.iter_mut().zip(input).for_each(|(g, x)| *g += d * x);
                }
                if l > 0 {
                    let delta_in = &mut dhead[l];
                    delta_in.fill(0.0);
                    for o in 0..fan_out {
                        let d = delta_out[o];
                        let w = &self.params[off + o * fan_in..off + (o + 1) * fan_in];
                        delta_in.iter_mut().zip(w).for_each(|(di, wi)| *di += d * wi);
                    }
                    // tanh' = 1 - a²
                    delta_in
                        .iter_mut()
                        .zip(input)
                        .for_each(|(di, a)| *di *= 1.0 - a * a);
                }
            }
        }
        loss
    }

    pub fn mse(&self, rows: &[f64], targets: &[f64]) -> f64 {
        let dim = self.input_dim();
        rows.chunks_exact(dim)
            .zip(targets)
            .map(|(r, y)| (self.forward(r) - y).powi(2))
            .sum::<f64>()
            / targets.len() as f64
    }

    fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.sizes.len() - 1);
        let mut off = 0;
        for w in self.sizes.windows(2) {
            out.push(off);
            off += w[0] * w[1] + w[1];
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64, cfg: &NetConfig) {
        self.t += 1;
        let c1 = 1.0 - cfg.beta1.powi(self.t);
        let c2 = 1.0 - cfg.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = cfg.beta1 * self.m[i] + (1.0 - cfg.beta1) * grad[i];
            self.v[i] = cfg.beta2 * self.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
            params[i] -= lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + cfg.epsilon);
        }
    }
}

/// Result of a training run: the fitted network and its loss trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedMlp {
    pub mlp: Mlp,
    /// Mean mini-batch loss of each epoch.
    pub epoch_loss: Vec<f64>,
    /// Full-data MSE after the last epoch.
    pub final_loss: f64,
}

/// Trains an [`Mlp`] on already prepared rows (flat, `dim` per row).
pub fn train_mlp(rows: &[f64], targets: &[f64], dim: usize, cfg: &NetConfig) -> Result<TrainedMlp> {
    cfg.validate()?;
    if targets.is_empty() || rows.len() != targets.len() * dim {
        return Err(param("training rows do not match targets"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sizes = vec![dim];
    sizes.extend(std::iter::repeat_n(cfg.hidden, cfg.hidden_layers));
    sizes.push(1);
    let mut mlp = Mlp::new(&sizes, &mut rng)?;
    let mut adam = Adam::new(mlp.params.len());
    let mut grad = vec![0.0; mlp.params.len()];
    let mut order: Vec<usize> = (0..targets.len()).collect();
    let mut batch_rows = Vec::with_capacity(cfg.batch_size * dim);
    let mut batch_targets = Vec::with_capacity(cfg.batch_size);
    let mut epoch_loss = Vec::with_capacity(cfg.epochs);
    let mut lr = cfg.learning_rate;
    for epoch in 0..cfg.epochs {
        if epoch > 0 && epoch % cfg.decay_every == 0 {
            lr *= cfg.gamma;
        }
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            batch_rows.clear();
            batch_targets.clear();
            for &i in chunk {
                batch_rows.extend_from_slice(&rows[i * dim..(i + 1) * dim]);
                batch_targets.push(targets[i]);
            }
            let loss = mlp.loss_and_gradient(&batch_rows, &batch_targets, &mut grad);
            if !loss.is_finite() {
                return Err(Error::Training { epoch, loss });
            }
            total += loss * chunk.len() as f64;
            adam.step(&mut mlp.params, &grad, lr, cfg);
        }
        epoch_loss.push(total / targets.len() as f64);
    }
    let final_loss = mlp.mse(rows, targets);
    if !final_loss.is_finite() {
        return Err(Error::Training {
            epoch: cfg.epochs,
            loss: final_loss,
        });
    }
    Ok(TrainedMlp {
        mlp,
        epoch_loss,
        final_loss,
    })
}

/// Largest relative difference between the backpropagated gradient and
/// central finite differences with step `h`.
pub fn gradient_error(mlp: &Mlp, rows: &[f64], targets: &[f64], h: f64) -> f64 {
    let mut grad = vec![0.0; mlp.params.len()];
    mlp.loss_and_gradient(rows, targets, &mut grad);
    let mut probe = mlp.clone();
    let mut worst = 0.0f64;
    for i in 0..grad.len() {
        let p = probe.params[i];
        probe.params[i] = p + h;
        let up = probe.mse(rows, targets);
        probe.params[i] = p - h;
        let down = probe.mse(rows, targets);
        probe.params[i] = p;
        let numeric = (up - down) / (2.0 * h);
        let rel = (grad[i] - numeric).abs() / (grad[i].abs().max(numeric.abs()) + 1e-8);
        worst = worst.max(rel);
    }
    worst
}

/// Network plus the feature standardization it was trained with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateNet {
    pub feature_version: u32,
    pub n_v: usize,
    pub standardizer: Standardizer,
    pub mlp: Mlp,
    pub config: NetConfig,
    pub final_loss: f64,
    pub epoch_loss: Vec<f64>,
}

impl SurrogateNet {
    pub fn predict(&self, g: &Graph) -> Result<f64> {
        if g.n_v() != self.n_v {
            return Err(param(format!(
                "surrogate trained for {} vertices, got {}",
                self.n_v,
                g.n_v()
            )));
        }
        let mut x = extract_features(g)?;
        self.standardizer.apply(&mut x);
        Ok(self.mlp.forward(&x))
    }
}

/// Fits a surrogate of `J` on labeled graphs.
pub fn train_surrogate(graphs: &[&Graph], targets: &[f64], cfg: &NetConfig) -> Result<SurrogateNet> {
    let first = graphs.first().ok_or_else(|| param("no training samples"))?;
    if graphs.len() != targets.len() {
        return Err(param("graphs and targets differ in length"));
    }
    let n_v = first.n_v();
    let features = graphs
        .iter()
        .map(|g| {
            if g.n_v() != n_v {
                return Err(param("training graphs of different sizes"));
            }
            extract_features(g)
        })
        .collect::<Result<Vec<_>>>()?;
    let standardizer = Standardizer::fit(&features)?;
    let dim = standardizer.dim();
    let mut rows = Vec::with_capacity(features.len() * dim);
    for mut f in features {
        standardizer.apply(&mut f);
        rows.extend(f);
    }
    let trained = train_mlp(&rows, targets, dim, cfg)?;
    Ok(SurrogateNet {
        feature_version: FEATURE_VERSION,
        n_v,
        standardizer,
        mlp: trained.mlp,
        config: *cfg,
        final_loss: trained.final_loss,
        epoch_loss: trained.epoch_loss,
    })
}
