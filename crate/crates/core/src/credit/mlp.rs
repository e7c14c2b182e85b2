//! A single-hidden-layer perceptron with sigmoid units, trained on binary
//! cross-entropy with Adam.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::Label;

const MIN_RECORDS: usize = 100;
const FD_STEP: f64 = 1e-5;
/// Denominator floor for relative gradient error, so that gradients that
/// are numerically zero compare on an absolute scale.
const FD_FLOOR: f64 = 1e-6;

/// Input scaling fitted on the training rows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// Zero mean, unit variance.
    #[default]
    Standard,
    /// Observed range mapped to [0, 1].
    MinMax,
    /// Raw values.
    Identity,
}

/// How the validation rows are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    /// The last fraction of the rows, in input order.
    #[default]
    Tail,
    /// A seeded random fraction.
    Shuffled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainSpec {
    pub hidden: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub validation_split: f64,
    pub split: SplitMode,
    pub scaling: Scaling,
    pub seed: u64,
}

impl Default for TrainSpec {
    fn default() -> Self {
        Self {
            hidden: 23,
            learning_rate: 0.1,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            epochs: 100,
            batch_size: 32,
            validation_split: 0.25,
            split: SplitMode::Tail,
            scaling: Scaling::Standard,
            seed: 0,
        }
    }
}

impl TrainSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if !(self.validation_split > 0.0 && self.validation_split < 1.0) {
            return bad("validation_split must lie in (0, 1)");
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if self.batch_size == 0 || self.hidden == 0 {
            return bad("batch_size and hidden must be positive");
        }
        if self.learning_rate.is_nan()
            || self.learning_rate <= 0.0
            || !(0.0..1.0).contains(&self.beta1)
            || !(0.0..1.0).contains(&self.beta2)
        {
            return bad("invalid optimizer hyperparameters");
        }
        Ok(())
    }
}

/// Per-column affine map `(x - mean) / scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit_with<'a>(scaling: Scaling, rows: impl IntoIterator<Item = &'a [f64]>) -> Self {
        match scaling {
            Scaling::Standard => Self::fit(rows),
            Scaling::MinMax => {
                let rows: Vec<&[f64]> = rows.into_iter().collect();
                let d = rows.first().map_or(0, |r| r.len());
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for r in &rows {
                    for (k, &v) in r.iter().enumerate() {
                        lo[k] = lo[k].min(v);
                        hi[k] = hi[k].max(v);
                    }
                }
                let scale = lo
                    .iter()
                    .zip(&hi)
                    .map(|(l, h)| if h > l { h - l } else { 1.0 })
                    .collect();
                Self { mean: lo, scale }
            }
            Scaling::Identity => {
                let d = rows.into_iter().next().map_or(0, |r| r.len());
                Self {
                    mean: vec![0.0; d],
                    scale: vec![1.0; d],
                }
            }
        }
    }

    /// Zero mean and unit variance on `rows`; constant columns get scale 1.
    pub fn fit<'a>(rows: impl IntoIterator<Item = &'a [f64]>) -> Self {
        let rows: Vec<&[f64]> = rows.into_iter().collect();
        let d = rows.first().map_or(0, |r| r.len());
        let n = rows.len().max(1) as f64;
        let mut mean = vec![0.0; d];
        for r in &rows {
            for (m, v) in mean.iter_mut().zip(r.iter()) {
                *m += v / n;
            }
        }
        let mut scale = vec![0.0; d];
        for r in &rows {
            for ((s, v), m) in scale.iter_mut().zip(r.iter()).zip(&mean) {
                *s += (v - m).powi(2) / n;
            }
        }
        for s in &mut scale {
            *s = if *s > 0.0 { s.sqrt() } else { 1.0 };
        }
        Self { mean, scale }
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `-log p(y | z)` for a sigmoid output with logit `z`.
fn bce_from_logit(z: f64, y: f64) -> f64 {
    z.max(0.0) - y * z + (-z.abs()).exp().ln_1p()
}

/// Parameters live in one flat vector: hidden weights (row per hidden
/// unit), hidden biases, output weights, output bias.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    inputs: usize,
    hidden: usize,
    params: Vec<f64>,
}

impl Mlp {
    pub fn zeros(inputs: usize, hidden: usize) -> Self {
        Self {
            inputs,
            hidden,
            params: vec![0.0; hidden * inputs + 2 * hidden + 1],
        }
    }

    /// Glorot-uniform weights, zero biases.
    pub fn glorot<R: Rng + ?Sized>(inputs: usize, hidden: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(inputs, hidden);
        let l1 = (6.0 / (inputs + hidden) as f64).sqrt();
        let l2 = (6.0 / (hidden + 1) as f64).sqrt();
        let (w1, w2) = (m.w1_range(), m.w2_range());
        for p in &mut m.params[w1] {
            *p = rng.random_range(-l1..l1);
        }
        for p in &mut m.params[w2] {
            *p = rng.random_range(-l2..l2);
        }
        m
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn w1_range(&self) -> std::ops::Range<usize> {
        0..self.hidden * self.inputs
    }

    fn b1_offset(&self) -> usize {
        self.hidden * self.inputs
    }

    fn w2_range(&self) -> std::ops::Range<usize> {
        let start = self.b1_offset() + self.hidden;
        start..start + self.hidden
    }

    fn b2_index(&self) -> usize {
        self.params.len() - 1
    }

    /// Output-layer logit; fills `h` with hidden activations.
    fn forward(&self, x: &[f64], h: &mut [f64]) -> f64 {
        let p = &self.params;
        let b1 = self.b1_offset();
        let w2 = self.w2_range().start;
        let mut z = p[self.b2_index()];
        for j in 0..self.hidden {
            let row = &p[j * self.inputs..(j + 1) * self.inputs];
            let a: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + p[b1 + j];
            h[j] = sigmoid(a);
            z += p[w2 + j] * h[j];
        }
        z
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        let mut h = vec![0.0; self.hidden];
        self.forward(x, &mut h)
    }

    /// Kept strictly inside (0, 1) even when the logit saturates.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x)).clamp(f64::EPSILON, 1.0 - f64::EPSILON)
    }

    pub fn classify(&self, x: &[f64]) -> Label {
        Label::from_bool(self.logit(x) > 0.0)
    }

    /// Mean cross-entropy over `(x, y)` pairs.
    pub fn loss(&self, xs: &[Vec<f64>], ys: &[f64]) -> f64 {
        let mut h = vec![0.0; self.hidden];
        let total: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, &y)| bce_from_logit(self.forward(x, &mut h), y))
            .sum();
        total / xs.len().max(1) as f64
    }

    /// Mean loss over the rows `idx` of `xs`, with its gradient written to
    /// `grad`.
    fn loss_and_grad_into(&self, xs: &[Vec<f64>], ys: &[f64], idx: &[usize], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut h = vec![0.0; self.hidden];
        let inv = 1.0 / idx.len().max(1) as f64;
        let b1 = self.b1_offset();
        let w2 = self.w2_range().start;
        let b2 = self.b2_index();
        let mut total = 0.0;
        for &i in idx {
            let x = &xs[i];
            let z = self.forward(x, &mut h);
            total += bce_from_logit(z, ys[i]);
            let dz = (sigmoid(z) - ys[i]) * inv;
            grad[b2] += dz;
            for j in 0..self.hidden {
                grad[w2 + j] += dz * h[j];
                let da = dz * self.params[w2 + j] * h[j] * (1.0 - h[j]);
                grad[b1 + j] += da;
                let row = &mut grad[j * self.inputs..(j + 1) * self.inputs];
                for (g, v) in row.iter_mut().zip(x) {
                    *g += da * v;
                }
            }
        }
        total * inv
    }

    pub fn loss_and_grad(&self, xs: &[Vec<f64>], ys: &[f64]) -> (f64, Vec<f64>) {
        let idx: Vec<usize> = (0..xs.len()).collect();
        let mut grad = vec![0.0; self.params.len()];
        let loss = self.loss_and_grad_into(xs, ys, &idx, &mut grad);
        (loss, grad)
    }
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

    fn step(&mut self, params: &mut [f64], grad: &[f64], spec: &TrainSpec) {
        self.t += 1;
        let c1 = 1.0 - spec.beta1.powi(self.t);
        let c2 = 1.0 - spec.beta2.powi(self.t);
        for (((p, g), m), v) in params.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = spec.beta1 * *m + (1.0 - spec.beta1) * g;
            *v = spec.beta2 * *v + (1.0 - spec.beta2) * g * g;
            *p -= spec.learning_rate * (*m / c1) / ((*v / c2).sqrt() + spec.epsilon);
        }
    }
}

/// A trained network together with the input scaling it expects.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub standardizer: Standardizer,
    pub mlp: Mlp,
}

impl MlpModel {
    pub fn predict_proba(&self, raw: &[f64]) -> f64 {
        self.mlp.predict_proba(&self.standardizer.transform(raw))
    }

    pub fn classify(&self, raw: &[f64]) -> Label {
        self.mlp.classify(&self.standardizer.transform(raw))
    }

    pub fn accuracy(&self, xs: &[Vec<f64>], ys: &[Label]) -> f64 {
        let hits = xs.iter().zip(ys).filter(|(x, y)| self.classify(x) == **y).count();
        hits as f64 / xs.len().max(1) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_accuracy: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: MlpModel,
    /// Accuracy on the validation rows after the last epoch.
    pub val_accuracy: f64,
    pub history: Vec<EpochMetrics>,
    pub train_rows: Vec<usize>,
    pub val_rows: Vec<usize>,
}

fn split_rows(n: usize, spec: &TrainSpec) -> (Vec<usize>, Vec<usize>) {
    let mut rows: Vec<usize> = (0..n).collect();
    if spec.split == SplitMode::Shuffled {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(1);
        rows.shuffle(&mut rng);
    }
    let cut = ((n as f64 * (1.0 - spec.validation_split)) as usize).clamp(1, n - 1);
    let val = rows.split_off(cut);
    (rows, val)
}

/// Trains on raw features. Training is deterministic for a fixed spec and
/// input order.
pub fn train_mlp(xs: &[Vec<f64>], ys: &[Label], spec: &TrainSpec) -> Result<TrainOutcome> {
    spec.validate()?;
    if xs.len() != ys.len() {
        return Err(Error::Dataset(format!("{} inputs but {} labels", xs.len(), ys.len())));
    }
    if xs.len() < MIN_RECORDS {
        return Err(Error::Dataset(format!(
            "need at least {MIN_RECORDS} records, got {}",
            xs.len()
        )));
    }
    let d = xs[0].len();
    if d == 0 || xs.iter().any(|x| x.len() != d || x.iter().any(|v| !v.is_finite())) {
        return Err(Error::Dataset(
            "inputs must be non-empty, finite and of equal width".into(),
        ));
    }
    let (train_rows, val_rows) = split_rows(xs.len(), spec);
    let standardizer = Standardizer::fit_with(spec.scaling, train_rows.iter().map(|&i| xs[i].as_slice()));
    let zs: Vec<Vec<f64>> = xs.iter().map(|x| standardizer.transform(x)).collect();
    let targets: Vec<f64> = ys.iter().map(|y| f64::from(y.as_u8())).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut mlp = Mlp::glorot(d, spec.hidden, &mut rng);
    let mut adam = Adam::new(mlp.params.len());
    let mut grad = vec![0.0; mlp.params.len()];
    let mut order = train_rows.clone();
    let mut history = Vec::with_capacity(spec.epochs);
    for epoch in 1..=spec.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for batch in order.chunks(spec.batch_size) {
            let loss = mlp.loss_and_grad_into(&zs, &targets, batch, &mut grad);
            loss_sum += loss * batch.len() as f64;
            adam.step(&mut mlp.params, &grad, spec);
        }
        let hits = val_rows.iter().filter(|&&i| mlp.classify(&zs[i]) == ys[i]).count();
        history.push(EpochMetrics {
            epoch,
            train_loss: loss_sum / order.len() as f64,
            val_accuracy: hits as f64 / val_rows.len() as f64,
        });
    }
    let val_accuracy = history.last().map_or(0.0, |m| m.val_accuracy);
    Ok(TrainOutcome {
        model: MlpModel { standardizer, mlp },
        val_accuracy,
        history,
        train_rows,
        val_rows,
    })
}

/// Largest relative disagreement between analytic and central-difference
/// gradients of the mean loss over `(xs, ys)`, across all parameters.
pub fn gradient_check(mlp: &Mlp, xs: &[Vec<f64>], ys: &[Label]) -> f64 {
    let targets: Vec<f64> = ys.iter().map(|y| f64::from(y.as_u8())).collect();
    let (_, analytic) = mlp.loss_and_grad(xs, &targets);
    let mut probe = mlp.clone();
    let mut worst: f64 = 0.0;
    for (k, &a) in analytic.iter().enumerate() {
        let orig = probe.params[k];
        probe.params[k] = orig + FD_STEP;
        let up = probe.loss(xs, &targets);
        probe.params[k] = orig - FD_STEP;
        let down = probe.loss(xs, &targets);
        probe.params[k] = orig;
        let numeric = (up - down) / (2.0 * FD_STEP);
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(FD_FLOOR);
        worst = worst.max(rel);
    }
    worst
}
