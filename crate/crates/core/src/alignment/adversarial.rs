//! Adversarial mapping: a discriminator learns to tell mapped source vectors
//! from target vectors while the linear map is trained to fool it.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::mapping::{MappingMethod, MappingModel, TrainingMeta};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::retrieval::{check_unit_rows, csls_criterion, DEFAULT_CSLS_K};

const LEAKY_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdversarialParams {
    pub epochs: usize,
    pub seed: u64,
    pub refinement_iters: usize,
    pub disc_hidden: usize,
    /// Dropout applied to discriminator inputs while training it.
    pub disc_dropout: f64,
    pub disc_steps: usize,
    pub disc_lr: f64,
    pub smoothing: f64,
    pub map_beta: f64,
    pub map_lr: f64,
    pub lr_decay: f64,
    pub lr_shrink: f64,
    pub min_lr: f64,
    pub batch_size: usize,
    /// Samples drawn per epoch; one iteration consumes `batch_size` of them.
    pub epoch_size: usize,
    /// Only this many most frequent words of each side feed the discriminator.
    pub most_frequent: usize,
    /// Source words scored by the per-epoch selection criterion.
    pub criterion_words: usize,
    pub csls_k: usize,
    /// Rows per side considered when inducing dictionaries during refinement.
    pub refine_max_rank: usize,
}

impl Default for AdversarialParams {
    fn default() -> Self {
        Self::desk()
    }
}

impl AdversarialParams {
    pub fn full() -> Self {
        AdversarialParams {
            epochs: 5,
            seed: 123,
            refinement_iters: 5,
            disc_hidden: 2048,
            disc_dropout: 0.1,
            disc_steps: 5,
            disc_lr: 0.1,
            smoothing: 0.2,
            map_beta: 0.001,
            map_lr: 0.1,
            lr_decay: 0.98,
            lr_shrink: 0.5,
            min_lr: 1e-6,
            batch_size: 32,
            epoch_size: 1_000_000,
            most_frequent: 75_000,
            criterion_words: 10_000,
            csls_k: DEFAULT_CSLS_K,
            refine_max_rank: 10_000,
        }
    }

    /// Reduced sizes for small vocabularies on a single CPU core.
    pub fn desk() -> Self {
        AdversarialParams {
            disc_hidden: 256,
            epoch_size: 32_000,
            most_frequent: usize::MAX,
            criterion_words: 2000,
            refine_max_rank: 2000,
            ..Self::full()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParam(m.to_string()));
        if self.epochs < 1 || self.refinement_iters < 1 {
            return bad("epochs and refinement_iters must be at least 1");
        }
        if self.disc_hidden < 1 || self.batch_size < 1 || self.most_frequent < 1 {
            return bad("disc_hidden, batch_size and most_frequent must be at least 1");
        }
        if self.criterion_words < 1 || self.csls_k < 1 || self.refine_max_rank < 1 {
            return bad("criterion_words, csls_k and refine_max_rank must be at least 1");
        }
        if !(0.0..0.5).contains(&self.smoothing) {
            return bad("smoothing must lie in [0, 0.5)");
        }
        if !(self.map_beta > 0.0) {
            return bad("map_beta must be positive");
        }
        if !(0.0..1.0).contains(&self.disc_dropout) {
            return bad("disc_dropout must lie in [0, 1)");
        }
        if !(self.map_lr > 0.0 && self.disc_lr > 0.0) {
            return bad("learning rates must be positive");
        }
        Ok(())
    }

    pub fn iterations_per_epoch(&self) -> usize {
        self.epoch_size / self.batch_size
    }
}

/// `W ← (1+β)·W − β·(W·Wᵀ)·W`; an orthogonal `W` is a fixed point.
pub fn orthogonalize(w: &Array2<f64>, beta: f64) -> Array2<f64> {
    let wwt_w = w.dot(&w.t()).dot(w);
    w * (1.0 + beta) - &(wwt_w * beta)
}

fn leaky(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        LEAKY_SLOPE * x
    }
}

fn leaky_grad(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        LEAKY_SLOPE
    }
}

/// `log σ(z)` without overflow.
fn log_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        -(-z).exp().ln_1p()
    } else {
        z - z.exp().ln_1p()
    }
}

/// Two hidden leaky-ReLU layers and a sigmoid output unit.
#[derive(Debug, Clone)]
pub struct Discriminator {
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
    pub w3: Array2<f64>,
    pub b3: Array1<f64>,
}

/// Parameter gradients plus the gradient with respect to the inputs.
pub struct DiscGrads {
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
    pub w3: Array2<f64>,
    pub b3: Array1<f64>,
    pub input: Array2<f64>,
}

impl Discriminator {
    pub fn new<R: Rng>(dim: usize, hidden: usize, rng: &mut R) -> Self {
        let mut layer = |fan_in: usize, fan_out: usize| {
            let b = 1.0 / (fan_in as f64).sqrt();
            let w = Array2::from_shape_simple_fn((fan_in, fan_out), || rng.random_range(-b..b));
            let bias = Array1::from_shape_simple_fn(fan_out, || rng.random_range(-b..b));
            (w, bias)
        };
        let (w1, b1) = layer(dim, hidden);
        let (w2, b2) = layer(hidden, hidden);
        let (w3, b3) = layer(hidden, 1);
        Discriminator {
            w1,
            b1,
            w2,
            b2,
            w3,
            b3,
        }
    }

    /// Mean binary cross-entropy of the "is mapped source" logit against
    /// `labels`, with gradients. `input_scale` multiplies the inputs
    /// element-wise (dropout mask), `None` meaning no dropout.
    pub fn loss_and_grads(
        &self,
        input: ArrayView2<'_, f64>,
        labels: &[f64],
        input_scale: Option<&Array2<f64>>,
    ) -> (f64, DiscGrads) {
        let n = input.nrows() as f64;
        let x = match input_scale {
            Some(m) => &input * m,
            None => input.to_owned(),
        };
        let z1 = x.dot(&self.w1) + &self.b1;
        let a1 = z1.mapv(leaky);
        let z2 = a1.dot(&self.w2) + &self.b2;
        let a2 = z2.mapv(leaky);
        let z3 = a2.dot(&self.w3) + &self.b3;

        let mut loss = 0.0;
        let mut dz3 = Array2::zeros(z3.raw_dim());
        for (i, &y) in labels.iter().enumerate() {
            let z = z3[[i, 0]];
            loss -= y * log_sigmoid(z) + (1.0 - y) * log_sigmoid(-z);
            let p = 1.0 / (1.0 + (-z).exp());
            dz3[[i, 0]] = (p - y) / n;
        }
        loss /= n;

        let w3 = a2.t().dot(&dz3);
        let b3 = dz3.sum_axis(Axis(0));
        let dz2 = dz3.dot(&self.w3.t()) * &z2.mapv(leaky_grad);
        let w2 = a1.t().dot(&dz2);
        let b2 = dz2.sum_axis(Axis(0));
        let dz1 = dz2.dot(&self.w2.t()) * &z1.mapv(leaky_grad);
        let w1 = x.t().dot(&dz1);
        let b1 = dz1.sum_axis(Axis(0));
        let mut dx = dz1.dot(&self.w1.t());
        if let Some(m) = input_scale {
            dx *= m;
        }
        (
            loss,
            DiscGrads {
                w1,
                b1,
                w2,
                b2,
                w3,
                b3,
                input: dx,
            },
        )
    }

    pub fn sgd_step(&mut self, g: &DiscGrads, lr: f64) {
        self.w1.scaled_add(-lr, &g.w1);
        self.b1.scaled_add(-lr, &g.b1);
        self.w2.scaled_add(-lr, &g.w2);
        self.b2.scaled_add(-lr, &g.b2);
        self.w3.scaled_add(-lr, &g.w3);
        self.b3.scaled_add(-lr, &g.b3);
    }
}

/// Criterion value and selected mapping after one epoch.
#[derive(Debug, Clone)]
pub struct EpochSnapshot {
    pub epoch: usize,
    pub criterion: f64,
    /// Best mapping (by criterion) seen up to and including this epoch.
    pub best: MappingModel,
}

/// Full record of one adversarial run.
#[derive(Debug, Clone)]
pub struct AdversarialRun {
    pub snapshots: Vec<EpochSnapshot>,
}

impl AdversarialRun {
    pub fn final_model(&self) -> &MappingModel {
        &self.snapshots.last().expect("at least one epoch").best
    }

    /// The model that a run of only `epochs` epochs would have returned.
    pub fn after_epochs(&self, epochs: usize) -> Option<&MappingModel> {
        self.snapshots.get(epochs.checked_sub(1)?).map(|s| &s.best)
    }
}

struct Sampler {
    n_src: usize,
    n_tgt: usize,
}

impl Sampler {
    fn batch(&self, rng: &mut ChaCha8Rng, bs: usize) -> (Vec<usize>, Vec<usize>) {
        let src = (0..bs).map(|_| rng.random_range(0..self.n_src)).collect();
        let tgt = (0..bs).map(|_| rng.random_range(0..self.n_tgt)).collect();
        (src, tgt)
    }
}

fn stack(src: &Array2<f64>, tgt: &Array2<f64>) -> Array2<f64> {
    ndarray::concatenate(Axis(0), &[src.view(), tgt.view()]).expect("same width")
}

/// Runs adversarial training and keeps a per-epoch record.
///
/// The mapping starts at the identity. After each epoch the unsupervised CSLS
/// criterion is evaluated; the best mapping so far is retained, the mapping
/// learning rate decays, and it is shrunk when the criterion falls below the
/// best value.
pub fn adversarial_run(x: &EmbeddingMatrix, y: &EmbeddingMatrix, p: &AdversarialParams) -> Result<AdversarialRun> {
    p.validate()?;
    if x.dim() != y.dim() {
        return Err(Error::Dimension(format!("{} vs {}", x.dim(), y.dim())));
    }
    check_unit_rows(x.rows.view())?;
    check_unit_rows(y.rows.view())?;

    let dim = x.dim();
    let bs = p.batch_size;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut disc = Discriminator::new(dim, p.disc_hidden, &mut rng);
    let mut w = Array2::<f64>::eye(dim);
    let sampler = Sampler {
        n_src: x.len().min(p.most_frequent),
        n_tgt: y.len().min(p.most_frequent),
    };
    let n_eval = p.criterion_words.min(x.len());
    let k = p.csls_k.min(x.len()).min(y.len());
    let keep = 1.0 - p.disc_dropout;

    let disc_labels: Vec<f64> = (0..2 * bs)
        .map(|i| if i < bs { 1.0 - p.smoothing } else { p.smoothing })
        .collect();
    let map_labels: Vec<f64> = disc_labels.iter().map(|y| 1.0 - y).collect();

    let model = |w: &Array2<f64>, epochs: usize| MappingModel {
        w: w.clone(),
        method: MappingMethod::Adversarial,
        meta: TrainingMeta {
            seed: Some(p.seed),
            epochs,
            refinement_iters: 0,
        },
    };

    let mut map_lr = p.map_lr;
    let mut best: Option<(f64, MappingModel)> = None;
    let mut snapshots = Vec::with_capacity(p.epochs);
    let mut step = 0;
    for epoch in 1..=p.epochs {
        for _ in 0..p.iterations_per_epoch() {
            for _ in 0..p.disc_steps {
                let (si, ti) = sampler.batch(&mut rng, bs);
                let src = x.rows.select(Axis(0), &si).dot(&w.t());
                let tgt = y.rows.select(Axis(0), &ti);
                let input = stack(&src, &tgt);
                let mask = (p.disc_dropout > 0.0).then(|| {
                    input.mapv(|_| if rng.random::<f64>() < keep { 1.0 / keep } else { 0.0 })
                });
                let (loss, grads) = disc.loss_and_grads(input.view(), &disc_labels, mask.as_ref());
                if !loss.is_finite() {
                    return Err(Error::Diverged {
                        step,
                        last_finite: Box::new(w),
                    });
                }
                disc.sgd_step(&grads, p.disc_lr);
            }

            let (si, ti) = sampler.batch(&mut rng, bs);
            let xs = x.rows.select(Axis(0), &si);
            let src = xs.dot(&w.t());
            let tgt = y.rows.select(Axis(0), &ti);
            let input = stack(&src, &tgt);
            let (loss, grads) = disc.loss_and_grads(input.view(), &map_labels, None);
            let g_src = grads.input.slice(s![..bs, ..]);
            let grad_w = g_src.t().dot(&xs);
            let next = orthogonalize(&(&w - &(grad_w * map_lr)), p.map_beta);
            if !loss.is_finite() || next.iter().any(|v| !v.is_finite()) {
                return Err(Error::Diverged {
                    step,
                    last_finite: Box::new(w),
                });
            }
            w = next;
            step += 1;
        }

        let current = model(&w, epoch);
        let criterion = csls_criterion(&current, x, y, n_eval, k)?;
        log::debug!("adversarial seed={} epoch={epoch} criterion={criterion:.5} lr={map_lr:.4}", p.seed);
        map_lr = (map_lr * p.lr_decay).max(p.min_lr);
        match &best {
            Some((b, _)) if criterion <= *b => {
                if criterion < *b {
                    map_lr = (map_lr * p.lr_shrink).max(p.min_lr);
                }
            }
            _ => best = Some((criterion, current)),
        }
        let (_, best_model) = best.as_ref().expect("set above");
        let mut snapshot_model = best_model.clone();
        snapshot_model.meta.epochs = epoch;
        snapshots.push(EpochSnapshot {
            epoch,
            criterion,
            best: snapshot_model,
        });
    }
    Ok(AdversarialRun { snapshots })
}

/// Trains a mapping adversarially and returns the best-criterion mapping.
pub fn adversarial_train(x: &EmbeddingMatrix, y: &EmbeddingMatrix, p: &AdversarialParams) -> Result<MappingModel> {
    Ok(adversarial_run(x, y, p)?.final_model().clone())
}
