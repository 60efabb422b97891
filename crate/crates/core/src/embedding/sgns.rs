//! Skip-gram with negative sampling.
//!
//! Workers share the parameter matrices without locks. Each parameter is an
//! `AtomicU64` holding the bits of an `f64` and is accessed with relaxed
//! ordering, so concurrent updates may interleave and overwrite each other.
//! With a single worker the run is a pure function of its inputs.

use std::sync::atomic::{AtomicU64, Ordering};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::EmbeddingMatrix;
use super::vocab::Vocabulary;
use crate::corpus::Corpus;
use crate::error::{Error, Result};

const MAX_EXP: f64 = 8.0;
const MIN_LR_FRACTION: f64 = 1e-4;

/// Character n-gram settings. A word vector is the mean of the word row and
/// its hashed n-gram rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubwordParams {
    pub minn: usize,
    pub maxn: usize,
    pub buckets: usize,
}

impl Default for SubwordParams {
    fn default() -> Self {
        SubwordParams {
            minn: 3,
            maxn: 6,
            buckets: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SgnsParams {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub lr: f64,
    pub min_count: u64,
    pub subsample_t: f64,
    pub subword: Option<SubwordParams>,
    pub seed: u64,
    pub workers: usize,
}

impl Default for SgnsParams {
    fn default() -> Self {
        Self::desk()
    }
}

impl SgnsParams {
    /// Small-corpus settings: 50 dimensions, every token kept.
    pub fn desk() -> Self {
        SgnsParams {
            dim: 50,
            window: 5,
            negatives: 5,
            epochs: 5,
            lr: 0.025,
            min_count: 1,
            subsample_t: 1e-4,
            subword: None,
            seed: 1,
            workers: 1,
        }
    }

    pub fn full() -> Self {
        SgnsParams {
            dim: 300,
            min_count: 5,
            ..Self::desk()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParam(m.to_string()));
        if self.dim < 2 {
            return bad("dim must be at least 2");
        }
        if self.window < 1 {
            return bad("window must be at least 1");
        }
        if self.negatives < 1 {
            return bad("negatives must be at least 1");
        }
        if self.epochs < 1 {
            return bad("epochs must be at least 1");
        }
        if !(self.lr > 0.0) {
            return bad("lr must be positive");
        }
        if self.workers < 1 {
            return bad("workers must be at least 1");
        }
        if let Some(sw) = self.subword {
            if sw.minn < 1 || sw.maxn < sw.minn || sw.buckets < 1 {
                return bad("subword needs 1 <= minn <= maxn and buckets >= 1");
            }
        }
        Ok(())
    }
}

/// 32-bit FNV-1a over the UTF-8 bytes of `s`.
pub fn fnv1a32(s: &str) -> u32 {
    let mut h: u32 = 0x811c_9dc5;
    for b in s.bytes() {
        h ^= u32::from(b);
        h = h.wrapping_mul(0x0100_0193);
    }
    h
}

/// Bucket ids of the character n-grams of `<word>` with lengths in `minn..=maxn`.
pub fn subword_buckets(word: &str, sw: &SubwordParams) -> Vec<usize> {
    let chars: Vec<char> = format!("<{word}>").chars().collect();
    let mut ids = Vec::new();
    for n in sw.minn..=sw.maxn {
        if n > chars.len() {
            break;
        }
        for start in 0..=chars.len() - n {
            let gram: String = chars[start..start + n].iter().collect();
            ids.push(fnv1a32(&gram) as usize % sw.buckets);
        }
    }
    ids
}

/// Draws token ids proportionally to `count^0.75`.
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    cdf: Vec<f64>,
}

impl NegativeSampler {
    pub fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        for v in &mut cdf {
            *v /= acc;
        }
        NegativeSampler { cdf }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

struct SharedMatrix {
    cols: usize,
    data: Vec<AtomicU64>,
}

impl SharedMatrix {
    fn from_fn(rows: usize, cols: usize, mut f: impl FnMut() -> f64) -> Self {
        SharedMatrix {
            cols,
            data: (0..rows * cols).map(|_| AtomicU64::new(f().to_bits())).collect(),
        }
    }

    #[inline]
    fn get(&self, row: usize, col: usize) -> f64 {
        f64::from_bits(self.data[row * self.cols + col].load(Ordering::Relaxed))
    }

    #[inline]
    fn add(&self, row: usize, col: usize, delta: f64) {
        let cell = &self.data[row * self.cols + col];
        let v = f64::from_bits(cell.load(Ordering::Relaxed)) + delta;
        cell.store(v.to_bits(), Ordering::Relaxed);
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x > MAX_EXP {
        1.0
    } else if x < -MAX_EXP {
        0.0
    } else {
        1.0 / (1.0 + (-x).exp())
    }
}

struct Trainer<'a> {
    params: &'a SgnsParams,
    input: SharedMatrix,
    output: SharedMatrix,
    /// Input rows making up each word: its own row followed by n-gram rows.
    components: Vec<Vec<usize>>,
    keep_prob: Vec<f64>,
    sampler: NegativeSampler,
    processed: AtomicU64,
    total_work: u64,
}

impl Trainer<'_> {
    fn lr(&self) -> f64 {
        let done = self.processed.load(Ordering::Relaxed) as f64 / self.total_work as f64;
        self.params.lr * (1.0 - done).max(MIN_LR_FRACTION)
    }

    fn run_shard(&self, lines: &[Vec<usize>], seed: u64) {
        let p = self.params;
        let dim = p.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hidden = vec![0.0; dim];
        let mut grad = vec![0.0; dim];
        let mut kept = Vec::new();
        for _ in 0..p.epochs {
            for line in lines {
                kept.clear();
                kept.extend(line.iter().copied().filter(|&w| {
                    let keep = self.keep_prob[w];
                    keep >= 1.0 || rng.random::<f64>() < keep
                }));
                let lr = self.lr();
                for (pos, &center) in kept.iter().enumerate() {
                    let comps = &self.components[center];
                    let scale = 1.0 / comps.len() as f64;
                    for (d, h) in hidden.iter_mut().enumerate() {
                        *h = comps.iter().map(|&r| self.input.get(r, d)).sum::<f64>() * scale;
                    }
                    let reach = rng.random_range(1..=p.window);
                    let lo = pos.saturating_sub(reach);
                    let hi = (pos + reach).min(kept.len() - 1);
                    for ctx_pos in lo..=hi {
                        if ctx_pos == pos {
                            continue;
                        }
                        let context = kept[ctx_pos];
                        grad.iter_mut().for_each(|g| *g = 0.0);
                        self.update(&hidden, &mut grad, context, 1.0, lr);
                        for _ in 0..p.negatives {
                            let neg = loop {
                                let n = self.sampler.sample(&mut rng);
                                if n != context || self.sampler.cdf.len() == 1 {
                                    break n;
                                }
                            };
                            self.update(&hidden, &mut grad, neg, 0.0, lr);
                        }
                        for &r in comps {
                            for (d, g) in grad.iter().enumerate() {
                                self.input.add(r, d, *g);
                            }
                        }
                    }
                }
                self.processed.fetch_add(line.len() as u64, Ordering::Relaxed);
            }
        }
    }

    #[inline]
    fn update(&self, hidden: &[f64], grad: &mut [f64], target: usize, label: f64, lr: f64) {
        let score: f64 = hidden
            .iter()
            .enumerate()
            .map(|(d, h)| h * self.output.get(target, d))
            .sum();
        let g = (label - sigmoid(score)) * lr;
        for (d, h) in hidden.iter().enumerate() {
            grad[d] += g * self.output.get(target, d);
            self.output.add(target, d, g * h);
        }
    }
}

/// Trains input-side word vectors for every token of `v`.
pub fn train_sgns(c: &Corpus, v: &Vocabulary, p: &SgnsParams) -> Result<EmbeddingMatrix> {
    p.validate()?;
    let lines: Vec<Vec<usize>> = c
        .lines
        .iter()
        .map(|l| l.iter().filter_map(|t| v.id(t)).collect::<Vec<_>>())
        .filter(|l| !l.is_empty())
        .collect();
    let n_tokens: u64 = lines.iter().map(|l| l.len() as u64).sum();
    if n_tokens == 0 {
        return Err(Error::NoTrainableToken);
    }

    let n_words = v.len();
    let dim = p.dim;
    let components: Vec<Vec<usize>> = (0..n_words)
        .map(|w| {
            let mut comps = vec![w];
            if let Some(sw) = &p.subword {
                comps.extend(subword_buckets(v.token(w), sw).into_iter().map(|b| n_words + b));
            }
            comps
        })
        .collect();
    let n_input = n_words + p.subword.map_or(0, |sw| sw.buckets);

    let mut counts = vec![0u64; n_words];
    for &w in lines.iter().flatten() {
        counts[w] += 1;
    }
    let keep_prob = counts
        .iter()
        .map(|&n| {
            if p.subsample_t <= 0.0 || n == 0 {
                return 1.0;
            }
            let f = n as f64 / n_tokens as f64;
            let r = p.subsample_t / f;
            r.sqrt() + r
        })
        .collect();
    // Words absent from this corpus still get a (tiny) chance as negatives.
    let sampler_counts: Vec<u64> = counts.iter().map(|&n| n.max(1)).collect();

    let mut init_rng = ChaCha8Rng::seed_from_u64(p.seed);
    let bound = 0.5 / dim as f64;
    let trainer = Trainer {
        params: p,
        input: SharedMatrix::from_fn(n_input, dim, || init_rng.random_range(-bound..bound)),
        output: SharedMatrix::from_fn(n_words, dim, || 0.0),
        components,
        keep_prob,
        sampler: NegativeSampler::new(&sampler_counts),
        processed: AtomicU64::new(0),
        total_work: n_tokens * p.epochs as u64,
    };

    let workers = p.workers.min(lines.len());
    if workers <= 1 {
        trainer.run_shard(&lines, p.seed.wrapping_add(1));
    } else {
        let shard = lines.len().div_ceil(workers);
        std::thread::scope(|s| {
            for (i, chunk) in lines.chunks(shard).enumerate() {
                let trainer = &trainer;
                let seed = p.seed.wrapping_add(1 + i as u64);
                s.spawn(move || trainer.run_shard(chunk, seed));
            }
        });
    }

    let mut rows = Array2::zeros((n_words, dim));
    for (w, comps) in trainer.components.iter().enumerate() {
        let scale = 1.0 / comps.len() as f64;
        for d in 0..dim {
            rows[[w, d]] = comps.iter().map(|&r| trainer.input.get(r, d)).sum::<f64>() * scale;
        }
    }
    EmbeddingMatrix::new(v.clone(), rows)
}
