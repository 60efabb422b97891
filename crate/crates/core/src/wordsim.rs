//! Cross-lingual word-similarity evaluation: cosine predictions scored by the
//! harmonic mean of Pearson and Spearman correlations with gold judgements.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::alignment::MappingModel;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityPair {
    pub word_a: String,
    pub lang_a: String,
    pub word_b: String,
    pub lang_b: String,
    pub gold: f64,
}

/// Gold judgements on a 0–4 scale in steps of 0.5.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimilarityDataset {
    pub pairs: Vec<SimilarityPair>,
}

fn valid_gold(score: f64) -> bool {
    (0.0..=4.0).contains(&score) && (score * 2.0).fract() == 0.0
}

impl SimilarityDataset {
    pub fn new(pairs: Vec<SimilarityPair>) -> Result<Self> {
        if let Some(p) = pairs.iter().find(|p| !valid_gold(p.gold)) {
            return Err(Error::InvalidParam(format!(
                "gold score {} for ({}, {}) is not in {{0, 0.5, ..., 4}}",
                p.gold, p.word_a, p.word_b
            )));
        }
        Ok(SimilarityDataset { pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Parses `word_a<TAB>word_b<TAB>score` rows.
pub fn parse_dataset(text: &str, lang_a: &str, lang_b: &str) -> Result<SimilarityDataset> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let bad = |msg: String| Error::Format { line: i + 1, msg };
        if fields.len() != 3 {
            return Err(bad(format!("expected 3 tab-separated fields, found {}", fields.len())));
        }
        let gold: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| bad(format!("score {:?} is not a number", fields[2])))?;
        if !valid_gold(gold) {
            return Err(bad(format!("score {gold} is not in {{0, 0.5, ..., 4}}")));
        }
        pairs.push(SimilarityPair {
            word_a: fields[0].trim().to_lowercase(),
            lang_a: lang_a.to_string(),
            word_b: fields[1].trim().to_lowercase(),
            lang_b: lang_b.to_string(),
            gold,
        });
    }
    Ok(SimilarityDataset { pairs })
}

pub fn load_dataset(path: impl AsRef<Path>, lang_a: &str, lang_b: &str) -> Result<SimilarityDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text, lang_a, lang_b)
}

/// Cosine prediction for each pair; `None` when either word is missing.
///
/// With a mapping, `word_a` vectors are mapped into the space of `emb_b`
/// first. Without one the two matrices must describe the same joint space.
pub fn predict_pairs(
    emb_a: &EmbeddingMatrix,
    emb_b: &EmbeddingMatrix,
    mapping: Option<&MappingModel>,
    ds: &SimilarityDataset,
) -> Result<Vec<Option<f64>>> {
    if emb_a.dim() != emb_b.dim() {
        return Err(Error::Dimension(format!("{} vs {}", emb_a.dim(), emb_b.dim())));
    }
    if let Some(m) = mapping {
        if m.dim() != emb_a.dim() {
            return Err(Error::Dimension(format!("mapping {} vs embeddings {}", m.dim(), emb_a.dim())));
        }
    }
    let preds: Vec<Option<f64>> = ds
        .pairs
        .iter()
        .map(|p| {
            let a = emb_a.vector(&p.word_a)?;
            let b = emb_b.vector(&p.word_b)?;
            let a = match mapping {
                Some(m) => m.w.dot(&a),
                None => a.to_owned(),
            };
            let denom = a.dot(&a).sqrt() * b.dot(&b).sqrt();
            Some(if denom > 0.0 { a.dot(&b) / denom } else { 0.0 })
        })
        .collect();
    if !ds.is_empty() && preds.iter().all(Option::is_none) {
        return Err(Error::AllOov);
    }
    Ok(preds)
}

/// Correlations of predictions with gold; `None` fields mark an undefined value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    pub harmonic: Option<f64>,
    pub n: usize,
    pub oov: usize,
}

/// Pearson correlation; `None` with fewer than two points or zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson(&average_ranks(x), &average_ranks(y))
}

pub fn harmonic_mean(p: f64, s: f64) -> Option<f64> {
    (p + s > 0.0).then(|| 2.0 * p * s / (p + s))
}

/// Correlates the non-OOV predictions with their gold scores.
pub fn score(predictions: &[Option<f64>], ds: &SimilarityDataset) -> Result<SimReport> {
    if predictions.len() != ds.len() {
        return Err(Error::Dimension(format!(
            "{} predictions for {} pairs",
            predictions.len(),
            ds.len()
        )));
    }
    let (pred, gold): (Vec<f64>, Vec<f64>) = predictions
        .iter()
        .zip(&ds.pairs)
        .filter_map(|(p, pair)| p.map(|v| (v, pair.gold)))
        .unzip();
    let pr = pearson(&pred, &gold);
    let sp = spearman(&pred, &gold);
    Ok(SimReport {
        pearson: pr,
        spearman: sp,
        harmonic: pr.zip(sp).and_then(|(p, s)| harmonic_mean(p, s)),
        n: pred.len(),
        oov: ds.len() - pred.len(),
    })
}
