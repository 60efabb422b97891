//! Cosine and CSLS scoring.
//!
//! Every similarity is `dot_seq` of two rows, so scores computed here are
//! reproducible by a plain double loop with the same accumulation order.

use std::cmp::Ordering;

use ndarray::ArrayView2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::dot_seq;

/// Tolerance for the unit-norm precondition of cosine retrieval.
pub const UNIT_TOLERANCE: f64 = 1e-6;

pub fn check_unit_rows(m: ArrayView2<'_, f64>) -> Result<()> {
    for row in m.rows() {
        let n = dot_seq(row.as_slice().expect("row-major"), row.as_slice().expect("row-major"));
        if (n.sqrt() - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NotNormalized);
        }
    }
    Ok(())
}

/// Similarities of one query to every key row.
pub fn similarities(query: &[f64], keys: ArrayView2<'_, f64>) -> Vec<f64> {
    keys.rows()
        .into_iter()
        .map(|k| dot_seq(query, k.as_slice().expect("standard layout")))
        .collect()
}

/// Mean of the `k` largest values, summed in descending order.
pub fn top_k_mean(values: &[f64], k: usize) -> f64 {
    let k = k.min(values.len());
    let mut top: Vec<f64> = Vec::with_capacity(k + 1);
    for &v in values {
        if top.len() < k || v > top[top.len() - 1] {
            let pos = top.partition_point(|&t| t >= v);
            top.insert(pos, v);
            top.truncate(k);
        }
    }
    top.iter().fold(0.0, |acc, v| acc + v) / k as f64
}

/// For every query row, the mean similarity to its `k` nearest key rows.
pub fn knn_mean_similarity(
    queries: ArrayView2<'_, f64>,
    keys: ArrayView2<'_, f64>,
    k: usize,
) -> Vec<f64> {
    let rows: Vec<usize> = (0..queries.nrows()).collect();
    rows.par_iter()
        .map(|&i| {
            let q = queries.row(i);
            top_k_mean(&similarities(q.as_slice().expect("standard layout"), keys), k)
        })
        .collect()
}

/// `2·cos − r_src − r_tgt`, evaluated left to right.
#[inline]
pub fn csls_value(cos: f64, r_src: f64, r_tgt: f64) -> f64 {
    2.0 * cos - r_src - r_tgt
}

/// CSLS scores of one mapped source vector against every target.
///
/// `mapped_sources` is the full set of mapped source vectors that defines the
/// target-side neighbourhoods.
pub fn csls_scores(
    x: &[f64],
    mapped_sources: ArrayView2<'_, f64>,
    targets: ArrayView2<'_, f64>,
    k: usize,
) -> Result<Vec<f64>> {
    if k == 0 || k > targets.nrows() || k > mapped_sources.nrows() {
        return Err(Error::InvalidParam(format!(
            "k={k} outside 1..={}",
            targets.nrows().min(mapped_sources.nrows())
        )));
    }
    let xn = dot_seq(x, x).sqrt();
    if (xn - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NotNormalized);
    }
    check_unit_rows(mapped_sources)?;
    check_unit_rows(targets)?;
    let r_tgt = knn_mean_similarity(targets, mapped_sources, k);
    let cos = similarities(x, targets);
    let r_x = top_k_mean(&cos, k);
    Ok(cos
        .iter()
        .zip(&r_tgt)
        .map(|(&c, &rt)| csls_value(c, r_x, rt))
        .collect())
}

/// Indices of the `n` best scores, ordered by descending score and then by
/// ascending index.
pub fn top_n_indices(scores: &[f64], n: usize) -> Vec<usize> {
    let cmp = |a: &usize, b: &usize| -> Ordering {
        scores[*b].total_cmp(&scores[*a]).then(a.cmp(b))
    };
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    let n = n.min(idx.len());
    if n == 0 {
        return Vec::new();
    }
    if n < idx.len() {
        idx.select_nth_unstable_by(n - 1, cmp);
        idx.truncate(n);
    }
    idx.sort_unstable_by(cmp);
    idx
}

/// Index of the maximum; the lowest index wins ties.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (j, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = j;
        }
    }
    best
}
