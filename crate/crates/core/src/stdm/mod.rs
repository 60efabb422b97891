//! Source-target domain mismatch (STDM) between two same-language corpora.
//!
//! Both corpora are segmented into documents, weighted with TF-IDF over their
//! concatenation and projected onto a truncated-SVD topic space. `s_{A,B}` is
//! the mean dot product between the topic rows of A and of B, and
//!
//! ```text
//! STDM = (s_12 + s_21) / (s_11 + s_22)
//! ```
//!
//! which is close to 0 for unrelated corpora and 1 for identical ones.
//!
//! Because `Σ_i Σ_j u_i·v_j = (Σ_i u_i)·(Σ_j v_j)`, each mean is computed from
//! the row means in `O(r)` after one pass over the rows.

mod svd;
mod tfidf;

pub use svd::{truncated_svd, TopicMatrix, EXACT_LIMIT};
pub use tfidf::{build_tfidf, smoothed_idf, TfidfMatrix};

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::corpus::{segment_documents, Corpus, DocumentSet, SegmentPolicy};
use crate::error::{Error, Result};

pub const DEFAULT_RANK: usize = 100;

/// How two topic rows are compared inside `s_{A,B}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowSimilarity {
    /// Plain dot product of the topic rows.
    #[default]
    Dot,
    /// Cosine of the topic rows; for sensitivity analysis only.
    Cosine,
}

impl fmt::Display for RowSimilarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowSimilarity::Dot => "dot",
            RowSimilarity::Cosine => "cosine",
        })
    }
}

impl FromStr for RowSimilarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(RowSimilarity::Dot),
            "cosine" => Ok(RowSimilarity::Cosine),
            _ => Err(Error::InvalidParam(format!("unknown row similarity {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StdmReport {
    pub s11: f64,
    pub s12: f64,
    pub s21: f64,
    pub s22: f64,
    pub stdm: f64,
    pub rank: usize,
    pub segmentation: String,
    pub similarity: RowSimilarity,
    pub n_docs_a: usize,
    pub n_docs_b: usize,
}

impl StdmReport {
    pub fn summary(&self) -> String {
        format!(
            "STDM={:.4} (s11={:.4} s12={:.4} s21={:.4} s22={:.4}; rank {}, {} docs vs {} docs, {}, {})",
            self.stdm,
            self.s11,
            self.s12,
            self.s21,
            self.s22,
            self.rank,
            self.n_docs_a,
            self.n_docs_b,
            self.segmentation,
            self.similarity
        )
    }
}

fn row_mean(rows: ArrayView2<'_, f64>, sim: RowSimilarity) -> Array1<f64> {
    match sim {
        RowSimilarity::Dot => rows.mean_axis(Axis(0)).expect("non-empty"),
        RowSimilarity::Cosine => {
            let mut sum = Array1::zeros(rows.ncols());
            for r in rows.rows() {
                let n = r.dot(&r).sqrt();
                if n > 0.0 {
                    sum.scaled_add(1.0 / n, &r);
                }
            }
            sum / rows.nrows() as f64
        }
    }
}

/// Mean pairwise similarity between the rows of `ua` and `ub`.
pub fn cross_similarity(ua: ArrayView2<'_, f64>, ub: ArrayView2<'_, f64>) -> f64 {
    cross_similarity_with(ua, ub, RowSimilarity::Dot)
}

pub fn cross_similarity_with(ua: ArrayView2<'_, f64>, ub: ArrayView2<'_, f64>, sim: RowSimilarity) -> f64 {
    row_mean(ua, sim).dot(&row_mean(ub, sim))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StdmOptions {
    pub rank: usize,
    pub similarity: RowSimilarity,
}

impl Default for StdmOptions {
    fn default() -> Self {
        StdmOptions {
            rank: DEFAULT_RANK,
            similarity: RowSimilarity::Dot,
        }
    }
}

/// STDM of two document sets. The rank is clamped to `min(n + m, |V|)`.
pub fn stdm_score(a: &DocumentSet, b: &DocumentSet, opts: StdmOptions) -> Result<StdmReport> {
    let tfidf = build_tfidf(a, b)?;
    let rank = opts.rank.min(tfidf.rows()).min(tfidf.cols());
    let topics = truncated_svd(&tfidf, rank)?;
    let mean_a = row_mean(topics.first(), opts.similarity);
    let mean_b = row_mean(topics.second(), opts.similarity);
    let s11 = mean_a.dot(&mean_a);
    let s12 = mean_a.dot(&mean_b);
    let s21 = mean_b.dot(&mean_a);
    let s22 = mean_b.dot(&mean_b);
    Ok(StdmReport {
        s11,
        s12,
        s21,
        s22,
        stdm: (s12 + s21) / (s11 + s22),
        rank,
        segmentation: String::new(),
        similarity: opts.similarity,
        n_docs_a: a.n(),
        n_docs_b: b.n(),
    })
}

/// Segments both corpora with `policy` and scores them.
pub fn stdm_corpora(a: &Corpus, b: &Corpus, policy: SegmentPolicy, opts: StdmOptions) -> Result<StdmReport> {
    let da = segment_documents(a, policy)?;
    let db = segment_documents(b, policy)?;
    let mut report = stdm_score(&da, &db, opts)?;
    report.segmentation = policy.to_string();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn single_row_self_similarity() {
        let u = array![[0.3, -1.2, 2.0]];
        let expected = 0.09 + 1.44 + 4.0;
        assert!((cross_similarity(u.view(), u.view()) - expected).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_row_sets() {
        let a = array![[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]];
        let b = array![[0.0, 1.0, 0.0], [0.0, 0.0, 3.0]];
        assert_eq!(cross_similarity(a.view(), b.view()), 0.0);
    }

    #[test]
    fn two_by_two_hand_instance() {
        let a = array![[1.0, 2.0], [3.0, -1.0]];
        let b = array![[0.5, 0.5], [-2.0, 1.0]];
        // pairwise dots: 1.5, 0.0, 1.0, -7.0 -> mean -1.125
        assert!((cross_similarity(a.view(), b.view()) + 1.125).abs() < 1e-12);
    }

    #[test]
    fn identical_sets_score_one() {
        let d = DocumentSet::from_token_lists(&[vec!["a", "b", "b"], vec!["c", "a"], vec!["d"]]);
        let r = stdm_score(&d, &d, StdmOptions::default()).unwrap();
        assert!((r.stdm - 1.0).abs() < 1e-9);
        assert!((r.s12 - r.s21).abs() < 1e-12);
    }

    #[test]
    fn disjoint_sets_score_zero_at_full_rank() {
        let a = DocumentSet::from_token_lists(&[vec!["a", "b"], vec!["b", "c"]]);
        let b = DocumentSet::from_token_lists(&[vec!["x", "y"], vec!["z"]]);
        let r = stdm_score(&a, &b, StdmOptions::default()).unwrap();
        assert!(r.stdm.abs() <= 0.05, "{}", r.stdm);
    }

    #[test]
    fn cosine_variant_is_opt_in() {
        let a = DocumentSet::from_token_lists(&[vec!["a", "b"], vec!["b", "c", "c"]]);
        let b = DocumentSet::from_token_lists(&[vec!["a", "c"], vec!["d"]]);
        let dot = stdm_score(&a, &b, StdmOptions::default()).unwrap();
        let cos = stdm_score(
            &a,
            &b,
            StdmOptions {
                similarity: RowSimilarity::Cosine,
                ..StdmOptions::default()
            },
        )
        .unwrap();
        assert_eq!(dot.similarity, RowSimilarity::Dot);
        assert_eq!(cos.similarity, RowSimilarity::Cosine);
        assert!(cos.stdm.is_finite());
    }
}
