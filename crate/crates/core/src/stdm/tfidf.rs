use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2};

use crate::corpus::DocumentSet;
use crate::error::{Error, Result};

/// Row-normalized TF-IDF weights of `n + m` documents in CSR layout.
/// The first `n` rows come from corpus A, the remaining `m` from corpus B.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfMatrix {
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<f64>,
    pub n: usize,
    pub m: usize,
    pub vocab: Vec<String>,
}

impl TfidfMatrix {
    pub fn rows(&self) -> usize {
        self.n + self.m
    }

    pub fn cols(&self) -> usize {
        self.vocab.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.data[span].iter().copied())
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.rows(), self.cols()));
        for i in 0..self.rows() {
            for (j, v) in self.row(i) {
                out[[i, j]] = v;
            }
        }
        out
    }

    /// `M · B` for a dense `cols x k` matrix.
    pub fn mul_dense(&self, b: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut out = Array2::zeros((self.rows(), b.ncols()));
        for i in 0..self.rows() {
            let mut row = out.row_mut(i);
            for (j, v) in self.row(i) {
                row.scaled_add(v, &b.row(j));
            }
        }
        out
    }

    /// `Mᵀ · B` for a dense `rows x k` matrix.
    pub fn t_mul_dense(&self, b: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut out = Array2::zeros((self.cols(), b.ncols()));
        for i in 0..self.rows() {
            let src = b.row(i);
            for (j, v) in self.row(i) {
                out.row_mut(j).scaled_add(v, &src);
            }
        }
        out
    }
}

/// Smoothed inverse document frequency `ln((1 + N) / (1 + df)) + 1`.
pub fn smoothed_idf(n_docs: usize, df: usize) -> f64 {
    ((1.0 + n_docs as f64) / (1.0 + df as f64)).ln() + 1.0
}

/// Raw term counts times smoothed idf over the concatenation of `a` and `b`,
/// each row scaled to unit length. Terms are indexed in sorted order.
pub fn build_tfidf(a: &DocumentSet, b: &DocumentSet) -> Result<TfidfMatrix> {
    if a.docs.is_empty() || b.docs.is_empty() {
        return Err(Error::InvalidParam("both document sets must be non-empty".into()));
    }
    let docs: Vec<_> = a.docs.iter().chain(&b.docs).collect();
    if let Some(i) = docs.iter().position(|d| d.values().all(|&c| c == 0)) {
        return Err(Error::EmptyDocument(i));
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for d in &docs {
        for (t, &c) in d.iter() {
            if c > 0 {
                *df.entry(t.as_str()).or_insert(0) += 1;
            }
        }
    }
    let column: BTreeMap<&str, usize> = df.keys().enumerate().map(|(i, t)| (*t, i)).collect();
    let idf: Vec<f64> = df.values().map(|&f| smoothed_idf(docs.len(), f)).collect();

    let mut indptr = vec![0];
    let mut indices = Vec::new();
    let mut data = Vec::new();
    for d in &docs {
        let start = data.len();
        for (t, &c) in d.iter().filter(|(_, &c)| c > 0) {
            let j = column[t.as_str()];
            indices.push(j);
            data.push(c as f64 * idf[j]);
        }
        let norm = data[start..].iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut data[start..] {
            *v /= norm;
        }
        indptr.push(data.len());
    }
    Ok(TfidfMatrix {
        indptr,
        indices,
        data,
        n: a.n(),
        m: b.n(),
        vocab: df.keys().map(|t| t.to_string()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(docs: &[&[&str]]) -> DocumentSet {
        let lists: Vec<Vec<&str>> = docs.iter().map(|d| d.to_vec()).collect();
        DocumentSet::from_token_lists(&lists)
    }

    #[test]
    fn disjoint_documents_are_orthogonal() {
        let m = build_tfidf(&set(&[&["a", "b"]]), &set(&[&["c"]])).unwrap().to_dense();
        assert_eq!(m.row(0).dot(&m.row(1)), 0.0);
    }

    #[test]
    fn identical_documents_identical_rows() {
        let m = build_tfidf(&set(&[&["a"]]), &set(&[&["a"]])).unwrap().to_dense();
        assert_eq!(m.row(0), m.row(1));
    }

    #[test]
    fn hand_computed_three_documents() {
        // A = {"x x y"}, B = {"y z", "z"}; N = 3, vocab [x, y, z]
        // df: x=1, y=2, z=2
        let m = build_tfidf(&set(&[&["x", "x", "y"]]), &set(&[&["y", "z"], &["z"]])).unwrap();
        assert_eq!(m.vocab, ["x", "y", "z"]);
        let idf_x = (4.0f64 / 2.0).ln() + 1.0;
        let idf_yz = (4.0f64 / 3.0).ln() + 1.0;
        let r0 = [2.0 * idf_x, idf_yz, 0.0];
        let n0 = (r0[0] * r0[0] + r0[1] * r0[1]).sqrt();
        let d = m.to_dense();
        assert!((d[[0, 0]] - r0[0] / n0).abs() < 1e-12);
        assert!((d[[0, 1]] - r0[1] / n0).abs() < 1e-12);
        assert_eq!(d[[0, 2]], 0.0);
        let s = 1.0 / 2f64.sqrt();
        assert!((d[[1, 1]] - s).abs() < 1e-12);
        assert!((d[[1, 2]] - s).abs() < 1e-12);
        assert!((d[[2, 2]] - 1.0).abs() < 1e-12);
        assert_eq!((m.n, m.m), (1, 2));
    }

    #[test]
    fn empty_document_is_named() {
        let mut b = set(&[&["a"], &["b"]]);
        b.docs[1].clear();
        assert!(matches!(build_tfidf(&set(&[&["a"]]), &b), Err(Error::EmptyDocument(2))));
    }

    #[test]
    fn sparse_products_match_dense() {
        let m = build_tfidf(&set(&[&["a", "b", "b"], &["c"]]), &set(&[&["a", "c", "d"]])).unwrap();
        let dense = m.to_dense();
        let b = Array2::from_shape_fn((4, 2), |(i, j)| (i * 2 + j) as f64 - 3.0);
        let c = Array2::from_shape_fn((3, 2), |(i, j)| (i + j) as f64 * 0.5);
        let diff = (&m.mul_dense(b.view()) - &dense.dot(&b)).mapv(f64::abs).sum();
        assert!(diff < 1e-12);
        let diff = (&m.t_mul_dense(c.view()) - &dense.t().dot(&c)).mapv(f64::abs).sum();
        assert!(diff < 1e-12);
    }
}
