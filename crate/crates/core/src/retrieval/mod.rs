//! Word-translation retrieval, BLI accuracy, the copying baseline and the
//! unsupervised CSLS selection criterion.

mod csls;

pub use csls::{
    argmax, check_unit_rows, csls_scores, csls_value, knn_mean_similarity, similarities, top_k_mean,
    top_n_indices, UNIT_TOLERANCE,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ndarray::{s, Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::{Dictionary, MappingModel};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};

/// Neighbourhood size for CSLS.
pub const DEFAULT_CSLS_K: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RetrievalMethod {
    Nn,
    Csls { k: usize },
}

impl Default for RetrievalMethod {
    fn default() -> Self {
        RetrievalMethod::Csls { k: DEFAULT_CSLS_K }
    }
}

impl fmt::Display for RetrievalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RetrievalMethod::Nn => f.write_str("nn"),
            RetrievalMethod::Csls { k } => write!(f, "csls:{k}"),
        }
    }
}

impl FromStr for RetrievalMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nn" => Ok(RetrievalMethod::Nn),
            "csls" => Ok(RetrievalMethod::default()),
            _ => s
                .strip_prefix("csls:")
                .and_then(|k| k.parse().ok())
                .filter(|&k| k >= 1)
                .map(|k| RetrievalMethod::Csls { k })
                .ok_or_else(|| Error::InvalidParam(format!("unknown retrieval method {s:?}"))),
        }
    }
}

/// Scores mapped source rows against target rows under one method.
///
/// For CSLS the target-side neighbourhood terms are computed once, against
/// every row of `sources`.
pub struct Scorer<'a> {
    sources: ArrayView2<'a, f64>,
    targets: ArrayView2<'a, f64>,
    method: RetrievalMethod,
    r_targets: Vec<f64>,
}

impl<'a> Scorer<'a> {
    pub fn new(
        sources: ArrayView2<'a, f64>,
        targets: ArrayView2<'a, f64>,
        method: RetrievalMethod,
    ) -> Result<Self> {
        let r_targets = match method {
            RetrievalMethod::Nn => Vec::new(),
            RetrievalMethod::Csls { k } => {
                if k == 0 || k > targets.nrows() || k > sources.nrows() {
                    return Err(Error::InvalidParam(format!(
                        "csls k={k} needs 1 <= k <= min({}, {})",
                        sources.nrows(),
                        targets.nrows()
                    )));
                }
                knn_mean_similarity(targets, sources, k)
            }
        };
        Ok(Scorer {
            sources,
            targets,
            method,
            r_targets,
        })
    }

    /// Scores of source row `i` against every target row.
    pub fn scores(&self, i: usize) -> Vec<f64> {
        let row = self.sources.row(i);
        let cos = similarities(row.as_slice().expect("standard layout"), self.targets);
        match self.method {
            RetrievalMethod::Nn => cos,
            RetrievalMethod::Csls { k } => {
                let r_src = top_k_mean(&cos, k);
                cos.iter()
                    .zip(&self.r_targets)
                    .map(|(&c, &rt)| csls_value(c, r_src, rt))
                    .collect()
            }
        }
    }

    /// Best target and its score for every source row in `rows`.
    pub fn best(&self, rows: std::ops::Range<usize>) -> Vec<(usize, f64)> {
        rows.into_par_iter()
            .map(|i| {
                let s = self.scores(i);
                let j = argmax(&s);
                (j, s[j])
            })
            .collect()
    }
}

/// Ranked translation candidates for one query word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalResult {
    pub source: String,
    /// `None` when the query is not in the source vocabulary.
    pub candidates: Option<Vec<(String, f64)>>,
    pub method: RetrievalMethod,
}

fn mapped_sources(w: &MappingModel, x: &EmbeddingMatrix, y: &EmbeddingMatrix) -> Result<Array2<f64>> {
    if x.dim() != w.dim() || y.dim() != w.dim() {
        return Err(Error::Dimension(format!(
            "mapping is {0}x{0}, spaces have dims {1} and {2}",
            w.dim(),
            x.dim(),
            y.dim()
        )));
    }
    check_unit_rows(y.rows.view())?;
    let mapped = w.map_normalized(x.rows.view());
    check_unit_rows(mapped.view())?;
    Ok(mapped)
}

/// Ranks the `top_n` best targets for each query.
pub fn retrieve<S: AsRef<str> + Sync>(
    w: &MappingModel,
    x: &EmbeddingMatrix,
    y: &EmbeddingMatrix,
    queries: &[S],
    method: RetrievalMethod,
    top_n: usize,
) -> Result<Vec<RetrievalResult>> {
    let mapped = mapped_sources(w, x, y)?;
    let scorer = Scorer::new(mapped.view(), y.rows.view(), method)?;
    Ok(queries
        .par_iter()
        .map(|q| {
            let q = q.as_ref();
            let candidates = x.vocab.id(q).map(|i| {
                let scores = scorer.scores(i);
                top_n_indices(&scores, top_n)
                    .into_iter()
                    .map(|j| (y.vocab.token(j).to_string(), scores[j]))
                    .collect()
            });
            RetrievalResult {
                source: q.to_string(),
                candidates,
                method,
            }
        })
        .collect())
}

/// Accuracy at each cutoff over the evaluable gold source words.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BliReport {
    pub accuracy_at: BTreeMap<usize, f64>,
    pub n_evaluated: usize,
    pub oov_count: usize,
}

impl BliReport {
    pub fn acc(&self, cutoff: usize) -> f64 {
        self.accuracy_at.get(&cutoff).copied().unwrap_or(f64::NAN)
    }
}

pub const DEFAULT_CUTOFFS: [usize; 2] = [1, 5];

/// Scores retrieval output against gold translation sets.
///
/// Gold source words are unique types; a word counts as correct at cutoff `c`
/// when any of its top `c` candidates is one of its gold translations.
/// Words without a result, or out of vocabulary, are counted in `oov_count`.
pub fn evaluate_bli(results: &[RetrievalResult], gold: &Dictionary, cutoffs: &[usize]) -> Result<BliReport> {
    if gold.is_empty() {
        return Err(Error::InvalidParam("gold dictionary is empty".into()));
    }
    let by_source: BTreeMap<&str, &RetrievalResult> =
        results.iter().map(|r| (r.source.as_str(), r)).collect();
    let mut hits: BTreeMap<usize, usize> = cutoffs.iter().map(|&c| (c, 0)).collect();
    let mut evaluated = 0;
    let mut oov = 0;
    for (source, golds) in gold.translation_sets() {
        let Some(cands) = by_source.get(source).and_then(|r| r.candidates.as_ref()) else {
            oov += 1;
            continue;
        };
        evaluated += 1;
        let first_hit = cands.iter().position(|(t, _)| golds.contains(t.as_str()));
        for (&c, h) in hits.iter_mut() {
            if first_hit.is_some_and(|p| p < c) {
                *h += 1;
            }
        }
    }
    if evaluated == 0 {
        return Err(Error::NoEvaluable { oov });
    }
    Ok(BliReport {
        accuracy_at: hits
            .into_iter()
            .map(|(c, h)| (c, h as f64 / evaluated as f64))
            .collect(),
        n_evaluated: evaluated,
        oov_count: oov,
    })
}

/// Retrieves every gold source word and evaluates the result.
pub fn evaluate_mapping(
    w: &MappingModel,
    x: &EmbeddingMatrix,
    y: &EmbeddingMatrix,
    gold: &Dictionary,
    method: RetrievalMethod,
) -> Result<BliReport> {
    let sources: Vec<&str> = gold.translation_sets().into_iter().map(|(s, _)| s).collect();
    let top = *DEFAULT_CUTOFFS.iter().max().expect("non-empty");
    let results = retrieve(w, x, y, &sources, method, top)?;
    evaluate_bli(&results, gold, &DEFAULT_CUTOFFS)
}

/// Predicts every source word as its own translation.
pub fn copying_baseline(gold: &Dictionary) -> Result<BliReport> {
    let results: Vec<RetrievalResult> = gold
        .translation_sets()
        .into_iter()
        .map(|(s, _)| RetrievalResult {
            source: s.to_string(),
            candidates: Some(vec![(s.to_string(), 1.0)]),
            method: RetrievalMethod::Nn,
        })
        .collect();
    evaluate_bli(&results, gold, &DEFAULT_CUTOFFS)
}

/// Mean CSLS score of the best CSLS translation of the `n_eval` most frequent
/// source words. Takes no dictionary: it only sees the two spaces.
pub fn csls_criterion(
    w: &MappingModel,
    x: &EmbeddingMatrix,
    y: &EmbeddingMatrix,
    n_eval: usize,
    k: usize,
) -> Result<f64> {
    if n_eval == 0 || n_eval > x.len() {
        return Err(Error::InvalidParam(format!(
            "n_eval={n_eval} outside 1..={}",
            x.len()
        )));
    }
    let mapped = mapped_sources(w, x, y)?;
    let scorer = Scorer::new(mapped.view(), y.rows.view(), RetrievalMethod::Csls { k })?;
    let best = scorer.best(0..n_eval);
    Ok(best.iter().map(|(_, s)| s).sum::<f64>() / n_eval as f64)
}

/// Mutual nearest neighbours under CSLS among the first `max_rank` rows of
/// each side. Rows are assumed unit length.
pub fn mutual_csls_pairs(
    mapped: ArrayView2<'_, f64>,
    targets: ArrayView2<'_, f64>,
    max_rank: usize,
    k: usize,
) -> Result<Vec<(usize, usize)>> {
    let ns = mapped.nrows().min(max_rank);
    let nt = targets.nrows().min(max_rank);
    let src = mapped.slice(s![..ns, ..]);
    let tgt = targets.slice(s![..nt, ..]);
    let method = RetrievalMethod::Csls { k: k.min(ns).min(nt) };
    let forward = Scorer::new(src, tgt, method)?.best(0..ns);
    let backward = Scorer::new(tgt, src, method)?.best(0..nt);
    Ok(forward
        .iter()
        .enumerate()
        .filter(|&(i, &(j, _))| backward[j].0 == i)
        .map(|(i, &(j, _))| (i, j))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{normalize_rows, Vocabulary};
    use crate::linalg::{gaussian_matrix, random_orthogonal};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space(prefix: &str, rows: Array2<f64>) -> EmbeddingMatrix {
        let vocab = Vocabulary::from_ranked((0..rows.nrows()).map(|i| format!("{prefix}{i}")).collect()).unwrap();
        normalize_rows(&EmbeddingMatrix::new(vocab, rows).unwrap()).unwrap()
    }

    fn gold(pairs: &[(&str, &str)]) -> Dictionary {
        pairs.iter().copied().collect()
    }

    fn result(source: &str, cands: &[&str]) -> RetrievalResult {
        RetrievalResult {
            source: source.into(),
            candidates: Some(cands.iter().map(|c| (c.to_string(), 0.0)).collect()),
            method: RetrievalMethod::Nn,
        }
    }

    #[test]
    fn method_parsing() {
        assert_eq!("nn".parse::<RetrievalMethod>().unwrap(), RetrievalMethod::Nn);
        assert_eq!("csls".parse::<RetrievalMethod>().unwrap(), RetrievalMethod::Csls { k: 10 });
        assert_eq!("csls:3".parse::<RetrievalMethod>().unwrap(), RetrievalMethod::Csls { k: 3 });
        assert!("csls:0".parse::<RetrievalMethod>().is_err());
        assert_eq!(RetrievalMethod::Csls { k: 4 }.to_string(), "csls:4");
    }

    #[test]
    fn identity_nn_retrieves_self() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = space("w", gaussian_matrix(30, 6, &mut rng));
        let queries: Vec<String> = x.vocab.tokens().to_vec();
        let res = retrieve(&MappingModel::identity(6), &x, &x, &queries, RetrievalMethod::Nn, 1).unwrap();
        for r in res {
            assert_eq!(r.candidates.unwrap()[0].0, r.source);
        }
    }

    #[test]
    fn oov_queries_are_marked() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = space("w", gaussian_matrix(5, 3, &mut rng));
        let res = retrieve(&MappingModel::identity(3), &x, &x, &["zzz"], RetrievalMethod::Nn, 1).unwrap();
        assert!(res[0].candidates.is_none());
    }

    #[test]
    fn csls_on_true_rotation_is_perfect() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = random_orthogonal(10, &mut rng);
        let xr = gaussian_matrix(200, 10, &mut rng);
        let x = space("s", xr.clone());
        let y = space("t", xr.dot(&r.t()));
        let w = MappingModel {
            w: r,
            ..MappingModel::identity(10)
        };
        let d: Dictionary = (0..200).map(|i| (format!("s{i}"), format!("t{i}"))).collect();
        let rep = evaluate_mapping(&w, &x, &y, &d, RetrievalMethod::default()).unwrap();
        assert_eq!(rep.acc(1), 1.0);
    }

    #[test]
    fn evaluation_counts() {
        let all = [result("a", &["x"]), result("b", &["y"])];
        let g = gold(&[("a", "x"), ("b", "y")]);
        assert_eq!(evaluate_bli(&all, &g, &[1]).unwrap().acc(1), 1.0);

        let g2 = gold(&[("a", "p"), ("a", "q")]);
        let r = [result("a", &["q", "p"])];
        assert_eq!(evaluate_bli(&r, &g2, &[1]).unwrap().acc(1), 1.0);

        let four = [
            result("a", &["ta", "x", "x", "x", "x"]),
            result("b", &["tb", "x", "x", "x", "x"]),
            result("c", &["x", "x", "tc", "x", "x"]),
            result("d", &["x", "x", "x", "x", "x", "td"]),
        ];
        let g4 = gold(&[("a", "ta"), ("b", "tb"), ("c", "tc"), ("d", "td")]);
        let rep = evaluate_bli(&four, &g4, &[1, 5]).unwrap();
        assert_eq!(rep.acc(1), 0.5);
        assert_eq!(rep.acc(5), 0.75);
    }

    #[test]
    fn oov_excluded_from_denominator() {
        let r = [
            result("a", &["x"]),
            RetrievalResult {
                source: "b".into(),
                candidates: None,
                method: RetrievalMethod::Nn,
            },
        ];
        let rep = evaluate_bli(&r, &gold(&[("a", "x"), ("b", "y"), ("c", "z")]), &[1]).unwrap();
        assert_eq!(rep.n_evaluated, 1);
        assert_eq!(rep.oov_count, 2);
        assert_eq!(rep.acc(1), 1.0);
        assert!(matches!(
            evaluate_bli(&[], &gold(&[("a", "x")]), &[1]),
            Err(Error::NoEvaluable { oov: 1 })
        ));
        assert!(evaluate_bli(&[], &Dictionary::new(), &[1]).is_err());
    }

    #[test]
    fn copying_baseline_cases() {
        let id = gold(&[("paris", "paris"), ("7", "7")]);
        assert_eq!(copying_baseline(&id).unwrap().acc(1), 1.0);
        let none = gold(&[("chat", "cat"), ("chien", "dog")]);
        assert_eq!(copying_baseline(&none).unwrap().acc(1), 0.0);
        let mixed = gold(&[("paris", "paris"), ("chat", "cat"), ("taxi", "cab"), ("taxi", "taxi")]);
        let rep = copying_baseline(&mixed).unwrap();
        assert!((rep.acc(1) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn criterion_prefers_true_mapping() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let r = random_orthogonal(8, &mut rng);
        let xr = gaussian_matrix(300, 8, &mut rng);
        let x = space("s", xr.clone());
        let y = space("t", xr.dot(&r.t()));
        let good = MappingModel {
            w: r,
            ..MappingModel::identity(8)
        };
        let bad = MappingModel {
            w: random_orthogonal(8, &mut rng),
            ..MappingModel::identity(8)
        };
        let cg = csls_criterion(&good, &x, &y, 100, 10).unwrap();
        let cb = csls_criterion(&bad, &x, &y, 100, 10).unwrap();
        assert!(cg > cb, "{cg} vs {cb}");
        assert!(csls_criterion(&good, &x, &y, 301, 10).is_err());
    }

    #[test]
    fn criterion_ignores_target_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let xr = gaussian_matrix(60, 5, &mut rng);
        let yr = gaussian_matrix(60, 5, &mut rng);
        let x = space("s", xr);
        let y = space("t", yr.clone());
        let mut rev = yr;
        rev.invert_axis(ndarray::Axis(0));
        let y_rev = space("t", rev.as_standard_layout().to_owned());
        let w = MappingModel::identity(5);
        let a = csls_criterion(&w, &x, &y, 30, 10).unwrap();
        let b = csls_criterion(&w, &x, &y_rev, 30, 10).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn mutual_pairs_on_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = space("s", gaussian_matrix(50, 6, &mut rng));
        let pairs = mutual_csls_pairs(x.rows.view(), x.rows.view(), 40, 5).unwrap();
        assert_eq!(pairs.len(), 40);
        assert!(pairs.iter().all(|(i, j)| i == j));
    }
}
