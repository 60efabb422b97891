use ndarray::Array2;

use super::dictionary::Dictionary;
use super::mapping::{MappingMethod, MappingModel, TrainingMeta};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::linalg::{from_nalgebra, to_nalgebra};

/// Orthogonal `W` minimising `Σ ‖W·x_s − y_t‖²` over the given row-index pairs.
///
/// With `Yᵀ·X = U·S·Vᵀ` (rows stacked per pair) the minimiser is `U·Vᵀ`.
pub fn procrustes_pairs(x: &Array2<f64>, y: &Array2<f64>, pairs: &[(usize, usize)]) -> Array2<f64> {
    let d = x.ncols();
    let mut cross = Array2::<f64>::zeros((d, d));
    for &(s, t) in pairs {
        let xs = x.row(s);
        let yt = y.row(t);
        for i in 0..d {
            let yi = yt[i];
            for j in 0..d {
                cross[[i, j]] += yi * xs[j];
            }
        }
    }
    let svd = to_nalgebra(cross.view()).svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    from_nalgebra(&(u * v_t))
}

/// Solves the orthogonal Procrustes problem on the in-vocabulary pairs of `dict`.
pub fn procrustes(x: &EmbeddingMatrix, y: &EmbeddingMatrix, dict: &Dictionary) -> Result<MappingModel> {
    if x.dim() != y.dim() {
        return Err(Error::Dimension(format!(
            "source dim {} != target dim {}",
            x.dim(),
            y.dim()
        )));
    }
    let pairs: Vec<(usize, usize)> = dict
        .pairs()
        .iter()
        .filter_map(|(s, t)| Some((x.vocab.id(s)?, y.vocab.id(t)?)))
        .collect();
    if pairs.is_empty() {
        return Err(Error::EmptyDictionary);
    }
    Ok(MappingModel {
        w: procrustes_pairs(&x.rows, &y.rows, &pairs),
        method: MappingMethod::Procrustes,
        meta: TrainingMeta::default(),
    })
}
