use super::mapping::{MappingMethod, MappingModel};
use super::procrustes::procrustes_pairs;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::retrieval::{check_unit_rows, mutual_csls_pairs};

/// Settings for iterative Procrustes refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RefineParams {
    pub iters: usize,
    /// Most frequent rows per side considered for dictionary induction.
    pub max_rank: usize,
    pub csls_k: usize,
}

/// One induction round: mutual CSLS nearest neighbours among the top
/// `max_rank` words of each side under the current mapping.
pub fn induce_dictionary(
    w: &MappingModel,
    x: &EmbeddingMatrix,
    y: &EmbeddingMatrix,
    max_rank: usize,
    k: usize,
) -> Result<Vec<(usize, usize)>> {
    check_unit_rows(y.rows.view())?;
    let mapped = w.map_normalized(x.rows.view());
    let pairs = mutual_csls_pairs(mapped.view(), y.rows.view(), max_rank, k)?;
    if pairs.is_empty() {
        return Err(Error::EmptyInducedDictionary);
    }
    Ok(pairs)
}

/// Alternates dictionary induction and Procrustes `iters` times.
pub fn refine(w: &MappingModel, x: &EmbeddingMatrix, y: &EmbeddingMatrix, p: RefineParams) -> Result<MappingModel> {
    if p.iters == 0 {
        return Err(Error::InvalidParam("refinement needs at least one iteration".into()));
    }
    if x.dim() != w.dim() || y.dim() != w.dim() {
        return Err(Error::Dimension(format!("mapping {} vs spaces {}/{}", w.dim(), x.dim(), y.dim())));
    }
    let mut current = w.clone();
    for _ in 0..p.iters {
        let pairs = induce_dictionary(&current, x, y, p.max_rank, p.csls_k)?;
        current = MappingModel {
            w: procrustes_pairs(&x.rows, &y.rows, &pairs),
            method: MappingMethod::Procrustes,
            meta: current.meta.clone(),
        };
        current.meta.refinement_iters += 1;
    }
    Ok(current)
}
