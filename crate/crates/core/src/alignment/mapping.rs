use std::fmt;
use std::fs;
use std::path::Path;

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MappingMethod {
    Adversarial,
    Procrustes,
    Identity,
}

impl fmt::Display for MappingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MappingMethod::Adversarial => "adversarial",
            MappingMethod::Procrustes => "procrustes",
            MappingMethod::Identity => "identity",
        };
        f.write_str(s)
    }
}

/// How a mapping was obtained.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: Option<u64>,
    pub epochs: usize,
    pub refinement_iters: usize,
}

/// Linear map `y ≈ W·x` from source to target space.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingModel {
    pub w: Array2<f64>,
    pub method: MappingMethod,
    pub meta: TrainingMeta,
}

#[derive(Serialize, Deserialize)]
struct MappingFile {
    dim: usize,
    method: MappingMethod,
    meta: TrainingMeta,
    w: Vec<Vec<f64>>,
}

impl MappingModel {
    pub fn identity(dim: usize) -> Self {
        MappingModel {
            w: Array2::eye(dim),
            method: MappingMethod::Identity,
            meta: TrainingMeta::default(),
        }
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    /// Maps every row vector: `X·Wᵀ`.
    pub fn map_rows(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        x.dot(&self.w.t())
    }

    /// Maps rows and rescales them to unit length. Zero rows stay zero.
    pub fn map_normalized(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut m = self.map_rows(x);
        for mut row in m.axis_iter_mut(Axis(0)) {
            let n = row.dot(&row).sqrt();
            if n > 0.0 {
                row.mapv_inplace(|v| v / n);
            }
        }
        m
    }

    pub fn to_json(&self) -> Result<String> {
        let file = MappingFile {
            dim: self.dim(),
            method: self.method,
            meta: self.meta.clone(),
            w: self.w.rows().into_iter().map(|r| r.to_vec()).collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MappingFile = serde_json::from_str(text)?;
        if file.w.len() != file.dim || file.w.iter().any(|r| r.len() != file.dim) {
            return Err(Error::Dimension(format!("mapping is not {0}x{0}", file.dim)));
        }
        let flat: Vec<f64> = file.w.into_iter().flatten().collect();
        Ok(MappingModel {
            w: Array2::from_shape_vec((file.dim, file.dim), flat).expect("checked"),
            method: file.method,
            meta: file.meta,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
