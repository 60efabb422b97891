//! Cross-lingual word embedding alignment and domain-mismatch measurement.
//!
//! Monolingual or joint skip-gram embeddings are mapped into a shared space
//! (adversarially or with Procrustes), translations are retrieved with CSLS,
//! and the topical distance between training corpora is quantified with STDM.

pub mod alignment;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod retrieval;
pub mod stdm;
pub mod synth;
pub mod wordsim;

pub use error::{Error, Result};
