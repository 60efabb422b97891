//! Vocabularies, skip-gram training and the text interchange format.

mod matrix;
mod sgns;
mod vocab;

pub use matrix::{
    embeddings_to_string, format_g6, load_embeddings, normalize_rows, parse_embeddings,
    save_embeddings, EmbeddingMatrix, NORM_TOLERANCE,
};
pub use sgns::{fnv1a32, subword_buckets, train_sgns, NegativeSampler, SgnsParams, SubwordParams};
pub use vocab::{build_vocab, Vocabulary};

use crate::corpus::{concat_shuffle, Corpus};
use crate::error::Result;

/// Trains one model per corpus.
pub fn train_separate(c: &Corpus, p: &SgnsParams) -> Result<EmbeddingMatrix> {
    let v = build_vocab(c, p.min_count)?;
    train_sgns(c, &v, p)
}

/// Output of joint training: the shared space plus per-language views of it.
#[derive(Debug, Clone)]
pub struct JointEmbeddings {
    pub shared: EmbeddingMatrix,
    /// Rows of `shared` for tokens seen in the first corpus, ranked by their
    /// frequency there.
    pub a: EmbeddingMatrix,
    pub b: EmbeddingMatrix,
}

/// Trains a single model on the shuffled concatenation of `a` and `b`.
///
/// A string occurring in both corpora has one vocabulary entry and therefore
/// one vector; the per-language views share that row.
pub fn train_joint(a: &Corpus, b: &Corpus, p: &SgnsParams) -> Result<JointEmbeddings> {
    let joint = concat_shuffle(a, b, p.seed);
    let v = build_vocab(&joint, p.min_count)?;
    let shared = train_sgns(&joint, &v, p)?;
    let view = |c: &Corpus| -> Result<EmbeddingMatrix> {
        let own = build_vocab(c, 1)?;
        let kept = own
            .tokens()
            .iter()
            .zip(own.counts())
            .filter(|(t, _)| shared.vocab.contains(t))
            .map(|(t, &n)| (t.clone(), n));
        shared.restrict(kept)
    };
    Ok(JointEmbeddings {
        a: view(a)?,
        b: view(b)?,
        shared,
    })
}
