//! Linear maps between embedding spaces: adversarial training, Procrustes,
//! identical-string seed dictionaries and iterative refinement.

mod adversarial;
mod dictionary;
mod mapping;
mod procrustes;
mod refine;

pub use adversarial::{
    adversarial_run, adversarial_train, orthogonalize, AdversarialParams, AdversarialRun, DiscGrads,
    Discriminator, EpochSnapshot,
};
pub use dictionary::{extract_identical_seed, load_dictionary, parse_dictionary, Dictionary};
pub use mapping::{MappingMethod, MappingModel, TrainingMeta};
pub use procrustes::{procrustes, procrustes_pairs};
pub use refine::{induce_dictionary, refine, RefineParams};

/// Largest tolerated `max |WᵀW − I|` after a Procrustes step.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-6;
