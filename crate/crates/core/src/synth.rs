//! Synthetic instances with known ground truth: ciphered languages, topic
//! splits, rotated point clouds and a latent-topic text generator.

use std::collections::{BTreeMap, BTreeSet};

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::alignment::Dictionary;
use crate::corpus::Corpus;
use crate::embedding::{build_vocab, normalize_rows, EmbeddingMatrix, Vocabulary};
use crate::error::{Error, Result};
use crate::linalg::{gaussian_matrix, random_orthogonal};

pub const DEFAULT_CIPHER_PREFIX: &str = "q";

fn is_digits(t: &str) -> bool {
    !t.is_empty() && t.chars().all(|c| c.is_ascii_digit())
}

fn is_punctuation(t: &str) -> bool {
    !t.is_empty() && t.chars().all(|c| !c.is_alphanumeric() && !c.is_whitespace())
}

/// Tokens left unciphered.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorPolicy {
    pub digits: bool,
    pub punctuation: bool,
    pub tokens: BTreeSet<String>,
    /// Every token is an anchor.
    pub all: bool,
}

impl AnchorPolicy {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn digits_and_punctuation() -> Self {
        AnchorPolicy {
            digits: true,
            punctuation: true,
            ..Self::default()
        }
    }

    pub fn all() -> Self {
        AnchorPolicy {
            all: true,
            ..Self::default()
        }
    }

    pub fn is_anchor(&self, token: &str) -> bool {
        self.all
            || (self.digits && is_digits(token))
            || (self.punctuation && is_punctuation(token))
            || self.tokens.contains(token)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CipherSpec {
    pub seed: u64,
    pub anchors: AnchorPolicy,
    /// Cipher words are `prefix` followed by a 1-based index.
    pub prefix: String,
}

impl CipherSpec {
    pub fn new(seed: u64, anchors: AnchorPolicy) -> Self {
        CipherSpec {
            seed,
            anchors,
            prefix: DEFAULT_CIPHER_PREFIX.to_string(),
        }
    }
}

/// Bijective substitution table for the vocabulary of `c`.
///
/// Non-anchor words are shuffled with the spec's seed and renamed
/// `prefix1, prefix2, ...` in shuffled order; anchors map to themselves.
pub fn cipher_table(c: &Corpus, spec: &CipherSpec) -> Result<BTreeMap<String, String>> {
    let vocab: BTreeSet<&str> = c.lines.iter().flatten().map(String::as_str).collect();
    let mut ciphered: Vec<&str> = vocab.iter().copied().filter(|t| !spec.anchors.is_anchor(t)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    ciphered.shuffle(&mut rng);
    let mut table = BTreeMap::new();
    for (i, t) in ciphered.iter().enumerate() {
        let name = format!("{}{}", spec.prefix, i + 1);
        if vocab.contains(name.as_str()) {
            return Err(Error::CipherCollision(name));
        }
        table.insert(t.to_string(), name);
    }
    for t in vocab.iter().filter(|t| spec.anchors.is_anchor(t)) {
        table.insert(t.to_string(), t.to_string());
    }
    Ok(table)
}

/// Applies a substitution table produced by [`cipher_table`].
pub fn apply_cipher(c: &Corpus, table: &BTreeMap<String, String>, lang: &str) -> Result<Corpus> {
    let lines = c
        .lines
        .iter()
        .map(|l| {
            l.iter()
                .map(|t| {
                    table
                        .get(t)
                        .cloned()
                        .ok_or_else(|| Error::InvalidParam(format!("token {t:?} has no cipher entry")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Corpus {
        lines,
        lang: lang.to_string(),
        domain: c.domain.clone(),
        doc_bounds: c.doc_bounds.clone(),
    })
}

/// Token-wise ciphered copy of `c` and the gold dictionary, ordered by
/// descending source frequency.
pub fn make_cipher_language(c: &Corpus, spec: &CipherSpec) -> Result<(Corpus, Dictionary)> {
    let table = cipher_table(c, spec)?;
    let out = apply_cipher(c, &table, &format!("{}-{}", c.lang, spec.prefix))?;
    let vocab = build_vocab(c, 1)?;
    let dict = vocab.tokens().iter().map(|t| (t.clone(), table[t].clone())).collect();
    Ok((out, dict))
}

/// Named keyword set characterising one domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicLexicon {
    pub name: String,
    pub words: BTreeSet<String>,
}

/// Splits `c` into two domains by lexicon overlap.
///
/// Each line goes to the lexicon it overlaps most (ties at random). With
/// probability `1 - purity` that rule is replaced by a fair coin.
pub fn make_domain_split(
    c: &Corpus,
    lexicons: &[TopicLexicon; 2],
    purity: f64,
    seed: u64,
) -> Result<(Corpus, Corpus)> {
    if let Some(w) = lexicons[0].words.intersection(&lexicons[1].words).next() {
        return Err(Error::InvalidParam(format!("lexicons share the word {w:?}")));
    }
    if !(purity > 0.5 && purity <= 1.0) {
        return Err(Error::InvalidParam(format!("purity {purity} outside (0.5, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts: [Vec<Vec<String>>; 2] = [Vec::new(), Vec::new()];
    for line in &c.lines {
        let overlap = |lex: &TopicLexicon| line.iter().filter(|t| lex.words.contains(*t)).count();
        let (o0, o1) = (overlap(&lexicons[0]), overlap(&lexicons[1]));
        let follow = rng.random::<f64>() < purity;
        let coin = rng.random_bool(0.5);
        let side = if !follow || o0 == o1 {
            coin as usize
        } else {
            (o1 > o0) as usize
        };
        parts[side].push(line.clone());
    }
    if let Some(i) = parts.iter().position(Vec::is_empty) {
        return Err(Error::EmptyDomain(i));
    }
    let [a, b] = parts;
    Ok((
        Corpus::new(a, c.lang.clone(), lexicons[0].name.clone()),
        Corpus::new(b, c.lang.clone(), lexicons[1].name.clone()),
    ))
}

/// A rotated point cloud with its identity dictionary and true rotation.
#[derive(Debug, Clone)]
pub struct RotationInstance {
    pub x: EmbeddingMatrix,
    pub y: EmbeddingMatrix,
    pub dict: Dictionary,
    pub w_true: Array2<f64>,
}

/// `n` random unit vectors `X`, a random orthogonal `W` and
/// `Y = normalize(X·Wᵀ + σ·G)`. Source words are `s0..`, targets `t0..`.
pub fn make_rotation_instance(n: usize, d: usize, noise: f64, seed: u64) -> Result<RotationInstance> {
    if d < 2 || n <= d {
        return Err(Error::InvalidParam(format!("need n > d >= 2, got n={n} d={d}")));
    }
    if !(noise >= 0.0) {
        return Err(Error::InvalidParam(format!("noise must be non-negative, got {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = |p: &str| (0..n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
    let x = gaussian_matrix(n, d, &mut rng);
    let xm = normalize_rows(&EmbeddingMatrix::new(Vocabulary::from_ranked(names("s"))?, x)?)?;
    let w = random_orthogonal(d, &mut rng);
    let y = xm.rows.dot(&w.t()) + gaussian_matrix(n, d, &mut rng) * noise;
    let ym = normalize_rows(&EmbeddingMatrix::new(Vocabulary::from_ranked(names("t"))?, y)?)?;
    let dict = (0..n).map(|i| (format!("s{i}"), format!("t{i}"))).collect();
    Ok(RotationInstance {
        x: xm,
        y: ym,
        dict,
        w_true: w,
    })
}

/// Replaces each token with probability `p` by a uniform draw from
/// `off_topic`. For a fixed seed the replaced positions grow with `p`.
pub fn noise_corpus(c: &Corpus, p: f64, off_topic: &[String], seed: u64) -> Result<Corpus> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParam(format!("noise level {p} outside [0, 1]")));
    }
    if off_topic.is_empty() && p > 0.0 {
        return Err(Error::InvalidParam("off-topic vocabulary is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lines = c
        .lines
        .iter()
        .map(|l| {
            l.iter()
                .map(|t| {
                    let u: f64 = rng.random();
                    let pick = rng.random_range(0..off_topic.len().max(1));
                    if u < p {
                        off_topic[pick].clone()
                    } else {
                        t.clone()
                    }
                })
                .collect()
        })
        .collect();
    Ok(Corpus::new(lines, c.lang.clone(), format!("{}+noise{p}", c.domain)))
}

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

/// Distinct pronounceable lowercase word for every index.
pub fn pseudo_word(mut i: usize) -> String {
    let base = CONSONANTS.len() * VOWELS.len();
    let syllables = if i < base * base {
        2
    } else {
        i -= base * base;
        3
    };
    let mut out = String::new();
    for _ in 0..syllables {
        let s = i % base;
        i /= base;
        out.push(CONSONANTS[s / VOWELS.len()] as char);
        out.push(VOWELS[s % VOWELS.len()] as char);
    }
    out
}

/// Parameters of the latent-topic text generator.
///
/// Every emitted word has a latent vector near one of `clusters` centres, with
/// coordinate scales decaying as `(1 + j)^-anisotropy`. A line walks over
/// topic states shared by both domains; each state emits words with
/// probability `∝ exp(bias + β·⟨v, c⟩)`. The domains prefer different states
/// (`state_skew`), and the second domain also perturbs content-word latents
/// and frequencies, so the same word is used somewhat differently in each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TopicalSpec {
    pub seed: u64,
    pub lines: usize,
    pub words: usize,
    /// Number tokens `0..numbers`; they are digit anchors under a cipher.
    pub numbers: usize,
    pub keywords: usize,
    pub latent_dim: usize,
    pub clusters: usize,
    /// Scale of a word's offset from its cluster centre.
    pub cluster_spread: f64,
    pub anisotropy: f64,
    pub states: usize,
    pub beta: f64,
    pub zipf: f64,
    pub min_len: usize,
    pub max_len: usize,
    pub switch_prob: f64,
    /// Standard deviation of the per-domain log-weights of topic states.
    pub state_skew: f64,
    /// Scale of the per-word latent perturbation in the second domain.
    pub domain_shift: f64,
    /// Standard deviation of the per-word log-frequency change in the second domain.
    pub frequency_shift: f64,
    pub comma_prob: f64,
}

impl Default for TopicalSpec {
    fn default() -> Self {
        TopicalSpec {
            seed: 1,
            lines: 60_000,
            words: 1500,
            numbers: 200,
            keywords: 40,
            latent_dim: 48,
            clusters: 30,
            cluster_spread: 1.5,
            anisotropy: 0.5,
            states: 256,
            beta: 30.0,
            zipf: 1.0,
            min_len: 8,
            max_len: 16,
            switch_prob: 0.15,
            state_skew: 1.0,
            domain_shift: 0.15,
            frequency_shift: 0.5,
            comma_prob: 0.08,
        }
    }
}

/// Output of [`generate_topical`].
#[derive(Debug, Clone)]
pub struct TopicalCorpus {
    pub corpus: Corpus,
    pub lexicons: [TopicLexicon; 2],
    /// Content words in generator rank order.
    pub words: Vec<String>,
    pub numbers: Vec<String>,
}

struct DomainModel {
    cdfs: Vec<Vec<f64>>,
    /// Cumulative state weights, for start states.
    start: Vec<f64>,
    /// Cumulative weights over each state's neighbours.
    moves: Vec<Vec<f64>>,
}

fn gaussian_vector(rng: &mut ChaCha8Rng, scales: &Array1<f64>) -> Array1<f64> {
    scales.mapv(|s| s * rng.sample::<f64, _>(StandardNormal))
}

fn unit(v: Array1<f64>) -> Array1<f64> {
    let n = v.dot(&v).sqrt();
    v / n
}

fn cumulative(weights: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = weights
        .into_iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    out.iter_mut().for_each(|v| *v /= acc);
    out
}

fn domain_model(
    latents: &Array2<f64>,
    bias: &[f64],
    states: &[Array1<f64>],
    neighbours: &[Vec<usize>],
    spec: &TopicalSpec,
    rng: &mut ChaCha8Rng,
) -> DomainModel {
    let bias = Array1::from(bias.to_vec());
    let cdfs = states
        .iter()
        .map(|c| {
            let logits = latents.dot(c) * spec.beta + &bias;
            let top = logits.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            cumulative(logits.iter().map(|l| (l - top).exp()))
        })
        .collect();
    let weight: Vec<f64> = (0..states.len())
        .map(|_| (spec.state_skew * rng.sample::<f64, _>(StandardNormal)).exp())
        .collect();
    let moves = neighbours
        .iter()
        .map(|nb| cumulative(nb.iter().map(|&j| weight[j])))
        .collect();
    DomainModel {
        cdfs,
        start: cumulative(weight.iter().copied()),
        moves,
    }
}

fn draw(cdf: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    cdf.partition_point(|&v| v < u).min(cdf.len() - 1)
}

/// Generates a two-domain corpus; every line carries one keyword of its domain.
pub fn generate_topical(spec: &TopicalSpec) -> Result<TopicalCorpus> {
    if spec.words == 0 || spec.keywords == 0 || spec.latent_dim == 0 || spec.clusters == 0 {
        return Err(Error::InvalidParam(
            "words, keywords, latent_dim and clusters must be positive".into(),
        ));
    }
    if spec.states < 2 {
        return Err(Error::InvalidParam("need at least two topic states".into()));
    }
    if spec.min_len == 0 || spec.min_len > spec.max_len {
        return Err(Error::InvalidParam("need 1 <= min_len <= max_len".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let words: Vec<String> = (0..spec.words).map(pseudo_word).collect();
    let numbers: Vec<String> = (0..spec.numbers).map(|i| i.to_string()).collect();
    let keyword_sets: [Vec<String>; 2] = [0, 1].map(|d| {
        (0..spec.keywords)
            .map(|i| pseudo_word(spec.words + d * spec.keywords + i))
            .collect()
    });
    let emitted: Vec<&String> = words.iter().chain(&numbers).collect();

    let k = spec.latent_dim;
    let scales = Array1::from_shape_fn(k, |j| (1.0 + j as f64).powf(-spec.anisotropy));
    let centres: Vec<Array1<f64>> = (0..spec.clusters).map(|_| gaussian_vector(&mut rng, &scales)).collect();
    let near_centre = |rng: &mut ChaCha8Rng| {
        let c = &centres[rng.random_range(0..centres.len())];
        unit(c + &(gaussian_vector(rng, &scales) * spec.cluster_spread))
    };

    let n = emitted.len();
    let mut latents = Array2::zeros((n, k));
    for mut row in latents.rows_mut() {
        row.assign(&near_centre(&mut rng));
    }
    let states: Vec<Array1<f64>> = (0..spec.states).map(|_| near_centre(&mut rng)).collect();
    let neighbours: Vec<Vec<usize>> = states
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut order: Vec<usize> = (0..states.len()).filter(|&j| j != i).collect();
            order.sort_by(|&a, &b| states[b].dot(c).total_cmp(&states[a].dot(c)).then(a.cmp(&b)));
            order.truncate(8);
            order
        })
        .collect();
    let bias: Vec<f64> = (0..n)
        .map(|r| -spec.zipf * ((r % spec.words) as f64 + 10.0).ln())
        .collect();

    let mut shifted = latents.clone();
    let mut shifted_bias = bias.clone();
    for i in 0..spec.words {
        let v = &latents.row(i) + &(gaussian_vector(&mut rng, &scales) * spec.domain_shift);
        shifted.row_mut(i).assign(&unit(v));
        shifted_bias[i] += spec.frequency_shift * rng.sample::<f64, _>(StandardNormal);
    }
    let models = [
        domain_model(&latents, &bias, &states, &neighbours, spec, &mut rng),
        domain_model(&shifted, &shifted_bias, &states, &neighbours, spec, &mut rng),
    ];

    let mut lines = Vec::with_capacity(spec.lines);
    for _ in 0..spec.lines {
        let d = rng.random_range(0..2);
        let model = &models[d];
        let len = rng.random_range(spec.min_len..=spec.max_len);
        let mut state = draw(&model.start, &mut rng);
        let mut line: Vec<String> = Vec::with_capacity(len + 3);
        for _ in 0..len {
            if rng.random::<f64>() < spec.switch_prob {
                state = neighbours[state][draw(&model.moves[state], &mut rng)];
            }
            line.push(emitted[draw(&model.cdfs[state], &mut rng)].clone());
            if rng.random::<f64>() < spec.comma_prob {
                line.push(",".into());
            }
        }
        let kw = &keyword_sets[d][rng.random_range(0..spec.keywords)];
        let at = rng.random_range(0..=line.len());
        line.insert(at, kw.clone());
        line.push(".".into());
        lines.push(line);
    }
    let [ka, kb] = keyword_sets;
    Ok(TopicalCorpus {
        corpus: Corpus::new(lines, "en", "mixed"),
        lexicons: [
            TopicLexicon {
                name: "alpha".into(),
                words: ka.into_iter().collect(),
            },
            TopicLexicon {
                name: "beta".into(),
                words: kb.into_iter().collect(),
            },
        ],
        words,
        numbers,
    })
}
