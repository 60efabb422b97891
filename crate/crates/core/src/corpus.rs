//! Tokenized text corpora, line sampling, joint concatenation and document
//! segmentation.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A tagged collection of tokenized lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub lines: Vec<Vec<String>>,
    pub lang: String,
    pub domain: String,
    /// Sorted line indices at which documents start. Always begins with 0.
    pub doc_bounds: Option<Vec<usize>>,
}

/// Lowercases the line and isolates every character that is neither
/// alphanumeric nor whitespace as a token of its own.
pub fn tokenize(line: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in line.chars() {
        if ch.is_whitespace() {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
        } else if ch.is_alphanumeric() {
            current.extend(ch.to_lowercase());
        } else {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            tokens.push(ch.to_lowercase().collect());
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

impl Corpus {
    pub fn new(lines: Vec<Vec<String>>, lang: impl Into<String>, domain: impl Into<String>) -> Self {
        Corpus {
            lines,
            lang: lang.into(),
            domain: domain.into(),
            doc_bounds: None,
        }
    }

    /// Tokenizes each entry of `text` as one line.
    pub fn from_lines<S: AsRef<str>>(
        text: &[S],
        lang: impl Into<String>,
        domain: impl Into<String>,
    ) -> Self {
        let lines = text.iter().map(|l| tokenize(l.as_ref())).collect();
        Corpus::new(lines, lang, domain)
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.lines.iter().map(Vec::len).sum()
    }

    pub fn with_doc_bounds(mut self, bounds: Vec<usize>) -> Result<Self> {
        validate_bounds(&bounds, self.lines.len())?;
        self.doc_bounds = Some(bounds);
        Ok(self)
    }

    /// Writes the corpus as space-joined tokens, one line per row.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::new();
        for line in &self.lines {
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

fn validate_bounds(bounds: &[usize], n_lines: usize) -> Result<()> {
    match bounds.first() {
        None => return Err(Error::DocBounds("boundary list is empty".into())),
        Some(&first) if first != 0 => {
            return Err(Error::DocBounds(format!("first boundary is {first}, expected 0")))
        }
        _ => {}
    }
    for w in bounds.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::DocBounds(format!(
                "boundaries not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
    }
    if let Some(&last) = bounds.last() {
        if last >= n_lines {
            return Err(Error::DocBounds(format!(
                "boundary {last} out of range for {n_lines} lines"
            )));
        }
    }
    Ok(())
}

/// Reads a UTF-8 file with one record per line.
///
/// Empty lines are kept as empty token sequences so that line indices stay
/// aligned with an optional boundary sidecar.
pub fn load_corpus(path: impl AsRef<Path>, lang: &str, domain: &str) -> Result<Corpus> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let lines: Vec<Vec<String>> = text.lines().map(tokenize).collect();
    if lines.iter().all(Vec::is_empty) {
        return Err(Error::EmptyCorpus(path.display().to_string()));
    }
    Ok(Corpus::new(lines, lang, domain))
}

/// Reads a boundary sidecar: one 0-based line index per row.
pub fn load_doc_bounds(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<usize>().map_err(|e| Error::Format {
                line: i + 1,
                msg: format!("bad boundary index {l:?}: {e}"),
            })
        })
        .collect()
}

/// Uniform sample of `min(n, |c|)` lines without replacement, original order kept.
pub fn sample_lines(c: &Corpus, n: usize, seed: u64) -> Result<Corpus> {
    if n == 0 {
        return Err(Error::InvalidParam("sample size must be at least 1".into()));
    }
    let mut out = Corpus::new(Vec::new(), c.lang.clone(), c.domain.clone());
    if n >= c.len() {
        out.lines = c.lines.clone();
        out.doc_bounds = c.doc_bounds.clone();
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, c.len(), n).into_vec();
    picked.sort_unstable();
    out.lines = picked.into_iter().map(|i| c.lines[i].clone()).collect();
    Ok(out)
}

/// Joint-training input: the union of both corpora's lines in a seeded random order.
pub fn concat_shuffle(a: &Corpus, b: &Corpus, seed: u64) -> Corpus {
    let mut lines: Vec<Vec<String>> = a.lines.iter().chain(&b.lines).cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    lines.shuffle(&mut rng);
    Corpus::new(
        lines,
        format!("{}+{}", a.lang, b.lang),
        format!("{}+{}", a.domain, b.domain),
    )
}

/// How a line stream is cut into documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentPolicy {
    /// Use the corpus' own boundaries.
    Native,
    /// Consecutive blocks of this many lines.
    Block(usize),
}

impl Default for SegmentPolicy {
    fn default() -> Self {
        SegmentPolicy::Block(20)
    }
}

impl fmt::Display for SegmentPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SegmentPolicy::Native => write!(f, "native"),
            SegmentPolicy::Block(l) => write!(f, "block:{l}"),
        }
    }
}

impl FromStr for SegmentPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "native" {
            return Ok(SegmentPolicy::Native);
        }
        let size = s
            .strip_prefix("block:")
            .and_then(|n| n.parse::<usize>().ok())
            .ok_or_else(|| Error::Policy(format!("unknown policy {s:?}, expected native or block:<L>")))?;
        Ok(SegmentPolicy::Block(size))
    }
}

/// A set of bag-of-words documents cut from one corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentSet {
    pub docs: Vec<BTreeMap<String, usize>>,
    pub lang: String,
    pub domain: String,
}

impl DocumentSet {
    pub fn n(&self) -> usize {
        self.docs.len()
    }

    /// Builds a set directly from token lists, one per document.
    pub fn from_token_lists<S: AsRef<str>>(docs: &[Vec<S>]) -> Self {
        DocumentSet {
            docs: docs.iter().map(|d| bag(d.iter().map(AsRef::as_ref))).collect(),
            lang: String::new(),
            domain: String::new(),
        }
    }
}

fn bag<'a>(tokens: impl Iterator<Item = &'a str>) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for t in tokens {
        *counts.entry(t.to_string()).or_insert(0) += 1;
    }
    counts
}

/// Cuts a corpus into documents. Spans without any token are dropped.
pub fn segment_documents(c: &Corpus, policy: SegmentPolicy) -> Result<DocumentSet> {
    let spans: Vec<(usize, usize)> = match policy {
        SegmentPolicy::Native => {
            let bounds = c
                .doc_bounds
                .as_ref()
                .ok_or_else(|| Error::Policy("native segmentation needs document boundaries".into()))?;
            validate_bounds(bounds, c.len())?;
            bounds
                .iter()
                .enumerate()
                .map(|(i, &start)| (start, bounds.get(i + 1).copied().unwrap_or(c.len())))
                .collect()
        }
        SegmentPolicy::Block(0) => {
            return Err(Error::Policy("block size must be at least 1".into()));
        }
        SegmentPolicy::Block(size) => (0..c.len())
            .step_by(size)
            .map(|start| (start, (start + size).min(c.len())))
            .collect(),
    };
    let docs: Vec<_> = spans
        .into_iter()
        .map(|(s, e)| bag(c.lines[s..e].iter().flatten().map(String::as_str)))
        .filter(|d| !d.is_empty())
        .collect();
    if docs.is_empty() {
        return Err(Error::EmptyCorpus(format!("{}/{}", c.lang, c.domain)));
    }
    Ok(DocumentSet {
        docs,
        lang: c.lang.clone(),
        domain: c.domain.clone(),
    })
}
