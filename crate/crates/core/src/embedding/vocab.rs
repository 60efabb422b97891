use std::collections::HashMap;

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Token inventory ordered by descending frequency, ties broken lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds a vocabulary from `(token, count)` pairs, imposing the canonical order.
    pub fn from_counts(counts: impl IntoIterator<Item = (String, u64)>) -> Self {
        let mut entries: Vec<(String, u64)> = counts.into_iter().collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let (tokens, counts): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary {
            tokens,
            counts,
            index,
        }
    }

    /// Treats the given order as the frequency ranking; counts are synthesized as
    /// `len - position` so that rank order is preserved.
    pub fn from_ranked(tokens: Vec<String>) -> Result<Self> {
        let n = tokens.len() as u64;
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::Format {
                    line: i + 2,
                    msg: format!("duplicate token {t:?}"),
                });
            }
        }
        let counts = (0..n).map(|i| n - i).collect();
        Ok(Vocabulary {
            tokens,
            counts,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: usize) -> &str {
        &self.tokens[id]
    }

    pub fn count(&self, token: &str) -> Option<u64> {
        self.id(token).map(|i| self.counts[i])
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Counts every token of `c` and keeps those seen at least `min_count` times.
pub fn build_vocab(c: &Corpus, min_count: u64) -> Result<Vocabulary> {
    if min_count == 0 {
        return Err(Error::InvalidParam("min_count must be at least 1".into()));
    }
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for tok in c.lines.iter().flatten() {
        *counts.entry(tok.as_str()).or_insert(0) += 1;
    }
    let vocab = Vocabulary::from_counts(
        counts
            .into_iter()
            .filter(|&(_, n)| n >= min_count)
            .map(|(t, n)| (t.to_string(), n)),
    );
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary { min_count });
    }
    Ok(vocab)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_order() {
        let c = Corpus::from_lines(&["a a b"], "en", "t");
        let v = build_vocab(&c, 1).unwrap();
        assert_eq!(v.tokens(), ["a", "b"]);
        assert_eq!(v.counts(), [2, 1]);
        let v2 = build_vocab(&c, 2).unwrap();
        assert_eq!(v2.tokens(), ["a"]);
    }

    #[test]
    fn ties_are_lexicographic() {
        let c = Corpus::from_lines(&["z y x y z x w"], "en", "t");
        let v = build_vocab(&c, 1).unwrap();
        assert_eq!(v.tokens(), ["x", "y", "z", "w"]);
        assert_eq!(v.id("w"), Some(3));
    }

    #[test]
    fn empty_vocab_is_an_error() {
        let c = Corpus::from_lines(&["a b c"], "en", "t");
        assert!(matches!(
            build_vocab(&c, 5),
            Err(Error::EmptyVocabulary { min_count: 5 })
        ));
    }

    #[test]
    fn ranked_rejects_duplicates() {
        assert!(Vocabulary::from_ranked(vec!["a".into(), "a".into()]).is_err());
        let v = Vocabulary::from_ranked(vec!["b".into(), "a".into()]).unwrap();
        assert_eq!(v.counts(), [2, 1]);
    }
}
