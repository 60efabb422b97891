use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use crate::embedding::Vocabulary;
use crate::error::{Error, Result};

/// Ordered set of `(source, target)` word pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    pairs: Vec<(String, String)>,
    seen: HashSet<(String, String)>,
}

impl Dictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a pair unless it is already present. Returns whether it was added.
    pub fn insert(&mut self, source: impl Into<String>, target: impl Into<String>) -> bool {
        let pair = (source.into(), target.into());
        if self.seen.contains(&pair) {
            return false;
        }
        self.seen.insert(pair.clone());
        self.pairs.push(pair);
        true
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, source: &str, target: &str) -> bool {
        self.seen.contains(&(source.to_string(), target.to_string()))
    }

    /// Unique source words, each with its set of gold translations, in order
    /// of first appearance.
    pub fn translation_sets(&self) -> Vec<(&str, BTreeSet<&str>)> {
        let mut order = Vec::new();
        let mut sets: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for (s, t) in &self.pairs {
            sets.entry(s.as_str())
                .or_insert_with(|| {
                    order.push(s.as_str());
                    BTreeSet::new()
                })
                .insert(t.as_str());
        }
        order
            .into_iter()
            .map(|s| (s, sets.remove(s).expect("inserted above")))
            .collect()
    }

    pub fn to_text(&self) -> String {
        self.pairs.iter().map(|(s, t)| format!("{s} {t}\n")).collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

impl<S: Into<String>, T: Into<String>> FromIterator<(S, T)> for Dictionary {
    fn from_iter<I: IntoIterator<Item = (S, T)>>(iter: I) -> Self {
        let mut d = Dictionary::new();
        for (s, t) in iter {
            d.insert(s, t);
        }
        d
    }
}

/// Parses `source<whitespace>target` lines; duplicates are dropped.
pub fn parse_dictionary(text: &str) -> Result<Dictionary> {
    let mut d = Dictionary::new();
    for (i, line) in text.lines().enumerate() {
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (None, _, _) => continue,
            (Some(s), Some(t), None) => {
                d.insert(s, t);
            }
            _ => {
                return Err(Error::Format {
                    line: i + 1,
                    msg: format!("expected two fields in {line:?}"),
                })
            }
        }
    }
    Ok(d)
}

pub fn load_dictionary(path: impl AsRef<Path>) -> Result<Dictionary> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dictionary(&text)
}

/// Pairs every string present in both vocabularies with itself, most frequent
/// first (by summed count, ties by string).
pub fn extract_identical_seed(vs: &Vocabulary, vt: &Vocabulary) -> Dictionary {
    let mut shared: Vec<(&str, u64)> = vs
        .tokens()
        .iter()
        .zip(vs.counts())
        .filter_map(|(t, &n)| vt.count(t).map(|m| (t.as_str(), n + m)))
        .collect();
    shared.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    shared.into_iter().map(|(t, _)| (t, t)).collect()
}
