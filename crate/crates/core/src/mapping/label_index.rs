//! Label lookup for resolving typed text to resources and for autocomplete.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::rdf::{vocab, Iri, Literal, Triple};

/// `(label, language) → resources`, plus a case-folded map for prefix
/// search. Literals without a language tag are stored under `""`.
#[derive(Debug, Clone, Default)]
pub struct LabelIndex {
    exact: HashMap<(String, String), BTreeSet<Iri>>,
    folded: BTreeMap<String, BTreeMap<(String, Iri), usize>>,
}

fn fold(s: &str) -> String {
    s.to_lowercase()
}

/// The `(label, language)` key of a label triple, if it is one.
pub(crate) fn label_key(t: &Triple) -> Option<(&str, &str)> {
    if t.predicate != *vocab::RDFS_LABEL {
        return None;
    }
    let lit: &Literal = t.object.as_literal()?;
    Some((lit.lexical(), lit.language().unwrap_or("")))
}

impl LabelIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: &str, language: &str, iri: &Iri) {
        let fresh = self
            .exact
            .entry((label.to_string(), language.to_string()))
            .or_default()
            .insert(iri.clone());
        if fresh {
            *self
                .folded
                .entry(fold(label))
                .or_default()
                .entry((label.to_string(), iri.clone()))
                .or_default() += 1;
        }
    }

    pub fn remove(&mut self, label: &str, language: &str, iri: &Iri) {
        let key = (label.to_string(), language.to_string());
        let Some(set) = self.exact.get_mut(&key) else {
            return;
        };
        if !set.remove(iri) {
            return;
        }
        if set.is_empty() {
            self.exact.remove(&key);
        }
        let folded = fold(label);
        if let Some(entries) = self.folded.get_mut(&folded) {
            let k = (label.to_string(), iri.clone());
            if let Some(n) = entries.get_mut(&k) {
                *n -= 1;
                if *n == 0 {
                    entries.remove(&k);
                }
            }
            if entries.is_empty() {
                self.folded.remove(&folded);
            }
        }
    }

    /// Keeps the index in step with a graph mutation.
    pub fn observe(&mut self, t: &Triple, inserted: bool) {
        if let Some((label, lang)) = label_key(t) {
            if inserted {
                self.insert(label, lang, &t.subject);
            } else {
                self.remove(label, lang, &t.subject);
            }
        }
    }

    /// Exact, case-sensitive lookup.
    pub fn lookup(&self, label: &str, language: &str) -> Vec<Iri> {
        self.exact
            .get(&(label.to_string(), language.to_string()))
            .map(|s| s.iter().cloned().collect())
            .unwrap_or_default()
    }

    /// Case-insensitive prefix matches ordered by `(label, iri)`.
    pub fn prefix(&self, prefix: &str, limit: usize) -> Vec<(String, Iri)> {
        let folded = fold(prefix);
        let mut hits: Vec<(String, Iri)> = self
            .folded
            .range(folded.clone()..)
            .take_while(|(k, _)| k.starts_with(&folded))
            .flat_map(|(_, entries)| entries.keys().cloned())
            .collect();
        hits.sort();
        hits.truncate(limit);
        hits
    }

    pub fn len(&self) -> usize {
        self.exact.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.exact.is_empty()
    }

    /// All `(label, language, iri)` entries, for consistency checks.
    pub fn entries(&self) -> BTreeSet<(String, String, Iri)> {
        self.exact
            .iter()
            .flat_map(|((l, lang), iris)| iris.iter().map(move |i| (l.clone(), lang.clone(), i.clone())))
            .collect()
    }
}
