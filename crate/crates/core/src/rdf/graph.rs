//! In-memory triple set with subject, predicate and object indexes.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::term::{Iri, Node, Triple};

type Index<K> = HashMap<K, HashSet<Triple>>;

/// A mutable set of triples plus a prefix table.
///
/// Equality compares triple sets only; the prefix table is presentation
/// detail.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    triples: HashSet<Triple>,
    by_subject: Index<Iri>,
    by_predicate: Index<Iri>,
    by_object: Index<Node>,
    namespaces: BTreeMap<String, Iri>,
}

fn index_insert<K: std::hash::Hash + Eq>(index: &mut Index<K>, key: K, t: &Triple) {
    index.entry(key).or_default().insert(t.clone());
}

fn index_remove<K: std::hash::Hash + Eq>(index: &mut Index<K>, key: &K, t: &Triple) {
    if let Some(set) = index.get_mut(key) {
        set.remove(t);
        if set.is_empty() {
            index.remove(key);
        }
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.contains(t)
    }

    /// Returns `true` if the triple was not already present.
    pub fn insert(&mut self, t: Triple) -> bool {
        if self.triples.contains(&t) {
            return false;
        }
        index_insert(&mut self.by_subject, t.subject.clone(), &t);
        index_insert(&mut self.by_predicate, t.predicate.clone(), &t);
        index_insert(&mut self.by_object, t.object.clone(), &t);
        self.triples.insert(t);
        true
    }

    /// Returns `true` if the triple was present.
    pub fn remove(&mut self, t: &Triple) -> bool {
        if !self.triples.remove(t) {
            return false;
        }
        index_remove(&mut self.by_subject, &t.subject, t);
        index_remove(&mut self.by_predicate, &t.predicate, t);
        index_remove(&mut self.by_object, &t.object, t);
        true
    }

    /// Inserts every triple of `other` and adopts its prefixes. Returns the
    /// number of newly inserted triples.
    pub fn merge(&mut self, other: &Graph) -> usize {
        for (p, ns) in &other.namespaces {
            self.namespaces.entry(p.clone()).or_insert_with(|| ns.clone());
        }
        other.triples.iter().filter(|t| self.insert((*t).clone())).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    /// Unordered pattern lookup using the most selective bound index.
    pub fn find<'a>(
        &'a self,
        s: Option<&Iri>,
        p: Option<&Iri>,
        o: Option<&Node>,
    ) -> Box<dyn Iterator<Item = &'a Triple> + 'a> {
        let empty = || -> Box<dyn Iterator<Item = &'a Triple> + 'a> { Box::new(std::iter::empty()) };
        let mut candidates: Option<&'a HashSet<Triple>> = None;
        if let Some(s) = s {
            match self.by_subject.get(s) {
                Some(set) => candidates = Some(set),
                None => return empty(),
            }
        }
        if let Some(o) = o {
            match self.by_object.get(o) {
                Some(set) if candidates.is_none_or(|c| set.len() < c.len()) => candidates = Some(set),
                Some(_) => {}
                None => return empty(),
            }
        }
        if let Some(p) = p {
            match self.by_predicate.get(p) {
                Some(set) if candidates.is_none_or(|c| set.len() < c.len()) => candidates = Some(set),
                Some(_) => {}
                None => return empty(),
            }
        }
        let source: Box<dyn Iterator<Item = &'a Triple> + 'a> = match candidates {
            Some(set) => Box::new(set.iter()),
            None => Box::new(self.triples.iter()),
        };
        let (s, p, o) = (s.cloned(), p.cloned(), o.cloned());
        Box::new(source.filter(move |t| {
            s.as_ref().is_none_or(|s| &t.subject == s)
                && p.as_ref().is_none_or(|p| &t.predicate == p)
                && o.as_ref().is_none_or(|o| &t.object == o)
        }))
    }

    /// Triples matching every bound position, ordered by their N-Triples
    /// rendering.
    pub fn match_pattern(&self, s: Option<&Iri>, p: Option<&Iri>, o: Option<&Node>) -> Vec<Triple> {
        sorted(self.find(s, p, o))
    }

    /// All triples ordered by their N-Triples rendering.
    pub fn sorted_triples(&self) -> Vec<Triple> {
        sorted(self.triples.iter())
    }

    pub fn objects<'a>(&'a self, s: &Iri, p: &Iri) -> impl Iterator<Item = &'a Node> + 'a {
        self.find(Some(s), Some(p), None).map(|t| &t.object)
    }

    pub fn subjects<'a>(&'a self, p: &Iri, o: &Node) -> impl Iterator<Item = &'a Iri> + 'a {
        self.find(None, Some(p), Some(o)).map(|t| &t.subject)
    }

    pub fn has_subject(&self, s: &Iri) -> bool {
        self.by_subject.contains_key(s)
    }

    pub fn namespaces(&self) -> &BTreeMap<String, Iri> {
        &self.namespaces
    }

    pub fn set_namespace(&mut self, prefix: impl Into<String>, ns: Iri) {
        self.namespaces.insert(prefix.into(), ns);
    }
}

pub(crate) fn sorted<'a>(triples: impl Iterator<Item = &'a Triple>) -> Vec<Triple> {
    let mut keyed: Vec<(String, &Triple)> = triples.map(|t| (t.to_string(), t)).collect();
    keyed.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    keyed.into_iter().map(|(_, t)| t.clone()).collect()
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.triples == other.triples
    }
}

impl Eq for Graph {}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        for t in iter {
            g.insert(t);
        }
        g
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::vocab;
    use crate::rdf::Literal;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://example.org/{s}")).unwrap()
    }

    fn label(s: &str) -> Node {
        Literal::lang_string(s, "en").unwrap().into()
    }

    #[test]
    fn insert_is_idempotent() {
        let mut g = Graph::new();
        let t = Triple::new(iri("99f2"), vocab::RDFS_LABEL.clone(), label("ISWC"));
        assert!(g.insert(t.clone()));
        assert!(!g.insert(t));
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn remove_reports_presence() {
        let mut g = Graph::new();
        let t = Triple::new(iri("a"), vocab::RDFS_LABEL.clone(), label("A"));
        assert!(!g.remove(&t));
        g.insert(t.clone());
        assert!(g.remove(&t));
        assert!(g.is_empty());
        assert!(!g.has_subject(&iri("a")));
        g.insert(t.clone());
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn indexes_follow_removals() {
        let mut g = Graph::new();
        let a = Triple::new(iri("a"), vocab::RDF_TYPE.clone(), vocab::OWL_THING.clone());
        let b = Triple::new(iri("b"), vocab::RDF_TYPE.clone(), vocab::OWL_THING.clone());
        g.insert(a.clone());
        g.insert(b.clone());
        g.remove(&a);
        let thing: Node = vocab::OWL_THING.clone().into();
        assert_eq!(g.match_pattern(None, None, Some(&thing)), vec![b.clone()]);
        assert_eq!(g.match_pattern(Some(&iri("a")), None, None), vec![]);
        assert_eq!(g.match_pattern(None, Some(&vocab::RDF_TYPE), None), vec![b]);
    }

    #[test]
    fn empty_match() {
        assert!(Graph::new().match_pattern(None, None, None).is_empty());
    }
}
