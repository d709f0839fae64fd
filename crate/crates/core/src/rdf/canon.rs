//! Deterministic renaming of generated IRIs so graphs built by independent
//! runs can be compared bytewise.
//!
//! Every IRI under the generated namespace is rewritten to
//! `<ns>id/<label>` where `<label>` is its (smallest) `rdfs:label`,
//! percent-encoded. When several generated IRIs share a label, a suffix
//! derived from the node's `rdf:type` set tells them apart.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::graph::Graph;
use super::term::{Iri, Node, Triple};
use super::vocab;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CanonError {
    #[error("generated IRI {0} has no rdfs:label")]
    Unlabeled(Iri),
    #[error("generated IRIs {0} and {1} share label and types")]
    Ambiguous(Iri, Iri),
}

fn percent_encode(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'_' | b'~') {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn canonicalize(graph: &Graph, generated_ns: &Iri) -> Result<Graph, CanonError> {
    let ns = generated_ns.as_str();
    let is_generated = |i: &Iri| i.as_str().starts_with(ns) && i.as_str().len() > ns.len();

    let mut generated: BTreeSet<Iri> = BTreeSet::new();
    for t in graph.iter() {
        for i in [Some(&t.subject), Some(&t.predicate), t.object.as_iri()]
            .into_iter()
            .flatten()
        {
            if is_generated(i) {
                generated.insert(i.clone());
            }
        }
    }
    if generated.is_empty() {
        return Ok(graph.clone());
    }

    let mut base: HashMap<Iri, String> = HashMap::new();
    for g in &generated {
        let label = graph
            .objects(g, &vocab::RDFS_LABEL)
            .filter_map(Node::as_literal)
            .map(|l| l.lexical())
            .min()
            .ok_or_else(|| CanonError::Unlabeled(g.clone()))?;
        base.insert(g.clone(), percent_encode(label));
    }

    let type_key = |g: &Iri| -> String {
        let types: BTreeSet<String> = graph
            .objects(g, &vocab::RDF_TYPE)
            .filter_map(Node::as_iri)
            .map(|t| match base.get(t) {
                Some(b) => format!("~{b}"),
                None => t.as_str().to_string(),
            })
            .collect();
        types.into_iter().collect::<Vec<_>>().join(" ")
    };

    let mut groups: BTreeMap<&str, Vec<&Iri>> = BTreeMap::new();
    for g in &generated {
        groups.entry(base[g].as_str()).or_default().push(g);
    }

    let mut rename: HashMap<Iri, Iri> = HashMap::new();
    for (label, members) in groups {
        if members.len() == 1 {
            rename.insert(members[0].clone(), Iri::new_unchecked(&format!("{ns}id/{label}")));
            continue;
        }
        let mut seen: HashMap<String, &Iri> = HashMap::new();
        for g in members {
            let key = type_key(g);
            if let Some(other) = seen.insert(key.clone(), g) {
                return Err(CanonError::Ambiguous(other.clone(), g.clone()));
            }
            let iri = format!("{ns}id/{label}/{:016x}", fnv1a(&key));
            rename.insert(g.clone(), Iri::new_unchecked(&iri));
        }
    }

    let map = |i: &Iri| rename.get(i).cloned().unwrap_or_else(|| i.clone());
    let mut out: Graph = graph
        .iter()
        .map(|t| {
            Triple::new(
                map(&t.subject),
                map(&t.predicate),
                match &t.object {
                    Node::Iri(i) => Node::Iri(map(i)),
                    lit => lit.clone(),
                },
            )
        })
        .collect();
    for (p, n) in graph.namespaces() {
        out.set_namespace(p.clone(), n.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Literal;

    fn ns() -> Iri {
        Iri::new("http://gen.example/").unwrap()
    }

    fn gen(s: &str) -> Iri {
        Iri::new(format!("http://gen.example/{s}")).unwrap()
    }

    fn label(s: &str) -> Literal {
        Literal::lang_string(s, "en").unwrap()
    }

    #[test]
    fn no_generated_iris_is_identity() {
        let mut g = Graph::new();
        g.insert(Triple::new(
            Iri::new("http://other/a").unwrap(),
            vocab::RDFS_LABEL.clone(),
            label("A"),
        ));
        assert_eq!(canonicalize(&g, &ns()).unwrap(), g);
    }

    #[test]
    fn unlabeled_generated_iris_fail() {
        let mut g = Graph::new();
        g.insert(Triple::new(gen("1"), vocab::RDF_TYPE.clone(), vocab::OWL_THING.clone()));
        g.insert(Triple::new(gen("2"), vocab::RDF_TYPE.clone(), vocab::OWL_THING.clone()));
        assert!(matches!(canonicalize(&g, &ns()), Err(CanonError::Unlabeled(_))));
    }

    #[test]
    fn same_label_different_types_are_distinguished() {
        let mut g = Graph::new();
        g.insert(Triple::new(gen("1"), vocab::RDFS_LABEL.clone(), label("HCI")));
        g.insert(Triple::new(gen("2"), vocab::RDFS_LABEL.clone(), label("HCI")));
        g.insert(Triple::new(
            gen("2"),
            vocab::RDF_TYPE.clone(),
            vocab::RDFS_CLASS.clone(),
        ));
        let c = canonicalize(&g, &ns()).unwrap();
        assert_eq!(c.len(), 3);
        let subjects: BTreeSet<_> = c.iter().map(|t| t.subject.clone()).collect();
        assert_eq!(subjects.len(), 2);
        assert!(subjects
            .iter()
            .all(|s| s.as_str().starts_with("http://gen.example/id/HCI/")));
        assert_eq!(canonicalize(&c, &ns()).unwrap(), c);
    }

    #[test]
    fn same_label_same_types_is_ambiguous() {
        let mut g = Graph::new();
        g.insert(Triple::new(gen("1"), vocab::RDFS_LABEL.clone(), label("HCI")));
        g.insert(Triple::new(gen("2"), vocab::RDFS_LABEL.clone(), label("HCI")));
        assert!(matches!(canonicalize(&g, &ns()), Err(CanonError::Ambiguous(_, _))));
    }

    #[test]
    fn labels_are_percent_encoded() {
        let mut g = Graph::new();
        g.insert(Triple::new(gen("x"), vocab::RDFS_LABEL.clone(), label("related to")));
        let c = canonicalize(&g, &ns()).unwrap();
        let t = c.iter().next().unwrap();
        assert_eq!(t.subject.as_str(), "http://gen.example/id/related%20to");
    }
}
