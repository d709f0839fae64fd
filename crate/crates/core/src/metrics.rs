//! Ontology quality metrics over a graph.
//!
//! Ratios are exact; rounding happens only when they are displayed.

use std::collections::HashSet;
use std::fmt;

use num_rational::Ratio;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::rdf::{vocab, Graph, Iri, Node};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("{0} is undefined for an empty graph")]
    EmptyGraph(&'static str),
    #[error("{0} is undefined for a graph without classes")]
    NoClasses(&'static str),
}

fn is_class_type(o: &Iri) -> bool {
    *o == *vocab::RDFS_CLASS || *o == *vocab::OWL_CLASS
}

fn is_property_type(o: &Iri) -> bool {
    [
        &*vocab::RDF_PROPERTY,
        &*vocab::OWL_OBJECT_PROPERTY,
        &*vocab::OWL_DATATYPE_PROPERTY,
        &*vocab::OWL_ANNOTATION_PROPERTY,
        &*vocab::OWL_FUNCTIONAL_PROPERTY,
    ]
    .contains(&o)
}

fn is_meta_type(o: &Iri) -> bool {
    is_class_type(o) || is_property_type(o) || *o == *vocab::RDFS_DATATYPE || *o == *vocab::OWL_ONTOLOGY
}

/// Classes, properties and instances of a graph.
struct Census<'a> {
    classes: HashSet<&'a Iri>,
    properties: HashSet<&'a Iri>,
    instances: HashSet<&'a Iri>,
}

impl<'a> Census<'a> {
    fn of(g: &'a Graph) -> Self {
        let mut classes = HashSet::new();
        let mut properties = HashSet::new();
        let mut typed = Vec::new();
        for t in g.find(None, Some(&vocab::RDF_TYPE), None) {
            let Node::Iri(o) = &t.object else { continue };
            if is_class_type(o) {
                classes.insert(&t.subject);
            } else if is_property_type(o) {
                properties.insert(&t.subject);
            } else if !is_meta_type(o) {
                typed.push(&t.subject);
            }
        }
        let instances = typed
            .into_iter()
            .filter(|s| !classes.contains(s) && !properties.contains(s))
            .collect();
        Census {
            classes,
            properties,
            instances,
        }
    }

    fn instance_links(&self, g: &Graph) -> usize {
        g.iter()
            .filter(|t| {
                self.instances.contains(&t.subject) && t.object.as_iri().is_some_and(|o| self.instances.contains(o))
            })
            .count()
    }

    fn class_attributes(&self, g: &Graph) -> usize {
        g.iter()
            .filter(|t| self.classes.contains(&t.subject) && t.object.as_literal().is_some())
            .count()
    }

    fn populated_classes(&self, g: &Graph) -> usize {
        self.classes
            .iter()
            .filter(|c| {
                let c = Node::Iri((**c).clone());
                g.subjects(&vocab::RDF_TYPE, &c).any(|s| self.instances.contains(s))
            })
            .count()
    }
}

fn ratio(n: usize, d: usize) -> Ratio<u64> {
    Ratio::new(n as u64, d as u64)
}

/// `(statements, classes, properties, instances)`.
pub fn count_summary(g: &Graph) -> (usize, usize, usize, usize) {
    let c = Census::of(g);
    (g.len(), c.classes.len(), c.properties.len(), c.instances.len())
}

/// Instance-to-instance triples per statement.
pub fn relationship_richness(g: &Graph) -> Result<Ratio<u64>, MetricsError> {
    if g.is_empty() {
        return Err(MetricsError::EmptyGraph("relationship richness"));
    }
    Ok(ratio(Census::of(g).instance_links(g), g.len()))
}

/// Literal-valued triples on classes per class.
pub fn attribute_richness(g: &Graph) -> Result<Ratio<u64>, MetricsError> {
    let c = Census::of(g);
    if c.classes.is_empty() {
        return Err(MetricsError::NoClasses("attribute richness"));
    }
    Ok(ratio(c.class_attributes(g), c.classes.len()))
}

/// Share of classes with at least one instance.
pub fn class_richness(g: &Graph) -> Result<Ratio<u64>, MetricsError> {
    let c = Census::of(g);
    if c.classes.is_empty() {
        return Err(MetricsError::NoClasses("class richness"));
    }
    Ok(ratio(c.populated_classes(g), c.classes.len()))
}

/// Instances per class.
pub fn average_population(g: &Graph) -> Result<Ratio<u64>, MetricsError> {
    let c = Census::of(g);
    if c.classes.is_empty() {
        return Err(MetricsError::NoClasses("average population"));
    }
    Ok(ratio(c.instances.len(), c.classes.len()))
}

/// Renders a ratio with three decimals, rounding half up.
pub fn format_ratio(r: &Ratio<u64>) -> String {
    let n = u128::from(*r.numer()) * 1000;
    let d = u128::from(*r.denom());
    let scaled = (2 * n + d) / (2 * d);
    format!("{}.{:03}", scaled / 1000, scaled % 1000)
}

/// All eight metrics. Ratios undefined for the graph are `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsReport {
    pub statements: usize,
    pub classes: usize,
    pub properties: usize,
    pub instances: usize,
    pub relationship_richness: Option<Ratio<u64>>,
    pub attribute_richness: Option<Ratio<u64>>,
    pub class_richness: Option<Ratio<u64>>,
    pub average_population: Option<Ratio<u64>>,
}

impl MetricsReport {
    pub fn compute(g: &Graph) -> Self {
        let c = Census::of(g);
        let per_class = |n: usize| (!c.classes.is_empty()).then(|| ratio(n, c.classes.len()));
        MetricsReport {
            statements: g.len(),
            classes: c.classes.len(),
            properties: c.properties.len(),
            instances: c.instances.len(),
            relationship_richness: (!g.is_empty()).then(|| ratio(c.instance_links(g), g.len())),
            attribute_richness: per_class(c.class_attributes(g)),
            class_richness: per_class(c.populated_classes(g)),
            average_population: per_class(c.instances.len()),
        }
    }

    fn rows(&self) -> [(&'static str, String); 8] {
        let r = |v: &Option<Ratio<u64>>| v.as_ref().map_or_else(|| "n/a".to_string(), format_ratio);
        [
            ("statements", self.statements.to_string()),
            ("classes", self.classes.to_string()),
            ("properties", self.properties.to_string()),
            ("instances", self.instances.to_string()),
            ("relationship_richness", r(&self.relationship_richness)),
            ("attribute_richness", r(&self.attribute_richness)),
            ("class_richness", r(&self.class_richness)),
            ("average_population", r(&self.average_population)),
        ]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Aligned two-column table.
impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = self.rows();
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let value_width = rows.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
        for (k, v) in rows {
            writeln!(f, "{k:<width$}  {v:>value_width$}")?;
        }
        Ok(())
    }
}

/// Counts as integers; ratios as numbers rounded to three decimals, or null.
impl Serialize for MetricsReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MetricsReport", 8)?;
        st.serialize_field("statements", &self.statements)?;
        st.serialize_field("classes", &self.classes)?;
        st.serialize_field("properties", &self.properties)?;
        st.serialize_field("instances", &self.instances)?;
        let num = |v: &Option<Ratio<u64>>| -> Option<serde_json::Number> {
            v.as_ref()
                .map(|r| format_ratio(r).parse().expect("decimal renders as a JSON number"))
        };
        st.serialize_field("relationship_richness", &num(&self.relationship_richness))?;
        st.serialize_field("attribute_richness", &num(&self.attribute_richness))?;
        st.serialize_field("class_richness", &num(&self.class_richness))?;
        st.serialize_field("average_population", &num(&self.average_population))?;
        st.end()
    }
}
