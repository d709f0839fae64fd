//! Built-in vocabulary IRIs.

use std::sync::LazyLock;

use super::term::Iri;

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";

macro_rules! term {
    ($name:ident, $ns:ident, $local:literal) => {
        pub static $name: LazyLock<Iri> = LazyLock::new(|| Iri::new_unchecked(&format!("{}{}", $ns, $local)));
    };
}

term!(RDF_TYPE, RDF, "type");
term!(RDF_PROPERTY, RDF, "Property");
term!(RDF_LANG_STRING, RDF, "langString");
term!(RDFS_CLASS, RDFS, "Class");
term!(RDFS_LABEL, RDFS, "label");
term!(RDFS_COMMENT, RDFS, "comment");
term!(RDFS_DOMAIN, RDFS, "domain");
term!(RDFS_RANGE, RDFS, "range");
term!(RDFS_DATATYPE, RDFS, "Datatype");
term!(OWL_THING, OWL, "Thing");
term!(OWL_CLASS, OWL, "Class");
term!(OWL_OBJECT_PROPERTY, OWL, "ObjectProperty");
term!(OWL_DATATYPE_PROPERTY, OWL, "DatatypeProperty");
term!(OWL_ANNOTATION_PROPERTY, OWL, "AnnotationProperty");
term!(OWL_FUNCTIONAL_PROPERTY, OWL, "FunctionalProperty");
term!(OWL_ONTOLOGY, OWL, "Ontology");
term!(XSD_INT, XSD, "int");
term!(XSD_FLOAT, XSD, "float");
term!(XSD_BOOLEAN, XSD, "boolean");
term!(XSD_STRING, XSD, "string");
term!(XSD_INTEGER, XSD, "integer");
term!(XSD_DECIMAL, XSD, "decimal");
term!(XSD_DOUBLE, XSD, "double");

/// Prefixes every graph knows about.
pub fn well_known_prefixes() -> [(&'static str, &'static str); 4] {
    [("rdf", RDF), ("rdfs", RDFS), ("xsd", XSD), ("owl", OWL)]
}
