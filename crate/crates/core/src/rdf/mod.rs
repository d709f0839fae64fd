//! RDF data model, triple storage and text formats.

mod canon;
mod graph;
pub mod ntriples;
mod syntax;
mod term;
pub mod turtle;
pub mod vocab;

pub use canon::{canonicalize, CanonError};
pub(crate) use graph::sorted as sorted_triples;
pub use graph::Graph;
pub use syntax::SyntaxError;
pub(crate) use term::is_forbidden_iri_char;
pub use term::{is_xsd_boolean, is_xsd_float, is_xsd_int, Iri, Literal, Node, TermError, Triple};

use serde::{Deserialize, Serialize};

/// Supported serialization formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RdfFormat {
    #[serde(alias = "nt")]
    NTriples,
    #[serde(alias = "ttl")]
    Turtle,
}

impl RdfFormat {
    pub fn parse(self, text: &str) -> Result<Graph, SyntaxError> {
        match self {
            RdfFormat::NTriples => ntriples::parse(text),
            RdfFormat::Turtle => turtle::parse(text),
        }
    }

    pub fn serialize(self, graph: &Graph) -> String {
        match self {
            RdfFormat::NTriples => ntriples::serialize(graph),
            RdfFormat::Turtle => turtle::serialize(graph),
        }
    }

    pub fn media_type(self) -> &'static str {
        match self {
            RdfFormat::NTriples => "application/n-triples",
            RdfFormat::Turtle => "text/turtle",
        }
    }

    /// Guesses the format from a file extension.
    pub fn from_extension(ext: &str) -> Option<Self> {
        match ext.to_ascii_lowercase().as_str() {
            "nt" => Some(RdfFormat::NTriples),
            "ttl" => Some(RdfFormat::Turtle),
            _ => None,
        }
    }
}

impl std::str::FromStr for RdfFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ntriples" | "n-triples" | "nt" => Ok(RdfFormat::NTriples),
            "turtle" | "ttl" => Ok(RdfFormat::Turtle),
            other => Err(format!("unknown format {other:?} (expected ntriples or turtle)")),
        }
    }
}
