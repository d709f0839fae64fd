//! Conversions between core types and the JSON values handed to Python.

use rdfsheet_core::mapping::{parse_cell_input, CellIntent, MappingError};
use rdfsheet_core::metrics::MetricsReport;
use rdfsheet_core::rdf::{RdfFormat, SyntaxError};
use serde_json::{json, Value};

pub fn format_from_name(name: &str) -> Result<RdfFormat, String> {
    name.parse::<RdfFormat>()
}

/// How a cell's text would be stored, as a tagged object.
pub fn cell_json(text: &str, language: &str) -> Result<Value, MappingError> {
    Ok(match parse_cell_input(text, language)? {
        CellIntent::Literal(l) => json!({
            "kind": "literal",
            "lexical": l.lexical(),
            "datatype": l.datatype().as_str(),
            "language": l.language(),
        }),
        CellIntent::DirectIri(iri) => json!({ "kind": "iri", "iri": iri.as_str() }),
        CellIntent::Label(label) => json!({ "kind": "label", "label": label }),
    })
}

pub fn metrics_json(document: &str, format: RdfFormat) -> Result<Value, SyntaxError> {
    let graph = format.parse(document)?;
    Ok(serde_json::from_str(&MetricsReport::compute(&graph).to_json()).expect("report is valid json"))
}
