//! Spreadsheet-style RDF data entry.
//!
//! Each named sheet is a class, each row header an instance of it, each
//! column header a property with the sheet's class as domain, and each body
//! cell an assertion. Every edit is turned into the exact set of triples it
//! adds and removes.

pub mod mapping;
pub mod metrics;
pub mod rdf;

pub use mapping::{EditOp, TripleDelta, Workbook};
pub use rdf::{Graph, Iri, Literal, Node, Triple};
