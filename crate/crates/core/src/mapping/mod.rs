//! Spreadsheet edits and their translation into triples.

mod cell;
mod edit;
mod ids;
mod label_index;
pub mod log;
mod workbook;

use crate::rdf::{CanonError, Iri, SyntaxError, TermError};

pub use cell::{parse_cell_input, CellIntent};
pub use edit::{CellBinding, CellValue, EditOp, HeaderBinding, MintedIri, Origin, TripleDelta};
pub use ids::{IdSource, RandomIds, SeededIds};
pub use label_index::LabelIndex;
pub use workbook::{
    Sheet, Suggestion, Workbook, WorkbookOptions, WorkbookState, DEFAULT_GENERATED_NS, MAX_COLUMNS, MAX_ROWS,
    MAX_SHEETS,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MappingError {
    #[error("empty input")]
    EmptyInput,
    #[error("sheet {0} does not exist")]
    UnknownSheet(u32),
    #[error("coordinates out of range (row {row:?}, column {col:?})")]
    InvalidCoordinates { row: Option<u32>, col: Option<u32> },
    #[error("label {label:?} matches {} resources", candidates.len())]
    Ambiguous { label: String, candidates: Vec<Iri> },
    #[error("{0} is not mentioned in the graph")]
    UnknownResource(Iri),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Canon(#[from] CanonError),
    #[error("replay of revision {revision} minted {actual} IRIs, log recorded {expected}")]
    ReplayMismatch {
        revision: u64,
        expected: usize,
        actual: usize,
    },
    #[error("inconsistent workbook state: {0}")]
    InconsistentState(String),
}
