//! Edit operations, cell bindings and triple deltas.

use serde::{Deserialize, Serialize};

use crate::rdf::{Iri, Literal, Node, RdfFormat, Triple};

/// One user action on a workbook.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditOp {
    NameSheet {
        sheet: u32,
        name: String,
    },
    SetRowHeader {
        sheet: u32,
        row: u32,
        text: String,
    },
    SetColumnHeader {
        sheet: u32,
        col: u32,
        text: String,
    },
    SetCell {
        sheet: u32,
        row: u32,
        col: u32,
        text: String,
    },
    /// Binds a cell to an existing resource (autocomplete pick or paste).
    PasteReference {
        sheet: u32,
        row: u32,
        col: u32,
        iri: Iri,
    },
    SetComment {
        iri: Iri,
        text: String,
    },
    /// Toggles label reuse for future resolutions.
    SetReuseByLabel {
        enabled: bool,
    },
    /// Merges an RDF document. With `vocabulary` set, its prefixes are
    /// adopted as well.
    Import {
        format: RdfFormat,
        document: String,
        #[serde(default)]
        vocabulary: bool,
    },
}

impl EditOp {
    pub fn sheet(&self) -> Option<u32> {
        match self {
            EditOp::NameSheet { sheet, .. }
            | EditOp::SetRowHeader { sheet, .. }
            | EditOp::SetColumnHeader { sheet, .. }
            | EditOp::SetCell { sheet, .. }
            | EditOp::PasteReference { sheet, .. } => Some(*sheet),
            _ => None,
        }
    }
}

/// Whether a binding minted its resource or points at one that existed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    #[default]
    CreatedHere,
    Referenced,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum CellValue {
    ResourceRef(Iri),
    LiteralVal(Literal),
    DirectIri(Iri),
}

impl CellValue {
    pub fn to_node(&self) -> Node {
        match self {
            CellValue::ResourceRef(i) | CellValue::DirectIri(i) => Node::Iri(i.clone()),
            CellValue::LiteralVal(l) => Node::Literal(l.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeaderBinding {
    pub raw_text: String,
    pub node: Option<Iri>,
    pub origin: Origin,
}

/// A body cell. `value` stays empty until both headers exist and the text
/// has been resolved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellBinding {
    pub raw_text: String,
    pub value: Option<CellValue>,
    pub origin: Origin,
}

impl CellBinding {
    pub fn is_pending(&self) -> bool {
        self.value.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MintedIri {
    pub iri: Iri,
    pub label: String,
}

/// The exact triples one edit added and removed, both sorted in N-Triples
/// order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleDelta {
    pub added: Vec<Triple>,
    pub removed: Vec<Triple>,
    pub minted: Vec<MintedIri>,
}

impl TripleDelta {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty()
    }
}
