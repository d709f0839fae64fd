//! The workbook model and the edit-to-triples mapping.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::rdf::{canonicalize, ntriples, vocab, CanonError, Graph, Iri, Literal, Node, RdfFormat, Triple};

use super::cell::{parse_cell_input, CellIntent};
use super::edit::{CellBinding, CellValue, EditOp, HeaderBinding, MintedIri, Origin, TripleDelta};
use super::ids::{IdSource, RandomIds};
use super::label_index::{label_key, LabelIndex};
use super::MappingError;

pub const MAX_SHEETS: u32 = 256;
pub const MAX_ROWS: u32 = 1_048_576;
pub const MAX_COLUMNS: u32 = 16_384;

pub const DEFAULT_GENERATED_NS: &str = "http://rdfsheet.example/resource/";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorkbookOptions {
    pub language: String,
    pub reuse_by_label: bool,
    pub generated_ns: Iri,
}

impl Default for WorkbookOptions {
    fn default() -> Self {
        WorkbookOptions {
            language: "en".into(),
            reuse_by_label: true,
            generated_ns: Iri::new(DEFAULT_GENERATED_NS).expect("valid namespace"),
        }
    }
}

mod cell_entries {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::mapping::edit::CellBinding;

    #[derive(Serialize, Deserialize)]
    struct Entry {
        row: u32,
        col: u32,
        #[serde(flatten)]
        cell: CellBinding,
    }

    pub fn serialize<S: Serializer>(cells: &BTreeMap<(u32, u32), CellBinding>, s: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = cells
            .iter()
            .map(|(&(row, col), cell)| Entry {
                row,
                col,
                cell: cell.clone(),
            })
            .collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(u32, u32), CellBinding>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        Ok(entries.into_iter().map(|e| ((e.row, e.col), e.cell)).collect())
    }
}

/// One sheet: a class, row-header instances, column-header properties and
/// body cells.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sheet {
    pub name: String,
    pub class_iri: Option<Iri>,
    #[serde(default)]
    pub class_origin: Origin,
    pub rows: BTreeMap<u32, HeaderBinding>,
    pub columns: BTreeMap<u32, HeaderBinding>,
    #[serde(with = "cell_entries")]
    pub cells: BTreeMap<(u32, u32), CellBinding>,
}

impl Sheet {
    fn row_node(&self, row: u32) -> Option<&Iri> {
        self.rows.get(&row).and_then(|h| h.node.as_ref())
    }

    fn column_node(&self, col: u32) -> Option<&Iri> {
        self.columns.get(&col).and_then(|h| h.node.as_ref())
    }

    fn cells_in_row(&self, row: u32) -> Vec<u32> {
        self.cells
            .range((row, 0)..=(row, u32::MAX))
            .map(|(&(_, c), _)| c)
            .collect()
    }

    fn cells_in_column(&self, col: u32) -> Vec<u32> {
        self.cells.keys().filter(|(_, c)| *c == col).map(|&(r, _)| r).collect()
    }
}

/// An autocomplete entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suggestion {
    pub label: String,
    pub iri: Iri,
    pub comment: Option<String>,
}

/// Serializable workbook structure. Together with the graph it fully
/// describes a workbook.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkbookState {
    pub id: String,
    pub revision: u64,
    pub options: WorkbookOptions,
    pub sheets: Vec<Sheet>,
    pub namespaces: BTreeMap<String, Iri>,
    /// Range triples the engine asserted and may retract.
    pub owned_ranges: BTreeMap<Iri, Iri>,
    /// Cell assertions that already existed in the graph when first made.
    pub foreign_assertions: BTreeSet<Triple>,
}

#[derive(Debug, Clone, Copy)]
struct Assertion {
    count: usize,
    foreign: bool,
}

#[derive(Debug, Clone, Default)]
struct PropertyStats {
    resources: usize,
    literal_types: BTreeMap<Iri, usize>,
}

impl PropertyStats {
    fn record(&mut self, object: &Node, delta: isize) {
        let slot = match object {
            Node::Iri(_) => &mut self.resources,
            Node::Literal(l) => self.literal_types.entry(l.datatype().clone()).or_default(),
        };
        *slot = slot.checked_add_signed(delta).expect("property statistics underflow");
        self.literal_types.retain(|_, n| *n > 0);
    }

    fn uniform_datatype(&self) -> Option<&Iri> {
        if self.resources == 0 && self.literal_types.len() == 1 {
            self.literal_types.keys().next()
        } else {
            None
        }
    }
}

#[derive(Default)]
struct Tx {
    before: HashMap<Triple, bool>,
    minted: Vec<MintedIri>,
    dirty_properties: BTreeSet<Iri>,
}

enum Prepared {
    Literal(Literal),
    Direct(Iri),
    Existing(Iri),
    Mint(String),
}

/// A spreadsheet bound to a knowledge graph.
pub struct Workbook {
    id: String,
    options: WorkbookOptions,
    sheets: Vec<Sheet>,
    graph: Graph,
    labels: LabelIndex,
    revision: u64,
    ids: Box<dyn IdSource>,
    replay: Option<VecDeque<Iri>>,
    replay_overrun: bool,
    owned_ranges: BTreeMap<Iri, Iri>,
    assertions: HashMap<Triple, Assertion>,
    stats: HashMap<Iri, PropertyStats>,
    tx: Tx,
}

impl std::fmt::Debug for Workbook {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Workbook")
            .field("id", &self.id)
            .field("revision", &self.revision)
            .field("sheets", &self.sheets.len())
            .field("triples", &self.graph.len())
            .finish()
    }
}

impl Workbook {
    pub fn new(id: impl Into<String>, options: WorkbookOptions) -> Result<Self, MappingError> {
        Self::with_id_source(id, options, Box::new(RandomIds))
    }

    pub fn with_id_source(
        id: impl Into<String>,
        options: WorkbookOptions,
        ids: Box<dyn IdSource>,
    ) -> Result<Self, MappingError> {
        Literal::lang_string("", &options.language)?;
        let mut graph = Graph::new();
        graph.set_namespace("gen", options.generated_ns.clone());
        Ok(Workbook {
            id: id.into(),
            options,
            sheets: Vec::new(),
            graph,
            labels: LabelIndex::new(),
            revision: 0,
            ids,
            replay: None,
            replay_overrun: false,
            owned_ranges: BTreeMap::new(),
            assertions: HashMap::new(),
            stats: HashMap::new(),
            tx: Tx::default(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn options(&self) -> &WorkbookOptions {
        &self.options
    }

    pub fn language(&self) -> &str {
        &self.options.language
    }

    pub fn reuse_by_label(&self) -> bool {
        self.options.reuse_by_label
    }

    pub fn generated_ns(&self) -> &Iri {
        &self.options.generated_ns
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn sheets(&self) -> &[Sheet] {
        &self.sheets
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn label_index(&self) -> &LabelIndex {
        &self.labels
    }

    pub fn export(&self, format: RdfFormat) -> String {
        format.serialize(&self.graph)
    }

    /// N-Triples of the graph with generated IRIs renamed by label.
    pub fn canonical_ntriples(&self) -> Result<String, CanonError> {
        Ok(ntriples::serialize(&canonicalize(&self.graph, self.generated_ns())?))
    }

    // ---- graph mutation, recorded in the current transaction ----

    fn add(&mut self, t: Triple) {
        let present = self.graph.contains(&t);
        self.tx.before.entry(t.clone()).or_insert(present);
        if !present {
            self.labels.observe(&t, true);
            self.graph.insert(t);
        }
    }

    fn del(&mut self, t: &Triple) {
        let present = self.graph.contains(t);
        self.tx.before.entry(t.clone()).or_insert(present);
        if present {
            self.labels.observe(t, false);
            self.graph.remove(t);
        }
    }

    fn label_literal(&self, text: &str) -> Literal {
        Literal::lang_string(text, &self.options.language).expect("language validated at construction")
    }

    fn replace_label(&mut self, node: &Iri, old: &str, new: &str) {
        self.del(&Triple::new(
            node.clone(),
            vocab::RDFS_LABEL.clone(),
            self.label_literal(old),
        ));
        if !new.is_empty() {
            self.add(Triple::new(
                node.clone(),
                vocab::RDFS_LABEL.clone(),
                self.label_literal(new),
            ));
        }
    }

    fn typed(&mut self, node: &Iri, class: &Iri) {
        self.add(Triple::new(node.clone(), vocab::RDF_TYPE.clone(), class.clone()));
    }

    // ---- identifiers and labels ----

    /// A fresh IRI under the generated namespace.
    pub fn mint_iri(&mut self) -> Iri {
        if let Some(queue) = &mut self.replay {
            match queue.pop_front() {
                Some(iri) => return iri,
                None => self.replay_overrun = true,
            }
        }
        let uuid = self.ids.next_uuid();
        Iri::new_unchecked(&format!("{}{}", self.options.generated_ns.as_str(), uuid.hyphenated()))
    }

    fn mint(&mut self, label: &str) -> Iri {
        let iri = self.mint_iri();
        self.add(Triple::new(
            iri.clone(),
            vocab::RDFS_LABEL.clone(),
            self.label_literal(label),
        ));
        self.tx.minted.push(MintedIri {
            iri: iri.clone(),
            label: label.to_string(),
        });
        iri
    }

    fn lookup_in(&self, label: &str, language: &str) -> Result<Option<Iri>, MappingError> {
        if !self.options.reuse_by_label {
            return Ok(None);
        }
        let mut candidates = self.labels.lookup(label, language);
        if candidates.is_empty() {
            candidates = self.labels.lookup(label, "");
        }
        match candidates.len() {
            0 => Ok(None),
            1 => Ok(candidates.pop()),
            _ => Err(MappingError::Ambiguous {
                label: label.to_string(),
                candidates,
            }),
        }
    }

    fn lookup(&self, label: &str) -> Result<Option<Iri>, MappingError> {
        self.lookup_in(label, &self.options.language)
    }

    fn resolve_with(&mut self, label: &str, found: Option<Iri>) -> (Iri, Origin) {
        match found {
            Some(iri) => (iri, Origin::Referenced),
            None => (self.mint(label), Origin::CreatedHere),
        }
    }

    /// Resolves a label to the unique resource carrying it, minting a new
    /// labelled resource when there is none (or when reuse is disabled).
    /// Untagged labels, as found in many vocabularies, also match.
    pub fn resolve_label(&mut self, label: &str, language: &str) -> Result<(Iri, bool), MappingError> {
        if label.is_empty() {
            return Err(MappingError::EmptyInput);
        }
        let literal = Literal::lang_string(label, language)?;
        if let Some(iri) = self.lookup_in(label, language)? {
            return Ok((iri, false));
        }
        let iri = self.mint_iri();
        self.add(Triple::new(iri.clone(), vocab::RDFS_LABEL.clone(), literal));
        Ok((iri, true))
    }

    /// The label shown for a resource: workbook language first, then
    /// untagged, then any.
    pub fn display_label(&self, iri: &Iri) -> Option<String> {
        let labels: Vec<&Literal> = self
            .graph
            .objects(iri, &vocab::RDFS_LABEL)
            .filter_map(Node::as_literal)
            .collect();
        let pick = |pred: &dyn Fn(&Literal) -> bool| {
            labels
                .iter()
                .filter(|l| pred(l))
                .map(|l| l.lexical())
                .min()
                .map(str::to_string)
        };
        pick(&|l| l.language() == Some(self.language()))
            .or_else(|| pick(&|l| l.language().is_none()))
            .or_else(|| pick(&|_| true))
    }

    pub fn comment(&self, iri: &Iri) -> Option<String> {
        let comments: Vec<&Literal> = self
            .graph
            .objects(iri, &vocab::RDFS_COMMENT)
            .filter_map(Node::as_literal)
            .collect();
        comments
            .iter()
            .filter(|l| l.language() == Some(self.language()))
            .chain(comments.iter())
            .map(|l| l.lexical().to_string())
            .next()
    }

    /// Case-insensitive prefix search over every label in the graph.
    pub fn autocomplete(&self, prefix: &str, limit: usize) -> Vec<Suggestion> {
        self.labels
            .prefix(prefix, limit)
            .into_iter()
            .map(|(label, iri)| Suggestion {
                comment: self.comment(&iri),
                label,
                iri,
            })
            .collect()
    }

    fn mentions(&self, iri: &Iri) -> bool {
        self.graph.has_subject(iri)
            || self
                .graph
                .find(None, None, Some(&Node::Iri(iri.clone())))
                .next()
                .is_some()
            || self.graph.find(None, Some(iri), None).next().is_some()
    }

    // ---- cell assertions ----

    fn cell_targets(&self, sheet: usize, row: u32, col: u32) -> Option<(Iri, Iri)> {
        let s = &self.sheets[sheet];
        Some((s.row_node(row)?.clone(), s.column_node(col)?.clone()))
    }

    fn assert_triple(&mut self, subject: Iri, property: Iri, object: Node) {
        self.stats.entry(property.clone()).or_default().record(&object, 1);
        self.tx.dirty_properties.insert(property.clone());
        let t = Triple::new(subject, property, object);
        match self.assertions.get_mut(&t) {
            Some(a) => a.count += 1,
            None => {
                let foreign = self.graph.contains(&t);
                self.assertions.insert(t.clone(), Assertion { count: 1, foreign });
                if !foreign {
                    self.add(t);
                }
            }
        }
    }

    fn retract_triple(&mut self, subject: Iri, property: Iri, object: Node) {
        if let Some(stats) = self.stats.get_mut(&property) {
            stats.record(&object, -1);
        }
        self.tx.dirty_properties.insert(property.clone());
        let t = Triple::new(subject, property, object);
        let Some(a) = self.assertions.get_mut(&t) else {
            return;
        };
        a.count -= 1;
        if a.count == 0 {
            let foreign = a.foreign;
            self.assertions.remove(&t);
            if !foreign {
                self.del(&t);
            }
        }
    }

    fn prepare(&self, intent: &CellIntent) -> Result<Prepared, MappingError> {
        Ok(match intent {
            CellIntent::Literal(l) => Prepared::Literal(l.clone()),
            CellIntent::DirectIri(i) => Prepared::Direct(i.clone()),
            CellIntent::Label(label) => match self.lookup(label)? {
                Some(i) => Prepared::Existing(i),
                None => Prepared::Mint(label.clone()),
            },
        })
    }

    fn commit(&mut self, prepared: Prepared) -> (CellValue, Origin) {
        match prepared {
            Prepared::Literal(l) => (CellValue::LiteralVal(l), Origin::CreatedHere),
            Prepared::Direct(i) => (CellValue::DirectIri(i), Origin::Referenced),
            Prepared::Existing(i) => {
                self.typed(&i, &vocab::OWL_THING);
                (CellValue::ResourceRef(i), Origin::Referenced)
            }
            Prepared::Mint(label) => {
                let i = self.mint(&label);
                self.typed(&i, &vocab::OWL_THING);
                (CellValue::ResourceRef(i), Origin::CreatedHere)
            }
        }
    }

    /// Asserts the cell's statement if both headers are bound, resolving a
    /// pending value first. An ambiguous pending label stays pending.
    fn attach_cell(&mut self, sheet: usize, row: u32, col: u32) {
        let Some((subject, property)) = self.cell_targets(sheet, row, col) else {
            return;
        };
        let Some(cell) = self.sheets[sheet].cells.get(&(row, col)) else {
            return;
        };
        let value = match &cell.value {
            Some(v) => v.clone(),
            None => {
                let Ok(intent) = parse_cell_input(&cell.raw_text, self.language()) else {
                    return;
                };
                let Ok(prepared) = self.prepare(&intent) else {
                    return;
                };
                let (value, origin) = self.commit(prepared);
                let cell = self.sheets[sheet].cells.get_mut(&(row, col)).expect("cell exists");
                cell.value = Some(value.clone());
                cell.origin = origin;
                value
            }
        };
        self.assert_triple(subject, property, value.to_node());
    }

    fn detach_cell(&mut self, sheet: usize, row: u32, col: u32) {
        let Some((subject, property)) = self.cell_targets(sheet, row, col) else {
            return;
        };
        let Some(value) = self.sheets[sheet].cells.get(&(row, col)).and_then(|c| c.value.clone()) else {
            return;
        };
        self.retract_triple(subject, property, value.to_node());
    }

    fn refresh_range(&mut self, property: &Iri) {
        let desired = self.stats.get(property).and_then(|s| s.uniform_datatype()).cloned();
        let owned = self.owned_ranges.get(property).cloned();
        if desired == owned {
            return;
        }
        if let Some(old) = owned {
            self.del(&Triple::new(property.clone(), vocab::RDFS_RANGE.clone(), old));
            self.owned_ranges.remove(property);
        }
        if let Some(datatype) = desired {
            let t = Triple::new(property.clone(), vocab::RDFS_RANGE.clone(), datatype.clone());
            if !self.graph.contains(&t) {
                self.add(t);
                self.owned_ranges.insert(property.clone(), datatype);
            }
        }
    }

    /// Brings the range of the property bound to a column in line with the
    /// values in every column bound to it, and returns the inferred datatype.
    pub fn infer_column_range(&mut self, sheet: u32, col: u32) -> Result<Option<Iri>, MappingError> {
        let property = self
            .sheets
            .get(sheet as usize)
            .ok_or(MappingError::UnknownSheet(sheet))?
            .column_node(col)
            .cloned();
        let Some(property) = property else {
            return Ok(None);
        };
        self.refresh_range(&property);
        Ok(self.stats.get(&property).and_then(|s| s.uniform_datatype()).cloned())
    }

    // ---- edits ----

    fn check_sheet(&mut self, sheet: u32) -> Result<usize, MappingError> {
        if sheet >= MAX_SHEETS {
            return Err(MappingError::UnknownSheet(sheet));
        }
        Ok(sheet as usize)
    }

    fn open_sheet(&mut self, sheet: usize) {
        while self.sheets.len() <= sheet {
            self.sheets.push(Sheet::default());
        }
    }

    fn check_coordinates(row: Option<u32>, col: Option<u32>) -> Result<(), MappingError> {
        if row.is_some_and(|r| r >= MAX_ROWS) || col.is_some_and(|c| c >= MAX_COLUMNS) {
            return Err(MappingError::InvalidCoordinates { row, col });
        }
        Ok(())
    }

    /// Applies one edit and returns the exact triples it added and removed.
    ///
    /// Sheets are addressed by index; addressing a sheet past the end opens
    /// empty sheets up to it. On error the workbook is left unchanged.
    pub fn apply_edit(&mut self, edit: &EditOp) -> Result<(TripleDelta, u64), MappingError> {
        self.tx = Tx::default();
        let result = self.dispatch(edit);
        let tx = std::mem::take(&mut self.tx);
        if let Err(e) = result {
            debug_assert!(
                tx.before.iter().all(|(t, was)| self.graph.contains(t) == *was),
                "failed edit mutated the graph"
            );
            return Err(e);
        }
        let tx = {
            self.tx = tx;
            let dirty: Vec<Iri> = self.tx.dirty_properties.iter().cloned().collect();
            for p in &dirty {
                self.refresh_range(p);
            }
            std::mem::take(&mut self.tx)
        };
        let mut added = Vec::new();
        let mut removed = Vec::new();
        for (t, was) in tx.before {
            match (was, self.graph.contains(&t)) {
                (false, true) => added.push(t),
                (true, false) => removed.push(t),
                _ => {}
            }
        }
        self.revision += 1;
        Ok((
            TripleDelta {
                added: crate::rdf::sorted_triples(added.iter()),
                removed: crate::rdf::sorted_triples(removed.iter()),
                minted: tx.minted,
            },
            self.revision,
        ))
    }

    /// Re-applies a logged edit using the IRIs it originally minted.
    pub fn replay_edit(&mut self, edit: &EditOp, minted: &[Iri]) -> Result<(TripleDelta, u64), MappingError> {
        self.replay = Some(minted.iter().cloned().collect());
        self.replay_overrun = false;
        let result = self.apply_edit(edit);
        let leftover = self.replay.take().map_or(0, |q| q.len());
        let (delta, revision) = result?;
        if self.replay_overrun || leftover > 0 {
            return Err(MappingError::ReplayMismatch {
                revision,
                expected: minted.len(),
                actual: delta.minted.len(),
            });
        }
        Ok((delta, revision))
    }

    fn dispatch(&mut self, edit: &EditOp) -> Result<(), MappingError> {
        match edit {
            EditOp::NameSheet { sheet, name } => {
                let s = self.check_sheet(*sheet)?;
                self.open_sheet(s);
                self.name_sheet(s, name)
            }
            EditOp::SetRowHeader { sheet, row, text } => {
                let s = self.check_sheet(*sheet)?;
                Self::check_coordinates(Some(*row), None)?;
                self.open_sheet(s);
                self.set_row_header(s, *row, text)
            }
            EditOp::SetColumnHeader { sheet, col, text } => {
                let s = self.check_sheet(*sheet)?;
                Self::check_coordinates(None, Some(*col))?;
                self.open_sheet(s);
                self.set_column_header(s, *col, text)
            }
            EditOp::SetCell { sheet, row, col, text } => {
                let s = self.check_sheet(*sheet)?;
                Self::check_coordinates(Some(*row), Some(*col))?;
                self.open_sheet(s);
                self.set_cell(s, *row, *col, text)
            }
            EditOp::PasteReference { sheet, row, col, iri } => {
                let s = self.check_sheet(*sheet)?;
                Self::check_coordinates(Some(*row), Some(*col))?;
                if !self.mentions(iri) {
                    return Err(MappingError::UnknownResource(iri.clone()));
                }
                self.open_sheet(s);
                self.paste_reference(s, *row, *col, iri);
                Ok(())
            }
            EditOp::SetComment { iri, text } => {
                if !self.mentions(iri) {
                    return Err(MappingError::UnknownResource(iri.clone()));
                }
                self.set_comment(iri, text);
                Ok(())
            }
            EditOp::SetReuseByLabel { enabled } => {
                self.options.reuse_by_label = *enabled;
                Ok(())
            }
            EditOp::Import {
                format,
                document,
                vocabulary,
            } => {
                let g = format.parse(document)?;
                self.merge(&g, *vocabulary);
                Ok(())
            }
        }
    }

    fn name_sheet(&mut self, s: usize, name: &str) -> Result<(), MappingError> {
        let sheet = &self.sheets[s];
        let (old_name, old_class, origin) = (sheet.name.clone(), sheet.class_iri.clone(), sheet.class_origin);
        if name.is_empty() {
            if let Some(class) = &old_class {
                if origin == Origin::CreatedHere {
                    self.replace_label(class, &old_name, "");
                }
            }
            let sheet = &mut self.sheets[s];
            sheet.name.clear();
            sheet.class_iri = None;
            return Ok(());
        }
        if old_class.is_some() && old_name == name {
            return Ok(());
        }
        if let (Some(class), Origin::CreatedHere) = (&old_class, origin) {
            self.replace_label(class, &old_name, name);
            self.sheets[s].name = name.to_string();
            return Ok(());
        }
        let found = self.lookup(name)?;
        let (class, origin) = self.resolve_with(name, found);
        self.typed(&class, &vocab::RDFS_CLASS);
        let sheet = &mut self.sheets[s];
        sheet.name = name.to_string();
        sheet.class_iri = Some(class.clone());
        sheet.class_origin = origin;
        let rows: Vec<Iri> = sheet.rows.values().filter_map(|h| h.node.clone()).collect();
        let columns: Vec<Iri> = sheet.columns.values().filter_map(|h| h.node.clone()).collect();
        for node in rows {
            self.typed(&node, &class);
        }
        for property in columns {
            self.add(Triple::new(property, vocab::RDFS_DOMAIN.clone(), class.clone()));
        }
        Ok(())
    }

    fn set_row_header(&mut self, s: usize, row: u32, text: &str) -> Result<(), MappingError> {
        let old = self.sheets[s].rows.get(&row).cloned();
        let cols = self.sheets[s].cells_in_row(row);
        if let Some(old) = &old {
            if old.raw_text == text {
                return Ok(());
            }
            if let (Some(node), Origin::CreatedHere, false) = (&old.node, old.origin, text.is_empty()) {
                self.replace_label(node, &old.raw_text, text);
                self.sheets[s].rows.get_mut(&row).expect("row exists").raw_text = text.to_string();
                return Ok(());
            }
        }
        let found = if text.is_empty() { None } else { self.lookup(text)? };
        if let Some(old) = &old {
            for &c in &cols {
                self.detach_cell(s, row, c);
            }
            if let (Some(node), Origin::CreatedHere) = (&old.node, old.origin) {
                self.replace_label(node, &old.raw_text, "");
            }
            self.sheets[s].rows.remove(&row);
        }
        if text.is_empty() {
            return Ok(());
        }
        let (node, origin) = self.resolve_with(text, found);
        self.typed(&node, &vocab::OWL_THING);
        if let Some(class) = self.sheets[s].class_iri.clone() {
            self.typed(&node, &class);
        }
        self.sheets[s].rows.insert(
            row,
            HeaderBinding {
                raw_text: text.to_string(),
                node: Some(node),
                origin,
            },
        );
        for c in cols {
            self.attach_cell(s, row, c);
        }
        Ok(())
    }

    fn set_column_header(&mut self, s: usize, col: u32, text: &str) -> Result<(), MappingError> {
        let old = self.sheets[s].columns.get(&col).cloned();
        let rows = self.sheets[s].cells_in_column(col);
        if let Some(old) = &old {
            if old.raw_text == text {
                return Ok(());
            }
            if let (Some(node), Origin::CreatedHere, false) = (&old.node, old.origin, text.is_empty()) {
                self.replace_label(node, &old.raw_text, text);
                self.sheets[s].columns.get_mut(&col).expect("column exists").raw_text = text.to_string();
                return Ok(());
            }
        }
        let found = if text.is_empty() { None } else { self.lookup(text)? };
        if let Some(old) = &old {
            for &r in &rows {
                self.detach_cell(s, r, col);
            }
            if let Some(node) = &old.node {
                self.tx.dirty_properties.insert(node.clone());
                if old.origin == Origin::CreatedHere {
                    self.replace_label(node, &old.raw_text, "");
                }
            }
            self.sheets[s].columns.remove(&col);
        }
        if text.is_empty() {
            return Ok(());
        }
        let (property, origin) = self.resolve_with(text, found);
        self.typed(&property, &vocab::RDF_PROPERTY);
        if let Some(class) = self.sheets[s].class_iri.clone() {
            self.add(Triple::new(property.clone(), vocab::RDFS_DOMAIN.clone(), class));
        }
        self.tx.dirty_properties.insert(property.clone());
        self.sheets[s].columns.insert(
            col,
            HeaderBinding {
                raw_text: text.to_string(),
                node: Some(property),
                origin,
            },
        );
        for r in rows {
            self.attach_cell(s, r, col);
        }
        Ok(())
    }

    fn set_cell(&mut self, s: usize, row: u32, col: u32, text: &str) -> Result<(), MappingError> {
        let key = (row, col);
        let old = self.sheets[s].cells.get(&key).cloned();
        if text.is_empty() {
            if old.is_some() {
                self.detach_cell(s, row, col);
                self.sheets[s].cells.remove(&key);
            }
            return Ok(());
        }
        if old.as_ref().is_some_and(|o| o.raw_text == text) {
            return Ok(());
        }
        let intent = parse_cell_input(text, self.language())?;
        if let (Some(old), CellIntent::Label(label)) = (&old, &intent) {
            if let (Some(CellValue::ResourceRef(node)), Origin::CreatedHere) = (&old.value, old.origin) {
                let node = node.clone();
                self.replace_label(&node, &old.raw_text, label);
                self.sheets[s].cells.get_mut(&key).expect("cell exists").raw_text = text.to_string();
                return Ok(());
            }
        }
        let prepared = match self.cell_targets(s, row, col) {
            Some(_) => Some(self.prepare(&intent)?),
            None => None,
        };
        if old.is_some() {
            self.detach_cell(s, row, col);
        }
        let (value, origin) = match prepared {
            Some(p) => {
                let (v, o) = self.commit(p);
                (Some(v), o)
            }
            None => (None, Origin::CreatedHere),
        };
        self.sheets[s].cells.insert(
            key,
            CellBinding {
                raw_text: text.to_string(),
                value,
                origin,
            },
        );
        self.attach_cell(s, row, col);
        Ok(())
    }

    fn paste_reference(&mut self, s: usize, row: u32, col: u32, iri: &Iri) {
        if self.sheets[s].cells.contains_key(&(row, col)) {
            self.detach_cell(s, row, col);
        }
        let raw_text = self.display_label(iri).unwrap_or_else(|| iri.as_str().to_string());
        self.sheets[s].cells.insert(
            (row, col),
            CellBinding {
                raw_text,
                value: Some(CellValue::ResourceRef(iri.clone())),
                origin: Origin::Referenced,
            },
        );
        self.attach_cell(s, row, col);
    }

    fn set_comment(&mut self, iri: &Iri, text: &str) {
        let language = self.language().to_string();
        let existing: Vec<Triple> = self
            .graph
            .find(Some(iri), Some(&vocab::RDFS_COMMENT), None)
            .filter(|t| t.object.as_literal().and_then(Literal::language) == Some(language.as_str()))
            .cloned()
            .collect();
        for t in &existing {
            self.del(t);
        }
        if !text.is_empty() {
            let comment = self.label_literal(text);
            self.add(Triple::new(iri.clone(), vocab::RDFS_COMMENT.clone(), comment));
        }
    }

    fn merge(&mut self, g: &Graph, vocabulary: bool) {
        for t in g.iter() {
            self.add(t.clone());
        }
        if vocabulary {
            for (p, ns) in g.namespaces() {
                if !self.graph.namespaces().contains_key(p) {
                    self.graph.set_namespace(p.clone(), ns.clone());
                }
            }
        }
    }

    /// Merges a vocabulary so its classes and properties can be reused by
    /// label and offered by autocomplete. Applied as a regular edit; returns
    /// the number of labels the vocabulary registers.
    pub fn import_vocabulary(&mut self, vocabulary: &Graph) -> Result<usize, MappingError> {
        let edit = EditOp::Import {
            format: RdfFormat::Turtle,
            document: RdfFormat::Turtle.serialize(vocabulary),
            vocabulary: true,
        };
        self.apply_edit(&edit)?;
        Ok(vocabulary.iter().filter(|t| label_key(t).is_some()).count())
    }

    // ---- persistence ----

    pub fn state(&self) -> WorkbookState {
        WorkbookState {
            id: self.id.clone(),
            revision: self.revision,
            options: self.options.clone(),
            sheets: self.sheets.clone(),
            namespaces: self.graph.namespaces().clone(),
            owned_ranges: self.owned_ranges.clone(),
            foreign_assertions: self
                .assertions
                .iter()
                .filter(|(_, a)| a.foreign)
                .map(|(t, _)| t.clone())
                .collect(),
        }
    }

    /// Rebuilds a workbook from its structure and graph.
    pub fn from_state(state: WorkbookState, mut graph: Graph, ids: Box<dyn IdSource>) -> Result<Self, MappingError> {
        let mut wb = Workbook::with_id_source(state.id, state.options, ids)?;
        for (p, ns) in state.namespaces {
            graph.set_namespace(p, ns);
        }
        for t in graph.iter() {
            wb.labels.observe(t, true);
        }
        wb.graph = graph;
        wb.sheets = state.sheets;
        wb.revision = state.revision;
        wb.owned_ranges = state.owned_ranges;
        for s in 0..wb.sheets.len() {
            let keys: Vec<(u32, u32)> = wb.sheets[s].cells.keys().copied().collect();
            for (row, col) in keys {
                let (Some((subject, property)), Some(value)) = (
                    wb.cell_targets(s, row, col),
                    wb.sheets[s].cells[&(row, col)].value.clone(),
                ) else {
                    continue;
                };
                let object = value.to_node();
                wb.stats.entry(property.clone()).or_default().record(&object, 1);
                let t = Triple::new(subject, property, object);
                if !wb.graph.contains(&t) {
                    return Err(MappingError::InconsistentState(format!("missing assertion {t}")));
                }
                let foreign = state.foreign_assertions.contains(&t);
                wb.assertions
                    .entry(t)
                    .and_modify(|a| a.count += 1)
                    .or_insert(Assertion { count: 1, foreign });
            }
        }
        wb.tx = Tx::default();
        Ok(wb)
    }
}
