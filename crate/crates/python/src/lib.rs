//! Python bindings: workbooks, the cell classifier and ontology metrics.

pub mod convert;

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyString;
use rdfsheet_core::mapping::log::{read_log_file, replay_log, LogError};
use rdfsheet_core::mapping::{self, EditOp, MappingError, SeededIds, WorkbookOptions};
use rdfsheet_core::metrics::MetricsReport;
use rdfsheet_core::rdf::{RdfFormat, SyntaxError};
use serde_json::{json, Value};

create_exception!(rdfsheet, AmbiguousLabel, PyValueError);
create_exception!(rdfsheet, RdfSyntaxError, PyValueError);

fn mapping_err(e: MappingError) -> PyErr {
    match e {
        MappingError::Ambiguous { label, candidates } => {
            let iris: Vec<String> = candidates.iter().map(|c| c.as_str().to_string()).collect();
            AmbiguousLabel::new_err((format!("label {label:?} matches {} resources", iris.len()), iris))
        }
        MappingError::Syntax(s) => syntax_err(s),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn syntax_err(e: SyntaxError) -> PyErr {
    RdfSyntaxError::new_err((e.message.clone(), e.line, e.column))
}

fn log_err(e: LogError) -> PyErr {
    match e {
        LogError::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn format_arg(name: &str) -> PyResult<RdfFormat> {
    convert::format_from_name(name).map_err(PyValueError::new_err)
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (v.to_string(),))?.unbind())
}

fn from_py(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = obj.cast::<PyString>() {
        return Ok(s.to_str()?.to_string());
    }
    let json = obj.py().import("json")?;
    json.call_method1("dumps", (obj,))?.extract()
}

/// A spreadsheet workbook mapped to an RDF graph.
#[pyclass(name = "Workbook", module = "rdfsheet")]
struct PyWorkbook {
    inner: mapping::Workbook,
}

impl PyWorkbook {
    fn run(&mut self, py: Python<'_>, edit: &EditOp) -> PyResult<Py<PyAny>> {
        let (delta, revision) = self.inner.apply_edit(edit).map_err(mapping_err)?;
        to_py(py, &json!({ "revision": revision, "delta": delta }))
    }
}

#[pymethods]
impl PyWorkbook {
    /// With `seed`, minted IRIs are reproducible.
    #[new]
    #[pyo3(signature = (id = "workbook", language = "en", reuse_by_label = true, seed = None))]
    fn new(id: &str, language: &str, reuse_by_label: bool, seed: Option<u64>) -> PyResult<Self> {
        let options = WorkbookOptions {
            language: language.to_string(),
            reuse_by_label,
            ..WorkbookOptions::default()
        };
        let inner = match seed {
            Some(s) => mapping::Workbook::with_id_source(id, options, Box::new(SeededIds::new(s))),
            None => mapping::Workbook::new(id, options),
        }
        .map_err(mapping_err)?;
        Ok(PyWorkbook { inner })
    }

    #[getter]
    fn id(&self) -> &str {
        self.inner.id()
    }

    #[getter]
    fn revision(&self) -> u64 {
        self.inner.revision()
    }

    #[getter]
    fn language(&self) -> &str {
        self.inner.language()
    }

    /// Number of triples in the graph.
    fn __len__(&self) -> usize {
        self.inner.graph().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Workbook(id={:?}, revision={}, triples={})",
            self.inner.id(),
            self.inner.revision(),
            self.inner.graph().len()
        )
    }

    /// Applies an edit given as a dict or JSON string, e.g.
    /// `{"op": "set_cell", "sheet": 0, "row": 1, "col": 1, "text": "ESWC"}`.
    /// Returns `{"revision": ..., "delta": {"added", "removed", "minted"}}`.
    fn apply(&mut self, py: Python<'_>, edit: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
        let edit: EditOp = serde_json::from_str(&from_py(edit)?).map_err(|e| PyValueError::new_err(e.to_string()))?;
        self.run(py, &edit)
    }

    fn name_sheet(&mut self, py: Python<'_>, sheet: u32, name: String) -> PyResult<Py<PyAny>> {
        self.run(py, &EditOp::NameSheet { sheet, name })
    }

    fn set_row_header(&mut self, py: Python<'_>, sheet: u32, row: u32, text: String) -> PyResult<Py<PyAny>> {
        self.run(py, &EditOp::SetRowHeader { sheet, row, text })
    }

    fn set_column_header(&mut self, py: Python<'_>, sheet: u32, col: u32, text: String) -> PyResult<Py<PyAny>> {
        self.run(py, &EditOp::SetColumnHeader { sheet, col, text })
    }

    fn set_cell(&mut self, py: Python<'_>, sheet: u32, row: u32, col: u32, text: String) -> PyResult<Py<PyAny>> {
        self.run(py, &EditOp::SetCell { sheet, row, col, text })
    }

    #[pyo3(signature = (format = "ntriples"))]
    fn export(&self, format: &str) -> PyResult<String> {
        Ok(self.inner.export(format_arg(format)?))
    }

    /// N-Triples with generated IRIs renamed after their labels.
    fn canonical_ntriples(&self) -> PyResult<String> {
        self.inner
            .canonical_ntriples()
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[pyo3(signature = (prefix, limit = 10))]
    fn suggest(&self, py: Python<'_>, prefix: &str, limit: usize) -> PyResult<Py<PyAny>> {
        let found = serde_json::to_value(self.inner.autocomplete(prefix, limit)).expect("suggestions serialize");
        to_py(py, &found)
    }

    fn metrics(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let report: Value =
            serde_json::from_str(&MetricsReport::compute(self.inner.graph()).to_json()).expect("report is valid json");
        to_py(py, &report)
    }

    /// Sheets, headers and cells as stored in snapshots.
    fn state(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &serde_json::to_value(self.inner.state()).expect("state serializes"))
    }
}

/// Classifies cell text: `{"kind": "literal" | "iri" | "label", ...}`.
#[pyfunction]
#[pyo3(signature = (text, language = "en"))]
fn parse_cell(py: Python<'_>, text: &str, language: &str) -> PyResult<Py<PyAny>> {
    to_py(py, &convert::cell_json(text, language).map_err(mapping_err)?)
}

/// Ontology metrics of an RDF document.
#[pyfunction]
#[pyo3(signature = (document, format = "ntriples"))]
fn metrics(py: Python<'_>, document: &str, format: &str) -> PyResult<Py<PyAny>> {
    to_py(
        py,
        &convert::metrics_json(document, format_arg(format)?).map_err(syntax_err)?,
    )
}

/// Rebuilds a workbook from an edit log file.
#[pyfunction]
fn replay(path: PathBuf) -> PyResult<PyWorkbook> {
    let (header, records) = read_log_file(&path).map_err(log_err)?;
    let inner = replay_log(&header, &records).map_err(log_err)?;
    Ok(PyWorkbook { inner })
}

#[pymodule]
fn rdfsheet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWorkbook>()?;
    m.add_function(wrap_pyfunction!(parse_cell, m)?)?;
    m.add_function(wrap_pyfunction!(metrics, m)?)?;
    m.add_function(wrap_pyfunction!(replay, m)?)?;
    m.add("AmbiguousLabel", m.py().get_type::<AmbiguousLabel>())?;
    m.add("RdfSyntaxError", m.py().get_type::<RdfSyntaxError>())?;
    Ok(())
}
