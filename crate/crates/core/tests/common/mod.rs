#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rdfsheet_core::mapping::{parse_cell_input, CellIntent, EditOp, SeededIds, Workbook, WorkbookOptions};
use rdfsheet_core::rdf::{vocab, Graph, Iri, Literal, Triple};

pub fn fixture(name: &str) -> PathBuf {
    // also included by the server crate's tests
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn seeded(seed: u64) -> Workbook {
    Workbook::with_id_source("test", WorkbookOptions::default(), Box::new(SeededIds::new(seed))).unwrap()
}

pub fn name(sheet: u32, name: &str) -> EditOp {
    EditOp::NameSheet {
        sheet,
        name: name.into(),
    }
}

pub fn row(sheet: u32, row: u32, text: &str) -> EditOp {
    EditOp::SetRowHeader {
        sheet,
        row,
        text: text.into(),
    }
}

pub fn col(sheet: u32, col: u32, text: &str) -> EditOp {
    EditOp::SetColumnHeader {
        sheet,
        col,
        text: text.into(),
    }
}

pub fn cell(sheet: u32, row: u32, col: u32, text: &str) -> EditOp {
    EditOp::SetCell {
        sheet,
        row,
        col,
        text: text.into(),
    }
}

/// Name the sheet, add a row, a linking column with a resource, a second
/// column with a quoted literal.
pub fn conference_script() -> Vec<EditOp> {
    vec![
        name(0, "Conference"),
        row(0, 1, "ISWC"),
        col(0, 1, "related to"),
        cell(0, 1, 1, "ESWC"),
        col(0, 2, "rank"),
        cell(0, 1, 2, "'A"),
    ]
}

pub fn apply_all(wb: &mut Workbook, script: &[EditOp]) {
    for e in script {
        wb.apply_edit(e).unwrap_or_else(|err| panic!("{e:?}: {err}"));
    }
}

pub fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

pub fn label_of(wb: &Workbook, text: &str) -> Iri {
    let found = wb.label_index().lookup(text, wb.language());
    assert_eq!(found.len(), 1, "label {text:?}: {found:?}");
    found[0].clone()
}

/// The label index agrees with the label triples of the graph.
pub fn assert_labels_consistent(wb: &Workbook) {
    let from_graph: BTreeSet<(String, String, Iri)> = wb
        .graph()
        .iter()
        .filter(|t| t.predicate == *vocab::RDFS_LABEL)
        .filter_map(|t| {
            let l = t.object.as_literal()?;
            Some((
                l.lexical().to_string(),
                l.language().unwrap_or("").to_string(),
                t.subject.clone(),
            ))
        })
        .collect();
    let from_index: BTreeSet<(String, String, Iri)> = wb.label_index().entries().into_iter().collect();
    assert_eq!(from_graph, from_index);
}

// ---- random edit scripts over distinct targets ----

const LABELS: &[&str] = &[
    "ISWC",
    "ESWC",
    "Conference",
    "rank",
    "related to",
    "Max",
    "Portoroz",
    "Slovenia",
    "HCI",
];
const LITERALS: &[&str] = &["'A", "42", "-7", "3.5", "1e3", "true", "false", "'B", "'42"];
const LINKS: &[&str] = &["https://example.org/x", "http://example.org/y"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Target {
    Name(u32),
    Row(u32, u32),
    Col(u32, u32),
    Cell(u32, u32, u32),
}

fn all_targets(sheets: u32, rows: u32, cols: u32) -> Vec<Target> {
    let mut out = Vec::new();
    for s in 0..sheets {
        out.push(Target::Name(s));
        for r in 0..rows {
            out.push(Target::Row(s, r));
        }
        for c in 0..cols {
            out.push(Target::Col(s, c));
        }
        for r in 0..rows {
            for c in 0..cols {
                out.push(Target::Cell(s, r, c));
            }
        }
    }
    out
}

fn pick<'a>(rng: &mut impl Rng, pool: &[&'a str]) -> &'a str {
    pool[rng.random_range(0..pool.len())]
}

/// `n` edits, each on a different target, with labels drawn from a small
/// pool so that reuse across roles and sheets is frequent.
pub fn random_script(rng: &mut impl Rng, n: usize) -> Vec<EditOp> {
    let mut targets = all_targets(3, 4, 4);
    targets.shuffle(rng);
    targets
        .into_iter()
        .take(n)
        .map(|t| match t {
            Target::Name(s) => name(s, pick(rng, LABELS)),
            Target::Row(s, r) => row(s, r, pick(rng, LABELS)),
            Target::Col(s, c) => col(s, c, pick(rng, LABELS)),
            Target::Cell(s, r, c) => {
                let text = match rng.random_range(0..10) {
                    0..=4 => pick(rng, LABELS),
                    5..=8 => pick(rng, LITERALS),
                    _ => pick(rng, LINKS),
                };
                cell(s, r, c, text)
            }
        })
        .collect()
}

/// Any edit, including repeated targets, clears and renames.
pub fn random_edit(rng: &mut impl Rng) -> EditOp {
    let s = rng.random_range(0..2);
    let r = rng.random_range(0..3);
    let c = rng.random_range(0..3);
    fn text(rng: &mut impl Rng) -> String {
        match rng.random_range(0..12) {
            0 => String::new(),
            1..=6 => pick(rng, LABELS).to_string(),
            7..=10 => pick(rng, LITERALS).to_string(),
            _ => pick(rng, LINKS).to_string(),
        }
    }
    match rng.random_range(0..10) {
        0 => name(s, &text(rng)),
        1 | 2 => row(s, r, &text(rng)),
        3 | 4 => col(s, c, &text(rng)),
        5 => EditOp::SetReuseByLabel {
            enabled: rng.random_bool(0.8),
        },
        _ => cell(s, r, c, &text(rng)),
    }
}

// ---- random graphs ----

const LEXICALS: &[&str] = &[
    "",
    "plain",
    "with \"quotes\"",
    "tab\there",
    "line\nbreak",
    "back\\slash",
    "Portorož",
    "日本",
    "a\u{1F600}",
];

pub fn random_graph(rng: &mut impl Rng, size: usize) -> Graph {
    let iris: Vec<Iri> = (0..8)
        .map(|i| iri(&format!("http://example.org/ns#r{i}")))
        .chain([
            vocab::RDF_TYPE.clone(),
            vocab::RDFS_LABEL.clone(),
            iri("http://example.org/other/x-y_z"),
            iri("urn:uuid:4a1b2c3d-0000-4000-8000-000000000000"),
            iri("http://example.org/p%20q"),
            iri("http://example.org/ns#"),
        ])
        .collect();
    let mut g = Graph::new();
    g.set_namespace("ex", iri("http://example.org/ns#"));
    while g.len() < size {
        let s = iris[rng.random_range(0..iris.len())].clone();
        let p = iris[rng.random_range(0..iris.len())].clone();
        let o: rdfsheet_core::rdf::Node = match rng.random_range(0..6) {
            0 | 1 => iris[rng.random_range(0..iris.len())].clone().into(),
            2 => Literal::lang_string(pick(rng, LEXICALS), pick(rng, &["en", "de", "en-gb"]))
                .unwrap()
                .into(),
            3 => Literal::string(pick(rng, LEXICALS)).into(),
            4 => Literal::typed(rng.random_range(-1000..1000).to_string(), vocab::XSD_INT.clone())
                .unwrap()
                .into(),
            _ => match rng.random_range(0..3) {
                0 => Literal::typed(["true", "false"][rng.random_range(0..2)], vocab::XSD_BOOLEAN.clone())
                    .unwrap()
                    .into(),
                1 => Literal::typed(format!("{}.5", rng.random_range(-50..50)), vocab::XSD_FLOAT.clone())
                    .unwrap()
                    .into(),
                _ => Literal::typed(rng.random_range(0..99).to_string(), vocab::XSD_INTEGER.clone())
                    .unwrap()
                    .into(),
            },
        };
        g.insert(Triple::new(s, p, o));
    }
    g
}

// ---- independent classifier oracle ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expected {
    Int,
    Float,
    Boolean,
    LangString(String),
    Direct,
    Label,
    Empty,
}

pub struct CellOracle {
    int: regex::Regex,
    float: regex::Regex,
    link: regex::Regex,
}

impl CellOracle {
    pub fn new() -> Self {
        CellOracle {
            int: regex::Regex::new(r"^[+-]?[0-9]+$").unwrap(),
            float: regex::Regex::new(r"^[+-]?([0-9]+(\.[0-9]*)?|\.[0-9]+)([eE][+-]?[0-9]+)?$").unwrap(),
            link: regex::Regex::new(r#"^[hH][tT][tT][pP][sS]?://[^\s\p{Cc}<>"{}|^`\\]+$"#).unwrap(),
        }
    }

    /// A 32-bit signed integer, decided by comparing digit strings.
    fn fits_i32(&self, s: &str) -> bool {
        let (neg, digits) = match s.as_bytes()[0] {
            b'-' => (true, &s[1..]),
            b'+' => (false, &s[1..]),
            _ => (false, s),
        };
        let digits = digits.trim_start_matches('0');
        let limit = if neg { "2147483648" } else { "2147483647" };
        digits.len() < limit.len() || (digits.len() == limit.len() && digits <= limit)
    }

    fn typed(&self, s: &str) -> Option<Expected> {
        if self.int.is_match(s) && self.fits_i32(s) {
            Some(Expected::Int)
        } else if self.float.is_match(s) {
            Some(Expected::Float)
        } else if s == "true" || s == "false" {
            Some(Expected::Boolean)
        } else {
            None
        }
    }

    pub fn classify(&self, s: &str) -> Expected {
        if s.is_empty() {
            return Expected::Empty;
        }
        if let Some(rest) = s.strip_prefix('\'') {
            return self
                .typed(rest)
                .unwrap_or_else(|| Expected::LangString(rest.to_string()));
        }
        if self.link.is_match(s) {
            return Expected::Direct;
        }
        self.typed(s).unwrap_or(Expected::Label)
    }
}

/// Describes the disagreement if the engine's classification of `text`
/// differs from the oracle's.
pub fn classifier_mismatch(oracle: &CellOracle, text: &str) -> Option<String> {
    let got = parse_cell_input(text, "en");
    let want = oracle.classify(text);
    let ok = match (&got, &want) {
        (Err(_), Expected::Empty) => true,
        (Ok(CellIntent::DirectIri(i)), Expected::Direct) => i.as_str() == text,
        (Ok(CellIntent::Label(l)), Expected::Label) => l == text,
        (Ok(CellIntent::Literal(l)), Expected::Int) => *l.datatype() == *vocab::XSD_INT,
        (Ok(CellIntent::Literal(l)), Expected::Float) => *l.datatype() == *vocab::XSD_FLOAT,
        (Ok(CellIntent::Literal(l)), Expected::Boolean) => *l.datatype() == *vocab::XSD_BOOLEAN,
        (Ok(CellIntent::Literal(l)), Expected::LangString(s)) => {
            *l.datatype() == *vocab::RDF_LANG_STRING && l.lexical() == s && l.language() == Some("en")
        }
        _ => false,
    };
    (!ok).then(|| format!("{text:?}: engine {got:?}, oracle {want:?}"))
}

/// Strings biased towards the boundaries of every classification rule.
pub fn fuzz_string(rng: &mut impl Rng) -> String {
    const PIECES: &[&str] = &[
        "0",
        "1",
        "7",
        "9",
        "42",
        "2147483647",
        "2147483648",
        "-2147483648",
        "-2147483649",
        "000",
        "+",
        "-",
        ".",
        "e",
        "E",
        "e+",
        "e-",
        ".5",
        "5.",
        "1.0e10",
        "INF",
        "NaN",
        "-INF",
        "true",
        "false",
        "True",
        "FALSE",
        "1",
        "'",
        "''",
        "http://",
        "https://",
        "HTTP://",
        "ftp://",
        "example.org",
        "/path",
        " ",
        "\t",
        "<",
        ">",
        "\"",
        "|",
        "^",
        "`",
        "\\",
        "{",
        "}",
        "é",
        "日本",
        "\u{0}",
        "\u{7f}",
        "a",
        "Z",
        "ISWC",
        "related to",
        "#frag",
        "?q=1",
        "%20",
        ":",
    ];
    let n = rng.random_range(1..5);
    let mut s = String::new();
    for _ in 0..n {
        if rng.random_bool(0.85) {
            s.push_str(pick(rng, PIECES));
        } else {
            s.push(char::from_u32(rng.random_range(0x20..0x250)).unwrap_or('x'));
        }
    }
    s
}

// ---- evaluation scenario ----

/// Five sheets (Person, Conference, City, Country, Keyword), six instances
/// and five instance-to-instance links over four properties.
pub fn evaluation_script() -> Vec<EditOp> {
    vec![
        name(0, "Person"),
        row(0, 0, "Max"),
        col(0, 0, "attends"),
        cell(0, 0, 0, "ESWC 2017"),
        name(1, "Conference"),
        row(1, 0, "ESWC 2017"),
        col(1, 0, "located in"),
        col(1, 1, "related to"),
        col(1, 2, "related to"),
        cell(1, 0, 0, "Portoroz"),
        cell(1, 0, 1, "Semantic Web"),
        cell(1, 0, 2, "Knowledge"),
        name(2, "City"),
        row(2, 0, "Portoroz"),
        col(2, 0, "lies within"),
        cell(2, 0, 0, "Slovenia"),
        name(3, "Country"),
        row(3, 0, "Slovenia"),
        name(4, "Keyword"),
        row(4, 0, "Semantic Web"),
        row(4, 1, "Knowledge"),
    ]
}

/// The scenario workbook with a comment on four of its instances.
pub fn evaluation_workbook() -> Workbook {
    let mut wb = seeded(2017);
    apply_all(&mut wb, &evaluation_script());
    for (label, text) in [
        ("Max", "A researcher"),
        ("ESWC 2017", "Extended Semantic Web Conference"),
        ("Portoroz", "Coastal town"),
        ("Slovenia", "Country in Central Europe"),
    ] {
        let iri = label_of(&wb, label);
        wb.apply_edit(&EditOp::SetComment { iri, text: text.into() }).unwrap();
    }
    wb
}

/// `classes` labelled classes, the first `populated` of which share
/// `instances` instances round-robin.
pub fn synthetic_graph(classes: usize, instances: usize, populated: usize) -> Graph {
    let mut g = Graph::new();
    let class = |i: usize| iri(&format!("http://example.org/class/{i}"));
    for c in 0..classes {
        g.insert(Triple::new(
            class(c),
            vocab::RDF_TYPE.clone(),
            vocab::RDFS_CLASS.clone(),
        ));
        g.insert(Triple::new(
            class(c),
            vocab::RDFS_LABEL.clone(),
            Literal::lang_string(format!("C{c}"), "en").unwrap(),
        ));
    }
    for i in 0..instances {
        let inst = iri(&format!("http://example.org/inst/{i}"));
        g.insert(Triple::new(
            inst.clone(),
            vocab::RDF_TYPE.clone(),
            vocab::OWL_THING.clone(),
        ));
        if populated > 0 {
            g.insert(Triple::new(inst, vocab::RDF_TYPE.clone(), class(i % populated)));
        }
    }
    g
}
