//! RDF terms: IRIs, literals and triples.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::vocab;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("invalid IRI {0:?}: {1}")]
    InvalidIri(String, &'static str),
    #[error("invalid language tag {0:?}")]
    InvalidLanguage(String),
    #[error("{lexical:?} is not a valid lexical form for <{datatype}>")]
    InvalidLexical { lexical: String, datatype: String },
    #[error("language tags are only allowed on rdf:langString literals")]
    LanguageMismatch,
}

/// Characters that may never appear inside an IRI reference.
pub(crate) fn is_forbidden_iri_char(c: char) -> bool {
    c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
}

/// An absolute IRI. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl AsRef<str>) -> Result<Self, TermError> {
        let value = value.as_ref();
        let Some(colon) = value.find(':') else {
            return Err(TermError::InvalidIri(value.into(), "missing scheme"));
        };
        let scheme = &value[..colon];
        let mut chars = scheme.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return Err(TermError::InvalidIri(value.into(), "missing scheme")),
        }
        if !chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
            return Err(TermError::InvalidIri(value.into(), "invalid scheme"));
        }
        if value.chars().any(is_forbidden_iri_char) {
            return Err(TermError::InvalidIri(value.into(), "forbidden character"));
        }
        Ok(Iri(value.into()))
    }

    pub(crate) fn new_unchecked(value: &str) -> Self {
        Iri(value.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Serialize for Iri {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Iri {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Iri::new(s).map_err(serde::de::Error::custom)
    }
}

fn is_valid_language(tag: &str) -> bool {
    // BCP-47 shape check: alpha primary subtag, alphanumeric subtags of 1..=8.
    let mut parts = tag.split('-');
    let Some(primary) = parts.next() else {
        return false;
    };
    if primary.is_empty() || primary.len() > 8 || !primary.bytes().all(|b| b.is_ascii_alphabetic()) {
        return false;
    }
    parts.all(|p| !p.is_empty() && p.len() <= 8 && p.bytes().all(|b| b.is_ascii_alphanumeric()))
}

/// Lexical space of `xsd:int`: optional sign, digits, value within 32 bits.
pub fn is_xsd_int(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) && s.parse::<i32>().is_ok()
}

/// Lexical space of `xsd:float`, restricted to finite decimal and exponent
/// notation (`INF` and `NaN` are treated as text).
pub fn is_xsd_float(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let int_digits = i - int_start;
    let mut frac_digits = 0;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        frac_digits = i - frac_start;
    }
    if int_digits == 0 && frac_digits == 0 {
        return false;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return false;
        }
    }
    i == b.len()
}

pub fn is_xsd_boolean(s: &str) -> bool {
    matches!(s, "true" | "false" | "1" | "0")
}

/// A literal with a datatype and, for `rdf:langString`, a language tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    language: Option<String>,
}

impl Literal {
    pub fn lang_string(lexical: impl Into<String>, language: &str) -> Result<Self, TermError> {
        if !is_valid_language(language) {
            return Err(TermError::InvalidLanguage(language.into()));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype: vocab::RDF_LANG_STRING.clone(),
            language: Some(language.to_ascii_lowercase()),
        })
    }

    /// A typed literal. The lexical form is checked for the numeric and
    /// boolean datatypes the engine infers; other datatypes are accepted as-is.
    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Result<Self, TermError> {
        let lexical = lexical.into();
        if datatype == *vocab::RDF_LANG_STRING {
            return Err(TermError::LanguageMismatch);
        }
        let ok = if datatype == *vocab::XSD_INT {
            is_xsd_int(&lexical)
        } else if datatype == *vocab::XSD_FLOAT {
            is_xsd_float(&lexical) || matches!(lexical.as_str(), "INF" | "+INF" | "-INF" | "NaN")
        } else if datatype == *vocab::XSD_BOOLEAN {
            is_xsd_boolean(&lexical)
        } else {
            true
        };
        if !ok {
            return Err(TermError::InvalidLexical {
                lexical,
                datatype: datatype.as_str().into(),
            });
        }
        Ok(Literal {
            lexical,
            datatype,
            language: None,
        })
    }

    pub fn string(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: vocab::XSD_STRING.clone(),
            language: None,
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }
}

/// An RDF term in object position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Iri(Iri),
    Literal(Literal),
}

impl Node {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Node::Iri(i) => Some(i),
            Node::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Node::Literal(l) => Some(l),
            Node::Iri(_) => None,
        }
    }
}

impl From<Iri> for Node {
    fn from(i: Iri) -> Self {
        Node::Iri(i)
    }
}

impl From<Literal> for Node {
    fn from(l: Literal) -> Self {
        Node::Literal(l)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Node,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Node>) -> Self {
        Triple {
            subject,
            predicate,
            object: object.into(),
        }
    }
}

pub(crate) fn escape_string(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            c if c.is_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::with_capacity(self.lexical.len() + 2);
        s.push('"');
        escape_string(&self.lexical, &mut s);
        s.push('"');
        match &self.language {
            Some(lang) => write!(f, "{s}@{lang}"),
            None => write!(f, "{s}^^{}", self.datatype),
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Iri(i) => i.fmt(f),
            Node::Literal(l) => l.fmt(f),
        }
    }
}

/// Renders as an N-Triples statement without the line terminator.
impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

impl Serialize for Literal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match super::ntriples::parse_term(&s).map_err(serde::de::Error::custom)? {
            Node::Literal(l) => Ok(l),
            Node::Iri(_) => Err(serde::de::Error::custom("expected a literal")),
        }
    }
}

impl Serialize for Triple {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Triple {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        super::ntriples::parse_statement(&s).map_err(serde::de::Error::custom)
    }
}
