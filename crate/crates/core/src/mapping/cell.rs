//! Classification of raw cell text.

use crate::rdf::is_forbidden_iri_char;
use crate::rdf::{is_xsd_float, is_xsd_int, vocab, Iri, Literal};

use super::MappingError;

/// What a piece of cell text asks the engine to do.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellIntent {
    /// A typed or language-tagged literal.
    Literal(Literal),
    /// A hyperlink used verbatim as the resource IRI.
    DirectIri(Iri),
    /// Text that names a resource by its label.
    Label(String),
}

fn direct_iri(text: &str) -> Option<Iri> {
    let colon = text.find("://")?;
    let scheme = &text[..colon];
    if !(scheme.eq_ignore_ascii_case("http") || scheme.eq_ignore_ascii_case("https")) {
        return None;
    }
    let rest = &text[colon + 3..];
    if rest.is_empty() || rest.chars().any(is_forbidden_iri_char) {
        return None;
    }
    Iri::new(text).ok()
}

fn typed_literal(text: &str) -> Option<Literal> {
    let datatype = if is_xsd_int(text) {
        &*vocab::XSD_INT
    } else if is_xsd_float(text) {
        &*vocab::XSD_FLOAT
    } else if matches!(text, "true" | "false") {
        &*vocab::XSD_BOOLEAN
    } else {
        return None;
    };
    Literal::typed(text, datatype.clone()).ok()
}

/// Classifies cell input.
///
/// A leading `'` forces a literal; the remainder still goes through the
/// integer, float and boolean checks and falls back to a language-tagged
/// string. Without the quote, an `http`/`https` IRI is used directly, typed
/// values become literals, and anything else names a resource.
pub fn parse_cell_input(text: &str, language: &str) -> Result<CellIntent, MappingError> {
    if text.is_empty() {
        return Err(MappingError::EmptyInput);
    }
    if let Some(rest) = text.strip_prefix('\'') {
        if let Some(lit) = typed_literal(rest) {
            return Ok(CellIntent::Literal(lit));
        }
        return Literal::lang_string(rest, language)
            .map(CellIntent::Literal)
            .map_err(MappingError::from);
    }
    if let Some(iri) = direct_iri(text) {
        return Ok(CellIntent::DirectIri(iri));
    }
    if let Some(lit) = typed_literal(text) {
        return Ok(CellIntent::Literal(lit));
    }
    Ok(CellIntent::Label(text.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(text: &str) -> Literal {
        match parse_cell_input(text, "en").unwrap() {
            CellIntent::Literal(l) => l,
            other => panic!("{text:?} classified as {other:?}"),
        }
    }

    #[test]
    fn quote_forces_lang_string() {
        let l = lit("'A");
        assert_eq!(l.lexical(), "A");
        assert_eq!(l.language(), Some("en"));
        assert_eq!(l.datatype(), &*vocab::RDF_LANG_STRING);
    }

    #[test]
    fn quoted_remainder_still_typed() {
        assert_eq!(lit("'42").datatype(), &*vocab::XSD_INT);
        assert_eq!(lit("'https://x.org/").datatype(), &*vocab::RDF_LANG_STRING);
    }

    #[test]
    fn booleans_and_numbers() {
        assert_eq!(lit("true").datatype(), &*vocab::XSD_BOOLEAN);
        assert_eq!(lit("false").datatype(), &*vocab::XSD_BOOLEAN);
        assert_eq!(lit("42").datatype(), &*vocab::XSD_INT);
        assert_eq!(lit("3.5").datatype(), &*vocab::XSD_FLOAT);
        assert_eq!(lit("1").datatype(), &*vocab::XSD_INT);
        assert_eq!(lit("2147483648").datatype(), &*vocab::XSD_FLOAT);
        assert_eq!(lit("-2147483648").datatype(), &*vocab::XSD_INT);
    }

    #[test]
    fn hyperlink_is_direct_iri() {
        assert_eq!(
            parse_cell_input("https://iswc2017.semanticweb.org/", "en").unwrap(),
            CellIntent::DirectIri(Iri::new("https://iswc2017.semanticweb.org/").unwrap())
        );
        assert_eq!(
            parse_cell_input("ftp://example.org/", "en").unwrap(),
            CellIntent::Label("ftp://example.org/".into())
        );
        assert_eq!(
            parse_cell_input("http://", "en").unwrap(),
            CellIntent::Label("http://".into())
        );
    }

    #[test]
    fn plain_text_is_a_label() {
        assert_eq!(
            parse_cell_input("ESWC", "en").unwrap(),
            CellIntent::Label("ESWC".into())
        );
        assert_eq!(
            parse_cell_input("True", "en").unwrap(),
            CellIntent::Label("True".into())
        );
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(parse_cell_input("", "en"), Err(MappingError::EmptyInput));
    }
}
