//! N-Triples reading and writing.
//!
//! Output is canonical: one statement per line, lines sorted bytewise, each
//! terminated by `\n`. Blank nodes are rejected on input.

use super::graph::Graph;
use super::syntax::{Cursor, SyntaxError};
use super::term::{Literal, Node, Triple};
use super::vocab;

pub fn serialize(graph: &Graph) -> String {
    let mut lines: Vec<String> = graph.iter().map(|t| t.to_string()).collect();
    lines.sort_unstable();
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn parse(text: &str) -> Result<Graph, SyntaxError> {
    let mut graph = Graph::new();
    for (i, line) in text.split('\n').enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if let Some(t) = parse_line(line, i + 1)? {
            graph.insert(t);
        }
    }
    Ok(graph)
}

/// Parses a single statement, e.g. as carried in change-feed payloads.
pub fn parse_statement(text: &str) -> Result<Triple, SyntaxError> {
    parse_line(text, 1)?.ok_or_else(|| SyntaxError {
        line: 1,
        column: 1,
        message: "expected a statement".into(),
    })
}

/// Parses a single IRI or literal term in N-Triples syntax.
pub fn parse_term(text: &str) -> Result<Node, SyntaxError> {
    let mut cur = Cursor::new(text);
    let node = match cur.peek() {
        Some('<') => Node::Iri(cur.iriref()?),
        Some('"') => Node::Literal(literal(&mut cur)?),
        _ => return Err(cur.error("expected IRI or literal")),
    };
    if !cur.is_eof() {
        return Err(cur.error("unexpected content after term"));
    }
    Ok(node)
}

fn parse_line(line: &str, number: usize) -> Result<Option<Triple>, SyntaxError> {
    let mut cur = Cursor::at_line(line, number);
    cur.skip_inline_ws();
    if cur.is_eof() || cur.peek() == Some('#') {
        return Ok(None);
    }
    if cur.starts_with("_:") {
        return Err(cur.error("blank nodes are not supported"));
    }
    let subject = cur.iriref()?;
    cur.skip_inline_ws();
    let predicate = cur.iriref()?;
    cur.skip_inline_ws();
    let object = match cur.peek() {
        Some('<') => Node::Iri(cur.iriref()?),
        Some('"') => Node::Literal(literal(&mut cur)?),
        Some('_') => return Err(cur.error("blank nodes are not supported")),
        _ => return Err(cur.error("expected IRI or literal")),
    };
    cur.skip_inline_ws();
    cur.expect('.')?;
    cur.skip_inline_ws();
    if !(cur.is_eof() || cur.peek() == Some('#')) {
        return Err(cur.error("unexpected content after statement"));
    }
    Ok(Some(Triple::new(subject, predicate, object)))
}

fn literal(cur: &mut Cursor<'_>) -> Result<Literal, SyntaxError> {
    let lexical = cur.quoted_string(false)?;
    if cur.eat("@") {
        let tag = cur.lang_tag()?;
        cur.lang_literal(lexical, &tag)
    } else if cur.eat("^^") {
        let dt = cur.iriref()?;
        cur.typed_literal(lexical, dt)
    } else {
        cur.typed_literal(lexical, vocab::XSD_STRING.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Iri;

    #[test]
    fn empty_round_trip() {
        assert_eq!(serialize(&Graph::new()), "");
        assert!(parse("").unwrap().is_empty());
    }

    #[test]
    fn single_triple_rendering() {
        let mut g = Graph::new();
        g.insert(Triple::new(
            Iri::new("http://example.org/a").unwrap(),
            vocab::RDFS_LABEL.clone(),
            Literal::lang_string("X", "en").unwrap(),
        ));
        assert_eq!(
            serialize(&g),
            "<http://example.org/a> <http://www.w3.org/2000/01/rdf-schema#label> \"X\"@en .\n"
        );
    }

    #[test]
    fn garbage_reports_line_one() {
        let err = parse("garbage line").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn error_line_numbers_count_from_one() {
        let text = "<http://a/s> <http://a/p> <http://a/o> .\n\n<http://a/s> <http://a/p> .\n";
        assert_eq!(parse(text).unwrap_err().line, 3);
    }

    #[test]
    fn duplicates_collapse_and_comments_skip() {
        let text = "# header\n<http://a/s> <http://a/p> \"x\" .\n<http://a/s> <http://a/p> \"x\"^^<http://www.w3.org/2001/XMLSchema#string> . # same\r\n";
        let g = parse(text).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn escapes_decode() {
        let g = parse(r#"<http://a/s> <http://a/p> "a\"bé\n" ."#).unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.object.as_literal().unwrap().lexical(), "a\"bé\n");
    }

    #[test]
    fn rejects_blank_nodes() {
        assert!(parse("_:b <http://a/p> <http://a/o> .").is_err());
        assert!(parse("<http://a/s> <http://a/p> _:b .").is_err());
    }

    #[test]
    fn rejects_bad_typed_lexical() {
        let err = parse(r#"<http://a/s> <http://a/p> "x"^^<http://www.w3.org/2001/XMLSchema#int> ."#).unwrap_err();
        assert!(err.message.contains("lexical"), "{err}");
    }
}
