//! A Turtle subset: prefix directives, predicate lists (`;`), object lists
//! (`,`), the `a` keyword, prefixed names, and string, numeric and boolean
//! literals. Blank nodes, collections and `@base` are not supported.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::graph::Graph;
use super::syntax::{Cursor, SyntaxError};
use super::term::{escape_string, Iri, Literal, Node, Triple};
use super::vocab;

pub fn parse(text: &str) -> Result<Graph, SyntaxError> {
    let mut parser = Parser {
        cur: Cursor::new(text),
        prefixes: BTreeMap::new(),
        graph: Graph::new(),
    };
    parser.document()?;
    let Parser {
        prefixes, mut graph, ..
    } = parser;
    for (p, ns) in prefixes {
        graph.set_namespace(p, ns);
    }
    Ok(graph)
}

struct Parser<'a> {
    cur: Cursor<'a>,
    prefixes: BTreeMap<String, Iri>,
    graph: Graph,
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '\u{b7}')
}

impl Parser<'_> {
    fn document(&mut self) -> Result<(), SyntaxError> {
        loop {
            self.cur.skip_ws_and_comments();
            if self.cur.is_eof() {
                return Ok(());
            }
            if self.cur.eat("@prefix") {
                self.prefix_decl(true)?;
            } else if self.keyword_ci("PREFIX") {
                self.prefix_decl(false)?;
            } else if self.cur.starts_with("@base") || self.keyword_ci_peek("BASE") {
                return Err(self.cur.error("@base is not supported"));
            } else {
                self.triples()?;
            }
        }
    }

    fn keyword_ci_peek(&self, kw: &str) -> bool {
        let rest = self.cur.rest();
        rest.len() >= kw.len()
            && rest[..kw.len()].eq_ignore_ascii_case(kw)
            && rest[kw.len()..].starts_with(char::is_whitespace)
    }

    fn keyword_ci(&mut self, kw: &str) -> bool {
        if self.keyword_ci_peek(kw) {
            for _ in 0..kw.len() {
                self.cur.bump();
            }
            true
        } else {
            false
        }
    }

    fn prefix_decl(&mut self, dotted: bool) -> Result<(), SyntaxError> {
        self.cur.skip_ws_and_comments();
        let prefix = self.prefix_name()?;
        self.cur.expect(':')?;
        self.cur.skip_ws_and_comments();
        let ns = self.cur.iriref()?;
        if dotted {
            self.cur.skip_ws_and_comments();
            self.cur.expect('.')?;
        }
        self.prefixes.insert(prefix, ns);
        Ok(())
    }

    fn prefix_name(&mut self) -> Result<String, SyntaxError> {
        let mut name = String::new();
        if matches!(self.cur.peek(), Some(c) if c.is_alphabetic()) {
            while let Some(c) = self.cur.peek() {
                let inner_dot = c == '.' && matches!(self.cur.peek_nth(1), Some(n) if is_name_char(n) || n == '.');
                if is_name_char(c) || inner_dot {
                    name.push(c);
                    self.cur.bump();
                } else {
                    break;
                }
            }
        }
        Ok(name)
    }

    fn triples(&mut self) -> Result<(), SyntaxError> {
        if self.cur.starts_with("_:") || self.cur.peek() == Some('[') {
            return Err(self.cur.error("blank nodes are not supported"));
        }
        if self.cur.peek() == Some('(') {
            return Err(self.cur.error("collections are not supported"));
        }
        let subject = self.iri()?;
        self.cur.skip_ws_and_comments();
        loop {
            let predicate = self.verb()?;
            loop {
                self.cur.skip_ws_and_comments();
                let object = self.object()?;
                self.graph
                    .insert(Triple::new(subject.clone(), predicate.clone(), object));
                self.cur.skip_ws_and_comments();
                if !self.cur.eat(",") {
                    break;
                }
            }
            // one or more ';' may separate predicates, and may trail before '.'
            let mut saw_semicolon = false;
            while self.cur.eat(";") {
                saw_semicolon = true;
                self.cur.skip_ws_and_comments();
            }
            if self.cur.eat(".") {
                return Ok(());
            }
            if !saw_semicolon {
                return Err(self.cur.error("expected ';', ',' or '.'"));
            }
        }
    }

    fn verb(&mut self) -> Result<Iri, SyntaxError> {
        if self.cur.peek() == Some('a')
            && !matches!(self.cur.peek_nth(1), Some(c) if is_name_char(c) || c == ':' || c == '.')
        {
            self.cur.bump();
            return Ok(vocab::RDF_TYPE.clone());
        }
        self.iri()
    }

    fn iri(&mut self) -> Result<Iri, SyntaxError> {
        match self.cur.peek() {
            Some('<') => self.cur.iriref(),
            Some(c) if is_name_start(c) || c == ':' => self.prefixed_name(),
            Some(c) => Err(self.cur.error(format!("expected IRI, found '{c}'"))),
            None => Err(self.cur.error("expected IRI, found end of input")),
        }
    }

    fn prefixed_name(&mut self) -> Result<Iri, SyntaxError> {
        let (line, column) = self.cur.position();
        let prefix = self.prefix_name()?;
        if self.cur.peek() != Some(':') {
            return Err(SyntaxError {
                line,
                column,
                message: format!("expected prefixed name, found {prefix:?}"),
            });
        }
        self.cur.bump();
        let local = self.local_name()?;
        let ns = self.prefixes.get(&prefix).ok_or_else(|| SyntaxError {
            line,
            column,
            message: format!("undeclared prefix {prefix:?}"),
        })?;
        Iri::new(format!("{}{}", ns.as_str(), local)).map_err(|e| SyntaxError {
            line,
            column,
            message: e.to_string(),
        })
    }

    fn local_name(&mut self) -> Result<String, SyntaxError> {
        let mut local = String::new();
        loop {
            match self.cur.peek() {
                Some(c) if is_name_char(c) || c == ':' => {
                    local.push(c);
                    self.cur.bump();
                }
                Some('.') => {
                    // a dot is only part of the name when more name follows
                    match self.cur.peek_nth(1) {
                        Some(n) if is_name_char(n) || n == ':' || n == '%' || n == '\\' => {
                            local.push('.');
                            self.cur.bump();
                        }
                        _ => break,
                    }
                }
                Some('%') => {
                    self.cur.bump();
                    for _ in 0..2 {
                        match self.cur.peek() {
                            Some(h) if h.is_ascii_hexdigit() => {
                                local.push(h);
                                self.cur.bump();
                            }
                            _ => return Err(self.cur.error("invalid percent escape")),
                        }
                    }
                    let len = local.len();
                    local.insert(len - 2, '%');
                }
                Some('\\') => {
                    self.cur.bump();
                    match self.cur.bump() {
                        Some(c) if "_~.-!$&'()*+,;=/?#@%".contains(c) => local.push(c),
                        _ => return Err(self.cur.error("invalid local name escape")),
                    }
                }
                _ => break,
            }
        }
        Ok(local)
    }

    fn object(&mut self) -> Result<Node, SyntaxError> {
        match self.cur.peek() {
            Some('"' | '\'') => Ok(Node::Literal(self.string_literal()?)),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') => Ok(Node::Literal(self.numeric_literal()?)),
            Some('[') => Err(self.cur.error("blank nodes are not supported")),
            Some('(') => Err(self.cur.error("collections are not supported")),
            _ if self.cur.starts_with("_:") => Err(self.cur.error("blank nodes are not supported")),
            _ => {
                for kw in ["true", "false"] {
                    if self.cur.starts_with(kw)
                        && !matches!(self.cur.rest()[kw.len()..].chars().next(), Some(c) if is_name_char(c) || c == ':')
                    {
                        self.cur.eat(kw);
                        return Ok(Node::Literal(
                            self.cur.typed_literal(kw.into(), vocab::XSD_BOOLEAN.clone())?,
                        ));
                    }
                }
                Ok(Node::Iri(self.iri()?))
            }
        }
    }

    fn string_literal(&mut self) -> Result<Literal, SyntaxError> {
        let lexical = self.cur.quoted_string(true)?;
        if self.cur.eat("@") {
            let tag = self.cur.lang_tag()?;
            self.cur.lang_literal(lexical, &tag)
        } else if self.cur.eat("^^") {
            let dt = self.iri()?;
            self.cur.typed_literal(lexical, dt)
        } else {
            Ok(Literal::string(lexical))
        }
    }

    fn numeric_literal(&mut self) -> Result<Literal, SyntaxError> {
        let rest = self.cur.rest();
        let b = rest.as_bytes();
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
        let mut has_dot = false;
        if i + 1 < b.len() && b[i] == b'.' && b[i + 1].is_ascii_digit() {
            has_dot = true;
            i += 1;
            let s = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            frac_digits = i - s;
        }
        if int_digits == 0 && frac_digits == 0 {
            return Err(self.cur.error("invalid numeric literal"));
        }
        let mut has_exp = false;
        if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
            let mut j = i + 1;
            if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                j += 1;
            }
            let s = j;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            if j == s {
                return Err(self.cur.error("invalid exponent"));
            }
            has_exp = true;
            i = j;
        }
        let lexical = rest[..i].to_string();
        for _ in 0..i {
            self.cur.bump();
        }
        let dt = if has_exp {
            vocab::XSD_DOUBLE.clone()
        } else if has_dot {
            vocab::XSD_DECIMAL.clone()
        } else {
            vocab::XSD_INTEGER.clone()
        };
        self.cur.typed_literal(lexical, dt)
    }
}

/// Local names the writer may emit unescaped.
fn is_safe_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        }
        _ => false,
    }
}

struct Abbreviator {
    // longest namespace first so the most specific prefix wins
    prefixes: Vec<(String, String)>,
}

impl Abbreviator {
    fn new(graph: &Graph) -> Self {
        let mut map: BTreeMap<String, String> = vocab::well_known_prefixes()
            .iter()
            .map(|(p, ns)| (p.to_string(), ns.to_string()))
            .collect();
        for (p, ns) in graph.namespaces() {
            if is_safe_prefix(p) {
                map.insert(p.clone(), ns.as_str().to_string());
            }
        }
        let mut prefixes: Vec<(String, String)> = map.into_iter().collect();
        prefixes.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then_with(|| a.0.cmp(&b.0)));
        Abbreviator { prefixes }
    }

    fn abbreviate(&self, iri: &Iri) -> Option<(&str, &str, String)> {
        self.prefixes.iter().find_map(|(p, ns)| {
            let local = iri.as_str().strip_prefix(ns.as_str())?;
            is_safe_local(local).then(|| (p.as_str(), ns.as_str(), format!("{p}:{local}")))
        })
    }
}

fn is_safe_prefix(p: &str) -> bool {
    let mut chars = p.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphabetic() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'),
        _ => false,
    }
}

pub fn serialize(graph: &Graph) -> String {
    let abbrev = Abbreviator::new(graph);
    let mut used: BTreeMap<&str, &str> = BTreeMap::new();
    let mut term = |iri: &Iri| -> String {
        match abbrev.abbreviate(iri) {
            Some((p, ns, short)) => {
                used.insert(p, ns);
                short
            }
            None => iri.to_string(),
        }
    };

    let mut body = String::new();
    let mut triples = graph.sorted_triples();
    // rdf:type first within each subject; the sort is stable
    let mut start = 0;
    while start < triples.len() {
        let end = start
            + triples[start..]
                .iter()
                .take_while(|t| t.subject == triples[start].subject)
                .count();
        let block = &mut triples[start..end];
        block.sort_by_key(|t| t.predicate != *vocab::RDF_TYPE);

        let _ = write!(body, "{}", term(&block[0].subject));
        let mut i = 0;
        while i < block.len() {
            let predicate = &block[i].predicate;
            let run = block[i..].iter().take_while(|t| &t.predicate == predicate).count();
            let verb = if *predicate == *vocab::RDF_TYPE {
                "a".to_string()
            } else {
                term(predicate)
            };
            let objects: Vec<String> = block[i..i + run]
                .iter()
                .map(|t| match &t.object {
                    Node::Iri(o) => term(o),
                    Node::Literal(l) => literal(l, &mut term),
                })
                .collect();
            let indent = if i == 0 { " " } else { "    " };
            let _ = write!(body, "{indent}{verb} {}", objects.join(" , "));
            i += run;
            body.push_str(if i == block.len() { " .\n" } else { " ;\n" });
        }
        body.push('\n');
        start = end;
    }

    let mut out = String::new();
    for (p, ns) in &used {
        let _ = writeln!(out, "@prefix {p}: <{ns}> .");
    }
    if !used.is_empty() {
        out.push('\n');
    }
    out.push_str(&body);
    out
}

fn literal(l: &Literal, term: &mut impl FnMut(&Iri) -> String) -> String {
    let mut s = String::from("\"");
    escape_string(l.lexical(), &mut s);
    s.push('"');
    if let Some(lang) = l.language() {
        s.push('@');
        s.push_str(lang);
    } else if *l.datatype() != *vocab::XSD_STRING {
        s.push_str("^^");
        s.push_str(&term(l.datatype()));
    }
    s
}
