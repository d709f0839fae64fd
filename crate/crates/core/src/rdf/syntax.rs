//! Character cursor and lexical helpers shared by the N-Triples and Turtle
//! parsers.

use super::term::{is_forbidden_iri_char, Iri, Literal, TermError};
use super::vocab;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Self::at_line(src, 1)
    }

    pub fn at_line(src: &'a str, line: usize) -> Self {
        Cursor {
            src,
            pos: 0,
            line,
            column: 1,
        }
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn peek_nth(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    pub fn is_eof(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    pub fn starts_with(&self, s: &str) -> bool {
        self.rest().starts_with(s)
    }

    pub fn eat(&mut self, s: &str) -> bool {
        if self.starts_with(s) {
            for _ in s.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(got) if got == c => {
                self.bump();
                Ok(())
            }
            Some(got) => Err(self.error(format!("expected '{c}', found '{got}'"))),
            None => Err(self.error(format!("expected '{c}', found end of input"))),
        }
    }

    pub fn position(&self) -> (usize, usize) {
        (self.line, self.column)
    }

    pub fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    /// Skips spaces and tabs only.
    pub fn skip_inline_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.bump();
        }
    }

    /// Skips all whitespace and `#` comments.
    pub fn skip_ws_and_comments(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn hex_escape(&mut self, digits: usize) -> Result<char, SyntaxError> {
        let mut value = 0u32;
        for _ in 0..digits {
            let d = self
                .peek()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.error("invalid unicode escape"))?;
            self.bump();
            value = value * 16 + d;
        }
        char::from_u32(value).ok_or_else(|| self.error("escape is not a unicode scalar value"))
    }

    /// `<...>` with `\u`/`\U` escapes. The result must be an absolute IRI.
    pub fn iriref(&mut self) -> Result<Iri, SyntaxError> {
        let (line, column) = (self.line, self.column);
        self.expect('<')?;
        let mut value = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error("unterminated IRI")),
                Some('>') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('u') => self.hex_escape(4)?,
                        Some('U') => self.hex_escape(8)?,
                        _ => return Err(self.error("invalid escape in IRI")),
                    };
                    value.push(c);
                }
                Some(c) if is_forbidden_iri_char(c) => {
                    return Err(self.error(format!("character {c:?} not allowed in IRI")))
                }
                Some(c) => value.push(c),
            }
        }
        Iri::new(&value).map_err(|e| SyntaxError {
            line,
            column,
            message: e.to_string(),
        })
    }

    /// A quoted string. `allow_turtle` enables single quotes and the
    /// triple-quoted long forms.
    pub fn quoted_string(&mut self, allow_turtle: bool) -> Result<String, SyntaxError> {
        let quote = match self.peek() {
            Some('"') => '"',
            Some('\'') if allow_turtle => '\'',
            _ => return Err(self.error("expected string literal")),
        };
        let long_delim: String = std::iter::repeat_n(quote, 3).collect();
        let long = allow_turtle && self.starts_with(&long_delim);
        if long {
            self.eat(&long_delim);
        } else {
            self.bump();
        }
        let mut value = String::new();
        loop {
            if long && self.starts_with(&long_delim) {
                // A long string may end with up to two extra quote characters.
                while self.rest().starts_with(&format!("{long_delim}{quote}")) {
                    value.push(quote);
                    self.bump();
                }
                self.eat(&long_delim);
                return Ok(value);
            }
            match self.bump() {
                None => return Err(self.error("unterminated string literal")),
                Some(c) if c == quote && !long => return Ok(value),
                Some('\n' | '\r') if !long => return Err(self.error("line break in string literal")),
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_escape(4)?,
                        Some('U') => self.hex_escape(8)?,
                        _ => return Err(self.error("invalid escape sequence")),
                    };
                    value.push(c);
                }
                Some(c) => value.push(c),
            }
        }
    }

    /// Language tag following an `@`.
    pub fn lang_tag(&mut self) -> Result<String, SyntaxError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
            self.bump();
        }
        let tag = &self.src[start..self.pos];
        if tag.is_empty() {
            return Err(self.error("empty language tag"));
        }
        Ok(tag.to_string())
    }

    pub fn term_error(&self, e: TermError) -> SyntaxError {
        self.error(e.to_string())
    }

    pub fn lang_literal(&self, lexical: String, tag: &str) -> Result<Literal, SyntaxError> {
        Literal::lang_string(lexical, tag).map_err(|e| self.term_error(e))
    }

    pub fn typed_literal(&self, lexical: String, datatype: Iri) -> Result<Literal, SyntaxError> {
        if datatype == *vocab::XSD_STRING {
            return Ok(Literal::string(lexical));
        }
        Literal::typed(lexical, datatype).map_err(|e| self.term_error(e))
    }
}
