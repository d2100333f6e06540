//! Parser for the TriG subset used by nanopublications.
//!
//! Supported: `@prefix` declarations, named graph blocks, `;` and `,`
//! continuations, `a`, prefixed names, `<IRI>`, short and long strings with
//! optional datatype or language tag, bare integers, `_:label` blank nodes
//! and `#` comments. Everything else is a syntax error.

use std::collections::HashMap;

use super::{is_absolute_iri, Dataset, Iri, Literal, Quad, RdfError, Term, XSD_INTEGER};

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Prefix,
    IriRef(String),
    PName(String, String),
    Blank(String),
    Str(String),
    Integer(String),
    LangTag(String),
    Carets,
    A,
    Dot,
    Semicolon,
    Comma,
    LBrace,
    RBrace,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
    last_was_string: bool,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> RdfError {
    RdfError::Syntax { line, column, message: message.into() }
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '%')
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1, column: 1, last_was_string: false }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn tokenize(mut self) -> Result<Vec<Token>, RdfError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let (line, column) = (self.line, self.column);
            let Some(c) = self.peek() else {
                out.push(Token { tok: Tok::Eof, line, column });
                return Ok(out);
            };
            let tok = match c {
                '<' => {
                    self.bump();
                    let mut iri = String::new();
                    loop {
                        match self.bump() {
                            Some('>') => break,
                            Some(c) if c.is_whitespace() || "<\"{}|^`\\".contains(c) => {
                                return Err(syntax(
                                    self.line,
                                    self.column - 1,
                                    format!("illegal character {c:?} in IRI"),
                                ))
                            }
                            Some(c) => iri.push(c),
                            None => return Err(syntax(line, column, "unterminated IRI")),
                        }
                    }
                    if !is_absolute_iri(&iri) {
                        return Err(RdfError::RelativeIri { iri, line, column });
                    }
                    Tok::IriRef(iri)
                }
                '"' => Tok::Str(self.string(line, column)?),
                '@' => {
                    self.bump();
                    let mut word = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_alphanumeric() || c == '-' {
                            word.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if self.last_was_string {
                        if word.is_empty() || !word.starts_with(|c: char| c.is_ascii_alphabetic()) {
                            return Err(syntax(line, column, "malformed language tag"));
                        }
                        Tok::LangTag(word)
                    } else if word == "prefix" {
                        Tok::Prefix
                    } else {
                        return Err(syntax(line, column, format!("unsupported directive @{word}")));
                    }
                }
                '^' => {
                    self.bump();
                    if self.bump() != Some('^') {
                        return Err(syntax(line, column, "expected '^^'"));
                    }
                    Tok::Carets
                }
                '.' => {
                    self.bump();
                    Tok::Dot
                }
                ';' => {
                    self.bump();
                    Tok::Semicolon
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '{' => {
                    self.bump();
                    Tok::LBrace
                }
                '}' => {
                    self.bump();
                    Tok::RBrace
                }
                '_' => {
                    self.bump();
                    if self.bump() != Some(':') {
                        return Err(syntax(line, column, "expected '_:' blank node"));
                    }
                    let mut label = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' {
                            label.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if label.is_empty() {
                        return Err(syntax(line, column, "empty blank node label"));
                    }
                    Tok::Blank(label)
                }
                c if c.is_ascii_digit() || c == '+' || c == '-' => {
                    let mut num = String::new();
                    num.push(c);
                    self.bump();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_digit() {
                            num.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if !num.chars().any(|c| c.is_ascii_digit()) {
                        return Err(syntax(line, column, "malformed integer"));
                    }
                    if matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == '_') {
                        return Err(syntax(line, column, "malformed integer"));
                    }
                    Tok::Integer(num)
                }
                c if c.is_ascii_alphabetic() || c == ':' => {
                    let mut word = String::new();
                    while let Some(c) = self.peek() {
                        if is_name_char(c) {
                            word.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    // A trailing '.' terminates the statement, not the name.
                    let mut dots = 0;
                    while word.ends_with('.') {
                        word.pop();
                        dots += 1;
                    }
                    let tok = if word == "a" {
                        Tok::A
                    } else if let Some((prefix, local)) = word.split_once(':') {
                        if !prefix.is_empty() && !prefix.starts_with(|c: char| c.is_ascii_alphabetic()) {
                            return Err(syntax(line, column, format!("invalid prefix in {word:?}")));
                        }
                        Tok::PName(prefix.to_string(), local.to_string())
                    } else {
                        return Err(syntax(line, column, format!("unexpected word {word:?}")));
                    };
                    out.push(Token { tok, line, column });
                    for i in 0..dots {
                        out.push(Token { tok: Tok::Dot, line, column: column + word.len() + i });
                    }
                    self.last_was_string = false;
                    continue;
                }
                other => return Err(syntax(line, column, format!("unexpected character {other:?}"))),
            };
            self.last_was_string = matches!(tok, Tok::Str(_));
            out.push(Token { tok, line, column });
        }
    }

    fn string(&mut self, line: usize, column: usize) -> Result<String, RdfError> {
        self.bump();
        let long = if self.peek() == Some('"') {
            self.bump();
            if self.peek() == Some('"') {
                self.bump();
                true
            } else {
                return Ok(String::new());
            }
        } else {
            false
        };
        let mut s = String::new();
        loop {
            let Some(c) = self.bump() else {
                return Err(syntax(line, column, "unterminated string"));
            };
            match c {
                '"' if !long => return Ok(s),
                '"' if long => {
                    if self.peek() == Some('"') {
                        self.bump();
                        if self.peek() == Some('"') {
                            self.bump();
                            return Ok(s);
                        }
                        s.push_str("\"\"");
                    } else {
                        s.push('"');
                    }
                }
                '\n' | '\r' if !long => return Err(syntax(self.line, self.column, "newline in short string")),
                '\\' => {
                    let (el, ec) = (self.line, self.column);
                    let e = self.bump().ok_or_else(|| syntax(el, ec, "dangling escape"))?;
                    match e {
                        't' => s.push('\t'),
                        'b' => s.push('\u{8}'),
                        'n' => s.push('\n'),
                        'r' => s.push('\r'),
                        'f' => s.push('\u{c}'),
                        '"' => s.push('"'),
                        '\'' => s.push('\''),
                        '\\' => s.push('\\'),
                        'u' | 'U' => {
                            let n = if e == 'u' { 4 } else { 8 };
                            let mut hex = String::new();
                            for _ in 0..n {
                                hex.push(self.bump().ok_or_else(|| syntax(el, ec, "short \\u escape"))?);
                            }
                            let cp = u32::from_str_radix(&hex, 16)
                                .ok()
                                .and_then(char::from_u32)
                                .ok_or_else(|| syntax(el, ec, format!("bad escape \\{e}{hex}")))?;
                            s.push(cp);
                        }
                        other => return Err(syntax(el, ec, format!("unknown escape \\{other}"))),
                    }
                }
                c => s.push(c),
            }
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    prefixes: HashMap<String, String>,
    dataset: Dataset,
    lenient: bool,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token, RdfError> {
        let t = self.next();
        if t.tok == want {
            Ok(t)
        } else {
            Err(syntax(t.line, t.column, format!("expected {what}, found {:?}", t.tok)))
        }
    }

    fn run(mut self) -> Result<Dataset, RdfError> {
        loop {
            let t = self.peek().clone();
            match t.tok {
                Tok::Eof => return Ok(self.dataset),
                Tok::Prefix => self.prefix_decl()?,
                Tok::IriRef(_) | Tok::PName(..) => self.graph_block()?,
                other => {
                    return Err(syntax(t.line, t.column, format!("expected @prefix or graph name, found {other:?}")))
                }
            }
        }
    }

    fn prefix_decl(&mut self) -> Result<(), RdfError> {
        self.next();
        let t = self.next();
        let Tok::PName(prefix, local) = t.tok else {
            return Err(syntax(t.line, t.column, "expected prefix name"));
        };
        if !local.is_empty() {
            return Err(syntax(t.line, t.column, "prefix name must end with ':'"));
        }
        let t = self.next();
        let Tok::IriRef(ns) = t.tok else {
            return Err(syntax(t.line, t.column, "expected namespace IRI"));
        };
        self.expect(Tok::Dot, "'.'")?;
        self.dataset.set_prefix(prefix.clone(), ns.clone());
        self.prefixes.insert(prefix, ns);
        Ok(())
    }

    fn iri(&self, t: &Token) -> Result<Iri, RdfError> {
        match &t.tok {
            Tok::IriRef(s) => Ok(Iri::new_unchecked(s.clone())),
            Tok::PName(p, l) => {
                let ns =
                    self.prefixes.get(p).ok_or_else(|| syntax(t.line, t.column, format!("undefined prefix {p:?}")))?;
                let full = format!("{ns}{l}");
                if !is_absolute_iri(&full) {
                    return Err(RdfError::RelativeIri { iri: full, line: t.line, column: t.column });
                }
                Ok(Iri::new_unchecked(full))
            }
            other => Err(syntax(t.line, t.column, format!("expected IRI, found {other:?}"))),
        }
    }

    fn graph_block(&mut self) -> Result<(), RdfError> {
        let t = self.next();
        let graph = self.iri(&t)?;
        self.expect(Tok::LBrace, "'{'")?;
        loop {
            if self.peek().tok == Tok::RBrace {
                self.next();
                return Ok(());
            }
            self.triples(&graph)?;
            let t = self.next();
            match t.tok {
                Tok::Dot => {}
                Tok::RBrace => return Ok(()),
                other => return Err(syntax(t.line, t.column, format!("expected '.' or '}}', found {other:?}"))),
            }
        }
    }

    fn subject(&mut self) -> Result<Term, RdfError> {
        let t = self.next();
        match &t.tok {
            Tok::Blank(l) => Ok(Term::BlankNode(l.clone())),
            Tok::IriRef(_) | Tok::PName(..) => Ok(Term::Iri(self.iri(&t)?)),
            other => Err(syntax(t.line, t.column, format!("expected subject, found {other:?}"))),
        }
    }

    fn verb(&mut self) -> Result<Iri, RdfError> {
        let t = self.next();
        match &t.tok {
            Tok::A => Ok(Iri::new_unchecked(RDF_TYPE)),
            Tok::IriRef(_) | Tok::PName(..) => self.iri(&t),
            other => Err(syntax(t.line, t.column, format!("expected predicate, found {other:?}"))),
        }
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        let t = self.next();
        match &t.tok {
            Tok::Blank(l) => Ok(Term::BlankNode(l.clone())),
            Tok::IriRef(_) | Tok::PName(..) => Ok(Term::Iri(self.iri(&t)?)),
            Tok::Integer(n) => Ok(Term::Literal(Literal::typed(n.clone(), Iri::new_unchecked(XSD_INTEGER)))),
            Tok::Str(s) => {
                let s = s.clone();
                match self.peek().tok.clone() {
                    Tok::LangTag(lang) => {
                        self.next();
                        Ok(Term::Literal(Literal::lang(s, lang)))
                    }
                    Tok::Carets => {
                        self.next();
                        let dt = self.next();
                        let dt = self.iri(&dt)?;
                        Ok(Term::Literal(Literal::typed(s, dt)))
                    }
                    _ => Ok(Term::Literal(Literal::simple(s))),
                }
            }
            other => Err(syntax(t.line, t.column, format!("expected object, found {other:?}"))),
        }
    }

    fn triples(&mut self, graph: &Iri) -> Result<(), RdfError> {
        let subject = self.subject()?;
        loop {
            let predicate = self.verb()?;
            if self.lenient {
                while self.peek().tok == Tok::Comma {
                    self.next();
                }
            }
            loop {
                let object = self.object()?;
                self.dataset.insert(Quad {
                    graph: graph.clone(),
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                match self.peek().tok {
                    Tok::Comma => {
                        self.next();
                    }
                    Tok::IriRef(_) | Tok::PName(..) | Tok::Blank(_) | Tok::Str(_) | Tok::Integer(_) if self.lenient => {
                    }
                    _ => break,
                }
            }
            if self.peek().tok != Tok::Semicolon {
                return Ok(());
            }
            while self.peek().tok == Tok::Semicolon {
                self.next();
            }
            if matches!(self.peek().tok, Tok::Dot | Tok::RBrace) {
                return Ok(());
            }
        }
    }
}

/// Parses a TriG-subset document. Quads keep document order; duplicates
/// are dropped.
pub fn parse_trig(text: &str) -> Result<Dataset, RdfError> {
    parse(text, false)
}

/// Like [`parse_trig`], but tolerates misplaced commas in object lists as
/// found in hand-edited listings: a comma straight after the predicate is
/// skipped and objects separated only by whitespace are read as a list.
pub fn parse_trig_lenient(text: &str) -> Result<Dataset, RdfError> {
    parse(text, true)
}

fn parse(text: &str, lenient: bool) -> Result<Dataset, RdfError> {
    let tokens = Lexer::new(text).tokenize()?;
    Parser { tokens, pos: 0, prefixes: HashMap::new(), dataset: Dataset::new(), lenient }.run()
}
