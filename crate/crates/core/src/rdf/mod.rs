//! Minimal RDF data model: terms, quads and datasets.
//!
//! Every quad lives in a named graph; there is no default graph. The
//! derived orderings on [`Term`] and [`Quad`] are the total order used by
//! the canonical serializer: IRIs sort before blank nodes, blank nodes
//! before literals, and values of the same class compare code point by code
//! point (lexical form, then datatype, then language tag).

mod parser;
mod serializer;

use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parser::{parse_trig, parse_trig_lenient};
pub use serializer::{serialize_canonical, serialize_trig};

pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RdfError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("relative IRI <{iri}> at {line}:{column}")]
    RelativeIri { iri: String, line: usize, column: usize },
    #[error("invalid IRI <{0}>")]
    InvalidIri(String),
    #[error("invalid blank node label {0:?}")]
    InvalidBlankNode(String),
}

/// An absolute IRI.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn new(iri: impl Into<String>) -> Result<Self, RdfError> {
        let iri = iri.into();
        if !is_absolute_iri(&iri) {
            return Err(RdfError::InvalidIri(iri));
        }
        Ok(Iri(iri))
    }

    /// Skips validation. Used for the hashing placeholder, which is
    /// deliberately not an absolute IRI.
    pub(crate) fn new_unchecked(iri: impl Into<String>) -> Self {
        Iri(iri.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The part before the first `#`.
    pub fn stem(&self) -> &str {
        self.0.split('#').next().unwrap_or(&self.0)
    }

    pub fn fragment(&self) -> Option<&str> {
        self.0.split_once('#').map(|(_, f)| f)
    }

    /// `self#fragment`, replacing any fragment already present.
    pub fn with_fragment(&self, fragment: &str) -> Iri {
        Iri(format!("{}#{}", self.stem(), fragment))
    }

    /// Last path segment or fragment; used as a fallback display label.
    pub fn local_name(&self) -> &str {
        let s = self.0.trim_end_matches(['/', '#']);
        match s.rfind(['#', '/', ':']) {
            Some(i) if i + 1 < s.len() => &s[i + 1..],
            _ => s,
        }
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Iri {
    type Error = RdfError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Iri::new(value)
    }
}

impl From<Iri> for String {
    fn from(value: Iri) -> Self {
        value.0
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Scheme, colon, then no characters that would break N-Quads or TriG.
pub fn is_absolute_iri(s: &str) -> bool {
    let Some((scheme, rest)) = s.split_once(':') else {
        return false;
    };
    let mut chars = scheme.chars();
    let scheme_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    scheme_ok
        && !rest.is_empty()
        && !s.chars().any(|c| c.is_control() || c.is_whitespace() || "<>\"{}|^`\\".contains(c))
}

fn is_valid_blank_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A literal carries at most one of datatype and language. Plain strings
/// and `xsd:string` literals are the same value and are stored without a
/// datatype.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Option<Iri>,
    language: Option<String>,
}

impl Literal {
    pub fn simple(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: None, language: None }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        let datatype = (datatype.as_str() != XSD_STRING).then_some(datatype);
        Literal { lexical: lexical.into(), datatype, language: None }
    }

    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: None, language: Some(language.into()) }
    }

    pub fn integer(value: i64) -> Self {
        Literal::typed(value.to_string(), Iri::new_unchecked(XSD_INTEGER))
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Option<&Iri> {
        self.datatype.as_ref()
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    BlankNode(String),
    Literal(Literal),
}

impl Term {
    pub fn blank(label: impl Into<String>) -> Result<Self, RdfError> {
        let label = label.into();
        if !is_valid_blank_label(&label) {
            return Err(RdfError::InvalidBlankNode(label));
        }
        Ok(Term::BlankNode(label))
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            _ => None,
        }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::BlankNode(_))
    }
}

impl From<Iri> for Term {
    fn from(value: Iri) -> Self {
        Term::Iri(value)
    }
}

impl From<&Iri> for Term {
    fn from(value: &Iri) -> Self {
        Term::Iri(value.clone())
    }
}

impl From<Literal> for Term {
    fn from(value: Literal) -> Self {
        Term::Literal(value)
    }
}

/// Fields are declared in canonical sort order: graph, subject, predicate,
/// object.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quad {
    pub graph: Iri,
    pub subject: Term,
    pub predicate: Iri,
    pub object: Term,
}

impl Quad {
    pub fn new(
        subject: impl Into<Term>,
        predicate: impl Into<Iri>,
        object: impl Into<Term>,
        graph: impl Into<Iri>,
    ) -> Self {
        Quad { graph: graph.into(), subject: subject.into(), predicate: predicate.into(), object: object.into() }
    }

    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        [self.subject.clone(), Term::Iri(self.predicate.clone()), self.object.clone(), Term::Iri(self.graph.clone())]
            .into_iter()
    }

    pub fn has_blank_node(&self) -> bool {
        self.subject.is_blank() || self.object.is_blank()
    }
}

impl From<&Iri> for Iri {
    fn from(value: &Iri) -> Self {
        value.clone()
    }
}

/// An ordered set of quads plus the prefixes used to present them.
///
/// Equality compares the quad sets only; prefixes and insertion order are
/// presentation.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    quads: IndexSet<Quad>,
    prefixes: BTreeMap<String, String>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.quads == other.quads
    }
}

impl Eq for Dataset {}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` when the quad was already present.
    pub fn insert(&mut self, quad: Quad) -> bool {
        self.quads.insert(quad)
    }

    pub fn remove(&mut self, quad: &Quad) -> bool {
        self.quads.shift_remove(quad)
    }

    pub fn contains(&self, quad: &Quad) -> bool {
        self.quads.contains(quad)
    }

    pub fn len(&self) -> usize {
        self.quads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quads.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Quad> {
        self.quads.iter()
    }

    pub fn quads_in<'a>(&'a self, graph: &'a Iri) -> impl Iterator<Item = &'a Quad> + 'a {
        self.quads.iter().filter(move |q| &q.graph == graph)
    }

    pub fn with_predicate<'a>(&'a self, predicate: &'a Iri) -> impl Iterator<Item = &'a Quad> + 'a {
        self.quads.iter().filter(move |q| &q.predicate == predicate)
    }

    /// Graph names in order of first appearance.
    pub fn graph_names(&self) -> Vec<Iri> {
        let mut seen = IndexSet::new();
        for q in &self.quads {
            seen.insert(q.graph.clone());
        }
        seen.into_iter().collect()
    }

    pub fn prefixes(&self) -> &BTreeMap<String, String> {
        &self.prefixes
    }

    pub fn set_prefix(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.prefixes.insert(prefix.into(), namespace.into());
    }

    pub fn merge(&mut self, other: &Dataset) {
        for q in &other.quads {
            self.quads.insert(q.clone());
        }
        for (p, ns) in &other.prefixes {
            self.prefixes.entry(p.clone()).or_insert_with(|| ns.clone());
        }
    }

    /// Rewrites every IRI term (graph names included) through `f`.
    pub fn map_iris(&self, mut f: impl FnMut(&Iri) -> Iri) -> Dataset {
        let map_term = |t: &Term, f: &mut dyn FnMut(&Iri) -> Iri| match t {
            Term::Iri(i) => Term::Iri(f(i)),
            other => other.clone(),
        };
        let quads = self
            .quads
            .iter()
            .map(|q| Quad {
                graph: f(&q.graph),
                subject: map_term(&q.subject, &mut f),
                predicate: f(&q.predicate),
                object: map_term(&q.object, &mut f),
            })
            .collect();
        Dataset { quads, prefixes: self.prefixes.clone() }
    }

    /// Copy holding only the quads of `graph`, moved into `target`.
    pub fn regraph(&self, target: &Iri) -> Dataset {
        let mut out = Dataset { quads: IndexSet::new(), prefixes: self.prefixes.clone() };
        for q in &self.quads {
            out.insert(Quad { graph: target.clone(), ..q.clone() });
        }
        out
    }
}

impl FromIterator<Quad> for Dataset {
    fn from_iter<T: IntoIterator<Item = Quad>>(iter: T) -> Self {
        Dataset { quads: iter.into_iter().collect(), prefixes: BTreeMap::new() }
    }
}

impl Extend<Quad> for Dataset {
    fn extend<T: IntoIterator<Item = Quad>>(&mut self, iter: T) {
        self.quads.extend(iter)
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Quad;
    type IntoIter = indexmap::set::Iter<'a, Quad>;
    fn into_iter(self) -> Self::IntoIter {
        self.quads.iter()
    }
}
