//! Finite-world semantics of super-pattern claims.
//!
//! A claim reads as a conditional probability over (context, subject) pairs:
//! of all `y` of the subject class placed in some `x` of the context class,
//! what fraction relate to at least one `z` of the object class in the same
//! `x`? The fraction is an exact rational and is compared against the
//! qualifier's threshold without any floating point.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::rdf::Iri;
use crate::superpattern::{Context, QualifierBase, SuperPattern};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("undeclared individual {0:?}")]
    Undeclared(String),
}

/// A finite instance model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct World {
    pub individuals: BTreeSet<String>,
    pub membership: BTreeSet<(String, Iri)>,
    pub in_context: BTreeSet<(String, String)>,
    pub relations: BTreeSet<(Iri, String, String)>,
}

impl World {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_individual(&mut self, id: impl Into<String>) {
        self.individuals.insert(id.into());
    }

    pub fn add_member(&mut self, id: impl Into<String>, class: &Iri) {
        self.membership.insert((id.into(), class.clone()));
    }

    pub fn add_context(&mut self, y: impl Into<String>, x: impl Into<String>) {
        self.in_context.insert((y.into(), x.into()));
    }

    pub fn add_relation(&mut self, rel: &Iri, y: impl Into<String>, z: impl Into<String>) {
        self.relations.insert((rel.clone(), y.into(), z.into()));
    }

    /// Every referenced individual must be declared.
    pub fn check(&self) -> Result<(), WorldError> {
        let refs = self
            .membership
            .iter()
            .map(|(i, _)| i)
            .chain(self.in_context.iter().flat_map(|(a, b)| [a, b]))
            .chain(self.relations.iter().flat_map(|(_, a, b)| [a, b]));
        for r in refs {
            if !self.individuals.contains(r) {
                return Err(WorldError::Undeclared(r.clone()));
            }
        }
        Ok(())
    }

    /// Parses the line format `ind <id>`, `class <id> <iri>`,
    /// `ctx <id> <id>`, `rel <iri> <id> <id>`. Blank lines and `#`
    /// comments are skipped.
    pub fn parse(text: &str) -> Result<World, WorldError> {
        let mut w = World::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = strip_comment(raw);
            let toks: Vec<&str> = content.split_whitespace().collect();
            let syntax = |message: &str| WorldError::Syntax { line, message: message.to_string() };
            let iri =
                |s: &str| Iri::new(s.trim_start_matches('<').trim_end_matches('>')).map_err(|e| syntax(&e.to_string()));
            match toks.as_slice() {
                [] => {}
                ["ind", id] => w.add_individual(*id),
                ["class", id, c] => w.add_member(*id, &iri(c)?),
                ["ctx", y, x] => w.add_context(*y, *x),
                ["rel", r, y, z] => w.add_relation(&iri(r)?, *y, *z),
                [kw, ..] => return Err(syntax(&format!("unexpected {kw:?} line or wrong arity"))),
            }
        }
        w.check()?;
        Ok(w)
    }
}

/// IRIs may contain `#`, so a comment only starts at the beginning of a
/// token.
fn strip_comment(raw: &str) -> &str {
    if raw.trim_start().starts_with('#') {
        return "";
    }
    match raw.find(" #") {
        Some(i) => &raw[..i],
        None => raw,
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.individuals {
            writeln!(f, "ind {i}")?;
        }
        for (i, c) in &self.membership {
            writeln!(f, "class {i} <{c}>")?;
        }
        for (y, x) in &self.in_context {
            writeln!(f, "ctx {y} {x}")?;
        }
        for (r, y, z) in &self.relations {
            writeln!(f, "rel <{r}> {y} {z}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub satisfying: u64,
    pub condition: u64,
    /// `None` exactly when `condition` is zero.
    pub probability: Option<Ratio<u64>>,
    pub verdict: Verdict,
}

/// Decides `sp` in `w`. Classes absent from the world have empty extensions.
pub fn evaluate(sp: &SuperPattern, w: &World) -> Evaluation {
    let members = |class: &Iri| -> HashSet<&str> {
        w.membership.iter().filter(|(_, c)| c == class).map(|(i, _)| i.as_str()).collect()
    };
    let subjects = members(&sp.subject.iri);
    let objects = members(&sp.object.iri);
    let mut related: HashMap<&str, Vec<&str>> = HashMap::new();
    for (r, y, z) in &w.relations {
        if r == sp.relation.iri() && objects.contains(z.as_str()) {
            related.entry(y.as_str()).or_default().push(z.as_str());
        }
    }

    let (satisfying, condition) = match &sp.context {
        Context::Universal => {
            let cond = subjects.len() as u64;
            let sat = subjects.iter().filter(|y| related.contains_key(*y)).count() as u64;
            (sat, cond)
        }
        Context::Class(c) => {
            let contexts = members(&c.iri);
            let ctx: HashSet<(&str, &str)> = w.in_context.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            let mut cond = 0;
            let mut sat = 0;
            for (y, x) in &ctx {
                if !subjects.contains(y) || !contexts.contains(x) {
                    continue;
                }
                cond += 1;
                let witness = related.get(y).is_some_and(|zs| zs.iter().any(|z| ctx.contains(&(*z, *x))));
                if witness {
                    sat += 1;
                }
            }
            (sat, cond)
        }
    };

    if condition == 0 {
        return Evaluation { satisfying, condition, probability: None, verdict: Verdict::Vacuous };
    }
    let p = Ratio::new(satisfying, condition);
    let q = sp.qualifier;
    let holds = if q.is_can() { satisfying >= 1 } else { q.comparison().holds(p, q.threshold()) };
    Evaluation {
        satisfying,
        condition,
        probability: Some(p),
        verdict: if holds { Verdict::Holds } else { Verdict::Fails },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conflict {
    /// Indexes into the input list.
    pub first: usize,
    pub second: usize,
    pub reason: String,
}

/// Pairs with the same context, subject, object and relation where one
/// claim says `never` and the other any positive qualifier. A `can` form
/// conflicts too: one witness already contradicts a zero frequency.
pub fn check_conflicts(claims: &[SuperPattern]) -> Vec<Conflict> {
    let is_never = |sp: &SuperPattern| sp.qualifier.base() == QualifierBase::Never;
    let mut out = Vec::new();
    for (i, a) in claims.iter().enumerate() {
        for (j, b) in claims.iter().enumerate().skip(i + 1) {
            let same = a.context.iri() == b.context.iri()
                && a.subject.iri == b.subject.iri
                && a.object.iri == b.object.iri
                && a.relation == b.relation;
            if same && is_never(a) != is_never(b) {
                let (n, p) = if is_never(a) { (a, b) } else { (b, a) };
                out.push(Conflict {
                    first: i,
                    second: j,
                    reason: format!(
                        "'{}' {} '{}' '{}' contradicts '{}'",
                        p.subject.label, p.qualifier, p.relation, p.object.label, n.qualifier
                    ),
                });
            }
        }
    }
    out
}
