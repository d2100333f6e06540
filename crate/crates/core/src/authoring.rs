//! Draft nanopublications for each workflow act.
//!
//! Each function returns an unfinalized draft under the temporary self IRI;
//! call [`Nanopublication::finalize`] to fix its artifact code. The clock
//! and creator are always explicit so output is reproducible.

use chrono::{DateTime, Utc};

use crate::nanopub::{assemble, supersede, temp_iri, temp_local, NanopubError, Nanopublication};
use crate::rdf::{Dataset, Iri};
use crate::superpattern::{formalization_provenance, ClassDefinition, SuperPattern, SuperpatternError};
use crate::workflow::{Decision, ResponseComment, ReviewComment, Submission, WorkflowError};

#[derive(Debug, thiserror::Error)]
pub enum AuthoringError {
    #[error(transparent)]
    Nanopub(#[from] NanopubError),
    #[error(transparent)]
    Superpattern(#[from] SuperpatternError),
    #[error(transparent)]
    Workflow(#[from] WorkflowError),
}

type Result<T> = std::result::Result<T, AuthoringError>;

/// Who publishes and when.
#[derive(Debug, Clone)]
pub struct Stamp {
    pub creator: Iri,
    pub time: DateTime<Utc>,
}

fn assertion_graph() -> Iri {
    temp_local("assertion")
}

fn simple(assertion: &Dataset, stamp: &Stamp) -> Result<Nanopublication> {
    Ok(assemble(assertion, &Dataset::new(), &Dataset::new(), &stamp.creator, stamp.time)?)
}

/// A class definition minting `{np}#{Label-with-hyphens}`.
pub fn class_definition(
    label: &str,
    definition: &str,
    super_class: Iri,
    related: Vec<Iri>,
    stamp: &Stamp,
) -> Result<Nanopublication> {
    let cd = ClassDefinition {
        iri: ClassDefinition::mint_iri(&temp_iri(), label.trim()),
        label: label.trim().to_string(),
        definition: definition.trim().to_string(),
        super_class,
        related,
    };
    cd.check()?;
    simple(&cd.emit(&assertion_graph()), stamp)
}

fn formalization_parts(
    sp: &SuperPattern,
    source: Option<&Iri>,
    quote: Option<&str>,
) -> Result<(Dataset, Dataset, Dataset)> {
    sp.check()?;
    let a = assertion_graph();
    let provenance = match source {
        Some(src) => formalization_provenance(&a, src, quote, &temp_local("provenance")),
        None => Dataset::new(),
    };
    Ok((sp.emit_assertion(&a), provenance, sp.emit_labels(&temp_local("pubinfo"))))
}

/// A formalization: the five slot quads, provenance pointing at the source
/// publication, and slot labels in pubinfo.
pub fn formalization(
    sp: &SuperPattern,
    source: Option<&Iri>,
    quote: Option<&str>,
    stamp: &Stamp,
) -> Result<Nanopublication> {
    let (a, p, i) = formalization_parts(sp, source, quote)?;
    Ok(assemble(&a, &p, &i, &stamp.creator, stamp.time)?)
}

/// A new version of `old` that supersedes it.
pub fn update(
    old: &Nanopublication,
    sp: &SuperPattern,
    source: Option<&Iri>,
    quote: Option<&str>,
    stamp: &Stamp,
) -> Result<Nanopublication> {
    let (a, p, i) = formalization_parts(sp, source, quote)?;
    Ok(supersede(old, &a, &p, &i, &stamp.creator, stamp.time)?)
}

pub fn submission(s: &Submission, stamp: &Stamp) -> Result<Nanopublication> {
    simple(&s.emit(&assertion_graph()), stamp)
}

pub fn review(r: &ReviewComment, stamp: &Stamp) -> Result<Nanopublication> {
    simple(&r.emit(&assertion_graph())?, stamp)
}

pub fn response(r: &ResponseComment, stamp: &Stamp) -> Result<Nanopublication> {
    simple(&r.emit(&assertion_graph())?, stamp)
}

pub fn decision(d: &Decision, stamp: &Stamp) -> Result<Nanopublication> {
    simple(&d.emit(&assertion_graph())?, stamp)
}
