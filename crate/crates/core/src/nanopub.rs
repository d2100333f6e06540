//! The four-graph nanopublication: head, assertion, provenance and
//! publication info.

use std::collections::HashSet;
use std::fmt;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use thiserror::Error;

use crate::rdf::{parse_trig, serialize_trig, Dataset, Iri, Literal, Quad, RdfError, Term};
use crate::trusty::{self, ArtifactCode, TrustyError};
use crate::vocab::vocab;

/// Self IRI of every draft before finalization.
pub const TEMP_IRI: &str = "http://purl.org/nanopub/temp/np";

pub fn temp_iri() -> Iri {
    Iri::new(TEMP_IRI).expect("constant is absolute")
}

/// `{TEMP_IRI}#{fragment}`
pub fn temp_local(fragment: &str) -> Iri {
    temp_iri().with_fragment(fragment)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FindingCode {
    MissingHead,
    MultipleHeads,
    HeadLinks,
    EmptyAssertion,
    MissingProvenance,
    MissingPubinfo,
    MissingTimestamp,
    MissingCreator,
    BlankNodeForbidden,
    UnexpectedGraph,
}

impl fmt::Display for FindingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub code: FindingCode,
    pub message: String,
}

impl Finding {
    pub fn new(code: FindingCode, message: impl Into<String>) -> Self {
        Finding { code, message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum NanopubError {
    #[error(transparent)]
    Rdf(#[from] RdfError),
    #[error("not a nanopublication: {}", .0.iter().map(|f| f.message.as_str()).collect::<Vec<_>>().join("; "))]
    Malformed(Vec<Finding>),
    #[error("assertion is empty")]
    EmptyAssertion,
    #[error("<{0}> is not a finalized nanopublication")]
    NotFinalized(Iri),
    #[error(transparent)]
    Trusty(#[from] TrustyError),
    #[error("supersedes chain through <{0}> is cyclic")]
    SupersedesCycle(Iri),
    #[error("<{0}> is referenced but not available")]
    Missing(Iri),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nanopublication {
    iri: Iri,
    head: Iri,
    assertion: Iri,
    provenance: Iri,
    pubinfo: Iri,
    dataset: Dataset,
}

pub fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn single_link(d: &Dataset, head: &Iri, np: &Iri, pred: &Iri, name: &str) -> Result<Iri, Finding> {
    let targets: Vec<&Iri> = d
        .quads_in(head)
        .filter(|q| q.subject.as_iri() == Some(np) && &q.predicate == pred)
        .filter_map(|q| q.object.as_iri())
        .collect();
    match targets.as_slice() {
        [one] => Ok((*one).clone()),
        [] => Err(Finding::new(FindingCode::HeadLinks, format!("head links no {name} graph"))),
        _ => Err(Finding::new(FindingCode::HeadLinks, format!("head links {} {name} graphs", targets.len()))),
    }
}

impl Nanopublication {
    /// Locates the head graph and the three graphs it links.
    pub fn from_dataset(dataset: Dataset) -> Result<Self, NanopubError> {
        let v = &vocab().nanopub;
        let decl = Term::Iri(v.nanopublication.clone());
        let heads: Vec<(Iri, Iri)> = dataset
            .with_predicate(&v.rdf_type)
            .filter(|q| q.object == decl)
            .filter_map(|q| q.subject.as_iri().map(|s| (s.clone(), q.graph.clone())))
            .collect();
        let (iri, head) = match heads.as_slice() {
            [one] => one.clone(),
            [] => {
                return Err(NanopubError::Malformed(vec![Finding::new(
                    FindingCode::MissingHead,
                    "no head graph declares a nanopublication",
                )]))
            }
            _ => {
                return Err(NanopubError::Malformed(vec![Finding::new(
                    FindingCode::MultipleHeads,
                    format!("{} nanopublication declarations", heads.len()),
                )]))
            }
        };
        let links = [
            single_link(&dataset, &head, &iri, &v.has_assertion, "assertion"),
            single_link(&dataset, &head, &iri, &v.has_provenance, "provenance"),
            single_link(&dataset, &head, &iri, &v.has_publication_info, "pubinfo"),
        ];
        let findings: Vec<Finding> = links.iter().filter_map(|l| l.as_ref().err().cloned()).collect();
        if !findings.is_empty() {
            return Err(NanopubError::Malformed(findings));
        }
        let [a, p, i] = links.map(|l| l.expect("checked above"));
        Ok(Nanopublication { iri, head, assertion: a, provenance: p, pubinfo: i, dataset })
    }

    pub fn parse_trig(text: &str) -> Result<Self, NanopubError> {
        Self::from_dataset(parse_trig(text)?)
    }

    pub fn to_trig(&self) -> String {
        serialize_trig(&self.dataset)
    }

    pub fn iri(&self) -> &Iri {
        &self.iri
    }

    pub fn head_graph(&self) -> &Iri {
        &self.head
    }

    pub fn assertion_graph(&self) -> &Iri {
        &self.assertion
    }

    pub fn provenance_graph(&self) -> &Iri {
        &self.provenance
    }

    pub fn pubinfo_graph(&self) -> &Iri {
        &self.pubinfo
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn into_dataset(self) -> Dataset {
        self.dataset
    }

    pub fn graph_names(&self) -> [&Iri; 4] {
        [&self.head, &self.assertion, &self.provenance, &self.pubinfo]
    }

    pub fn assertion(&self) -> Dataset {
        self.dataset.quads_in(&self.assertion).cloned().collect()
    }

    pub fn provenance(&self) -> Dataset {
        self.dataset.quads_in(&self.provenance).cloned().collect()
    }

    pub fn pubinfo(&self) -> Dataset {
        self.dataset.quads_in(&self.pubinfo).cloned().collect()
    }

    pub fn code(&self) -> Option<ArtifactCode> {
        ArtifactCode::from_iri(&self.iri)
    }

    pub fn is_finalized(&self) -> bool {
        self.code().is_some() && trusty::verify(&self.dataset).unwrap_or(false)
    }

    fn pubinfo_objects<'a>(&'a self, pred: &'a Iri) -> impl Iterator<Item = &'a Term> + 'a {
        let me = Term::Iri(self.iri.clone());
        self.dataset.quads_in(&self.pubinfo).filter(move |q| q.subject == me && &q.predicate == pred).map(|q| &q.object)
    }

    pub fn created(&self) -> Option<DateTime<Utc>> {
        self.pubinfo_objects(&vocab().nanopub.created)
            .filter_map(|t| t.as_literal())
            .find_map(|l| DateTime::parse_from_rfc3339(l.lexical()).ok())
            .map(|t| t.with_timezone(&Utc))
    }

    pub fn creators(&self) -> Vec<Iri> {
        self.pubinfo_objects(&vocab().nanopub.creator).filter_map(|t| t.as_iri().cloned()).collect()
    }

    /// Older versions this nanopublication declares it replaces.
    pub fn supersedes(&self) -> Vec<Iri> {
        self.pubinfo_objects(&vocab().nanopub.supersedes).filter_map(|t| t.as_iri().cloned()).collect()
    }

    pub fn title(&self) -> Option<String> {
        self.pubinfo_objects(&vocab().nanopub.title)
            .filter_map(|t| t.as_literal())
            .map(|l| l.lexical().to_string())
            .next()
    }

    /// rdfs:label for `iri`, searched in every graph.
    pub fn label_of(&self, iri: &Iri) -> Option<String> {
        let subject = Term::Iri(iri.clone());
        self.dataset
            .with_predicate(&vocab().nanopub.label)
            .filter(|q| q.subject == subject)
            .find_map(|q| q.object.as_literal().map(|l| l.lexical().to_string()))
    }

    pub fn finalize(&self) -> Result<(Nanopublication, ArtifactCode), NanopubError> {
        let (d, code) = trusty::finalize(&self.dataset, &self.iri)?;
        Ok((Nanopublication::from_dataset(d)?, code))
    }

    pub fn verify(&self) -> Result<bool, TrustyError> {
        trusty::verify(&self.dataset)
    }
}

/// One finding per violated structural invariant; empty when valid.
pub fn validate(np: &Nanopublication) -> Vec<Finding> {
    let v = &vocab().nanopub;
    let mut findings = Vec::new();
    let d = &np.dataset;

    let mut distinct = HashSet::new();
    for g in np.graph_names() {
        distinct.insert(g);
    }
    if distinct.len() != 4 {
        findings.push(Finding::new(
            FindingCode::HeadLinks,
            "head, assertion, provenance and pubinfo graphs must be distinct",
        ));
    }
    if let Err(NanopubError::Malformed(mut f)) = Nanopublication::from_dataset(d.clone()) {
        findings.append(&mut f);
    }

    if d.quads_in(&np.assertion).next().is_none() {
        findings.push(Finding::new(FindingCode::EmptyAssertion, "assertion graph is empty"));
    }
    let assertion_term = Term::Iri(np.assertion.clone());
    if !d.quads_in(&np.provenance).any(|q| q.subject == assertion_term) {
        findings
            .push(Finding::new(FindingCode::MissingProvenance, "provenance graph says nothing about the assertion"));
    }
    let me = Term::Iri(np.iri.clone());
    if !d.quads_in(&np.pubinfo).any(|q| q.subject == me) {
        findings
            .push(Finding::new(FindingCode::MissingPubinfo, "pubinfo graph says nothing about the nanopublication"));
    }
    if np.created().is_none() {
        findings.push(Finding::new(
            FindingCode::MissingTimestamp,
            format!("no valid <{}> timestamp in pubinfo", v.created),
        ));
    }
    if np.creators().is_empty() {
        findings.push(Finding::new(FindingCode::MissingCreator, format!("no <{}> in pubinfo", v.creator)));
    }
    if d.iter().any(Quad::has_blank_node) {
        findings.push(Finding::new(FindingCode::BlankNodeForbidden, "blank nodes are not allowed"));
    }
    let known: HashSet<&Iri> = np.graph_names().into_iter().collect();
    let unknown: Vec<String> =
        d.graph_names().into_iter().filter(|g| !known.contains(g)).map(|g| g.to_string()).collect();
    if !unknown.is_empty() {
        findings.push(Finding::new(FindingCode::UnexpectedGraph, format!("unexpected graphs: {}", unknown.join(", "))));
    }
    findings
}

/// Builds a draft under [`TEMP_IRI`]. Quads of each fragment are moved into
/// the corresponding graph whatever graph they were emitted in. An empty
/// provenance fragment is replaced by an attribution to `creator`.
pub fn assemble(
    assertion: &Dataset,
    provenance: &Dataset,
    pubinfo_extras: &Dataset,
    creator: &Iri,
    timestamp: DateTime<Utc>,
) -> Result<Nanopublication, NanopubError> {
    if assertion.is_empty() {
        return Err(NanopubError::EmptyAssertion);
    }
    let voc = vocab();
    let v = &voc.nanopub;
    let np = temp_iri();
    let head = temp_local("Head");
    let a = temp_local("assertion");
    let p = temp_local("provenance");
    let i = temp_local("pubinfo");

    let mut d = Dataset::new();
    voc.apply_prefixes(&mut d);
    d.set_prefix("this", TEMP_IRI);
    d.set_prefix("sub", format!("{TEMP_IRI}#"));
    d.insert(Quad::new(&np, &v.rdf_type, &v.nanopublication, &head));
    d.insert(Quad::new(&np, &v.has_assertion, &a, &head));
    d.insert(Quad::new(&np, &v.has_provenance, &p, &head));
    d.insert(Quad::new(&np, &v.has_publication_info, &i, &head));
    d.merge(&assertion.regraph(&a));
    if provenance.is_empty() {
        d.insert(Quad::new(&a, &v.attributed_to, creator, &p));
    } else {
        d.merge(&provenance.regraph(&p));
    }
    d.insert(Quad::new(
        &np,
        &v.created,
        Literal::typed(format_timestamp(&timestamp), voc.datatypes.date_time.clone()),
        &i,
    ));
    d.insert(Quad::new(&np, &v.creator, creator, &i));
    d.merge(&pubinfo_extras.regraph(&i));
    Nanopublication::from_dataset(d)
}

/// A new draft that declares it supersedes `old`.
pub fn supersede(
    old: &Nanopublication,
    assertion: &Dataset,
    provenance: &Dataset,
    pubinfo_extras: &Dataset,
    creator: &Iri,
    timestamp: DateTime<Utc>,
) -> Result<Nanopublication, NanopubError> {
    if !old.is_finalized() {
        return Err(NanopubError::NotFinalized(old.iri().clone()));
    }
    let mut extras = pubinfo_extras.clone();
    extras.insert(Quad::new(temp_iri(), &vocab().nanopub.supersedes, old.iri(), temp_local("pubinfo")));
    assemble(assertion, provenance, &extras, creator, timestamp)
}

/// Walks supersedes links backwards from `newest` and returns the chain
/// oldest first.
pub fn extract_chain<'a>(
    lookup: impl Fn(&Iri) -> Option<&'a Nanopublication>,
    newest: &Iri,
) -> Result<Vec<Iri>, NanopubError> {
    let mut chain = vec![newest.clone()];
    let mut seen: HashSet<Iri> = HashSet::from([newest.clone()]);
    let mut current = lookup(newest).ok_or_else(|| NanopubError::Missing(newest.clone()))?;
    while let Some(older) = current.supersedes().into_iter().min() {
        if !seen.insert(older.clone()) {
            return Err(NanopubError::SupersedesCycle(older));
        }
        current = lookup(&older).ok_or_else(|| NanopubError::Missing(older.clone()))?;
        chain.push(older);
    }
    chain.reverse();
    Ok(chain)
}
