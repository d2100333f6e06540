//! Submission, review, response and decision acts, and the threads they
//! form.
//!
//! Every act is its own nanopublication. A thread is reconstructed from a
//! corpus by following references: the submission names a formalization,
//! updates supersede it, reviews refer to versions or to the class
//! definitions they use, responses answer reviews, and a decision closes
//! the thread. Status is derived from the thread, never stored.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nanopub::Nanopublication;
use crate::rdf::{Dataset, Iri, Literal, Quad, Term};
use crate::superpattern::{ClassDefinition, SuperPattern};
use crate::vocab::{vocab, Vocab};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorkflowError {
    #[error("unknown {dimension} {value:?}; expected one of: {legal}")]
    UnknownDimension { dimension: &'static str, value: String, legal: String },
    #[error("impact {0} is outside 1..=5")]
    ImpactOutOfRange(i64),
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("empty {0}")]
    Empty(&'static str),
    #[error("<{0}> is not a finalized nanopublication")]
    NotFinalized(Iri),
    #[error("dangling reference to <{0}>")]
    DanglingReference(Iri),
    #[error("supersedes cycle through <{0}>")]
    SupersedesCycle(Iri),
    #[error("<{0}> is not a submission")]
    NotASubmission(Iri),
}

macro_rules! dimension {
    ($(#[$doc:meta])* $name:ident, $label:literal, $map:expr, { $($variant:ident => $key:literal),+ $(,)? }) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn key(self) -> &'static str {
                match self {
                    $($name::$variant => $key),+
                }
            }

            pub fn iri(self) -> &'static Iri {
                let map: fn(&'static Vocab) -> &'static indexmap::IndexMap<String, Iri> = $map;
                map(vocab()).get(self.key()).expect("every key is in the constants table")
            }

            pub fn from_iri(iri: &Iri) -> Option<Self> {
                Self::ALL.iter().copied().find(|d| d.iri() == iri)
            }

            pub fn legal() -> String {
                Self::ALL.iter().map(|d| d.key()).collect::<Vec<_>>().join(", ")
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.key())
            }
        }

        impl FromStr for $name {
            type Err = WorkflowError;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let s = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
                Self::ALL.iter().copied().find(|d| d.key() == s).ok_or_else(|| WorkflowError::UnknownDimension {
                    dimension: $label,
                    value: s.clone(),
                    legal: Self::legal(),
                })
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.key())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

dimension!(Aspect, "aspect", |v| &v.review.aspect, {
    Syntax => "syntax", Style => "style", Content => "content",
});
dimension!(Disposition, "disposition", |v| &v.review.disposition, {
    Positive => "positive", Negative => "negative", Neutral => "neutral",
});
dimension!(Action, "action", |v| &v.review.action, {
    Compulsory => "compulsory", Suggestion => "suggestion", NoAction => "no-action",
});
dimension!(Agreement, "agreement", |v| &v.review.agreement, {
    Agree => "agree", Partial => "partial", Disagree => "disagree",
});
dimension!(Addressed, "addressed", |v| &v.review.addressed, {
    Addressed => "addressed", PartiallyAddressed => "partially-addressed", NotAddressed => "not-addressed",
});
dimension!(
    /// Editorial outcome of a submission.
    DecisionStatus, "status", |v| &v.publishing.decision, {
    AcceptedForPublication => "accepted-for-publication",
    Rejected => "rejected",
    RevisionRequested => "revision-requested",
});

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewComment {
    pub target: Iri,
    pub aspect: Aspect,
    pub disposition: Disposition,
    pub action: Action,
    pub impact: u8,
    pub text: String,
    pub refers_to_mentioning_of: Option<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseComment {
    pub in_response_to: Iri,
    pub agreement: Agreement,
    pub addressed: Addressed,
    pub text: String,
    /// The updated formalization; absent when the response precedes the
    /// update or no update was made.
    pub refers_to: Option<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Submission {
    pub formalization: Iri,
    pub venue: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub target: Iri,
    pub status: DecisionStatus,
    pub description: String,
    pub venue: Iri,
}

/// Node of the comment: `{graph stem}#comment`.
fn comment_node(graph: &Iri) -> Iri {
    graph.with_fragment("comment")
}

fn typed_subject(d: &Dataset, class: &Iri) -> Option<Iri> {
    let t = Term::Iri(class.clone());
    d.with_predicate(&vocab().nanopub.rdf_type).filter(|q| q.object == t).find_map(|q| q.subject.as_iri().cloned())
}

fn objects<'a>(d: &'a Dataset, s: &Iri, p: &'a Iri) -> impl Iterator<Item = &'a Term> + 'a {
    let s = Term::Iri(s.clone());
    d.iter().filter(move |q| q.subject == s && &q.predicate == p).map(|q| &q.object)
}

fn first_iri(d: &Dataset, s: &Iri, p: &Iri) -> Option<Iri> {
    objects(d, s, p).find_map(|t| t.as_iri().cloned())
}

fn first_text(d: &Dataset, s: &Iri, p: &Iri) -> Option<String> {
    objects(d, s, p).find_map(|t| t.as_literal().map(|l| l.lexical().to_string()))
}

/// The single member of a dimension among the subject's types.
fn dimension_of<T: Copy>(
    d: &Dataset,
    s: &Iri,
    label: &'static str,
    from_iri: fn(&Iri) -> Option<T>,
    legal: String,
) -> Result<T, WorkflowError> {
    let found: Vec<T> =
        objects(d, s, &vocab().nanopub.rdf_type).filter_map(|t| t.as_iri().and_then(from_iri)).collect();
    match found.as_slice() {
        [one] => Ok(*one),
        _ => Err(WorkflowError::UnknownDimension { dimension: label, value: format!("{} values", found.len()), legal }),
    }
}

impl ReviewComment {
    pub fn check(&self) -> Result<(), WorkflowError> {
        if !(1..=5).contains(&self.impact) {
            return Err(WorkflowError::ImpactOutOfRange(self.impact as i64));
        }
        if self.text.trim().is_empty() {
            return Err(WorkflowError::Empty("comment text"));
        }
        Ok(())
    }

    pub fn emit(&self, graph: &Iri) -> Result<Dataset, WorkflowError> {
        self.check()?;
        let r = &vocab().review;
        let ty = &vocab().nanopub.rdf_type;
        let c = comment_node(graph);
        let mut d = Dataset::new();
        for class in [&r.review_comment, self.aspect.iri(), self.disposition.iri(), self.action.iri()] {
            d.insert(Quad::new(&c, ty, class, graph));
        }
        d.insert(Quad::new(&c, &r.has_comment_text, Literal::simple(&self.text), graph));
        d.insert(Quad::new(&c, &r.has_impact, Literal::simple(self.impact.to_string()), graph));
        d.insert(Quad::new(&c, &r.refers_to, &self.target, graph));
        if let Some(slot) = &self.refers_to_mentioning_of {
            d.insert(Quad::new(&c, &r.refers_to_mentioning_of, slot, graph));
        }
        Ok(d)
    }

    pub fn parse(d: &Dataset) -> Result<ReviewComment, WorkflowError> {
        let r = &vocab().review;
        let c = typed_subject(d, &r.review_comment).ok_or(WorkflowError::Missing("review comment"))?;
        let impact_text = first_text(d, &c, &r.has_impact).ok_or(WorkflowError::Missing("impact"))?;
        let impact: i64 = impact_text.trim().parse().map_err(|_| WorkflowError::Missing("numeric impact"))?;
        if !(1..=5).contains(&impact) {
            return Err(WorkflowError::ImpactOutOfRange(impact));
        }
        let rc = ReviewComment {
            target: first_iri(d, &c, &r.refers_to).ok_or(WorkflowError::Missing("review target"))?,
            aspect: dimension_of(d, &c, "aspect", Aspect::from_iri, Aspect::legal())?,
            disposition: dimension_of(d, &c, "disposition", Disposition::from_iri, Disposition::legal())?,
            action: dimension_of(d, &c, "action", Action::from_iri, Action::legal())?,
            impact: impact as u8,
            text: first_text(d, &c, &r.has_comment_text).ok_or(WorkflowError::Missing("comment text"))?,
            refers_to_mentioning_of: first_iri(d, &c, &r.refers_to_mentioning_of),
        };
        rc.check()?;
        Ok(rc)
    }
}

impl ResponseComment {
    pub fn emit(&self, graph: &Iri) -> Result<Dataset, WorkflowError> {
        if self.text.trim().is_empty() {
            return Err(WorkflowError::Empty("comment text"));
        }
        let r = &vocab().review;
        let ty = &vocab().nanopub.rdf_type;
        let c = comment_node(graph);
        let mut d = Dataset::new();
        for class in [&r.response_comment, self.agreement.iri(), self.addressed.iri()] {
            d.insert(Quad::new(&c, ty, class, graph));
        }
        d.insert(Quad::new(&c, &r.has_comment_text, Literal::simple(&self.text), graph));
        d.insert(Quad::new(&c, &r.is_response_to, &self.in_response_to, graph));
        if let Some(v) = &self.refers_to {
            d.insert(Quad::new(&c, &r.refers_to, v, graph));
        }
        Ok(d)
    }

    pub fn parse(d: &Dataset) -> Result<ResponseComment, WorkflowError> {
        let r = &vocab().review;
        let c = typed_subject(d, &r.response_comment).ok_or(WorkflowError::Missing("response comment"))?;
        let text = first_text(d, &c, &r.has_comment_text).ok_or(WorkflowError::Missing("comment text"))?;
        if text.trim().is_empty() {
            return Err(WorkflowError::Empty("comment text"));
        }
        Ok(ResponseComment {
            in_response_to: first_iri(d, &c, &r.is_response_to).ok_or(WorkflowError::Missing("reviewed comment"))?,
            agreement: dimension_of(d, &c, "agreement", Agreement::from_iri, Agreement::legal())?,
            addressed: dimension_of(d, &c, "addressed", Addressed::from_iri, Addressed::legal())?,
            text,
            refers_to: first_iri(d, &c, &r.refers_to),
        })
    }
}

impl Submission {
    pub fn emit(&self, graph: &Iri) -> Dataset {
        let p = &vocab().publishing;
        let mut d = Dataset::new();
        d.insert(Quad::new(&self.formalization, &p.with_status, &p.submitted, graph));
        d.insert(Quad::new(&self.formalization, &p.part_of, &self.venue, graph));
        d
    }

    pub fn parse(d: &Dataset) -> Result<Submission, WorkflowError> {
        let p = &vocab().publishing;
        let submitted = Term::Iri(p.submitted.clone());
        let formalization = d
            .with_predicate(&p.with_status)
            .find(|q| q.object == submitted)
            .and_then(|q| q.subject.as_iri().cloned())
            .ok_or(WorkflowError::Missing("submitted status"))?;
        let venue = first_iri(d, &formalization, &p.part_of).ok_or(WorkflowError::Missing("venue"))?;
        Ok(Submission { formalization, venue })
    }
}

impl Decision {
    pub fn emit(&self, graph: &Iri) -> Result<Dataset, WorkflowError> {
        if self.description.trim().is_empty() {
            return Err(WorkflowError::Empty("decision description"));
        }
        let p = &vocab().publishing;
        let mut d = Dataset::new();
        d.insert(Quad::new(&self.target, &p.description, Literal::simple(&self.description), graph));
        d.insert(Quad::new(&self.target, &p.with_status, self.status.iri(), graph));
        d.insert(Quad::new(&self.target, &p.part_of, &self.venue, graph));
        Ok(d)
    }

    pub fn parse(d: &Dataset) -> Result<Decision, WorkflowError> {
        let p = &vocab().publishing;
        let (target, status) = d
            .with_predicate(&p.with_status)
            .find_map(|q| {
                let s = q.object.as_iri().and_then(DecisionStatus::from_iri)?;
                Some((q.subject.as_iri()?.clone(), s))
            })
            .ok_or(WorkflowError::Missing("decision status"))?;
        let description =
            first_text(d, &target, &p.description).ok_or(WorkflowError::Missing("decision description"))?;
        if description.trim().is_empty() {
            return Err(WorkflowError::Empty("decision description"));
        }
        let venue = first_iri(d, &target, &p.part_of).ok_or(WorkflowError::Missing("venue"))?;
        Ok(Decision { target, status, description, venue })
    }
}

/// Node types of the submission graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "C")]
    ClassDefinition,
    #[serde(rename = "F")]
    Formalization,
    #[serde(rename = "U")]
    Update,
    #[serde(rename = "S")]
    Submission,
    #[serde(rename = "R")]
    Review,
    #[serde(rename = "A")]
    Response,
    #[serde(rename = "D")]
    Decision,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::ClassDefinition,
        Kind::Formalization,
        Kind::Update,
        Kind::Submission,
        Kind::Review,
        Kind::Response,
        Kind::Decision,
    ];

    pub fn letter(self) -> char {
        match self {
            Kind::ClassDefinition => 'C',
            Kind::Formalization => 'F',
            Kind::Update => 'U',
            Kind::Submission => 'S',
            Kind::Review => 'R',
            Kind::Response => 'A',
            Kind::Decision => 'D',
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Kind::ClassDefinition => "class definition",
            Kind::Formalization => "formalization",
            Kind::Update => "updated formalization",
            Kind::Submission => "submission",
            Kind::Review => "review",
            Kind::Response => "response",
            Kind::Decision => "decision",
        }
    }
}

/// The parsed content of a nanopublication's assertion.
#[derive(Debug, Clone, PartialEq)]
pub enum Act {
    ClassDefinition(ClassDefinition),
    Formalization(SuperPattern),
    Submission(Submission),
    Review(ReviewComment),
    Response(ResponseComment),
    Decision(Decision),
    Other,
}

impl Act {
    pub fn of(np: &Nanopublication) -> Act {
        let a = np.assertion();
        let r = &vocab().review;
        if typed_subject(&a, &r.review_comment).is_some() {
            return ReviewComment::parse(&a).map(Act::Review).unwrap_or(Act::Other);
        }
        if typed_subject(&a, &r.response_comment).is_some() {
            return ResponseComment::parse(&a).map(Act::Response).unwrap_or(Act::Other);
        }
        if let Ok(sp) = SuperPattern::from_nanopub(np) {
            return Act::Formalization(sp);
        }
        if let Ok(cd) = ClassDefinition::parse(&a) {
            return Act::ClassDefinition(cd);
        }
        if let Ok(s) = Submission::parse(&a) {
            return Act::Submission(s);
        }
        if let Ok(d) = Decision::parse(&a) {
            return Act::Decision(d);
        }
        Act::Other
    }
}

/// A nanopublication of a corpus with its parsed act.
#[derive(Debug, Clone)]
pub struct Entry {
    pub np: Nanopublication,
    pub act: Act,
    pub kind: Option<Kind>,
    pub created: Option<DateTime<Utc>>,
}

impl Entry {
    pub fn new(np: Nanopublication) -> Entry {
        let act = Act::of(&np);
        let kind = match &act {
            Act::ClassDefinition(_) => Some(Kind::ClassDefinition),
            Act::Formalization(_) if np.supersedes().is_empty() => Some(Kind::Formalization),
            Act::Formalization(_) => Some(Kind::Update),
            Act::Submission(_) => Some(Kind::Submission),
            Act::Review(_) => Some(Kind::Review),
            Act::Response(_) => Some(Kind::Response),
            Act::Decision(_) => Some(Kind::Decision),
            Act::Other => None,
        };
        let created = np.created();
        Entry { np, act, kind, created }
    }

    pub fn iri(&self) -> &Iri {
        self.np.iri()
    }

    /// Sort key used everywhere a deterministic order is needed.
    pub fn order_key(&self) -> (Option<DateTime<Utc>>, &Iri) {
        (self.created, self.np.iri())
    }

    /// Nanopublication IRIs this act points at (targets, versions,
    /// reviewed comments, class definitions used in slots), excluding
    /// supersedes links.
    pub fn references(&self) -> Vec<Iri> {
        let mut out: Vec<Iri> = match &self.act {
            Act::Formalization(sp) => sp.slot_iris().iter().map(|i| Iri::new_unchecked(i.stem())).collect(),
            Act::Submission(s) => vec![s.formalization.clone()],
            Act::Review(r) => vec![r.target.clone()],
            Act::Response(r) => std::iter::once(r.in_response_to.clone()).chain(r.refers_to.clone()).collect(),
            Act::Decision(d) => vec![d.target.clone()],
            Act::ClassDefinition(_) | Act::Other => vec![],
        };
        out.retain(|i| i != self.np.iri());
        out.dedup();
        out
    }
}

/// An immutable snapshot of nanopublications keyed by IRI.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    entries: BTreeMap<Iri, Entry>,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, np: Nanopublication) {
        let e = Entry::new(np);
        self.entries.insert(e.iri().clone(), e);
    }

    pub fn remove(&mut self, iri: &Iri) -> Option<Entry> {
        self.entries.remove(iri)
    }

    pub fn get(&self, iri: &Iri) -> Option<&Entry> {
        self.entries.get(iri)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in (created, IRI) order.
    pub fn entries(&self) -> Vec<&Entry> {
        let mut v: Vec<&Entry> = self.entries.values().collect();
        v.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        v
    }

    pub fn of_kind(&self, kind: Kind) -> Vec<&Entry> {
        self.entries().into_iter().filter(|e| e.kind == Some(kind)).collect()
    }

    fn is_kind(&self, iri: &Iri, kinds: &[Kind]) -> bool {
        self.get(iri).and_then(|e| e.kind).is_some_and(|k| kinds.contains(&k))
    }

    /// Formalization versions that declare they supersede `iri`, earliest
    /// first.
    pub fn successors(&self, iri: &Iri) -> Vec<&Entry> {
        self.entries()
            .into_iter()
            .filter(|e| matches!(e.act, Act::Formalization(_)) && e.np.supersedes().contains(iri))
            .collect()
    }

    /// The original formalization of the chain `iri` belongs to.
    pub fn chain_root(&self, iri: &Iri) -> Result<Iri, WorkflowError> {
        let mut seen = BTreeSet::from([iri.clone()]);
        let mut cur = iri.clone();
        loop {
            let e = self.get(&cur).ok_or_else(|| WorkflowError::DanglingReference(cur.clone()))?;
            match e.np.supersedes().into_iter().min() {
                None => return Ok(cur),
                Some(older) => {
                    if !seen.insert(older.clone()) {
                        return Err(WorkflowError::SupersedesCycle(older));
                    }
                    cur = older;
                }
            }
        }
    }

    /// Version chain starting at `root`, following the earliest successor.
    pub fn versions_from(&self, root: &Iri) -> Result<Vec<Iri>, WorkflowError> {
        if self.get(root).is_none() {
            return Err(WorkflowError::DanglingReference(root.clone()));
        }
        let mut chain = vec![root.clone()];
        let mut seen = BTreeSet::from([root.clone()]);
        while let Some(next) = self.successors(chain.last().expect("non-empty")).first() {
            let next = next.iri().clone();
            if !seen.insert(next.clone()) {
                return Err(WorkflowError::SupersedesCycle(next));
            }
            chain.push(next);
        }
        Ok(chain)
    }
}

/// A member of a thread with its creation time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub iri: Iri,
    pub created: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmissionThread {
    pub submission: Option<Member>,
    pub venue: Option<Iri>,
    /// Oldest first; the last one is the head.
    pub versions: Vec<Member>,
    pub class_definitions: Vec<Member>,
    pub reviews: Vec<Member>,
    pub responses: Vec<Member>,
    pub decision: Option<Member>,
}

impl SubmissionThread {
    pub fn head(&self) -> Option<&Member> {
        self.versions.last()
    }

    pub fn members(&self) -> Vec<&Member> {
        self.submission
            .iter()
            .chain(&self.versions)
            .chain(&self.class_definitions)
            .chain(&self.reviews)
            .chain(&self.responses)
            .chain(&self.decision)
            .collect()
    }

    pub fn contains(&self, iri: &Iri) -> bool {
        self.members().iter().any(|m| &m.iri == iri)
    }
}

fn member(e: &Entry) -> Member {
    Member { iri: e.iri().clone(), created: e.created }
}

/// Reconstructs the thread of `submission`.
pub fn build_thread(corpus: &Corpus, submission: &Iri) -> Result<SubmissionThread, WorkflowError> {
    let entry = corpus.get(submission).ok_or_else(|| WorkflowError::DanglingReference(submission.clone()))?;
    let Act::Submission(s) = &entry.act else {
        return Err(WorkflowError::NotASubmission(submission.clone()));
    };
    let mut t = thread_of_formalization(corpus, &s.formalization)?;
    t.submission = Some(member(entry));
    t.venue = Some(s.venue.clone());
    Ok(t)
}

/// The thread around a formalization that may not have been submitted
/// yet.
pub fn thread_of_formalization(corpus: &Corpus, formalization: &Iri) -> Result<SubmissionThread, WorkflowError> {
    let root = corpus.chain_root(formalization)?;
    let version_iris = corpus.versions_from(&root)?;
    let versions: Vec<Member> = version_iris.iter().map(|v| member(corpus.get(v).expect("walked"))).collect();

    let mut class_defs: BTreeSet<Iri> = BTreeSet::new();
    for v in &version_iris {
        if let Some(Entry { act: Act::Formalization(sp), .. }) = corpus.get(v) {
            for slot in sp.slot_iris() {
                let stem = Iri::new_unchecked(slot.stem());
                if corpus.is_kind(&stem, &[Kind::ClassDefinition]) {
                    class_defs.insert(stem);
                }
            }
        }
    }

    let in_versions = |i: &Iri| version_iris.contains(i);
    let reviews: Vec<&Entry> = corpus
        .of_kind(Kind::Review)
        .into_iter()
        .filter(|e| matches!(&e.act, Act::Review(r) if in_versions(&r.target) || class_defs.contains(&r.target)))
        .collect();
    let review_iris: BTreeSet<&Iri> = reviews.iter().map(|e| e.iri()).collect();

    let mut responses = Vec::new();
    for e in corpus.of_kind(Kind::Response) {
        let Act::Response(r) = &e.act else { continue };
        let answers = review_iris.contains(&r.in_response_to);
        let updates = r.refers_to.as_ref().is_some_and(&in_versions);
        if updates && corpus.get(&r.in_response_to).is_none() {
            return Err(WorkflowError::DanglingReference(r.in_response_to.clone()));
        }
        if answers || updates {
            responses.push(member(e));
        }
    }

    let decision = corpus
        .of_kind(Kind::Decision)
        .into_iter()
        .rfind(|e| matches!(&e.act, Act::Decision(d) if in_versions(&d.target)))
        .map(member);

    let mut cds: Vec<&Entry> = class_defs.iter().filter_map(|c| corpus.get(c)).collect();
    cds.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
    Ok(SubmissionThread {
        submission: None,
        venue: None,
        versions,
        class_definitions: cds.into_iter().map(member).collect(),
        reviews: reviews.into_iter().map(member).collect(),
        responses,
        decision,
    })
}

/// Every submission in `venue` (all venues when `None`), with its thread.
pub fn threads(corpus: &Corpus, venue: Option<&Iri>) -> Vec<(Iri, Result<SubmissionThread, WorkflowError>)> {
    corpus
        .of_kind(Kind::Submission)
        .into_iter()
        .filter(|e| match (&e.act, venue) {
            (Act::Submission(s), Some(v)) => &s.venue == v,
            _ => true,
        })
        .map(|e| (e.iri().clone(), build_thread(corpus, e.iri())))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThreadStatus {
    Draft,
    Submitted,
    UnderReview,
    Revised,
    Decided,
}

impl fmt::Display for ThreadStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThreadStatus::Draft => "draft",
            ThreadStatus::Submitted => "submitted",
            ThreadStatus::UnderReview => "under-review",
            ThreadStatus::Revised => "revised",
            ThreadStatus::Decided => "decided",
        })
    }
}

/// decided > revised > under-review > submitted > draft.
pub fn thread_status(t: &SubmissionThread) -> ThreadStatus {
    if t.decision.is_some() {
        return ThreadStatus::Decided;
    }
    if t.submission.is_none() {
        return ThreadStatus::Draft;
    }
    let Some(last_review) = t.reviews.iter().map(|r| r.created).max() else {
        return ThreadStatus::Submitted;
    };
    let revised = t.versions.len() > 1 && t.head().is_some_and(|h| h.created > last_review);
    if revised {
        ThreadStatus::Revised
    } else {
        ThreadStatus::UnderReview
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum IntegrityCode {
    DanglingReference,
    DuplicateSubmission,
    DecisionNotOnHead,
    CrossThreadResponse,
    SupersedesCycle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegrityFinding {
    pub code: IntegrityCode,
    pub subject: Iri,
    pub message: String,
}

/// Link-integrity findings over the whole corpus, in (created, IRI) order
/// of the offending nanopublication.
pub fn check_integrity(corpus: &Corpus) -> Vec<IntegrityFinding> {
    let mut out = Vec::new();
    let mut push =
        |code, subject: &Iri, message: String| out.push(IntegrityFinding { code, subject: subject.clone(), message });

    let mut submitted: HashMap<(Iri, Iri), &Iri> = HashMap::new();
    for e in corpus.entries() {
        for r in e.references().iter().chain(e.np.supersedes().iter()) {
            if corpus.get(r).is_none() && is_reference_to_nanopub(e, r) {
                push(IntegrityCode::DanglingReference, e.iri(), format!("refers to missing <{r}>"));
            }
        }
        match &e.act {
            Act::Formalization(_) => {
                if let Err(WorkflowError::SupersedesCycle(i)) = corpus.chain_root(e.iri()) {
                    push(IntegrityCode::SupersedesCycle, e.iri(), format!("supersedes chain loops through <{i}>"));
                }
            }
            Act::Submission(s) => {
                let key = (corpus.chain_root(&s.formalization).unwrap_or(s.formalization.clone()), s.venue.clone());
                match submitted.get(&key) {
                    Some(first) => push(
                        IntegrityCode::DuplicateSubmission,
                        e.iri(),
                        format!("<{}> was already submitted to <{}> by <{first}>", s.formalization, s.venue),
                    ),
                    None => {
                        submitted.insert(key, e.iri());
                    }
                }
            }
            Act::Decision(d) => {
                if corpus.get(&d.target).is_some() {
                    if let Ok(root) = corpus.chain_root(&d.target) {
                        if let Ok(chain) = corpus.versions_from(&root) {
                            let head = chain.last().expect("non-empty");
                            if head != &d.target {
                                push(
                                    IntegrityCode::DecisionNotOnHead,
                                    e.iri(),
                                    format!("decides <{}> but the head is <{head}>", d.target),
                                );
                            }
                        }
                    }
                }
            }
            Act::Response(r) => {
                let review_root = match corpus.get(&r.in_response_to).map(|x| &x.act) {
                    Some(Act::Review(rc)) if corpus.is_kind(&rc.target, &[Kind::Formalization, Kind::Update]) => {
                        corpus.chain_root(&rc.target).ok()
                    }
                    _ => None,
                };
                let version_root = r.refers_to.as_ref().and_then(|v| corpus.chain_root(v).ok());
                if let (Some(a), Some(b)) = (review_root, version_root) {
                    if a != b {
                        push(
                            IntegrityCode::CrossThreadResponse,
                            e.iri(),
                            format!("answers a review of <{a}> but points at a version of <{b}>"),
                        );
                    }
                }
            }
            _ => {}
        }
    }
    out
}

/// Slot values of formalizations are often external vocabularies; only
/// references in a nanopublication namespace are expected to resolve.
fn is_reference_to_nanopub(e: &Entry, r: &Iri) -> bool {
    match e.act {
        Act::Formalization(_) => r.as_str().starts_with(crate::trusty::NP_BASE),
        _ => true,
    }
}
