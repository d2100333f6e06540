//! The five-slot super-pattern claim: context, subject, qualifier, relation
//! and object.
//!
//! Instantiations are emitted as five `sp:` quads whose subject is the
//! assertion graph IRI. Class labels are not part of the assertion; they are
//! read from `rdfs:label` quads wherever they occur in the dataset (pubinfo
//! for formalizations, the assertion for class definitions) and fall back to
//! the IRI's local name.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nanopub::Nanopublication;
use crate::rdf::{Dataset, Iri, Literal, Quad, Term};
use crate::vocab::{vocab, Comparison, QualifierEntry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuperpatternError {
    #[error("missing slot {0}")]
    MissingSlot(Slot),
    #[error("unknown qualifier <{0}>")]
    UnknownQualifier(Iri),
    #[error("unknown relation <{0}>")]
    UnknownRelation(Iri),
    #[error("fragment holds more than one instantiation")]
    MultipleInstantiations,
    #[error("slot {0} has more than one value")]
    AmbiguousSlot(Slot),
    #[error("unknown qualifier {0:?}; expected one of: {1}")]
    UnknownQualifierName(String, String),
    #[error("unknown relation {0:?}; expected one of: {1}")]
    UnknownRelationName(String, String),
    #[error("subject and object are the same class, which only 'is same as' and 'co-occurs with' allow")]
    SubjectIsObject,
    #[error("empty {0}")]
    Empty(&'static str),
    #[error("not a class definition: {0}")]
    NotAClassDefinition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Context,
    Subject,
    Qualifier,
    Relation,
    Object,
}

impl Slot {
    pub const ALL: [Slot; 5] = [Slot::Context, Slot::Subject, Slot::Qualifier, Slot::Relation, Slot::Object];

    pub fn predicate(self) -> &'static Iri {
        let t = &vocab().superpattern;
        match self {
            Slot::Context => &t.has_context_class,
            Slot::Subject => &t.has_subject_class,
            Slot::Qualifier => &t.has_qualifier,
            Slot::Relation => &t.has_relation,
            Slot::Object => &t.has_object_class,
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slot::Context => "context",
            Slot::Subject => "subject",
            Slot::Qualifier => "qualifier",
            Slot::Relation => "relation",
            Slot::Object => "object",
        })
    }
}

impl FromStr for Slot {
    type Err = SuperpatternError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Slot::ALL
            .into_iter()
            .find(|slot| slot.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or(SuperpatternError::Empty("slot name"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QualifierBase {
    Always,
    Generally,
    Mostly,
    Frequently,
    Sometimes,
    Never,
}

impl QualifierBase {
    pub const ALL: [QualifierBase; 6] = [
        QualifierBase::Always,
        QualifierBase::Generally,
        QualifierBase::Mostly,
        QualifierBase::Frequently,
        QualifierBase::Sometimes,
        QualifierBase::Never,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QualifierBase::Always => "always",
            QualifierBase::Generally => "generally",
            QualifierBase::Mostly => "mostly",
            QualifierBase::Frequently => "frequently",
            QualifierBase::Sometimes => "sometimes",
            QualifierBase::Never => "never",
        }
    }

    fn entry(self) -> &'static QualifierEntry {
        vocab().qualifier(self.name()).expect("every base is in the constants table")
    }

    pub fn allows_can(self) -> bool {
        self.entry().can_iri.is_some()
    }
}

/// A frequency qualifier, optionally under "can" (possibility) modality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Qualifier {
    base: QualifierBase,
    can: bool,
}

impl Qualifier {
    pub fn new(base: QualifierBase, can: bool) -> Result<Self, SuperpatternError> {
        if can && !base.allows_can() {
            return Err(SuperpatternError::UnknownQualifierName(
                format!("can {}", base.name()),
                Self::legal_names().join(", "),
            ));
        }
        Ok(Qualifier { base, can })
    }

    pub fn plain(base: QualifierBase) -> Self {
        Qualifier { base, can: false }
    }

    pub fn base(self) -> QualifierBase {
        self.base
    }

    pub fn is_can(self) -> bool {
        self.can
    }

    /// Every legal form, plain forms first.
    pub fn all() -> Vec<Qualifier> {
        let plain = QualifierBase::ALL.iter().map(|&b| Qualifier::plain(b));
        let can = QualifierBase::ALL.iter().filter(|b| b.allows_can()).map(|&b| Qualifier { base: b, can: true });
        plain.chain(can).collect()
    }

    pub fn legal_names() -> Vec<String> {
        Self::all().iter().map(|q| q.to_string()).collect()
    }

    pub fn iri(self) -> &'static Iri {
        let e = self.base.entry();
        if self.can {
            e.can_iri.as_ref().expect("checked at construction")
        } else {
            &e.iri
        }
    }

    pub fn from_iri(iri: &Iri) -> Option<Qualifier> {
        Self::all().into_iter().find(|q| q.iri() == iri)
    }

    pub fn comparison(self) -> Comparison {
        self.base.entry().comparison
    }

    pub fn threshold(self) -> Ratio<u64> {
        self.base.entry().threshold
    }
}

impl fmt::Display for Qualifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.can {
            f.write_str("can ")?;
        }
        f.write_str(self.base.name())
    }
}

impl FromStr for Qualifier {
    type Err = SuperpatternError;

    /// Accepts "generally", "can generally" and the camel-case local names
    /// used in IRIs ("canGenerally").
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', '_'], " ");
        let norm = norm.strip_suffix("qualifier").unwrap_or(&norm).trim().to_string();
        let (can, rest) = match norm.strip_prefix("can") {
            Some(rest) => (true, rest.trim()),
            None => (false, norm.as_str()),
        };
        let err = || SuperpatternError::UnknownQualifierName(s.to_string(), Self::legal_names().join(", "));
        let base = QualifierBase::ALL.into_iter().find(|b| b.name() == rest).ok_or_else(err)?;
        Qualifier::new(base, can).map_err(|_| err())
    }
}

impl Serialize for Qualifier {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Qualifier {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One of the relation types of the constants table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationType {
    name: String,
    iri: Iri,
}

impl RelationType {
    pub fn all() -> Vec<RelationType> {
        vocab().relations.iter().map(|r| RelationType { name: r.name.clone(), iri: r.iri.clone() }).collect()
    }

    /// Accepts the display name ("co-occurs with"), the hyphenated form
    /// ("co-occurs-with") or the IRI local name ("coOccursWith").
    pub fn from_name(name: &str) -> Result<RelationType, SuperpatternError> {
        let wanted = name.trim();
        let squash = |s: &str| s.to_ascii_lowercase().replace([' ', '-', '_'], "");
        Self::all().into_iter().find(|r| r.name == wanted || squash(&r.name) == squash(wanted)).ok_or_else(|| {
            let legal: Vec<String> = Self::all().into_iter().map(|r| r.name).collect();
            SuperpatternError::UnknownRelationName(name.to_string(), legal.join(", "))
        })
    }

    pub fn from_iri(iri: &Iri) -> Option<RelationType> {
        vocab().relation_by_iri(iri).map(|r| RelationType { name: r.name.clone(), iri: r.iri.clone() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn iri(&self) -> &Iri {
        &self.iri
    }

    fn allows_identical_ends(&self) -> bool {
        matches!(self.name.as_str(), "is same as" | "co-occurs with")
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl Serialize for RelationType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name)
    }
}

impl<'de> Deserialize<'de> for RelationType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        RelationType::from_name(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassRef {
    pub iri: Iri,
    pub label: String,
}

impl ClassRef {
    pub fn new(iri: Iri, label: impl Into<String>) -> Self {
        ClassRef { iri, label: label.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Context {
    Universal,
    Class(ClassRef),
}

impl Context {
    pub fn iri(&self) -> &Iri {
        match self {
            Context::Universal => &vocab().superpattern.universal_context,
            Context::Class(c) => &c.iri,
        }
    }

    pub fn class(&self) -> Option<&ClassRef> {
        match self {
            Context::Universal => None,
            Context::Class(c) => Some(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SuperPattern {
    pub context: Context,
    pub subject: ClassRef,
    pub qualifier: Qualifier,
    pub relation: RelationType,
    pub object: ClassRef,
}

impl SuperPattern {
    pub fn check(&self) -> Result<(), SuperpatternError> {
        let classes = self.context.class().into_iter().chain([&self.subject, &self.object]);
        for c in classes {
            if c.label.trim().is_empty() {
                return Err(SuperpatternError::Empty("class label"));
            }
        }
        if self.subject.iri == self.object.iri && !self.relation.allows_identical_ends() {
            return Err(SuperpatternError::SubjectIsObject);
        }
        Ok(())
    }

    /// The natural-language reading of the claim.
    pub fn render_sentence(&self) -> String {
        match &self.context {
            Context::Class(c) => format!(
                "Every thing of type '{}' that is in the context of a thing of type '{}' {} has a relation of type '{}' to a thing of type '{}' that is in the same context.",
                self.subject.label, c.label, self.qualifier, self.relation, self.object.label
            ),
            Context::Universal => format!(
                "Every thing of type '{}' {} has a relation of type '{}' to a thing of type '{}'.",
                self.subject.label, self.qualifier, self.relation, self.object.label
            ),
        }
    }

    /// The conditional-probability reading of the claim.
    pub fn render_formula(&self) -> String {
        let o = slug(&self.object.label);
        let r = slug(self.relation.name());
        let s = slug(&self.subject.label);
        let body = match &self.context {
            Context::Class(c) => format!(
                "P( ∃z( {o}(z) ∧ in-context(z,x) ∧ {r}(y,z) ) | {s}(y) ∧ {}(x) ∧ in-context(y,x) )",
                slug(&c.label)
            ),
            Context::Universal => format!("P( ∃z( {o}(z) ∧ {r}(y,z) ) | {s}(y) )"),
        };
        let q = self.qualifier;
        let modal = if q.is_can() { "◇ " } else { "" };
        format!("{modal}{body} {} {}", q.comparison().symbol(), decimal(q.threshold()))
    }

    /// Five `sp:` quads about `graph`, all in `graph`.
    pub fn emit_assertion(&self, graph: &Iri) -> Dataset {
        let t = &vocab().superpattern;
        [
            (&t.has_context_class, self.context.iri()),
            (&t.has_subject_class, &self.subject.iri),
            (&t.has_qualifier, self.qualifier.iri()),
            (&t.has_relation, self.relation.iri()),
            (&t.has_object_class, &self.object.iri),
        ]
        .into_iter()
        .map(|(p, o)| Quad::new(graph, p, o, graph))
        .collect()
    }

    /// `rdfs:label` quads for every class slot, placed in `graph`.
    pub fn emit_labels(&self, graph: &Iri) -> Dataset {
        let label = &vocab().nanopub.label;
        self.context
            .class()
            .into_iter()
            .chain([&self.subject, &self.object])
            .map(|c| Quad::new(&c.iri, label, Literal::simple(&c.label), graph))
            .collect()
    }

    /// Inverse of [`SuperPattern::emit_assertion`]. Labels are taken from
    /// `rdfs:label` quads in `d`, falling back to local names.
    pub fn parse_assertion(d: &Dataset) -> Result<SuperPattern, SuperpatternError> {
        let t = &vocab().superpattern;
        let mut subjects: Vec<&Term> =
            d.iter().filter(|q| Slot::ALL.iter().any(|s| s.predicate() == &q.predicate)).map(|q| &q.subject).collect();
        subjects.sort();
        subjects.dedup();
        let node = match subjects.as_slice() {
            [] => return Err(SuperpatternError::MissingSlot(Slot::Subject)),
            [one] => (*one).clone(),
            _ => return Err(SuperpatternError::MultipleInstantiations),
        };
        let slot = |s: Slot| -> Result<Iri, SuperpatternError> {
            let mut vals: Vec<&Iri> = d
                .iter()
                .filter(|q| q.subject == node && &q.predicate == s.predicate())
                .filter_map(|q| q.object.as_iri())
                .collect();
            vals.dedup();
            match vals.as_slice() {
                [] => Err(SuperpatternError::MissingSlot(s)),
                [one] => Ok((*one).clone()),
                _ => Err(SuperpatternError::AmbiguousSlot(s)),
            }
        };
        let class = |iri: Iri| {
            let label = label_in(d, &iri).unwrap_or_else(|| iri.local_name().to_string());
            ClassRef { iri, label }
        };
        // An absent context slot reads as the universal context; emission
        // always writes the explicit term.
        let context = match slot(Slot::Context) {
            Err(SuperpatternError::MissingSlot(_)) => Context::Universal,
            Ok(i) if i == t.universal_context => Context::Universal,
            other => Context::Class(class(other?)),
        };
        let subject = class(slot(Slot::Subject)?);
        let q = slot(Slot::Qualifier)?;
        let qualifier = Qualifier::from_iri(&q).ok_or(SuperpatternError::UnknownQualifier(q))?;
        let r = slot(Slot::Relation)?;
        let relation = RelationType::from_iri(&r).ok_or(SuperpatternError::UnknownRelation(r))?;
        let object = class(slot(Slot::Object)?);
        Ok(SuperPattern { context, subject, qualifier, relation, object })
    }

    /// Reads the instantiation from a formalization nanopublication: slots
    /// from its assertion graph, labels from anywhere in it.
    pub fn from_nanopub(np: &Nanopublication) -> Result<SuperPattern, SuperpatternError> {
        let mut d = np.assertion();
        let label = &vocab().nanopub.label;
        d.extend(np.dataset().with_predicate(label).cloned());
        SuperPattern::parse_assertion(&d)
    }

    pub fn slot_iris(&self) -> [&Iri; 5] {
        [self.context.iri(), &self.subject.iri, self.qualifier.iri(), self.relation.iri(), &self.object.iri]
    }
}

fn label_in(d: &Dataset, iri: &Iri) -> Option<String> {
    let subject = Term::Iri(iri.clone());
    d.with_predicate(&vocab().nanopub.label)
        .filter(|q| q.subject == subject)
        .find_map(|q| q.object.as_literal().map(|l| l.lexical().to_string()))
}

/// Lowercase, spaces to hyphens: `rat brain endothelial cell` becomes
/// `rat-brain-endothelial-cell`.
pub fn slug(label: &str) -> String {
    label.split_whitespace().collect::<Vec<_>>().join("-").to_lowercase()
}

/// Exact decimal when the denominator only has factors 2 and 5, else `n/d`.
fn decimal(r: Ratio<u64>) -> String {
    let (n, d) = (*r.numer(), *r.denom());
    if d == 1 {
        return n.to_string();
    }
    let mut rest = d;
    let mut places = 0u32;
    while rest % 10 == 0 || rest % 2 == 0 || rest % 5 == 0 {
        if rest % 10 == 0 {
            rest /= 10;
        } else if rest % 2 == 0 {
            rest /= 2;
        } else {
            rest /= 5;
        }
        places += 1;
    }
    if rest != 1 {
        return format!("{n}/{d}");
    }
    let scale = 10u64.pow(places);
    let scaled = n * (scale / d);
    let int = scaled / scale;
    let frac = format!("{:0width$}", scaled % scale, width = places as usize);
    format!("{int}.{}", frac.trim_end_matches('0'))
}

/// A newly minted OWL class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDefinition {
    pub iri: Iri,
    pub label: String,
    pub definition: String,
    pub super_class: Iri,
    pub related: Vec<Iri>,
}

impl ClassDefinition {
    /// Mints `{nanopub}#{Label-with-hyphens}` for a class defined in the
    /// nanopublication `np`.
    pub fn mint_iri(np: &Iri, label: &str) -> Iri {
        np.with_fragment(&label.split_whitespace().collect::<Vec<_>>().join("-"))
    }

    pub fn check(&self) -> Result<(), SuperpatternError> {
        if self.label.trim().is_empty() {
            return Err(SuperpatternError::Empty("label"));
        }
        if self.definition.trim().is_empty() {
            return Err(SuperpatternError::Empty("definition"));
        }
        Ok(())
    }

    pub fn emit(&self, graph: &Iri) -> Dataset {
        let v = &vocab().class_definition;
        let rdf_type = &vocab().nanopub.rdf_type;
        let mut d = Dataset::new();
        d.insert(Quad::new(&self.iri, rdf_type, &v.class, graph));
        d.insert(Quad::new(&self.iri, &v.sub_class_of, &self.super_class, graph));
        d.insert(Quad::new(&self.iri, &v.label, Literal::simple(&self.label), graph));
        d.insert(Quad::new(&self.iri, &v.definition, Literal::simple(&self.definition), graph));
        for r in &self.related {
            d.insert(Quad::new(&self.iri, &v.related_match, r, graph));
        }
        d
    }

    pub fn parse(d: &Dataset) -> Result<ClassDefinition, SuperpatternError> {
        let v = &vocab().class_definition;
        let class_term = Term::Iri(v.class.clone());
        let classes: Vec<&Iri> = d
            .with_predicate(&vocab().nanopub.rdf_type)
            .filter(|q| q.object == class_term)
            .filter_map(|q| q.subject.as_iri())
            .collect();
        let iri = match classes.as_slice() {
            [one] => (*one).clone(),
            [] => return Err(SuperpatternError::NotAClassDefinition("no owl:Class declared".into())),
            _ => return Err(SuperpatternError::NotAClassDefinition("several classes declared".into())),
        };
        let me = Term::Iri(iri.clone());
        let objects = |p: &Iri| -> Vec<Term> {
            d.iter().filter(|q| q.subject == me && &q.predicate == p).map(|q| q.object.clone()).collect()
        };
        let literal = |p: &Iri, what: &'static str| -> Result<String, SuperpatternError> {
            objects(p)
                .iter()
                .find_map(|t| t.as_literal().map(|l| l.lexical().to_string()))
                .ok_or(SuperpatternError::Empty(what))
        };
        let super_class = objects(&v.sub_class_of)
            .iter()
            .find_map(|t| t.as_iri().cloned())
            .ok_or_else(|| SuperpatternError::NotAClassDefinition("no super-class".into()))?;
        let mut related: Vec<Iri> = objects(&v.related_match).iter().filter_map(|t| t.as_iri().cloned()).collect();
        related.sort();
        let cd = ClassDefinition {
            label: literal(&v.label, "label")?,
            definition: literal(&v.definition, "definition")?,
            iri,
            super_class,
            related,
        };
        cd.check()?;
        Ok(cd)
    }
}

/// Provenance linking `assertion` to the formalization activity that used
/// `source`, optionally quoting the phrase the claim was taken from.
pub fn formalization_provenance(assertion: &Iri, source: &Iri, quote: Option<&str>, graph: &Iri) -> Dataset {
    let t = &vocab().superpattern;
    let activity = assertion.with_fragment("formalization-activity");
    let mut d = Dataset::new();
    d.insert(Quad::new(assertion, &t.was_generated_by, &activity, graph));
    d.insert(Quad::new(&activity, &vocab().nanopub.rdf_type, &t.formalization_activity, graph));
    d.insert(Quad::new(&activity, &t.used, source, graph));
    if let Some(q) = quote {
        d.insert(Quad::new(&activity, &t.quoted_phrase, Literal::simple(q), graph));
    }
    d
}

/// Source publication and quoted phrase recorded by
/// [`formalization_provenance`], if any.
pub fn read_formalization_provenance(np: &Nanopublication) -> Option<(Iri, Option<String>)> {
    let t = &vocab().superpattern;
    let prov = np.provenance();
    let activity = prov
        .with_predicate(&t.was_generated_by)
        .find(|q| q.subject.as_iri() == Some(np.assertion_graph()))
        .and_then(|q| q.object.as_iri().cloned())?;
    let act = Term::Iri(activity);
    let source = prov.with_predicate(&t.used).find(|q| q.subject == act).and_then(|q| q.object.as_iri().cloned())?;
    let quote = prov
        .with_predicate(&t.quoted_phrase)
        .find(|q| q.subject == act)
        .and_then(|q| q.object.as_literal().map(|l| l.lexical().to_string()));
    Some((source, quote))
}
