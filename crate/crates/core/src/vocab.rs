//! The constants table: every IRI the engine emits or recognises.
//!
//! Loaded once from the versioned `data/vocab.toml` shipped with the crate.
//! CURIEs in the file are expanded against its `[prefixes]` section.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use indexmap::IndexMap;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::rdf::{Dataset, Iri};

pub const VOCAB_TOML: &str = include_str!("../data/vocab.toml");

static VOCAB: LazyLock<Vocab> = LazyLock::new(|| Vocab::from_toml(VOCAB_TOML).expect("bundled vocab.toml is valid"));

pub fn vocab() -> &'static Vocab {
    &VOCAB
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Comparison {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Eq => "=",
            Comparison::Ge => "≥",
            Comparison::Gt => ">",
        }
    }

    pub fn holds(self, value: Ratio<u64>, threshold: Ratio<u64>) -> bool {
        match self {
            Comparison::Eq => value == threshold,
            Comparison::Ge => value >= threshold,
            Comparison::Gt => value > threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QualifierEntry {
    pub base: String,
    pub iri: Iri,
    pub can_iri: Option<Iri>,
    pub comparison: Comparison,
    #[serde(serialize_with = "ratio_str")]
    pub threshold: Ratio<u64>,
}

fn ratio_str<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationEntry {
    pub name: String,
    pub iri: Iri,
}

#[derive(Debug, Clone, Serialize)]
pub struct NanopubTerms {
    pub nanopublication: Iri,
    pub has_assertion: Iri,
    pub has_provenance: Iri,
    pub has_publication_info: Iri,
    pub created: Iri,
    pub creator: Iri,
    pub supersedes: Iri,
    pub attributed_to: Iri,
    pub title: Iri,
    pub label: Iri,
    #[serde(rename = "type")]
    pub rdf_type: Iri,
}

#[derive(Debug, Clone, Serialize)]
pub struct Datatypes {
    pub string: Iri,
    pub integer: Iri,
    pub date_time: Iri,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassDefinitionTerms {
    pub class: Iri,
    pub sub_class_of: Iri,
    pub label: Iri,
    pub definition: Iri,
    pub related_match: Iri,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuperpatternTerms {
    pub has_context_class: Iri,
    pub has_subject_class: Iri,
    pub has_qualifier: Iri,
    pub has_relation: Iri,
    pub has_object_class: Iri,
    pub universal_context: Iri,
    pub formalization_activity: Iri,
    pub was_generated_by: Iri,
    pub used: Iri,
    pub quoted_phrase: Iri,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReviewTerms {
    pub review_comment: Iri,
    pub response_comment: Iri,
    pub has_comment_text: Iri,
    pub has_impact: Iri,
    pub refers_to: Iri,
    pub refers_to_mentioning_of: Iri,
    pub is_response_to: Iri,
    pub aspect: IndexMap<String, Iri>,
    pub disposition: IndexMap<String, Iri>,
    pub action: IndexMap<String, Iri>,
    pub agreement: IndexMap<String, Iri>,
    pub addressed: IndexMap<String, Iri>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PublishingTerms {
    pub with_status: Iri,
    pub part_of: Iri,
    pub description: Iri,
    pub submitted: Iri,
    pub decision: IndexMap<String, Iri>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Vocab {
    pub version: String,
    pub default_venue: Iri,
    pub prefixes: IndexMap<String, String>,
    pub datatypes: Datatypes,
    pub nanopub: NanopubTerms,
    pub class_definition: ClassDefinitionTerms,
    pub superpattern: SuperpatternTerms,
    pub qualifiers: Vec<QualifierEntry>,
    pub relations: Vec<RelationEntry>,
    pub review: ReviewTerms,
    pub publishing: PublishingTerms,
}

#[derive(Debug, thiserror::Error)]
pub enum VocabError {
    #[error("malformed vocabulary file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("missing entry {0}")]
    Missing(String),
    #[error("cannot expand {0:?}")]
    BadTerm(String),
    #[error("bad threshold {0:?}")]
    BadThreshold(String),
}

#[derive(Deserialize)]
struct RawQualifier {
    base: String,
    iri: String,
    can_iri: Option<String>,
    comparison: Comparison,
    threshold: String,
}

#[derive(Deserialize)]
struct RawRelation {
    name: String,
    iri: String,
}

#[derive(Deserialize)]
struct RawVocab {
    version: String,
    default_venue: String,
    prefixes: IndexMap<String, String>,
    datatypes: BTreeMap<String, String>,
    nanopub: BTreeMap<String, String>,
    class_definition: BTreeMap<String, String>,
    superpattern: BTreeMap<String, String>,
    qualifier: Vec<RawQualifier>,
    relation: Vec<RawRelation>,
    review: toml::Table,
    publishing: toml::Table,
}

struct Expander<'a> {
    prefixes: &'a IndexMap<String, String>,
}

impl Expander<'_> {
    fn expand(&self, curie: &str) -> Result<Iri, VocabError> {
        let (p, local) = curie.split_once(':').ok_or_else(|| VocabError::BadTerm(curie.into()))?;
        let ns = self.prefixes.get(p).ok_or_else(|| VocabError::BadTerm(curie.into()))?;
        Iri::new(format!("{ns}{local}")).map_err(|_| VocabError::BadTerm(curie.into()))
    }

    fn get(&self, table: &BTreeMap<String, String>, section: &str, key: &str) -> Result<Iri, VocabError> {
        let v = table.get(key).ok_or_else(|| VocabError::Missing(format!("{section}.{key}")))?;
        self.expand(v)
    }

    fn get_value(&self, table: &toml::Table, section: &str, key: &str) -> Result<Iri, VocabError> {
        let v =
            table.get(key).and_then(|v| v.as_str()).ok_or_else(|| VocabError::Missing(format!("{section}.{key}")))?;
        self.expand(v)
    }

    fn map(&self, table: &toml::Table, section: &str, key: &str) -> Result<IndexMap<String, Iri>, VocabError> {
        let sub =
            table.get(key).and_then(|v| v.as_table()).ok_or_else(|| VocabError::Missing(format!("{section}.{key}")))?;
        sub.iter()
            .map(|(k, v)| {
                let s = v.as_str().ok_or_else(|| VocabError::BadTerm(k.clone()))?;
                Ok((k.clone(), self.expand(s)?))
            })
            .collect()
    }
}

fn parse_ratio(s: &str) -> Result<Ratio<u64>, VocabError> {
    let bad = || VocabError::BadThreshold(s.into());
    let r = match s.split_once('/') {
        Some((n, d)) => {
            let d: u64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ratio::new(n.trim().parse().map_err(|_| bad())?, d)
        }
        None => Ratio::from_integer(s.trim().parse().map_err(|_| bad())?),
    };
    if r > Ratio::from_integer(1) {
        return Err(bad());
    }
    Ok(r)
}

impl Vocab {
    pub fn from_toml(text: &str) -> Result<Vocab, VocabError> {
        let raw: RawVocab = toml::from_str(text)?;
        let x = Expander { prefixes: &raw.prefixes };
        let n = &raw.nanopub;
        let cd = &raw.class_definition;
        let sp = &raw.superpattern;
        let dt = &raw.datatypes;
        let rv = &raw.review;
        let pb = &raw.publishing;
        Ok(Vocab {
            version: raw.version.clone(),
            default_venue: x.expand(&raw.default_venue)?,
            datatypes: Datatypes {
                string: x.get(dt, "datatypes", "string")?,
                integer: x.get(dt, "datatypes", "integer")?,
                date_time: x.get(dt, "datatypes", "date_time")?,
            },
            nanopub: NanopubTerms {
                nanopublication: x.get(n, "nanopub", "nanopublication")?,
                has_assertion: x.get(n, "nanopub", "has_assertion")?,
                has_provenance: x.get(n, "nanopub", "has_provenance")?,
                has_publication_info: x.get(n, "nanopub", "has_publication_info")?,
                created: x.get(n, "nanopub", "created")?,
                creator: x.get(n, "nanopub", "creator")?,
                supersedes: x.get(n, "nanopub", "supersedes")?,
                attributed_to: x.get(n, "nanopub", "attributed_to")?,
                title: x.get(n, "nanopub", "title")?,
                label: x.get(n, "nanopub", "label")?,
                rdf_type: x.get(n, "nanopub", "type")?,
            },
            class_definition: ClassDefinitionTerms {
                class: x.get(cd, "class_definition", "class")?,
                sub_class_of: x.get(cd, "class_definition", "sub_class_of")?,
                label: x.get(cd, "class_definition", "label")?,
                definition: x.get(cd, "class_definition", "definition")?,
                related_match: x.get(cd, "class_definition", "related_match")?,
            },
            superpattern: SuperpatternTerms {
                has_context_class: x.get(sp, "superpattern", "has_context_class")?,
                has_subject_class: x.get(sp, "superpattern", "has_subject_class")?,
                has_qualifier: x.get(sp, "superpattern", "has_qualifier")?,
                has_relation: x.get(sp, "superpattern", "has_relation")?,
                has_object_class: x.get(sp, "superpattern", "has_object_class")?,
                universal_context: x.get(sp, "superpattern", "universal_context")?,
                formalization_activity: x.get(sp, "superpattern", "formalization_activity")?,
                was_generated_by: x.get(sp, "superpattern", "was_generated_by")?,
                used: x.get(sp, "superpattern", "used")?,
                quoted_phrase: x.get(sp, "superpattern", "quoted_phrase")?,
            },
            qualifiers: raw
                .qualifier
                .iter()
                .map(|q| {
                    Ok(QualifierEntry {
                        base: q.base.clone(),
                        iri: x.expand(&q.iri)?,
                        can_iri: q.can_iri.as_deref().map(|c| x.expand(c)).transpose()?,
                        comparison: q.comparison,
                        threshold: parse_ratio(&q.threshold)?,
                    })
                })
                .collect::<Result<_, VocabError>>()?,
            relations: raw
                .relation
                .iter()
                .map(|r| Ok(RelationEntry { name: r.name.clone(), iri: x.expand(&r.iri)? }))
                .collect::<Result<_, VocabError>>()?,
            review: ReviewTerms {
                review_comment: x.get_value(rv, "review", "review_comment")?,
                response_comment: x.get_value(rv, "review", "response_comment")?,
                has_comment_text: x.get_value(rv, "review", "has_comment_text")?,
                has_impact: x.get_value(rv, "review", "has_impact")?,
                refers_to: x.get_value(rv, "review", "refers_to")?,
                refers_to_mentioning_of: x.get_value(rv, "review", "refers_to_mentioning_of")?,
                is_response_to: x.get_value(rv, "review", "is_response_to")?,
                aspect: x.map(rv, "review", "aspect")?,
                disposition: x.map(rv, "review", "disposition")?,
                action: x.map(rv, "review", "action")?,
                agreement: x.map(rv, "review", "agreement")?,
                addressed: x.map(rv, "review", "addressed")?,
            },
            publishing: PublishingTerms {
                with_status: x.get_value(pb, "publishing", "with_status")?,
                part_of: x.get_value(pb, "publishing", "part_of")?,
                description: x.get_value(pb, "publishing", "description")?,
                submitted: x.get_value(pb, "publishing", "submitted")?,
                decision: x.map(pb, "publishing", "decision")?,
            },
            prefixes: raw.prefixes,
        })
    }

    pub fn qualifier(&self, base: &str) -> Option<&QualifierEntry> {
        self.qualifiers.iter().find(|q| q.base == base)
    }

    pub fn relation_by_name(&self, name: &str) -> Option<&RelationEntry> {
        self.relations.iter().find(|r| r.name == name)
    }

    pub fn relation_by_iri(&self, iri: &Iri) -> Option<&RelationEntry> {
        self.relations.iter().find(|r| &r.iri == iri)
    }

    /// Adds every prefix of the table to `d` so TriG output stays compact.
    pub fn apply_prefixes(&self, d: &mut Dataset) {
        for (p, ns) in &self.prefixes {
            d.set_prefix(p.clone(), ns.clone());
        }
    }
}
