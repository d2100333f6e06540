//! Named, parameterized queries over the index.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use indexmap::IndexMap;
use serde::Serialize;
use serde_json::{json, Value};

use super::{display_label, Index, Registry, RegistryError, Result};
use crate::nanopub::format_timestamp;
use crate::rdf::Iri;
use crate::trusty::ArtifactCode;
use crate::workflow::{self, Act, Entry, Kind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    Iri,
    String,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QueryParam {
    pub name: &'static str,
    pub kind: ParamKind,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QueryTemplate {
    pub name: &'static str,
    pub description: &'static str,
    pub params: &'static [QueryParam],
    pub columns: &'static [&'static str],
}

const fn iri(name: &'static str) -> QueryParam {
    QueryParam { name, kind: ParamKind::Iri }
}

pub const QUERIES: &[QueryTemplate] = &[
    QueryTemplate {
        name: "list-submissions",
        description: "Submissions to a venue with their thread status",
        params: &[iri("venue")],
        columns: &[
            "submission",
            "code",
            "created",
            "creator",
            "formalization",
            "head",
            "head_code",
            "status",
            "sentence",
            "reviews",
            "responses",
        ],
    },
    QueryTemplate {
        name: "reviews-for",
        description: "Review comments targeting a nanopublication",
        params: &[iri("target")],
        columns: &["review", "code", "created", "creator", "aspect", "disposition", "action", "impact", "slot", "text"],
    },
    QueryTemplate {
        name: "responses-for",
        description: "Author responses to a review comment",
        params: &[iri("review")],
        columns: &["response", "code", "created", "creator", "agreement", "addressed", "updated", "text"],
    },
    QueryTemplate {
        name: "thread",
        description: "Every nanopublication of a submission thread",
        params: &[iri("submission")],
        columns: &["member", "code", "created", "type", "label"],
    },
    QueryTemplate {
        name: "class-definitions",
        description: "Classes minted by an author",
        params: &[iri("author")],
        columns: &["class_definition", "code", "created", "class", "label", "definition", "super_class"],
    },
    QueryTemplate {
        name: "latest-version",
        description: "Head of the version chain of a formalization",
        params: &[iri("formalization")],
        columns: &["formalization", "head", "code", "created", "versions"],
    },
];

pub type Row = IndexMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult {
    pub query: String,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

fn code_of(iri: &Iri) -> Value {
    ArtifactCode::from_iri(iri).map_or(Value::Null, |c| Value::String(c.to_string()))
}

fn ts(t: Option<DateTime<Utc>>) -> Value {
    t.map_or(Value::Null, |t| Value::String(format_timestamp(&t)))
}

fn creator(e: &Entry) -> Value {
    e.np.creators().first().map_or(Value::Null, |c| Value::String(c.to_string()))
}

fn opt_iri(i: Option<&Iri>) -> Value {
    i.map_or(Value::Null, |i| Value::String(i.to_string()))
}

/// Entries for `iris`, sorted by creation time then IRI.
fn sorted<'a>(idx: &'a Index, iris: impl IntoIterator<Item = &'a Iri>) -> Vec<&'a Entry> {
    let mut v: Vec<&Entry> = iris.into_iter().filter_map(|i| idx.get(i)).collect();
    v.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
    v.dedup_by(|a, b| a.iri() == b.iri());
    v
}

pub(super) fn run(idx: &Index, name: &str, params: &BTreeMap<String, String>) -> Result<QueryResult> {
    let template =
        QUERIES.iter().find(|q| q.name == name).ok_or_else(|| RegistryError::UnknownQuery(name.to_string()))?;
    let mut bound: BTreeMap<&str, Iri> = BTreeMap::new();
    for p in template.params {
        let raw = params
            .get(p.name)
            .filter(|v| !v.trim().is_empty())
            .ok_or_else(|| RegistryError::UnboundParameter(p.name.to_string()))?;
        bound.insert(p.name, Registry::resolve(raw)?);
    }
    let arg = |n: &str| bound.get(n).expect("bound above");

    let rows: Vec<Row> = match name {
        "list-submissions" => sorted(idx, idx.submissions_in(arg("venue")))
            .into_iter()
            .map(|e| {
                let Act::Submission(s) = &e.act else { unreachable!("venue index holds submissions") };
                let thread = workflow::build_thread(idx.corpus(), e.iri()).ok();
                let head = thread.as_ref().and_then(|t| t.head()).map(|m| m.iri.clone());
                let sentence =
                    head.as_ref().or(Some(&s.formalization)).and_then(|h| idx.get(h)).and_then(|h| match &h.act {
                        Act::Formalization(sp) => Some(sp.render_sentence()),
                        _ => None,
                    });
                let mut r = Row::new();
                r.insert("submission".into(), json!(e.iri()));
                r.insert("code".into(), code_of(e.iri()));
                r.insert("created".into(), ts(e.created));
                r.insert("creator".into(), creator(e));
                r.insert("formalization".into(), json!(s.formalization));
                r.insert("head".into(), opt_iri(head.as_ref()));
                r.insert("head_code".into(), head.as_ref().map_or(Value::Null, code_of));
                r.insert(
                    "status".into(),
                    thread.as_ref().map_or(Value::Null, |t| json!(workflow::thread_status(t).to_string())),
                );
                r.insert("sentence".into(), sentence.map_or(Value::Null, Value::String));
                r.insert("reviews".into(), json!(thread.as_ref().map_or(0, |t| t.reviews.len())));
                r.insert("responses".into(), json!(thread.as_ref().map_or(0, |t| t.responses.len())));
                r
            })
            .collect(),
        "reviews-for" => {
            let target = arg("target");
            sorted(idx, idx.referrers(target))
                .into_iter()
                .filter_map(|e| match &e.act {
                    Act::Review(rc) if &rc.target == target => Some((e, rc)),
                    _ => None,
                })
                .map(|(e, rc)| {
                    let mut r = Row::new();
                    r.insert("review".into(), json!(e.iri()));
                    r.insert("code".into(), code_of(e.iri()));
                    r.insert("created".into(), ts(e.created));
                    r.insert("creator".into(), creator(e));
                    r.insert("aspect".into(), json!(rc.aspect));
                    r.insert("disposition".into(), json!(rc.disposition));
                    r.insert("action".into(), json!(rc.action));
                    r.insert("impact".into(), json!(rc.impact));
                    r.insert("slot".into(), opt_iri(rc.refers_to_mentioning_of.as_ref()));
                    r.insert("text".into(), json!(rc.text));
                    r
                })
                .collect()
        }
        "responses-for" => {
            let review = arg("review");
            sorted(idx, idx.referrers(review))
                .into_iter()
                .filter_map(|e| match &e.act {
                    Act::Response(rc) if &rc.in_response_to == review => Some((e, rc)),
                    _ => None,
                })
                .map(|(e, rc)| {
                    let mut r = Row::new();
                    r.insert("response".into(), json!(e.iri()));
                    r.insert("code".into(), code_of(e.iri()));
                    r.insert("created".into(), ts(e.created));
                    r.insert("creator".into(), creator(e));
                    r.insert("agreement".into(), json!(rc.agreement));
                    r.insert("addressed".into(), json!(rc.addressed));
                    r.insert("updated".into(), opt_iri(rc.refers_to.as_ref()));
                    r.insert("text".into(), json!(rc.text));
                    r
                })
                .collect()
        }
        "thread" => {
            let t = workflow::build_thread(idx.corpus(), arg("submission"))?;
            sorted(idx, t.members().into_iter().map(|m| &m.iri))
                .into_iter()
                .map(|e| {
                    let mut r = Row::new();
                    r.insert("member".into(), json!(e.iri()));
                    r.insert("code".into(), code_of(e.iri()));
                    r.insert("created".into(), ts(e.created));
                    r.insert("type".into(), e.kind.map_or(Value::Null, |k| json!(k.letter().to_string())));
                    r.insert("label".into(), json!(display_label(e)));
                    r
                })
                .collect()
        }
        "class-definitions" => {
            let author = arg("author");
            idx.corpus()
                .of_kind(Kind::ClassDefinition)
                .into_iter()
                .filter(|e| e.np.creators().contains(author))
                .filter_map(|e| match &e.act {
                    Act::ClassDefinition(cd) => Some((e, cd)),
                    _ => None,
                })
                .map(|(e, cd)| {
                    let mut r = Row::new();
                    r.insert("class_definition".into(), json!(e.iri()));
                    r.insert("code".into(), code_of(e.iri()));
                    r.insert("created".into(), ts(e.created));
                    r.insert("class".into(), json!(cd.iri));
                    r.insert("label".into(), json!(cd.label));
                    r.insert("definition".into(), json!(cd.definition));
                    r.insert("super_class".into(), json!(cd.super_class));
                    r
                })
                .collect()
        }
        "latest-version" => {
            let f = arg("formalization");
            match idx.get(f) {
                Some(e) if matches!(e.act, Act::Formalization(_)) => {
                    let root = idx.corpus().chain_root(f)?;
                    let chain = idx.corpus().versions_from(&root)?;
                    let head = chain.last().expect("non-empty");
                    let he = idx.get(head).expect("in corpus");
                    let mut r = Row::new();
                    r.insert("formalization".into(), json!(root));
                    r.insert("head".into(), json!(head));
                    r.insert("code".into(), code_of(head));
                    r.insert("created".into(), ts(he.created));
                    r.insert("versions".into(), json!(chain.len()));
                    vec![r]
                }
                _ => vec![],
            }
        }
        _ => unreachable!("template lookup succeeded"),
    };

    Ok(QueryResult { query: name.to_string(), columns: template.columns.iter().map(|c| c.to_string()).collect(), rows })
}
