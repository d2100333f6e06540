//! Export of the nanopublication network of a venue as DOT or JSON.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{display_label, Index};
use crate::rdf::Iri;
use crate::trusty::ArtifactCode;
use crate::workflow::Kind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
}

impl FromStr for GraphFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(GraphFormat::Dot),
            "json" => Ok(GraphFormat::Json),
            other => Err(format!("unknown graph format {other:?}; expected dot or json")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: String,
    pub to: String,
    /// `ref` or `supersedes`
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphExport {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

fn node_id(iri: &Iri) -> String {
    ArtifactCode::from_iri(iri).map_or_else(|| iri.to_string(), |c| c.to_string())
}

fn fill(kind: Kind) -> &'static str {
    match kind {
        Kind::Formalization => "#4e79a7",
        Kind::Submission => "#59a14f",
        Kind::Update => "#76b7b2",
        Kind::Review => "#f28e2b",
        Kind::Response => "#edc948",
        Kind::ClassDefinition => "#b07aa1",
        Kind::Decision => "#e15759",
    }
}

pub(super) fn export(idx: &Index, venue: &Iri) -> GraphExport {
    let mut members: BTreeSet<Iri> = BTreeSet::new();
    for (sub, thread) in idx.threads(venue) {
        members.insert(sub);
        if let Ok(t) = thread {
            members.extend(t.members().into_iter().map(|m| m.iri.clone()));
        }
    }
    let mut entries: Vec<_> = members.iter().filter_map(|i| idx.get(i)).collect();
    entries.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
    let position: BTreeMap<&Iri, usize> = entries.iter().enumerate().map(|(n, e)| (e.iri(), n)).collect();

    let nodes = entries
        .iter()
        .map(|e| GraphNode {
            id: node_id(e.iri()),
            kind: e.kind.map_or('?', Kind::letter).to_string(),
            label: display_label(e),
        })
        .collect();

    let mut edges = Vec::new();
    for e in &entries {
        let mut refs: Vec<(usize, &'static str, Iri)> =
            e.references().into_iter().filter_map(|r| position.get(&r).map(|&p| (p, "ref", r.clone()))).collect();
        for older in e.np.supersedes() {
            if let Some(&p) = position.get(&older) {
                refs.push((p, "supersedes", older));
            }
        }
        refs.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        refs.dedup();
        for (_, kind, to) in refs {
            edges.push(GraphEdge { from: node_id(e.iri()), to: node_id(&to), kind: kind.to_string() });
        }
    }
    GraphExport { nodes, edges }
}

impl GraphExport {
    pub fn render(&self, format: GraphFormat) -> String {
        match format {
            GraphFormat::Json => serde_json::to_string_pretty(self).expect("plain data serializes"),
            GraphFormat::Dot => self.to_dot(),
        }
    }

    /// Node multiset by type letter.
    pub fn kind_counts(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for n in &self.nodes {
            *m.entry(n.kind.clone()).or_default() += 1;
        }
        m
    }

    pub fn to_dot(&self) -> String {
        let mut out =
            String::from("digraph nanopublications {\n  rankdir=RL;\n  node [style=filled,fontcolor=white];\n");
        for n in &self.nodes {
            let color = Kind::ALL.iter().find(|k| k.letter().to_string() == n.kind).map_or("#bab0ac", |&k| fill(k));
            let _ = writeln!(
                out,
                "  \"{}\" [shape=circle,label=\"{}\",fillcolor=\"{}\",tooltip=\"{}\"];",
                n.id,
                n.kind,
                color,
                dot_escape(&n.label)
            );
        }
        for e in &self.edges {
            let style = if e.kind == "supersedes" { " [color=red,class=\"supersedes\"]" } else { "" };
            let _ = writeln!(out, "  \"{}\" -> \"{}\"{};", e.from, e.to, style);
        }
        out.push_str("}\n");
        out
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', " ")
}
