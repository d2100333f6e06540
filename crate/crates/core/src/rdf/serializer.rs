use std::fmt::Write;

use indexmap::IndexMap;

use super::{Dataset, Iri, Literal, Quad, Term};

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

fn escape_string(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
}

fn write_nquads_term(t: &Term, out: &mut String) {
    match t {
        Term::Iri(i) => {
            let _ = write!(out, "<{}>", i.as_str());
        }
        Term::BlankNode(b) => {
            let _ = write!(out, "_:{b}");
        }
        Term::Literal(l) => {
            escape_string(l.lexical(), out);
            if let Some(dt) = l.datatype() {
                let _ = write!(out, "^^<{}>", dt.as_str());
            } else if let Some(lang) = l.language() {
                let _ = write!(out, "@{lang}");
            }
        }
    }
}

/// One N-Quads line per quad, sorted by (graph, subject, predicate, object)
/// under the total term order. No prefixes; the output is a pure function
/// of the quad set.
pub fn serialize_canonical(d: &Dataset) -> String {
    let mut quads: Vec<&Quad> = d.iter().collect();
    quads.sort();
    let mut out = String::new();
    for q in quads {
        write_nquads_term(&q.subject, &mut out);
        out.push(' ');
        let _ = write!(out, "<{}> ", q.predicate.as_str());
        write_nquads_term(&q.object, &mut out);
        let _ = writeln!(out, " <{}> .", q.graph.as_str());
    }
    out
}

fn is_safe_local(local: &str) -> bool {
    if local.is_empty() {
        return true;
    }
    let first_ok = local.starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_');
    let last_ok = local.ends_with(|c: char| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    first_ok && last_ok && local.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

struct Compactor<'a> {
    // (namespace, prefix), longest namespace first
    namespaces: Vec<(&'a str, &'a str)>,
}

impl<'a> Compactor<'a> {
    fn new(d: &'a Dataset) -> Self {
        let mut namespaces: Vec<(&str, &str)> = d.prefixes().iter().map(|(p, ns)| (ns.as_str(), p.as_str())).collect();
        namespaces.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.1.cmp(b.1)));
        Compactor { namespaces }
    }

    fn iri(&self, iri: &Iri, out: &mut String) {
        for (ns, prefix) in &self.namespaces {
            if let Some(local) = iri.as_str().strip_prefix(ns) {
                if is_safe_local(local) {
                    let _ = write!(out, "{prefix}:{local}");
                    return;
                }
            }
        }
        let _ = write!(out, "<{}>", iri.as_str());
    }

    fn literal(&self, l: &Literal, out: &mut String) {
        escape_string(l.lexical(), out);
        if let Some(dt) = l.datatype() {
            out.push_str("^^");
            self.iri(dt, out);
        } else if let Some(lang) = l.language() {
            let _ = write!(out, "@{lang}");
        }
    }

    fn term(&self, t: &Term, out: &mut String) {
        match t {
            Term::Iri(i) => self.iri(i, out),
            Term::BlankNode(b) => {
                let _ = write!(out, "_:{b}");
            }
            Term::Literal(l) => self.literal(l, out),
        }
    }
}

/// Human-readable TriG: prefix header, then one block per graph in order of
/// first appearance, subjects grouped with `;` and `,` continuations.
pub fn serialize_trig(d: &Dataset) -> String {
    let c = Compactor::new(d);
    let mut out = String::new();
    for (prefix, ns) in d.prefixes() {
        let _ = writeln!(out, "@prefix {prefix}: <{ns}> .");
    }
    for graph in d.graph_names() {
        let mut subjects: IndexMap<&Term, IndexMap<&Iri, Vec<&Term>>> = IndexMap::new();
        for q in d.quads_in(&graph) {
            subjects.entry(&q.subject).or_default().entry(&q.predicate).or_default().push(&q.object);
        }
        out.push('\n');
        c.iri(&graph, &mut out);
        out.push_str(" {\n");
        for (subject, preds) in subjects {
            out.push_str("  ");
            c.term(subject, &mut out);
            let n = preds.len();
            for (i, (pred, objects)) in preds.into_iter().enumerate() {
                out.push_str(if i == 0 { " " } else { "    " });
                if pred.as_str() == RDF_TYPE {
                    out.push('a');
                } else {
                    c.iri(pred, &mut out);
                }
                out.push(' ');
                for (j, o) in objects.iter().enumerate() {
                    if j > 0 {
                        out.push_str(", ");
                    }
                    c.term(o, &mut out);
                }
                out.push_str(if i + 1 == n { " .\n" } else { " ;\n" });
            }
        }
        out.push_str("}\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_trig;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn canonical_is_order_independent() {
        let g = iri("http://g");
        let a = Quad::new(iri("http://b"), iri("http://p"), Literal::simple("x"), g.clone());
        let b = Quad::new(iri("http://a"), iri("http://p"), iri("http://o"), g);
        let d1: Dataset = [a.clone(), b.clone()].into_iter().collect();
        let d2: Dataset = [b, a].into_iter().collect();
        assert_eq!(serialize_canonical(&d1), serialize_canonical(&d2));
        assert!(serialize_canonical(&d1).starts_with("<http://a>"));
    }

    #[test]
    fn empty_outputs() {
        assert_eq!(serialize_canonical(&Dataset::new()), "");
        let mut d = Dataset::new();
        d.set_prefix("ex", "http://ex.org/");
        assert_eq!(serialize_trig(&d), "@prefix ex: <http://ex.org/> .\n");
    }

    #[test]
    fn canonical_literal_forms() {
        let g = iri("http://g");
        let s = iri("http://s");
        let p = iri("http://p");
        let d: Dataset = [
            Quad::new(s.clone(), p.clone(), Literal::simple("a\"b\\c\n"), g.clone()),
            Quad::new(s.clone(), p.clone(), Literal::integer(5), g.clone()),
            Quad::new(s, p, Literal::lang("hi", "en"), g),
        ]
        .into_iter()
        .collect();
        let text = serialize_canonical(&d);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], r#"<http://s> <http://p> "5"^^<http://www.w3.org/2001/XMLSchema#integer> <http://g> ."#);
        assert_eq!(lines[1], r#"<http://s> <http://p> "a\"b\\c\n" <http://g> ."#);
        assert_eq!(lines[2], r#"<http://s> <http://p> "hi"@en <http://g> ."#);
    }

    #[test]
    fn trig_round_trip_with_unsafe_locals() {
        let mut d = Dataset::new();
        d.set_prefix("ex", "http://ex.org/");
        d.set_prefix("exa", "http://ex.org/a/");
        let g = iri("http://ex.org/g");
        d.insert(Quad::new(iri("http://ex.org/a/b"), iri(RDF_TYPE), iri("http://ex.org/-x"), g.clone()));
        d.insert(Quad::new(iri("http://ex.org/a/b"), iri("http://ex.org/p"), iri("http://ex.org/x."), g.clone()));
        d.insert(Quad::new(iri("http://ex.org/a/b"), iri("http://ex.org/p"), iri("http://ex.org/"), g));
        let text = serialize_trig(&d);
        assert!(text.contains("exa:b a <http://ex.org/-x>"), "{text}");
        assert_eq!(parse_trig(&text).unwrap(), d);
    }
}
