//! Classical HTML views of published nanopublications.

use std::fmt::Write as _;

use crate::nanopub::format_timestamp;
use crate::rdf::{Iri, Term};
use crate::registry::{display_label, Index};
use crate::superpattern::{read_formalization_provenance, Context, SuperPattern};
use crate::trusty::ArtifactCode;
use crate::workflow::{Act, Entry};

/// Escapes text for element content and double-quoted attributes.
pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

fn view_href(iri: &Iri) -> String {
    match ArtifactCode::from_iri(iri) {
        Some(c) => format!("/view/{c}"),
        None => iri.to_string(),
    }
}

fn link(iri: &Iri, text: &str) -> String {
    format!("<a href=\"{}\">{}</a>", escape(iri.as_str()), escape(text))
}

fn page(title: &str, body: &str) -> String {
    format!(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>{t}</title>\n\
         <style>body{{font-family:serif;max-width:48em;margin:2em auto;line-height:1.5}}\
         .superseded{{background:#fde2e1;padding:.5em 1em;border-left:4px solid #e15759}}\
         table{{border-collapse:collapse}}td,th{{border:1px solid #ccc;padding:.2em .5em;text-align:left}}\
         .formula{{font-family:monospace;white-space:pre-wrap}}</style>\n</head>\n<body>\n<article>\n\
         <h1>{t}</h1>\n{body}</article>\n</body>\n</html>\n",
        t = escape(title)
    )
}

/// Newer versions that supersede `e`, earliest first.
fn superseded_by<'a>(idx: &'a Index, e: &Entry) -> Vec<&'a Entry> {
    idx.corpus().successors(e.iri())
}

fn header(idx: &Index, e: &Entry) -> String {
    let mut out = String::new();
    if let Some(newer) = superseded_by(idx, e).first() {
        let head = idx
            .corpus()
            .chain_root(e.iri())
            .and_then(|r| idx.corpus().versions_from(&r))
            .ok()
            .and_then(|c| c.last().cloned());
        let _ = write!(
            out,
            "<p class=\"superseded\">This version has been superseded by <a href=\"{}\">a newer version</a>.",
            view_href(newer.iri())
        );
        if let Some(h) = head.filter(|h| h != newer.iri()) {
            let _ = write!(out, " The latest version is <a href=\"{}\">here</a>.", view_href(&h));
        }
        out.push_str("</p>\n");
    }
    let authors: Vec<String> = e.np.creators().iter().map(|c| link(c, c.as_str())).collect();
    if !authors.is_empty() {
        let _ = writeln!(out, "<p class=\"authors\">By {}</p>", authors.join(", "));
    }
    if let Some(t) = e.created {
        let _ = writeln!(out, "<p class=\"created\">Published {}</p>", format_timestamp(&t));
    }
    for older in e.np.supersedes() {
        let _ = writeln!(
            out,
            "<p class=\"supersedes\">Supersedes <a href=\"{}\">{}</a></p>",
            view_href(&older),
            escape(older.as_str())
        );
    }
    out
}

fn footer(e: &Entry) -> String {
    let code = e.np.code().map(|c| c.to_string()).unwrap_or_default();
    format!(
        "<footer><p>Nanopublication {} · <a href=\"/np/{}\">TriG</a></p></footer>\n",
        link(e.iri(), e.iri().as_str()),
        escape(&code)
    )
}

fn formalization_view(idx: &Index, e: &Entry, sp: &SuperPattern) -> String {
    let sentence = sp.render_sentence();
    let title = e.np.title().unwrap_or_else(|| format!("Formalizing: {sentence}"));
    let mut body = header(idx, e);
    let _ =
        writeln!(body, "<section class=\"claim\">\n<h2>Claim</h2>\n<p class=\"sentence\">{}</p>", escape(&sentence));
    let _ = writeln!(body, "<p class=\"formula\">{}</p>\n</section>", escape(&sp.render_formula()));
    body.push_str("<section class=\"slots\">\n<h2>Super-pattern</h2>\n<table>\n");
    let context = match &sp.context {
        Context::Universal => link(sp.context.iri(), "(no context class)"),
        Context::Class(c) => link(&c.iri, &c.label),
    };
    let rows = [
        ("Context", context),
        ("Subject", link(&sp.subject.iri, &sp.subject.label)),
        ("Qualifier", link(sp.qualifier.iri(), &sp.qualifier.to_string())),
        ("Relation", link(sp.relation.iri(), sp.relation.name())),
        ("Object", link(&sp.object.iri, &sp.object.label)),
    ];
    for (k, v) in rows {
        let _ = writeln!(body, "<tr><th>{k}</th><td>{v}</td></tr>");
    }
    body.push_str("</table>\n</section>\n");
    if let Some((source, quote)) = read_formalization_provenance(&e.np) {
        body.push_str("<section class=\"provenance\">\n<h2>Provenance</h2>\n");
        let _ = writeln!(body, "<p>Formalized from {}</p>", link(&source, source.as_str()));
        if let Some(q) = quote {
            let _ = writeln!(body, "<blockquote>{}</blockquote>", escape(&q));
        }
        body.push_str("</section>\n");
    }
    body.push_str(&footer(e));
    page(&title, &body)
}

fn term_html(t: &Term) -> String {
    match t {
        Term::Iri(i) => link(i, i.as_str()),
        Term::Literal(l) => format!("&quot;{}&quot;", escape(l.lexical())),
        Term::BlankNode(b) => escape(&format!("_:{b}")),
    }
}

fn generic_view(idx: &Index, e: &Entry) -> String {
    let title = e.np.title().unwrap_or_else(|| match e.kind {
        Some(k) => format!("{}: {}", capitalize(k.description()), display_label(e)),
        None => e.iri().to_string(),
    });
    let mut body = header(idx, e);
    body.push_str("<section class=\"quads\">\n<table>\n<tr><th>graph</th><th>subject</th><th>predicate</th><th>object</th></tr>\n");
    let mut quads: Vec<_> = e.np.dataset().iter().collect();
    quads.sort();
    for q in quads {
        let _ = writeln!(
            body,
            "<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>",
            escape(q.graph.fragment().unwrap_or(q.graph.as_str())),
            term_html(&q.subject),
            link(&q.predicate, q.predicate.as_str()),
            term_html(&q.object)
        );
    }
    body.push_str("</table>\n</section>\n");
    body.push_str(&footer(e));
    page(&title, &body)
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// HTML page for a stored nanopublication.
pub fn render(idx: &Index, e: &Entry) -> String {
    match &e.act {
        Act::Formalization(sp) => formalization_view(idx, e, sp),
        _ => generic_view(idx, e),
    }
}
