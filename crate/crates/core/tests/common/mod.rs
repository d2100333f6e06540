//! Helpers shared by the integration suites: independent oracles, corpus
//! generators and process runners.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;

use chrono::{DateTime, Duration, TimeZone, Utc};
use num_rational::Ratio;
use rand::seq::IndexedRandom;
use rand::Rng;

use fpub::authoring::{self, Stamp};
use fpub::nanopub::Nanopublication;
use fpub::rdf::{parse_trig, Dataset, Iri, Literal, Quad, Term};
use fpub::semantics::World;
use fpub::superpattern::{ClassRef, Context, Qualifier, QualifierBase, RelationType, SuperPattern};
use fpub::workflow::{
    Action, Addressed, Agreement, Aspect, Decision, DecisionStatus, Disposition, ResponseComment, ReviewComment,
    Submission,
};

pub const ACTOR: &str = "https://orcid.org/0000-0002-1825-0097";
pub const VENUE: &str = "https://w3id.org/fpsi/DataScienceSpecialIssue";

pub fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn read_fixture(rel: &str) -> String {
    std::fs::read_to_string(fixtures().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

/// `(row, file, qualifier, relation, own_claim)` from the reference corpus manifest.
pub fn corpus_manifest() -> Vec<BTreeMap<String, String>> {
    let text = read_fixture("corpus/manifest.tsv");
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    lines.map(|l| header.iter().map(|h| h.to_string()).zip(l.split('\t').map(str::to_string)).collect()).collect()
}

pub fn corpus_nanopubs() -> Vec<(u32, Nanopublication)> {
    corpus_manifest()
        .iter()
        .map(|row| {
            let text = read_fixture(&format!("corpus/{}", row["file"]));
            (row["row"].parse().unwrap(), Nanopublication::parse_trig(&text).unwrap())
        })
        .collect()
}

/// One PASS/FAIL line on the real stderr (bypassing the test harness
/// capture), then a panic on failure.
pub fn report(name: &str, outcome: Result<String, String>) {
    // leading newline: libtest has already printed "test {name} ... "
    let line = match &outcome {
        Ok(detail) => format!("\nPASS {name}: {detail}\n"),
        Err(detail) => format!("\nFAIL {name}: {detail}\n"),
    };
    let _ = std::io::stderr().write_all(line.as_bytes());
    if let Err(detail) = outcome {
        panic!("{name}: {detail}");
    }
}

// ---------------------------------------------------------------------------
// Naive semantics oracle

/// Decides a claim by enumerating every individual for every bound variable,
/// straight from the probability formula. Returns (satisfying, condition).
pub fn naive_counts(sp: &SuperPattern, w: &World) -> (u64, u64) {
    let ind: Vec<&String> = w.individuals.iter().collect();
    let is = |i: &String, c: &Iri| w.membership.contains(&(i.clone(), c.clone()));
    let inctx = |a: &String, b: &String| w.in_context.contains(&(a.clone(), b.clone()));
    let rel = |a: &String, b: &String| w.relations.contains(&(sp.relation.iri().clone(), a.clone(), b.clone()));
    let mut sat = 0;
    let mut cond = 0;
    match &sp.context {
        Context::Universal => {
            for y in &ind {
                if !is(y, &sp.subject.iri) {
                    continue;
                }
                cond += 1;
                if ind.iter().any(|z| is(z, &sp.object.iri) && rel(y, z)) {
                    sat += 1;
                }
            }
        }
        Context::Class(c) => {
            for y in &ind {
                for x in &ind {
                    if !(is(y, &sp.subject.iri) && is(x, &c.iri) && inctx(y, x)) {
                        continue;
                    }
                    cond += 1;
                    if ind.iter().any(|z| is(z, &sp.object.iri) && inctx(z, x) && rel(y, z)) {
                        sat += 1;
                    }
                }
            }
        }
    }
    (sat, cond)
}

/// `Some(holds)` or `None` when the condition is empty.
pub fn naive_holds(sp: &SuperPattern, w: &World) -> Option<bool> {
    let (sat, cond) = naive_counts(sp, w);
    if cond == 0 {
        return None;
    }
    let p = Ratio::new(sat, cond);
    let q = sp.qualifier;
    // thresholds written out independently of the constants table
    let r = |n, d| Ratio::new(n, d);
    Some(match (q.is_can(), q.base()) {
        (true, _) => sat >= 1,
        (false, QualifierBase::Always) => p == r(1, 1),
        (false, QualifierBase::Generally) => p >= r(9, 10),
        (false, QualifierBase::Mostly) => p > r(1, 2),
        (false, QualifierBase::Frequently) => p >= r(1, 10),
        (false, QualifierBase::Sometimes) => p > r(0, 1),
        (false, QualifierBase::Never) => p == r(0, 1),
    })
}

pub const CLASSES: [&str; 4] = [
    "http://example.org/class/A",
    "http://example.org/class/B",
    "http://example.org/class/C",
    "http://example.org/class/D",
];

pub fn random_claim(rng: &mut impl Rng) -> SuperPattern {
    let class = |rng: &mut _| {
        let c = *CLASSES.choose(rng).unwrap();
        ClassRef::new(iri(c), c.rsplit('/').next().unwrap())
    };
    let context = if rng.random_bool(0.3) { Context::Universal } else { Context::Class(class(rng)) };
    let relations = RelationType::all();
    SuperPattern {
        context,
        subject: class(rng),
        qualifier: *Qualifier::all().choose(rng).unwrap(),
        relation: relations[..3].choose(rng).unwrap().clone(),
        object: class(rng),
    }
}

pub fn random_world(rng: &mut impl Rng) -> World {
    let n = rng.random_range(1..=12);
    let mut w = World::new();
    let ids: Vec<String> = (0..n).map(|i| format!("i{i}")).collect();
    for id in &ids {
        w.add_individual(id.clone());
        for c in CLASSES {
            if rng.random_bool(0.4) {
                w.add_member(id.clone(), &iri(c));
            }
        }
    }
    let relations = RelationType::all();
    for a in &ids {
        for b in &ids {
            if rng.random_bool(0.3) {
                w.add_context(a.clone(), b.clone());
            }
            for r in &relations[..3] {
                if rng.random_bool(0.15) {
                    w.add_relation(r.iri(), a.clone(), b.clone());
                }
            }
        }
    }
    w
}

// ---------------------------------------------------------------------------
// Mutation helpers for the immutability sweeps

/// Terms to substitute with: every term of the dataset plus fresh ones.
pub fn term_pool(d: &Dataset) -> Vec<Term> {
    let mut pool: Vec<Term> = d.iter().flat_map(|q| q.terms()).collect();
    pool.push(Term::Iri(iri("http://example.org/intruder")));
    pool.push(Term::Literal(Literal::simple("intruder")));
    pool.sort();
    pool.dedup();
    pool
}

/// Every single-quad deletion, insertion and substitution of `d`.
pub fn all_single_mutations(d: &Dataset) -> Vec<Dataset> {
    let quads: Vec<Quad> = d.iter().cloned().collect();
    let graphs = d.graph_names();
    let pool = term_pool(d);
    let mut out = Vec::new();
    for q in &quads {
        let mut m = d.clone();
        m.remove(q);
        out.push(m);
    }
    // insertions: each quad copied into each other graph, and one fresh
    // quad per graph
    for q in &quads {
        for g in &graphs {
            let mut moved = q.clone();
            moved.graph = g.clone();
            let mut m = d.clone();
            if m.insert(moved) {
                out.push(m);
            }
        }
    }
    for g in &graphs {
        let mut m = d.clone();
        m.insert(Quad {
            graph: g.clone(),
            subject: Term::Iri(iri("http://example.org/intruder")),
            predicate: iri("http://www.w3.org/2000/01/rdf-schema#comment"),
            object: Term::Literal(Literal::simple("inserted")),
        });
        out.push(m);
    }
    for q in &quads {
        for t in &pool {
            for pos in 0..4 {
                if let Some(m) = substitute(d, q, pos, t) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Replaces position `pos` (s, p, o, g) of `q` with `t`; `None` when that is
/// not a change or not a well-formed quad.
pub fn substitute(d: &Dataset, q: &Quad, pos: usize, t: &Term) -> Option<Dataset> {
    let mut n = q.clone();
    match pos {
        0 if !matches!(t, Term::Literal(_)) => n.subject = t.clone(),
        1 => n.predicate = t.as_iri()?.clone(),
        2 => n.object = t.clone(),
        3 => n.graph = t.as_iri()?.clone(),
        _ => return None,
    }
    if &n == q {
        return None;
    }
    let mut m = d.clone();
    m.remove(q);
    m.insert(n);
    Some(m)
}

pub fn random_mutation(d: &Dataset, rng: &mut impl Rng) -> Dataset {
    let quads: Vec<Quad> = d.iter().cloned().collect();
    let pool = term_pool(d);
    loop {
        let q = quads.choose(rng).unwrap();
        let m = match rng.random_range(0..3) {
            0 => {
                let mut m = d.clone();
                m.remove(q);
                Some(m)
            }
            1 => {
                let mut n = q.clone();
                n.graph = d.graph_names().choose(rng).unwrap().clone();
                n.object = pool.choose(rng).unwrap().clone();
                let mut m = d.clone();
                m.insert(n).then_some(m)
            }
            _ => substitute(d, q, rng.random_range(0..4), pool.choose(rng).unwrap()),
        };
        if let Some(m) = m {
            return m;
        }
    }
}

/// Verification outcome where a structural error counts as "not verified".
pub fn verifies(d: &Dataset) -> bool {
    fpub::trusty::verify(d).unwrap_or(false)
}

// ---------------------------------------------------------------------------
// DOT syntax check

/// Checks the subset of the DOT grammar the exporter may use: a digraph
/// with attribute statements, node statements and edge statements.
pub fn check_dot(text: &str) -> Result<(), String> {
    let tokens = dot_tokens(text)?;
    let mut p = DotParser { t: &tokens, i: 0 };
    p.graph()?;
    if p.i != tokens.len() {
        return Err(format!("trailing tokens after graph: {:?}", &tokens[p.i..]));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Sym(char),
    Arrow,
}

fn dot_tokens(text: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Tok::Arrow);
            i += 2;
        } else if "{}[];,=".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('\\') => {
                        s.push(*chars.get(i + 1).ok_or("dangling escape")?);
                        i += 2;
                    }
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            out.push(Tok::Id(s));
        } else if c.is_alphanumeric() || c == '_' || c == '.' || c == '#' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
                i += 1;
            }
            // bare ids may not contain '#'; colours must be quoted
            if c == '#' {
                return Err("unquoted '#'".into());
            }
            out.push(Tok::Id(chars[start..i].iter().collect()));
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

struct DotParser<'a> {
    t: &'a [Tok],
    i: usize,
}

impl DotParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.t.get(self.i)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), String> {
        if self.peek() == Some(&tok) {
            self.i += 1;
            Ok(())
        } else {
            Err(format!("expected {tok:?} at token {}, found {:?}", self.i, self.peek()))
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.peek() {
            Some(Tok::Id(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            other => Err(format!("expected id at token {}, found {other:?}", self.i)),
        }
    }

    fn graph(&mut self) -> Result<(), String> {
        if self.id()? != "digraph" {
            return Err("not a digraph".into());
        }
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.id()?;
        }
        self.expect(Tok::Sym('{'))?;
        while self.peek() != Some(&Tok::Sym('}')) {
            self.stmt()?;
        }
        self.expect(Tok::Sym('}'))
    }

    fn attrs(&mut self) -> Result<(), String> {
        self.expect(Tok::Sym('['))?;
        while self.peek() != Some(&Tok::Sym(']')) {
            self.id()?;
            self.expect(Tok::Sym('='))?;
            self.id()?;
            if matches!(self.peek(), Some(Tok::Sym(',' | ';'))) {
                self.i += 1;
            }
        }
        self.expect(Tok::Sym(']'))
    }

    fn stmt(&mut self) -> Result<(), String> {
        let first = self.id()?;
        match self.peek() {
            Some(Tok::Sym('=')) => {
                self.i += 1;
                self.id()?;
            }
            Some(Tok::Arrow) => {
                while self.peek() == Some(&Tok::Arrow) {
                    self.i += 1;
                    self.id()?;
                }
                if self.peek() == Some(&Tok::Sym('[')) {
                    self.attrs()?;
                }
            }
            Some(Tok::Sym('[')) => self.attrs()?,
            _ if ["graph", "node", "edge"].contains(&first.as_str()) => {
                return Err(format!("{first} statement without attributes"))
            }
            _ => {}
        }
        if self.peek() == Some(&Tok::Sym(';')) {
            self.i += 1;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Synthetic corpus with the shape of a venue's statistics table

#[derive(Debug, Clone, Copy)]
pub struct Totals {
    pub submissions: usize,
    pub class_definitions: usize,
    pub sp_reviews: usize,
    pub cd_reviews: usize,
    pub sp_responses: usize,
    pub cd_responses: usize,
    pub updates: usize,
}

pub struct Clock(DateTime<Utc>);

impl Clock {
    pub fn new() -> Self {
        Clock(Utc.with_ymd_and_hms(2021, 6, 1, 0, 0, 0).unwrap())
    }

    pub fn tick(&mut self) -> Stamp {
        self.0 += Duration::seconds(1);
        Stamp { creator: iri(ACTOR), time: self.0 }
    }
}

fn finalize(draft: Nanopublication) -> Nanopublication {
    draft.finalize().unwrap().0
}

/// Builds a venue where every per-type count equals `totals`; items are
/// dealt round-robin over the submissions. One formalization and one
/// decision per submission. Returned in publication order.
pub fn synthetic_corpus(t: Totals) -> Vec<Nanopublication> {
    let n = t.submissions;
    let mut clock = Clock::new();
    let mut out = Vec::new();
    let venue = iri(VENUE);

    let mut classes: Vec<Vec<ClassRef>> = vec![Vec::new(); n];
    let mut class_nps = Vec::new();
    for c in 0..t.class_definitions {
        let label = format!("synthetic class {c}");
        let np = finalize(
            authoring::class_definition(
                &label,
                &format!("definition of class {c}"),
                iri("http://www.wikidata.org/entity/Q35120"),
                vec![],
                &clock.tick(),
            )
            .unwrap(),
        );
        let cd = fpub::superpattern::ClassDefinition::parse(&np.assertion()).unwrap();
        classes[c % n].push(ClassRef::new(cd.iri, cd.label));
        class_nps.push(np.iri().clone());
        out.push(np);
    }
    assert!(classes.iter().all(|c| c.len() <= 3), "at most three class slots per claim");

    let pattern = |i: usize, qualifier: Qualifier| {
        let own = &classes[i];
        let wd = |q: usize| ClassRef::new(iri(&format!("http://www.wikidata.org/entity/Q{q}")), format!("item {q}"));
        SuperPattern {
            context: Context::Class(own.first().cloned().unwrap_or_else(|| wd(1000 + i))),
            subject: own.get(1).cloned().unwrap_or_else(|| wd(2000 + i)),
            qualifier,
            relation: RelationType::all()[0].clone(),
            object: own.get(2).cloned().unwrap_or_else(|| wd(3000 + i)),
        }
    };

    let mut heads = Vec::new();
    for i in 0..n {
        let sp = pattern(i, Qualifier::plain(QualifierBase::Generally));
        let np = finalize(authoring::formalization(&sp, None, None, &clock.tick()).unwrap());
        heads.push(np.clone());
        out.push(np);
    }
    let roots: Vec<Iri> = heads.iter().map(|h| h.iri().clone()).collect();
    for root in &roots {
        let s = Submission { formalization: root.clone(), venue: venue.clone() };
        out.push(finalize(authoring::submission(&s, &clock.tick()).unwrap()));
    }

    let review = |target: &Iri, k: usize, clock: &mut Clock| {
        let r = ReviewComment {
            target: target.clone(),
            aspect: Aspect::ALL[k % Aspect::ALL.len()],
            disposition: Disposition::ALL[k % Disposition::ALL.len()],
            action: Action::ALL[k % Action::ALL.len()],
            impact: (k % 5 + 1) as u8,
            text: format!("review comment {k}"),
            refers_to_mentioning_of: None,
        };
        finalize(authoring::review(&r, &clock.tick()).unwrap())
    };
    let mut sp_reviews = Vec::new();
    for k in 0..t.sp_reviews {
        let np = review(&roots[k % n], k, &mut clock);
        sp_reviews.push(np.iri().clone());
        out.push(np);
    }
    let mut cd_reviews = Vec::new();
    for k in 0..t.cd_reviews {
        let np = review(&class_nps[k % class_nps.len()], k, &mut clock);
        cd_reviews.push(np.iri().clone());
        out.push(np);
    }
    let respond = |review: &Iri, k: usize, clock: &mut Clock| {
        let r = ResponseComment {
            in_response_to: review.clone(),
            agreement: Agreement::ALL[k % Agreement::ALL.len()],
            addressed: Addressed::ALL[k % Addressed::ALL.len()],
            text: format!("response {k}"),
            refers_to: None,
        };
        finalize(authoring::response(&r, &clock.tick()).unwrap())
    };
    for k in 0..t.sp_responses {
        out.push(respond(&sp_reviews[k % sp_reviews.len()], k, &mut clock));
    }
    for k in 0..t.cd_responses {
        out.push(respond(&cd_reviews[k % cd_reviews.len()], k, &mut clock));
    }

    let qualifiers = Qualifier::all();
    for k in 0..t.updates {
        let i = k % n;
        let sp = pattern(i, qualifiers[(k / n + 1) % qualifiers.len()]);
        let np = finalize(authoring::update(&heads[i], &sp, None, None, &clock.tick()).unwrap());
        heads[i] = np.clone();
        out.push(np);
    }
    for head in &heads {
        let d = Decision {
            target: head.iri().clone(),
            status: DecisionStatus::AcceptedForPublication,
            description: "accepted".into(),
            venue: venue.clone(),
        };
        out.push(finalize(authoring::decision(&d, &clock.tick()).unwrap()));
    }
    out
}

/// The venue statistics of the special issue.
pub const STUDY_TOTALS: Totals = Totals {
    submissions: 15,
    class_definitions: 34,
    sp_reviews: 119,
    cd_reviews: 46,
    sp_responses: 100,
    cd_responses: 34,
    updates: 25,
};

// ---------------------------------------------------------------------------
// CLI runner

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn fp(store: &Path, env: &[(&str, &str)], args: &[&str]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fp"));
    cmd.args(args)
        .env_remove("FP_SERVICE")
        .env_remove("FP_CLOCK")
        .env_remove("FP_VENUE")
        .env("FP_STORE", store)
        .env("FP_ACTOR", ACTOR);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let o = cmd.output().expect("fp runs");
    Run {
        code: o.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&o.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&o.stderr).into_owned(),
    }
}

/// Parses TriG or panics with the text.
pub fn trig(text: &str) -> Dataset {
    parse_trig(text).unwrap_or_else(|e| panic!("{e}\n{text}"))
}
