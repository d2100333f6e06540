//! Append-only store of verified nanopublications.
//!
//! Layout under the root directory:
//!
//! ```text
//! store/{code}.trig   exact bytes as published
//! log                 one artifact code per line, in publication order
//! ```
//!
//! A publish writes the TriG file (temp file + rename), then appends the
//! code to the log and syncs it, and only then swaps in a new in-memory
//! index. Indexes are rebuilt from the log at startup; a torn last log line
//! or a file without a log line is ignored, so any crash leaves a
//! consistent prefix.

mod graph;
mod query;
mod stats;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use thiserror::Error;

pub use graph::{GraphEdge, GraphExport, GraphFormat, GraphNode};
pub use query::{QueryParam, QueryResult, QueryTemplate, Row, QUERIES};
pub use stats::{round_half_up, StatRow, StatsReport};

use crate::nanopub::{validate, Finding, NanopubError, Nanopublication};
use crate::rdf::{Iri, RdfError};
use crate::trusty::{ArtifactCode, TrustyError};
use crate::vocab::vocab;
use crate::workflow::{self, Act, Corpus, Entry, Kind, SubmissionThread, ThreadStatus, WorkflowError};

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("syntax error: {0}")]
    Syntax(#[from] RdfError),
    #[error("validation failed")]
    ValidationFailed(Vec<Finding>),
    #[error("artifact code does not match the content")]
    VerifyFailed,
    #[error("not found: {0}")]
    NotFound(String),
    #[error("unknown query {0:?}")]
    UnknownQuery(String),
    #[error("unbound parameter {0:?}")]
    UnboundParameter(String),
    #[error("invalid parameter {0:?}: {1}")]
    InvalidParameter(String, String),
    #[error(transparent)]
    Workflow(#[from] WorkflowError),
    #[error(transparent)]
    Nanopub(NanopubError),
}

impl From<NanopubError> for RegistryError {
    fn from(e: NanopubError) -> Self {
        match e {
            NanopubError::Rdf(r) => RegistryError::Syntax(r),
            NanopubError::Malformed(f) => RegistryError::ValidationFailed(f),
            NanopubError::Trusty(_) | NanopubError::NotFinalized(_) => RegistryError::VerifyFailed,
            NanopubError::Missing(i) => RegistryError::NotFound(i.to_string()),
            other => RegistryError::Nanopub(other),
        }
    }
}

pub type Result<T, E = RegistryError> = std::result::Result<T, E>;

/// In-memory indexes, derivable from the log.
#[derive(Debug, Clone, Default)]
pub struct Index {
    codes: Vec<ArtifactCode>,
    corpus: Corpus,
    /// referenced nanopublication IRI → referring nanopublications
    referrers: HashMap<Iri, Vec<Iri>>,
    /// rdf:type of assertion subjects → nanopublications
    by_type: HashMap<Iri, Vec<Iri>>,
    /// venue → submission nanopublications
    by_venue: HashMap<Iri, Vec<Iri>>,
}

impl Index {
    fn add(&mut self, code: ArtifactCode, np: Nanopublication) {
        let iri = np.iri().clone();
        let rdf_type = &vocab().nanopub.rdf_type;
        let a = np.assertion_graph().clone();
        let mut types: Vec<Iri> = np
            .dataset()
            .quads_in(&a)
            .filter(|q| &q.predicate == rdf_type)
            .filter_map(|q| q.object.as_iri().cloned())
            .collect();
        types.sort();
        types.dedup();
        for t in types {
            self.by_type.entry(t).or_default().push(iri.clone());
        }
        self.corpus.insert(np);
        let entry = self.corpus.get(&iri).expect("just inserted");
        let mut refs = entry.references();
        refs.extend(entry.np.supersedes());
        refs.sort();
        refs.dedup();
        for r in refs {
            self.referrers.entry(r).or_default().push(iri.clone());
        }
        if let Act::Submission(s) = &entry.act {
            self.by_venue.entry(s.venue.clone()).or_default().push(iri.clone());
        }
        self.codes.push(code);
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    /// Codes in publication order.
    pub fn codes(&self) -> &[ArtifactCode] {
        &self.codes
    }

    pub fn get(&self, iri: &Iri) -> Option<&Entry> {
        self.corpus.get(iri)
    }

    pub fn referrers(&self, iri: &Iri) -> &[Iri] {
        self.referrers.get(iri).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn with_type(&self, class: &Iri) -> &[Iri] {
        self.by_type.get(class).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn submissions_in(&self, venue: &Iri) -> &[Iri] {
        self.by_venue.get(venue).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Threads of every submission to `venue`, in submission order.
    pub fn threads(&self, venue: &Iri) -> Vec<(Iri, Result<SubmissionThread, WorkflowError>)> {
        workflow::threads(&self.corpus, Some(venue))
    }
}

pub struct Registry {
    root: PathBuf,
    writer: Mutex<()>,
    index: RwLock<Arc<Index>>,
}

impl std::fmt::Debug for Registry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Registry").field("root", &self.root).finish_non_exhaustive()
    }
}

fn store_dir(root: &Path) -> PathBuf {
    root.join("store")
}

fn log_path(root: &Path) -> PathBuf {
    root.join("log")
}

impl Registry {
    /// Opens (creating if needed) the store at `root` and rebuilds the
    /// indexes from its log.
    pub fn open(root: impl Into<PathBuf>) -> Result<Registry> {
        let root = root.into();
        fs::create_dir_all(store_dir(&root))?;
        let index = rebuild(&root)?;
        Ok(Registry { root, writer: Mutex::new(()), index: RwLock::new(Arc::new(index)) })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// A consistent view; later publishes do not affect it.
    pub fn snapshot(&self) -> Arc<Index> {
        self.index.read().expect("index lock poisoned").clone()
    }

    pub fn len(&self) -> usize {
        self.snapshot().codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, code: &ArtifactCode) -> bool {
        self.snapshot().corpus.get(&code.iri()).is_some()
    }

    /// Publishes an already finalized nanopublication.
    pub fn publish(&self, np: &Nanopublication) -> Result<ArtifactCode> {
        self.publish_trig(&np.to_trig())
    }

    /// Publishes TriG text; the bytes are stored as given.
    pub fn publish_trig(&self, text: &str) -> Result<ArtifactCode> {
        Ok(self.publish_batch([text.to_string()])?.remove(0))
    }

    /// Publishes several nanopublications with a single index swap. All are
    /// checked before anything is written.
    pub fn publish_batch(&self, texts: impl IntoIterator<Item = String>) -> Result<Vec<ArtifactCode>> {
        let checked: Vec<(ArtifactCode, Nanopublication, String)> =
            texts.into_iter().map(|t| check(&t).map(|(c, np)| (c, np, t))).collect::<Result<_>>()?;

        let _guard = self.writer.lock().expect("writer lock poisoned");
        let current = self.snapshot();
        let mut next: Option<Index> = None;
        let mut seen = HashSet::new();
        let mut codes = Vec::new();
        let mut log = OpenOptions::new().create(true).append(true).open(log_path(&self.root))?;
        let mut outcome = Ok(());
        for (code, np, text) in checked {
            codes.push(code.clone());
            if current.corpus.get(np.iri()).is_some() || !seen.insert(code.clone()) {
                continue;
            }
            let path = store_dir(&self.root).join(format!("{code}.trig"));
            outcome =
                write_atomically(&path, text.as_bytes()).and_then(|()| log.write_all(format!("{code}\n").as_bytes()));
            if outcome.is_err() {
                break;
            }
            next.get_or_insert_with(|| (*current).clone()).add(code, np);
        }
        let synced = log.sync_all();
        // whatever reached the log is visible, even if a later item failed
        if let Some(idx) = next {
            *self.index.write().expect("index lock poisoned") = Arc::new(idx);
        }
        outcome?;
        synced?;
        Ok(codes)
    }

    /// The exact TriG bytes that were published.
    pub fn fetch_trig(&self, code: &ArtifactCode) -> Result<String> {
        if !self.contains(code) {
            return Err(RegistryError::NotFound(code.to_string()));
        }
        Ok(fs::read_to_string(store_dir(&self.root).join(format!("{code}.trig")))?)
    }

    pub fn fetch(&self, code: &ArtifactCode) -> Result<Nanopublication> {
        self.snapshot()
            .corpus
            .get(&code.iri())
            .map(|e| e.np.clone())
            .ok_or_else(|| RegistryError::NotFound(code.to_string()))
    }

    /// Accepts an artifact code, a CURIE with a known prefix, or a full IRI.
    /// The result need not be stored.
    pub fn resolve(s: &str) -> Result<Iri> {
        let s = s.trim().trim_start_matches('<').trim_end_matches('>');
        if let Ok(code) = s.parse::<ArtifactCode>() {
            return Ok(code.iri());
        }
        if let Some((p, local)) = s.split_once(':') {
            if let Some(ns) = crate::vocab::vocab().prefixes.get(p).filter(|_| !local.starts_with("//")) {
                return Iri::new(format!("{ns}{local}"))
                    .map_err(|e| RegistryError::InvalidParameter(s.to_string(), e.to_string()));
            }
        }
        Iri::new(s).map_err(|e| RegistryError::InvalidParameter(s.to_string(), e.to_string()))
    }

    pub fn thread(&self, submission: &Iri) -> Result<SubmissionThread> {
        Ok(workflow::build_thread(&self.snapshot().corpus, submission)?)
    }

    /// Status of the thread around a submission or any of its versions.
    pub fn status(&self, iri: &Iri) -> Result<(SubmissionThread, ThreadStatus)> {
        let idx = self.snapshot();
        let entry = idx.corpus.get(iri).ok_or_else(|| RegistryError::NotFound(iri.to_string()))?;
        let thread = match entry.kind {
            Some(Kind::Submission) => workflow::build_thread(&idx.corpus, iri)?,
            Some(Kind::Formalization | Kind::Update) => {
                let root = idx.corpus.chain_root(iri)?;
                let sub = idx
                    .referrers(&root)
                    .iter()
                    .filter(|r| idx.get(r).is_some_and(|e| e.kind == Some(Kind::Submission)))
                    .min_by_key(|r| idx.get(r).map(|e| e.order_key()));
                match sub {
                    Some(s) => workflow::build_thread(&idx.corpus, s)?,
                    None => workflow::thread_of_formalization(&idx.corpus, iri)?,
                }
            }
            _ => {
                return Err(RegistryError::InvalidParameter(
                    iri.to_string(),
                    "not a submission or formalization".into(),
                ))
            }
        };
        let status = workflow::thread_status(&thread);
        Ok((thread, status))
    }

    pub fn integrity(&self) -> Vec<workflow::IntegrityFinding> {
        workflow::check_integrity(&self.snapshot().corpus)
    }

    pub fn run_query(&self, name: &str, params: &BTreeMap<String, String>) -> Result<QueryResult> {
        query::run(&self.snapshot(), name, params)
    }

    pub fn stats(&self, venue: &Iri) -> StatsReport {
        stats::stats(&self.snapshot(), venue)
    }

    pub fn export_graph(&self, venue: &Iri) -> GraphExport {
        graph::export(&self.snapshot(), venue)
    }
}

/// Parses, validates and verifies a finalized nanopublication.
pub fn check(text: &str) -> Result<(ArtifactCode, Nanopublication)> {
    let np = Nanopublication::parse_trig(text)?;
    let findings = validate(&np);
    if !findings.is_empty() {
        return Err(RegistryError::ValidationFailed(findings));
    }
    let code = np.code().ok_or(RegistryError::VerifyFailed)?;
    match np.verify() {
        Ok(true) => Ok((code, np)),
        Ok(false) | Err(TrustyError::NoTrustyIri | TrustyError::MalformedCode(_) | TrustyError::SelfIriNotFound(_)) => {
            Err(RegistryError::VerifyFailed)
        }
    }
}

fn write_atomically(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("trig.tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

fn rebuild(root: &Path) -> Result<Index> {
    let mut index = Index::default();
    let log = match fs::read_to_string(log_path(root)) {
        Ok(s) => s,
        Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
        Err(e) => return Err(e.into()),
    };
    // only newline-terminated lines were committed
    let complete = match log.rfind('\n') {
        Some(i) => &log[..=i],
        None => "",
    };
    let mut seen = HashSet::new();
    for line in complete.lines() {
        let Ok(code) = line.trim().parse::<ArtifactCode>() else {
            continue;
        };
        if !seen.insert(code.clone()) {
            continue;
        }
        let path = store_dir(root).join(format!("{code}.trig"));
        let Ok(text) = fs::read_to_string(&path) else {
            continue;
        };
        match check(&text) {
            Ok((c, np)) if c == code => index.add(code, np),
            _ => continue,
        }
    }
    Ok(index)
}

/// Label of a nanopublication for listings: explicit title, class label,
/// claim sentence or the kind.
pub fn display_label(e: &Entry) -> String {
    if let Some(t) = e.np.title() {
        return t;
    }
    match &e.act {
        Act::ClassDefinition(cd) => cd.label.clone(),
        Act::Formalization(sp) => sp.render_sentence(),
        Act::Review(r) => r.text.clone(),
        Act::Response(r) => r.text.clone(),
        Act::Decision(d) => format!("{}: {}", d.status, d.description),
        Act::Submission(s) => format!("submission of {}", s.formalization),
        Act::Other => e.np.iri().to_string(),
    }
}
