//! The `fp` command-line workflow driver.
//!
//! Every mutating command builds exactly one draft nanopublication,
//! finalizes it locally and publishes it either into a local store or to a
//! remote service. Exit codes: 0 success, 1 usage, 2 validation,
//! 3 verification, 4 not found, 5 I/O or transport failure.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::PathBuf;

use chrono::{DateTime, SubsecRound, Utc};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::authoring::{self, AuthoringError, Stamp};
use crate::nanopub::{format_timestamp, Nanopublication};
use crate::rdf::Iri;
use crate::registry::{self, GraphExport, GraphFormat, Registry, RegistryError, StatsReport};
use crate::service::{self, ApiConfig};
use crate::superpattern::{
    read_formalization_provenance, ClassDefinition, ClassRef, Context, Qualifier, RelationType, Slot, SuperPattern,
};
use crate::trusty::ArtifactCode;
use crate::vocab::vocab;
use crate::workflow::{
    Action, Addressed, Agreement, Aspect, Decision, DecisionStatus, Disposition, ResponseComment, ReviewComment,
    Submission,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;
pub const EXIT_NOT_FOUND: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::NotFound(_) => EXIT_NOT_FOUND,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<RegistryError> for CliError {
    fn from(e: RegistryError) -> Self {
        let msg = e.to_string();
        match e {
            RegistryError::ValidationFailed(f) => CliError::Validation(format!(
                "{msg}: {}",
                f.iter().map(|f| f.message.as_str()).collect::<Vec<_>>().join("; ")
            )),
            RegistryError::Syntax(_) | RegistryError::Workflow(_) | RegistryError::Nanopub(_) => {
                CliError::Validation(msg)
            }
            RegistryError::VerifyFailed => CliError::Verification(msg),
            RegistryError::NotFound(_) | RegistryError::UnknownQuery(_) => CliError::NotFound(msg),
            RegistryError::UnboundParameter(_) | RegistryError::InvalidParameter(..) => CliError::Usage(msg),
            RegistryError::Io(_) => CliError::Io(msg),
        }
    }
}

impl From<AuthoringError> for CliError {
    fn from(e: AuthoringError) -> Self {
        CliError::Validation(e.to_string())
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Parser)]
#[command(name = "fp", version, about = "Publish, review and inspect formalization nanopublications")]
pub struct Cli {
    /// Local store directory.
    #[arg(long, env = "FP_STORE", global = true, default_value = "fp-store")]
    pub store: PathBuf,
    /// Base URL of a remote service; takes the place of the local store.
    #[arg(long, env = "FP_SERVICE", global = true)]
    pub service: Option<String>,
    /// IRI of the person publishing.
    #[arg(long, env = "FP_ACTOR", global = true)]
    pub actor: Option<String>,
    /// Fixed creation time (RFC 3339) instead of the system clock.
    #[arg(long, env = "FP_CLOCK", global = true)]
    pub clock: Option<String>,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Class definitions.
    #[command(subcommand)]
    Class(ClassCommand),
    /// Formalizations of claims.
    #[command(subcommand)]
    Claim(ClaimCommand),
    /// Submit a formalization to a venue.
    Submit {
        /// The formalization to submit (code or IRI).
        #[arg(long)]
        formalization: String,
        /// Venue IRI or CURIE.
        #[arg(long, env = "FP_VENUE")]
        venue: Option<String>,
    },
    /// Review comments.
    #[command(subcommand)]
    Review(ReviewCommand),
    /// Respond to a review comment.
    Respond {
        /// The review comment being answered.
        #[arg(long)]
        review: String,
        /// agree, partial or disagree.
        #[arg(long)]
        agreement: Agreement,
        /// addressed, partially-addressed or not-addressed.
        #[arg(long)]
        addressed: Addressed,
        /// Response text.
        #[arg(long)]
        text: String,
        /// The updated formalization, if any.
        #[arg(long)]
        updated: Option<String>,
    },
    /// Publish a new version that supersedes a formalization.
    Update {
        /// The version being superseded.
        #[arg(long)]
        old: String,
        #[command(flatten)]
        slots: SlotArgs,
        /// Source publication; defaults to the old version's.
        #[arg(long)]
        source: Option<String>,
        /// Quoted phrase from the source; defaults to the old version's.
        #[arg(long)]
        quote: Option<String>,
    },
    /// Editorial decision on a formalization.
    Decide {
        /// The head version being decided on.
        #[arg(long)]
        target: String,
        /// accepted-for-publication, rejected or revision-requested.
        #[arg(long)]
        status: DecisionStatus,
        /// Editorial explanation.
        #[arg(long)]
        text: String,
        /// Venue IRI or CURIE.
        #[arg(long, env = "FP_VENUE")]
        venue: Option<String>,
    },
    /// Per-venue totals and per-submission averages.
    Stats {
        /// Venue IRI or CURIE.
        #[arg(long, env = "FP_VENUE")]
        venue: Option<String>,
    },
    /// Nanopublication network of a venue.
    Graph {
        /// Venue IRI or CURIE.
        #[arg(long, env = "FP_VENUE")]
        venue: Option<String>,
        /// dot or json.
        #[arg(long, default_value = "dot")]
        format: GraphFormat,
    },
    /// Check the artifact code of a file or a stored nanopublication.
    Verify { target: String },
    /// Print a stored nanopublication.
    Show {
        target: String,
        /// trig, html or text.
        #[arg(long, default_value = "trig")]
        format: ShowFormat,
    },
    /// Status of the thread around a submission or formalization.
    Status { target: String },
    /// Cross-reference integrity of the whole store.
    Check,
    /// Run a named query.
    Query {
        name: String,
        /// `key=value`, repeatable.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, String)>,
    },
    /// Run the HTTP service on the local store.
    Serve {
        /// Address to listen on.
        #[arg(long, env = "FP_BIND", default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Default venue for stats and graph.
        #[arg(long, env = "FP_VENUE")]
        venue: Option<String>,
        /// Directory with static UI assets.
        #[arg(long, env = "FP_ASSETS")]
        assets: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ClassCommand {
    /// Define a new class.
    New {
        /// Class label; also names the minted class IRI.
        #[arg(long)]
        label: String,
        /// Textual definition.
        #[arg(long)]
        definition: String,
        /// Superclass IRI or CURIE.
        #[arg(long = "super")]
        super_class: String,
        /// Related external concepts (repeatable).
        #[arg(long, num_args = 1..)]
        related: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ClaimCommand {
    /// Formalize a claim as a super-pattern instantiation.
    New {
        #[command(flatten)]
        slots: SlotArgs,
        /// Publication the claim was taken from.
        #[arg(long)]
        source: Option<String>,
        /// Phrase quoted from the source.
        #[arg(long)]
        quote: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReviewCommand {
    /// Comment on a formalization or class definition.
    Add {
        /// The formalization or class definition under review.
        #[arg(long)]
        target: String,
        /// syntax, style or content.
        #[arg(long)]
        aspect: Aspect,
        /// positive, negative or neutral.
        #[arg(long)]
        disposition: Disposition,
        /// compulsory, suggestion or no-action.
        #[arg(long)]
        action: Action,
        /// Importance from 1 to 5.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
        impact: u8,
        /// Comment text.
        #[arg(long)]
        text: String,
        /// Slot name of the target (context, subject, relation, ...) or an IRI
        /// the comment is about.
        #[arg(long)]
        slot: Option<String>,
    },
}

/// Slot values. Classes are given as IRIs (or artifact codes of class
/// definitions) with optional display labels.
#[derive(Debug, Clone, Args, Default)]
pub struct SlotArgs {
    /// Context class: IRI, CURIE or class-definition code.
    #[arg(long, conflicts_with = "universal")]
    pub context: Option<String>,
    /// Display label of the context class.
    #[arg(long)]
    pub context_label: Option<String>,
    /// No context class.
    #[arg(long)]
    pub universal: bool,
    /// Subject class: IRI, CURIE or class-definition code.
    #[arg(long)]
    pub subject: Option<String>,
    /// Display label of the subject class.
    #[arg(long)]
    pub subject_label: Option<String>,
    /// Qualifier, e.g. "generally" or "can sometimes".
    #[arg(long)]
    pub qualifier: Option<Qualifier>,
    /// Relation, e.g. "contributes to".
    #[arg(long, value_parser = parse_relation)]
    pub relation: Option<RelationType>,
    /// Object class: IRI, CURIE or class-definition code.
    #[arg(long)]
    pub object: Option<String>,
    /// Display label of the object class.
    #[arg(long)]
    pub object_label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ShowFormat {
    Trig,
    Html,
    Text,
}

fn parse_param(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .ok_or_else(|| format!("expected key=value, got {s:?}"))
}

fn parse_relation(s: &str) -> Result<RelationType, String> {
    RelationType::from_name(s).map_err(|e| e.to_string())
}

/// Where nanopublications go and come from.
pub enum Backend {
    Local(Registry),
    Remote { base: String, agent: ureq::Agent },
}

fn transport(e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("service request failed: {e}"))
}

/// Maps an error body of the service to the matching exit class.
fn remote_error(status: u16, body: &str) -> CliError {
    let v: Value = serde_json::from_str(body).unwrap_or(Value::Null);
    let msg = v["error"].as_str().unwrap_or(body).to_string();
    let msg = match v.get("findings").and_then(Value::as_array) {
        Some(f) if !f.is_empty() => {
            format!("{msg}: {}", f.iter().filter_map(|f| f["message"].as_str()).collect::<Vec<_>>().join("; "))
        }
        _ => msg,
    };
    match v["code"].as_str().unwrap_or("") {
        "VerifyFailed" => CliError::Verification(msg),
        "NotFound" | "UnknownQuery" => CliError::NotFound(msg),
        "UnboundParameter" | "InvalidParameter" | "BadRequest" => CliError::Usage(msg),
        "StorageError" => CliError::Io(msg),
        _ if status == 404 => CliError::NotFound(msg),
        _ if status >= 500 => CliError::Io(msg),
        _ => CliError::Validation(msg),
    }
}

fn code_of(iri: &Iri) -> Result<ArtifactCode> {
    ArtifactCode::from_iri(iri).ok_or_else(|| CliError::NotFound(format!("not a nanopublication IRI: {iri}")))
}

impl Backend {
    pub fn open(cli: &Cli) -> Result<Backend> {
        match &cli.service {
            Some(url) => {
                let agent = ureq::Agent::config_builder().http_status_as_error(false).build().into();
                Ok(Backend::Remote { base: url.trim_end_matches('/').to_string(), agent })
            }
            None => Ok(Backend::Local(Registry::open(&cli.store)?)),
        }
    }

    fn get(&self, path: &str, query: &[(&str, &str)], accept: &str) -> Result<String> {
        let Backend::Remote { base, agent } = self else { unreachable!("remote only") };
        let mut req = agent.get(format!("{base}{path}")).header("Accept", accept);
        for (k, v) in query {
            req = req.query(*k, *v);
        }
        let mut resp = req.call().map_err(transport)?;
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_to_string().map_err(transport)?;
        if status >= 400 {
            return Err(remote_error(status, &body));
        }
        Ok(body)
    }

    fn get_json<T: serde::de::DeserializeOwned>(&self, path: &str, query: &[(&str, &str)]) -> Result<T> {
        let body = self.get(path, query, "application/json")?;
        serde_json::from_str(&body).map_err(|e| CliError::Io(format!("unexpected service reply: {e}")))
    }

    /// Finalizes `draft` and publishes it.
    pub fn publish(&self, draft: &Nanopublication) -> Result<ArtifactCode> {
        let (np, code) = draft.finalize().map_err(RegistryError::from)?;
        match self {
            Backend::Local(r) => Ok(r.publish(&np)?),
            Backend::Remote { base, agent } => {
                let mut resp = agent
                    .post(format!("{base}/np"))
                    .header("Content-Type", "application/trig")
                    .send(np.to_trig().as_bytes())
                    .map_err(transport)?;
                let status = resp.status().as_u16();
                let body = resp.body_mut().read_to_string().map_err(transport)?;
                if status >= 400 {
                    return Err(remote_error(status, &body));
                }
                Ok(code)
            }
        }
    }

    pub fn fetch_trig(&self, iri: &Iri) -> Result<String> {
        let code = code_of(iri)?;
        match self {
            Backend::Local(r) => Ok(r.fetch_trig(&code)?),
            Backend::Remote { .. } => self.get(&format!("/np/{code}"), &[], "application/trig"),
        }
    }

    pub fn fetch(&self, iri: &Iri) -> Result<Nanopublication> {
        let text = self.fetch_trig(iri)?;
        Ok(registry::check(&text)?.1)
    }

    /// Fetch that treats an absent nanopublication as "unknown" rather than
    /// an error.
    fn try_fetch(&self, iri: &Iri) -> Result<Option<Nanopublication>> {
        match self.fetch(iri) {
            Ok(np) => Ok(Some(np)),
            Err(CliError::NotFound(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn stats(&self, venue: &Iri) -> Result<StatsReport> {
        match self {
            Backend::Local(r) => Ok(r.stats(venue)),
            Backend::Remote { .. } => self.get_json("/stats", &[("venue", venue.as_str())]),
        }
    }

    pub fn graph(&self, venue: &Iri) -> Result<GraphExport> {
        match self {
            Backend::Local(r) => Ok(r.export_graph(venue)),
            Backend::Remote { .. } => self.get_json("/graph", &[("venue", venue.as_str()), ("format", "json")]),
        }
    }

    pub fn status(&self, iri: &Iri) -> Result<Value> {
        match self {
            Backend::Local(r) => {
                let (thread, status) = r.status(iri)?;
                Ok(json!({ "status": status, "thread": thread }))
            }
            Backend::Remote { .. } => self.get_json(&format!("/status/{}", code_of(iri)?), &[]),
        }
    }

    pub fn integrity(&self) -> Result<Value> {
        match self {
            Backend::Local(r) => Ok(json!({ "findings": r.integrity() })),
            Backend::Remote { .. } => self.get_json("/integrity", &[]),
        }
    }

    pub fn query(&self, name: &str, params: &BTreeMap<String, String>) -> Result<Value> {
        match self {
            Backend::Local(r) => Ok(json!(r.run_query(name, params)?)),
            Backend::Remote { .. } => {
                let q: Vec<(&str, &str)> = params.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
                self.get_json(&format!("/queries/{name}"), &q)
            }
        }
    }

    pub fn view(&self, iri: &Iri) -> Result<String> {
        match self {
            Backend::Local(r) => {
                let idx = r.snapshot();
                let e = idx.get(iri).ok_or_else(|| CliError::NotFound(format!("not found: {iri}")))?;
                Ok(crate::view::render(&idx, e))
            }
            Backend::Remote { .. } => self.get(&format!("/view/{}", code_of(iri)?), &[], "text/html"),
        }
    }
}

/// An IRI, an artifact code, or a CURIE from the constants table.
pub fn resolve(s: &str) -> Result<Iri> {
    Registry::resolve(s).map_err(|e| CliError::Usage(e.to_string()))
}

fn venue(v: &Option<String>) -> Result<Iri> {
    v.as_deref().map_or_else(|| Ok(vocab().default_venue.clone()), resolve)
}

pub fn parse_clock(s: &str) -> Result<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(s.trim())
        .map(|t| t.with_timezone(&Utc).trunc_subsecs(0))
        .map_err(|e| CliError::Usage(format!("bad clock value {s:?}: {e}")))
}

fn stamp(cli: &Cli) -> Result<Stamp> {
    let actor = cli.actor.as_deref().ok_or_else(|| CliError::Usage("no actor: pass --actor or set FP_ACTOR".into()))?;
    let time = match &cli.clock {
        Some(c) => parse_clock(c)?,
        None => Utc::now().trunc_subsecs(0),
    };
    Ok(Stamp { creator: resolve(actor)?, time })
}

/// Resolves a class slot value. Labels default to the label of a class
/// definition found in the store, then to the IRI's local name.
fn class_ref(backend: &Backend, value: &str, label: Option<&str>) -> Result<ClassRef> {
    let iri = resolve(value)?;
    if let Some(l) = label {
        return Ok(ClassRef::new(iri, l.trim()));
    }
    let stem = Iri::new(iri.stem()).map_err(|e| CliError::Usage(e.to_string()))?;
    if ArtifactCode::from_iri(&stem).is_some() {
        if let Some(np) = backend.try_fetch(&stem)? {
            if let Ok(cd) = ClassDefinition::parse(&np.assertion()) {
                if cd.iri == iri || iri == stem {
                    return Ok(ClassRef::new(cd.iri, cd.label));
                }
            }
        }
    }
    let local = iri.as_str().rsplit(['#', '/']).next().unwrap_or(iri.as_str()).to_string();
    Ok(ClassRef::new(iri, local))
}

fn build_pattern(backend: &Backend, s: &SlotArgs, base: Option<&SuperPattern>) -> Result<SuperPattern> {
    let missing = |slot: &str| CliError::Usage(format!("missing --{slot}"));
    let class = |v: &Option<String>, l: &Option<String>, old: Option<&ClassRef>, slot: &str| -> Result<ClassRef> {
        match (v, old) {
            (Some(v), _) => class_ref(backend, v, l.as_deref()),
            (None, Some(o)) => Ok(ClassRef::new(o.iri.clone(), l.clone().unwrap_or_else(|| o.label.clone()))),
            (None, None) => Err(missing(slot)),
        }
    };
    let context = if s.universal {
        Context::Universal
    } else {
        match (&s.context, base.map(|b| &b.context)) {
            (Some(c), _) => Context::Class(class_ref(backend, c, s.context_label.as_deref())?),
            (None, Some(old)) => old.clone(),
            (None, None) => return Err(CliError::Usage("missing --context (or --universal)".into())),
        }
    };
    let sp = SuperPattern {
        context,
        subject: class(&s.subject, &s.subject_label, base.map(|b| &b.subject), "subject")?,
        qualifier: s.qualifier.or(base.map(|b| b.qualifier)).ok_or_else(|| missing("qualifier"))?,
        relation: s.relation.clone().or_else(|| base.map(|b| b.relation.clone())).ok_or_else(|| missing("relation"))?,
        object: class(&s.object, &s.object_label, base.map(|b| &b.object), "object")?,
    };
    sp.check().map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(sp)
}

fn slot_target(backend: &Backend, target: &Iri, slot: &str) -> Result<Iri> {
    let Ok(which) = slot.parse::<Slot>() else {
        return resolve(slot);
    };
    let np = backend.fetch(target)?;
    let sp = SuperPattern::from_nanopub(&np)
        .map_err(|e| CliError::Validation(format!("--slot {slot}: target is not a formalization ({e})")))?;
    let i = Slot::ALL.iter().position(|s| *s == which).expect("listed");
    Ok(sp.slot_iris()[i].clone())
}

fn published(out: &mut dyn std::io::Write, json: bool, code: &ArtifactCode) -> std::io::Result<()> {
    if json {
        writeln!(out, "{}", json!({ "code": code.to_string(), "iri": code.iri() }))
    } else {
        writeln!(out, "{}", code.iri())
    }
}

fn out_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Executes a parsed command, writing results to `out`.
pub fn execute(cli: &Cli, out: &mut dyn std::io::Write) -> Result<()> {
    if let Command::Serve { bind, venue: v, assets } = &cli.command {
        if cli.service.is_some() {
            return Err(CliError::Usage("serve works on a local store; unset FP_SERVICE".into()));
        }
        let config = ApiConfig { bind: *bind, store: cli.store.clone(), venue: venue(v)?, assets: assets.clone() };
        let rt = tokio::runtime::Runtime::new().map_err(out_err)?;
        writeln!(out, "serving {} on http://{}", config.store.display(), config.bind).map_err(out_err)?;
        return rt.block_on(service::serve(config)).map_err(out_err);
    }
    if let Command::Verify { target } = &cli.command {
        let path = std::path::Path::new(target);
        if path.is_file() {
            let text = std::fs::read_to_string(path).map_err(out_err)?;
            let (code, _) = registry::check(&text)?;
            return report_verified(out, cli.json, &code);
        }
    }

    let backend = Backend::open(cli)?;
    let publish = |draft: Nanopublication, out: &mut dyn std::io::Write| -> Result<()> {
        let code = backend.publish(&draft)?;
        published(out, cli.json, &code).map_err(out_err)
    };

    match &cli.command {
        Command::Class(ClassCommand::New { label, definition, super_class, related }) => {
            let related = related.iter().map(|r| resolve(r)).collect::<Result<Vec<_>>>()?;
            let draft = authoring::class_definition(label, definition, resolve(super_class)?, related, &stamp(cli)?)?;
            publish(draft, out)
        }
        Command::Claim(ClaimCommand::New { slots, source, quote }) => {
            let sp = build_pattern(&backend, slots, None)?;
            let source = source.as_deref().map(resolve).transpose()?;
            let draft = authoring::formalization(&sp, source.as_ref(), quote.as_deref(), &stamp(cli)?)?;
            publish(draft, out)
        }
        Command::Submit { formalization, venue: v } => {
            let s = Submission { formalization: resolve(formalization)?, venue: venue(v)? };
            publish(authoring::submission(&s, &stamp(cli)?)?, out)
        }
        Command::Review(ReviewCommand::Add { target, aspect, disposition, action, impact, text, slot }) => {
            let target = resolve(target)?;
            let mention = slot.as_deref().map(|s| slot_target(&backend, &target, s)).transpose()?;
            let r = ReviewComment {
                target,
                aspect: *aspect,
                disposition: *disposition,
                action: *action,
                impact: *impact,
                text: text.clone(),
                refers_to_mentioning_of: mention,
            };
            publish(authoring::review(&r, &stamp(cli)?)?, out)
        }
        Command::Respond { review, agreement, addressed, text, updated } => {
            let r = ResponseComment {
                in_response_to: resolve(review)?,
                agreement: *agreement,
                addressed: *addressed,
                text: text.clone(),
                refers_to: updated.as_deref().map(resolve).transpose()?,
            };
            publish(authoring::response(&r, &stamp(cli)?)?, out)
        }
        Command::Update { old, slots, source, quote } => {
            let old = backend.fetch(&resolve(old)?)?;
            let base = SuperPattern::from_nanopub(&old)
                .map_err(|e| CliError::Validation(format!("--old is not a formalization: {e}")))?;
            let sp = build_pattern(&backend, slots, Some(&base))?;
            let (old_source, old_quote) = read_formalization_provenance(&old).unzip();
            let source = match source {
                Some(s) => Some(resolve(s)?),
                None => old_source,
            };
            let quote = quote.clone().or(old_quote.flatten());
            let draft = authoring::update(&old, &sp, source.as_ref(), quote.as_deref(), &stamp(cli)?)?;
            publish(draft, out)
        }
        Command::Decide { target, status, text, venue: v } => {
            let d = Decision { target: resolve(target)?, status: *status, description: text.clone(), venue: venue(v)? };
            publish(authoring::decision(&d, &stamp(cli)?)?, out)
        }
        Command::Stats { venue: v } => {
            let report = backend.stats(&venue(v)?)?;
            if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable"))
            } else {
                write!(out, "{}", report.to_table())
            }
            .map_err(out_err)
        }
        Command::Graph { venue: v, format } => {
            let g = backend.graph(&venue(v)?)?;
            let format = if cli.json { GraphFormat::Json } else { *format };
            writeln!(out, "{}", g.render(format).trim_end()).map_err(out_err)
        }
        Command::Verify { target } => {
            let iri = resolve(target)?;
            let text = backend.fetch_trig(&iri)?;
            let (code, _) = registry::check(&text)?;
            if code.iri() != iri {
                return Err(CliError::Verification(format!("stored content is {code}, not {iri}")));
            }
            report_verified(out, cli.json, &code)
        }
        Command::Show { target, format } => {
            let iri = resolve(target)?;
            if cli.json {
                let np = backend.fetch(&iri)?;
                return writeln!(out, "{}", serde_json::to_string_pretty(&summary(&np)).expect("serializable"))
                    .map_err(out_err);
            }
            match format {
                ShowFormat::Trig => write!(out, "{}", backend.fetch_trig(&iri)?),
                ShowFormat::Html => write!(out, "{}", backend.view(&iri)?),
                ShowFormat::Text => write!(out, "{}", text_summary(&backend.fetch(&iri)?)),
            }
            .map_err(out_err)
        }
        Command::Status { target } => {
            let v = backend.status(&resolve(target)?)?;
            if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable"))
            } else {
                writeln!(out, "{}", v["status"].as_str().unwrap_or("unknown"))
            }
            .map_err(out_err)
        }
        Command::Check => {
            let v = backend.integrity()?;
            let findings = v["findings"].as_array().cloned().unwrap_or_default();
            if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable")).map_err(out_err)?;
            } else if findings.is_empty() {
                writeln!(out, "ok").map_err(out_err)?;
            } else {
                for f in &findings {
                    writeln!(
                        out,
                        "{}\t{}\t{}",
                        f["code"].as_str().unwrap_or(""),
                        f["subject"].as_str().unwrap_or(""),
                        f["message"].as_str().unwrap_or("")
                    )
                    .map_err(out_err)?;
                }
            }
            if findings.is_empty() {
                Ok(())
            } else {
                Err(CliError::Validation(format!("{} integrity finding(s)", findings.len())))
            }
        }
        Command::Query { name, params } => {
            let params: BTreeMap<String, String> = params.iter().cloned().collect();
            let v = backend.query(name, &params)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable")).map_err(out_err)
        }
        Command::Serve { .. } => unreachable!("handled above"),
    }
}

fn report_verified(out: &mut dyn std::io::Write, json: bool, code: &ArtifactCode) -> Result<()> {
    if json {
        writeln!(out, "{}", json!({ "verified": true, "code": code.to_string() }))
    } else {
        writeln!(out, "verified {code}")
    }
    .map_err(out_err)
}

fn summary(np: &Nanopublication) -> Value {
    let sp = SuperPattern::from_nanopub(np).ok();
    json!({
        "iri": np.iri(),
        "code": np.code().map(|c| c.to_string()),
        "created": np.created().map(|t| format_timestamp(&t)),
        "creators": np.creators(),
        "supersedes": np.supersedes(),
        "graphs": np.graph_names(),
        "sentence": sp.as_ref().map(SuperPattern::render_sentence),
        "formula": sp.as_ref().map(SuperPattern::render_formula),
    })
}

fn text_summary(np: &Nanopublication) -> String {
    match SuperPattern::from_nanopub(np) {
        Ok(sp) => format!("{}\n{}\n", sp.render_sentence(), sp.render_formula()),
        Err(_) => format!("{}\n", np.title().unwrap_or_else(|| np.iri().to_string())),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{rendered}") } else { write!(out, "{rendered}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "fp: {e}");
            e.exit_code()
        }
    }
}
