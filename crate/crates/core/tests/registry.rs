//! The file-backed store: exact bytes, reopening, crash recovery and the
//! named queries.

mod common;

use std::collections::BTreeMap;
use std::fs;

use common::*;
use fpub::authoring;
use fpub::registry::{Registry, RegistryError};
use fpub::superpattern::{ClassRef, Context, Qualifier, QualifierBase, RelationType, SuperPattern};
use fpub::trusty::ArtifactCode;
use fpub::workflow::{Action, Aspect, Disposition, ReviewComment, Submission, ThreadStatus};

fn params(kv: &[(&str, &str)]) -> BTreeMap<String, String> {
    kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn corpus_store() -> (tempfile::TempDir, Registry, Vec<ArtifactCode>) {
    let dir = tempfile::tempdir().unwrap();
    let reg = Registry::open(dir.path()).unwrap();
    let codes = corpus_manifest()
        .iter()
        .map(|row| reg.publish_trig(&read_fixture(&format!("corpus/{}", row["file"]))).unwrap())
        .collect();
    (dir, reg, codes)
}

#[test]
fn fetch_returns_the_published_bytes() {
    let (_dir, reg, codes) = corpus_store();
    assert_eq!(reg.len(), 15);
    for (row, code) in corpus_manifest().iter().zip(&codes) {
        assert_eq!(code.to_string(), row["code"]);
        assert_eq!(reg.fetch_trig(code).unwrap(), read_fixture(&format!("corpus/{}", row["file"])));
    }
}

#[test]
fn republishing_is_idempotent() {
    let (dir, reg, codes) = corpus_store();
    let again = reg.publish_trig(&read_fixture("corpus/row01.trig")).unwrap();
    assert_eq!(again, codes[0]);
    assert_eq!(reg.len(), 15);
    let log = fs::read_to_string(dir.path().join("log")).unwrap();
    assert_eq!(log.lines().count(), 15);
}

#[test]
fn reopening_restores_the_index() {
    let (dir, reg, codes) = corpus_store();
    let before = reg.stats(&iri(VENUE));
    drop(reg);
    let reg = Registry::open(dir.path()).unwrap();
    assert_eq!(reg.len(), 15);
    assert!(codes.iter().all(|c| reg.contains(c)));
    assert_eq!(reg.stats(&iri(VENUE)), before);
}

#[test]
fn torn_log_tail_is_ignored() {
    let (dir, reg, codes) = corpus_store();
    drop(reg);
    let log_path = dir.path().join("log");
    let log = fs::read(&log_path).unwrap();
    // cut the log at every byte offset: only whole lines survive
    for cut in 0..=log.len() {
        fs::write(&log_path, &log[..cut]).unwrap();
        let reg = Registry::open(dir.path()).unwrap();
        let whole_lines = log[..cut].iter().filter(|&&b| b == b'\n').count();
        assert_eq!(reg.len(), whole_lines, "cut at {cut}");
        assert!(codes[..whole_lines].iter().all(|c| reg.contains(c)));
    }
}

#[test]
fn damaged_store_files_are_skipped() {
    let (dir, reg, codes) = corpus_store();
    drop(reg);
    let victim = dir.path().join("store").join(format!("{}.trig", codes[3]));
    let text = fs::read_to_string(&victim).unwrap();
    fs::write(&victim, &text[..text.len() / 2]).unwrap();
    fs::remove_file(dir.path().join("store").join(format!("{}.trig", codes[4]))).unwrap();
    let reg = Registry::open(dir.path()).unwrap();
    assert_eq!(reg.len(), 13);
    assert!(!reg.contains(&codes[3]) && !reg.contains(&codes[4]));
    // republishing repairs the store
    reg.publish_trig(&read_fixture("corpus/row04.trig")).unwrap();
    assert!(reg.contains(&codes[3]));
}

#[test]
fn rejects_drafts_and_tampered_text() {
    let dir = tempfile::tempdir().unwrap();
    let reg = Registry::open(dir.path()).unwrap();
    let draft = read_fixture("golden/np1.draft.trig");
    assert!(matches!(reg.publish_trig(&draft), Err(RegistryError::VerifyFailed)));
    let tampered = read_fixture("golden/np1.trig").replace("mutation in STX1B", "mutation in STX1A");
    assert!(matches!(reg.publish_trig(&tampered), Err(RegistryError::VerifyFailed)));
    assert!(matches!(reg.publish_trig("not trig {"), Err(RegistryError::Syntax(_))));
    assert!(reg.is_empty());
    assert_eq!(fs::read_to_string(dir.path().join("log")).unwrap_or_default(), "");
}

#[test]
fn batch_is_checked_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let reg = Registry::open(dir.path()).unwrap();
    let batch = vec![read_fixture("corpus/row01.trig"), read_fixture("golden/np1.draft.trig")];
    assert!(reg.publish_batch(batch).is_err());
    assert!(reg.is_empty());
}

#[test]
fn unknown_code_is_not_found() {
    let (_dir, reg, _) = corpus_store();
    let code: ArtifactCode = "RAxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx".parse().unwrap();
    assert!(matches!(reg.fetch_trig(&code), Err(RegistryError::NotFound(_))));
    assert!(matches!(reg.fetch(&code), Err(RegistryError::NotFound(_))));
}

#[test]
fn resolve_accepts_codes_curies_and_iris() {
    let code = "RASwFrsZMokTacaMp2f4AkZCxlSiMBv2FsNi_shjWm9rk";
    assert_eq!(Registry::resolve(code).unwrap(), iri(&format!("http://purl.org/np/{code}")));
    assert_eq!(Registry::resolve("wd:Q5").unwrap(), iri("http://www.wikidata.org/entity/Q5"));
    assert_eq!(Registry::resolve("<https://example.org/x>").unwrap(), iri("https://example.org/x"));
    assert!(Registry::resolve("not an iri").is_err());
}

#[test]
fn queries_follow_a_thread() {
    let dir = tempfile::tempdir().unwrap();
    let reg = Registry::open(dir.path()).unwrap();
    let mut clock = Clock::new();
    let sp = SuperPattern {
        context: Context::Universal,
        subject: ClassRef::new(iri("http://www.wikidata.org/entity/Q18048867"), "STX1B"),
        qualifier: Qualifier::plain(QualifierBase::Sometimes),
        relation: RelationType::from_name("contributes to").unwrap(),
        object: ClassRef::new(iri("http://www.wikidata.org/entity/Q41571"), "epilepsy"),
    };
    let publish = |np: fpub::nanopub::Nanopublication| {
        let (np, _) = np.finalize().unwrap();
        reg.publish(&np).unwrap();
        np
    };
    let f = publish(authoring::formalization(&sp, None, None, &clock.tick()).unwrap());
    let s = publish(
        authoring::submission(&Submission { formalization: f.iri().clone(), venue: iri(VENUE) }, &clock.tick())
            .unwrap(),
    );
    let review = ReviewComment {
        target: f.iri().clone(),
        aspect: Aspect::Style,
        disposition: Disposition::Positive,
        action: Action::NoAction,
        impact: 1,
        text: "Clear.".into(),
        refers_to_mentioning_of: None,
    };
    let r = publish(authoring::review(&review, &clock.tick()).unwrap());

    let subs = reg.run_query("list-submissions", &params(&[("venue", VENUE)])).unwrap();
    assert_eq!(subs.rows.len(), 1);
    assert_eq!(subs.rows[0]["submission"], s.iri().as_str());
    assert_eq!(subs.rows[0]["status"], "under-review");
    assert_eq!(subs.rows[0]["reviews"], 1);
    assert_eq!(subs.columns.len(), subs.rows[0].len());

    let reviews = reg.run_query("reviews-for", &params(&[("target", f.iri().as_str())])).unwrap();
    assert_eq!(reviews.rows.len(), 1);
    assert_eq!(reviews.rows[0]["review"], r.iri().as_str());
    assert_eq!(reviews.rows[0]["aspect"], "style");

    let thread = reg.run_query("thread", &params(&[("submission", s.iri().as_str())])).unwrap();
    assert_eq!(thread.rows.len(), 3);

    let latest = reg.run_query("latest-version", &params(&[("formalization", f.iri().as_str())])).unwrap();
    assert_eq!(latest.rows[0]["head"], f.iri().as_str());

    let (_, status) = reg.status(f.iri()).unwrap();
    assert_eq!(status, ThreadStatus::UnderReview);
    assert!(reg.integrity().is_empty());
}

#[test]
fn query_errors() {
    let (_dir, reg, _) = corpus_store();
    assert!(matches!(reg.run_query("no-such-query", &params(&[])), Err(RegistryError::UnknownQuery(_))));
    assert!(
        matches!(reg.run_query("reviews-for", &params(&[])), Err(RegistryError::UnboundParameter(p)) if p == "target")
    );
    assert!(matches!(
        reg.run_query("reviews-for", &params(&[("target", "has spaces")])),
        Err(RegistryError::InvalidParameter(..))
    ));
}

#[test]
fn synthetic_corpus_loads_in_one_batch() {
    let dir = tempfile::tempdir().unwrap();
    let reg = Registry::open(dir.path()).unwrap();
    let nps = synthetic_corpus(STUDY_TOTALS);
    let n = nps.len();
    let codes = reg.publish_batch(nps.iter().map(|np| np.to_trig())).unwrap();
    assert_eq!((codes.len(), reg.len()), (n, n));
    assert!(reg.integrity().is_empty());
}
