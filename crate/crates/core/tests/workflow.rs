//! Submission threads, version chains and link integrity over an in-memory
//! corpus built with the authoring helpers.

mod common;

use common::*;
use fpub::authoring;
use fpub::nanopub::{extract_chain, NanopubError, Nanopublication};
use fpub::rdf::Iri;
use fpub::superpattern::{ClassRef, Context, Qualifier, QualifierBase, RelationType, SuperPattern};
use fpub::workflow::*;

fn claim(q: QualifierBase) -> SuperPattern {
    SuperPattern {
        context: Context::Class(ClassRef::new(iri("http://www.wikidata.org/entity/Q5"), "human")),
        subject: ClassRef::new(iri("http://www.wikidata.org/entity/Q18048867"), "STX1B"),
        qualifier: Qualifier::plain(q),
        relation: RelationType::from_name("contributes to").unwrap(),
        object: ClassRef::new(iri("http://www.wikidata.org/entity/Q41571"), "epilepsy"),
    }
}

fn fin(np: Nanopublication) -> Nanopublication {
    np.finalize().unwrap().0
}

fn review_of(target: &Iri) -> ReviewComment {
    ReviewComment {
        target: target.clone(),
        aspect: Aspect::Content,
        disposition: Disposition::Neutral,
        action: Action::Suggestion,
        impact: 2,
        text: "Consider a weaker qualifier.".into(),
        refers_to_mentioning_of: None,
    }
}

struct Thread {
    corpus: Corpus,
    f: Iri,
    u1: Iri,
    u2: Iri,
    s: Iri,
    r: Iri,
}

/// F, S, R(F), A(R), U1, U2, with one tick between acts.
fn thread() -> Thread {
    let mut clock = Clock::new();
    let mut corpus = Corpus::new();
    let f = fin(authoring::formalization(&claim(QualifierBase::Always), None, None, &clock.tick()).unwrap());
    let s =
        fin(authoring::submission(&Submission { formalization: f.iri().clone(), venue: iri(VENUE) }, &clock.tick())
            .unwrap());
    let r = fin(authoring::review(&review_of(f.iri()), &clock.tick()).unwrap());
    let a = fin(authoring::response(
        &ResponseComment {
            in_response_to: r.iri().clone(),
            agreement: Agreement::Agree,
            addressed: Addressed::Addressed,
            text: "Weakened.".into(),
            refers_to: None,
        },
        &clock.tick(),
    )
    .unwrap());
    let u1 = fin(authoring::update(&f, &claim(QualifierBase::Generally), None, None, &clock.tick()).unwrap());
    let u2 = fin(authoring::update(&u1, &claim(QualifierBase::Mostly), None, None, &clock.tick()).unwrap());
    let (f_iri, u1_iri, u2_iri, s_iri, r_iri) =
        (f.iri().clone(), u1.iri().clone(), u2.iri().clone(), s.iri().clone(), r.iri().clone());
    for np in [f, s, r, a, u1, u2] {
        corpus.insert(np);
    }
    Thread { corpus, f: f_iri, u1: u1_iri, u2: u2_iri, s: s_iri, r: r_iri }
}

#[test]
fn version_chain_is_oldest_first() {
    let t = thread();
    let lookup = |i: &Iri| t.corpus.get(i).map(|e| &e.np);
    assert_eq!(extract_chain(lookup, &t.u2).unwrap(), vec![t.f.clone(), t.u1.clone(), t.u2.clone()]);
    assert_eq!(t.corpus.chain_root(&t.u2).unwrap(), t.f);
    assert_eq!(t.corpus.versions_from(&t.f).unwrap(), vec![t.f.clone(), t.u1.clone(), t.u2.clone()]);
}

#[test]
fn chain_with_missing_link_is_an_error() {
    let mut t = thread();
    t.corpus.remove(&t.u1);
    let lookup = |i: &Iri| t.corpus.get(i).map(|e| &e.np);
    assert!(matches!(extract_chain(lookup, &t.u2), Err(NanopubError::Missing(i)) if i == t.u1));
}

#[test]
fn superseding_a_draft_is_refused() {
    let stamp = Clock::new().tick();
    let draft = authoring::formalization(&claim(QualifierBase::Always), None, None, &stamp).unwrap();
    let err = authoring::update(&draft, &claim(QualifierBase::Mostly), None, None, &stamp).unwrap_err();
    assert!(matches!(err, authoring::AuthoringError::Nanopub(NanopubError::NotFinalized(_))), "{err}");
}

#[test]
fn thread_collects_every_member() {
    let t = thread();
    let th = build_thread(&t.corpus, &t.s).unwrap();
    assert_eq!(th.venue, Some(iri(VENUE)));
    assert_eq!(th.head().unwrap().iri, t.u2);
    assert_eq!(th.versions.len(), 3);
    assert_eq!(th.reviews.len(), 1);
    assert_eq!(th.responses.len(), 1);
    // S, three versions, R, A
    assert_eq!(th.members().len(), 6);
    // the thread is the same from any version
    let via_head = thread_of_formalization(&t.corpus, &t.u2).unwrap();
    assert_eq!(via_head.versions, th.versions);
    assert!(matches!(build_thread(&t.corpus, &t.f), Err(WorkflowError::NotASubmission(_))));
}

#[test]
fn status_follows_precedence() {
    let mut clock = Clock::new();
    let mut corpus = Corpus::new();
    let f = fin(authoring::formalization(&claim(QualifierBase::Always), None, None, &clock.tick()).unwrap());
    let f_iri = f.iri().clone();
    corpus.insert(f.clone());
    assert_eq!(thread_status(&thread_of_formalization(&corpus, &f_iri).unwrap()), ThreadStatus::Draft);

    let s =
        fin(authoring::submission(&Submission { formalization: f_iri.clone(), venue: iri(VENUE) }, &clock.tick())
            .unwrap());
    let s_iri = s.iri().clone();
    corpus.insert(s);
    let status = |c: &Corpus| thread_status(&build_thread(c, &s_iri).unwrap());
    assert_eq!(status(&corpus), ThreadStatus::Submitted);

    corpus.insert(fin(authoring::review(&review_of(&f_iri), &clock.tick()).unwrap()));
    assert_eq!(status(&corpus), ThreadStatus::UnderReview);

    let u = fin(authoring::update(&f, &claim(QualifierBase::Mostly), None, None, &clock.tick()).unwrap());
    let u_iri = u.iri().clone();
    corpus.insert(u);
    assert_eq!(status(&corpus), ThreadStatus::Revised);

    // a review after the update puts the thread back under review
    corpus.insert(fin(authoring::review(&review_of(&u_iri), &clock.tick()).unwrap()));
    assert_eq!(status(&corpus), ThreadStatus::UnderReview);

    let d = Decision {
        target: u_iri,
        status: DecisionStatus::AcceptedForPublication,
        description: "Accepted.".into(),
        venue: iri(VENUE),
    };
    corpus.insert(fin(authoring::decision(&d, &clock.tick()).unwrap()));
    assert_eq!(status(&corpus), ThreadStatus::Decided);
}

#[test]
fn clean_thread_has_no_findings() {
    assert_eq!(check_integrity(&thread().corpus), vec![]);
}

#[test]
fn dangling_reference_is_reported() {
    let mut t = thread();
    t.corpus.remove(&t.f);
    let findings = check_integrity(&t.corpus);
    let dangling: Vec<_> = findings.iter().filter(|f| f.code == IntegrityCode::DanglingReference).collect();
    // the submission, the review and the first update all point at F
    assert_eq!(dangling.len(), 3, "{findings:?}");
    assert!(dangling.iter().any(|f| f.subject == t.s));
    assert!(dangling.iter().any(|f| f.subject == t.r));
    assert!(dangling.iter().any(|f| f.subject == t.u1));
}

#[test]
fn duplicate_submission_and_stale_decision_are_reported() {
    let mut t = thread();
    let mut clock = Clock::new();
    for _ in 0..10 {
        clock.tick();
    }
    // resubmitting a later version of the same chain to the same venue
    let dup =
        fin(authoring::submission(&Submission { formalization: t.u1.clone(), venue: iri(VENUE) }, &clock.tick())
            .unwrap());
    let dup_iri = dup.iri().clone();
    t.corpus.insert(dup);
    let d = Decision {
        target: t.u1.clone(),
        status: DecisionStatus::Rejected,
        description: "Rejected.".into(),
        venue: iri(VENUE),
    };
    let stale = fin(authoring::decision(&d, &clock.tick()).unwrap());
    let stale_iri = stale.iri().clone();
    t.corpus.insert(stale);
    let codes: Vec<_> = check_integrity(&t.corpus).into_iter().map(|f| (f.code, f.subject)).collect();
    assert_eq!(
        codes,
        vec![(IntegrityCode::DuplicateSubmission, dup_iri), (IntegrityCode::DecisionNotOnHead, stale_iri)]
    );
}

#[test]
fn cross_thread_response_is_reported() {
    let mut t = thread();
    let mut clock = Clock::new();
    for _ in 0..10 {
        clock.tick();
    }
    let other = fin(authoring::formalization(&claim(QualifierBase::Never), None, None, &clock.tick()).unwrap());
    let other_iri = other.iri().clone();
    t.corpus.insert(other);
    let a = fin(authoring::response(
        &ResponseComment {
            in_response_to: t.r.clone(),
            agreement: Agreement::Disagree,
            addressed: Addressed::NotAddressed,
            text: "See the other claim.".into(),
            refers_to: Some(other_iri),
        },
        &clock.tick(),
    )
    .unwrap());
    let a_iri = a.iri().clone();
    t.corpus.insert(a);
    let findings = check_integrity(&t.corpus);
    assert_eq!(findings.len(), 1, "{findings:?}");
    assert_eq!((findings[0].code, &findings[0].subject), (IntegrityCode::CrossThreadResponse, &a_iri));
}

#[test]
fn review_dimensions_reject_unknown_values() {
    let err = "lukewarm".parse::<Disposition>().unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("positive") && msg.contains("negative") && msg.contains("neutral"), "{msg}");
    assert_eq!("No Action".parse::<Action>().unwrap(), Action::NoAction);
    let mut r = review_of(&iri("http://purl.org/np/RAxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx"));
    r.impact = 6;
    assert!(matches!(r.check(), Err(WorkflowError::ImpactOutOfRange(6))));
    r.impact = 0;
    assert!(r.check().is_err());
}

#[test]
fn acts_round_trip_through_their_graphs() {
    let g = iri("http://purl.org/nanopub/temp/np#assertion");
    let r = review_of(&iri(VENUE));
    assert_eq!(ReviewComment::parse(&r.emit(&g).unwrap()).unwrap(), r);
    let s = Submission { formalization: iri(VENUE), venue: iri(VENUE) };
    assert_eq!(Submission::parse(&s.emit(&g)).unwrap(), s);
    let d = Decision {
        target: iri(VENUE),
        status: DecisionStatus::RevisionRequested,
        description: "Please revise.".into(),
        venue: iri(VENUE),
    };
    assert_eq!(Decision::parse(&d.emit(&g).unwrap()).unwrap(), d);
}

#[test]
fn hand_written_response_with_stray_comma() {
    let text = r#"
@prefix lfr: <https://w3id.org/linkflows/review/terms/> .
@prefix sub: <http://purl.org/nanopub/temp/np#> .
sub:assertion {
  sub:comment a , lfr:ResponseComment lfr:DisagreementComment ,
      lfr:PointNotAddressedComment ;
    lfr:hasCommentText "I don't think the original publication shows a causal relationship. It seems to me only a correlation is proven." ;
    lfr:isResponseTo
      <http://purl.org/np/RAio--7IbPa3_ZSG3GspUsXeWP2ZwMIzy4Kzos0yZ7NIw> ;
    lfr:refersTo <http://purl.org/np/RAeRSya2qIYymsBxiqOZP_oaQpHXUVXiydKvPCFM-7DDQ> .
}
"#;
    assert!(fpub::rdf::parse_trig(text).is_err());
    let d = fpub::rdf::parse_trig_lenient(text).unwrap();
    let r = ResponseComment::parse(&d).unwrap();
    assert_eq!(r.agreement, Agreement::Disagree);
    assert_eq!(r.addressed, Addressed::NotAddressed);
    assert_eq!(r.in_response_to, iri("http://purl.org/np/RAio--7IbPa3_ZSG3GspUsXeWP2ZwMIzy4Kzos0yZ7NIw"));
    assert_eq!(r.refers_to, Some(iri("http://purl.org/np/RAeRSya2qIYymsBxiqOZP_oaQpHXUVXiydKvPCFM-7DDQ")));
    assert!(r.text.starts_with("I don't think"));
}
