//! Regenerates the fixture corpus under `fixtures/`.
//!
//! `corpus/` holds the fifteen accepted super-pattern instantiations of the
//! special issue as finalized nanopublications plus a manifest;
//! `golden/large.trig` is a larger class definition for mutation sweeps.
//! Output is deterministic: fixed creator and clock.
//!
//! Run with `cargo run -p fpub --example gen_fixtures`.

use std::fs;
use std::path::Path;

use chrono::{TimeZone, Utc};
use fpub::authoring::{self, Stamp};
use fpub::rdf::Iri;
use fpub::superpattern::{ClassRef, Context, RelationType, SuperPattern};

const CREATOR: &str = "https://orcid.org/0000-0002-1825-0097";
const SP: &str = "https://w3id.org/linkflows/superpattern/terms/";

/// (IRI, label, marker): `*` minted with a nanopublication template, `**`
/// new Wikidata class, empty otherwise.
type Class = (&'static str, &'static str, &'static str);

struct Row {
    n: u32,
    published: &'static str,
    own_claim: bool,
    context: Option<Class>,
    subject: Class,
    qualifier: &'static str,
    relation: &'static str,
    object: Class,
}

const ROWS: &[Row] = &[
    Row {
        n: 1,
        published: "http://purl.org/np/RAxBBJ2WkonyQNlXfdCAOaCi64J_xqgVGeaLjVQow9M88",
        own_claim: false,
        context: Some(("http://purl.org/np/RAtsHwzNs36rGrLnoSbGrPD351Qw033Acoe4zmdXhsYlM#early-human-adipogenesis", "early human adipogenesis", "*")),
        subject: ("http://purl.org/np/RAxLYvJ1JrRf2JAowYGbGJleQPmqtpXnXsIvse7GmLeT8#regulatory-element-within-the-first-intron-of-FTO", "regulatory element within the first intron of FTO", "*"),
        qualifier: "generallyQualifier",
        relation: "affects",
        object: ("http://purl.org/np/RAwkXiTv7qCtqOYzlR6ozZRGLRtG6mlogrYdRQ1E4dRDg#expression-of-genes-IRX3-and-IRX5", "expression of genes IRX3 and IRX5", "*"),
    },
    Row {
        n: 2,
        published: "http://purl.org/np/RAmG2bXxwkIzARk4Mda-lqZU0RVnkpX7hUHBIPcdLHQUU",
        own_claim: false,
        context: Some(("http://www.wikidata.org/entity/Q101404862", "human motor neuron", "")),
        subject: ("http://www.wikidata.org/entity/Q21133247", "TAR DNA binding protein", ""),
        qualifier: "canGenerallyQualifier",
        relation: "contributesTo",
        object: ("http://purl.org/np/RAiUYY1dbEDbcsscapEmbMMHsgJmjEJ1yUoNsxZIH1r90#transcription-of-stmn2", "transcription of stmn2", "*"),
    },
    Row {
        n: 3,
        published: "http://purl.org/np/RAXVRaFjWDlX5cZcVRXETaEIAx6QAyLK5JCrzDP-yDp9U",
        own_claim: true,
        context: Some(("https://www.wikidata.org/wiki/Q107644116", "dejellied fertilizable stage VI Xenopus laevis oocyte", "**")),
        subject: ("https://www.wikidata.org/wiki/Q107644241", "strong static magnetic field", "**"),
        qualifier: "generallyQualifier",
        relation: "affects",
        object: ("https://www.wikidata.org/wiki/Q5058180", "cell cortex", ""),
    },
    Row {
        n: 4,
        published: "http://purl.org/np/RAyg4UgIVovBGia-hk4qEuRzOq14fcOlYAclC6YGQaVYU",
        own_claim: true,
        context: None,
        subject: ("https://www.wikidata.org/wiki/Q109406970", "genes associated with CAKUT", "**"),
        qualifier: "sometimesQualifier",
        relation: "isSameAs",
        object: ("https://www.wikidata.org/wiki/Q109406949", "targets of vitamin A", "**"),
    },
    Row {
        n: 5,
        published: "http://purl.org/np/RAn15vsPJEVdJvjNKtBPo_oadtjeP9oc3Si-69FiJ4poQ",
        own_claim: true,
        context: Some(("http://purl.org/np/RA9pwySo43TIfbvPuhK4ZuisvMsDvZ6TeR5N6MNKft8Nw#patient_undergoing_PCI", "patient undergoing PCI", "*")),
        subject: ("http://purl.org/np/RAOxICL4ULhzr5mxC9cyzStCBtpoETQGin6Vr-Ns7JNtA#pharmacogenomics_guided_clopidogrel_therapy", "pharmacogenomics guided clopidogrel therapy", "*"),
        qualifier: "generallyQualifier",
        relation: "enables",
        object: ("http://purl.org/np/RAlfRfPak2jsyyVy4knjOmxQSYtociP8Cc0O7gemMtqQY#cost-effective_treatment", "cost-effective treatment", "*"),
    },
    Row {
        n: 6,
        published: "http://purl.org/np/RA1FoHM9lwJ1XAV1eB871XcMAKfod73G_i4YtgoLpJVH0",
        own_claim: false,
        context: Some(("http://www.wikidata.org/entity/Q5", "human", "")),
        subject: ("http://purl.obolibrary.org/obo/GO_0007224", "smoothened signaling pathway", ""),
        qualifier: "mostlyQualifier",
        relation: "affects",
        object: ("http://purl.obolibrary.org/obo/GO_0014002", "astrocyte development", ""),
    },
    Row {
        n: 7,
        published: "http://purl.org/np/RABzhulhaPhOzo9MxWxl230N72-azdlpMNwu_HtDqsuUc",
        own_claim: true,
        context: Some(("https://www.wikidata.org/wiki/Q28946370", "biodiversity data", "")),
        subject: ("http://purl.org/np/RA5Txa3acYP9_MUWEw7s7wenDTB1QXNMB7UehJW-2E-_8#license-with-non-commercial-clause", "license with non-commercial clause", "*"),
        qualifier: "generallyQualifier",
        relation: "inhibits",
        object: ("https://www.wikidata.org/wiki/Q58023280", "data reuse", ""),
    },
    Row {
        n: 8,
        published: "http://purl.org/np/RAMgThXW6xx8QiPmW9VhVuxWCN2ZWe-pmxDcFfdx_A7z0",
        own_claim: true,
        context: Some(("http://purl.org/np/RAlm6vh2zpFLg189qrDYPtppkL790Pqaw-q2KUhyfJtRY#release-of-openbiodiv-knowledge-graph", "release of OpenBiodiv knowledge graph", "*")),
        subject: ("http://purl.org/np/RAaEkIiJLmBJP5kK3JdYjseCRqwutYbdnI8Q3VbzrK9VA#triple-in-openbiodiv-knowledge-graph", "triple in OpenBiodiv knowledge graph", "*"),
        qualifier: "generallyQualifier",
        relation: "isSameAs",
        object: ("http://purl.org/np/RAEpHUXRKtaLE3Z24sgIUdaxwTBsK2bjshyq9yF00145Y#semantic-triples-extracted-from-biodiversity-literature", "semantic triple extracted from biodiversity literature", "*"),
    },
    Row {
        n: 9,
        published: "http://purl.org/np/RAXkuXJ4IK10Ai9F39_tOFDy6ewi7znau6OQhUEXP4nPc",
        own_claim: false,
        context: Some(("http://www.wikidata.org/entity/Q18036664", "UNC13A", "")),
        subject: ("http://www.wikidata.org/entity/Q21133247", "TAR DNA binding protein", ""),
        qualifier: "generallyQualifier",
        relation: "inhibits",
        object: ("http://purl.obolibrary.org/obo/VariO_0504", "inclusion of cryptic exon", ""),
    },
    Row {
        n: 10,
        published: "http://purl.org/np/RA22JAQihYeiJkNIjvwnxLPmjuG74yPcRXpPyVX8DV6fA",
        own_claim: true,
        context: Some(("https://www.wikidata.org/wiki/Q1172284", "data set", "")),
        subject: ("http://purl.org/np/RAodU4AmRjfzyjwtJK3luO0iyRJJPUBjkijKWdlMHvack#adherenceToTheFAIRGuidingPrinciples", "adherence to the FAIR guiding principles", "*"),
        qualifier: "canGenerallyQualifier",
        relation: "enables",
        object: ("http://purl.org/np/RAFQovt9yQD7nZ2tdZ9_Uhpb7CsfT3k64pK7dh63xd-50#automatedDiscovery", "automated discovery", "*"),
    },
    Row {
        n: 11,
        published: "http://purl.org/np/RA12lVwEtmddK9OwDkZQZlgJaOD2-0NXtAtO_jDaG-3VQ",
        own_claim: false,
        context: Some(("http://www.wikidata.org/entity/Q5", "human", "")),
        subject: ("http://purl.obolibrary.org/obo/MONDO_0014109", "NGLY1 deficiency", ""),
        qualifier: "alwaysQualifier",
        relation: "isCausedBy",
        object: ("http://purl.org/np/RAZVLqlkbwiX40n0GNxcxJany2Cw3oxMCrNuZtjBClryU#Dysfunction_of_ERAD_pathway", "dysfunction of ERAD pathway", "*"),
    },
    Row {
        n: 12,
        published: "http://purl.org/np/RAbWbJCYlLhlYBDn9PVxdJP_WUbbi058aRcK-3sOJsRwY",
        own_claim: false,
        context: Some(("https://www.wikidata.org/wiki/Q874405", "social group", "")),
        subject: ("http://purl.org/np/RAhnnsMWVM8M29NixCJfVDLWzRzwwCPnUD7LI2kxT-FME#relative-neocortex-size", "relative neocortex size", "*"),
        qualifier: "neverQualifier",
        relation: "affects",
        object: ("http://purl.org/np/RAlKYv_sE8qwiSqsRdcr7KrkU1bsqlqiFmhDPtPBwpLrM#social-group-size", "social group size", "*"),
    },
    Row {
        n: 13,
        published: "http://purl.org/np/RAoo8EvTgfkxJw5SgZXbJvRl5nQG7ygeGaHp8Zud1U4Zw",
        own_claim: false,
        context: Some(("http://purl.org/np/RAaOAF90U6YxAvnchfj0dRtT5HRz320Pz202aGap-VfuI#ecm-bound-cancer-cell", "ecm bound cancer cell", "*")),
        subject: ("http://purl.org/np/RA-jkb7qPNTSOe_EXltW_rlQWQ9x3_Y1KOzW6J_bbPz4U#glycocalyx-bulk", "glycocayx bulk", "*"),
        qualifier: "generallyQualifier",
        relation: "increases",
        object: ("http://purl.org/np/RAFH8AVn-wnTcSGxvPZ1Uiy_AtOhINlynnAxxiCdcTVWU#integrin-clustering", "integrin clustering", "*"),
    },
    Row {
        n: 14,
        published: "http://purl.org/np/RAeRSya2qIYymsBxiqOZP_oaQpHXUVXiydKvPCFM-7DDQ",
        own_claim: false,
        context: Some(("https://www.wikidata.org/wiki/Q5", "human", "")),
        subject: ("http://purl.org/np/RAPVWYH0x-xyDa9PfBcGUFly3m1FNEO43KG9s0uH-y6yo#STX1B-mutation", "STX1B mutation", "*"),
        qualifier: "frequentlyQualifier",
        relation: "coOccursWith",
        object: ("https://www.wikidata.org/wiki/Q41571", "epilepsy", ""),
    },
    Row {
        n: 15,
        published: "http://purl.org/np/RAgoIxfXPqNDY8vnK2EmBQDAFwuFIDJtfaMplTvPMq3pg",
        own_claim: true,
        context: Some(("http://purl.org/np/RAkCjYmMU3obIrC4IpwUw84JW1ymd312yz0N0g-R9yes0#digital-humanities-research", "digital humanities research", "*")),
        subject: ("http://purl.org/np/RAcPa1aO8kAt8QYwjQoJq-PIzYvo0jCzYrAiOX_XOyk1w#usage-of-linked-data-scopes", "usage of Linked Data Scopes", "*"),
        qualifier: "canGenerallyQualifier",
        relation: "contributesTo",
        object: ("https://www.wikidata.org/wiki/Q535347", "transparency", ""),
    },
];

fn iri(s: &str) -> Iri {
    Iri::new(s).expect("fixture IRIs are valid")
}

fn class(c: Class) -> ClassRef {
    ClassRef::new(iri(c.0), c.1)
}

fn stamp(minute: u32) -> Stamp {
    Stamp { creator: iri(CREATOR), time: Utc.with_ymd_and_hms(2021, 12, 1, 12, minute, 0).unwrap() }
}

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let table = root.join("corpus");
    fs::create_dir_all(&table).unwrap();

    let mut manifest = String::from(
        "row\tfile\tcode\tpublished\town_claim\tqualifier\trelation\tcontext_marker\tsubject_marker\tobject_marker\n",
    );
    for r in ROWS {
        let sp = SuperPattern {
            context: r.context.map_or(Context::Universal, |c| Context::Class(class(c))),
            subject: class(r.subject),
            qualifier: fpub::superpattern::Qualifier::from_iri(&iri(&format!("{SP}{}", r.qualifier)))
                .expect("known qualifier"),
            relation: RelationType::from_iri(&iri(&format!("{SP}{}", r.relation))).expect("known relation"),
            object: class(r.object),
        };
        let draft = authoring::formalization(&sp, None, None, &stamp(r.n)).expect("valid row");
        let (np, code) = draft.finalize().expect("finalizes");
        let file = format!("row{:02}.trig", r.n);
        fs::write(table.join(&file), np.to_trig()).unwrap();
        manifest.push_str(&format!(
            "{}\t{file}\t{code}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.n,
            r.published,
            r.own_claim,
            sp.qualifier,
            sp.relation.name(),
            r.context.map_or("", |c| c.2),
            r.subject.2,
            r.object.2,
        ));
    }
    fs::write(table.join("manifest.tsv"), manifest).unwrap();

    // A class definition above the exhaustive-sweep size.
    let related: Vec<Iri> =
        (0..32).map(|i| iri(&format!("http://www.wikidata.org/entity/Q{}", 18048867 + i))).collect();
    let large = authoring::class_definition(
        "STX1B mutation",
        "mutation in STX1B, a gene encoding syntaxin 1B",
        iri("http://www.wikidata.org/entity/Q42918"),
        related,
        &stamp(30),
    )
    .expect("valid class definition");
    let (np, _) = large.finalize().expect("finalizes");
    fs::write(root.join("golden").join("large.trig"), np.to_trig()).unwrap();
}
