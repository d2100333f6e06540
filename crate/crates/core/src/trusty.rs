//! Content-hash identifiers for nanopublications.
//!
//! The code of a dataset is computed by replacing its own IRI (and every
//! `{self}#fragment` IRI) with a single-space placeholder, serialising the
//! result canonically, hashing the UTF-8 bytes with SHA-256 and encoding the
//! digest as unpadded base64url behind an `RA` prefix. This recipe is local
//! to this engine: it mirrors the shape of published nanopublication IRIs but
//! is not wire compatible with the public network's hashing.

use std::fmt;
use std::str::FromStr;

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rdf::{serialize_canonical, Dataset, Iri};

pub const NP_BASE: &str = "http://purl.org/np/";
pub const PLACEHOLDER: &str = " ";
const CODE_LEN: usize = 45;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrustyError {
    #[error("self IRI <{0}> does not occur in the dataset")]
    SelfIriNotFound(Iri),
    #[error("no graph IRI carries a trusty code")]
    NoTrustyIri,
    #[error("malformed artifact code {0:?}")]
    MalformedCode(String),
}

/// `RA` followed by 43 base64url characters.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ArtifactCode(String);

impl ArtifactCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `http://purl.org/np/{code}`
    pub fn iri(&self) -> Iri {
        Iri::new(format!("{NP_BASE}{}", self.0)).expect("trusty IRIs are absolute")
    }

    /// Extracts the code from `http://purl.org/np/{code}` or
    /// `http://purl.org/np/{code}#fragment`.
    pub fn from_iri(iri: &Iri) -> Option<ArtifactCode> {
        iri.stem().strip_prefix(NP_BASE)?.parse().ok()
    }
}

pub fn is_valid_code(s: &str) -> bool {
    s.len() == CODE_LEN
        && s.starts_with("RA")
        && s[2..].bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

impl FromStr for ArtifactCode {
    type Err = TrustyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if is_valid_code(s) {
            Ok(ArtifactCode(s.to_string()))
        } else {
            Err(TrustyError::MalformedCode(s.to_string()))
        }
    }
}

impl TryFrom<String> for ArtifactCode {
    type Error = TrustyError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<ArtifactCode> for String {
    fn from(value: ArtifactCode) -> Self {
        value.0
    }
}

impl fmt::Display for ArtifactCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ArtifactCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ArtifactCode({})", self.0)
    }
}

fn is_self_ref(iri: &Iri, self_iri: &Iri) -> bool {
    let s = iri.as_str();
    let me = self_iri.as_str();
    s == me || (s.len() > me.len() && s.starts_with(me) && s.as_bytes()[me.len()] == b'#')
}

/// Renames `from` (and its fragment IRIs) to `to` everywhere in `d`,
/// including prefix namespaces.
pub fn rename_self(d: &Dataset, from: &Iri, to: &str) -> Dataset {
    let mut out = d.map_iris(|i| {
        if is_self_ref(i, from) {
            Iri::new_unchecked(format!("{to}{}", &i.as_str()[from.as_str().len()..]))
        } else {
            i.clone()
        }
    });
    for (p, ns) in d.prefixes() {
        if let Some(rest) = ns.strip_prefix(from.as_str()) {
            if rest.is_empty() || rest.starts_with('#') {
                out.set_prefix(p.clone(), format!("{to}{rest}"));
            }
        }
    }
    out
}

pub fn compute_code(d: &Dataset, self_iri: &Iri) -> Result<ArtifactCode, TrustyError> {
    let found = d.iter().flat_map(|q| q.terms()).any(|t| t.as_iri().is_some_and(|i| is_self_ref(i, self_iri)));
    if !found {
        return Err(TrustyError::SelfIriNotFound(self_iri.clone()));
    }
    let masked = rename_self(d, self_iri, PLACEHOLDER);
    let digest = Sha256::digest(serialize_canonical(&masked).as_bytes());
    Ok(ArtifactCode(format!("RA{}", URL_SAFE_NO_PAD.encode(digest))))
}

/// Rewrites `temp_iri` to its trusty IRI. Applying it to an already
/// finalized dataset (with its own trusty IRI as `temp_iri`) is the identity.
pub fn finalize(d: &Dataset, temp_iri: &Iri) -> Result<(Dataset, ArtifactCode), TrustyError> {
    let code = compute_code(d, temp_iri)?;
    let finalized = rename_self(d, temp_iri, code.iri().as_str());
    Ok((finalized, code))
}

/// The code embedded in the graph names of `d`, if all trusty graph names
/// agree on one.
pub fn embedded_code(d: &Dataset) -> Result<Option<ArtifactCode>, TrustyError> {
    let mut codes: Vec<ArtifactCode> = d.graph_names().iter().filter_map(ArtifactCode::from_iri).collect();
    codes.sort();
    codes.dedup();
    match codes.len() {
        0 => Err(TrustyError::NoTrustyIri),
        1 => Ok(codes.pop()),
        _ => Ok(None),
    }
}

/// True iff the code recomputed from the content equals the code in the
/// graph names.
pub fn verify(d: &Dataset) -> Result<bool, TrustyError> {
    let Some(code) = embedded_code(d)? else {
        return Ok(false);
    };
    // Every graph must belong to this nanopublication.
    if d.graph_names().iter().any(|g| g.stem() != code.iri().as_str()) {
        return Ok(false);
    }
    Ok(compute_code(d, &code.iri())? == code)
}
