//! Formalization papers as nanopublications.
//!
//! Scientific claims are expressed with the five-slot super-pattern inside
//! content-addressed nanopublications. The crate covers the RDF layer, the
//! hashing scheme, the claim model and its finite-world semantics, the
//! submission/review/decision workflow, an append-only registry with named
//! queries and statistics, and an HTTP facade.

pub mod authoring;
pub mod cli;
pub mod nanopub;
pub mod rdf;
pub mod registry;
pub mod semantics;
pub mod service;
pub mod superpattern;
pub mod trusty;
pub mod view;
pub mod vocab;
pub mod workflow;
