//! Per-venue totals and per-submission averages.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Index;
use crate::rdf::Iri;
use crate::workflow::{Act, Kind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatRow {
    pub key: String,
    pub kind: char,
    pub label: String,
    pub total: u64,
    /// Two decimals, rounded half up; `—` when there are no submissions.
    pub per_submission: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsReport {
    pub venue: Iri,
    pub submissions: u64,
    pub rows: Vec<StatRow>,
}

impl StatsReport {
    pub fn row(&self, key: &str) -> Option<&StatRow> {
        self.rows.iter().find(|r| r.key == key)
    }

    pub fn total(&self) -> u64 {
        self.rows.iter().map(|r| r.total).sum()
    }

    /// Plain-text table: type, per submission, total.
    pub fn to_table(&self) -> String {
        let width = self.rows.iter().map(|r| r.label.len()).max().unwrap_or(0);
        let mut out = format!("{:<1}  {:<width$}  {:>14}  {:>5}\n", "", "type", "per submission", "total");
        for r in &self.rows {
            out.push_str(&format!("{}  {:<width$}  {:>14}  {:>5}\n", r.kind, r.label, r.per_submission, r.total));
        }
        out
    }
}

/// `num / den` to two decimals, halves rounded up. `None` for `den == 0`.
pub fn round_half_up(num: u64, den: u64) -> Option<String> {
    if den == 0 {
        return None;
    }
    let scaled = num as u128 * 100;
    let den = den as u128;
    let mut hundredths = scaled / den;
    if (scaled % den) * 2 >= den {
        hundredths += 1;
    }
    Some(format!("{}.{:02}", hundredths / 100, hundredths % 100))
}

pub(super) fn stats(idx: &Index, venue: &Iri) -> StatsReport {
    let mut submissions = BTreeSet::new();
    let mut formalizations = BTreeSet::new();
    let mut updates = BTreeSet::new();
    let mut classes = BTreeSet::new();
    let mut sp_reviews = BTreeSet::new();
    let mut cd_reviews = BTreeSet::new();
    let mut sp_responses = BTreeSet::new();
    let mut cd_responses = BTreeSet::new();
    let mut decisions = BTreeSet::new();

    let kind_of = |i: &Iri| idx.get(i).and_then(|e| e.kind);
    for (sub, thread) in idx.threads(venue) {
        submissions.insert(sub);
        let Ok(t) = thread else { continue };
        for v in &t.versions {
            match kind_of(&v.iri) {
                Some(Kind::Update) => updates.insert(v.iri.clone()),
                _ => formalizations.insert(v.iri.clone()),
            };
        }
        classes.extend(t.class_definitions.iter().map(|m| m.iri.clone()));
        for r in &t.reviews {
            let on_class = matches!(
                idx.get(&r.iri).map(|e| &e.act),
                Some(Act::Review(rc)) if kind_of(&rc.target) == Some(Kind::ClassDefinition)
            );
            if on_class {
                cd_reviews.insert(r.iri.clone());
            } else {
                sp_reviews.insert(r.iri.clone());
            }
        }
        for a in &t.responses {
            let answered = match idx.get(&a.iri).map(|e| &e.act) {
                Some(Act::Response(rc)) => Some(rc.in_response_to.clone()),
                _ => None,
            };
            match answered {
                Some(r) if cd_reviews.contains(&r) => cd_responses.insert(a.iri.clone()),
                _ => sp_responses.insert(a.iri.clone()),
            };
        }
        decisions.extend(t.decision.iter().map(|m| m.iri.clone()));
    }

    let n = submissions.len() as u64;
    let row = |key: &str, kind, label: &str, total: usize| StatRow {
        key: key.to_string(),
        kind,
        label: label.to_string(),
        total: total as u64,
        per_submission: round_half_up(total as u64, n).unwrap_or_else(|| "—".to_string()),
    };
    StatsReport {
        venue: venue.clone(),
        submissions: n,
        rows: vec![
            row("submissions", 'S', "submissions", submissions.len()),
            row("super-pattern-definitions", 'F', "super-pattern definitions", formalizations.len()),
            row("class-definitions", 'C', "class definitions", classes.len()),
            row("super-pattern-reviews", 'R', "reviews of super-patterns", sp_reviews.len()),
            row("class-definition-reviews", 'R', "reviews of class definitions", cd_reviews.len()),
            row("super-pattern-responses", 'A', "responses to super-pattern reviews", sp_responses.len()),
            row("class-definition-responses", 'A', "responses to class definition reviews", cd_responses.len()),
            row("updated-definitions", 'U', "updated super-pattern definitions", updates.len()),
            row("decisions", 'D', "decisions", decisions.len()),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_half_up(34, 15).as_deref(), Some("2.27"));
        assert_eq!(round_half_up(119, 15).as_deref(), Some("7.93"));
        assert_eq!(round_half_up(25, 15).as_deref(), Some("1.67"));
        assert_eq!(round_half_up(1, 8).as_deref(), Some("0.13"));
        assert_eq!(round_half_up(1, 200).as_deref(), Some("0.01"));
        assert_eq!(round_half_up(0, 3).as_deref(), Some("0.00"));
        assert_eq!(round_half_up(1, 0), None);
    }
}
