//! Evidence extraction. Each sensor turns a query and its candidate set
//! into an [`EventScoreTable`] with one column per event.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{match_documents, DocId, Index, Query, VenueKind};
use crate::error::{Error, Result};
use crate::parallel::Exec;

pub mod bibliometrics;
pub mod citation;
pub mod pagerank;
pub mod profile;
pub mod text;

pub use bibliometrics::{h_index, BibliometricIndices, ImpactParams, PaperImpact};
pub use citation::{citation_count, extract_citation_events, CITATION_EVENTS};
pub use pagerank::{pagerank, PageRankParams};
pub use profile::{extract_profile_events, PROFILE_EVENTS};
pub use text::{bm25, extract_text_events, jaccard, Bm25Params, TEXT_EVENTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SensorKind {
    Text,
    Profile,
    Citation,
}

impl SensorKind {
    /// Fold order used when sensors are combined.
    pub const ALL: [SensorKind; 3] = [SensorKind::Text, SensorKind::Profile, SensorKind::Citation];

    pub fn name(self) -> &'static str {
        match self {
            SensorKind::Text => "text",
            SensorKind::Profile => "profile",
            SensorKind::Citation => "citation",
        }
    }

    pub fn events(self) -> &'static [&'static str] {
        match self {
            SensorKind::Text => &TEXT_EVENTS,
            SensorKind::Profile => &PROFILE_EVENTS,
            SensorKind::Citation => &CITATION_EVENTS,
        }
    }
}

impl fmt::Display for SensorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SensorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "text" => Ok(SensorKind::Text),
            "profile" => Ok(SensorKind::Profile),
            "citation" => Ok(SensorKind::Citation),
            other => Err(Error::InvalidInput(format!("unknown sensor `{other}`"))),
        }
    }
}

/// Maps a column onto [0, 1] with min-max scaling. A constant column maps
/// to all zeros.
pub fn min_max_normalize(column: &[f64]) -> Result<Vec<f64>> {
    if let Some((position, &value)) = column.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { position, value });
    }
    let min = column.iter().copied().fold(f64::INFINITY, f64::min);
    let max = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    if range <= 0.0 || range.is_nan() {
        return Ok(vec![0.0; column.len()]);
    }
    Ok(column
        .iter()
        .map(|&v| if v == max { 1.0 } else { (v - min) / range })
        .collect())
}

/// Raw and min-max normalized scores of one sensor, candidates by events.
#[derive(Debug, Clone, PartialEq)]
pub struct EventScoreTable {
    pub kind: SensorKind,
    candidates: Vec<String>,
    events: Vec<String>,
    raw: Vec<Vec<f64>>,
    normalized: Vec<Vec<f64>>,
}

impl EventScoreTable {
    /// Builds a table from raw rows (one per candidate). Rows are reordered
    /// so candidates ascend lexicographically.
    pub fn from_raw<S: Into<String>, E: Into<String>>(
        kind: SensorKind,
        candidates: impl IntoIterator<Item = S>,
        events: impl IntoIterator<Item = E>,
        raw: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let candidates: Vec<String> = candidates.into_iter().map(Into::into).collect();
        let events: Vec<String> = events.into_iter().map(Into::into).collect();
        if candidates.len() != raw.len() {
            return Err(Error::Shape(format!(
                "{} candidates but {} rows",
                candidates.len(),
                raw.len()
            )));
        }
        if let Some(row) = raw.iter().find(|r| r.len() != events.len()) {
            return Err(Error::Shape(format!(
                "row of width {} for {} events",
                row.len(),
                events.len()
            )));
        }
        let mut rows: Vec<(String, Vec<f64>)> = candidates.into_iter().zip(raw).collect();
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Shape(format!("duplicate candidate `{}`", w[0].0)));
        }
        let (candidates, raw): (Vec<String>, Vec<Vec<f64>>) = rows.into_iter().unzip();

        let mut normalized = vec![vec![0.0; events.len()]; candidates.len()];
        for e in 0..events.len() {
            let column: Vec<f64> = raw.iter().map(|r| r[e]).collect();
            let scaled = min_max_normalize(&column).map_err(|err| match err {
                Error::NonFinite { position, value } => Error::InvalidInput(format!(
                    "non-finite score {value} for `{}` in event `{}`",
                    candidates[position], events[e]
                )),
                other => other,
            })?;
            for (row, v) in normalized.iter_mut().zip(scaled) {
                row[e] = v;
            }
        }
        Ok(EventScoreTable {
            kind,
            candidates,
            events,
            raw,
            normalized,
        })
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn events(&self) -> &[String] {
        &self.events
    }

    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn event_index(&self, name: &str) -> Option<usize> {
        self.events.iter().position(|e| e == name)
    }

    pub fn candidate_index(&self, id: &str) -> Option<usize> {
        self.candidates.binary_search_by(|c| c.as_str().cmp(id)).ok()
    }

    pub fn raw(&self, candidate: usize, event: usize) -> f64 {
        self.raw[candidate][event]
    }

    pub fn normalized(&self, candidate: usize, event: usize) -> f64 {
        self.normalized[candidate][event]
    }

    pub fn raw_row(&self, candidate: usize) -> &[f64] {
        &self.raw[candidate]
    }

    pub fn normalized_row(&self, candidate: usize) -> &[f64] {
        &self.normalized[candidate]
    }

    pub fn raw_column(&self, event: usize) -> Vec<f64> {
        self.raw.iter().map(|r| r[event]).collect()
    }

    pub fn normalized_column(&self, event: usize) -> Vec<f64> {
        self.normalized.iter().map(|r| r[event]).collect()
    }

    /// Raw score by candidate id and event name.
    pub fn raw_value(&self, candidate: &str, event: &str) -> Option<f64> {
        Some(self.raw[self.candidate_index(candidate)?][self.event_index(event)?])
    }
}

/// Per-query state shared by the three sensors: matched documents and
/// their query-dependent text scores.
#[derive(Debug, Clone)]
pub struct QueryContext<'a> {
    pub index: &'a Index,
    pub query: &'a Query,
    matched: Vec<bool>,
    doc_bm25: Vec<f64>,
    doc_jaccard: Vec<f64>,
    venue_scores: BTreeMap<(VenueKind, String), (f64, f64)>,
    query_term_idf: Vec<f64>,
}

impl<'a> QueryContext<'a> {
    pub fn new(index: &'a Index, query: &'a Query) -> Self {
        let matched_set = match_documents(index, query);
        let mut matched = vec![false; index.num_docs()];
        let mut doc_bm25 = vec![0.0; index.num_docs()];
        let mut doc_jaccard = vec![0.0; index.num_docs()];
        let params = Bm25Params::default();
        for &d in &matched_set {
            matched[d.index()] = true;
            doc_bm25[d.index()] = text::bm25_with(index, query, d, params);
            doc_jaccard[d.index()] = text::doc_jaccard(index, query, d);
        }
        let venue_scores = text::venue_scores(index, query, &matched_set, params);
        let query_term_idf = query
            .terms
            .iter()
            .map(|t| text::idf(index.num_docs(), index.df(t)))
            .collect();
        QueryContext {
            index,
            query,
            matched,
            doc_bm25,
            doc_jaccard,
            venue_scores,
            query_term_idf,
        }
    }

    pub fn is_matched(&self, doc: DocId) -> bool {
        self.matched[doc.index()]
    }

    /// The candidate's documents that contain a query term.
    pub fn matched_pubs(&self, author: &str) -> Vec<DocId> {
        self.index
            .author_pubs(author)
            .iter()
            .copied()
            .filter(|&d| self.is_matched(d))
            .collect()
    }

    pub fn candidates(&self) -> BTreeSet<String> {
        self.index
            .doc_ids()
            .filter(|&d| self.is_matched(d))
            .flat_map(|d| self.index.doc(d).authors.iter().cloned())
            .collect()
    }
}

/// Runs one sensor over `candidates`.
pub fn extract(
    kind: SensorKind,
    ctx: &QueryContext<'_>,
    candidates: &BTreeSet<String>,
    exec: Exec,
) -> Result<EventScoreTable> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("sensor extraction needs at least one candidate".into()));
    }
    let ids: Vec<&String> = candidates.iter().collect();
    let rows: Vec<Vec<f64>> = match kind {
        SensorKind::Text => exec.map(&ids, |c| text::text_row(ctx, c)),
        SensorKind::Profile => exec.map(&ids, |c| profile::profile_row(ctx, c)),
        SensorKind::Citation => exec.map(&ids, |c| citation::citation_row(ctx, c)),
    };
    EventScoreTable::from_raw(kind, ids.into_iter().cloned(), kind.events().iter().copied(), rows)
}
