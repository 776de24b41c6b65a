//! Text similarity sensor: query/document overlap, BM25 and Jaccard, both
//! per document and over venue-level pseudo-documents.

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::{DocId, Index, Query, VenueKind};
use crate::error::Result;
use crate::parallel::Exec;

use super::{EventScoreTable, QueryContext, SensorKind};

pub const TEXT_EVENTS: [&str; 16] = [
    "text.query_tf",
    "text.idf",
    "text.doc_len.avg",
    "text.coauthors",
    "text.bm25.sum",
    "text.bm25.avg",
    "text.bm25.max",
    "text.jaccard.sum",
    "text.jaccard.avg",
    "text.jaccard.max",
    "text.venue_bm25.sum",
    "text.venue_bm25.avg",
    "text.venue_bm25.max",
    "text.venue_jaccard.sum",
    "text.venue_jaccard.avg",
    "text.venue_jaccard.max",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

/// Smoothed inverse document frequency; always positive.
pub fn idf(num_docs: usize, df: usize) -> f64 {
    let (n, df) = (num_docs as f64, df as f64);
    ((n - df + 0.5) / (df + 0.5) + 1.0).ln()
}

/// BM25 contribution of one term.
pub fn bm25_term(tf: f64, idf: f64, doc_len: f64, avg_len: f64, params: Bm25Params) -> f64 {
    if tf <= 0.0 {
        return 0.0;
    }
    let norm = if avg_len > 0.0 {
        1.0 - params.b + params.b * doc_len / avg_len
    } else {
        1.0
    };
    idf * tf * (params.k1 + 1.0) / (tf + params.k1 * norm)
}

/// Okapi BM25 of `doc` for `q` with the default parameters.
pub fn bm25(index: &Index, q: &Query, doc: DocId) -> f64 {
    bm25_with(index, q, doc, Bm25Params::default())
}

pub fn bm25_with(index: &Index, q: &Query, doc: DocId, params: Bm25Params) -> f64 {
    let len = index.doc_len(doc) as f64;
    q.terms
        .iter()
        .map(|t| {
            let tf = index.tf(t, doc) as f64;
            bm25_term(tf, idf(index.num_docs(), index.df(t)), len, index.avg_doc_len(), params)
        })
        .sum()
}

/// |Q ∩ D| / |Q ∪ D|; zero when the document has no terms.
pub fn jaccard<T: Ord>(query_terms: &BTreeSet<T>, doc_terms: &BTreeSet<T>) -> f64 {
    if doc_terms.is_empty() {
        return 0.0;
    }
    let inter = query_terms.intersection(doc_terms).count();
    let union = query_terms.len() + doc_terms.len() - inter;
    inter as f64 / union as f64
}

/// Jaccard computed from the number of shared terms and the two set sizes.
fn jaccard_counts(shared: usize, query_len: usize, doc_len: usize) -> f64 {
    if doc_len == 0 {
        return 0.0;
    }
    shared as f64 / (query_len + doc_len - shared) as f64
}

pub(crate) fn doc_jaccard(index: &Index, q: &Query, doc: DocId) -> f64 {
    let shared = q.terms.iter().filter(|t| index.tf(t, doc) > 0).count();
    jaccard_counts(shared, q.terms.len(), index.doc_terms(doc).len())
}

/// BM25 and Jaccard of every venue pseudo-document. A pseudo-document
/// concatenates all matched documents of one (kind, venue) pair; BM25
/// statistics are taken over the pseudo-document collection itself.
pub(crate) fn venue_scores(
    index: &Index,
    q: &Query,
    matched: &BTreeSet<DocId>,
    params: Bm25Params,
) -> BTreeMap<(VenueKind, String), (f64, f64)> {
    struct Pseudo {
        query_tf: Vec<u32>,
        terms: BTreeSet<u32>,
        len: u64,
    }
    let query_ids: Vec<Option<u32>> = q.terms.iter().map(|t| index.term_id(t).map(|id| id.0)).collect();
    let mut venues: BTreeMap<(VenueKind, String), Pseudo> = BTreeMap::new();
    for &d in matched {
        let p = index.doc(d);
        if p.venue.is_empty() {
            continue;
        }
        let entry = venues
            .entry((p.venue_kind, p.venue.clone()))
            .or_insert_with(|| Pseudo {
                query_tf: vec![0; q.terms.len()],
                terms: BTreeSet::new(),
                len: 0,
            });
        entry.len += index.doc_len(d) as u64;
        for &(term, tf) in index.doc_terms(d) {
            entry.terms.insert(term.0);
            if let Some(i) = query_ids.iter().position(|id| *id == Some(term.0)) {
                entry.query_tf[i] += tf;
            }
        }
    }
    if venues.is_empty() {
        return BTreeMap::new();
    }
    let n = venues.len();
    let avg_len = venues.values().map(|v| v.len as f64).sum::<f64>() / n as f64;
    let df: Vec<usize> = (0..q.terms.len())
        .map(|i| venues.values().filter(|v| v.query_tf[i] > 0).count())
        .collect();
    venues
        .into_iter()
        .map(|(key, v)| {
            let score = v
                .query_tf
                .iter()
                .zip(&df)
                .map(|(&tf, &df)| bm25_term(tf as f64, idf(n, df), v.len as f64, avg_len, params))
                .sum();
            let shared = v.query_tf.iter().filter(|&&tf| tf > 0).count();
            let jac = jaccard_counts(shared, q.terms.len(), v.terms.len());
            (key, (score, jac))
        })
        .collect()
}

fn sum_avg_max(values: &[f64]) -> [f64; 3] {
    if values.is_empty() {
        return [0.0; 3];
    }
    let sum: f64 = values.iter().sum();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    [sum, sum / values.len() as f64, max]
}

pub(crate) fn text_row(ctx: &QueryContext<'_>, author: &str) -> Vec<f64> {
    let index = ctx.index;
    let docs = ctx.matched_pubs(author);
    if docs.is_empty() {
        return vec![0.0; TEXT_EVENTS.len()];
    }
    let query_tf: u64 = docs
        .iter()
        .map(|&d| ctx.query.terms.iter().map(|t| index.tf(t, d) as u64).sum::<u64>())
        .sum();
    let idf_sum: f64 = ctx
        .query
        .terms
        .iter()
        .zip(&ctx.query_term_idf)
        .filter(|(t, _)| docs.iter().any(|&d| index.tf(t, d) > 0))
        .map(|(_, idf)| idf)
        .sum();
    let avg_len = docs.iter().map(|&d| index.doc_len(d) as f64).sum::<f64>() / docs.len() as f64;
    let coauthors: BTreeSet<&str> = docs
        .iter()
        .flat_map(|&d| index.doc(d).authors.iter().map(String::as_str))
        .filter(|a| *a != author)
        .collect();
    let bm25: Vec<f64> = docs.iter().map(|d| ctx.doc_bm25[d.index()]).collect();
    let jac: Vec<f64> = docs.iter().map(|d| ctx.doc_jaccard[d.index()]).collect();

    let venues: BTreeSet<(VenueKind, &str)> = docs
        .iter()
        .map(|&d| index.doc(d))
        .filter(|p| !p.venue.is_empty())
        .map(|p| (p.venue_kind, p.venue.as_str()))
        .collect();
    let (venue_bm25, venue_jac): (Vec<f64>, Vec<f64>) = venues
        .into_iter()
        .map(|(k, v)| ctx.venue_scores[&(k, v.to_owned())])
        .unzip();

    let mut row = vec![query_tf as f64, idf_sum, avg_len, coauthors.len() as f64];
    row.extend(sum_avg_max(&bm25));
    row.extend(sum_avg_max(&jac));
    row.extend(sum_avg_max(&venue_bm25));
    row.extend(sum_avg_max(&venue_jac));
    row
}

pub fn extract_text_events(
    index: &Index,
    q: &Query,
    candidates: &BTreeSet<String>,
) -> Result<EventScoreTable> {
    let ctx = QueryContext::new(index, q);
    super::extract(SensorKind::Text, &ctx, candidates, Exec::default())
}
