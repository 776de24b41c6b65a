//! Citation sensor: citation counts, the h-index family and PageRank.

use std::collections::BTreeSet;

use crate::corpus::{DocId, Index, Query};
use crate::error::Result;
use crate::parallel::Exec;

use super::bibliometrics::{compute_indices, BibliometricIndices, ImpactParams, PaperImpact};
use super::{EventScoreTable, QueryContext, SensorKind};

pub const CITATION_EVENTS: [&str; 16] = [
    "citation.cites.topic",
    "citation.cites.all",
    "citation.cites.topic.avg",
    "citation.cites_per_year.topic.avg",
    "citation.cites.topic.max",
    "citation.collaborators",
    "citation.h_index",
    "citation.h_index.topic",
    "citation.h_index.contemporary",
    "citation.h_index.trend",
    "citation.h_index.individual",
    "citation.g_index",
    "citation.a_index",
    "citation.e_index",
    "citation.pagerank.sum",
    "citation.pagerank.avg",
];

/// Number of documents citing `doc`.
pub fn citation_count(index: &Index, doc: DocId) -> usize {
    index.citation_count(doc)
}

fn paper_impact(index: &Index, doc: DocId) -> PaperImpact {
    let p = index.doc(doc);
    PaperImpact {
        citations: index.citation_count(doc) as u32,
        year: p.year,
        author_count: p.authors.len() as u32,
        citing_years: index
            .citation_in(doc)
            .iter()
            .map(|&c| index.doc(c).year)
            .collect(),
    }
}

fn indices_in_context(ctx: &QueryContext<'_>, author: &str) -> BibliometricIndices {
    let docs = ctx.index.author_pubs(author);
    let papers: Vec<PaperImpact> = docs.iter().map(|&d| paper_impact(ctx.index, d)).collect();
    let topic: Vec<bool> = docs.iter().map(|&d| ctx.is_matched(d)).collect();
    compute_indices(&papers, &topic, ctx.index.now_year(), ImpactParams::default())
}

/// Impact indices of `author`, with the query-conditioned h-index
/// restricted to publications that contain a query term.
pub fn bibliometric_indices(index: &Index, author: &str, q: &Query) -> BibliometricIndices {
    indices_in_context(&QueryContext::new(index, q), author)
}

pub(crate) fn citation_row(ctx: &QueryContext<'_>, author: &str) -> Vec<f64> {
    let index = ctx.index;
    let now = index.now_year();
    let docs = index.author_pubs(author);
    let matched: Vec<DocId> = docs.iter().copied().filter(|&d| ctx.is_matched(d)).collect();

    let cites = |d: DocId| index.citation_count(d) as f64;
    let topic_cites: Vec<f64> = matched.iter().map(|&d| cites(d)).collect();
    let topic_total: f64 = topic_cites.iter().sum();
    let all_total: f64 = docs.iter().map(|&d| cites(d)).sum();
    let mean = |v: &[f64]| {
        if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };
    let per_year: Vec<f64> = matched
        .iter()
        .map(|&d| cites(d) / ((now - index.doc(d).year).max(0) + 1) as f64)
        .collect();
    let topic_max = topic_cites.iter().copied().fold(0.0, f64::max);
    let collaborators = index.coauthors(author).map_or(0, |c| c.len());
    let idx = indices_in_context(ctx, author);
    let ranks: Vec<f64> = docs.iter().map(|&d| index.pagerank(d)).collect();

    vec![
        topic_total,
        all_total,
        mean(&topic_cites),
        mean(&per_year),
        topic_max,
        collaborators as f64,
        idx.h as f64,
        idx.h_topic as f64,
        idx.contemporary_h as f64,
        idx.trend_h as f64,
        idx.individual_h,
        idx.g as f64,
        idx.a,
        idx.e,
        ranks.iter().sum(),
        mean(&ranks),
    ]
}

pub fn extract_citation_events(
    index: &Index,
    q: &Query,
    candidates: &BTreeSet<String>,
) -> Result<EventScoreTable> {
    let ctx = QueryContext::new(index, q);
    super::extract(SensorKind::Citation, &ctx, candidates, Exec::default())
}
