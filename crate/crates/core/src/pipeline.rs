//! End-to-end runs: query to ranking, qrels to evaluation report.

use std::fmt::Write as _;

use crate::corpus::{Index, LoadReport, Query};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate_ranking, EvalReport, QueryEval, Qrels};
use crate::evidence::{build_sensor_reports, multisensor_rank, MassFunction, SensorReport};
use crate::fusion::{fuse_with, FusionMethod, RankedList};
use crate::parallel::Exec;
use crate::sensors::{extract, EventScoreTable, QueryContext, SensorKind};

/// How sensor lists are merged into the final ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvidenceMode {
    /// Entropy-weighted masses combined with Dempster's rule.
    Ds,
    /// The fusion method applied once more to the per-sensor fused scores.
    Plain,
}

impl EvidenceMode {
    pub fn name(self) -> &'static str {
        match self {
            EvidenceMode::Ds => "ds",
            EvidenceMode::Plain => "plain",
        }
    }
}

impl std::str::FromStr for EvidenceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ds" => Ok(EvidenceMode::Ds),
            "plain" => Ok(EvidenceMode::Plain),
            other => Err(Error::InvalidInput(format!(
                "unknown evidence mode `{other}` (expected ds or plain)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sensors: Vec<SensorKind>,
    pub fusion: FusionMethod,
    pub evidence: EvidenceMode,
    /// Ranking depth kept in the output (and used for evaluation).
    pub depth: usize,
    pub verbose: bool,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            sensors: vec![SensorKind::Text, SensorKind::Citation],
            fusion: FusionMethod::Condorcet,
            evidence: EvidenceMode::Ds,
            depth: 100,
            verbose: false,
            seed: 0,
            exec: Exec::default(),
        }
    }
}

impl RunConfig {
    /// Sensors deduplicated, in fold order.
    pub fn sensor_order(&self) -> Vec<SensorKind> {
        let mut s = self.sensors.clone();
        s.sort();
        s.dedup();
        s
    }
}

/// Parses a comma-separated sensor list such as `text,citation`.
pub fn parse_sensor_list(list: &str) -> Result<Vec<SensorKind>> {
    let sensors: Vec<SensorKind> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if sensors.is_empty() {
        return Err(Error::InvalidInput("no sensors selected".into()));
    }
    Ok(sensors)
}

/// Per-mode intermediate results kept for verbose output.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostics {
    Ds {
        reports: Vec<SensorReport>,
        combined: MassFunction,
        conflicts: Vec<f64>,
    },
    Plain {
        fused: Vec<RankedList>,
    },
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub query: String,
    pub candidate_count: usize,
    /// Final ranking truncated to the configured depth.
    pub ranking: RankedList,
    pub diagnostics: Diagnostics,
    pub warnings: Vec<String>,
}

/// Runs every configured sensor over the query's candidates.
pub fn extract_tables(index: &Index, query: &Query, config: &RunConfig) -> Result<Vec<EventScoreTable>> {
    let ctx = QueryContext::new(index, query);
    let candidates = ctx.candidates();
    config
        .sensor_order()
        .into_iter()
        .map(|kind| extract(kind, &ctx, &candidates, config.exec))
        .collect()
}

/// Turns sensor tables into a single ranking (not truncated).
pub fn fuse_tables(tables: &[EventScoreTable], config: &RunConfig) -> Result<(RankedList, Diagnostics)> {
    let first = tables
        .first()
        .ok_or_else(|| Error::InvalidInput("no sensor tables".into()))?;
    match config.evidence {
        EvidenceMode::Ds => {
            let reports = build_sensor_reports(tables, config.fusion, config.exec)?;
            let outcome = multisensor_rank(&reports)?;
            Ok((
                outcome.ranking,
                Diagnostics::Ds {
                    reports,
                    combined: outcome.combined,
                    conflicts: outcome.conflicts,
                },
            ))
        }
        EvidenceMode::Plain => {
            let fused: Vec<RankedList> = tables.iter().map(|t| fuse_with(config.fusion, t, config.exec)).collect();
            let rows: Vec<Vec<f64>> = first
                .candidates()
                .iter()
                .map(|c| fused.iter().map(|f| f.score_of(c).unwrap_or(0.0)).collect())
                .collect();
            let events = tables.iter().map(|t| format!("{}.fused", t.kind));
            let merged = EventScoreTable::from_raw(first.kind, first.candidates().iter().cloned(), events, rows)?;
            let ranking = fuse_with(config.fusion, &merged, config.exec);
            Ok((ranking, Diagnostics::Plain { fused }))
        }
    }
}

pub fn search(index: &Index, query: &Query, config: &RunConfig) -> Result<SearchOutcome> {
    let mut warnings = Vec::new();
    let tables = {
        let ctx = QueryContext::new(index, query);
        if ctx.candidates().is_empty() {
            warnings.push(format!("no publication matches query `{}`", query.raw));
            return Ok(SearchOutcome {
                query: query.raw.clone(),
                candidate_count: 0,
                ranking: RankedList::from_scores(config.fusion, Vec::new()),
                diagnostics: Diagnostics::Empty,
                warnings,
            });
        }
        extract_tables(index, query, config)?
    };
    let candidate_count = tables[0].num_candidates();
    let (ranking, diagnostics) = match fuse_tables(&tables, config) {
        Err(Error::NoEvidence) => {
            warnings.push(format!("no sensor carries evidence for query `{}`", query.raw));
            let flat = tables[0].candidates().iter().map(|c| (c.clone(), 0.0)).collect();
            (RankedList::from_scores(config.fusion, flat), Diagnostics::Empty)
        }
        other => other?,
    };
    Ok(SearchOutcome {
        query: query.raw.clone(),
        candidate_count,
        ranking: ranking.truncated(config.depth),
        diagnostics,
        warnings,
    })
}

/// Text rendering of a search: optional `#`-prefixed diagnostics, then
/// `rank<TAB>author<TAB>score` rows.
pub fn render_search(outcome: &SearchOutcome, verbose: bool) -> String {
    let mut out = String::new();
    if verbose {
        let _ = writeln!(out, "# query\t{}\tcandidates={}", outcome.query, outcome.candidate_count);
        match &outcome.diagnostics {
            Diagnostics::Ds {
                reports,
                combined,
                conflicts,
            } => {
                for r in reports {
                    let _ = writeln!(
                        out,
                        "# sensor\t{}\tH={:.6}\tMaxH={:.6}\ttheta={:.6}",
                        r.kind,
                        r.entropy.entropy,
                        r.entropy.max_entropy,
                        r.mass.theta()
                    );
                    for (id, m) in r.mass.frame().iter().zip(r.mass.singletons()) {
                        let _ = writeln!(out, "# mass\t{}\t{id}\t{m:.6}", r.kind);
                    }
                }
                let mut label = reports.first().map(|r| r.kind.to_string()).unwrap_or_default();
                for (r, k) in reports.iter().skip(1).zip(conflicts) {
                    label = format!("{label}+{}", r.kind);
                    let _ = writeln!(out, "# combine\t{label}\tK={k:.6}");
                }
                for (id, m) in combined.frame().iter().zip(combined.singletons()) {
                    let _ = writeln!(out, "# final\t{id}\t{m:.6}");
                }
                let _ = writeln!(out, "# final\ttheta\t{:.6}", combined.theta());
            }
            Diagnostics::Plain { fused } => {
                for f in fused {
                    for (id, s) in &f.entries {
                        let _ = writeln!(out, "# fused\t{}\t{id}\t{s:.6}", f.method.name());
                    }
                }
            }
            Diagnostics::Empty => {}
        }
    }
    out.push_str("rank\tauthor\tscore\n");
    for (i, (id, score)) in outcome.ranking.entries.iter().enumerate() {
        let _ = writeln!(out, "{}\t{id}\t{score:.6}", i + 1);
    }
    out
}

/// Runs every judged query and scores the rankings. Queries without
/// relevant authors or without usable terms are skipped with a warning.
pub fn evaluate(index: &Index, qrels: &Qrels, config: &RunConfig) -> Result<(EvalReport, Vec<String>)> {
    let judged: Vec<(&str, &std::collections::BTreeSet<String>)> = qrels.queries().collect();
    // queries run side by side, so each search stays sequential inside
    let inner = RunConfig {
        exec: Exec::Sequential,
        ..config.clone()
    };
    let results: Vec<Result<std::result::Result<QueryEval, String>>> = config.exec.map(&judged, |(q, relevant)| {
        if relevant.is_empty() {
            return Ok(Err(format!("query `{q}` has no relevant authors, skipped")));
        }
        let query = match Query::parse(q) {
            Ok(query) => query,
            Err(Error::EmptyQuery(_)) => return Ok(Err(format!("query `{q}` has no indexable terms, skipped"))),
            Err(e) => return Err(e),
        };
        let outcome = search(index, &query, &inner)?;
        let ids: Vec<&str> = outcome.ranking.ids().collect();
        Ok(Ok(evaluate_ranking(q, &ids, relevant)?))
    });
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for r in results {
        match r? {
            Ok(row) => rows.push(row),
            Err(w) => warnings.push(w),
        }
    }
    Ok((EvalReport::from_rows(rows)?, warnings))
}

/// Summary numbers printed after indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexStats {
    pub publications: usize,
    pub authors: usize,
    pub citation_links: usize,
    pub terms: usize,
    pub self_citations_dropped: usize,
    pub dangling_references: usize,
}

impl IndexStats {
    pub fn new(index: &Index, load: &LoadReport) -> Self {
        IndexStats {
            publications: index.num_docs(),
            authors: index.num_authors(),
            citation_links: index.citation_graph().edge_count(),
            terms: index.vocabulary_size(),
            self_citations_dropped: load.self_citations_dropped,
            dangling_references: load.dangling_references,
        }
    }

    pub fn to_tsv(&self) -> String {
        format!(
            "publications\t{}\nauthors\t{}\ncitation_links\t{}\nterms\t{}\nself_citations_dropped\t{}\ndangling_references\t{}\n",
            self.publications,
            self.authors,
            self.citation_links,
            self.terms,
            self.self_citations_dropped,
            self.dangling_references
        )
    }
}
