//! Ranking quality against relevance judgments, and a paired two-sided
//! randomization test for comparing two systems.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::parallel::Exec;

/// Cutoffs reported for every query.
pub const PRECISION_CUTOFFS: [usize; 4] = [5, 10, 15, 20];

/// Significance level used to star a comparison.
pub const SIGNIFICANCE_LEVEL: f64 = 0.1;

/// Relevance judgments: queries in file order, each with its relevant
/// authors. A query may carry an empty set when its lines name no author.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Qrels {
    queries: Vec<(String, BTreeSet<String>)>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, query: &str, author: &str) {
        let pos = match self.queries.iter().position(|(q, _)| q == query) {
            Some(p) => p,
            None => {
                self.queries.push((query.to_owned(), BTreeSet::new()));
                self.queries.len() - 1
            }
        };
        if !author.is_empty() {
            self.queries[pos].1.insert(author.to_owned());
        }
    }

    /// Parses `query<TAB>author_id` lines.
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut qrels = Qrels::new();
        for (n, line) in BufReader::new(reader).lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: Default::default(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let (query, author) = line.split_once('\t').ok_or_else(|| Error::MalformedLine {
                line: n + 1,
                message: "expected `query<TAB>author_id`".into(),
            })?;
            if query.trim().is_empty() {
                return Err(Error::MalformedLine {
                    line: n + 1,
                    message: "empty query".into(),
                });
            }
            qrels.add(query.trim(), author.trim());
        }
        Ok(qrels)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::read(file)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (q, rel) in &self.queries {
            for a in rel {
                let _ = writeln!(out, "{q}\t{a}");
            }
        }
        out
    }

    pub fn queries(&self) -> impl Iterator<Item = (&str, &BTreeSet<String>)> {
        self.queries.iter().map(|(q, r)| (q.as_str(), r))
    }

    pub fn relevant(&self, query: &str) -> Option<&BTreeSet<String>> {
        self.queries.iter().find(|(q, _)| q == query).map(|(_, r)| r)
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }
}

/// Relevant authors among the first min(k, len) entries, divided by k.
pub fn precision_at_k<S: AsRef<str>>(ranked: &[S], relevant: &BTreeSet<String>, k: usize) -> f64 {
    assert!(k >= 1, "precision cutoff must be at least 1");
    let hits = ranked
        .iter()
        .take(k)
        .filter(|id| relevant.contains(id.as_ref()))
        .count();
    hits as f64 / k as f64
}

/// Sum of precision at every relevant position, over the number of
/// relevant authors (retrieved or not).
pub fn average_precision<S: AsRef<str>>(ranked: &[S], relevant: &BTreeSet<String>) -> Result<f64> {
    if relevant.is_empty() {
        return Err(Error::EmptyRelevant);
    }
    let mut hits = 0usize;
    let mut total = 0.0;
    for (i, id) in ranked.iter().enumerate() {
        if relevant.contains(id.as_ref()) {
            hits += 1;
            total += hits as f64 / (i + 1) as f64;
        }
    }
    Ok(total / relevant.len() as f64)
}

pub fn mean_average_precision(per_query: &[f64]) -> Result<f64> {
    if per_query.is_empty() {
        return Err(Error::EmptyScores);
    }
    Ok(per_query.iter().sum::<f64>() / per_query.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomizationMode {
    /// Exact enumeration up to [`EXACT_LIMIT`] queries, Monte Carlo above.
    Auto,
    Exact,
    MonteCarlo,
}

pub const EXACT_LIMIT: usize = 12;
const MAX_EXACT: usize = 24;
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomizationConfig {
    pub iterations: usize,
    pub seed: u64,
    pub mode: RandomizationMode,
    pub exec: Exec,
}

impl Default for RandomizationConfig {
    fn default() -> Self {
        RandomizationConfig {
            iterations: 10_000,
            seed: 0,
            mode: RandomizationMode::Auto,
            exec: Exec::default(),
        }
    }
}

/// Two-sided paired randomization test on |mean(a) − mean(b)| with the
/// default (auto) mode.
pub fn randomization_test(scores_a: &[f64], scores_b: &[f64], iterations: usize, seed: u64) -> Result<f64> {
    randomization_test_with(
        scores_a,
        scores_b,
        &RandomizationConfig {
            iterations,
            seed,
            ..Default::default()
        },
    )
}

pub fn randomization_test_with(scores_a: &[f64], scores_b: &[f64], config: &RandomizationConfig) -> Result<f64> {
    if scores_a.len() != scores_b.len() {
        return Err(Error::LengthMismatch {
            left: scores_a.len(),
            right: scores_b.len(),
        });
    }
    let n = scores_a.len();
    if n < 2 {
        return Err(Error::InvalidInput("randomization test needs at least 2 paired scores".into()));
    }
    let diffs: Vec<f64> = scores_a.iter().zip(scores_b).map(|(a, b)| a - b).collect();
    let observed = (diffs.iter().sum::<f64>() / n as f64).abs();
    // tolerate rounding when a permutation reproduces the observed value
    let threshold = observed - 1e-12 * observed.max(1.0);
    let stat = |flip: &dyn Fn(usize) -> bool| {
        let s: f64 = diffs
            .iter()
            .enumerate()
            .map(|(i, d)| if flip(i) { -d } else { *d })
            .sum();
        (s / n as f64).abs()
    };

    let exact = match config.mode {
        RandomizationMode::Exact => true,
        RandomizationMode::MonteCarlo => false,
        RandomizationMode::Auto => n <= EXACT_LIMIT,
    };
    if exact {
        if n > MAX_EXACT {
            return Err(Error::InvalidInput(format!("exact mode limited to {MAX_EXACT} queries")));
        }
        let patterns = 1usize << n;
        let chunks = patterns.div_ceil(CHUNK);
        let counts = config.exec.map_range(chunks, |c| {
            (c * CHUNK..((c + 1) * CHUNK).min(patterns))
                .filter(|&mask| stat(&|i| mask >> i & 1 == 1) >= threshold)
                .count()
        });
        return Ok(counts.iter().sum::<usize>() as f64 / patterns as f64);
    }

    if config.iterations == 0 {
        return Err(Error::InvalidInput("randomization test needs at least one iteration".into()));
    }
    let chunks = config.iterations.div_ceil(CHUNK);
    let counts = config.exec.map_range(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(c as u64);
        let len = CHUNK.min(config.iterations - c * CHUNK);
        let mut flips = vec![false; n];
        (0..len)
            .filter(|_| {
                for f in flips.iter_mut() {
                    *f = rng.random::<bool>();
                }
                stat(&|i| flips[i]) >= threshold
            })
            .count()
    });
    let hits: usize = counts.iter().sum();
    Ok((hits + 1) as f64 / (config.iterations + 1) as f64)
}

/// Metrics for one query.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryEval {
    pub query: String,
    pub ap: f64,
    /// P@5, P@10, P@15, P@20.
    pub precision: [f64; 4],
}

pub fn evaluate_ranking<S: AsRef<str>>(query: &str, ranked: &[S], relevant: &BTreeSet<String>) -> Result<QueryEval> {
    Ok(QueryEval {
        query: query.to_owned(),
        ap: average_precision(ranked, relevant)?,
        precision: PRECISION_CUTOFFS.map(|k| precision_at_k(ranked, relevant, k)),
    })
}

/// Per-query metrics plus their means, in query order.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<QueryEval>,
    pub map: f64,
    pub mean_precision: [f64; 4],
}

const REPORT_HEADER: &str = "query\tAP\tP@5\tP@10\tP@15\tP@20";

impl EvalReport {
    pub fn from_rows(rows: Vec<QueryEval>) -> Result<Self> {
        let aps: Vec<f64> = rows.iter().map(|r| r.ap).collect();
        let map = mean_average_precision(&aps)?;
        let n = rows.len() as f64;
        let mut mean_precision = [0.0; 4];
        for r in &rows {
            for (m, p) in mean_precision.iter_mut().zip(r.precision) {
                *m += p / n;
            }
        }
        Ok(EvalReport {
            rows,
            map,
            mean_precision,
        })
    }

    pub fn ap_by_query(&self) -> BTreeMap<&str, f64> {
        self.rows.iter().map(|r| (r.query.as_str(), r.ap)).collect()
    }

    /// Tab-separated table, one row per query and a closing MAP row.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        let mut row = |label: &str, ap: f64, p: &[f64; 4]| {
            let _ = writeln!(
                out,
                "{label}\t{ap:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
                p[0], p[1], p[2], p[3]
            );
        };
        for r in &self.rows {
            row(&r.query, r.ap, &r.precision);
        }
        row("MAP", self.map, &self.mean_precision);
        out
    }

    pub fn parse_tsv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty()).enumerate();
        match lines.next() {
            Some((_, h)) if h.trim_end() == REPORT_HEADER => {}
            _ => return Err(Error::InvalidInput("missing report header".into())),
        }
        let mut parsed = Vec::new();
        for (n, line) in lines {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 6 {
                return Err(Error::MalformedLine {
                    line: n + 1,
                    message: format!("expected 6 columns, found {}", cols.len()),
                });
            }
            let num = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| Error::MalformedLine {
                    line: n + 1,
                    message: e.to_string(),
                })
            };
            parsed.push(QueryEval {
                query: cols[0].to_owned(),
                ap: num(cols[1])?,
                precision: [num(cols[2])?, num(cols[3])?, num(cols[4])?, num(cols[5])?],
            });
        }
        match parsed.pop() {
            Some(last) if last.query == "MAP" => Ok(EvalReport {
                rows: parsed,
                map: last.ap,
                mean_precision: last.precision,
            }),
            _ => Err(Error::InvalidInput("report lacks a closing MAP row".into())),
        }
    }
}

/// Paired comparison of two reports over the same queries.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// (query, AP of A, AP of B) in A's query order.
    pub rows: Vec<(String, f64, f64)>,
    pub p_value: f64,
}

impl Comparison {
    pub fn significant(&self) -> bool {
        self.p_value < SIGNIFICANCE_LEVEL
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("query\tAP_a\tAP_b\tdelta\n");
        for (q, a, b) in &self.rows {
            let _ = writeln!(out, "{q}\t{a:.6}\t{b:.6}\t{:.6}", a - b);
        }
        let _ = write!(out, "p-value\t{:.6}", self.p_value);
        if self.significant() {
            out.push_str("\t*");
        }
        out.push('\n');
        out
    }
}

pub fn compare_reports(a: &EvalReport, b: &EvalReport, config: &RandomizationConfig) -> Result<Comparison> {
    let qa: BTreeSet<&str> = a.rows.iter().map(|r| r.query.as_str()).collect();
    let qb: BTreeSet<&str> = b.rows.iter().map(|r| r.query.as_str()).collect();
    if qa != qb {
        return Err(Error::QuerySetMismatch {
            only_a: qa.difference(&qb).map(|s| s.to_string()).collect(),
            only_b: qb.difference(&qa).map(|s| s.to_string()).collect(),
        });
    }
    let b_ap = b.ap_by_query();
    let rows: Vec<(String, f64, f64)> = a
        .rows
        .iter()
        .map(|r| (r.query.clone(), r.ap, b_ap[r.query.as_str()]))
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let p_value = randomization_test_with(&xs, &ys, config)?;
    Ok(Comparison { rows, p_value })
}
