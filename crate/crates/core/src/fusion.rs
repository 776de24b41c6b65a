//! Rank aggregation inside one sensor.
//!
//! All three methods read the normalized event columns of an
//! [`EventScoreTable`] and return a [`RankedList`] over exactly the table's
//! candidates.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::parallel::Exec;
use crate::sensors::EventScoreTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FusionMethod {
    CombSum,
    Borda,
    Condorcet,
}

impl FusionMethod {
    pub const ALL: [FusionMethod; 3] = [FusionMethod::CombSum, FusionMethod::Borda, FusionMethod::Condorcet];

    pub fn name(self) -> &'static str {
        match self {
            FusionMethod::CombSum => "combsum",
            FusionMethod::Borda => "borda",
            FusionMethod::Condorcet => "condorcet",
        }
    }
}

impl fmt::Display for FusionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FusionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "combsum" => Ok(FusionMethod::CombSum),
            "borda" => Ok(FusionMethod::Borda),
            "condorcet" => Ok(FusionMethod::Condorcet),
            other => Err(Error::InvalidInput(format!("unknown fusion method `{other}`"))),
        }
    }
}

/// Candidates ordered by decreasing score; equal scores ascend by id
/// (Condorcet lists break equal win counts on losses first).
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub entries: Vec<(String, f64)>,
    pub method: FusionMethod,
}

impl RankedList {
    /// Orders `(id, score)` pairs by score descending, then id ascending.
    pub fn from_scores(method: FusionMethod, mut entries: Vec<(String, f64)>) -> Self {
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        RankedList { entries, method }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(id, _)| id.as_str())
    }

    pub fn score_of(&self, id: &str) -> Option<f64> {
        self.entries.iter().find(|(c, _)| c == id).map(|(_, s)| *s)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.entries.iter().position(|(c, _)| c == id)
    }

    pub fn truncated(mut self, depth: usize) -> Self {
        self.entries.truncate(depth);
        self
    }
}

/// Sum of normalized event scores.
pub fn combsum(table: &EventScoreTable) -> RankedList {
    let entries = table
        .candidates()
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), table.normalized_row(i).iter().sum()))
        .collect();
    RankedList::from_scores(FusionMethod::CombSum, entries)
}

/// Borda points for one column: the best candidate earns N, the next N-1
/// and so on; tied candidates share the mean of the points they span.
pub fn borda_points(column: &[f64]) -> Vec<f64> {
    let n = column.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| column[b].total_cmp(&column[a]));
    let mut points = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && column[order[end]] == column[order[start]] {
            end += 1;
        }
        // positions start+1..=end earn n-start .. n-end+1 points
        let mean = ((n - start) + (n - end + 1)) as f64 / 2.0;
        for &i in &order[start..end] {
            points[i] = mean;
        }
        start = end;
    }
    points
}

pub fn borda_fuse(table: &EventScoreTable) -> RankedList {
    let mut totals = vec![0.0; table.num_candidates()];
    for e in 0..table.num_events() {
        for (t, p) in totals.iter_mut().zip(borda_points(&table.normalized_column(e))) {
            *t += p;
        }
    }
    let entries = table.candidates().iter().cloned().zip(totals).collect();
    RankedList::from_scores(FusionMethod::Borda, entries)
}

/// Pairwise majority tallies for every candidate, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CondorcetTally {
    pub wins: usize,
    pub losses: usize,
}

/// `a` beats `b` when it is strictly above `b` in more columns than the
/// reverse; column ties count for neither side.
pub fn condorcet_tally(table: &EventScoreTable, exec: Exec) -> Vec<CondorcetTally> {
    let n = table.num_candidates();
    exec.map_range(n, |a| {
        let row_a = table.normalized_row(a);
        let mut tally = CondorcetTally::default();
        for b in (0..n).filter(|&b| b != a) {
            let row_b = table.normalized_row(b);
            let (mut above, mut below) = (0usize, 0usize);
            for (x, y) in row_a.iter().zip(row_b) {
                match x.partial_cmp(y) {
                    Some(Ordering::Greater) => above += 1,
                    Some(Ordering::Less) => below += 1,
                    _ => {}
                }
            }
            match above.cmp(&below) {
                Ordering::Greater => tally.wins += 1,
                Ordering::Less => tally.losses += 1,
                Ordering::Equal => {}
            }
        }
        tally
    })
}

/// Orders by wins descending, losses ascending, then id. The reported
/// score is the win count.
pub fn condorcet_fuse(table: &EventScoreTable) -> RankedList {
    condorcet_fuse_with(table, Exec::default())
}

pub fn condorcet_fuse_with(table: &EventScoreTable, exec: Exec) -> RankedList {
    let tallies = condorcet_tally(table, exec);
    let mut order: Vec<usize> = (0..table.num_candidates()).collect();
    let ids = table.candidates();
    order.sort_by(|&a, &b| {
        tallies[b]
            .wins
            .cmp(&tallies[a].wins)
            .then(tallies[a].losses.cmp(&tallies[b].losses))
            .then_with(|| ids[a].cmp(&ids[b]))
    });
    RankedList {
        entries: order
            .into_iter()
            .map(|i| (ids[i].clone(), tallies[i].wins as f64))
            .collect(),
        method: FusionMethod::Condorcet,
    }
}

pub fn fuse(method: FusionMethod, table: &EventScoreTable) -> RankedList {
    fuse_with(method, table, Exec::default())
}

pub fn fuse_with(method: FusionMethod, table: &EventScoreTable, exec: Exec) -> RankedList {
    match method {
        FusionMethod::CombSum => combsum(table),
        FusionMethod::Borda => borda_fuse(table),
        FusionMethod::Condorcet => condorcet_fuse_with(table, exec),
    }
}
