//! Profile sensor: the shape of a candidate's publication record.
//!
//! `.topic` events only look at publications containing a query term;
//! `.all` events look at the whole record.

use std::collections::BTreeSet;

use crate::corpus::{DocId, Index, Query};
use crate::error::Result;
use crate::parallel::Exec;

use super::{EventScoreTable, QueryContext, SensorKind};

pub const PROFILE_EVENTS: [&str; 18] = [
    "profile.pubs.topic",
    "profile.pubs.all",
    "profile.journals.topic",
    "profile.journals.all",
    "profile.years_since_first_pub.topic",
    "profile.years_since_first_pub.all",
    "profile.years_since_first_journal.topic",
    "profile.years_since_first_journal.all",
    "profile.years_since_last_pub.topic",
    "profile.years_since_last_pub.all",
    "profile.years_since_last_journal.topic",
    "profile.years_since_last_journal.all",
    "profile.span_pub.topic",
    "profile.span_pub.all",
    "profile.span_journal.topic",
    "profile.span_journal.all",
    "profile.pubs_per_year",
    "profile.journals_per_year",
];

/// Career statistics over one set of publication years.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct YearStats {
    pub count: usize,
    pub years_since_first: f64,
    pub years_since_last: f64,
    pub span: f64,
    /// count / (span + 1); zero for an empty record.
    pub per_year: f64,
}

impl YearStats {
    pub fn from_years(years: impl IntoIterator<Item = i32>, now_year: i32) -> Self {
        let years: Vec<i32> = years.into_iter().collect();
        let (Some(&first), Some(&last)) = (years.iter().min(), years.iter().max()) else {
            return YearStats::default();
        };
        let span = (last - first) as f64;
        YearStats {
            count: years.len(),
            years_since_first: (now_year - first).max(0) as f64,
            years_since_last: (now_year - last).max(0) as f64,
            span,
            per_year: years.len() as f64 / (span + 1.0),
        }
    }
}

pub(crate) fn profile_row(ctx: &QueryContext<'_>, author: &str) -> Vec<f64> {
    let index = ctx.index;
    let now = index.now_year();
    let all: &[DocId] = index.author_pubs(author);
    let years = |docs: &mut dyn Iterator<Item = &DocId>, journals_only: bool| {
        let ys: Vec<i32> = docs
            .map(|&d| index.doc(d))
            .filter(|p| !journals_only || p.is_journal())
            .map(|p| p.year)
            .collect();
        YearStats::from_years(ys, now)
    };
    let pubs_all = years(&mut all.iter(), false);
    let pubs_topic = years(&mut all.iter().filter(|&&d| ctx.is_matched(d)), false);
    let jour_all = years(&mut all.iter(), true);
    let jour_topic = years(&mut all.iter().filter(|&&d| ctx.is_matched(d)), true);

    vec![
        pubs_topic.count as f64,
        pubs_all.count as f64,
        jour_topic.count as f64,
        jour_all.count as f64,
        pubs_topic.years_since_first,
        pubs_all.years_since_first,
        jour_topic.years_since_first,
        jour_all.years_since_first,
        pubs_topic.years_since_last,
        pubs_all.years_since_last,
        jour_topic.years_since_last,
        jour_all.years_since_last,
        pubs_topic.span,
        pubs_all.span,
        jour_topic.span,
        jour_all.span,
        pubs_all.per_year,
        jour_all.per_year,
    ]
}

pub fn extract_profile_events(
    index: &Index,
    q: &Query,
    candidates: &BTreeSet<String>,
) -> Result<EventScoreTable> {
    let ctx = QueryContext::new(index, q);
    super::extract(SensorKind::Profile, &ctx, candidates, Exec::default())
}
