//! Citation-based author impact indices: h, g, a, e, contemporary, trend
//! and individual h.

use std::cmp::Reverse;

/// What the indices need to know about one paper of an author.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PaperImpact {
    pub citations: u32,
    pub year: i32,
    pub author_count: u32,
    /// Publication year of every citing paper.
    pub citing_years: Vec<i32>,
}

/// Age weighting for the contemporary and trend h-indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpactParams {
    pub gamma: f64,
    pub delta: f64,
}

impl Default for ImpactParams {
    fn default() -> Self {
        ImpactParams {
            gamma: 4.0,
            delta: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BibliometricIndices {
    pub h: u32,
    pub h_topic: u32,
    pub contemporary_h: u32,
    pub trend_h: u32,
    pub individual_h: f64,
    pub g: u32,
    pub a: f64,
    pub e: f64,
}

/// Largest h such that at least h scores are >= h.
pub fn h_from_scores(scores: &[f64]) -> u32 {
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted
        .iter()
        .enumerate()
        .take_while(|&(i, &s)| s >= (i + 1) as f64)
        .count() as u32
}

pub fn h_index(citation_counts: &[u32]) -> u32 {
    let mut sorted = citation_counts.to_vec();
    sorted.sort_unstable_by_key(|&c| Reverse(c));
    sorted
        .iter()
        .enumerate()
        .take_while(|&(i, &c)| c as usize > i)
        .count() as u32
}

/// Largest g (at most the number of papers) whose top-g citations sum to at
/// least g².
pub fn g_index(citation_counts: &[u32]) -> u32 {
    let mut sorted = citation_counts.to_vec();
    sorted.sort_unstable_by_key(|&c| Reverse(c));
    let mut total = 0u64;
    let mut g = 0;
    for (i, &c) in sorted.iter().enumerate() {
        total += c as u64;
        let rank = (i + 1) as u64;
        if total >= rank * rank {
            g = rank as u32;
        }
    }
    g
}

/// Citation counts of the h-core, most cited first.
fn h_core(citation_counts: &[u32]) -> Vec<u32> {
    let mut sorted = citation_counts.to_vec();
    sorted.sort_unstable_by_key(|&c| Reverse(c));
    let h = h_index(citation_counts) as usize;
    sorted.truncate(h);
    sorted
}

/// Mean citations over the h-core.
pub fn a_index(citation_counts: &[u32]) -> f64 {
    let core = h_core(citation_counts);
    if core.is_empty() {
        return 0.0;
    }
    core.iter().map(|&c| c as f64).sum::<f64>() / core.len() as f64
}

/// Square root of the h-core citations in excess of h².
pub fn e_index(citation_counts: &[u32]) -> f64 {
    let core = h_core(citation_counts);
    let h = core.len() as f64;
    let excess = core.iter().map(|&c| c as f64).sum::<f64>() - h * h;
    excess.max(0.0).sqrt()
}

fn age_weight(now_year: i32, year: i32, params: ImpactParams) -> f64 {
    let age = (now_year - year + 1).max(1) as f64;
    age.powf(-params.delta)
}

pub fn contemporary_h_index(papers: &[PaperImpact], now_year: i32, params: ImpactParams) -> u32 {
    let scores: Vec<f64> = papers
        .iter()
        .map(|p| params.gamma * age_weight(now_year, p.year, params) * p.citations as f64)
        .collect();
    h_from_scores(&scores)
}

pub fn trend_h_index(papers: &[PaperImpact], now_year: i32, params: ImpactParams) -> u32 {
    let scores: Vec<f64> = papers
        .iter()
        .map(|p| {
            params.gamma
                * p.citing_years
                    .iter()
                    .map(|&y| age_weight(now_year, y, params))
                    .sum::<f64>()
        })
        .collect();
    h_from_scores(&scores)
}

/// h² divided by the total number of author slots on the h-core papers.
/// Ties at the h-core boundary keep input order.
pub fn individual_h_index(papers: &[PaperImpact]) -> f64 {
    let counts: Vec<u32> = papers.iter().map(|p| p.citations).collect();
    let h = h_index(&counts) as usize;
    if h == 0 {
        return 0.0;
    }
    let mut order: Vec<usize> = (0..papers.len()).collect();
    order.sort_by_key(|&i| Reverse(papers[i].citations));
    let slots: u32 = order[..h].iter().map(|&i| papers[i].author_count.max(1)).sum();
    (h * h) as f64 / slots as f64
}

/// All indices for one author. `topic` flags which papers contain a query
/// term and drives the query-conditioned h-index.
pub fn compute_indices(
    papers: &[PaperImpact],
    topic: &[bool],
    now_year: i32,
    params: ImpactParams,
) -> BibliometricIndices {
    let counts: Vec<u32> = papers.iter().map(|p| p.citations).collect();
    let topic_counts: Vec<u32> = papers
        .iter()
        .zip(topic)
        .filter(|(_, &t)| t)
        .map(|(p, _)| p.citations)
        .collect();
    BibliometricIndices {
        h: h_index(&counts),
        h_topic: h_index(&topic_counts),
        contemporary_h: contemporary_h_index(papers, now_year, params),
        trend_h: trend_h_index(papers, now_year, params),
        individual_h: individual_h_index(papers),
        g: g_index(&counts),
        a: a_index(&counts),
        e: e_index(&counts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_examples() {
        assert_eq!(h_index(&[]), 0);
        assert_eq!(h_index(&[10, 8, 5, 4, 3]), 4);
        assert_eq!(h_index(&[1, 1, 1]), 1);
        assert_eq!(h_index(&[0, 0]), 0);
        assert_eq!(h_from_scores(&[10.0, 8.0, 5.0, 4.0, 3.0]), 4);
    }

    #[test]
    fn a_and_e_on_h_core() {
        let counts = [10, 8, 5, 4];
        assert_eq!(h_index(&counts), 4);
        assert!((a_index(&counts) - 6.75).abs() < 1e-12);
        assert!((e_index(&counts) - 11f64.sqrt()).abs() < 1e-12);
        assert!((e_index(&counts) - 3.3166).abs() < 1e-4);
        assert_eq!(e_index(&[3, 3, 3]), 0.0);
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_index(&[1, 1, 1]), 1);
        assert_eq!(g_index(&[]), 0);
        assert_eq!(g_index(&[10, 8, 5, 4, 3]), 5);
    }

    #[test]
    fn individual_h_single_author() {
        let papers: Vec<PaperImpact> = [5, 4, 3, 1]
            .iter()
            .map(|&c| PaperImpact {
                citations: c,
                author_count: 1,
                ..Default::default()
            })
            .collect();
        assert_eq!(individual_h_index(&papers), 3.0);
    }

    #[test]
    fn contemporary_decays_with_age() {
        let p = |citations, year| PaperImpact {
            citations,
            year,
            author_count: 1,
            citing_years: vec![],
        };
        // scores 4*10/1 = 40 and 4*10/11 ≈ 3.6
        assert_eq!(contemporary_h_index(&[p(10, 2010), p(10, 2000)], 2010, ImpactParams::default()), 2);
        assert_eq!(contemporary_h_index(&[p(1, 2000), p(1, 2000)], 2010, ImpactParams::default()), 0);
    }

    #[test]
    fn no_citations_gives_zero_indices() {
        let papers = vec![PaperImpact { year: 2000, author_count: 2, ..Default::default() }; 3];
        let idx = compute_indices(&papers, &[true, false, true], 2005, ImpactParams::default());
        assert_eq!(idx, BibliometricIndices::default());
    }
}
