//! PageRank by power iteration over the citation graph.

use crate::corpus::CitationGraph;
use crate::error::{Error, Result};
use crate::parallel::Exec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankParams {
    pub damping: f64,
    /// Stop once the L1 change between iterations drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams {
            damping: 0.85,
            tolerance: 1e-8,
            max_iterations: 100,
        }
    }
}

/// Scores indexed by document id. Rank held by documents that cite nothing
/// is spread uniformly over all documents. The result sums to one.
pub fn pagerank(graph: &CitationGraph, params: PageRankParams, exec: Exec) -> Result<Vec<f64>> {
    if !(params.damping > 0.0 && params.damping < 1.0) {
        return Err(Error::InvalidInput(format!(
            "damping {} outside (0, 1)",
            params.damping
        )));
    }
    let n = graph.node_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    let d = params.damping;
    let inv_n = 1.0 / n as f64;
    let out_degree: Vec<usize> = (0..n)
        .map(|i| graph.cites(crate::corpus::DocId(i as u32)).len())
        .collect();
    let mut rank = vec![inv_n; n];
    for _ in 0..params.max_iterations {
        let dangling: f64 = rank
            .iter()
            .zip(&out_degree)
            .filter(|(_, &deg)| deg == 0)
            .map(|(r, _)| r)
            .sum();
        let base = (1.0 - d) * inv_n + d * dangling * inv_n;
        let prev = &rank;
        let mut next = exec.map_range(n, |v| {
            let inflow: f64 = graph
                .cited_by(crate::corpus::DocId(v as u32))
                .iter()
                .map(|u| prev[u.index()] / out_degree[u.index()] as f64)
                .sum();
            base + d * inflow
        });
        let total: f64 = next.iter().sum();
        for x in &mut next {
            *x /= total;
        }
        let change: f64 = next.iter().zip(&rank).map(|(a, b)| (a - b).abs()).sum();
        rank = next;
        if change < params.tolerance {
            break;
        }
    }
    Ok(rank)
}
