//! Edge counts across and within a cut, and the signed cut statistic.

use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::graph::{Graph, Partition, SbmParams};

/// Edge counts relative to a partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CutCounts {
    pub across: u64,
    pub within: u64,
}

impl CutCounts {
    pub fn total(&self) -> u64 {
        self.across + self.within
    }
}

pub fn cut_counts(g: &Graph, x: &Partition) -> Result<CutCounts> {
    check_len(g.n(), x.len())?;
    let labels = x.labels();
    let across = g.edges().iter().filter(|&&(u, v)| labels[u as usize] != labels[v as usize]).count() as u64;
    Ok(CutCounts { across, within: g.edge_count() as u64 - across })
}

/// `within - across`, i.e. the sum of `x_u x_v` over edges.
pub fn t_statistic(g: &Graph, x: &Partition) -> Result<i64> {
    let c = cut_counts(g, x)?;
    Ok(c.within as i64 - c.across as i64)
}

/// Plug-in estimates of `(a, b)` from edge densities within and across the
/// communities of `x`, using the actual community sizes.
pub fn estimate_params(g: &Graph, x: &Partition) -> Result<SbmParams> {
    let counts = cut_counts(g, x)?;
    let (plus, minus) = x.sizes();
    if plus == 0 || minus == 0 {
        return Err(Error::SingleCommunity);
    }
    let n = g.n() as f64;
    let pairs2 = |k: usize| (k * k.saturating_sub(1) / 2) as f64;
    let within_pairs = pairs2(plus) + pairs2(minus);
    let across_pairs = (plus * minus) as f64;
    let a = if within_pairs > 0.0 { n * counts.within as f64 / within_pairs } else { 0.0 };
    let b = n * counts.across as f64 / across_pairs;
    SbmParams::new(g.n(), a, b)
}
