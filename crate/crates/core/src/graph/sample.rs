use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{check_len, invalid, Result};
use crate::rng::{self, StreamRng};

use super::{Graph, Partition, SbmParams};

/// Draws a graph from the SBM with labels `x`.
///
/// Each of the three blocks (within `+`, within `-`, across) is sampled by
/// geometric gap skipping over its pair index, so the expected cost is
/// `O(n + m)` rather than `O(n^2)`.
pub fn sample_sbm(params: &SbmParams, x: &Partition, seed: u64) -> Result<Graph> {
    params.validate()?;
    check_len(params.n, x.len())?;
    let p_in = params.p_within();
    let p_out = params.p_across();
    for (name, p) in [("a/n", p_in), ("b/n", p_out)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid("params", format!("{name} = {p} is not a probability")));
        }
    }
    let plus: Vec<u32> = (0..x.len()).filter(|&i| x.label(i) == 1).map(|i| i as u32).collect();
    let minus: Vec<u32> = (0..x.len()).filter(|&i| x.label(i) == -1).map(|i| i as u32).collect();

    let mut rng = rng::stream(seed);
    let mut edges = Vec::new();
    within_block(&plus, p_in, &mut rng, &mut edges);
    within_block(&minus, p_in, &mut rng, &mut edges);
    across_block(&plus, &minus, p_out, &mut rng, &mut edges);
    edges.sort_unstable();
    Ok(Graph::from_canonical(params.n, edges))
}

/// Gap sampler over `0..len`: yields every index independently with
/// probability `p`.
struct Skipper {
    geometric: Option<Geometric>,
    next: u64,
    len: u64,
}

impl Skipper {
    fn new(p: f64, len: u64) -> Self {
        let geometric =
            if p <= 0.0 || len == 0 { None } else { Some(Geometric::new(p.min(1.0)).expect("p in (0, 1]")) };
        Self { geometric, next: 0, len }
    }

    fn advance(&mut self, rng: &mut StreamRng) -> Option<u64> {
        let geometric = self.geometric.as_ref()?;
        let gap = geometric.sample(rng);
        let idx = self.next.checked_add(gap)?;
        if idx >= self.len {
            self.geometric = None;
            return None;
        }
        self.next = idx + 1;
        Some(idx)
    }
}

fn push(edges: &mut Vec<(u32, u32)>, u: u32, v: u32) {
    edges.push((u.min(v), u.max(v)));
}

fn within_block(nodes: &[u32], p: f64, rng: &mut StreamRng, edges: &mut Vec<(u32, u32)>) {
    let k = nodes.len() as u64;
    if k < 2 {
        return;
    }
    let mut skipper = Skipper::new(p, k * (k - 1) / 2);
    // Walk the strict upper triangle row by row; `row_start` is the linear
    // index of pair (i, i+1).
    let (mut i, mut row_start) = (0u64, 0u64);
    while let Some(idx) = skipper.advance(rng) {
        while idx >= row_start + (k - 1 - i) {
            row_start += k - 1 - i;
            i += 1;
        }
        let j = i + 1 + (idx - row_start);
        push(edges, nodes[i as usize], nodes[j as usize]);
    }
}

fn across_block(left: &[u32], right: &[u32], p: f64, rng: &mut StreamRng, edges: &mut Vec<(u32, u32)>) {
    let cols = right.len() as u64;
    let mut skipper = Skipper::new(p, left.len() as u64 * cols);
    while let Some(idx) = skipper.advance(rng) {
        push(edges, left[(idx / cols) as usize], right[(idx % cols) as usize]);
    }
}

fn check_rate(name: &'static str, rate: f64, closed_top: bool) -> Result<()> {
    let ok = rate > 0.0 && (rate < 1.0 || (closed_top && rate == 1.0));
    if ok {
        Ok(())
    } else {
        let range = if closed_top { "(0, 1]" } else { "(0, 1)" };
        Err(invalid(name, format!("{rate} outside {range}")))
    }
}

/// Splits the edges of `g` into `(g1, rest)`: each edge goes to `g1`
/// independently with probability `eta`.
pub fn subsample_edges(g: &Graph, eta: f64, seed: u64) -> Result<(Graph, Graph)> {
    check_rate("eta", eta, false)?;
    let mut rng = rng::stream(seed);
    let (mut first, mut rest) = (Vec::new(), Vec::new());
    for &e in g.edges() {
        if rng.random_bool(eta) {
            first.push(e);
        } else {
            rest.push(e);
        }
    }
    Ok((Graph::from_canonical(g.n(), first), Graph::from_canonical(g.n(), rest)))
}

/// Keeps each edge independently with probability `rho`.
pub fn sparsify(g: &Graph, rho: f64, seed: u64) -> Result<Graph> {
    check_rate("rho", rho, true)?;
    if rho == 1.0 {
        return Ok(g.clone());
    }
    let mut rng = rng::stream(seed);
    let kept = g.edges().iter().copied().filter(|_| rng.random_bool(rho)).collect();
    Ok(Graph::from_canonical(g.n(), kept))
}
