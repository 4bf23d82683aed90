//! Two-sample test: did the latent partition change between `G` and `H`?

use crate::cut::t_statistic;
use crate::error::{check_len, invalid, Error, Result};
use crate::graph::{subsample_edges, Graph, Partition, SbmParams};
use crate::outcome::TestResult;
use crate::recovery::{spectral_partition, RecoverySettings};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TstConfig {
    /// Fraction of the edges of `G` used for recovery.
    pub eta: f64,
    pub kappa: f64,
    pub recovery: RecoverySettings,
    /// Target risk. Recorded in diagnostics; the threshold does not use it.
    pub delta: Option<f64>,
}

impl Default for TstConfig {
    fn default() -> Self {
        Self { eta: 0.85, kappa: 0.75, recovery: RecoverySettings::default(), delta: None }
    }
}

impl TstConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(invalid("eta", format!("{} is outside (0, 1)", self.eta)));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(invalid("kappa", "must be positive"));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d < 1.0) {
                return Err(invalid("delta", format!("{d} is outside (0, 1)")));
            }
        }
        self.recovery.validate()
    }
}

/// `kappa * sqrt(n (a + b) ln(6 n))`.
pub fn tst_threshold(n: usize, n_times_degree: f64, kappa: f64) -> f64 {
    let n = n as f64;
    kappa * (n_times_degree * (6.0 * n).ln()).sqrt()
}

/// The part of the test that depends only on `G`: the edge split, the
/// recovered partition and the statistic on the held-out edges.
#[derive(Debug, Clone)]
pub struct TstReference {
    pub estimate: Partition,
    pub held_out_t: i64,
    pub held_out_edges: usize,
    pub total_edges: usize,
    pub converged: bool,
    eta: f64,
}

impl TstReference {
    pub fn prepare(g: &Graph, config: &TstConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let (g1, rest) = subsample_edges(g, config.eta, rng::derive(seed, "tst-split", 0))?;
        let settings = config.recovery.with_seed(rng::derive(seed, "tst-recovery", 0));
        let recovery = spectral_partition(&g1, &settings)?;
        let held_out_t = t_statistic(&rest, &recovery.partition)?;
        Ok(Self {
            estimate: recovery.partition,
            held_out_t,
            held_out_edges: rest.edge_count(),
            total_edges: g.edge_count(),
            converged: recovery.converged,
            eta: config.eta,
        })
    }

    /// Compare against `H`. `params` fixes `n(a+b)`; without it the value is
    /// estimated from the edge counts of both graphs.
    pub fn test(&self, h: &Graph, params: Option<&SbmParams>, config: &TstConfig) -> Result<TestResult> {
        let n = self.estimate.len();
        check_len(n, h.n())?;
        let (scale, estimated) = match params {
            Some(p) => {
                check_len(n, p.n)?;
                if p.a + p.b <= 0.0 {
                    return Err(Error::UndefinedSnr);
                }
                (n as f64 * (p.a + p.b), false)
            }
            // E|E| = n(a+b)/4 - O(a+b) for a balanced partition.
            None => (2.0 * (self.total_edges + h.edge_count()) as f64, true),
        };
        let h_t = t_statistic(h, &self.estimate)?;
        let scaled = self.held_out_t as f64 / (1.0 - self.eta);
        let statistic = (scaled - h_t as f64).abs();
        let threshold = tst_threshold(n, scale, config.kappa);
        let mut result = TestResult::upper_tail(statistic, threshold)
            .with("t_g_held_out", self.held_out_t as f64)
            .with("t_h", h_t as f64)
            .with("n_a_plus_b", scale)
            .with("estimated", f64::from(u8::from(estimated)))
            .with("converged", f64::from(u8::from(self.converged)))
            .with("eta", self.eta);
        if let Some(d) = config.delta {
            result = result.with("delta", d);
        }
        Ok(result)
    }
}

pub fn two_sample_test(
    g: &Graph,
    h: &Graph,
    params: Option<&SbmParams>,
    config: &TstConfig,
    seed: u64,
) -> Result<TestResult> {
    check_len(g.n(), h.n())?;
    if let Some(p) = params {
        check_len(g.n(), p.n)?;
    }
    TstReference::prepare(g, config, seed)?.test(h, params, config)
}

/// Expected value of `T(G', xhat) - T(H, xhat)` when `G' ~ SBM(x)`,
/// `H ~ SBM(y)` with `d(x, y) = s`, and `xhat` has `k` errors placed uniformly.
pub fn expected_t_gap(n: usize, s: usize, k: usize, a: f64, b: f64) -> Result<f64> {
    if n < 2 {
        return Err(invalid("n", "must be at least 2"));
    }
    if 2 * s > n {
        return Err(Error::OutOfRange(format!("s = {s} exceeds n/2 = {}", n / 2)));
    }
    if 2 * k > n {
        return Err(Error::OutOfRange(format!("k = {k} exceeds n/2 = {}", n / 2)));
    }
    let (nf, sf, kf) = (n as f64, s as f64, k as f64);
    let agreement = (1.0 - 2.0 * kf / nf).powi(2) - 4.0 * kf * (nf - kf) / (nf * nf * (nf - 1.0));
    Ok((a - b) / nf * sf * (nf - sf) * agreement)
}
