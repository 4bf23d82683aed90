//! Goodness-of-fit test: does the observed graph fit a proposed partition?
//!
//! For `a > b` the statistic is the number of edges across the cut of `x0`;
//! for `b > a` it is the number of edges within. Either way the test rejects
//! when the count exceeds its null mean plus a Bernstein fluctuation radius.

use crate::cut::{cut_counts, estimate_params};
use crate::error::{invalid, Error, Result};
use crate::graph::{distortion, Graph, Partition, SbmParams};
use crate::outcome::TestResult;
use crate::recovery::{spectral_partition, RecoverySettings};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GofConfig {
    /// Target risk.
    pub delta: f64,
    /// Multiplier of the `sqrt(n * min(a, b) * log(2/delta))` term.
    pub c_sqrt: f64,
    /// Multiplier of the `log(2/delta)` term.
    pub c_log: f64,
}

impl Default for GofConfig {
    fn default() -> Self {
        Self::with_delta(0.05)
    }
}

impl GofConfig {
    pub fn with_delta(delta: f64) -> Self {
        Self { delta, c_sqrt: (16.0f64 / 3.0).sqrt(), c_log: 16.0 / 3.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid("delta", format!("{} outside (0, 1)", self.delta)));
        }
        if [self.c_sqrt, self.c_log].iter().any(|c| c.is_nan() || *c <= 0.0) {
            return Err(invalid("c_sqrt/c_log", "must be positive"));
        }
        Ok(())
    }
}

pub fn gof_threshold(params: &SbmParams, config: &GofConfig) -> Result<f64> {
    config.validate()?;
    params.validate()?;
    let (a, b) = (params.a, params.b);
    if a == b {
        return Err(Error::NoSignal);
    }
    let n = params.n as f64;
    let log_term = (2.0 / config.delta).ln();
    let (center, small) = if a > b { (b * n / 4.0, b) } else { (a * n / 4.0 - a / 2.0, a) };
    let radius = (config.c_sqrt * (n * small * log_term).sqrt()).max(config.c_log * log_term);
    Ok(center + radius)
}

pub fn gof_test(g: &Graph, x0: &Partition, params: &SbmParams, config: &GofConfig) -> Result<TestResult> {
    if params.n != g.n() {
        return Err(Error::LengthMismatch { expected: params.n, actual: g.n() });
    }
    let threshold = gof_threshold(params, config)?;
    let counts = cut_counts(g, x0)?;
    let statistic = if params.a > params.b { counts.across } else { counts.within };
    let snr = params.snr().unwrap_or(0.0);
    Ok(TestResult::upper_tail(statistic as f64, threshold)
        .with("across", counts.across as f64)
        .with("within", counts.within as f64)
        .with("a", params.a)
        .with("b", params.b)
        .with("snr", snr)
        .with("estimated", 0.0))
}

/// GoF test with `(a, b)` estimated from the graph against `x0` itself.
pub fn gof_test_estimated(g: &Graph, x0: &Partition, config: &GofConfig) -> Result<TestResult> {
    let params = estimate_params(g, x0)?;
    let mut result = gof_test(g, x0, &params, config)?;
    if let Some(slot) = result.diagnostics.iter_mut().find(|(k, _)| k == "estimated") {
        slot.1 = 1.0;
    }
    Ok(result)
}

/// Recover-and-compare baseline: reject iff `d(x0, x_hat) >= s/2`.
pub fn naive_gof(g: &Graph, x0: &Partition, s: usize, settings: &RecoverySettings) -> Result<TestResult> {
    if s == 0 {
        return Err(invalid("s", "must be at least 1"));
    }
    let recovered = spectral_partition(g, settings)?;
    let d = distortion(x0, &recovered.partition)?;
    Ok(TestResult::at_least(d as f64, s as f64 / 2.0)
        .with("converged", f64::from(u8::from(recovered.converged)))
        .with("iterations", recovered.iterations as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{perturb_partition, sample_sbm, PerturbMode};
    use crate::rng;

    #[test]
    fn threshold_example() {
        let params = SbmParams::new(1000, 15.0, 5.0).unwrap();
        let t = gof_threshold(&params, &GofConfig::with_delta(0.01)).unwrap();
        let expected = 1250.0 + ((16.0 / 3.0) * 5000.0 * 200f64.ln()).sqrt();
        assert!((t - expected).abs() < 1e-9);
        assert!((t - 1625.9).abs() < 0.1);
    }

    #[test]
    fn disassortative_branch() {
        let params = SbmParams::new(100, 2.0, 6.0).unwrap();
        let cfg = GofConfig::with_delta(0.1);
        let l = (20.0f64).ln();
        let expected = 2.0 * 100.0 / 4.0 - 1.0 + (cfg.c_sqrt * (200.0 * l).sqrt()).max(cfg.c_log * l);
        assert!((gof_threshold(&params, &cfg).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn threshold_errors() {
        let params = SbmParams::new(100, 5.0, 5.0).unwrap();
        assert!(matches!(gof_threshold(&params, &GofConfig::default()), Err(Error::NoSignal)));
        let ok = SbmParams::new(100, 6.0, 5.0).unwrap();
        assert!(gof_threshold(&ok, &GofConfig::with_delta(1.0)).is_err());
        assert!(gof_threshold(&ok, &GofConfig::with_delta(0.0)).is_err());
    }

    #[test]
    fn threshold_monotonicity() {
        let cfg = GofConfig::with_delta(0.05);
        let base = gof_threshold(&SbmParams::new(1000, 15.0, 5.0).unwrap(), &cfg).unwrap();
        assert!(gof_threshold(&SbmParams::new(2000, 15.0, 5.0).unwrap(), &cfg).unwrap() > base);
        assert!(gof_threshold(&SbmParams::new(1000, 15.0, 6.0).unwrap(), &cfg).unwrap() > base);
        let deltas = [0.001, 0.01, 0.1, 0.5, 0.9, 0.999];
        let ts: Vec<f64> = deltas
            .iter()
            .map(|&d| gof_threshold(&SbmParams::new(1000, 15.0, 5.0).unwrap(), &GofConfig::with_delta(d)).unwrap())
            .collect();
        assert!(ts.windows(2).all(|w| w[0] > w[1]));
        assert!(ts.iter().all(|&t| t > 1250.0));
    }

    #[test]
    fn empty_graph_accepts() {
        let params = SbmParams::new(100, 15.0, 5.0).unwrap();
        let r = gof_test(&Graph::empty(100), &Partition::halves(100), &params, &GofConfig::default()).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(!r.reject);
    }

    #[test]
    fn decision_is_sign_invariant() {
        let params = SbmParams::new(200, 15.0, 5.0).unwrap();
        let x = Partition::halves(200);
        let y = perturb_partition(&x, 40, PerturbMode::Shift, 0).unwrap();
        for seed in 0..5 {
            let g = sample_sbm(&params, &y, seed).unwrap();
            let r1 = gof_test(&g, &x, &params, &GofConfig::default()).unwrap();
            let r2 = gof_test(&g, &x.negated(), &params, &GofConfig::default()).unwrap();
            assert_eq!(r1, r2);
        }
    }

    #[test]
    fn alternate_mean_shift() {
        // E[across | y] - bn/4 = s(n - s)(a - b) / (2n) exactly for the shift construction.
        let (n, s) = (100usize, 20usize);
        let params = SbmParams::new(n, 15.0, 5.0).unwrap();
        let x = Partition::halves(n);
        let y = perturb_partition(&x, s, PerturbMode::Shift, 0).unwrap();
        let trials = 4000u64;
        let samples: Vec<f64> = (0..trials)
            .map(|t| {
                let g = sample_sbm(&params, &y, rng::derive(3, "alt", t)).unwrap();
                cut_counts(&g, &x).unwrap().across as f64
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / trials as f64;
        let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0);
        let se = (var / trials as f64).sqrt();
        let shift = (s * (n - s)) as f64 * (params.a - params.b) / (2.0 * n as f64);
        let null_mean = params.b * n as f64 / 4.0;
        assert!((mean - (null_mean + shift)).abs() < 4.0 * se, "mean {mean}");
    }

    #[test]
    fn estimated_variant_flags_itself() {
        let params = SbmParams::new(400, 15.0, 5.0).unwrap();
        let x = Partition::halves(400);
        let g = sample_sbm(&params, &x, 1).unwrap();
        let r = gof_test_estimated(&g, &x, &GofConfig::default()).unwrap();
        assert_eq!(r.diagnostic("estimated"), Some(1.0));
    }

    #[test]
    fn naive_on_disjoint_cliques() {
        let n = 10;
        let x = Partition::halves(n);
        let g = Graph::from_edges(
            n,
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| x.label(u) == x.label(v)),
        )
        .unwrap();
        let settings = RecoverySettings::default();
        assert!(!naive_gof(&g, &x, 2, &settings).unwrap().reject);
        let far = perturb_partition(&x, 5, PerturbMode::RandomRelabel, 3).unwrap();
        assert!(naive_gof(&g, &far, 5, &settings).unwrap().reject);
        assert!(naive_gof(&g, &x, 0, &settings).is_err());
    }
}
