use crate::error::{invalid, Result};
use crate::gof::{gof_test, GofConfig};
use crate::graph::{distortion, perturb_partition, sample_sbm, sparsify, PerturbMode, SbmParams};
use crate::parallel::{map_trials, Execution};
use crate::recovery::{spectral_partition, RecoverySettings};
use crate::rng;
use crate::tst::{TstConfig, TstReference};

use super::io::LabeledGraph;
use super::risk::Scheme;
use super::sweep::RiskRow;

/// Semi-synthetic experiment on a labelled graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetConfig {
    /// Edge-keeping rates.
    pub rhos: Vec<f64>,
    pub s: Vec<usize>,
    pub trials: usize,
    pub gof: GofConfig,
    pub tst: TstConfig,
    pub recovery: RecoverySettings,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        let recovery = RecoverySettings::default().with_tau(1.0);
        Self {
            rhos: vec![1.0],
            s: vec![],
            trials: 100,
            gof: GofConfig::default(),
            tst: TstConfig { recovery, ..TstConfig::default() },
            recovery,
        }
    }
}

/// One scheme at one `(rho, s)` point. `row.alpha` holds `rho`, and `a`, `b`
/// and `snr` describe the sparsified model.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRow {
    pub scheme: Scheme,
    pub row: RiskRow,
}

/// Runs all four schemes on `data` for every `(rho, s)` pair.
///
/// Goodness of fit tests the sparsified graph against the true labels (size)
/// and against labels with `s` random nodes flipped (power). The two-sample
/// tests compare the sparsified graph with sparsified SBM draws from the
/// true labels (size) and from the flipped labels (power), using parameters
/// estimated from `data`.
pub fn dataset_risk(
    data: &LabeledGraph,
    config: &DatasetConfig,
    seed: u64,
    execution: Execution,
) -> Result<Vec<DatasetRow>> {
    if config.trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    let est = data.estimate_params()?;
    let x = &data.labels;
    let n = data.graph.n();
    let mut rows = Vec::new();
    for &rho in &config.rhos {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(invalid("rho", format!("{rho} is outside (0, 1]")));
        }
        let sparse_params = SbmParams::new(n, rho * est.a, rho * est.b)?;
        let snr = sparse_params.snr().unwrap_or(0.0);
        for &s in &config.s {
            if s == 0 || 2 * s > n {
                return Err(invalid("s", format!("{s} is outside [1, n/2]")));
            }
            let cell = rng::derive(rng::derive(seed, "dataset", s as u64), "rho", rng::float_word(rho));
            let outcomes = map_trials(config.trials, execution, |i| -> Result<[(bool, bool); 4]> {
                let t = rng::derive(cell, "trial", i as u64);
                let y = perturb_partition(x, s, PerturbMode::RandomRelabel, rng::derive(t, "relabel", 0))?;
                let g = sparsify(&data.graph, rho, rng::derive(t, "sparsify", 0))?;

                let gof_null = gof_test(&g, x, &sparse_params, &config.gof)?.reject;
                let gof_alt = gof_test(&g, &y, &sparse_params, &config.gof)?.reject;

                let xhat = spectral_partition(&g, &config.recovery.with_seed(rng::derive(t, "recovery", 0)))?.partition;
                let half = s as f64 / 2.0;
                let naive_null = distortion(&xhat, x)? as f64 >= half;
                let naive_alt = distortion(&xhat, &y)? as f64 >= half;

                let g_null =
                    sparsify(&sample_sbm(&est, x, rng::derive(t, "graph", 1))?, rho, rng::derive(t, "sparsify", 1))?;
                let h =
                    sparsify(&sample_sbm(&est, &y, rng::derive(t, "graph", 2))?, rho, rng::derive(t, "sparsify", 2))?;
                let reference = TstReference::prepare(&g, &config.tst, rng::derive(t, "tst", 0))?;
                let tst_null = reference.test(&g_null, None, &config.tst)?.reject;
                let tst_alt = reference.test(&h, None, &config.tst)?.reject;

                let xg_null =
                    spectral_partition(&g_null, &config.recovery.with_seed(rng::derive(t, "recovery", 1)))?.partition;
                let xh = spectral_partition(&h, &config.recovery.with_seed(rng::derive(t, "recovery", 2)))?.partition;
                let ntst_null = distortion(&xhat, &xg_null)? as f64 >= half;
                let ntst_alt = distortion(&xhat, &xh)? as f64 >= half;

                Ok([(gof_null, !gof_alt), (naive_null, !naive_alt), (tst_null, !tst_alt), (ntst_null, !ntst_alt)])
            });
            let mut counts = [(0usize, 0usize); 4];
            for outcome in outcomes {
                for (c, (fa, md)) in counts.iter_mut().zip(outcome?) {
                    c.0 += usize::from(fa);
                    c.1 += usize::from(md);
                }
            }
            for (scheme, (fa, md)) in Scheme::ALL.into_iter().zip(counts) {
                rows.push(DatasetRow {
                    scheme,
                    row: RiskRow {
                        n,
                        a: sparse_params.a,
                        b: sparse_params.b,
                        alpha: rho,
                        snr,
                        s,
                        trials: config.trials,
                        fa: fa as f64 / config.trials as f64,
                        md: md as f64 / config.trials as f64,
                        seed: cell,
                    },
                });
            }
        }
    }
    Ok(rows)
}
