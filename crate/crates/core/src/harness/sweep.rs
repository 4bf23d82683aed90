use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gof::GofConfig;
use crate::graph::{params_from_snr, SbmParams};
use crate::parallel::Execution;
use crate::recovery::RecoverySettings;
use crate::rng;
use crate::tst::TstConfig;

use super::risk::{estimate_risk, Scheme, SchemeConfig};

pub const RISK_CSV_HEADER: &str = "scheme,n,a,b,alpha,snr,s,M,fa,md,risk,seed";

/// A grid over SNR multipliers and change sizes, read from TOML.
///
/// ```toml
/// n = 1000
/// ratio = 0.3333333333333333   # b / a
/// alphas = [1, 2, 5, 10]
/// s = [10, 50, 100, 250]
/// trials = 100
/// schemes = ["gof", "naive-gof", "tst", "naive-tst"]
/// delta = 0.01                 # gof risk target
/// ```
///
/// Optional keys: `lambda0` (default `0.75 ln(n/100)`), `eta`, `kappa`,
/// `tau`, `tol`, `max_iters`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub n: usize,
    pub ratio: f64,
    #[serde(default)]
    pub lambda0: Option<f64>,
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub s: Vec<usize>,
    pub trials: usize,
    #[serde(default = "all_schemes")]
    pub schemes: Vec<String>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

fn all_schemes() -> Vec<String> {
    Scheme::ALL.iter().map(|s| s.name().to_string()).collect()
}

fn default_delta() -> f64 {
    GofConfig::default().delta
}

fn default_eta() -> f64 {
    TstConfig::default().eta
}

fn default_kappa() -> f64 {
    TstConfig::default().kappa
}

fn default_tol() -> f64 {
    RecoverySettings::default().tol
}

fn default_max_iters() -> usize {
    RecoverySettings::default().max_iters
}

impl SweepSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0.unwrap_or_else(|| 0.75 * (self.n as f64 / 100.0).ln())
    }

    pub fn scheme_list(&self) -> Result<Vec<Scheme>> {
        self.schemes.iter().map(|s| s.parse()).collect()
    }

    pub fn scheme_config(&self) -> SchemeConfig {
        let recovery = RecoverySettings { tau: self.tau, max_iters: self.max_iters, tol: self.tol, seed: 0 };
        SchemeConfig {
            gof: GofConfig::with_delta(self.delta),
            tst: TstConfig { eta: self.eta, kappa: self.kappa, recovery, delta: None },
            recovery,
        }
    }

    /// Seed of one grid cell, independent of the order cells are visited in.
    pub fn cell_seed(top: u64, scheme: Scheme, s: usize, alpha: f64) -> u64 {
        rng::derive(rng::derive(top, scheme.name(), s as u64), "alpha", rng::float_word(alpha))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskRow {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub snr: f64,
    pub s: usize,
    pub trials: usize,
    pub fa: f64,
    pub md: f64,
    pub seed: u64,
}

impl RiskRow {
    pub fn risk(&self) -> f64 {
        self.fa + self.md
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskGrid {
    pub scheme: String,
    pub rows: Vec<RiskRow>,
}

impl RiskGrid {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(RISK_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                self.scheme,
                r.n,
                r.a,
                r.b,
                r.alpha,
                r.snr,
                r.s,
                r.trials,
                r.fa,
                r.md,
                r.risk(),
                r.seed
            ));
        }
        out
    }
}

/// A cell that could not be evaluated, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedCell {
    pub scheme: String,
    pub alpha: f64,
    pub s: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub grids: Vec<RiskGrid>,
    pub skipped: Vec<SkippedCell>,
}

/// Runs every (scheme, alpha, s) cell. Rows follow the sweep file order: alphas in
/// the outer loop, change sizes in the inner loop.
pub fn grid_sweep(spec: &SweepSpec, seed: u64, execution: Execution) -> Result<SweepOutput> {
    if spec.trials == 0 {
        return Err(Error::Spec("trials must be at least 1".into()));
    }
    let schemes = spec.scheme_list()?;
    let config = spec.scheme_config();
    let lambda0 = spec.lambda0();
    let mut grids = Vec::new();
    let mut skipped = Vec::new();
    for scheme in schemes {
        let mut rows = Vec::new();
        for &alpha in &spec.alphas {
            let params: Result<SbmParams> = params_from_snr(spec.n, alpha * lambda0, spec.ratio);
            for &s in &spec.s {
                let cell_seed = SweepSpec::cell_seed(seed, scheme, s, alpha);
                let outcome = params.as_ref().map_err(|e| e.to_string()).and_then(|p| {
                    estimate_risk(scheme, p, s, &config, spec.trials, cell_seed, execution)
                        .map(|r| (*p, r))
                        .map_err(|e| e.to_string())
                });
                match outcome {
                    Ok((p, r)) => rows.push(RiskRow {
                        n: p.n,
                        a: p.a,
                        b: p.b,
                        alpha,
                        snr: alpha * lambda0,
                        s,
                        trials: r.trials,
                        fa: r.fa,
                        md: r.md,
                        seed: cell_seed,
                    }),
                    Err(reason) => skipped.push(SkippedCell { scheme: scheme.name().to_string(), alpha, s, reason }),
                }
            }
        }
        grids.push(RiskGrid { scheme: scheme.name().to_string(), rows });
    }
    Ok(SweepOutput { grids, skipped })
}

/// Writes `<dir>/<scheme>.csv` for each grid and returns the paths.
pub fn write_risk_csv(dir: &Path, grids: &[RiskGrid]) -> Result<Vec<PathBuf>> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut paths = Vec::new();
    for grid in grids {
        let path = dir.join(format!("{}.csv", grid.scheme));
        let mut file = fs::File::create(&path).map_err(io_err(&path))?;
        file.write_all(grid.to_csv().as_bytes()).map_err(io_err(&path))?;
        paths.push(path);
    }
    Ok(paths)
}
