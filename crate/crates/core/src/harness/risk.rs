use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::gof::{gof_test, naive_gof, GofConfig};
use crate::graph::{distortion, perturb_partition, sample_sbm, Partition, PerturbMode, SbmParams};
use crate::parallel::{map_trials, Execution};
use crate::recovery::{spectral_partition, RecoverySettings};
use crate::rng;
use crate::tst::{TstConfig, TstReference};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Gof,
    NaiveGof,
    Tst,
    NaiveTst,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Gof, Scheme::NaiveGof, Scheme::Tst, Scheme::NaiveTst];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Gof => "gof",
            Scheme::NaiveGof => "naive-gof",
            Scheme::Tst => "tst",
            Scheme::NaiveTst => "naive-tst",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| Error::Spec(format!("unknown scheme {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SchemeConfig {
    pub gof: GofConfig,
    pub tst: TstConfig,
    /// Used by the naive schemes.
    pub recovery: RecoverySettings,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskEstimate {
    pub fa: f64,
    pub md: f64,
    pub trials: usize,
}

impl RiskEstimate {
    pub fn risk(&self) -> f64 {
        self.fa + self.md
    }
}

/// Outcome of one trial: (false alarm, missed detection).
type Trial = (bool, bool);

fn run_trial(
    scheme: Scheme,
    params: &SbmParams,
    x: &Partition,
    y: &Partition,
    s: usize,
    config: &SchemeConfig,
    seed: u64,
) -> Result<Trial> {
    let g = sample_sbm(params, x, rng::derive(seed, "graph", 0))?;
    match scheme {
        Scheme::Gof => {
            let h = sample_sbm(params, y, rng::derive(seed, "graph", 2))?;
            let fa = gof_test(&g, x, params, &config.gof)?.reject;
            let md = !gof_test(&h, x, params, &config.gof)?.reject;
            Ok((fa, md))
        }
        Scheme::NaiveGof => {
            let h = sample_sbm(params, y, rng::derive(seed, "graph", 2))?;
            let settings = config.recovery.with_seed(rng::derive(seed, "recovery", 0));
            let fa = naive_gof(&g, x, s, &settings)?.reject;
            let md = !naive_gof(&h, x, s, &settings.with_seed(rng::derive(seed, "recovery", 2)))?.reject;
            Ok((fa, md))
        }
        Scheme::Tst => {
            let g_null = sample_sbm(params, x, rng::derive(seed, "graph", 1))?;
            let h = sample_sbm(params, y, rng::derive(seed, "graph", 2))?;
            let reference = TstReference::prepare(&g, &config.tst, rng::derive(seed, "tst", 0))?;
            let fa = reference.test(&g_null, Some(params), &config.tst)?.reject;
            let md = !reference.test(&h, Some(params), &config.tst)?.reject;
            Ok((fa, md))
        }
        Scheme::NaiveTst => {
            let g_null = sample_sbm(params, x, rng::derive(seed, "graph", 1))?;
            let h = sample_sbm(params, y, rng::derive(seed, "graph", 2))?;
            let recover =
                |graph, k| spectral_partition(graph, &config.recovery.with_seed(rng::derive(seed, "recovery", k)));
            let xg = recover(&g, 0)?.partition;
            let xg_null = recover(&g_null, 1)?.partition;
            let xh = recover(&h, 2)?.partition;
            let half = s as f64 / 2.0;
            let fa = distortion(&xg, &xg_null)? as f64 >= half;
            let md = (distortion(&xg, &xh)? as f64) < half;
            Ok((fa, md))
        }
    }
}

/// False-alarm and missed-detection rates over `trials` independent trials.
///
/// The null uses the balanced partition `x`; the alternative uses its shift
/// by `s` nodes. Trial `i` draws everything from `derive(seed, "trial", i)`.
pub fn estimate_risk(
    scheme: Scheme,
    params: &SbmParams,
    s: usize,
    config: &SchemeConfig,
    trials: usize,
    seed: u64,
    execution: Execution,
) -> Result<RiskEstimate> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    if s == 0 {
        return Err(invalid("s", "missed detection is undefined for s = 0"));
    }
    params.validate()?;
    match scheme {
        Scheme::Gof => config.gof.validate()?,
        Scheme::Tst => config.tst.validate()?,
        Scheme::NaiveGof | Scheme::NaiveTst => config.recovery.validate()?,
    }
    if scheme == Scheme::Gof && params.a == params.b {
        return Err(Error::NoSignal);
    }
    let x = Partition::halves(params.n);
    let y = perturb_partition(&x, s, PerturbMode::Shift, 0)?;
    let outcomes = map_trials(trials, execution, |i| {
        run_trial(scheme, params, &x, &y, s, config, rng::derive(seed, "trial", i as u64))
    });
    let (mut fa, mut md) = (0usize, 0usize);
    for outcome in outcomes {
        let (f, m) = outcome?;
        fa += usize::from(f);
        md += usize::from(m);
    }
    Ok(RiskEstimate { fa: fa as f64 / trials as f64, md: md as f64 / trials as f64, trials })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_names_round_trip() {
        for scheme in Scheme::ALL {
            assert_eq!(scheme.name().parse::<Scheme>().unwrap(), scheme);
        }
        assert!("gofx".parse::<Scheme>().is_err());
    }

    #[test]
    fn rejects_bad_requests() {
        let p = SbmParams::new(100, 5.0, 5.0).unwrap();
        let cfg = SchemeConfig::default();
        assert!(matches!(estimate_risk(Scheme::Gof, &p, 10, &cfg, 5, 0, Execution::Sequential), Err(Error::NoSignal)));
        let p = SbmParams::new(100, 9.0, 3.0).unwrap();
        assert!(estimate_risk(Scheme::Gof, &p, 0, &cfg, 5, 0, Execution::Sequential).is_err());
        assert!(estimate_risk(Scheme::Gof, &p, 51, &cfg, 5, 0, Execution::Sequential).is_err());
        assert!(estimate_risk(Scheme::Gof, &p, 10, &cfg, 0, 0, Execution::Sequential).is_err());
    }

    #[test]
    fn execution_modes_agree() {
        let p = SbmParams::new(200, 12.0, 4.0).unwrap();
        let cfg = SchemeConfig::default();
        for scheme in Scheme::ALL {
            let a = estimate_risk(scheme, &p, 40, &cfg, 6, 17, Execution::Sequential).unwrap();
            let b = estimate_risk(scheme, &p, 40, &cfg, 6, 17, Execution::Parallel).unwrap();
            assert_eq!(a, b, "{scheme}");
            assert!((0.0..=2.0).contains(&a.risk()));
        }
    }
}
