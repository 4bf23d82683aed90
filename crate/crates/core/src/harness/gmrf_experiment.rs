use crate::error::{invalid, Error, Result};
use crate::gmrf::{build_precision, cross_validated_risk, paired_statistic, sample_gmrf, CorrelationFactor, GmrfModel};
use crate::graph::{distortion, perturb_partition, sample_sbm, Graph, Partition, PerturbMode, SbmParams};
use crate::parallel::{map_trials, Execution};
use crate::recovery::RecoverySettings;
use crate::rng;

/// Graphs whose precision matrix is not positive definite are redrawn at
/// most this many times.
const MAX_RESAMPLES: u64 = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct GmrfExperiment {
    pub params: SbmParams,
    pub gamma: f64,
    /// Change size.
    pub s: usize,
    /// Observations per graph.
    pub t: usize,
    pub trials: usize,
    pub recovery: RecoverySettings,
    pub folds: usize,
    pub repeats: usize,
}

impl GmrfExperiment {
    /// `gamma = 3 / (a + b)`, ten folds, ten repeats, and a recovery budget of
    /// 200 iterations without regularization.
    pub fn new(params: SbmParams, s: usize, t: usize, trials: usize) -> Self {
        Self {
            gamma: 3.0 / (params.a + params.b),
            params,
            s,
            t,
            trials,
            recovery: RecoverySettings { tau: Some(0.0), max_iters: 200, ..RecoverySettings::default() },
            folds: 10,
            repeats: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmrfOutcome {
    pub null_values: Vec<f64>,
    pub alt_values: Vec<f64>,
    /// Cross-validated false alarm plus missed detection of the paired statistic.
    pub proposed_risk: f64,
    pub naive_fa: f64,
    pub naive_md: f64,
    pub null_distortions: Vec<usize>,
    pub alt_distortions: Vec<usize>,
    pub resamples: u64,
}

impl GmrfOutcome {
    pub fn naive_risk(&self) -> f64 {
        self.naive_fa + self.naive_md
    }
}

fn model_for(params: &SbmParams, x: &Partition, gamma: f64, seed: u64) -> Result<(GmrfModel, u64)> {
    for attempt in 0..MAX_RESAMPLES {
        let g: Graph = sample_sbm(params, x, rng::derive(seed, "graph", attempt))?;
        match build_precision(&g, gamma) {
            Ok(m) => return Ok((m, attempt)),
            Err(Error::NotPositiveDefinite) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NotPositiveDefinite)
}

struct TrialValues {
    null: f64,
    alt: f64,
    null_distortion: usize,
    alt_distortion: usize,
    resamples: u64,
}

/// Each trial draws `G`, `G'` from the balanced partition and `H` from its
/// `s`-shift, samples `t` observations from each field, and records the
/// paired statistics and the distortions between recovered partitions.
pub fn run_gmrf_experiment(exp: &GmrfExperiment, seed: u64, execution: Execution) -> Result<GmrfOutcome> {
    if exp.trials < exp.folds {
        return Err(Error::TooFewSamples { needed: exp.folds, got: exp.trials });
    }
    if exp.t < 2 {
        return Err(invalid("t", "need at least two observations"));
    }
    if exp.s == 0 {
        return Err(invalid("s", "must be at least 1"));
    }
    exp.params.validate()?;
    let x = Partition::halves(exp.params.n);
    let y = perturb_partition(&x, exp.s, PerturbMode::Shift, 0)?;
    let results = map_trials(exp.trials, execution, |i| -> Result<TrialValues> {
        let t = rng::derive(seed, "trial", i as u64);
        let mut resamples = 0;
        let mut correlation = |labels: &Partition, k: u64| -> Result<_> {
            let (model, extra) = model_for(&exp.params, labels, exp.gamma, rng::derive(t, "model", k))?;
            resamples += extra;
            CorrelationFactor::new(&sample_gmrf(&model, exp.t, rng::derive(t, "samples", k))?)
        };
        let c = correlation(&x, 0)?;
        let c_null = correlation(&x, 1)?;
        let d = correlation(&y, 2)?;
        let recover = |f: &CorrelationFactor, k| f.recover(&exp.recovery.with_seed(rng::derive(t, "recovery", k)));
        let base = recover(&c, 0)?;
        let xhat = base.partition.clone();
        let null = paired_statistic(&c, &c_null, base.clone())?.value;
        let alt = paired_statistic(&c, &d, base)?.value;
        let null_distortion = distortion(&xhat, &recover(&c_null, 1)?.partition)?;
        let alt_distortion = distortion(&xhat, &recover(&d, 2)?.partition)?;
        Ok(TrialValues { null, alt, null_distortion, alt_distortion, resamples })
    });
    let mut out = GmrfOutcome {
        null_values: Vec::with_capacity(exp.trials),
        alt_values: Vec::with_capacity(exp.trials),
        proposed_risk: 0.0,
        naive_fa: 0.0,
        naive_md: 0.0,
        null_distortions: Vec::with_capacity(exp.trials),
        alt_distortions: Vec::with_capacity(exp.trials),
        resamples: 0,
    };
    for r in results {
        let r = r?;
        out.null_values.push(r.null);
        out.alt_values.push(r.alt);
        out.null_distortions.push(r.null_distortion);
        out.alt_distortions.push(r.alt_distortion);
        out.resamples += r.resamples;
    }
    let half = exp.s as f64 / 2.0;
    let m = exp.trials as f64;
    out.naive_fa = out.null_distortions.iter().filter(|&&d| d as f64 >= half).count() as f64 / m;
    out.naive_md = out.alt_distortions.iter().filter(|&&d| (d as f64) < half).count() as f64 / m;
    out.proposed_risk =
        cross_validated_risk(&out.null_values, &out.alt_values, exp.folds, exp.repeats, rng::derive(seed, "cv", 0))?;
    Ok(out)
}
