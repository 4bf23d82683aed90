//! Hypothesis tests for changes in the community structure of sparse
//! two-block stochastic block models.

pub mod bounds;
pub mod cut;
pub mod error;
pub mod gmrf;
pub mod gof;
pub mod graph;
pub mod harness;
pub mod outcome;
pub mod parallel;
pub mod recovery;
pub mod rng;
pub mod tst;

pub use bounds::{gof_bc_bound, gof_chi2_bound, nu, tst_converse, BoundReport, Chi2Bound, TstConverse};
pub use cut::{cut_counts, estimate_params, t_statistic, CutCounts};
pub use error::{Error, Result};
pub use gmrf::{
    build_precision, correlation_matrix, cross_validated_risk, fit_lda_threshold, gmrf_two_sample, sample_gmrf,
    weighted_t_statistic, CorrelationFactor, GmrfModel, LdaThreshold, SampleMatrix,
};
pub use gof::{gof_test, gof_test_estimated, gof_threshold, naive_gof, GofConfig};
pub use graph::{
    distortion, params_from_snr, perturb_partition, sample_sbm, snr, sparsify, subsample_edges, Graph, Partition,
    PerturbMode, SbmParams,
};
pub use outcome::TestResult;
pub use parallel::Execution;
pub use recovery::{naive_tst, spectral_partition, Recovery, RecoverySettings};
pub use tst::{expected_t_gap, two_sample_test, TstConfig, TstReference};
