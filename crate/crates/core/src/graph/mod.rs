//! Partitions, graphs and the SBM sampling primitives.

mod params;
mod partition;
mod sample;
mod structure;

pub use params::{params_from_snr, snr, SbmParams};
pub use partition::{distortion, perturb_partition, Partition, PerturbMode};
pub use sample::{sample_sbm, sparsify, subsample_edges};
pub use structure::Graph;
