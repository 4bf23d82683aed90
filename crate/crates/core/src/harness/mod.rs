//! Monte Carlo risk estimation, grid sweeps and dataset ingestion.

mod dataset;
mod gmrf_experiment;
mod io;
mod risk;
mod sweep;

pub use dataset::{dataset_risk, DatasetConfig, DatasetRow};
pub use gmrf_experiment::{run_gmrf_experiment, GmrfExperiment, GmrfOutcome};
pub use io::{
    format_edge_list, format_labels, largest_connected_component, load_edge_list, load_labeled_graph, load_labels,
    parse_edge_list, parse_labels, EdgeList, LabeledGraph,
};
pub use risk::{estimate_risk, RiskEstimate, Scheme, SchemeConfig};
pub use sweep::{grid_sweep, write_risk_csv, RiskGrid, RiskRow, SkippedCell, SweepOutput, SweepSpec, RISK_CSV_HEADER};
