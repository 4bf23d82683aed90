//! `sbmtest`: command-line front end for the community change tests.
//!
//! Single-test subcommands print `key=value` lines and exit with 0 (accept),
//! 1 (reject) or 2 (error).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sbm_change::harness::{
    dataset_risk, format_edge_list, format_labels, grid_sweep, largest_connected_component, load_edge_list,
    load_labeled_graph, run_gmrf_experiment, write_risk_csv, DatasetConfig, GmrfExperiment, LabeledGraph, RiskGrid,
    SweepSpec,
};
use sbm_change::{
    gof_test, gof_test_estimated, naive_gof, naive_tst, params_from_snr, perturb_partition, sample_sbm,
    two_sample_test, BoundReport, Error, Execution, GofConfig, Graph, Partition, PerturbMode, RecoverySettings,
    SbmParams, TestResult, TstConfig,
};

#[derive(Parser)]
#[command(name = "sbmtest", version, about = "Tests for community changes in sparse stochastic block models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw an SBM graph on a balanced partition and write it as an edge list.
    Sample(SampleArgs),
    /// Goodness-of-fit test of a graph against a labelling.
    Gof(GofArgs),
    /// Recover a partition and compare it with a labelling.
    NaiveGof(NaiveGofArgs),
    /// Two-sample test between two graphs on the same nodes.
    Tst(TstArgs),
    /// Recover partitions from both graphs and compare them.
    NaiveTst(NaiveTstArgs),
    /// Monte Carlo risk grid from a TOML spec, one CSV per scheme.
    Sweep(SweepArgs),
    /// Semi-synthetic risk experiment on a labelled graph.
    Dataset(DatasetArgs),
    /// GMRF two-sample experiment with cross-validated thresholds.
    Gmrf(GmrfArgs),
    /// Evaluate the closed-form lower-bound quantities as a CSV row.
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, requires = "b", conflicts_with = "snr")]
    a: Option<f64>,
    #[arg(long, requires = "a")]
    b: Option<f64>,
    /// Target SNR; `a` and `b` follow from `--ratio`.
    #[arg(long)]
    snr: Option<f64>,
    /// b / a when `--snr` is given.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    ratio: f64,
}

impl ModelArgs {
    fn params(&self) -> Result<SbmParams, Error> {
        match (self.a, self.b, self.snr) {
            (Some(a), Some(b), _) => SbmParams::new(self.n, a, b),
            (_, _, Some(snr)) => params_from_snr(self.n, snr, self.ratio),
            _ => Err(Error::Spec("give either --a and --b or --snr".into())),
        }
    }
}

#[derive(Args)]
struct RecoveryArgs {
    /// Rank-one regularizer; defaults to 1/(10n).
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

impl RecoveryArgs {
    fn settings(&self, seed: u64) -> RecoverySettings {
        RecoverySettings { tau: self.tau, max_iters: self.max_iters, tol: self.tol, seed }
    }
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Shift this many nodes away from the balanced halves partition.
    #[arg(long, default_value_t = 0)]
    s: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge list destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the planted labels here.
    #[arg(long)]
    labels_out: Option<PathBuf>,
}

#[derive(Args)]
struct GofArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Labels of the hypothesised partition.
    #[arg(long)]
    labels: PathBuf,
    /// Model parameters; estimated from the graph and labels when absent.
    #[arg(long, requires = "b")]
    a: Option<f64>,
    #[arg(long, requires = "a")]
    b: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = (16.0f64 / 3.0).sqrt())]
    c_sqrt: f64,
    #[arg(long, default_value_t = 16.0 / 3.0)]
    c_log: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NaiveGofArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    s: usize,
    #[command(flatten)]
    recovery: RecoveryArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PairArgs {
    /// First graph (integer node ids).
    #[arg(long)]
    g: PathBuf,
    /// Second graph (integer node ids).
    #[arg(long)]
    h: PathBuf,
    /// Node count, when larger than the largest id in either file.
    #[arg(long)]
    n: Option<usize>,
}

impl PairArgs {
    fn load(&self) -> Result<(Graph, Graph), Error> {
        let eg = load_edge_list(&self.g)?;
        let eh = load_edge_list(&self.h)?;
        for (path, e) in [(&self.g, &eg), (&self.h, &eh)] {
            if e.names.is_some() {
                return Err(Error::Parse {
                    path: path.clone(),
                    line: 0,
                    reason: "two-sample inputs need integer node ids".into(),
                });
            }
        }
        let n = self.n.unwrap_or(0).max(eg.n).max(eh.n);
        Ok((Graph::from_edges(n, eg.edges.iter().copied())?, Graph::from_edges(n, eh.edges.iter().copied())?))
    }
}

#[derive(Args)]
struct TstArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Model parameters; n(a+b) is estimated from edge counts when absent.
    #[arg(long, requires = "b")]
    a: Option<f64>,
    #[arg(long, requires = "a")]
    b: Option<f64>,
    #[arg(long, default_value_t = 0.85)]
    eta: f64,
    #[arg(long, default_value_t = 0.75)]
    kappa: f64,
    /// Target risk, recorded in the output.
    #[arg(long)]
    delta: Option<f64>,
    #[command(flatten)]
    recovery: RecoveryArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NaiveTstArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    s: usize,
    #[command(flatten)]
    recovery: RecoveryArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for `<scheme>.csv`.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct DatasetArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    /// Edge-keeping rates, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    rho: Vec<f64>,
    /// Change sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    s: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long, default_value_t = 0.85)]
    eta: f64,
    #[arg(long, default_value_t = 0.75)]
    kappa: f64,
    /// Regularizer for spectral clustering.
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Risk CSV destination; the `alpha` column holds rho.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct GmrfArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Coupling; defaults to 3/(a+b).
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    s: usize,
    /// Observations per field.
    #[arg(long)]
    t: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Summary destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-trial statistics as CSV.
    #[arg(long)]
    trials_out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    no_header: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn warn_dense(params: &SbmParams) {
    if !params.is_sparse_regime() {
        eprintln!(
            "warning: a + b = {} is not below n/4 = {}; the analysis assumes sparse graphs",
            params.a + params.b,
            params.n as f64 / 4.0
        );
    }
}

/// Outcome of a subcommand: a decision for single tests, plain success otherwise.
enum Done {
    Decision(bool),
    Finished,
}

fn report(result: &TestResult, out: Option<&Path>) -> Result<Done, Error> {
    emit(out, &result.to_string())?;
    Ok(Done::Decision(result.reject))
}

fn run(command: Command) -> Result<Done, Error> {
    match command {
        Command::Sample(args) => {
            let params = args.model.params()?;
            warn_dense(&params);
            let x = perturb_partition(&Partition::halves(params.n), args.s, PerturbMode::Shift, 0)?;
            let g = sample_sbm(&params, &x, args.seed)?;
            emit(args.out.as_deref(), &format_edge_list(&g))?;
            if let Some(path) = &args.labels_out {
                emit(Some(path), &format_labels(&x))?;
            }
            Ok(Done::Finished)
        }
        Command::Gof(args) => {
            let data = load_labeled_graph(&args.edges, &args.labels)?;
            let config = GofConfig { delta: args.delta, c_sqrt: args.c_sqrt, c_log: args.c_log };
            let result = match (args.a, args.b) {
                (Some(a), Some(b)) => {
                    let params = SbmParams::new(data.graph.n(), a, b)?;
                    warn_dense(&params);
                    gof_test(&data.graph, &data.labels, &params, &config)?
                }
                _ => gof_test_estimated(&data.graph, &data.labels, &config)?,
            };
            report(&result, args.out.as_deref())
        }
        Command::NaiveGof(args) => {
            let data = load_labeled_graph(&args.edges, &args.labels)?;
            let result = naive_gof(&data.graph, &data.labels, args.s, &args.recovery.settings(args.seed))?;
            report(&result, args.out.as_deref())
        }
        Command::Tst(args) => {
            let (g, h) = args.pair.load()?;
            let params = match (args.a, args.b) {
                (Some(a), Some(b)) => {
                    let p = SbmParams::new(g.n(), a, b)?;
                    warn_dense(&p);
                    Some(p)
                }
                _ => None,
            };
            let config =
                TstConfig { eta: args.eta, kappa: args.kappa, recovery: args.recovery.settings(0), delta: args.delta };
            let result = two_sample_test(&g, &h, params.as_ref(), &config, args.seed)?;
            report(&result, args.out.as_deref())
        }
        Command::NaiveTst(args) => {
            let (g, h) = args.pair.load()?;
            let result = naive_tst(&g, &h, args.s, &args.recovery.settings(args.seed))?;
            report(&result, args.out.as_deref())
        }
        Command::Sweep(args) => {
            let spec = SweepSpec::from_path(&args.spec)?;
            let output = grid_sweep(&spec, args.seed, execution(args.sequential))?;
            for cell in &output.skipped {
                eprintln!("skipped {} alpha={} s={}: {}", cell.scheme, cell.alpha, cell.s, cell.reason);
            }
            for path in write_risk_csv(&args.out, &output.grids)? {
                println!("{}", path.display());
            }
            Ok(Done::Finished)
        }
        Command::Dataset(args) => {
            let full = load_labeled_graph(&args.edges, &args.labels)?;
            let data: LabeledGraph = largest_connected_component(&full)?;
            let est = data.estimate_params()?;
            let (plus, minus) = data.labels.sizes();
            eprintln!(
                "nodes={} lcc={} communities={plus}/{minus} a_hat={} b_hat={}",
                full.graph.n(),
                data.graph.n(),
                est.a,
                est.b
            );
            let recovery = RecoverySettings::default().with_tau(args.tau);
            let config = DatasetConfig {
                rhos: args.rho,
                s: args.s,
                trials: args.trials,
                gof: GofConfig::with_delta(args.delta),
                tst: TstConfig { eta: args.eta, kappa: args.kappa, recovery, delta: None },
                recovery,
            };
            let rows = dataset_risk(&data, &config, args.seed, execution(args.sequential))?;
            let mut grids: Vec<RiskGrid> = Vec::new();
            for r in rows {
                match grids.iter_mut().find(|g| g.scheme == r.scheme.name()) {
                    Some(g) => g.rows.push(r.row),
                    None => grids.push(RiskGrid { scheme: r.scheme.name().to_string(), rows: vec![r.row] }),
                }
            }
            let mut text = String::new();
            for (i, g) in grids.iter().enumerate() {
                let csv = g.to_csv();
                // One header for the combined file.
                text.push_str(if i == 0 { &csv } else { csv.split_once('\n').map_or("", |(_, rest)| rest) });
            }
            if grids.is_empty() {
                text.push_str(sbm_change::harness::RISK_CSV_HEADER);
                text.push('\n');
            }
            emit(args.out.as_deref(), &text)?;
            Ok(Done::Finished)
        }
        Command::Gmrf(args) => {
            let params = args.model.params()?;
            let mut exp = GmrfExperiment::new(params, args.s, args.t, args.trials);
            if let Some(gamma) = args.gamma {
                exp.gamma = gamma;
            }
            exp.recovery.max_iters = args.max_iters;
            let outcome = run_gmrf_experiment(&exp, args.seed, execution(args.sequential))?;
            let summary = format!(
                "n={}\na={}\nb={}\ngamma={}\ns={}\nt={}\ntrials={}\nproposed_risk={}\nnaive_fa={}\nnaive_md={}\nnaive_risk={}\nresamples={}\n",
                params.n,
                params.a,
                params.b,
                exp.gamma,
                exp.s,
                exp.t,
                exp.trials,
                outcome.proposed_risk,
                outcome.naive_fa,
                outcome.naive_md,
                outcome.naive_risk(),
                outcome.resamples
            );
            emit(args.out.as_deref(), &summary)?;
            if let Some(path) = &args.trials_out {
                let mut csv = String::from("trial,null_statistic,alt_statistic,null_distortion,alt_distortion\n");
                for i in 0..exp.trials {
                    csv.push_str(&format!(
                        "{i},{},{},{},{}\n",
                        outcome.null_values[i],
                        outcome.alt_values[i],
                        outcome.null_distortions[i],
                        outcome.alt_distortions[i]
                    ));
                }
                emit(Some(path), &csv)?;
            }
            Ok(Done::Finished)
        }
        Command::Bounds(args) => {
            let report = BoundReport::evaluate(args.n, args.s, args.a, args.b)?;
            let mut text = String::new();
            if !args.no_header {
                text.push_str(BoundReport::CSV_HEADER);
                text.push('\n');
            }
            text.push_str(&report.csv_row());
            text.push('\n');
            emit(args.out.as_deref(), &text)?;
            Ok(Done::Finished)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Done::Decision(true)) => ExitCode::from(1),
        Ok(Done::Decision(false) | Done::Finished) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
