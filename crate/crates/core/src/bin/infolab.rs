use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use infolab::cli::{render_table, run_command, write_outputs, Coarsening, Command, RunConfig};
use infolab::discretize::{BinningSpec, OrdinalSpec, Threshold};
use infolab::netinf::{Correction, Estimator, SelectionMode};
use infolab::surrogate::SurrogateMethod;
use infolab::synth::GeneratorSpec;
use infolab::Unit;

#[derive(Parser)]
#[command(name = "infolab", version, about = "Information-theoretic measures and network inference on tabular time series")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Joint entropy of the selected columns
    Entropy,
    /// Mutual information between two column groups, `--columns A;B`
    Mi,
    /// Conditional mutual information, `--columns A;B;C`
    Cmi,
    /// Transfer entropy, `--columns SOURCES;TARGET[;CONDITIONING]`
    Te,
    /// Active information storage of one column
    Ais,
    /// Total correlation
    Tc,
    /// Dual total correlation
    Dtc,
    /// O-information
    Oinfo,
    /// S-information
    Sinfo,
    /// TSE complexity
    Tse,
    /// Partial information decomposition, `--columns P1;P2;...;TARGET`
    Pid,
    /// Partial entropy decomposition
    Ped,
    /// Integrated information decomposition of two columns
    Phiid,
    /// Functional network from pairwise mutual information
    InferFc,
    /// Effective network from greedy conditional transfer entropy
    InferTe,
    /// Coarse-grain continuous columns into symbols
    Discretize,
    /// Emit a synthetic system with known ground truth as CSV
    Generate,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Entropy => Command::Entropy,
            Cmd::Mi => Command::Mi,
            Cmd::Cmi => Command::Cmi,
            Cmd::Te => Command::Te,
            Cmd::Ais => Command::Ais,
            Cmd::Tc => Command::Tc,
            Cmd::Dtc => Command::Dtc,
            Cmd::Oinfo => Command::Oinfo,
            Cmd::Sinfo => Command::Sinfo,
            Cmd::Tse => Command::Tse,
            Cmd::Pid => Command::Pid,
            Cmd::Ped => Command::Ped,
            Cmd::Phiid => Command::Phiid,
            Cmd::InferFc => Command::InferFc,
            Cmd::InferTe => Command::InferTe,
            Cmd::Discretize => Command::Discretize,
            Cmd::Generate => Command::Generate,
        }
    }
}

#[derive(Args)]
struct Opts {
    /// CSV input, rows are time points
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Column groups: names or indices, `,` within a group, `;` between groups
    #[arg(long, global = true)]
    columns: Vec<String>,
    /// plugin | gaussian | ksg
    #[arg(long, global = true, default_value = "plugin")]
    estimator: String,
    /// Neighbours for the ksg estimator
    #[arg(long, global = true, default_value_t = 4)]
    neighbors: usize,
    /// Load integer columns as symbols
    #[arg(long, global = true)]
    discrete: bool,
    /// Allow continuous estimators on symbolic data
    #[arg(long, global = true)]
    cast: bool,
    #[arg(long, global = true, default_value_t = 1)]
    k: usize,
    #[arg(long, global = true, default_value_t = 1)]
    l: usize,
    #[arg(long, global = true, default_value_t = 1)]
    tau: usize,
    /// Equal-width bins for continuous input
    #[arg(long, global = true)]
    bins: Option<usize>,
    /// Use equal-frequency edges with --bins
    #[arg(long, global = true)]
    quantile: bool,
    /// Point-process threshold in SDs, or `auto`
    #[arg(long, global = true)]
    threshold: Option<String>,
    /// Ordinal-pattern dimension (delay from --tau)
    #[arg(long, global = true)]
    ordinal: Option<usize>,
    /// Redundancy function for pid / ped / phiid
    #[arg(long, global = true)]
    function: Option<String>,
    #[arg(long, global = true)]
    surrogates: Option<usize>,
    /// shuffle | circular-shift
    #[arg(long, global = true, default_value = "circular-shift")]
    surrogate_method: String,
    #[arg(long, global = true, default_value_t = 0.05)]
    alpha: f64,
    /// none | bonferroni | bh
    #[arg(long, global = true, default_value = "bh")]
    correction: String,
    /// Test each source alone instead of greedy selection (infer-te)
    #[arg(long, global = true)]
    bivariate: bool,
    /// Let extra target lags compete with sources (infer-te)
    #[arg(long, global = true)]
    non_uniform: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// bits | nats
    #[arg(long, global = true, default_value = "bits")]
    base: String,
    /// Include local (pointwise) values
    #[arg(long, global = true)]
    local: bool,
    /// JSON result document, or CSV for discretize / generate
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Edge-list CSV for network commands
    #[arg(long, global = true)]
    edges: Option<PathBuf>,
    /// Generator spec as JSON, e.g. '{"kind":"gate","gate":"xor","mode":"dynamic"}'
    #[arg(long, global = true)]
    spec: Option<String>,
    #[arg(long, global = true, default_value_t = 1000)]
    length: usize,
}

fn config(cmd: Cmd, o: Opts) -> Result<RunConfig, Box<dyn std::error::Error>> {
    let estimator = match o.estimator.as_str() {
        "plugin" => Estimator::Plugin,
        "gaussian" => Estimator::Gaussian,
        "ksg" | "knn" => Estimator::Ksg { k: o.neighbors },
        other => return Err(format!("unknown estimator {other:?}").into()),
    };
    let base = match o.base.as_str() {
        "bits" | "bit" | "2" => Unit::Bits,
        "nats" | "nat" | "e" => Unit::Nats,
        other => return Err(format!("unknown base {other:?}").into()),
    };
    let coarsening = match (o.bins, o.threshold.as_deref(), o.ordinal) {
        (Some(b), None, None) if o.quantile => Some(Coarsening::Bins(BinningSpec::equal_frequency(b)?)),
        (Some(b), None, None) => Some(Coarsening::Bins(BinningSpec::uniform(b)?)),
        (None, Some("auto"), None) => Some(Coarsening::Threshold(Threshold::Auto)),
        (None, Some(z), None) => Some(Coarsening::Threshold(Threshold::ZScore(z.parse()?))),
        (None, None, Some(d)) => Some(Coarsening::Ordinal(OrdinalSpec::new(d, o.tau)?)),
        (None, None, None) => None,
        _ => return Err("choose one of --bins, --threshold, --ordinal".into()),
    };
    let generator: Option<GeneratorSpec> = o.spec.as_deref().map(serde_json::from_str).transpose()?;
    let columns = o
        .columns
        .iter()
        .flat_map(|c| c.split(';'))
        .map(|g| g.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect())
        .collect();
    Ok(RunConfig {
        command: cmd.into(),
        input: o.input,
        discrete: o.discrete,
        cast: o.cast,
        columns,
        estimator,
        k: o.k,
        l: o.l,
        tau: o.tau,
        coarsening,
        function: o.function,
        surrogates: o.surrogates,
        surrogate_method: o.surrogate_method.parse::<SurrogateMethod>()?,
        alpha: o.alpha,
        correction: o.correction.parse::<Correction>()?,
        selection: if o.bivariate { SelectionMode::Bivariate } else { SelectionMode::Multivariate },
        non_uniform: o.non_uniform,
        seed: o.seed,
        base,
        local: o.local,
        output: o.output,
        edges: o.edges,
        generator,
        length: o.length,
    })
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    let cfg = config(cli.command, cli.opts)?;
    let result = run_command(&cfg)?;
    let csv = write_outputs(&result)?;
    match csv {
        Some(text) => print!("{text}"),
        None => print!("{}", render_table(&result.output)),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
