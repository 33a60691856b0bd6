//! Run configuration, CSV ingestion, command dispatch and result documents
//! behind the `infolab` binary.
//!
//! A run is fully described by its [`RunConfig`] plus the input file. Every
//! JSON document and every CSV written by `generate` or `discretize` embeds
//! the configuration with the master seed filled in, so the run can be
//! repeated exactly.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::discretize::{bin_series, ordinal_embed, point_process, BinningSpec, OrdinalSpec, Threshold};
use crate::distribution::JointDistribution;
use crate::dynamics::{active_information_storage_with, conditional_transfer_entropy_with, EmbeddingSpec};
use crate::error::{Error, Result};
use crate::estimators::{
    gaussian_conditional_mi, gaussian_entropy, gaussian_mi, kl_entropy, ksg_conditional_mi, ksg_mi, GaussianModel,
    KnnConfig, KnnEstimate, KsgVariant,
};
use crate::multivar::{local_profile, tse_complexity, TseMode, TSE_EXACT_MAX_VARS};
use crate::netinf::{
    export_hyperedges, infer_effective, infer_fc, Correction, EffectiveConfig, Estimator, Hyperedge, NetworkResult,
    ParentSet, SelectionMode,
};
use crate::pid::{
    ped_decompose, phiid_decompose, pid_decompose, DecompositionResult, PedFunction, PhiFunction, RedundancyFunction,
};
use crate::series::{ContinuousSeries, Dataset, DiscreteSeries};
use crate::shannon;
use crate::surrogate::{significance, SignificanceTest, SurrogateConfig, SurrogateMethod};
use crate::synth::{generate, GeneratorSpec};
use crate::units::Unit;

/// Surrogate count used by network inference when none is given.
pub const DEFAULT_NETWORK_SURROGATES: usize = 99;
/// Subsets drawn per scale when TSE is too large to enumerate.
pub const TSE_SAMPLES_PER_SCALE: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Entropy,
    Mi,
    Cmi,
    Te,
    Ais,
    Tc,
    Dtc,
    Oinfo,
    Sinfo,
    Tse,
    Pid,
    Ped,
    Phiid,
    InferFc,
    InferTe,
    Discretize,
    Generate,
}

impl Command {
    pub const ALL: [Command; 17] = [
        Command::Entropy,
        Command::Mi,
        Command::Cmi,
        Command::Te,
        Command::Ais,
        Command::Tc,
        Command::Dtc,
        Command::Oinfo,
        Command::Sinfo,
        Command::Tse,
        Command::Pid,
        Command::Ped,
        Command::Phiid,
        Command::InferFc,
        Command::InferTe,
        Command::Discretize,
        Command::Generate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Entropy => "entropy",
            Command::Mi => "mi",
            Command::Cmi => "cmi",
            Command::Te => "te",
            Command::Ais => "ais",
            Command::Tc => "tc",
            Command::Dtc => "dtc",
            Command::Oinfo => "oinfo",
            Command::Sinfo => "sinfo",
            Command::Tse => "tse",
            Command::Pid => "pid",
            Command::Ped => "ped",
            Command::Phiid => "phiid",
            Command::InferFc => "infer-fc",
            Command::InferTe => "infer-te",
            Command::Discretize => "discretize",
            Command::Generate => "generate",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown command {s:?}")))
    }
}

/// How continuous input is turned into symbols before a discrete measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coarsening {
    Bins(BinningSpec),
    Threshold(Threshold),
    Ordinal(OrdinalSpec),
}

impl Coarsening {
    pub fn apply(&self, series: &ContinuousSeries) -> Result<DiscreteSeries> {
        match self {
            Coarsening::Bins(spec) => bin_series(series, spec),
            Coarsening::Threshold(t) => point_process(series, *t),
            Coarsening::Ordinal(spec) => ordinal_embed(series, spec),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    /// Load integer-valued columns as symbols.
    pub discrete: bool,
    /// Allow continuous estimators on symbolic data.
    pub cast: bool,
    /// Variable groups, each entry a column name or index.
    pub columns: Vec<Vec<String>>,
    pub estimator: Estimator,
    /// Source history (`te`), storage history (`ais`), maximum target
    /// history (`infer-te`).
    pub k: usize,
    /// Target history (`te`), maximum source lag (`infer-te`).
    pub l: usize,
    /// Embedding delay; time lag for `phiid`.
    pub tau: usize,
    pub coarsening: Option<Coarsening>,
    /// Redundancy function for `pid`, `ped` and `phiid`.
    pub function: Option<String>,
    /// Surrogates per test; measures are only tested when this is set.
    pub surrogates: Option<usize>,
    pub surrogate_method: SurrogateMethod,
    pub alpha: f64,
    pub correction: Correction,
    pub selection: SelectionMode,
    pub non_uniform: bool,
    pub seed: Option<u64>,
    pub base: Unit,
    pub local: bool,
    pub output: Option<PathBuf>,
    /// Edge-list CSV for network commands.
    pub edges: Option<PathBuf>,
    pub generator: Option<GeneratorSpec>,
    pub length: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Entropy,
            input: None,
            discrete: false,
            cast: false,
            columns: Vec::new(),
            estimator: Estimator::Plugin,
            k: 1,
            l: 1,
            tau: 1,
            coarsening: None,
            function: None,
            surrogates: None,
            surrogate_method: SurrogateMethod::CircularShift,
            alpha: 0.05,
            correction: Correction::BenjaminiHochberg,
            selection: SelectionMode::Multivariate,
            non_uniform: false,
            seed: None,
            base: Unit::Bits,
            local: false,
            output: None,
            edges: None,
            generator: None,
            length: 1000,
        }
    }
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            ..Self::default()
        }
    }
}

/// Parse a CSV table: rows are time points, columns are variables. A first
/// row containing any non-numeric cell is taken as the header. Lines
/// starting with `#` are skipped.
pub fn ingest_reader<R: Read>(reader: R, discrete: bool) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut names: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if let Some(w) = width {
            if record.len() != w {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {w} fields, found {}", record.len()),
                });
            }
        }
        let parsed: Vec<std::result::Result<f64, _>> = record.iter().map(str::parse::<f64>).collect();
        if width.is_none() {
            width = Some(record.len());
            if parsed.iter().any(|p| p.is_err()) {
                names = Some(record.iter().map(str::to_string).collect());
                continue;
            }
        }
        let row = parsed
            .into_iter()
            .enumerate()
            .map(|(j, p)| {
                p.map_err(|_| Error::Parse {
                    line,
                    message: format!("column {}: {:?} is not a number", j + 1, &record[j]),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no data rows".into(),
        });
    }
    let mut series = ContinuousSeries::from_rows(&rows)?;
    if let Some(n) = names {
        series = series.with_names(n)?;
    }
    Ok(if discrete {
        Dataset::Discrete(series.to_discrete()?)
    } else {
        Dataset::Continuous(series)
    })
}

pub fn ingest(path: &Path, discrete: bool) -> Result<Dataset> {
    ingest_reader(std::fs::File::open(path)?, discrete)
}

/// CSV with a header row; floats use the shortest exact representation.
pub fn dataset_to_csv(data: &Dataset, comment: Option<&str>) -> Result<String> {
    let mut out = Vec::new();
    if let Some(c) = comment {
        for line in c.lines() {
            out.extend_from_slice(format!("# {line}\n").as_bytes());
        }
    }
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(data.names())?;
    for t in 0..data.len() {
        let row: Vec<String> = match data {
            Dataset::Discrete(s) => (0..s.n_vars()).map(|v| s.get(t, v).to_string()).collect(),
            Dataset::Continuous(s) => (0..s.n_vars()).map(|v| s.column(v)[t].to_string()).collect(),
        };
        w.write_record(&row)?;
    }
    w.flush()?;
    drop(w);
    String::from_utf8(out).map_err(|e| Error::InvalidParameter(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Locals {
    /// Row of the input at which the first local value sits.
    pub start: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomValue {
    pub atom: String,
    pub value: f64,
}

/// Result document of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub command: Command,
    pub seed: u64,
    /// The configuration as executed, seed included.
    pub config: RunConfig,
    pub unit: Unit,
    pub variables: Vec<String>,
    pub values: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locals: Option<Locals>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub significance: Option<SignificanceTest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<AtomValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parents: Option<Vec<ParentSet>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperedges: Option<Vec<Hyperedge>>,
}

impl RunOutput {
    fn new(config: &RunConfig, seed: u64) -> Self {
        let mut config = config.clone();
        config.seed = Some(seed);
        Self {
            command: config.command,
            seed,
            unit: config.base,
            config,
            variables: Vec::new(),
            values: BTreeMap::new(),
            metadata: BTreeMap::new(),
            locals: None,
            significance: None,
            atoms: None,
            network: None,
            parents: None,
            hyperedges: None,
        }
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// A finished run: the document plus any table it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub output: RunOutput,
    pub data: Option<Dataset>,
}

fn resolve(names: &[String], token: &str) -> Result<usize> {
    if let Some(i) = names.iter().position(|n| n == token) {
        return Ok(i);
    }
    match token.parse::<usize>() {
        Ok(i) if i < names.len() => Ok(i),
        Ok(i) => Err(Error::VariableOutOfRange {
            index: i,
            n_vars: names.len(),
        }),
        Err(_) => Err(Error::InvalidParameter(format!("no column named {token:?}"))),
    }
}

fn groups(cfg: &RunConfig, data: &Dataset) -> Result<Vec<Vec<usize>>> {
    if cfg.columns.is_empty() {
        return Ok((0..data.n_vars()).map(|v| vec![v]).collect());
    }
    cfg.columns
        .iter()
        .map(|g| g.iter().map(|t| resolve(data.names(), t)).collect())
        .collect()
}

fn expect_groups(cfg: &RunConfig, g: &[Vec<usize>], range: std::ops::RangeInclusive<usize>, what: &str) -> Result<()> {
    if !range.contains(&g.len()) {
        return Err(Error::InvalidParameter(format!(
            "{} takes {what}; got {} column group(s)",
            cfg.command,
            g.len()
        )));
    }
    if g.iter().any(Vec::is_empty) {
        return Err(Error::EmptySelection);
    }
    Ok(())
}

fn load(cfg: &RunConfig) -> Result<Dataset> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter(format!("{} needs --input", cfg.command)))?;
    let data = ingest(path, cfg.discrete)?;
    Ok(match (data, &cfg.coarsening) {
        (Dataset::Continuous(s), Some(c)) => Dataset::Discrete(c.apply(&s)?),
        (d, _) => d,
    })
}

fn as_discrete(cfg: &RunConfig, data: &Dataset) -> Result<DiscreteSeries> {
    match data {
        Dataset::Discrete(s) => Ok(s.clone()),
        Dataset::Continuous(_) => Err(Error::InvalidParameter(format!(
            "{} with the plug-in estimator needs symbols: pass --discrete for integer data or a coarsening such as --bins",
            cfg.command
        ))),
    }
}

fn as_continuous(cfg: &RunConfig, data: &Dataset) -> Result<ContinuousSeries> {
    match data {
        Dataset::Continuous(s) => Ok(s.clone()),
        Dataset::Discrete(s) if cfg.cast => Ok(s.to_continuous()),
        Dataset::Discrete(_) => Err(Error::InvalidParameter(format!(
            "the {} estimator on symbolic data needs an explicit --cast",
            cfg.estimator
        ))),
    }
}

/// Data prepared for the configured estimator.
fn prepared(cfg: &RunConfig, data: &Dataset) -> Result<Dataset> {
    Ok(match cfg.estimator {
        Estimator::Plugin => Dataset::Discrete(as_discrete(cfg, data)?),
        _ => Dataset::Continuous(as_continuous(cfg, data)?),
    })
}

fn plugin_only(cfg: &RunConfig) -> Result<()> {
    if cfg.estimator != Estimator::Plugin {
        return Err(Error::InvalidParameter(format!(
            "{} is only available with the plug-in estimator",
            cfg.command
        )));
    }
    Ok(())
}

/// Per-row locals through a cache of distinct joint states.
fn row_locals(
    series: &DiscreteSeries,
    vars: &[usize],
    mut local: impl FnMut(&[usize]) -> Result<f64>,
) -> Result<Vec<f64>> {
    let mut cache: HashMap<Vec<usize>, f64> = HashMap::new();
    (0..series.len())
        .map(|t| {
            let state: Vec<usize> = vars.iter().map(|&v| series.get(t, v)).collect();
            if let Some(&x) = cache.get(&state) {
                return Ok(x);
            }
            let x = local(&state)?;
            cache.insert(state, x);
            Ok(x)
        })
        .collect()
}

fn empirical(series: &DiscreteSeries, vars: &[usize]) -> Result<JointDistribution> {
    JointDistribution::from_series(series, vars, &vec![0; vars.len()])
}

fn span(n: usize, from: usize) -> Vec<usize> {
    (from..from + n).collect()
}

fn knn_config(k: usize, seed: u64) -> KnnConfig {
    KnnConfig {
        seed,
        ..KnnConfig::with_k(k)
    }
}

fn record_knn(out: &mut RunOutput, est: &KnnEstimate) {
    out.metadata.insert("jittered".into(), est.jittered.to_string());
    out.metadata.insert("samples".into(), est.n_samples.to_string());
}

fn set_measure(out: &mut RunOutput, key: &str, value: f64, from: Unit, locals: Option<(usize, Vec<f64>)>) {
    let base = out.unit;
    out.values.insert(key.into(), from.convert(value, base));
    if let Some((start, values)) = locals {
        out.locals = Some(Locals {
            start,
            values: values.into_iter().map(|v| from.convert(v, base)).collect(),
        });
    }
}

fn set_significance(out: &mut RunOutput, test: SignificanceTest, from: Unit) {
    let base = out.unit;
    out.significance = Some(SignificanceTest {
        value: from.convert(test.value, base),
        null_mean: from.convert(test.null_mean, base),
        bias_corrected: from.convert(test.bias_corrected, base),
        ..test
    });
}

fn surrogate_config(cfg: &RunConfig, count: usize, seed: u64) -> SurrogateConfig {
    SurrogateConfig::new(cfg.surrogate_method, count, seed, Vec::new())
}

/// Columns `x_v(t - lag)` for `t` in `start..T`.
fn lag_matrix(series: &ContinuousSeries, cols: &[(usize, usize)], start: usize) -> Result<ContinuousSeries> {
    let n = series.len();
    if n <= start {
        return Err(Error::SeriesTooShort {
            needed: start + 1,
            available: n,
        });
    }
    ContinuousSeries::from_columns(
        cols.iter()
            .map(|&(v, lag)| series.column(v)[start - lag..n - lag].to_vec())
            .collect(),
    )
}

/// `I(a; b | c)` for the continuous estimators, in nats.
fn continuous_cmi(
    cfg: &RunConfig,
    out: &mut RunOutput,
    s: &ContinuousSeries,
    a: &[usize],
    b: &[usize],
    c: &[usize],
    seed: u64,
) -> Result<(f64, Option<Vec<f64>>)> {
    match cfg.estimator {
        Estimator::Gaussian => {
            if c.is_empty() {
                let locals = if cfg.local {
                    Some(GaussianModel::fit(s)?.local_mutual_information(s, a, b)?.values)
                } else {
                    None
                };
                Ok((gaussian_mi(s, a, b)?, locals))
            } else if cfg.local {
                Err(Error::InvalidParameter(
                    "local conditional values are not available from the Gaussian estimator".into(),
                ))
            } else {
                Ok((gaussian_conditional_mi(s, a, b, c)?, None))
            }
        }
        Estimator::Ksg { k } => {
            let kc = knn_config(k, seed);
            let est = if c.is_empty() {
                ksg_mi(s, a, b, &kc, KsgVariant::One)?
            } else {
                ksg_conditional_mi(s, a, b, c, &kc, KsgVariant::One)?
            };
            record_knn(out, &est);
            Ok((est.value, cfg.local.then(|| est.locals.values.clone())))
        }
        Estimator::Plugin => unreachable!("continuous path"),
    }
}

fn network_surrogates(cfg: &RunConfig, seed: u64) -> SurrogateConfig {
    surrogate_config(cfg, cfg.surrogates.unwrap_or(DEFAULT_NETWORK_SURROGATES), seed)
}

fn convert_network(net: &mut NetworkResult, base: Unit) {
    let from = net.metadata.unit;
    for e in &mut net.edges {
        e.weight = from.convert(e.weight, base);
        e.bias_corrected = e.bias_corrected.map(|b| from.convert(b, base));
    }
    net.metadata.unit = base;
}

fn decomposition_atoms(d: &DecompositionResult, base: Unit) -> Vec<AtomValue> {
    d.iter()
        .map(|(a, v)| AtomValue {
            atom: a.to_string(),
            value: Unit::Bits.convert(v, base),
        })
        .collect()
}

fn selected(data: &Dataset, vars: &[usize]) -> Result<Dataset> {
    Ok(match data {
        Dataset::Discrete(s) => Dataset::Discrete(s.select(vars)?),
        Dataset::Continuous(s) => Dataset::Continuous(s.select(vars)?),
    })
}

/// Execute one command. Nothing is written to disk here.
pub fn run_command(cfg: &RunConfig) -> Result<RunResult> {
    let seed = cfg.seed.unwrap_or_else(rand::random);
    let mut out = RunOutput::new(cfg, seed);
    if cfg.command == Command::Generate {
        let spec = cfg
            .generator
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("generate needs a generator spec".into()))?;
        let g = generate(spec, cfg.length, seed)?;
        out.variables = g.series.names().to_vec();
        out.values = g.truth.values.clone();
        out.metadata.insert("rows".into(), g.series.len().to_string());
        return Ok(RunResult {
            output: out,
            data: Some(g.series),
        });
    }
    let data = load(cfg)?;
    let g = groups(cfg, &data)?;
    let flat: Vec<usize> = g.concat();
    out.variables = flat.iter().map(|&v| data.names()[v].clone()).collect();
    match cfg.command {
        Command::Entropy => {
            expect_groups(cfg, &g, 1..=usize::MAX, "one or more columns")?;
            match prepared(cfg, &data)? {
                Dataset::Discrete(s) => {
                    let dist = empirical(&s, &flat)?;
                    let idx = span(flat.len(), 0);
                    let locals = if cfg.local {
                        Some((0, row_locals(&s, &flat, |st| shannon::local_entropy(&dist, &idx, st))?))
                    } else {
                        None
                    };
                    set_measure(&mut out, "entropy", shannon::entropy(&dist, &idx)?, Unit::Bits, locals);
                }
                Dataset::Continuous(s) => match cfg.estimator {
                    Estimator::Gaussian => {
                        let locals = if cfg.local {
                            let model = GaussianModel::fit(&s)?;
                            let l = (0..s.len())
                                .map(|t| {
                                    let x: Vec<f64> = flat.iter().map(|&v| s.column(v)[t]).collect();
                                    Ok(-model.log_density(&flat, &x)?)
                                })
                                .collect::<Result<Vec<f64>>>()?;
                            Some((0, l))
                        } else {
                            None
                        };
                        set_measure(&mut out, "entropy", gaussian_entropy(&s, &flat)?, Unit::Nats, locals);
                    }
                    Estimator::Ksg { k } => {
                        let est = kl_entropy(&s, &flat, &knn_config(k, seed))?;
                        record_knn(&mut out, &est);
                        let locals = cfg.local.then(|| (0, est.locals.values.clone()));
                        set_measure(&mut out, "entropy", est.value, Unit::Nats, locals);
                    }
                    Estimator::Plugin => unreachable!(),
                },
            }
        }
        Command::Mi | Command::Cmi => {
            let three = cfg.command == Command::Cmi;
            if three {
                expect_groups(cfg, &g, 3..=3, "three column groups A;B;C")?;
            } else {
                expect_groups(cfg, &g, 2..=2, "two column groups A;B")?;
            }
            let key = if three { "conditional_mutual_information" } else { "mutual_information" };
            let c: &[usize] = if three { &g[2] } else { &[] };
            match prepared(cfg, &data)? {
                Dataset::Discrete(s) => {
                    let dist = empirical(&s, &flat)?;
                    let (ia, ib) = (span(g[0].len(), 0), span(g[1].len(), g[0].len()));
                    let ic = span(c.len(), g[0].len() + g[1].len());
                    let value = shannon::conditional_mutual_information(&dist, &ia, &ib, &ic)?;
                    let locals = if cfg.local {
                        Some((
                            0,
                            row_locals(&s, &flat, |st| {
                                shannon::local_conditional_mutual_information(&dist, &ia, &ib, &ic, st)
                            })?,
                        ))
                    } else {
                        None
                    };
                    set_measure(&mut out, key, value, Unit::Bits, locals);
                    if let Some(count) = cfg.surrogates {
                        let sc = surrogate_config(cfg, count, seed).with_scope(g[0].clone());
                        let test = significance(
                            |x: &DiscreteSeries| crate::estimators::plugin_cmi(x, &g[0], &g[1], c, Unit::Bits),
                            &s,
                            &sc,
                        )?;
                        set_significance(&mut out, test, Unit::Bits);
                    }
                }
                Dataset::Continuous(s) => {
                    let (value, locals) = continuous_cmi(cfg, &mut out, &s, &g[0], &g[1], c, seed)?;
                    set_measure(&mut out, key, value, Unit::Nats, locals.map(|l| (0, l)));
                    if let Some(count) = cfg.surrogates {
                        let sc = surrogate_config(cfg, count, seed).with_scope(g[0].clone());
                        let quiet = RunConfig {
                            local: false,
                            ..cfg.clone()
                        };
                        let test = significance(
                            |x: &ContinuousSeries| {
                                let mut scratch = RunOutput::new(&quiet, seed);
                                Ok(continuous_cmi(&quiet, &mut scratch, x, &g[0], &g[1], c, seed)?.0)
                            },
                            &s,
                            &sc,
                        )?;
                        set_significance(&mut out, test, Unit::Nats);
                    }
                }
            }
        }
        Command::Te | Command::Ais => {
            let te = cfg.command == Command::Te;
            if te {
                expect_groups(cfg, &g, 2..=3, "groups SOURCES;TARGET[;CONDITIONING]")?;
                if g[1].len() != 1 {
                    return Err(Error::InvalidParameter("te takes a single target column".into()));
                }
            } else {
                expect_groups(cfg, &g, 1..=1, "one column")?;
                if g[0].len() != 1 {
                    return Err(Error::InvalidParameter("ais takes a single column".into()));
                }
            }
            let source_spec = EmbeddingSpec::new(cfg.k, cfg.tau)?;
            let target_spec = EmbeddingSpec::new(cfg.l, cfg.tau)?;
            let cond: Vec<usize> = if te { g.get(2).cloned().unwrap_or_default() } else { Vec::new() };
            let cond_spec = if cond.is_empty() { EmbeddingSpec::default() } else { source_spec };
            let key = if te { "transfer_entropy" } else { "active_information_storage" };
            match prepared(cfg, &data)? {
                Dataset::Discrete(s) => {
                    let measure = |x: &DiscreteSeries| {
                        if te {
                            conditional_transfer_entropy_with(x, &g[0], g[1][0], &cond, source_spec, target_spec, cond_spec)
                        } else {
                            active_information_storage_with(x, g[0][0], source_spec)
                        }
                    };
                    let m = measure(&s)?;
                    let locals = cfg.local.then(|| (m.start, m.locals.values.clone()));
                    set_measure(&mut out, key, m.expected, Unit::Bits, locals);
                    if let Some(count) = cfg.surrogates {
                        let sc = surrogate_config(cfg, count, seed).with_scope(g[0].clone());
                        let test = significance(|x: &DiscreteSeries| Ok(measure(x)?.expected), &s, &sc)?;
                        set_significance(&mut out, test, Unit::Bits);
                    }
                }
                Dataset::Continuous(s) => {
                    // lagged columns: sources' past | present | target and conditioning past
                    let mut cols: Vec<(usize, usize)> = Vec::new();
                    let present = if te { g[1][0] } else { g[0][0] };
                    let own = if te { target_spec } else { source_spec };
                    if te {
                        for &v in &g[0] {
                            cols.extend(source_spec.lags().into_iter().map(|l| (v, l)));
                        }
                    } else {
                        cols.extend(own.lags().into_iter().map(|l| (present, l)));
                    }
                    let na = cols.len();
                    cols.push((present, 0));
                    if te {
                        cols.extend(target_spec.lags().into_iter().map(|l| (present, l)));
                        for &v in &cond {
                            cols.extend(cond_spec.lags().into_iter().map(|l| (v, l)));
                        }
                    }
                    let start = cols.iter().map(|c| c.1).max().unwrap_or(0);
                    let lagged = lag_matrix(&s, &cols, start)?;
                    let a = span(na, 0);
                    let c = span(cols.len() - na - 1, na + 1);
                    let (value, locals) = continuous_cmi(cfg, &mut out, &lagged, &a, &[na], &c, seed)?;
                    set_measure(&mut out, key, value, Unit::Nats, locals.map(|l| (start, l)));
                    if cfg.surrogates.is_some() {
                        return Err(Error::InvalidParameter(
                            "surrogate tests of te/ais are available with the plug-in estimator".into(),
                        ));
                    }
                }
            }
        }
        Command::Tc | Command::Dtc | Command::Oinfo | Command::Sinfo => {
            plugin_only(cfg)?;
            if flat.len() < 2 {
                return Err(Error::InvalidParameter(format!("{} needs at least 2 variables", cfg.command)));
            }
            let s = as_discrete(cfg, &data)?;
            let dist = empirical(&s, &flat)?;
            let idx = span(flat.len(), 0);
            let profile = local_profile(&dist, &idx)?;
            let per_state: Vec<f64> = match cfg.command {
                Command::Tc => profile.tc.clone(),
                Command::Dtc => profile.dtc.clone(),
                Command::Oinfo => profile.o_information(),
                _ => profile.s_information(),
            };
            let key = match cfg.command {
                Command::Tc => "total_correlation",
                Command::Dtc => "dual_total_correlation",
                Command::Oinfo => "o_information",
                _ => "s_information",
            };
            let locals = if cfg.local {
                let at: HashMap<Vec<usize>, usize> = dist.iter().enumerate().map(|(i, (st, _))| (st, i)).collect();
                Some((0, row_locals(&s, &flat, |st| Ok(per_state[at[st]]))?))
            } else {
                None
            };
            set_measure(&mut out, key, profile.expectation(&per_state), Unit::Bits, locals);
        }
        Command::Tse => {
            plugin_only(cfg)?;
            let s = as_discrete(cfg, &data)?;
            let dist = empirical(&s, &flat)?;
            let mode = if flat.len() <= TSE_EXACT_MAX_VARS {
                TseMode::Exact
            } else {
                TseMode::Sampled {
                    per_scale: TSE_SAMPLES_PER_SCALE,
                    seed,
                }
            };
            let r = tse_complexity(&dist, &span(flat.len(), 0), mode)?;
            set_measure(&mut out, "tse_complexity", r.value, Unit::Bits, None);
            if r.standard_error > 0.0 {
                set_measure(&mut out, "standard_error", r.standard_error, Unit::Bits, None);
            }
        }
        Command::Pid => {
            plugin_only(cfg)?;
            expect_groups(cfg, &g, 2..=usize::MAX, "groups PREDICTOR;...;TARGET")?;
            let s = as_discrete(cfg, &data)?;
            let dist = empirical(&s, &flat)?;
            let mut offset = 0;
            let mut blocks: Vec<Vec<usize>> = g
                .iter()
                .map(|grp| {
                    let b = span(grp.len(), offset);
                    offset += grp.len();
                    b
                })
                .collect();
            let target = blocks.pop().expect("at least two groups");
            let f: RedundancyFunction = cfg.function.as_deref().unwrap_or("wb").parse()?;
            let d = pid_decompose(&dist, &blocks, &target, f)?;
            out.metadata.insert("function".into(), f.to_string());
            set_measure(&mut out, "mutual_information", d.total(), Unit::Bits, None);
            out.atoms = Some(decomposition_atoms(&d, cfg.base));
        }
        Command::Ped => {
            plugin_only(cfg)?;
            let s = as_discrete(cfg, &data)?;
            let dist = empirical(&s, &flat)?;
            let f: PedFunction = cfg.function.as_deref().unwrap_or("hmin").parse()?;
            let d = ped_decompose(&dist, &span(flat.len(), 0), f)?;
            out.metadata.insert("function".into(), f.to_string());
            set_measure(&mut out, "entropy", d.total(), Unit::Bits, None);
            out.atoms = Some(decomposition_atoms(&d, cfg.base));
        }
        Command::Phiid => {
            plugin_only(cfg)?;
            if flat.len() != 2 {
                return Err(Error::InvalidParameter("phiid takes exactly 2 columns".into()));
            }
            let s = as_discrete(cfg, &data)?;
            let f: PhiFunction = cfg.function.as_deref().unwrap_or("mmi").parse()?;
            let r = phiid_decompose(&s, &flat, cfg.tau, f)?;
            out.metadata.insert("function".into(), f.to_string());
            set_measure(&mut out, "excess_entropy", r.total(), Unit::Bits, None);
            out.atoms = Some(
                r.iter()
                    .map(|(a, v)| AtomValue {
                        atom: a.to_string(),
                        value: Unit::Bits.convert(v, cfg.base),
                    })
                    .collect(),
            );
        }
        Command::InferFc => {
            let d = prepared(cfg, &selected(&data, &flat)?)?;
            let mut net = infer_fc(&d, cfg.estimator, &network_surrogates(cfg, seed), cfg.alpha, cfg.correction)?;
            convert_network(&mut net, cfg.base);
            out.values.insert("significant_edges".into(), net.significant_edges().count() as f64);
            out.network = Some(net);
        }
        Command::InferTe => {
            let d = prepared(cfg, &selected(&data, &flat)?)?;
            let ec = EffectiveConfig {
                estimator: cfg.estimator,
                alpha: cfg.alpha,
                correction: cfg.correction,
                mode: cfg.selection,
                non_uniform: cfg.non_uniform,
                ..EffectiveConfig::new(cfg.k, cfg.l, network_surrogates(cfg, seed))
            };
            let mut eff = infer_effective(&d, &ec)?;
            let from = eff.network.metadata.unit;
            convert_network(&mut eff.network, cfg.base);
            for set in &mut eff.parents {
                for p in &mut set.parents {
                    p.contribution = from.convert(p.contribution, cfg.base);
                }
            }
            out.values.insert("edges".into(), eff.network.edges.len() as f64);
            out.hyperedges = Some(export_hyperedges(&eff.parents));
            out.network = Some(eff.network);
            out.parents = Some(eff.parents);
        }
        Command::Discretize => {
            let coarsening = cfg
                .coarsening
                .ok_or_else(|| Error::InvalidParameter("discretize needs --bins, --threshold or --ordinal".into()))?;
            let raw = ingest(cfg.input.as_deref().expect("checked by load"), false)?;
            let s = raw.continuous().expect("ingested without --discrete").select(&flat)?;
            let symbols = coarsening.apply(&s)?;
            out.metadata.insert("rows".into(), symbols.len().to_string());
            for (v, size) in symbols.alphabet().sizes().iter().enumerate() {
                out.values.insert(format!("alphabet_{}", symbols.names()[v]), *size as f64);
            }
            return Ok(RunResult {
                output: out,
                data: Some(Dataset::Discrete(symbols)),
            });
        }
        Command::Generate => unreachable!("handled above"),
    }
    Ok(RunResult { output: out, data: None })
}

/// Edge list rows `source,target,weight,p_value,significant`.
pub fn edge_list_csv(net: &NetworkResult, names: &[String]) -> Result<String> {
    let mut buf = Vec::new();
    let mut w = csv::Writer::from_writer(&mut buf);
    w.write_record(["source", "target", "weight", "p_value", "significant"])?;
    for e in &net.edges {
        w.write_record([
            names[e.source].clone(),
            names[e.target].clone(),
            e.weight.to_string(),
            e.p_value.to_string(),
            e.significant.to_string(),
        ])?;
    }
    w.flush()?;
    drop(w);
    String::from_utf8(buf).map_err(|e| Error::InvalidParameter(e.to_string()))
}

/// Write via a sibling temporary file so a failed run leaves nothing behind.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Render everything a run produced that belongs on disk. Returns the CSV
/// to print when a table has no output path.
pub fn write_outputs(result: &RunResult) -> Result<Option<String>> {
    let out = &result.output;
    let cfg = &out.config;
    let mut pending: Vec<(PathBuf, String)> = Vec::new();
    let mut stdout_csv = None;
    if let Some(data) = &result.data {
        let header = serde_json::to_string(&out.config)?;
        let csv = dataset_to_csv(data, Some(&format!("infolab {} seed={}\n{header}", out.command, out.seed)))?;
        match &cfg.output {
            Some(p) => pending.push((p.clone(), csv)),
            None => stdout_csv = Some(csv),
        }
    } else if let Some(p) = &cfg.output {
        pending.push((p.clone(), out.to_json()?));
    }
    if let (Some(p), Some(net)) = (&cfg.edges, &out.network) {
        let names: Vec<String> = out.variables.clone();
        pending.push((p.clone(), edge_list_csv(net, &names)?));
    }
    for (p, text) in &pending {
        write_atomic(p, text)?;
    }
    Ok(stdout_csv)
}

/// Human-readable summary for standard output.
pub fn render_table(out: &RunOutput) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let unit = out.unit;
    let _ = writeln!(s, "{} (seed {})", out.command, out.seed);
    if !out.variables.is_empty() {
        let _ = writeln!(s, "variables: {}", out.variables.join(", "));
    }
    for (k, v) in &out.values {
        let _ = writeln!(s, "{k:<34} {v:>14.6}");
    }
    for (k, v) in &out.metadata {
        let _ = writeln!(s, "{k:<34} {v:>14}");
    }
    if let Some(t) = &out.significance {
        let _ = writeln!(s, "{:<34} {:>14.6}", "p_value", t.p_value);
        let _ = writeln!(s, "{:<34} {:>14.6}", "null_mean", t.null_mean);
        let _ = writeln!(s, "{:<34} {:>14.6}", "bias_corrected", t.bias_corrected);
        let _ = writeln!(s, "{:<34} {:>14}", "surrogates", t.surrogates);
    }
    if let Some(atoms) = &out.atoms {
        let _ = writeln!(s, "atoms ({unit}):");
        for a in atoms {
            let _ = writeln!(s, "  {:<32} {:>14.6}", a.atom, a.value);
        }
    }
    if let Some(net) = &out.network {
        let name = |i: usize| out.variables.get(i).cloned().unwrap_or_else(|| i.to_string());
        let _ = writeln!(s, "{:<12} {:<12} {:>12} {:>10} {:>12}", "source", "target", "weight", "p", "significant");
        for e in &net.edges {
            let _ = writeln!(
                s,
                "{:<12} {:<12} {:>12.6} {:>10.4} {:>12}",
                name(e.source),
                name(e.target),
                e.weight,
                e.p_value,
                e.significant
            );
        }
        if let Some(h) = &out.hyperedges {
            for e in h {
                let src: Vec<String> = e.sources.iter().map(|&i| name(i)).collect();
                let _ = writeln!(s, "hyperedge {{{}}} -> {}", src.join(", "), name(e.target));
            }
        }
    }
    if let Some(l) = &out.locals {
        let _ = writeln!(s, "locals: {} values from row {}", l.values.len(), l.start);
    }
    let _ = writeln!(s, "unit: {unit}");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{Gate, Mode};
    use std::io::Write;

    fn csv_file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    fn run_on(text: &str, mut cfg: RunConfig) -> Result<RunOutput> {
        let f = csv_file(text);
        cfg.input = Some(f.path().to_path_buf());
        cfg.seed.get_or_insert(1);
        Ok(run_command(&cfg)?.output)
    }

    #[test]
    fn ingest_shapes_and_headers() {
        let body: String = (0..100).map(|t| format!("{t},{},{}\n", t % 3, 0.5 * t as f64)).collect();
        let d = ingest_reader(body.as_bytes(), false).unwrap();
        assert_eq!((d.len(), d.n_vars()), (100, 3));
        let d = ingest_reader(format!("a,b,c\n{body}").as_bytes(), false).unwrap();
        assert_eq!(d.names(), ["a", "b", "c"]);
        assert_eq!(d.len(), 100);
    }

    #[test]
    fn ingest_errors_name_the_line() {
        match ingest_reader("x,y\n1,2\n3\n".as_bytes(), false) {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        match ingest_reader("1,2\n3,abc\n".as_bytes(), false) {
            Err(Error::Parse { line: 2, message }) => assert!(message.contains("abc")),
            other => panic!("{other:?}"),
        }
        assert!(ingest_reader("".as_bytes(), false).is_err());
        assert!(ingest_reader("a,b\n".as_bytes(), false).is_err());
        assert!(ingest_reader("0.5,1\n".as_bytes(), true).is_err());
    }

    #[test]
    fn copied_bit_mi_is_one_bit() {
        let body: String = (0..64).map(|t| format!("{},{}\n", t % 2, t % 2)).collect();
        let mut cfg = RunConfig::new(Command::Mi);
        cfg.discrete = true;
        cfg.columns = vec![vec!["0".into()], vec!["1".into()]];
        let out = run_on(&body, cfg.clone()).unwrap();
        assert!((out.value("mutual_information").unwrap() - 1.0).abs() < 1e-12);
        cfg.base = Unit::Nats;
        let out = run_on(&body, cfg).unwrap();
        assert!((out.value("mutual_information").unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(out.config.seed, Some(1));
    }

    #[test]
    fn invalid_combinations_are_rejected() {
        let body: String = (0..40).map(|t| format!("{},{},{},{},{},{}\n", t % 2, t % 3, t % 2, t % 5, t % 2, t % 7)).collect();
        let mut cfg = RunConfig::new(Command::Pid);
        cfg.discrete = true;
        cfg.columns = (0..6).map(|v| vec![v.to_string()]).collect();
        assert!(run_on(&body, cfg).is_err());
        let mut cfg = RunConfig::new(Command::Mi);
        cfg.discrete = true;
        cfg.estimator = Estimator::Gaussian;
        cfg.columns = vec![vec!["0".into()], vec!["1".into()]];
        assert!(run_on(&body, cfg.clone()).is_err());
        cfg.cast = true;
        assert!(run_on(&body, cfg).is_ok());
        let mut cfg = RunConfig::new(Command::Oinfo);
        cfg.columns = vec![vec!["0".into(), "1".into()]];
        assert!(run_on(&body, cfg).is_err(), "plug-in on unparsed floats");
    }

    #[test]
    fn locals_average_to_the_value() {
        let body: String = (0..90).map(|t| format!("{},{},{}\n", t % 2, (t / 2) % 3, (t * 7 % 5) % 2)).collect();
        for command in [Command::Entropy, Command::Cmi, Command::Tc, Command::Oinfo, Command::Te] {
            let mut cfg = RunConfig::new(command);
            cfg.discrete = true;
            cfg.local = true;
            if command == Command::Cmi {
                cfg.columns = vec![vec!["0".into()], vec!["1".into()], vec!["2".into()]];
            }
            if command == Command::Te {
                cfg.columns = vec![vec!["0".into()], vec!["1".into()]];
            }
            let out = run_on(&body, cfg).unwrap();
            let l = out.locals.as_ref().unwrap();
            let mean = l.values.iter().sum::<f64>() / l.values.len() as f64;
            let v = *out.values.values().next().unwrap();
            assert!((mean - v).abs() < 1e-9, "{command}: {mean} vs {v}");
        }
    }

    #[test]
    fn generated_xor_through_the_pipeline() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("xor.csv");
        let mut cfg = RunConfig::new(Command::Generate);
        cfg.generator = Some(GeneratorSpec::Gate {
            gate: Gate::Xor,
            mode: Mode::Static,
        });
        cfg.length = 4000;
        cfg.seed = Some(3);
        cfg.output = Some(path.clone());
        write_outputs(&run_command(&cfg).unwrap()).unwrap();
        let mut o = RunConfig::new(Command::Oinfo);
        o.input = Some(path);
        o.discrete = true;
        o.seed = Some(3);
        let out = run_command(&o).unwrap().output;
        assert!((out.value("o_information").unwrap() + 1.0).abs() < 0.01);
    }

    #[test]
    fn documents_embed_the_config_and_failures_write_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("d.csv");
        std::fs::write(&data, "a,b\n0,1\n1,0\n0,0\n1,1\n").unwrap();
        let json = dir.path().join("out.json");
        let mut cfg = RunConfig::new(Command::Entropy);
        cfg.input = Some(data.clone());
        cfg.discrete = true;
        cfg.output = Some(json.clone());
        let r = run_command(&cfg).unwrap();
        write_outputs(&r).unwrap();
        let back: RunOutput = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
        assert_eq!(back.config.seed, Some(back.seed));
        assert_eq!(back.config.input, Some(data.clone()));
        assert_eq!(back.value("entropy"), Some(2.0));

        let bad = dir.path().join("bad.json");
        cfg.columns = vec![vec!["nope".into()]];
        cfg.output = Some(bad.clone());
        assert!(run_command(&cfg).is_err());
        assert!(!bad.exists());
    }
}
