//! Information dynamics on discrete time series: storage, transfer and
//! predictability, each with a local series over valid time indices.
//!
//! Every measure is a (conditional) mutual information or conditional
//! entropy between blocks of lagged variables. Blocks are read from one
//! aligned sample set that starts at the largest lag in use, so measures
//! sharing parameters share samples.

use crate::distribution::JointDistribution;
use crate::error::{Error, Result};
use crate::series::DiscreteSeries;
use crate::shannon::{conditional_mutual_information, entropy, local_cmi_over_support, marginal_at_support};
use crate::units::LocalSeries;
use serde::{Deserialize, Serialize};

/// History length `k` and delay `τ`: the past block is
/// `(x[t-τ], x[t-2τ], …, x[t-kτ])`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    pub history: usize,
    pub delay: usize,
}

impl Default for EmbeddingSpec {
    fn default() -> Self {
        Self { history: 1, delay: 1 }
    }
}

impl EmbeddingSpec {
    pub fn new(history: usize, delay: usize) -> Result<Self> {
        if history == 0 || delay == 0 {
            return Err(Error::InvalidParameter("history and delay must be at least 1".into()));
        }
        Ok(Self { history, delay })
    }

    pub fn history(k: usize) -> Result<Self> {
        Self::new(k, 1)
    }

    pub fn lags(&self) -> Vec<usize> {
        (1..=self.history).map(|i| i * self.delay).collect()
    }

    pub fn span(&self) -> usize {
        self.history * self.delay
    }
}

/// Expected value, aligned locals and the embeddings used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicMeasure {
    pub expected: f64,
    pub locals: LocalSeries,
    pub embedding: Vec<EmbeddingSpec>,
    /// Time index of the first local value.
    pub start: usize,
}

/// A variable read at a list of lags relative to the reference time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaggedBlock {
    pub variable: usize,
    pub lags: Vec<usize>,
}

impl LaggedBlock {
    pub fn new(variable: usize, lags: Vec<usize>) -> Self {
        Self { variable, lags }
    }

    pub fn present(variable: usize) -> Self {
        Self::new(variable, vec![0])
    }

    pub fn past(variable: usize, spec: EmbeddingSpec) -> Self {
        Self::new(variable, spec.lags())
    }
}

/// Joint distribution over a list of block sets with the support index of
/// every aligned time step.
pub(crate) struct Aligned {
    pub dist: JointDistribution,
    pub groups: Vec<Vec<usize>>,
    pub rows: Vec<usize>,
    pub start: usize,
}

pub(crate) fn align(series: &DiscreteSeries, sets: &[&[LaggedBlock]]) -> Result<Aligned> {
    let mut variables = Vec::new();
    let mut lags = Vec::new();
    let mut groups = Vec::with_capacity(sets.len());
    for set in sets {
        let mut g = Vec::new();
        for block in set.iter() {
            series.check_variable(block.variable)?;
            for &l in &block.lags {
                g.push(variables.len());
                variables.push(block.variable);
                lags.push(l);
            }
        }
        groups.push(g);
    }
    let dist = JointDistribution::from_series(series, &variables, &lags)?;
    let start = lags.iter().copied().max().unwrap_or(0);
    let codec = dist.codec();
    let entries = dist.entries();
    let mut state = vec![0usize; variables.len()];
    let rows = (start..series.len())
        .map(|t| {
            for (i, (&v, &l)) in variables.iter().zip(&lags).enumerate() {
                state[i] = series.get(t - l, v);
            }
            let code = codec.encode(&state);
            entries
                .binary_search_by_key(&code, |e| e.0)
                .expect("every aligned row is in the empirical support")
        })
        .collect();
    Ok(Aligned {
        dist,
        groups,
        rows,
        start,
    })
}

fn check_length(series: &DiscreteSeries, span: usize) -> Result<()> {
    if span >= series.len() {
        return Err(Error::SeriesTooShort {
            needed: span,
            available: series.len(),
        });
    }
    Ok(())
}

/// `I(a; b | c)` between block sets with its local series.
pub fn lagged_cmi(
    series: &DiscreteSeries,
    a: &[LaggedBlock],
    b: &[LaggedBlock],
    c: &[LaggedBlock],
    embedding: Vec<EmbeddingSpec>,
) -> Result<DynamicMeasure> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySelection);
    }
    let al = align(series, &[a, b, c])?;
    let (ga, gb, gc) = (&al.groups[0], &al.groups[1], &al.groups[2]);
    let expected = conditional_mutual_information(&al.dist, ga, gb, gc)?;
    let support = local_cmi_over_support(&al.dist, ga, gb, gc)?;
    Ok(DynamicMeasure {
        expected,
        locals: LocalSeries::new(al.rows.iter().map(|&i| support[i]).collect()),
        embedding,
        start: al.start,
    })
}

/// `H(a | c)` between block sets with its local series.
pub fn lagged_conditional_entropy(
    series: &DiscreteSeries,
    a: &[LaggedBlock],
    c: &[LaggedBlock],
    embedding: Vec<EmbeddingSpec>,
) -> Result<DynamicMeasure> {
    if a.is_empty() {
        return Err(Error::EmptySelection);
    }
    let al = align(series, &[a, c])?;
    let (ga, gc) = (&al.groups[0], &al.groups[1]);
    let both: Vec<usize> = ga.iter().chain(gc).copied().collect();
    let expected = (entropy(&al.dist, &both)? - entropy(&al.dist, gc)?).max(0.0);
    let pj = marginal_at_support(&al.dist, &both);
    let pc = marginal_at_support(&al.dist, gc);
    Ok(DynamicMeasure {
        expected,
        locals: LocalSeries::new(al.rows.iter().map(|&i| (pc[i] / pj[i]).log2()).collect()),
        embedding,
        start: al.start,
    })
}

/// Delay embedding of one variable: row `i` holds
/// `(x[t-τ], …, x[t-kτ])` for `t = kτ + i`.
pub fn embed(series: &DiscreteSeries, variable: usize, spec: EmbeddingSpec) -> Result<DiscreteSeries> {
    series.check_variable(variable)?;
    check_length(series, spec.span())?;
    let x = series.column(variable);
    let cols = spec
        .lags()
        .into_iter()
        .map(|l| (spec.span()..series.len()).map(|t| x[t - l]).collect())
        .collect();
    let size = series.alphabet().size(variable);
    DiscreteSeries::with_alphabet(cols, crate::series::Alphabet::new(vec![size; spec.history])?)
}

/// `H(X_t | X_{t-k:t-1})`.
pub fn entropy_rate(series: &DiscreteSeries, variable: usize, k: usize) -> Result<DynamicMeasure> {
    let spec = EmbeddingSpec::history(k)?;
    entropy_rate_with(series, variable, spec)
}

pub fn entropy_rate_with(series: &DiscreteSeries, variable: usize, spec: EmbeddingSpec) -> Result<DynamicMeasure> {
    check_length(series, spec.span())?;
    lagged_conditional_entropy(
        series,
        &[LaggedBlock::present(variable)],
        &[LaggedBlock::past(variable, spec)],
        vec![spec],
    )
}

/// `I(X_{t-k:t-1}; X_t)`.
pub fn active_information_storage(series: &DiscreteSeries, variable: usize, k: usize) -> Result<DynamicMeasure> {
    active_information_storage_with(series, variable, EmbeddingSpec::history(k)?)
}

pub fn active_information_storage_with(
    series: &DiscreteSeries,
    variable: usize,
    spec: EmbeddingSpec,
) -> Result<DynamicMeasure> {
    check_length(series, spec.span())?;
    lagged_cmi(
        series,
        &[LaggedBlock::past(variable, spec)],
        &[LaggedBlock::present(variable)],
        &[],
        vec![spec],
    )
}

/// `TE(X→Y) = I(X_{t-k:t-1}; Y_t | Y_{t-l:t-1})`.
pub fn transfer_entropy(
    series: &DiscreteSeries,
    source: usize,
    target: usize,
    k: usize,
    l: usize,
) -> Result<DynamicMeasure> {
    transfer_entropy_with(series, source, target, EmbeddingSpec::history(k)?, EmbeddingSpec::history(l)?)
}

pub fn transfer_entropy_with(
    series: &DiscreteSeries,
    source: usize,
    target: usize,
    source_spec: EmbeddingSpec,
    target_spec: EmbeddingSpec,
) -> Result<DynamicMeasure> {
    if source == target {
        return Err(Error::InvalidParameter("source and target must differ".into()));
    }
    conditional_transfer_entropy_with(series, &[source], target, &[], source_spec, target_spec, EmbeddingSpec::default())
}

/// Transfer entropy from one or more sources, conditioned on the pasts of
/// `conditioning` (history `r`). With several sources this is the joint
/// transfer entropy.
pub fn conditional_transfer_entropy(
    series: &DiscreteSeries,
    sources: &[usize],
    target: usize,
    conditioning: &[usize],
    k: usize,
    l: usize,
    r: usize,
) -> Result<DynamicMeasure> {
    conditional_transfer_entropy_with(
        series,
        sources,
        target,
        conditioning,
        EmbeddingSpec::history(k)?,
        EmbeddingSpec::history(l)?,
        EmbeddingSpec::history(r)?,
    )
}

pub fn conditional_transfer_entropy_with(
    series: &DiscreteSeries,
    sources: &[usize],
    target: usize,
    conditioning: &[usize],
    source_spec: EmbeddingSpec,
    target_spec: EmbeddingSpec,
    cond_spec: EmbeddingSpec,
) -> Result<DynamicMeasure> {
    if sources.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut all: Vec<usize> = sources.iter().chain(conditioning).copied().collect();
    all.push(target);
    let n = all.len();
    all.sort_unstable();
    all.dedup();
    if all.len() != n {
        return Err(Error::InvalidParameter(
            "sources, target and conditioning variables must be distinct".into(),
        ));
    }
    let span = source_spec.span().max(target_spec.span()).max(if conditioning.is_empty() {
        0
    } else {
        cond_spec.span()
    });
    check_length(series, span)?;
    let a: Vec<LaggedBlock> = sources.iter().map(|&s| LaggedBlock::past(s, source_spec)).collect();
    let mut c = vec![LaggedBlock::past(target, target_spec)];
    c.extend(conditioning.iter().map(|&z| LaggedBlock::past(z, cond_spec)));
    let mut embedding = vec![source_spec, target_spec];
    if !conditioning.is_empty() {
        embedding.push(cond_spec);
    }
    lagged_cmi(series, &a, &[LaggedBlock::present(target)], &c, embedding)
}

/// Joint transfer entropy from a set of sources into `target`.
pub fn joint_transfer_entropy(
    series: &DiscreteSeries,
    sources: &[usize],
    target: usize,
    k: usize,
    l: usize,
) -> Result<DynamicMeasure> {
    conditional_transfer_entropy(series, sources, target, &[], k, l, 1)
}

/// Transfer entropy conditioned on the pasts (history `q`) of every other
/// variable in the series.
///
/// The conditioning state space grows exponentially with the system size;
/// plug-in estimates become unreliable long before they become expensive.
pub fn global_transfer_entropy(
    series: &DiscreteSeries,
    source: usize,
    target: usize,
    k: usize,
    l: usize,
    q: usize,
) -> Result<DynamicMeasure> {
    if series.n_vars() < 3 {
        return Err(Error::InvalidParameter("global transfer entropy needs at least 3 variables".into()));
    }
    if source == target {
        return Err(Error::InvalidParameter("source and target must differ".into()));
    }
    series.check_variable(source)?;
    series.check_variable(target)?;
    let rest: Vec<usize> = (0..series.n_vars()).filter(|&v| v != source && v != target).collect();
    conditional_transfer_entropy(series, &[source], target, &rest, k, l, q)
}

/// Truncated excess entropy `I(X_{t-k:t-1}; X_{t:t+j-1})` of a set of
/// variables. Locals are indexed by the first future step `t`.
pub fn excess_entropy(series: &DiscreteSeries, variables: &[usize], k: usize, j: usize) -> Result<DynamicMeasure> {
    if variables.is_empty() {
        return Err(Error::EmptySelection);
    }
    if k == 0 || j == 0 {
        return Err(Error::InvalidParameter("past and future lengths must be at least 1".into()));
    }
    check_length(series, k + j - 1)?;
    // Reference time is the last future step.
    let past: Vec<LaggedBlock> = variables
        .iter()
        .map(|&v| LaggedBlock::new(v, (j..j + k).collect()))
        .collect();
    let future: Vec<LaggedBlock> = variables
        .iter()
        .map(|&v| LaggedBlock::new(v, (0..j).rev().collect()))
        .collect();
    let mut m = lagged_cmi(series, &past, &future, &[], vec![EmbeddingSpec::history(k)?, EmbeddingSpec::history(j)?])?;
    m.start -= j - 1;
    Ok(m)
}
