//! Surrogate data, null distributions and empirical significance.
//!
//! Surrogate `i` of a run draws from a generator seeded by
//! `derive_seed(master, [i])`, so a null distribution depends only on the
//! data, the measure and the master seed, never on thread scheduling.
//! At least 19 surrogates are needed before `p < 0.05` is attainable.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::series::{ContinuousSeries, DiscreteSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SurrogateMethod {
    /// Random permutation of time points; keeps the marginal histogram.
    Shuffle,
    /// Rotation by an offset in `1..T`; keeps autocorrelation up to the seam.
    #[default]
    CircularShift,
}

impl std::str::FromStr for SurrogateMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shuffle" => Ok(Self::Shuffle),
            "circular-shift" | "circular" | "shift" => Ok(Self::CircularShift),
            other => Err(Error::InvalidParameter(format!("unknown surrogate method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurrogateConfig {
    pub method: SurrogateMethod,
    pub count: usize,
    pub seed: u64,
    /// Variables randomized in each surrogate.
    pub scope: Vec<usize>,
}

impl SurrogateConfig {
    pub fn new(method: SurrogateMethod, count: usize, seed: u64, scope: Vec<usize>) -> Self {
        Self {
            method,
            count,
            seed,
            scope,
        }
    }

    /// Same settings with another scope.
    pub fn with_scope(&self, scope: Vec<usize>) -> Self {
        Self {
            scope,
            ..self.clone()
        }
    }

    /// Same settings with a master seed derived along `path`.
    pub fn derived(&self, path: &[u64]) -> Self {
        Self {
            seed: derive_seed(self.seed, path),
            ..self.clone()
        }
    }
}

/// Series whose columns can be reindexed in time.
pub trait Resample: Sized {
    fn len(&self) -> usize;
    fn n_vars(&self) -> usize;
    /// Copy with column `variable` replaced by `old[index[t]]` at each `t`.
    fn reindexed(&self, variable: usize, index: &[usize]) -> Result<Self>;
}

impl Resample for DiscreteSeries {
    fn len(&self) -> usize {
        DiscreteSeries::len(self)
    }

    fn n_vars(&self) -> usize {
        DiscreteSeries::n_vars(self)
    }

    fn reindexed(&self, variable: usize, index: &[usize]) -> Result<Self> {
        self.check_variable(variable)?;
        let c = self.column(variable);
        self.with_column(variable, index.iter().map(|&i| c[i]).collect())
    }
}

impl Resample for ContinuousSeries {
    fn len(&self) -> usize {
        ContinuousSeries::len(self)
    }

    fn n_vars(&self) -> usize {
        ContinuousSeries::n_vars(self)
    }

    fn reindexed(&self, variable: usize, index: &[usize]) -> Result<Self> {
        self.check_variable(variable)?;
        let c = self.column(variable);
        self.with_column(variable, index.iter().map(|&i| c[i]).collect())
    }
}

fn time_index(method: SurrogateMethod, len: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    match method {
        SurrogateMethod::Shuffle => {
            let mut idx: Vec<usize> = (0..len).collect();
            idx.shuffle(rng);
            idx
        }
        SurrogateMethod::CircularShift => {
            let offset = rng.random_range(1..len);
            (0..len).map(|t| (t + offset) % len).collect()
        }
    }
}

/// One surrogate: each variable in `variables` is randomized independently
/// with a generator seeded from `seed` and the variable index.
pub fn make_surrogate<S: Resample>(
    series: &S,
    variables: &[usize],
    method: SurrogateMethod,
    seed: u64,
) -> Result<S> {
    if series.len() < 2 {
        return Err(Error::SeriesTooShort {
            needed: 2,
            available: series.len(),
        });
    }
    if variables.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut out: Option<S> = None;
    for &v in variables {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[v as u64]));
        let index = time_index(method, series.len(), &mut rng);
        out = Some(out.as_ref().unwrap_or(series).reindexed(v, &index)?);
    }
    Ok(out.expect("non-empty scope"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullDistribution {
    pub values: Vec<f64>,
    pub method: SurrogateMethod,
    pub seed: u64,
}

impl NullDistribution {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> Result<f64> {
        if self.values.is_empty() {
            return Err(Error::EmptyNulls);
        }
        Ok(self.values.iter().sum::<f64>() / self.values.len() as f64)
    }

    pub fn p_value(&self, empirical: f64) -> Result<f64> {
        p_value(empirical, &self.values)
    }

    pub fn bias_correct(&self, empirical: f64) -> Result<f64> {
        bias_correct(empirical, &self.values)
    }
}

/// Evaluate `measure` on `cfg.count` surrogates of `series`.
pub fn null_distribution<S, F>(measure: F, series: &S, cfg: &SurrogateConfig) -> Result<NullDistribution>
where
    S: Resample + Sync,
    F: Fn(&S) -> Result<f64> + Sync,
{
    if cfg.count == 0 {
        return Err(Error::InvalidParameter("surrogate count must be at least 1".into()));
    }
    let values = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let s = make_surrogate(series, &cfg.scope, cfg.method, derive_seed(cfg.seed, &[i as u64]))?;
            measure(&s)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(NullDistribution {
        values,
        method: cfg.method,
        seed: cfg.seed,
    })
}

/// `(1 + #{null ≥ empirical}) / (n + 1)`.
pub fn p_value(empirical: f64, nulls: &[f64]) -> Result<f64> {
    if nulls.is_empty() {
        return Err(Error::EmptyNulls);
    }
    let above = nulls.iter().filter(|&&v| v >= empirical).count();
    Ok((1 + above) as f64 / (nulls.len() + 1) as f64)
}

/// `empirical - mean(nulls)`.
pub fn bias_correct(empirical: f64, nulls: &[f64]) -> Result<f64> {
    if nulls.is_empty() {
        return Err(Error::EmptyNulls);
    }
    Ok(empirical - nulls.iter().sum::<f64>() / nulls.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceTest {
    pub value: f64,
    pub p_value: f64,
    pub null_mean: f64,
    pub bias_corrected: f64,
    pub surrogates: usize,
}

/// Measure the data, build its null distribution and summarize.
pub fn significance<S, F>(measure: F, series: &S, cfg: &SurrogateConfig) -> Result<SignificanceTest>
where
    S: Resample + Sync,
    F: Fn(&S) -> Result<f64> + Sync,
{
    let value = measure(series)?;
    let nulls = null_distribution(&measure, series, cfg)?;
    let null_mean = nulls.mean()?;
    Ok(SignificanceTest {
        value,
        p_value: nulls.p_value(value)?,
        null_mean,
        bias_corrected: value - null_mean,
        surrogates: nulls.len(),
    })
}
