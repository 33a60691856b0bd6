//! Sparse joint probability tables over discrete multivariate state spaces.
//!
//! A [`JointDistribution`] stores only states of positive probability, keyed
//! by a mixed-radix code (first variable most significant), sorted by code.
//! Absent states have probability zero.

use crate::error::{Error, Result};
use crate::series::{Alphabet, DiscreteSeries};
use std::collections::BTreeMap;

/// Tolerance within which a table counts as normalized.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;
/// Largest deviation from 1 that constructors silently renormalize.
pub const RENORMALIZE_LIMIT: f64 = 1e-6;

/// Mixed-radix encoder for joint states of an alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Codec {
    sizes: Vec<u64>,
    strides: Vec<u64>,
}

impl Codec {
    pub(crate) fn new(alphabet: &Alphabet) -> Result<Self> {
        alphabet.joint_size().ok_or(Error::StateSpaceTooLarge)?;
        let sizes: Vec<u64> = alphabet.sizes().iter().map(|&s| s as u64).collect();
        let mut strides = vec![1u64; sizes.len()];
        for i in (0..sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sizes[i + 1];
        }
        Ok(Self { sizes, strides })
    }

    pub(crate) fn encode(&self, state: &[usize]) -> u64 {
        state
            .iter()
            .zip(&self.strides)
            .map(|(&s, &st)| s as u64 * st)
            .sum()
    }

    pub(crate) fn digit(&self, code: u64, variable: usize) -> usize {
        ((code / self.strides[variable]) % self.sizes[variable]) as usize
    }

    pub(crate) fn decode_into(&self, code: u64, out: &mut Vec<usize>) {
        out.clear();
        out.extend((0..self.sizes.len()).map(|v| self.digit(code, v)));
    }

    /// Code of the projection of `code` onto `variables`, in the radix of
    /// the selected sub-alphabet.
    pub(crate) fn project(&self, code: u64, variables: &[usize]) -> u64 {
        variables
            .iter()
            .fold(0u64, |acc, &v| acc * self.sizes[v] + self.digit(code, v) as u64)
    }
}

/// A discrete probability table over a multivariate state space.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    alphabet: Alphabet,
    codec: Codec,
    table: Vec<(u64, f64)>,
}

impl JointDistribution {
    /// Build from `(state, probability)` pairs. Repeated states are summed,
    /// zero entries dropped. A total within [`RENORMALIZE_LIMIT`] of one is
    /// renormalized; anything further off is an error.
    pub fn new<I>(alphabet: Alphabet, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let codec = Codec::new(&alphabet)?;
        let mut acc: BTreeMap<u64, f64> = BTreeMap::new();
        for (state, p) in entries {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidProbability(p));
            }
            check_state(&alphabet, &state)?;
            if p > 0.0 {
                *acc.entry(codec.encode(&state)).or_insert(0.0) += p;
            }
        }
        Self::from_code_map(alphabet, codec, acc.into_iter().collect())
    }

    /// Build from a dense row-major table (last variable varies fastest).
    pub fn from_dense(sizes: &[usize], probs: &[f64]) -> Result<Self> {
        let alphabet = Alphabet::new(sizes.to_vec())?;
        let codec = Codec::new(&alphabet)?;
        let expected = alphabet.joint_size().ok_or(Error::StateSpaceTooLarge)?;
        if probs.len() as u64 != expected {
            return Err(Error::InvalidParameter(format!(
                "dense table has {} entries, alphabet needs {expected}",
                probs.len()
            )));
        }
        let mut table = Vec::new();
        for (code, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidProbability(p));
            }
            if p > 0.0 {
                table.push((code as u64, p));
            }
        }
        Self::from_code_map(alphabet, codec, table)
    }

    /// Uniform distribution over every joint state.
    pub fn uniform(sizes: &[usize]) -> Result<Self> {
        let alphabet = Alphabet::new(sizes.to_vec())?;
        let n = alphabet.joint_size().ok_or(Error::StateSpaceTooLarge)?;
        if n > 1 << 24 {
            return Err(Error::TooLarge(format!("{n} states for a dense uniform table")));
        }
        Self::from_dense(sizes, &vec![1.0 / n as f64; n as usize])
    }

    /// Empirical distribution from `(state, count)` pairs.
    pub fn from_counts<I>(alphabet: Alphabet, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, u64)>,
    {
        let codec = Codec::new(&alphabet)?;
        let mut acc: BTreeMap<u64, u64> = BTreeMap::new();
        for (state, c) in counts {
            check_state(&alphabet, &state)?;
            if c > 0 {
                *acc.entry(codec.encode(&state)).or_insert(0) += c;
            }
        }
        let total: u64 = acc.values().sum();
        if total == 0 {
            return Err(Error::EmptySelection);
        }
        let table = acc
            .into_iter()
            .map(|(k, c)| (k, c as f64 / total as f64))
            .collect();
        Ok(Self {
            alphabet,
            codec,
            table,
        })
    }

    /// Empirical joint distribution of `variables` read at the given lags.
    ///
    /// Lag `l` for a variable pairs `x_v(t - l)` with reference time `t`;
    /// the first `max(lags)` rows are dropped so every sample is aligned.
    pub fn from_series(series: &DiscreteSeries, variables: &[usize], lags: &[usize]) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::EmptySelection);
        }
        if lags.len() != variables.len() {
            return Err(Error::InvalidParameter(format!(
                "{} lags for {} variables",
                lags.len(),
                variables.len()
            )));
        }
        for &v in variables {
            series.check_variable(v)?;
        }
        let max_lag = lags.iter().copied().max().unwrap_or(0);
        if max_lag >= series.len() {
            return Err(Error::SeriesTooShort {
                needed: max_lag,
                available: series.len(),
            });
        }
        let alphabet = series.alphabet().select(variables);
        let codec = Codec::new(&alphabet)?;
        let mut codes: Vec<u64> = (max_lag..series.len())
            .map(|t| {
                variables
                    .iter()
                    .zip(lags)
                    .fold(0u64, |acc, (&v, &l)| {
                        acc * series.alphabet().size(v) as u64 + series.get(t - l, v) as u64
                    })
            })
            .collect();
        let n = codes.len() as f64;
        codes.sort_unstable();
        let mut table = Vec::new();
        for run in codes.chunk_by(|a, b| a == b) {
            table.push((run[0], run.len() as f64 / n));
        }
        Ok(Self {
            alphabet,
            codec,
            table,
        })
    }

    fn from_code_map(alphabet: Alphabet, codec: Codec, mut table: Vec<(u64, f64)>) -> Result<Self> {
        let total: f64 = table.iter().map(|e| e.1).sum();
        if (total - 1.0).abs() > RENORMALIZE_LIMIT {
            return Err(Error::NotNormalized(total));
        }
        if (total - 1.0).abs() > 0.0 {
            for e in &mut table {
                e.1 /= total;
            }
        }
        table.sort_unstable_by_key(|e| e.0);
        Ok(Self {
            alphabet,
            codec,
            table,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn n_vars(&self) -> usize {
        self.alphabet.len()
    }

    /// Number of states with positive probability.
    pub fn support_size(&self) -> usize {
        self.table.len()
    }

    /// Probability of a full joint state (0 when absent or invalid).
    pub fn prob(&self, state: &[usize]) -> f64 {
        if check_state(&self.alphabet, state).is_err() {
            return 0.0;
        }
        let code = self.codec.encode(state);
        self.table
            .binary_search_by_key(&code, |e| e.0)
            .map_or(0.0, |i| self.table[i].1)
    }

    /// Iterate over `(state, probability)` for states in the support.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.table.iter().map(move |&(code, p)| {
            let mut s = Vec::with_capacity(self.n_vars());
            self.codec.decode_into(code, &mut s);
            (s, p)
        })
    }

    pub(crate) fn codec(&self) -> &Codec {
        &self.codec
    }

    pub(crate) fn entries(&self) -> &[(u64, f64)] {
        &self.table
    }

    pub fn check_variables(&self, variables: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.n_vars()];
        for &v in variables {
            if v >= self.n_vars() {
                return Err(Error::VariableOutOfRange {
                    index: v,
                    n_vars: self.n_vars(),
                });
            }
            if seen[v] {
                return Err(Error::DuplicateVariable(v));
            }
            seen[v] = true;
        }
        Ok(())
    }

    /// Marginal over `keep`, with variables reordered as listed.
    pub fn marginalize(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptySelection);
        }
        self.check_variables(keep)?;
        let alphabet = self.alphabet.select(keep);
        let codec = Codec::new(&alphabet)?;
        let mut projected: Vec<(u64, f64)> = self
            .table
            .iter()
            .map(|&(c, p)| (self.codec.project(c, keep), p))
            .collect();
        projected.sort_by_key(|e| e.0);
        let mut table: Vec<(u64, f64)> = Vec::with_capacity(projected.len());
        for (c, p) in projected {
            match table.last_mut() {
                Some(last) if last.0 == c => last.1 += p,
                _ => table.push((c, p)),
            }
        }
        Ok(Self {
            alphabet,
            codec,
            table,
        })
    }

    /// Distribution of the remaining variables given fixed symbols for the
    /// `evidence` variables.
    pub fn condition(&self, evidence: &[(usize, usize)]) -> Result<Self> {
        let vars: Vec<usize> = evidence.iter().map(|e| e.0).collect();
        self.check_variables(&vars)?;
        let rest: Vec<usize> = (0..self.n_vars()).filter(|v| !vars.contains(v)).collect();
        if rest.is_empty() {
            return Err(Error::EmptySelection);
        }
        let matching: Vec<(u64, f64)> = self
            .table
            .iter()
            .filter(|&&(c, _)| evidence.iter().all(|&(v, s)| self.codec.digit(c, v) == s))
            .copied()
            .collect();
        let mass: f64 = matching.iter().map(|e| e.1).sum();
        if mass <= 0.0 {
            return Err(Error::ZeroProbability);
        }
        let filtered = Self {
            alphabet: self.alphabet.clone(),
            codec: self.codec.clone(),
            table: matching.into_iter().map(|(c, p)| (c, p / mass)).collect(),
        };
        filtered.marginalize(&rest)
    }

    /// Independent product `P(x, y) = P_a(x) P_b(y)` over the concatenated alphabet.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let alphabet = self.alphabet.concat(&other.alphabet);
        let codec = Codec::new(&alphabet)?;
        let scale = other.alphabet.joint_size().ok_or(Error::StateSpaceTooLarge)?;
        let mut table = Vec::with_capacity(self.table.len() * other.table.len());
        for &(ca, pa) in &self.table {
            for &(cb, pb) in &other.table {
                table.push((ca * scale + cb, pa * pb));
            }
        }
        table.sort_unstable_by_key(|e| e.0);
        Ok(Self {
            alphabet,
            codec,
            table,
        })
    }

    /// Relabel groups of variables as single macro-variables. Each macro
    /// alphabet enumerates the micro-states observed for its group, in code
    /// order, so entropy is preserved exactly.
    pub fn coarse_grain(&self, grouping: &[Vec<usize>]) -> Result<Self> {
        let mut seen = vec![false; self.n_vars()];
        for g in grouping {
            if g.is_empty() {
                return Err(Error::NotAPartition("empty group".into()));
            }
            for &v in g {
                if v >= self.n_vars() {
                    return Err(Error::NotAPartition(format!("variable {v} out of range")));
                }
                if seen[v] {
                    return Err(Error::NotAPartition(format!("variable {v} appears twice")));
                }
                seen[v] = true;
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::NotAPartition(format!("variable {v} not covered")));
        }
        // Per group: observed sub-codes, sorted, become macro symbols.
        let labels: Vec<Vec<u64>> = grouping
            .iter()
            .map(|g| {
                let mut codes: Vec<u64> =
                    self.table.iter().map(|&(c, _)| self.codec.project(c, g)).collect();
                codes.sort_unstable();
                codes.dedup();
                codes
            })
            .collect();
        let alphabet = Alphabet::new(labels.iter().map(Vec::len).collect())?;
        let entries = self.table.iter().map(|&(c, p)| {
            let state = grouping
                .iter()
                .zip(&labels)
                .map(|(g, l)| l.binary_search(&self.codec.project(c, g)).expect("observed"))
                .collect();
            (state, p)
        });
        Self::new(alphabet, entries)
    }

    /// `Σ P(x) f(x)` over the support.
    pub fn expected_value<F>(&self, mut valuation: F) -> f64
    where
        F: FnMut(&[usize]) -> f64,
    {
        let mut buf = Vec::with_capacity(self.n_vars());
        self.table
            .iter()
            .map(|&(c, p)| {
                self.codec.decode_into(c, &mut buf);
                p * valuation(&buf)
            })
            .sum()
    }

    /// For each support entry, the code of its projection onto `variables`.
    pub(crate) fn projected_codes(&self, variables: &[usize]) -> Vec<u64> {
        self.table
            .iter()
            .map(|&(c, _)| self.codec.project(c, variables))
            .collect()
    }

    /// Sum of probabilities; equals one within [`NORMALIZATION_TOLERANCE`].
    pub fn total(&self) -> f64 {
        self.table.iter().map(|e| e.1).sum()
    }
}

fn check_state(alphabet: &Alphabet, state: &[usize]) -> Result<()> {
    if state.len() != alphabet.len() {
        return Err(Error::InvalidParameter(format!(
            "state has {} entries, alphabet has {} variables",
            state.len(),
            alphabet.len()
        )));
    }
    for (v, (&s, &size)) in state.iter().zip(alphabet.sizes()).enumerate() {
        if s >= size {
            return Err(Error::SymbolOutOfRange {
                variable: v,
                symbol: s,
                cardinality: size,
            });
        }
    }
    Ok(())
}
