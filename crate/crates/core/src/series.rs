//! Time × variable data containers.
//!
//! Rows are time steps and columns are variables. Both flavors store data
//! column-major since nearly every measure walks one variable at a time.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Per-variable cardinalities of a discrete state space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    sizes: Vec<usize>,
}

impl Alphabet {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::ZeroCardinality(i));
        }
        Ok(Self { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn size(&self, variable: usize) -> usize {
        self.sizes[variable]
    }

    /// Number of joint states, or `None` on 64-bit overflow.
    pub fn joint_size(&self) -> Option<u64> {
        self.sizes
            .iter()
            .try_fold(1u64, |acc, &s| acc.checked_mul(s as u64))
    }

    pub fn select(&self, variables: &[usize]) -> Alphabet {
        Alphabet {
            sizes: variables.iter().map(|&v| self.sizes[v]).collect(),
        }
    }

    pub fn concat(&self, other: &Alphabet) -> Alphabet {
        let mut sizes = self.sizes.clone();
        sizes.extend_from_slice(&other.sizes);
        Alphabet { sizes }
    }
}

/// A discrete multivariate time series of symbol indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSeries {
    columns: Vec<Vec<usize>>,
    alphabet: Alphabet,
    names: Vec<String>,
}

impl DiscreteSeries {
    /// Build from columns, inferring each cardinality as `max + 1`.
    pub fn from_columns(columns: Vec<Vec<usize>>) -> Result<Self> {
        let sizes = columns
            .iter()
            .map(|c| c.iter().copied().max().map_or(1, |m| m + 1))
            .collect();
        Self::with_alphabet(columns, Alphabet::new(sizes)?)
    }

    pub fn with_alphabet(columns: Vec<Vec<usize>>, alphabet: Alphabet) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptySelection);
        }
        if alphabet.len() != columns.len() {
            return Err(Error::AlphabetMismatch);
        }
        let t = columns[0].len();
        if t == 0 {
            return Err(Error::SeriesTooShort {
                needed: 0,
                available: 0,
            });
        }
        for (v, col) in columns.iter().enumerate() {
            if col.len() != t {
                return Err(Error::Ragged {
                    row: col.len().min(t),
                    found: col.len(),
                    expected: t,
                });
            }
            if let Some(&s) = col.iter().find(|&&s| s >= alphabet.size(v)) {
                return Err(Error::SymbolOutOfRange {
                    variable: v,
                    symbol: s,
                    cardinality: alphabet.size(v),
                });
            }
        }
        let names = (0..columns.len()).map(|i| format!("x{i}")).collect();
        Ok(Self {
            columns,
            alphabet,
            names,
        })
    }

    /// Build from rows (time-major).
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        Self::from_columns(transpose(rows)?)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.columns.len() {
            return Err(Error::InvalidParameter(format!(
                "{} names for {} variables",
                names.len(),
                self.columns.len()
            )));
        }
        self.names = names;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn n_vars(&self) -> usize {
        self.columns.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, variable: usize) -> &[usize] {
        &self.columns[variable]
    }

    pub fn columns(&self) -> &[Vec<usize>] {
        &self.columns
    }

    pub fn get(&self, row: usize, variable: usize) -> usize {
        self.columns[variable][row]
    }

    pub fn check_variable(&self, variable: usize) -> Result<()> {
        if variable >= self.n_vars() {
            return Err(Error::VariableOutOfRange {
                index: variable,
                n_vars: self.n_vars(),
            });
        }
        Ok(())
    }

    /// Copy of this series with one column replaced; the alphabet is kept.
    pub fn with_column(&self, variable: usize, column: Vec<usize>) -> Result<Self> {
        self.check_variable(variable)?;
        let mut out = self.clone();
        out.columns[variable] = column;
        Ok(out)
    }

    /// Keep only the given variables, in the given order.
    pub fn select(&self, variables: &[usize]) -> Result<Self> {
        for &v in variables {
            self.check_variable(v)?;
        }
        Ok(Self {
            columns: variables.iter().map(|&v| self.columns[v].clone()).collect(),
            alphabet: self.alphabet.select(variables),
            names: variables.iter().map(|&v| self.names[v].clone()).collect(),
        })
    }

    /// Reverse the time axis.
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.columns {
            c.reverse();
        }
        out
    }
}

/// A real-valued multivariate time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousSeries {
    columns: Vec<Vec<f64>>,
    names: Vec<String>,
}

impl ContinuousSeries {
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptySelection);
        }
        let t = columns[0].len();
        if t == 0 {
            return Err(Error::SeriesTooShort {
                needed: 0,
                available: 0,
            });
        }
        for (v, col) in columns.iter().enumerate() {
            if col.len() != t {
                return Err(Error::Ragged {
                    row: col.len().min(t),
                    found: col.len(),
                    expected: t,
                });
            }
            if let Some(row) = col.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite { row, column: v });
            }
        }
        let names = (0..columns.len()).map(|i| format!("x{i}")).collect();
        Ok(Self { columns, names })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_columns(transpose(rows)?)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.columns.len() {
            return Err(Error::InvalidParameter(format!(
                "{} names for {} variables",
                names.len(),
                self.columns.len()
            )));
        }
        self.names = names;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn n_vars(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, variable: usize) -> &[f64] {
        &self.columns[variable]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn check_variable(&self, variable: usize) -> Result<()> {
        if variable >= self.n_vars() {
            return Err(Error::VariableOutOfRange {
                index: variable,
                n_vars: self.n_vars(),
            });
        }
        Ok(())
    }

    pub fn with_column(&self, variable: usize, column: Vec<f64>) -> Result<Self> {
        self.check_variable(variable)?;
        let mut out = self.clone();
        out.columns[variable] = column;
        Ok(out)
    }

    pub fn select(&self, variables: &[usize]) -> Result<Self> {
        for &v in variables {
            self.check_variable(v)?;
        }
        Ok(Self {
            columns: variables.iter().map(|&v| self.columns[v].clone()).collect(),
            names: variables.iter().map(|&v| self.names[v].clone()).collect(),
        })
    }

    /// Reinterpret integer-valued columns as symbols. Fails on any
    /// negative or fractional entry.
    pub fn to_discrete(&self) -> Result<DiscreteSeries> {
        let mut cols = Vec::with_capacity(self.n_vars());
        for (v, col) in self.columns.iter().enumerate() {
            let mut out = Vec::with_capacity(col.len());
            for (row, &x) in col.iter().enumerate() {
                if x < 0.0 || x.fract() != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "value {x} at row {row}, column {v} is not a non-negative integer symbol"
                    )));
                }
                out.push(x as usize);
            }
            cols.push(out);
        }
        DiscreteSeries::from_columns(cols)?.with_names(self.names.clone())
    }
}

impl DiscreteSeries {
    /// Symbols as real numbers, for estimators that need a continuous view.
    pub fn to_continuous(&self) -> ContinuousSeries {
        ContinuousSeries {
            columns: self
                .columns
                .iter()
                .map(|c| c.iter().map(|&s| s as f64).collect())
                .collect(),
            names: self.names.clone(),
        }
    }
}

/// Either kind of series, for code that accepts both.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Discrete(DiscreteSeries),
    Continuous(ContinuousSeries),
}

impl Dataset {
    pub fn len(&self) -> usize {
        match self {
            Dataset::Discrete(s) => s.len(),
            Dataset::Continuous(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_vars(&self) -> usize {
        match self {
            Dataset::Discrete(s) => s.n_vars(),
            Dataset::Continuous(s) => s.n_vars(),
        }
    }

    pub fn names(&self) -> &[String] {
        match self {
            Dataset::Discrete(s) => s.names(),
            Dataset::Continuous(s) => s.names(),
        }
    }

    pub fn discrete(&self) -> Option<&DiscreteSeries> {
        match self {
            Dataset::Discrete(s) => Some(s),
            Dataset::Continuous(_) => None,
        }
    }

    pub fn continuous(&self) -> Option<&ContinuousSeries> {
        match self {
            Dataset::Continuous(s) => Some(s),
            Dataset::Discrete(_) => None,
        }
    }
}

impl From<DiscreteSeries> for Dataset {
    fn from(s: DiscreteSeries) -> Self {
        Dataset::Discrete(s)
    }
}

impl From<ContinuousSeries> for Dataset {
    fn from(s: ContinuousSeries) -> Self {
        Dataset::Continuous(s)
    }
}

fn transpose<T: Copy>(rows: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let Some(first) = rows.first() else {
        return Err(Error::SeriesTooShort {
            needed: 0,
            available: 0,
        });
    };
    let n = first.len();
    let mut cols: Vec<Vec<T>> = (0..n).map(|_| Vec::with_capacity(rows.len())).collect();
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Ragged {
                row: r,
                found: row.len(),
                expected: n,
            });
        }
        for (c, &x) in row.iter().enumerate() {
            cols[c].push(x);
        }
    }
    Ok(cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_alphabet_symbols() {
        let a = Alphabet::new(vec![2]).unwrap();
        assert!(matches!(
            DiscreteSeries::with_alphabet(vec![vec![0, 2]], a),
            Err(Error::SymbolOutOfRange { symbol: 2, .. })
        ));
    }

    #[test]
    fn rejects_zero_cardinality() {
        assert!(Alphabet::new(vec![2, 0]).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(ContinuousSeries::from_columns(vec![vec![1.0, f64::NAN]]).is_err());
    }

    #[test]
    fn rows_and_columns_agree() {
        let s = DiscreteSeries::from_rows(&[vec![0, 1], vec![1, 2], vec![0, 0]]).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.column(1), &[1, 2, 0]);
        assert_eq!(s.alphabet().sizes(), &[2, 3]);
    }
}
