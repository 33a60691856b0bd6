//! Plug-in (maximum likelihood) estimates from empirical frequency tables.

use crate::distribution::JointDistribution;
use crate::error::{Error, Result};
use crate::series::DiscreteSeries;
use crate::shannon;
use crate::units::Unit;

fn empirical(series: &DiscreteSeries, variables: &[usize]) -> Result<JointDistribution> {
    if series.is_empty() {
        return Err(Error::SeriesTooShort {
            needed: 1,
            available: 0,
        });
    }
    JointDistribution::from_series(series, variables, &vec![0; variables.len()])
}

/// Entropy of the empirical joint table of `variables`. Biased downward.
pub fn plugin_entropy(series: &DiscreteSeries, variables: &[usize], unit: Unit) -> Result<f64> {
    let dist = empirical(series, variables)?;
    let all: Vec<usize> = (0..variables.len()).collect();
    Ok(Unit::Bits.convert(shannon::entropy(&dist, &all)?, unit))
}

/// Plug-in mutual information between two disjoint variable sets.
pub fn plugin_mi(series: &DiscreteSeries, a: &[usize], b: &[usize], unit: Unit) -> Result<f64> {
    let vars: Vec<usize> = a.iter().chain(b).copied().collect();
    let dist = empirical(series, &vars)?;
    let ia: Vec<usize> = (0..a.len()).collect();
    let ib: Vec<usize> = (a.len()..vars.len()).collect();
    Ok(Unit::Bits.convert(shannon::mutual_information(&dist, &ia, &ib)?, unit))
}

/// Plug-in conditional mutual information `I(a; b | c)`.
pub fn plugin_cmi(
    series: &DiscreteSeries,
    a: &[usize],
    b: &[usize],
    c: &[usize],
    unit: Unit,
) -> Result<f64> {
    let vars: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
    let dist = empirical(series, &vars)?;
    let ia: Vec<usize> = (0..a.len()).collect();
    let ib: Vec<usize> = (a.len()..a.len() + b.len()).collect();
    let ic: Vec<usize> = (a.len() + b.len()..vars.len()).collect();
    Ok(Unit::Bits.convert(shannon::conditional_mutual_information(&dist, &ia, &ib, &ic)?, unit))
}

/// Miller–Madow correction: adds `(M - 1) / 2S` nats, expressed in `unit`.
/// `occupied` is the number of states seen, `samples` the sample count.
pub fn miller_madow(estimate: f64, occupied: usize, samples: usize, unit: Unit) -> f64 {
    let correction = (occupied.max(1) - 1) as f64 / (2.0 * samples.max(1) as f64);
    estimate + unit.from_nats(correction)
}

/// Plug-in entropy with the Miller–Madow correction applied.
pub fn miller_madow_entropy(series: &DiscreteSeries, variables: &[usize], unit: Unit) -> Result<f64> {
    let dist = empirical(series, variables)?;
    let all: Vec<usize> = (0..variables.len()).collect();
    let h = Unit::Bits.convert(shannon::entropy(&dist, &all)?, unit);
    Ok(miller_madow(h, dist.support_size(), series.len(), unit))
}
