//! Transfer entropy split by PID into state-independent (unique) and
//! state-dependent (synergistic) parts, and information modification.

use super::lattice::DecompositionResult;
use super::redundancy::{pid_decompose, RedundancyFunction};
use crate::distribution::JointDistribution;
use crate::error::{Error, Result};
use crate::series::DiscreteSeries;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeDecomposition {
    /// Unique information of the source past about the target's next state.
    pub state_independent: f64,
    /// Synergy of source past and target past.
    pub state_dependent: f64,
}

impl TeDecomposition {
    pub fn total(&self) -> f64 {
        self.state_independent + self.state_dependent
    }
}

/// Joint of several pasts (`k` lags each) and the target's present state.
/// Returns the distribution and the variable indices of each past.
fn pasts_and_target(
    series: &DiscreteSeries,
    pasts: &[(usize, usize)],
    target: usize,
) -> Result<(JointDistribution, Vec<Vec<usize>>, usize)> {
    let mut vars = Vec::new();
    let mut lags = Vec::new();
    let mut groups = Vec::new();
    for &(v, k) in pasts {
        if k == 0 {
            return Err(Error::InvalidParameter("history must be at least 1".into()));
        }
        let mut g = Vec::new();
        for lag in 1..=k {
            g.push(vars.len());
            vars.push(v);
            lags.push(lag);
        }
        groups.push(g);
    }
    let t = vars.len();
    vars.push(target);
    lags.push(0);
    Ok((JointDistribution::from_series(series, &vars, &lags)?, groups, t))
}

/// Dynamic PID of `TE(source → target)` with source history `k` and target history `l`.
pub fn te_decompose(
    series: &DiscreteSeries,
    source: usize,
    target: usize,
    k: usize,
    l: usize,
    function: RedundancyFunction,
) -> Result<TeDecomposition> {
    if source == target {
        return Err(Error::InvalidParameter("source and target must differ".into()));
    }
    let (dist, groups, t) = pasts_and_target(series, &[(source, k), (target, l)], target)?;
    let r = pid_decompose(&dist, &groups, &[t], function)?;
    Ok(TeDecomposition {
        state_independent: r.atom("{1}").expect("unique atom"),
        state_dependent: r.atom("{12}").expect("synergy atom"),
    })
}

/// Full dynamic PID of two source pasts about the target's next state.
pub fn dynamic_pid(
    series: &DiscreteSeries,
    sources: &[usize],
    target: usize,
    k: usize,
    function: RedundancyFunction,
) -> Result<DecompositionResult> {
    if sources.len() != 2 {
        return Err(Error::InvalidParameter("exactly 2 sources are required".into()));
    }
    if sources[0] == sources[1] || sources.contains(&target) {
        return Err(Error::InvalidParameter("sources and target must be distinct".into()));
    }
    let (dist, groups, t) = pasts_and_target(series, &[(sources[0], k), (sources[1], k)], target)?;
    pid_decompose(&dist, &groups, &[t], function)
}

/// Information modification: the synergy of two source pasts about the
/// target's next state.
pub fn information_modification(
    series: &DiscreteSeries,
    sources: &[usize],
    target: usize,
    k: usize,
    function: RedundancyFunction,
) -> Result<f64> {
    Ok(dynamic_pid(series, sources, target, k, function)?
        .atom("{12}")
        .expect("synergy atom"))
}
