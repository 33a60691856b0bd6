//! Redundancy functions for partial information decomposition.
//!
//! Sources are lists of variable indices of a joint distribution; a source
//! set may overlap others but never the target. Local forms are evaluated
//! at full joint states of the distribution.

use super::lattice::{build_lattice, Antichain, DecompositionResult};
use crate::distribution::JointDistribution;
use crate::error::{Error, Result};
use crate::shannon::{marginal_at_support, mutual_information};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RedundancyFunction {
    /// Minimum specific information.
    Wb,
    /// Minimum mutual information.
    Mmi,
    /// Pointwise informative/misinformative mass exclusions (i±).
    Pm,
    /// Shared exclusions (i_sx).
    Sx,
}

impl fmt::Display for RedundancyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Wb => "wb",
            Self::Mmi => "mmi",
            Self::Pm => "pm",
            Self::Sx => "sx",
        })
    }
}

impl FromStr for RedundancyFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wb" | "imin" | "i_min" => Ok(Self::Wb),
            "mmi" => Ok(Self::Mmi),
            "pm" | "i_pm" | "ipm" => Ok(Self::Pm),
            "sx" | "i_sx" | "isx" => Ok(Self::Sx),
            other => Err(Error::InvalidParameter(format!("unknown redundancy function {other}"))),
        }
    }
}

/// Caches marginals at the support of one distribution for one target.
pub(crate) struct Evaluator<'a> {
    dist: &'a JointDistribution,
    target: Vec<usize>,
    p: Vec<f64>,
    py: Vec<f64>,
    ycodes: Vec<u64>,
    pa: HashMap<Vec<usize>, Vec<f64>>,
    pay: HashMap<Vec<usize>, Vec<f64>>,
    codes: HashMap<Vec<usize>, Vec<u64>>,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(dist: &'a JointDistribution, target: &[usize]) -> Result<Self> {
        if target.is_empty() {
            return Err(Error::EmptySelection);
        }
        dist.check_variables(target)?;
        Ok(Self {
            dist,
            target: target.to_vec(),
            p: dist.entries().iter().map(|e| e.1).collect(),
            py: marginal_at_support(dist, target),
            ycodes: dist.projected_codes(target),
            pa: HashMap::new(),
            pay: HashMap::new(),
            codes: HashMap::new(),
        })
    }

    fn check_sources(&self, sources: &[Vec<usize>]) -> Result<()> {
        if sources.is_empty() {
            return Err(Error::EmptySelection);
        }
        for s in sources {
            if s.is_empty() {
                return Err(Error::EmptySelection);
            }
            self.dist.check_variables(s)?;
            if let Some(&v) = s.iter().find(|v| self.target.contains(v)) {
                return Err(Error::OverlappingSets(v));
            }
        }
        Ok(())
    }

    fn p_a(&mut self, a: &[usize]) -> &[f64] {
        let dist = self.dist;
        self.pa.entry(a.to_vec()).or_insert_with(|| marginal_at_support(dist, a))
    }

    fn p_ay(&mut self, a: &[usize]) -> &[f64] {
        let dist = self.dist;
        let mut vars = a.to_vec();
        vars.extend_from_slice(&self.target);
        self.pay.entry(a.to_vec()).or_insert_with(|| marginal_at_support(dist, &vars))
    }

    fn codes(&mut self, a: &[usize]) -> &[u64] {
        let dist = self.dist;
        self.codes.entry(a.to_vec()).or_insert_with(|| dist.projected_codes(a))
    }

    /// Local `i(a; y)` at every support entry.
    fn local_mi(&mut self, a: &[usize]) -> Vec<f64> {
        let pa = self.p_a(a).to_vec();
        let pay = self.p_ay(a).to_vec();
        (0..self.p.len()).map(|i| (pay[i] / (pa[i] * self.py[i])).log2()).collect()
    }

    pub(crate) fn mmi(&mut self, sources: &[Vec<usize>]) -> Result<f64> {
        self.check_sources(sources)?;
        let mut best = f64::INFINITY;
        for s in sources {
            best = best.min(mutual_information(self.dist, s, &self.target)?);
        }
        Ok(best)
    }

    pub(crate) fn wb(&mut self, sources: &[Vec<usize>]) -> Result<f64> {
        self.check_sources(sources)?;
        // Group support entries by target state.
        let mut order: Vec<usize> = (0..self.p.len()).collect();
        order.sort_by_key(|&i| self.ycodes[i]);
        let locals: Vec<Vec<f64>> = sources.iter().map(|s| self.local_mi(s)).collect();
        let mut total = 0.0;
        for group in order.chunk_by(|&a, &b| self.ycodes[a] == self.ycodes[b]) {
            let py = self.py[group[0]];
            // specific information of each source: E[i(a; y) | y]
            let min = locals
                .iter()
                .map(|l| group.iter().map(|&i| self.p[i] / py * l[i]).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            total += py * min;
        }
        Ok(total)
    }

    /// Local informative and misinformative components of i± per support entry.
    pub(crate) fn pm_locals(&mut self, sources: &[Vec<usize>]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_sources(sources)?;
        let n = self.p.len();
        let mut plus = vec![f64::INFINITY; n];
        let mut minus = vec![f64::INFINITY; n];
        for s in sources {
            let pa = self.p_a(s).to_vec();
            let pay = self.p_ay(s).to_vec();
            for i in 0..n {
                plus[i] = plus[i].min(-pa[i].log2());
                minus[i] = minus[i].min(-(pay[i] / self.py[i]).log2());
            }
        }
        Ok((plus, minus))
    }

    /// Local informative `-log P(U)` and misinformative `-log P(U | y)`
    /// components of i_sx per support entry, where `U` is the union of the
    /// source events.
    pub(crate) fn sx_locals(&mut self, sources: &[Vec<usize>]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_sources(sources)?;
        let codes: Vec<Vec<u64>> = sources.iter().map(|s| self.codes(s).to_vec()).collect();
        let n = self.p.len();
        let mut plus = Vec::with_capacity(n);
        let mut minus = Vec::with_capacity(n);
        for i in 0..n {
            let mut pu = 0.0;
            let mut puy = 0.0;
            for j in 0..n {
                if codes.iter().any(|c| c[j] == c[i]) {
                    pu += self.p[j];
                    if self.ycodes[j] == self.ycodes[i] {
                        puy += self.p[j];
                    }
                }
            }
            plus.push(-pu.log2());
            minus.push(-(puy / self.py[i]).log2());
        }
        Ok((plus, minus))
    }

    pub(crate) fn expected(&self, locals: &[f64]) -> f64 {
        self.p.iter().zip(locals).map(|(p, v)| p * v).sum()
    }

    pub(crate) fn redundancy(&mut self, sources: &[Vec<usize>], f: RedundancyFunction) -> Result<f64> {
        match f {
            RedundancyFunction::Wb => self.wb(sources),
            RedundancyFunction::Mmi => self.mmi(sources),
            RedundancyFunction::Pm => {
                let (p, m) = self.pm_locals(sources)?;
                Ok(self.expected(&p) - self.expected(&m))
            }
            RedundancyFunction::Sx => {
                let (p, m) = self.sx_locals(sources)?;
                Ok(self.expected(&p) - self.expected(&m))
            }
        }
    }

    pub(crate) fn support_index(&self, state: &[usize]) -> Result<usize> {
        if state.len() != self.dist.n_vars() {
            return Err(Error::InvalidParameter(format!(
                "state has {} entries for {} variables",
                state.len(),
                self.dist.n_vars()
            )));
        }
        let code = self.dist.codec().encode(state);
        self.dist
            .entries()
            .binary_search_by_key(&code, |e| e.0)
            .map_err(|_| Error::ZeroProbability)
    }
}

/// Williams–Beer `I_min`: expected minimum specific information.
pub fn redundancy_wb(dist: &JointDistribution, sources: &[Vec<usize>], target: &[usize]) -> Result<f64> {
    Evaluator::new(dist, target)?.wb(sources)
}

/// Minimum mutual information over the sources.
pub fn redundancy_mmi(dist: &JointDistribution, sources: &[Vec<usize>], target: &[usize]) -> Result<f64> {
    Evaluator::new(dist, target)?.mmi(sources)
}

/// Local `(informative, misinformative)` components of i± at a full joint
/// state. The local redundancy is their difference.
pub fn redundancy_pm(
    dist: &JointDistribution,
    sources: &[Vec<usize>],
    target: &[usize],
    state: &[usize],
) -> Result<(f64, f64)> {
    let mut ev = Evaluator::new(dist, target)?;
    let i = ev.support_index(state)?;
    let (p, m) = ev.pm_locals(sources)?;
    Ok((p[i], m[i]))
}

/// Expected `(informative, misinformative)` components of i±.
pub fn expected_redundancy_pm(
    dist: &JointDistribution,
    sources: &[Vec<usize>],
    target: &[usize],
) -> Result<(f64, f64)> {
    let mut ev = Evaluator::new(dist, target)?;
    let (p, m) = ev.pm_locals(sources)?;
    Ok((ev.expected(&p), ev.expected(&m)))
}

/// Local shared-exclusion redundancy `log P(y | U) / P(y)` at a full joint state.
pub fn redundancy_sx(dist: &JointDistribution, sources: &[Vec<usize>], target: &[usize], state: &[usize]) -> Result<f64> {
    let (p, m) = redundancy_sx_components(dist, sources, target, state)?;
    Ok(p - m)
}

/// Local `(informative, misinformative)` components of i_sx.
pub fn redundancy_sx_components(
    dist: &JointDistribution,
    sources: &[Vec<usize>],
    target: &[usize],
    state: &[usize],
) -> Result<(f64, f64)> {
    let mut ev = Evaluator::new(dist, target)?;
    let i = ev.support_index(state)?;
    let (p, m) = ev.sx_locals(sources)?;
    Ok((p[i], m[i]))
}

/// Expected `(informative, misinformative)` components of i_sx.
pub fn expected_redundancy_sx(
    dist: &JointDistribution,
    sources: &[Vec<usize>],
    target: &[usize],
) -> Result<(f64, f64)> {
    let mut ev = Evaluator::new(dist, target)?;
    let (p, m) = ev.sx_locals(sources)?;
    Ok((ev.expected(&p), ev.expected(&m)))
}

/// Expected redundancy under any registered function.
pub fn redundancy(
    dist: &JointDistribution,
    sources: &[Vec<usize>],
    target: &[usize],
    function: RedundancyFunction,
) -> Result<f64> {
    Evaluator::new(dist, target)?.redundancy(sources, function)
}

fn check_predictors(dist: &JointDistribution, predictors: &[Vec<usize>], target: &[usize]) -> Result<()> {
    build_lattice(predictors.len())?;
    let mut all: Vec<usize> = predictors.concat();
    all.extend_from_slice(target);
    dist.check_variables(&all).map_err(|e| match e {
        Error::DuplicateVariable(v) => Error::OverlappingSets(v),
        e => e,
    })
}

/// Variables of each source of an antichain, given per-predictor variables.
pub(crate) fn antichain_sources(atom: &Antichain, predictors: &[Vec<usize>]) -> Vec<Vec<usize>> {
    atom.source_indices()
        .into_iter()
        .map(|s| s.iter().flat_map(|&i| predictors[i].iter().copied()).collect())
        .collect()
}

/// Partial information decomposition of `I(predictors; target)`.
///
/// `predictors[i]` lists the variables forming predictor `i`; between one
/// and four predictors are supported.
pub fn pid_decompose(
    dist: &JointDistribution,
    predictors: &[Vec<usize>],
    target: &[usize],
    function: RedundancyFunction,
) -> Result<DecompositionResult> {
    check_predictors(dist, predictors, target)?;
    let lattice = build_lattice(predictors.len())?;
    let mut ev = Evaluator::new(dist, target)?;
    let values = lattice
        .atoms()
        .iter()
        .map(|a| ev.redundancy(&antichain_sources(a, predictors), function))
        .collect::<Result<Vec<f64>>>()?;
    DecompositionResult::from_lattice(lattice, values, function.to_string(), target.to_vec())
}

/// Pointwise decomposition at one full joint state, for the localizable
/// functions (i± and i_sx).
pub fn local_pid_decompose(
    dist: &JointDistribution,
    predictors: &[Vec<usize>],
    target: &[usize],
    function: RedundancyFunction,
    state: &[usize],
) -> Result<DecompositionResult> {
    check_predictors(dist, predictors, target)?;
    let lattice = build_lattice(predictors.len())?;
    let mut ev = Evaluator::new(dist, target)?;
    let i = ev.support_index(state)?;
    let values = lattice
        .atoms()
        .iter()
        .map(|a| {
            let sources = antichain_sources(a, predictors);
            let (p, m) = match function {
                RedundancyFunction::Pm => ev.pm_locals(&sources)?,
                RedundancyFunction::Sx => ev.sx_locals(&sources)?,
                other => {
                    return Err(Error::InvalidParameter(format!("{other} has no local form")));
                }
            };
            Ok(p[i] - m[i])
        })
        .collect::<Result<Vec<f64>>>()?;
    DecompositionResult::from_lattice(lattice, values, function.to_string(), target.to_vec())
}
