//! Integrated information decomposition of two-element systems on the
//! 16-vertex product of the two-predictor redundancy lattice.

use super::lattice::{build_lattice, moebius, Antichain, Poset};
use super::ped::union_probabilities;
use super::redundancy::antichain_sources;
use crate::distribution::JointDistribution;
use crate::error::{Error, Result};
use crate::multivar::whole_minus_sum_phi;
use crate::series::DiscreteSeries;
use crate::shannon::mutual_information;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiFunction {
    /// Minimum mutual information over source/destination pairs.
    Mmi,
    /// Shared-exclusion double redundancy.
    TauSx,
}

impl fmt::Display for PhiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Mmi => "mmi",
            Self::TauSx => "tausx",
        })
    }
}

impl FromStr for PhiFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', '-'], "").as_str() {
            "mmi" => Ok(Self::Mmi),
            "tausx" | "sx" | "tsx" => Ok(Self::TauSx),
            other => Err(Error::InvalidParameter(format!("unknown double-redundancy function {other}"))),
        }
    }
}

/// A vertex `α → β` of the product lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhiAtom {
    pub source: Antichain,
    pub destination: Antichain,
}

impl fmt::Display for PhiAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.source, self.destination)
    }
}

impl FromStr for PhiAtom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once("->")
            .or_else(|| s.split_once('→'))
            .ok_or_else(|| Error::InvalidParameter(format!("expected source->destination, got {s}")))?;
        Ok(Self {
            source: Antichain::parse(a)?,
            destination: Antichain::parse(b)?,
        })
    }
}

/// The two-element product lattice with componentwise order.
pub struct ProductLattice {
    atoms: Vec<PhiAtom>,
    below: Vec<Vec<usize>>,
}

impl Poset for ProductLattice {
    fn len(&self) -> usize {
        self.atoms.len()
    }

    fn strictly_below(&self, i: usize) -> &[usize] {
        &self.below[i]
    }
}

impl ProductLattice {
    pub fn new() -> Self {
        let base = build_lattice(2).expect("two predictors");
        let atoms: Vec<PhiAtom> = base
            .atoms()
            .iter()
            .flat_map(|a| {
                base.atoms().iter().map(move |b| PhiAtom {
                    source: a.clone(),
                    destination: b.clone(),
                })
            })
            .collect();
        let below = atoms
            .iter()
            .map(|x| {
                (0..atoms.len())
                    .filter(|&j| {
                        let y = &atoms[j];
                        y != x && y.source.precedes(&x.source) && y.destination.precedes(&x.destination)
                    })
                    .collect()
            })
            .collect();
        Self { atoms, below }
    }

    pub fn atoms(&self) -> &[PhiAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

impl Default for ProductLattice {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiResult {
    pub atoms: Vec<PhiAtom>,
    pub redundancy: Vec<f64>,
    pub partial: Vec<f64>,
    pub function: PhiFunction,
}

impl PhiResult {
    pub fn get(&self, atom: &PhiAtom) -> Option<f64> {
        self.atoms.iter().position(|a| a == atom).map(|i| self.partial[i])
    }

    /// Partial value by label, e.g. `"{1}{2}->{12}"`.
    pub fn atom(&self, label: &str) -> Option<f64> {
        label.parse::<PhiAtom>().ok().and_then(|a| self.get(&a))
    }

    pub fn total(&self) -> f64 {
        self.partial.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PhiAtom, f64)> {
        self.atoms.iter().zip(self.partial.iter().copied())
    }
}

fn check_parts(dist: &JointDistribution, past: &[Vec<usize>], future: &[Vec<usize>]) -> Result<()> {
    if past.len() != 2 || future.len() != 2 {
        return Err(Error::InvalidParameter(
            "integrated information decomposition is defined for exactly 2 elements".into(),
        ));
    }
    let all: Vec<usize> = past.iter().chain(future).flatten().copied().collect();
    if past.iter().chain(future).any(Vec::is_empty) {
        return Err(Error::EmptySelection);
    }
    dist.check_variables(&all).map_err(|e| match e {
        Error::DuplicateVariable(v) => Error::OverlappingSets(v),
        e => e,
    })
}

/// Double redundancy of `α → β`.
pub fn double_redundancy(
    dist: &JointDistribution,
    past: &[Vec<usize>],
    future: &[Vec<usize>],
    atom: &PhiAtom,
    f: PhiFunction,
) -> Result<f64> {
    check_parts(dist, past, future)?;
    let a = antichain_sources(&atom.source, past);
    let b = antichain_sources(&atom.destination, future);
    match f {
        PhiFunction::Mmi => {
            let mut best = f64::INFINITY;
            for sa in &a {
                for sb in &b {
                    best = best.min(mutual_information(dist, sa, sb)?);
                }
            }
            Ok(best)
        }
        PhiFunction::TauSx => {
            let locals = local_tau_sx(dist, &a, &b);
            Ok(dist.entries().iter().zip(&locals).map(|(e, v)| e.1 * v).sum())
        }
    }
}

/// `log P(A∪ ∩ B∪) / (P(A∪) P(B∪))` at every support entry.
fn local_tau_sx(dist: &JointDistribution, a: &[Vec<usize>], b: &[Vec<usize>]) -> Vec<f64> {
    let pa = union_probabilities(dist, a);
    let pb = union_probabilities(dist, b);
    let ca: Vec<Vec<u64>> = a.iter().map(|s| dist.projected_codes(s)).collect();
    let cb: Vec<Vec<u64>> = b.iter().map(|s| dist.projected_codes(s)).collect();
    let p: Vec<f64> = dist.entries().iter().map(|e| e.1).collect();
    (0..p.len())
        .map(|i| {
            let pab: f64 = (0..p.len())
                .filter(|&j| ca.iter().any(|c| c[j] == c[i]) && cb.iter().any(|c| c[j] == c[i]))
                .map(|j| p[j])
                .sum();
            (pab / (pa[i] * pb[i])).log2()
        })
        .collect()
}

/// Decompose `I(past; future)` of a two-element system given as a joint
/// distribution. `past[i]` and `future[i]` are the variables of element `i`.
pub fn phiid_decompose_dist(
    dist: &JointDistribution,
    past: &[Vec<usize>],
    future: &[Vec<usize>],
    f: PhiFunction,
) -> Result<PhiResult> {
    check_parts(dist, past, future)?;
    let lattice = ProductLattice::new();
    let redundancy = lattice
        .atoms()
        .iter()
        .map(|a| double_redundancy(dist, past, future, a, f))
        .collect::<Result<Vec<f64>>>()?;
    let partial = moebius(&lattice, &redundancy)?;
    Ok(PhiResult {
        atoms: lattice.atoms,
        redundancy,
        partial,
        function: f,
    })
}

/// Lagged joint distribution of two elements: each past is its `k` most
/// recent states, each future its present state.
pub fn two_element_joint(
    series: &DiscreteSeries,
    variables: &[usize],
    k: usize,
) -> Result<(JointDistribution, Vec<Vec<usize>>, Vec<Vec<usize>>)> {
    if variables.len() != 2 {
        return Err(Error::InvalidParameter(
            "integrated information decomposition is defined for exactly 2 elements".into(),
        ));
    }
    if variables[0] == variables[1] {
        return Err(Error::DuplicateVariable(variables[0]));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("history must be at least 1".into()));
    }
    let mut vars = Vec::new();
    let mut lags = Vec::new();
    let mut past = vec![Vec::new(), Vec::new()];
    for (e, &v) in variables.iter().enumerate() {
        for lag in 1..=k {
            past[e].push(vars.len());
            vars.push(v);
            lags.push(lag);
        }
    }
    let future = vec![vec![vars.len()], vec![vars.len() + 1]];
    vars.extend_from_slice(variables);
    lags.extend([0, 0]);
    Ok((JointDistribution::from_series(series, &vars, &lags)?, past, future))
}

/// Decompose the lag-1 (history `k`) excess entropy of two variables of a series.
pub fn phiid_decompose(series: &DiscreteSeries, variables: &[usize], k: usize, f: PhiFunction) -> Result<PhiResult> {
    let (dist, past, future) = two_element_joint(series, variables, k)?;
    phiid_decompose_dist(&dist, &past, &future, f)
}

/// Revised integrated information `Φ^R = Φ + I∂({1}{2}→{1}{2})`, with `Φ`
/// the whole-minus-sum value on the same samples.
pub fn phi_r(series: &DiscreteSeries, variables: &[usize], k: usize, f: PhiFunction) -> Result<f64> {
    let (dist, past, future) = two_element_joint(series, variables, k)?;
    phi_r_dist(&dist, &past, &future, f)
}

pub fn phi_r_dist(dist: &JointDistribution, past: &[Vec<usize>], future: &[Vec<usize>], f: PhiFunction) -> Result<f64> {
    let phi = whole_minus_sum_phi(dist, past, future)?;
    let r = phiid_decompose_dist(dist, past, future, f)?;
    Ok(phi + r.atom("{1}{2}->{1}{2}").expect("bottom atom"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynamicsLabel {
    Storage,
    Transfer,
    Copy,
    Erasure,
    UpwardCausation,
    DownwardCausation,
    CausalDecoupling,
    Other,
}

impl fmt::Display for DynamicsLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Storage => "storage",
            Self::Transfer => "transfer",
            Self::Copy => "copy",
            Self::Erasure => "erasure",
            Self::UpwardCausation => "upward-causation",
            Self::DownwardCausation => "downward-causation",
            Self::CausalDecoupling => "causal-decoupling",
            Self::Other => "other",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Redundant,
    Unique(u8),
    Synergy,
}

fn kind(a: &Antichain) -> Result<Kind> {
    match a.sources() {
        [1, 2] => Ok(Kind::Redundant),
        [1] => Ok(Kind::Unique(0)),
        [2] => Ok(Kind::Unique(1)),
        [3] => Ok(Kind::Synergy),
        _ => Err(Error::InvalidParameter(format!("{a} is not an atom of the two-element lattice"))),
    }
}

/// Label an atom of the two-element product lattice with the information
/// dynamic it represents.
pub fn classify_dynamics(atom: &PhiAtom) -> Result<DynamicsLabel> {
    use DynamicsLabel::*;
    use Kind::*;
    Ok(match (kind(&atom.source)?, kind(&atom.destination)?) {
        (Synergy, Synergy) => CausalDecoupling,
        (Redundant, Redundant) => Storage,
        (Unique(i), Unique(j)) if i == j => Storage,
        (Unique(_), Unique(_)) => Transfer,
        (Unique(_), Redundant) => Copy,
        (Redundant, Unique(_)) => Erasure,
        (Unique(_) | Redundant, Synergy) => UpwardCausation,
        (Synergy, Unique(_) | Redundant) => DownwardCausation,
    })
}
