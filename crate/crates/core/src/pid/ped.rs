//! Partial entropy decomposition of `H(X1, …, XN)` over the redundancy
//! lattice of the variables themselves.

use super::lattice::{build_lattice, DecompositionResult};
use super::redundancy::antichain_sources;
use crate::distribution::JointDistribution;
use crate::error::{Error, Result};
use crate::shannon::marginal_at_support;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// IPF stops when every pairwise marginal matches within this tolerance.
pub const IPF_TOLERANCE: f64 = 1e-10;
pub const IPF_MAX_ITERATIONS: usize = 10_000;
const MAX_TUPLE_SPACE: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PedFunction {
    /// Minimum local entropy over the sources.
    Hmin,
    /// Local entropy of the union of the source events.
    Hsx,
    /// Positive part of the local co-information under a pairwise
    /// maximum-entropy model.
    Hcs,
}

impl fmt::Display for PedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Hmin => "hmin",
            Self::Hsx => "hsx",
            Self::Hcs => "hcs",
        })
    }
}

impl FromStr for PedFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "").as_str() {
            "hmin" | "min" => Ok(Self::Hmin),
            "hsx" | "sx" => Ok(Self::Hsx),
            "hcs" | "cs" => Ok(Self::Hcs),
            other => Err(Error::InvalidParameter(format!("unknown entropy redundancy {other}"))),
        }
    }
}

fn check_sources(dist: &JointDistribution, sources: &[Vec<usize>]) -> Result<()> {
    if sources.is_empty() || sources.iter().any(Vec::is_empty) {
        return Err(Error::EmptySelection);
    }
    for s in sources {
        dist.check_variables(s)?;
    }
    Ok(())
}

/// Local redundant entropy of `sources` at every support entry.
pub fn local_redundant_entropy(dist: &JointDistribution, sources: &[Vec<usize>], f: PedFunction) -> Result<Vec<f64>> {
    check_sources(dist, sources)?;
    match f {
        PedFunction::Hmin => {
            let mut out = vec![f64::INFINITY; dist.support_size()];
            for s in sources {
                for (o, p) in out.iter_mut().zip(marginal_at_support(dist, s)) {
                    *o = o.min(-p.log2());
                }
            }
            Ok(out)
        }
        PedFunction::Hsx => Ok(union_probabilities(dist, sources).into_iter().map(|p| -p.log2()).collect()),
        PedFunction::Hcs => local_hcs(dist, sources),
    }
}

/// `P(∪_i {A_i = a_i})` at every support entry.
pub(crate) fn union_probabilities(dist: &JointDistribution, sources: &[Vec<usize>]) -> Vec<f64> {
    let codes: Vec<Vec<u64>> = sources.iter().map(|s| dist.projected_codes(s)).collect();
    let p: Vec<f64> = dist.entries().iter().map(|e| e.1).collect();
    (0..p.len())
        .map(|i| {
            (0..p.len())
                .filter(|&j| codes.iter().any(|c| c[j] == c[i]))
                .map(|j| p[j])
                .sum()
        })
        .collect()
}

/// Expected redundant entropy.
pub fn redundant_entropy(dist: &JointDistribution, sources: &[Vec<usize>], f: PedFunction) -> Result<f64> {
    let locals = local_redundant_entropy(dist, sources, f)?;
    Ok(dist.entries().iter().zip(&locals).map(|(e, v)| e.1 * v).sum())
}

/// Each source's observed values relabelled `0..size`, per support entry.
fn source_labels(dist: &JointDistribution, sources: &[Vec<usize>]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut labels = Vec::with_capacity(sources.len());
    let mut sizes = Vec::with_capacity(sources.len());
    for s in sources {
        let codes = dist.projected_codes(s);
        let mut uniq = codes.clone();
        uniq.sort_unstable();
        uniq.dedup();
        labels.push(codes.iter().map(|c| uniq.binary_search(c).unwrap()).collect());
        sizes.push(uniq.len());
    }
    (labels, sizes)
}

fn strides(sizes: &[usize]) -> Vec<usize> {
    let mut s = vec![1; sizes.len()];
    for i in (0..sizes.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * sizes[i + 1];
    }
    s
}

/// Marginal of a dense table over the dimensions in `keep` (ascending).
fn dense_marginal(q: &[f64], sizes: &[usize], keep: &[usize]) -> Vec<f64> {
    let st = strides(sizes);
    let sub: Vec<usize> = keep.iter().map(|&d| sizes[d]).collect();
    let sub_st = strides(&sub);
    let mut out = vec![0.0; sub.iter().product()];
    for (idx, &v) in q.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let mut o = 0;
        for (k, &d) in keep.iter().enumerate() {
            o += (idx / st[d] % sizes[d]) * sub_st[k];
        }
        out[o] += v;
    }
    out
}

/// Maximum-entropy table over the product of `sizes` matching every
/// pairwise marginal of `p`, by iterative proportional fitting from uniform.
pub(crate) fn pairwise_max_entropy(p: &[f64], sizes: &[usize]) -> Vec<f64> {
    let total: usize = sizes.iter().product();
    let k = sizes.len();
    let pairs: Vec<[usize; 2]> = (0..k).flat_map(|i| (i + 1..k).map(move |j| [i, j])).collect();
    let targets: Vec<Vec<f64>> = pairs.iter().map(|pr| dense_marginal(p, sizes, pr)).collect();
    let st = strides(sizes);
    let mut q = vec![1.0 / total as f64; total];
    for _ in 0..IPF_MAX_ITERATIONS {
        for (pr, target) in pairs.iter().zip(&targets) {
            let current = dense_marginal(&q, sizes, pr);
            for (idx, v) in q.iter_mut().enumerate() {
                let cell = (idx / st[pr[0]] % sizes[pr[0]]) * sizes[pr[1]] + idx / st[pr[1]] % sizes[pr[1]];
                *v = if current[cell] > 0.0 { *v * target[cell] / current[cell] } else { 0.0 };
            }
        }
        let worst = pairs
            .iter()
            .zip(&targets)
            .flat_map(|(pr, t)| {
                let m = dense_marginal(&q, sizes, pr);
                m.into_iter().zip(t).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>()
            })
            .fold(0.0, f64::max);
        if worst < IPF_TOLERANCE {
            break;
        }
    }
    q
}

fn local_hcs(dist: &JointDistribution, sources: &[Vec<usize>]) -> Result<Vec<f64>> {
    let k = sources.len();
    if k == 1 {
        return Ok(marginal_at_support(dist, &sources[0]).into_iter().map(|p| -p.log2()).collect());
    }
    if k == 2 {
        let both: Vec<usize> = {
            let mut v = sources[0].clone();
            v.extend(sources[1].iter().filter(|x| !sources[0].contains(x)));
            v
        };
        let (a, b, ab) = (
            marginal_at_support(dist, &sources[0]),
            marginal_at_support(dist, &sources[1]),
            marginal_at_support(dist, &both),
        );
        return Ok((0..a.len()).map(|i| (ab[i] / (a[i] * b[i])).log2().max(0.0)).collect());
    }
    let (labels, sizes) = source_labels(dist, sources);
    let total = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s)).filter(|&t| t <= MAX_TUPLE_SPACE);
    let Some(total) = total else {
        return Err(Error::TooLarge("source tuple space for the co-information model".into()));
    };
    let st = strides(&sizes);
    let tuple: Vec<usize> = (0..dist.support_size())
        .map(|i| (0..k).map(|s| labels[s][i] * st[s]).sum())
        .collect();
    let mut p = vec![0.0; total];
    for (i, e) in dist.entries().iter().enumerate() {
        p[tuple[i]] += e.1;
    }
    let q = pairwise_max_entropy(&p, &sizes);
    // local co-information: Σ_{S ≠ ∅} (-1)^{|S|+1} h_Q(t_S)
    let mut co = vec![0.0; dist.support_size()];
    for mask in 1u32..(1 << k) {
        let keep: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let sign = if keep.len() % 2 == 1 { 1.0 } else { -1.0 };
        let marg = dense_marginal(&q, &sizes, &keep);
        let sub_st = strides(&keep.iter().map(|&d| sizes[d]).collect::<Vec<_>>());
        for (i, c) in co.iter_mut().enumerate() {
            let idx: usize = keep.iter().zip(&sub_st).map(|(&d, &s)| labels[d][i] * s).sum();
            *c += sign * -marg[idx].log2();
        }
    }
    Ok(co.into_iter().map(|c| c.max(0.0)).collect())
}

/// Decompose `H(variables)` into partial entropy atoms. Between two and
/// four variables; each variable is one element of the lattice.
pub fn ped_decompose(dist: &JointDistribution, variables: &[usize], f: PedFunction) -> Result<DecompositionResult> {
    if variables.len() < 2 {
        return Err(Error::InvalidParameter("partial entropy decomposition needs at least 2 variables".into()));
    }
    dist.check_variables(variables)?;
    let lattice = build_lattice(variables.len())?;
    let elements: Vec<Vec<usize>> = variables.iter().map(|&v| vec![v]).collect();
    let values = lattice
        .atoms()
        .iter()
        .map(|a| redundant_entropy(dist, &antichain_sources(a, &elements), f))
        .collect::<Result<Vec<f64>>>()?;
    DecompositionResult::from_lattice(lattice, values, f.to_string(), Vec::new())
}
