//! Nearest-neighbor estimators on continuous data, in nats, using the
//! maximum-coordinate-difference distance throughout.
//!
//! - Kozachenko–Leonenko differential entropy
//! - KSG mutual information, algorithms 1 and 2
//! - KSG conditional mutual information, algorithms 1 and 2
//!
//! Every estimate carries its per-sample local values, whose mean is the
//! estimate. Exactly repeated joint points are broken with a seeded jitter
//! of `1e-10` times each column's scale, and the result records that it
//! happened.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::digamma;

use super::neighbors::{Points, Search, BRUTE_FORCE_LIMIT};
use crate::error::{Error, Result};
use crate::series::ContinuousSeries;
use crate::units::LocalSeries;

pub const JITTER_SCALE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnnConfig {
    pub k: usize,
    /// Seeds the tie-breaking jitter.
    pub seed: u64,
    pub brute_force_limit: usize,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self {
            k: 4,
            seed: 0,
            brute_force_limit: BRUTE_FORCE_LIMIT,
        }
    }
}

impl KnnConfig {
    pub fn with_k(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum KsgVariant {
    #[default]
    One,
    Two,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnEstimate {
    pub value: f64,
    pub locals: LocalSeries,
    /// Whether duplicate points forced jitter.
    pub jittered: bool,
    pub n_samples: usize,
}

impl KnnEstimate {
    fn from_locals(values: Vec<f64>, jittered: bool) -> Self {
        let n_samples = values.len();
        let locals = LocalSeries::new(values);
        Self {
            value: locals.mean(),
            locals,
            jittered,
            n_samples,
        }
    }
}

fn std_dev(c: &[f64]) -> f64 {
    let n = c.len() as f64;
    let m = c.iter().sum::<f64>() / n;
    (c.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt()
}

fn has_duplicate_rows(cols: &[Vec<f64>]) -> bool {
    let n = cols.first().map_or(0, Vec::len);
    let mut rows: Vec<usize> = (0..n).collect();
    let cmp = |a: &usize, b: &usize| {
        cols.iter()
            .map(|c| c[*a].total_cmp(&c[*b]))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    };
    rows.sort_unstable_by(cmp);
    rows.windows(2).any(|w| cmp(&w[0], &w[1]).is_eq())
}

/// Validated and, if needed, jittered copies of the input columns.
struct Prepared {
    cols: Vec<Vec<f64>>,
    jittered: bool,
}

fn prepare(columns: &[&[f64]], cfg: &KnnConfig, standardize: bool) -> Result<Prepared> {
    if columns.is_empty() {
        return Err(Error::EmptySelection);
    }
    if cfg.k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let n = columns[0].len();
    if n < cfg.k + 1 {
        return Err(Error::SeriesTooShort {
            needed: cfg.k + 1,
            available: n,
        });
    }
    let mut cols = Vec::with_capacity(columns.len());
    for (j, c) in columns.iter().enumerate() {
        if c.len() != n {
            return Err(Error::Ragged {
                row: j,
                found: c.len(),
                expected: n,
            });
        }
        if let Some(row) = c.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row, column: j });
        }
        let sd = std_dev(c);
        if sd == 0.0 {
            return Err(Error::ZeroVariance(j));
        }
        let scale = if standardize { sd } else { 1.0 };
        cols.push(c.iter().map(|x| x / scale).collect::<Vec<f64>>());
    }
    let jittered = has_duplicate_rows(&cols);
    if jittered {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for c in &mut cols {
            let amp = JITTER_SCALE * std_dev(c);
            for x in c.iter_mut() {
                *x += amp * rng.random_range(-1.0..1.0);
            }
        }
    }
    Ok(Prepared { cols, jittered })
}

fn search(cols: &[Vec<f64>], idx: &[usize], cfg: &KnnConfig) -> Search {
    let refs: Vec<&[f64]> = idx.iter().map(|&i| cols[i].as_slice()).collect();
    Search::with_limit(Points::from_columns(&refs), cfg.brute_force_limit)
}

fn digamma_table(n: usize) -> Vec<f64> {
    // index 0 is never read
    std::iter::once(f64::NAN).chain((1..=n).map(|i| digamma(i as f64))).collect()
}

/// Kozachenko–Leonenko entropy of the columns as one joint variable:
/// `ψ(N) - ψ(k) + d ⟨ln 2r_i⟩`, `r_i` the distance to the `k`-th neighbor.
pub fn kl_entropy_columns(columns: &[&[f64]], cfg: &KnnConfig) -> Result<KnnEstimate> {
    let prep = prepare(columns, cfg, false)?;
    let n = prep.cols[0].len();
    let d = prep.cols.len() as f64;
    let all: Vec<usize> = (0..prep.cols.len()).collect();
    let s = search(&prep.cols, &all, cfg);
    let base = digamma(n as f64) - digamma(cfg.k as f64);
    let locals: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let r = s.knn(i, cfg.k)[cfg.k - 1].0;
            base + d * (2.0 * r).ln()
        })
        .collect();
    Ok(KnnEstimate::from_locals(locals, prep.jittered))
}

pub fn kl_entropy(series: &ContinuousSeries, variables: &[usize], cfg: &KnnConfig) -> Result<KnnEstimate> {
    kl_entropy_columns(&columns_of(series, variables)?, cfg)
}

fn columns_of<'a>(series: &'a ContinuousSeries, variables: &[usize]) -> Result<Vec<&'a [f64]>> {
    if variables.is_empty() {
        return Err(Error::EmptySelection);
    }
    variables
        .iter()
        .map(|&v| {
            series.check_variable(v)?;
            Ok(series.column(v))
        })
        .collect()
}

fn subspace_distance(cols: &[Vec<f64>], idx: &[usize], i: usize, j: usize) -> f64 {
    idx.iter().map(|&c| (cols[c][i] - cols[c][j]).abs()).fold(0.0, f64::max)
}

/// KSG mutual information between the joint variables `x` and `y`.
/// Columns are scaled to unit standard deviation first.
pub fn ksg_mi_columns(x: &[&[f64]], y: &[&[f64]], cfg: &KnnConfig, variant: KsgVariant) -> Result<KnnEstimate> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySelection);
    }
    let all_cols: Vec<&[f64]> = x.iter().chain(y).copied().collect();
    let prep = prepare(&all_cols, cfg, true)?;
    let cols = &prep.cols;
    let n = cols[0].len();
    let k = cfg.k;
    let xi: Vec<usize> = (0..x.len()).collect();
    let yi: Vec<usize> = (x.len()..cols.len()).collect();
    let all: Vec<usize> = (0..cols.len()).collect();
    let joint = search(cols, &all, cfg);
    let sx = search(cols, &xi, cfg);
    let sy = search(cols, &yi, cfg);
    let psi = digamma_table(n + 1);
    let locals: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let nbrs = joint.knn(i, k);
            match variant {
                KsgVariant::One => {
                    let eps = nbrs[k - 1].0;
                    let nx = sx.count(i, eps, true);
                    let ny = sy.count(i, eps, true);
                    psi[k] + psi[n] - psi[nx + 1] - psi[ny + 1]
                }
                KsgVariant::Two => {
                    let ex = nbrs.iter().map(|&(_, j)| subspace_distance(cols, &xi, i, j)).fold(0.0, f64::max);
                    let ey = nbrs.iter().map(|&(_, j)| subspace_distance(cols, &yi, i, j)).fold(0.0, f64::max);
                    let nx = sx.count(i, ex, false);
                    let ny = sy.count(i, ey, false);
                    psi[k] - 1.0 / k as f64 + psi[n] - psi[nx] - psi[ny]
                }
            }
        })
        .collect();
    Ok(KnnEstimate::from_locals(locals, prep.jittered))
}

pub fn ksg_mi(
    series: &ContinuousSeries,
    x: &[usize],
    y: &[usize],
    cfg: &KnnConfig,
    variant: KsgVariant,
) -> Result<KnnEstimate> {
    ksg_mi_columns(&columns_of(series, x)?, &columns_of(series, y)?, cfg, variant)
}

/// KSG conditional mutual information `I(x; y | z)`; an empty `z` falls
/// back to [`ksg_mi_columns`].
pub fn ksg_cmi_columns(
    x: &[&[f64]],
    y: &[&[f64]],
    z: &[&[f64]],
    cfg: &KnnConfig,
    variant: KsgVariant,
) -> Result<KnnEstimate> {
    if z.is_empty() {
        return ksg_mi_columns(x, y, cfg, variant);
    }
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySelection);
    }
    let all_cols: Vec<&[f64]> = x.iter().chain(y).chain(z).copied().collect();
    let prep = prepare(&all_cols, cfg, true)?;
    let cols = &prep.cols;
    let n = cols[0].len();
    let k = cfg.k;
    let (nx, ny) = (x.len(), y.len());
    let zi: Vec<usize> = (nx + ny..cols.len()).collect();
    let xzi: Vec<usize> = (0..nx).chain(zi.iter().copied()).collect();
    let yzi: Vec<usize> = (nx..nx + ny).chain(zi.iter().copied()).collect();
    let all: Vec<usize> = (0..cols.len()).collect();
    let joint = search(cols, &all, cfg);
    let sz = search(cols, &zi, cfg);
    let sxz = search(cols, &xzi, cfg);
    let syz = search(cols, &yzi, cfg);
    let psi = digamma_table(n + 1);
    let locals: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let nbrs = joint.knn(i, k);
            match variant {
                KsgVariant::One => {
                    let eps = nbrs[k - 1].0;
                    let n_xz = sxz.count(i, eps, true);
                    let n_yz = syz.count(i, eps, true);
                    let n_z = sz.count(i, eps, true);
                    psi[k] - psi[n_xz + 1] - psi[n_yz + 1] + psi[n_z + 1]
                }
                KsgVariant::Two => {
                    let reach = |idx: &[usize]| {
                        nbrs.iter().map(|&(_, j)| subspace_distance(cols, idx, i, j)).fold(0.0, f64::max)
                    };
                    let (ex, ey, ez) = (reach(&xzi[..nx]), reach(&yzi[..ny]), reach(&zi));
                    let box_of = |e: f64, m: usize| -> Vec<f64> {
                        std::iter::repeat_n(e, m).chain(std::iter::repeat_n(ez, zi.len())).collect()
                    };
                    let n_xz = sxz.count_box(i, &box_of(ex, nx), false);
                    let n_yz = syz.count_box(i, &box_of(ey, ny), false);
                    let n_z = sz.count(i, ez, false);
                    psi[k] - 2.0 / k as f64 + psi[n_z] - psi[n_xz] + 1.0 / n_xz as f64 - psi[n_yz]
                        + 1.0 / n_yz as f64
                }
            }
        })
        .collect();
    Ok(KnnEstimate::from_locals(locals, prep.jittered))
}

pub fn ksg_conditional_mi(
    series: &ContinuousSeries,
    x: &[usize],
    y: &[usize],
    z: &[usize],
    cfg: &KnnConfig,
    variant: KsgVariant,
) -> Result<KnnEstimate> {
    let zc = if z.is_empty() { Vec::new() } else { columns_of(series, z)? };
    ksg_cmi_columns(&columns_of(series, x)?, &columns_of(series, y)?, &zc, cfg, variant)
}
