//! Coarse-graining continuous series into symbols: histogram binning,
//! point-process thresholding, and ordinal-pattern embedding.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::series::{Alphabet, ContinuousSeries, DiscreteSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinScheme {
    /// Equal-width intervals over `[min, max]`.
    Uniform,
    /// Quantile edges; tied values share a bin.
    EqualFrequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinningSpec {
    pub scheme: BinScheme,
    pub bins: usize,
}

impl BinningSpec {
    pub fn new(scheme: BinScheme, bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 bins, got {bins}")));
        }
        Ok(Self { scheme, bins })
    }

    pub fn uniform(bins: usize) -> Result<Self> {
        Self::new(BinScheme::Uniform, bins)
    }

    pub fn equal_frequency(bins: usize) -> Result<Self> {
        Self::new(BinScheme::EqualFrequency, bins)
    }
}

/// Bin every column. Uniform bins are half-open `[lo, hi)` except the last,
/// which also takes the maximum.
pub fn bin_series(series: &ContinuousSeries, spec: &BinningSpec) -> Result<DiscreteSeries> {
    if spec.bins < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 bins, got {}", spec.bins)));
    }
    let columns = series
        .columns()
        .par_iter()
        .enumerate()
        .map(|(j, c)| match spec.scheme {
            BinScheme::Uniform => bin_uniform(c, spec.bins, j),
            BinScheme::EqualFrequency => Ok(bin_quantile(c, spec.bins)),
        })
        .collect::<Result<Vec<_>>>()?;
    let alphabet = Alphabet::new(vec![spec.bins; columns.len()])?;
    DiscreteSeries::with_alphabet(columns, alphabet)?.with_names(series.names().to_vec())
}

fn bin_uniform(c: &[f64], bins: usize, column: usize) -> Result<Vec<usize>> {
    let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(Error::ZeroVariance(column));
    }
    let width = (hi - lo) / bins as f64;
    Ok(c.iter()
        .map(|&x| (((x - lo) / width).floor() as usize).min(bins - 1))
        .collect())
}

fn bin_quantile(c: &[f64], bins: usize) -> Vec<usize> {
    let n = c.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| c[a].total_cmp(&c[b]));
    let mut out = vec![0; n];
    let mut rank = 0;
    for (pos, &i) in order.iter().enumerate() {
        if pos > 0 && c[i] != c[order[pos - 1]] {
            rank = pos;
        }
        out[i] = rank * bins / n;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Threshold {
    /// Events are z-scores strictly above this value.
    ZScore(f64),
    /// Pick the level where the empirical tail departs from a fitted Gaussian.
    Auto,
}

pub const AUTO_START: f64 = 1.0;
pub const AUTO_STEP: f64 = 0.1;
pub const AUTO_TAIL_RATIO: f64 = 2.0;
/// Tails with fewer samples are too noisy to count as divergence.
pub const AUTO_MIN_TAIL: usize = 10;

fn z_scores(c: &[f64], column: usize) -> Result<Vec<f64>> {
    let n = c.len() as f64;
    let mean = c.iter().sum::<f64>() / n;
    let var = c.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    if !(var > 0.0) {
        return Err(Error::ZeroVariance(column));
    }
    let sd = var.sqrt();
    Ok(c.iter().map(|x| (x - mean) / sd).collect())
}

/// Scan upward from 1σ in 0.1σ steps for the first level where the
/// empirical upper-tail mass is at least twice the standard-normal tail,
/// both there and one step higher. `None` if the tail never diverges.
pub fn auto_threshold(z: &[f64]) -> Option<f64> {
    let normal = Normal::standard();
    let mut sorted = z.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let tail_count = |s: f64| n - sorted.partition_point(|&v| v <= s);
    let diverges = |s: f64| {
        let count = tail_count(s);
        count >= AUTO_MIN_TAIL && count as f64 / n as f64 >= AUTO_TAIL_RATIO * normal.sf(s)
    };
    let top = *sorted.last()?;
    let mut step = 0;
    loop {
        let s = AUTO_START + step as f64 * AUTO_STEP;
        if s > top {
            return None;
        }
        if diverges(s) && diverges(s + AUTO_STEP) {
            return Some(s);
        }
        step += 1;
    }
}

/// Binary event series: 1 where the z-scored amplitude exceeds the
/// threshold. Under [`Threshold::Auto`] a column whose tail never departs
/// from Gaussian has no events.
pub fn point_process(series: &ContinuousSeries, threshold: Threshold) -> Result<DiscreteSeries> {
    let columns = series
        .columns()
        .par_iter()
        .enumerate()
        .map(|(j, c)| {
            let z = z_scores(c, j)?;
            let level = match threshold {
                Threshold::ZScore(t) => t,
                Threshold::Auto => auto_threshold(&z).unwrap_or(f64::INFINITY),
            };
            Ok(z.iter().map(|&v| usize::from(v > level)).collect())
        })
        .collect::<Result<Vec<Vec<usize>>>>()?;
    let alphabet = Alphabet::new(vec![2; columns.len()])?;
    DiscreteSeries::with_alphabet(columns, alphabet)?.with_names(series.names().to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinalSpec {
    pub dimension: usize,
    pub delay: usize,
}

/// Largest embedding dimension; `12!` still fits the symbol space.
pub const MAX_ORDINAL_DIMENSION: usize = 12;

impl OrdinalSpec {
    pub fn new(dimension: usize, delay: usize) -> Result<Self> {
        if !(2..=MAX_ORDINAL_DIMENSION).contains(&dimension) {
            return Err(Error::InvalidParameter(format!(
                "ordinal dimension must be in 2..={MAX_ORDINAL_DIMENSION}, got {dimension}"
            )));
        }
        if delay == 0 {
            return Err(Error::InvalidParameter("ordinal delay must be at least 1".into()));
        }
        Ok(Self { dimension, delay })
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Lehmer code of the rank pattern of `v`; equal values rank by position.
fn pattern_code(v: &[f64]) -> usize {
    let d = v.len();
    let mut code = 0;
    for i in 0..d {
        let smaller_later = (i + 1..d).filter(|&j| v[j] < v[i]).count();
        code = code * (d - i) + smaller_later;
    }
    code
}

/// Map each time `t` to the ordinal pattern of
/// `[x_t, x_{t+τ}, …, x_{t+(d-1)τ}]`, as a symbol in `0..d!`.
pub fn ordinal_embed(series: &ContinuousSeries, spec: &OrdinalSpec) -> Result<DiscreteSeries> {
    let spec = OrdinalSpec::new(spec.dimension, spec.delay)?;
    let span = (spec.dimension - 1) * spec.delay;
    if series.len() <= span {
        return Err(Error::SeriesTooShort {
            needed: span + 1,
            available: series.len(),
        });
    }
    let out_len = series.len() - span;
    let columns: Vec<Vec<usize>> = series
        .columns()
        .par_iter()
        .map(|c| {
            let mut window = vec![0.0; spec.dimension];
            (0..out_len)
                .map(|t| {
                    for (m, w) in window.iter_mut().enumerate() {
                        *w = c[t + m * spec.delay];
                    }
                    pattern_code(&window)
                })
                .collect()
        })
        .collect();
    let alphabet = Alphabet::new(vec![factorial(spec.dimension); columns.len()])?;
    DiscreteSeries::with_alphabet(columns, alphabet)?.with_names(series.names().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::plugin_entropy;
    use crate::units::Unit;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, LogNormal, StandardNormal};

    fn one(c: Vec<f64>) -> ContinuousSeries {
        ContinuousSeries::from_columns(vec![c]).unwrap()
    }

    fn gaussian(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn binning_examples() {
        let s = one(vec![0.0, 1.0, 2.0, 3.0]);
        let b = bin_series(&s, &BinningSpec::uniform(2).unwrap()).unwrap();
        assert_eq!(b.column(0), &[0, 0, 1, 1]);
        let s = one((0..400).map(|i| (i as f64 * 0.37).sin()).collect());
        let b = bin_series(&s, &BinningSpec::equal_frequency(4).unwrap()).unwrap();
        for k in 0..4 {
            assert_eq!(b.column(0).iter().filter(|&&v| v == k).count(), 100);
        }
        assert!(bin_series(&one(vec![2.0; 5]), &BinningSpec::uniform(3).unwrap()).is_err());
        assert!(BinningSpec::uniform(1).is_err());
    }

    #[test]
    fn monotone_transform_affects_only_uniform_bins() {
        let x = gaussian(500, 4);
        let ex: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let (a, b) = (one(x), one(ex));
        let u = BinningSpec::uniform(5).unwrap();
        let q = BinningSpec::equal_frequency(5).unwrap();
        assert_ne!(bin_series(&a, &u).unwrap().column(0), bin_series(&b, &u).unwrap().column(0));
        assert_eq!(bin_series(&a, &q).unwrap().column(0), bin_series(&b, &q).unwrap().column(0));
    }

    #[test]
    fn point_process_extremes() {
        let s = one(gaussian(100, 1));
        let none = point_process(&s, Threshold::ZScore(f64::INFINITY)).unwrap();
        assert!(none.column(0).iter().all(|&v| v == 0));
        let all = point_process(&s, Threshold::ZScore(f64::NEG_INFINITY)).unwrap();
        assert!(all.column(0).iter().all(|&v| v == 1));
        let low = point_process(&s, Threshold::ZScore(10.0)).unwrap();
        assert!(low.column(0).iter().all(|&v| v == 0));
        assert!(point_process(&one(vec![1.0; 4]), Threshold::Auto).is_err());
    }

    fn rate(d: &DiscreteSeries) -> f64 {
        d.column(0).iter().sum::<usize>() as f64 / d.len() as f64
    }

    #[test]
    fn auto_threshold_on_gaussian_is_sparse() {
        let s = one(gaussian(100_000, 7));
        let d = point_process(&s, Threshold::Auto).unwrap();
        assert!(rate(&d) < 0.02, "{}", rate(&d));
    }

    #[test]
    fn auto_threshold_isolates_heavy_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let heavy = LogNormal::new(1.5, 0.5).unwrap();
        let contamination = 0.05;
        let x: Vec<f64> = (0..100_000)
            .map(|_| {
                if rng.random::<f64>() < contamination {
                    3.0 + heavy.sample(&mut rng)
                } else {
                    StandardNormal.sample(&mut rng)
                }
            })
            .collect();
        let d = point_process(&one(x), Threshold::Auto).unwrap();
        let r = rate(&d);
        assert!((r - contamination).abs() < 0.5 * contamination, "{r}");
    }

    #[test]
    fn ordinal_examples() {
        let inc = one((0..20).map(f64::from).collect());
        let spec = OrdinalSpec::new(3, 1).unwrap();
        let p = ordinal_embed(&inc, &spec).unwrap();
        assert_eq!(p.len(), 18);
        assert!(p.column(0).iter().all(|&v| v == p.column(0)[0]));
        let alt = one((0..20).map(|i| (i % 2) as f64).collect());
        let p = ordinal_embed(&alt, &OrdinalSpec::new(2, 1).unwrap()).unwrap();
        for w in p.column(0).windows(2) {
            assert_ne!(w[0], w[1]);
        }
        assert!(ordinal_embed(&one(vec![1.0, 2.0]), &OrdinalSpec::new(3, 1).unwrap()).is_err());
    }

    #[test]
    fn ties_rank_by_time() {
        assert_eq!(pattern_code(&[1.0, 1.0, 1.0]), pattern_code(&[1.0, 2.0, 3.0]));
    }

    #[test]
    fn white_noise_permutation_entropy() {
        let p = ordinal_embed(&one(gaussian(100_000, 9)), &OrdinalSpec::new(3, 1).unwrap()).unwrap();
        let h = plugin_entropy(&p, &[0], Unit::Bits).unwrap();
        assert!((h - 6f64.log2()).abs() < 0.05, "{h}");
    }

    proptest! {
        #[test]
        fn binned_entropy_is_bounded(seed in 0u64..1000, bins in 2usize..9, eq in any::<bool>()) {
            let s = one(gaussian(200, seed));
            let spec = if eq { BinningSpec::equal_frequency(bins) } else { BinningSpec::uniform(bins) }.unwrap();
            let b = bin_series(&s, &spec).unwrap();
            prop_assert!(b.column(0).iter().all(|&v| v < bins));
            let h = plugin_entropy(&b, &[0], Unit::Bits).unwrap();
            prop_assert!(h <= (bins as f64).log2() + 1e-12);
        }

        #[test]
        fn ordinal_patterns_ignore_monotone_maps(seed in 0u64..1000, d in 2usize..6, tau in 1usize..4) {
            let x = gaussian(120, seed);
            let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powi(3) + v.exp()).collect();
            let spec = OrdinalSpec::new(d, tau).unwrap();
            let a = ordinal_embed(&one(x), &spec).unwrap();
            let b = ordinal_embed(&one(y), &spec).unwrap();
            prop_assert_eq!(a.column(0), b.column(0));
        }
    }
}
