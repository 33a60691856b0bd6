//! Multivariate dependence and complexity measures over a selection of
//! variables of a joint distribution, in bits.
//!
//! | Measure | Expected form |
//! |---|---|
//! | total correlation | `Σ H(Xi) - H(X)` |
//! | dual total correlation | `H(X) - Σ H(Xi | X-i)` |
//! | co-information | `Σ_{S ⊆ X} (-1)^{|S|+1} H(S)` |
//! | O-information | `TC - DTC` |
//! | S-information | `TC + DTC` |
//! | TSE complexity | `Σ_k ⟨I(X^k ; X^-k)⟩` for `k ≤ N/2` |
//! | description complexity | `TC - TC/N - mean_i TC(X-i)` |
//!
//! Local forms are evaluated per support state and average to the expected
//! value. Local ω and σ are reported as raw numbers; no sign interpretation
//! is applied when `tc` or `dtc` is negative.

use crate::distribution::JointDistribution;
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::shannon::{entropy, marginal_at_support, mutual_information};
use itertools::Itertools;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Largest system for which co-information enumerates all subsets.
pub const CO_INFORMATION_MAX_VARS: usize = 20;
/// Largest system for exact TSE complexity.
pub const TSE_EXACT_MAX_VARS: usize = 16;

fn check_selection(dist: &JointDistribution, vars: &[usize], min: usize) -> Result<()> {
    dist.check_variables(vars)?;
    if vars.len() < min {
        return Err(Error::InvalidParameter(format!(
            "measure needs at least {min} variables, got {}",
            vars.len()
        )));
    }
    Ok(())
}

fn without(vars: &[usize], i: usize) -> Vec<usize> {
    vars.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect()
}

pub fn total_correlation(dist: &JointDistribution, vars: &[usize]) -> Result<f64> {
    check_selection(dist, vars, 2)?;
    tc_unchecked(dist, vars)
}

fn tc_unchecked(dist: &JointDistribution, vars: &[usize]) -> Result<f64> {
    if vars.len() < 2 {
        return Ok(0.0);
    }
    let marginals: f64 = vars.iter().map(|&v| entropy(dist, &[v])).sum::<Result<f64>>()?;
    Ok((marginals - entropy(dist, vars)?).max(0.0))
}

pub fn dual_total_correlation(dist: &JointDistribution, vars: &[usize]) -> Result<f64> {
    check_selection(dist, vars, 2)?;
    let h = entropy(dist, vars)?;
    let n = vars.len() as f64;
    let rest: f64 = (0..vars.len())
        .map(|i| entropy(dist, &without(vars, i)))
        .sum::<Result<f64>>()?;
    // H - Σ (H - H(X-i))
    Ok(((1.0 - n) * h + rest).max(0.0))
}

/// Alternating-sum co-information. Equals mutual information for two variables.
pub fn co_information(dist: &JointDistribution, vars: &[usize]) -> Result<f64> {
    check_selection(dist, vars, 2)?;
    if vars.len() > CO_INFORMATION_MAX_VARS {
        return Err(Error::TooLarge(format!(
            "co-information over {} variables enumerates 2^{} subsets",
            vars.len(),
            vars.len()
        )));
    }
    let n = vars.len();
    let mut total = 0.0;
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| vars[i]).collect();
        let sign = if subset.len() % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * entropy(dist, &subset)?;
    }
    Ok(total)
}

pub fn o_information(dist: &JointDistribution, vars: &[usize]) -> Result<f64> {
    check_selection(dist, vars, 3)?;
    Ok(total_correlation(dist, vars)? - dual_total_correlation(dist, vars)?)
}

pub fn s_information(dist: &JointDistribution, vars: &[usize]) -> Result<f64> {
    check_selection(dist, vars, 2)?;
    Ok(total_correlation(dist, vars)? + dual_total_correlation(dist, vars)?)
}

/// `DTC = N · C`.
pub fn description_complexity(dist: &JointDistribution, vars: &[usize]) -> Result<f64> {
    check_selection(dist, vars, 2)?;
    let n = vars.len() as f64;
    let tc = tc_unchecked(dist, vars)?;
    let mean_rest = (0..vars.len())
        .map(|i| tc_unchecked(dist, &without(vars, i)))
        .sum::<Result<f64>>()?
        / n;
    Ok(tc - tc / n - mean_rest)
}

/// Per-support-state local values of the multivariate family.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalProfile {
    pub probabilities: Vec<f64>,
    pub tc: Vec<f64>,
    pub dtc: Vec<f64>,
}

impl LocalProfile {
    pub fn o_information(&self) -> Vec<f64> {
        self.tc.iter().zip(&self.dtc).map(|(a, b)| a - b).collect()
    }

    pub fn s_information(&self) -> Vec<f64> {
        self.tc.iter().zip(&self.dtc).map(|(a, b)| a + b).collect()
    }

    /// Probability-weighted mean of a local vector.
    pub fn expectation(&self, locals: &[f64]) -> f64 {
        self.probabilities.iter().zip(locals).map(|(p, v)| p * v).sum()
    }
}

/// Local tc and dtc at every support state of `dist`, in support order.
///
/// `tc(x) = Σ h(xi) - h(x)` and `dtc(x) = h(x) - Σ h(xi | x-i)`.
pub fn local_profile(dist: &JointDistribution, vars: &[usize]) -> Result<LocalProfile> {
    check_selection(dist, vars, 2)?;
    let h = |v: &[usize]| -> Vec<f64> { marginal_at_support(dist, v).iter().map(|p| -p.log2()).collect() };
    let joint = h(vars);
    let n = vars.len() as f64;
    let mut tc: Vec<f64> = joint.iter().map(|x| -x).collect();
    for &v in vars {
        for (t, hv) in tc.iter_mut().zip(h(&[v])) {
            *t += hv;
        }
    }
    let mut dtc: Vec<f64> = joint.iter().map(|x| (1.0 - n) * x).collect();
    for i in 0..vars.len() {
        for (d, hr) in dtc.iter_mut().zip(h(&without(vars, i))) {
            *d += hr;
        }
    }
    Ok(LocalProfile {
        probabilities: dist.entries().iter().map(|e| e.1).collect(),
        tc,
        dtc,
    })
}

fn support_index(dist: &JointDistribution, state: &[usize]) -> Result<usize> {
    let code = dist.codec().encode(state);
    dist.entries()
        .binary_search_by_key(&code, |e| e.0)
        .map_err(|_| Error::ZeroProbability)
}

pub fn local_total_correlation(dist: &JointDistribution, vars: &[usize], state: &[usize]) -> Result<f64> {
    let i = support_index(dist, state)?;
    Ok(local_profile(dist, vars)?.tc[i])
}

pub fn local_dual_total_correlation(dist: &JointDistribution, vars: &[usize], state: &[usize]) -> Result<f64> {
    let i = support_index(dist, state)?;
    Ok(local_profile(dist, vars)?.dtc[i])
}

pub fn local_o_information(dist: &JointDistribution, vars: &[usize], state: &[usize]) -> Result<f64> {
    check_selection(dist, vars, 3)?;
    let i = support_index(dist, state)?;
    let p = local_profile(dist, vars)?;
    Ok(p.tc[i] - p.dtc[i])
}

pub fn local_s_information(dist: &JointDistribution, vars: &[usize], state: &[usize]) -> Result<f64> {
    let i = support_index(dist, state)?;
    let p = local_profile(dist, vars)?;
    Ok(p.tc[i] + p.dtc[i])
}

/// How TSE complexity averages over subsets at each scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TseMode {
    /// Enumerate every subset; limited to [`TSE_EXACT_MAX_VARS`].
    Exact,
    /// Average over `per_scale` uniformly drawn subsets at every scale.
    Sampled { per_scale: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TseResult {
    pub value: f64,
    /// Standard error of the sampled estimate; zero in exact mode.
    pub standard_error: f64,
    pub mode: TseMode,
}

struct EntropyCache<'a> {
    dist: &'a JointDistribution,
    vars: &'a [usize],
    cache: HashMap<u32, f64>,
}

impl<'a> EntropyCache<'a> {
    fn new(dist: &'a JointDistribution, vars: &'a [usize]) -> Self {
        Self {
            dist,
            vars,
            cache: HashMap::new(),
        }
    }

    fn h(&mut self, mask: u32) -> Result<f64> {
        if let Some(&v) = self.cache.get(&mask) {
            return Ok(v);
        }
        let sub: Vec<usize> = (0..self.vars.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.vars[i])
            .collect();
        let v = entropy(self.dist, &sub)?;
        self.cache.insert(mask, v);
        Ok(v)
    }
}

/// Tononi–Sporns–Edelman complexity: summed mean subset/complement mutual
/// information over subset sizes `1..=N/2`.
pub fn tse_complexity(dist: &JointDistribution, vars: &[usize], mode: TseMode) -> Result<TseResult> {
    check_selection(dist, vars, 2)?;
    let n = vars.len();
    match mode {
        TseMode::Exact => {
            if n > TSE_EXACT_MAX_VARS {
                return Err(Error::TooLarge(format!(
                    "exact TSE over {n} variables; use sampled mode above {TSE_EXACT_MAX_VARS}"
                )));
            }
            let full = (1u32 << n) - 1;
            let mut cache = EntropyCache::new(dist, vars);
            let h_all = cache.h(full)?;
            let mut value = 0.0;
            for k in 1..=n / 2 {
                let mut sum = 0.0;
                let mut count = 0usize;
                for combo in (0..n).combinations(k) {
                    let mask = combo.iter().fold(0u32, |m, &i| m | 1 << i);
                    sum += cache.h(mask)? + cache.h(full & !mask)? - h_all;
                    count += 1;
                }
                value += sum / count as f64;
            }
            Ok(TseResult {
                value: value.max(0.0),
                standard_error: 0.0,
                mode,
            })
        }
        TseMode::Sampled { per_scale, seed } => {
            if per_scale == 0 {
                return Err(Error::InvalidParameter("per_scale must be positive".into()));
            }
            let h_all = entropy(dist, vars)?;
            let mut value = 0.0;
            let mut variance = 0.0;
            for k in 1..=n / 2 {
                let draws: Vec<f64> = (0..per_scale)
                    .into_par_iter()
                    .map(|j| {
                        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[k as u64, j as u64]));
                        let picked = sample(&mut rng, n, k).into_vec();
                        let part: Vec<usize> = picked.iter().map(|&i| vars[i]).collect();
                        let rest: Vec<usize> =
                            (0..n).filter(|i| !picked.contains(i)).map(|i| vars[i]).collect();
                        Ok(entropy(dist, &part)? + entropy(dist, &rest)? - h_all)
                    })
                    .collect::<Result<Vec<f64>>>()?;
                let m = draws.len() as f64;
                let mean = draws.iter().sum::<f64>() / m;
                value += mean;
                if draws.len() > 1 {
                    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
                    variance += var / m;
                }
            }
            Ok(TseResult {
                value: value.max(0.0),
                standard_error: variance.sqrt(),
                mode,
            })
        }
    }
}

/// TSE complexity computed only from total correlations of subsets:
/// `Σ_k [TC(X) - ⟨TC(X^k)⟩ - ⟨TC(X^(N-k))⟩]`. Algebraically identical to
/// [`tse_complexity`] in exact mode.
pub fn tse_from_total_correlations(dist: &JointDistribution, vars: &[usize]) -> Result<f64> {
    check_selection(dist, vars, 2)?;
    let n = vars.len();
    if n > TSE_EXACT_MAX_VARS {
        return Err(Error::TooLarge(format!("{n} variables")));
    }
    let tc = tc_unchecked(dist, vars)?;
    let mean_tc = |k: usize| -> Result<f64> {
        let mut sum = 0.0;
        let mut count = 0usize;
        for combo in (0..n).combinations(k) {
            let sub: Vec<usize> = combo.iter().map(|&i| vars[i]).collect();
            sum += tc_unchecked(dist, &sub)?;
            count += 1;
        }
        Ok(sum / count as f64)
    };
    let mut value = 0.0;
    for k in 1..=n / 2 {
        value += tc - mean_tc(k)? - mean_tc(n - k)?;
    }
    Ok(value)
}

/// Whole-minus-sum integrated information
/// `Φ = I(past; future) - Σ_i I(past_i; future_i)` over matched parts.
///
/// `past_parts[i]` and `future_parts[i]` list the variables of part `i`
/// in the lagged joint distribution. May be negative.
pub fn whole_minus_sum_phi(
    dist: &JointDistribution,
    past_parts: &[Vec<usize>],
    future_parts: &[Vec<usize>],
) -> Result<f64> {
    if past_parts.len() != future_parts.len() || past_parts.len() < 2 {
        return Err(Error::InvalidParameter(
            "past and future must be split into the same number (≥ 2) of parts".into(),
        ));
    }
    if past_parts.iter().chain(future_parts).any(Vec::is_empty) {
        return Err(Error::InvalidParameter("empty part".into()));
    }
    let past: Vec<usize> = past_parts.concat();
    let future: Vec<usize> = future_parts.concat();
    let whole = mutual_information(dist, &past, &future)?;
    let parts = past_parts
        .iter()
        .zip(future_parts)
        .map(|(p, f)| mutual_information(dist, p, f))
        .sum::<Result<f64>>()?;
    Ok(whole - parts)
}

/// Φ over a discrete series: `partition` splits the variables into parts,
/// each part's past is its `history` lagged states.
pub fn whole_minus_sum_phi_series(
    series: &crate::series::DiscreteSeries,
    partition: &[Vec<usize>],
    history: usize,
) -> Result<f64> {
    if history == 0 {
        return Err(Error::InvalidParameter("history must be at least 1".into()));
    }
    let mut covered: Vec<usize> = partition.concat();
    covered.sort_unstable();
    let n_covered = covered.len();
    covered.dedup();
    if covered.len() != n_covered || covered != (0..series.n_vars()).collect::<Vec<_>>() {
        return Err(Error::NotAPartition(
            "parts must cover every variable exactly once".into(),
        ));
    }
    let mut variables = Vec::new();
    let mut lags = Vec::new();
    let mut past_parts = Vec::new();
    let mut future_parts = Vec::new();
    for part in partition {
        let mut idx = Vec::new();
        for &v in part {
            for lag in 1..=history {
                idx.push(variables.len());
                variables.push(v);
                lags.push(lag);
            }
        }
        past_parts.push(idx);
    }
    for part in partition {
        let mut idx = Vec::new();
        for &v in part {
            idx.push(variables.len());
            variables.push(v);
            lags.push(0);
        }
        future_parts.push(idx);
    }
    let dist = JointDistribution::from_series(series, &variables, &lags)?;
    whole_minus_sum_phi(&dist, &past_parts, &future_parts)
}

/// All scalar complexity measures of one system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub tc: f64,
    pub dtc: f64,
    pub o_info: f64,
    pub s_info: f64,
    pub description: f64,
    pub tse: Option<TseResult>,
}

pub fn complexity_report(dist: &JointDistribution, vars: &[usize], tse: Option<TseMode>) -> Result<ComplexityReport> {
    check_selection(dist, vars, 2)?;
    let tc = total_correlation(dist, vars)?;
    let dtc = dual_total_correlation(dist, vars)?;
    Ok(ComplexityReport {
        tc,
        dtc,
        o_info: tc - dtc,
        s_info: tc + dtc,
        description: description_complexity(dist, vars)?,
        tse: tse.map(|m| tse_complexity(dist, vars, m)).transpose()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{Alphabet, DiscreteSeries};
    use crate::shannon::conditional_entropy;
    use proptest::prelude::*;

    fn xor() -> JointDistribution {
        let a = Alphabet::new(vec![2, 2, 2]).unwrap();
        JointDistribution::new(a, (0..4).map(|i| (vec![i >> 1, i & 1, (i >> 1) ^ (i & 1)], 0.25))).unwrap()
    }

    fn triple_copy() -> JointDistribution {
        let a = Alphabet::new(vec![2, 2, 2]).unwrap();
        JointDistribution::new(a, vec![(vec![0, 0, 0], 0.5), (vec![1, 1, 1], 0.5)]).unwrap()
    }

    fn sync(n: usize, states: usize) -> JointDistribution {
        let a = Alphabet::new(vec![states; n]).unwrap();
        JointDistribution::new(a, (0..states).map(|s| (vec![s; n], 1.0 / states as f64))).unwrap()
    }

    /// Brute-force co-information straight from its inclusion–exclusion definition.
    fn co_info_oracle(d: &JointDistribution, n: usize) -> f64 {
        let mut total = 0.0;
        for mask in 1usize..(1 << n) {
            let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let k = s.len();
            total += if k % 2 == 1 { 1.0 } else { -1.0 } * entropy(d, &s).unwrap();
        }
        total
    }

    #[test]
    fn synchronized_system() {
        let d = sync(10, 8);
        let vars: Vec<usize> = (0..10).collect();
        assert!((total_correlation(&d, &vars).unwrap() - 27.0).abs() < 1e-9);
        assert!((dual_total_correlation(&d, &vars).unwrap() - 3.0).abs() < 1e-9);
        assert!((description_complexity(&d, &vars).unwrap() - 0.3).abs() < 1e-9);
    }

    #[test]
    fn independent_system_is_zero_everywhere() {
        let d = JointDistribution::uniform(&[2, 3, 2]).unwrap();
        let v = [0, 1, 2];
        assert!(total_correlation(&d, &v).unwrap().abs() < 1e-12);
        assert!(dual_total_correlation(&d, &v).unwrap().abs() < 1e-12);
        assert!(co_information(&d, &v).unwrap().abs() < 1e-12);
        assert!(o_information(&d, &v).unwrap().abs() < 1e-12);
        assert!(s_information(&d, &v).unwrap().abs() < 1e-12);
        assert!(description_complexity(&d, &v).unwrap().abs() < 1e-12);
        assert!(tse_complexity(&d, &v, TseMode::Exact).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn xor_triple() {
        let d = xor();
        let v = [0, 1, 2];
        assert!((total_correlation(&d, &v).unwrap() - 1.0).abs() < 1e-12);
        assert!((dual_total_correlation(&d, &v).unwrap() - 2.0).abs() < 1e-12);
        assert!((co_info_oracle(&d, 3) + 1.0).abs() < 1e-12);
        assert!((co_information(&d, &v).unwrap() + 1.0).abs() < 1e-12);
        assert!((o_information(&d, &v).unwrap() + 1.0).abs() < 1e-12);
        assert!((s_information(&d, &v).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn triple_copy_is_redundant() {
        let d = triple_copy();
        let v = [0, 1, 2];
        assert!((co_info_oracle(&d, 3) - 1.0).abs() < 1e-12);
        assert!((co_information(&d, &v).unwrap() - 1.0).abs() < 1e-12);
        assert!((total_correlation(&d, &v).unwrap() - 2.0).abs() < 1e-12);
        assert!((dual_total_correlation(&d, &v).unwrap() - 1.0).abs() < 1e-12);
        assert!((o_information(&d, &v).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn o_information_needs_three() {
        let d = JointDistribution::uniform(&[2, 2]).unwrap();
        assert!(o_information(&d, &[0, 1]).is_err());
    }

    #[test]
    fn co_information_refuses_huge_systems() {
        let d = sync(21, 1);
        let v: Vec<usize> = (0..21).collect();
        assert!(matches!(co_information(&d, &v), Err(Error::TooLarge(_))));
    }

    /// Brute force over every bipartition listed explicitly.
    fn tse_oracle(d: &JointDistribution, n: usize) -> f64 {
        let mut total = 0.0;
        for k in 1..=n / 2 {
            let mut vals = Vec::new();
            for mask in 0usize..(1 << n) {
                if mask.count_ones() as usize != k {
                    continue;
                }
                let a: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let b: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
                vals.push(mutual_information(d, &a, &b).unwrap());
            }
            total += vals.iter().sum::<f64>() / vals.len() as f64;
        }
        total
    }

    #[test]
    fn tse_matches_bipartition_oracle() {
        // three copies of one bit plus an independent bit
        let a = Alphabet::new(vec![2; 4]).unwrap();
        let d = JointDistribution::new(
            a,
            (0..4).map(|i| (vec![i >> 1, i >> 1, i >> 1, i & 1], 0.25)),
        )
        .unwrap();
        let v = [0, 1, 2, 3];
        let exact = tse_complexity(&d, &v, TseMode::Exact).unwrap();
        assert!((exact.value - tse_oracle(&d, 4)).abs() < 1e-12);
        // k=1: (1+1+1+0)/4, k=2: every 2|2 split separates the copies
        assert!((exact.value - 1.75).abs() < 1e-12);
        let sampled = tse_complexity(&d, &v, TseMode::Sampled { per_scale: 400, seed: 7 }).unwrap();
        assert!((sampled.value - exact.value).abs() < 5.0 * sampled.standard_error.max(1e-3));
        let again = tse_complexity(&d, &v, TseMode::Sampled { per_scale: 400, seed: 7 }).unwrap();
        assert_eq!(sampled, again);
    }

    #[test]
    fn tse_exact_cap() {
        let d = sync(17, 1);
        let v: Vec<usize> = (0..17).collect();
        assert!(matches!(tse_complexity(&d, &v, TseMode::Exact), Err(Error::TooLarge(_))));
    }

    #[test]
    fn phi_cases() {
        // two independent memoryless bits
        let d = JointDistribution::uniform(&[2, 2, 2, 2]).unwrap();
        let past = vec![vec![0], vec![1]];
        let fut = vec![vec![2], vec![3]];
        assert!(whole_minus_sum_phi(&d, &past, &fut).unwrap().abs() < 1e-12);
        // one persistent bit copied in both elements: (p1, p2, f1, f2) all equal
        let a = Alphabet::new(vec![2; 4]).unwrap();
        let red = JointDistribution::new(a.clone(), vec![(vec![0; 4], 0.5), (vec![1; 4], 0.5)]).unwrap();
        assert!((whole_minus_sum_phi(&red, &past, &fut).unwrap() + 1.0).abs() < 1e-12);
        // each next state is the XOR of both pasts, pasts uniform
        let parity = JointDistribution::new(
            a,
            (0..4).map(|i| {
                let (x, y) = (i >> 1, i & 1);
                (vec![x, y, x ^ y, x ^ y], 0.25)
            }),
        )
        .unwrap();
        assert!((whole_minus_sum_phi(&parity, &past, &fut).unwrap() - 1.0).abs() < 1e-12);
        assert!(whole_minus_sum_phi(&d, &past[..1], &fut[..1]).is_err());
    }

    #[test]
    fn phi_from_series_requires_partition() {
        let s = DiscreteSeries::from_columns(vec![vec![0, 1, 0, 1], vec![1, 1, 0, 0]]).unwrap();
        assert!(whole_minus_sum_phi_series(&s, &[vec![0]], 1).is_err());
        assert!(whole_minus_sum_phi_series(&s, &[vec![0], vec![1]], 1).is_ok());
    }

    fn random_dist(n: usize, w: Vec<f64>) -> JointDistribution {
        let size = 1 << n;
        let w: Vec<f64> = w.into_iter().cycle().take(size).map(|x| x * x * x).collect();
        let t: f64 = w.iter().sum();
        JointDistribution::from_dense(&vec![2; n], &w.iter().map(|x| x / t).collect::<Vec<_>>()).unwrap()
    }

    fn weights() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, 64).prop_filter("mass", |w| w.iter().map(|x| x * x * x).sum::<f64>() > 1e-3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn identities_hold(w in weights(), n in 3usize..7) {
            let d = random_dist(n, w);
            let v: Vec<usize> = (0..n).collect();
            let tc = total_correlation(&d, &v).unwrap();
            let dtc = dual_total_correlation(&d, &v).unwrap();
            prop_assert!((o_information(&d, &v).unwrap() - (tc - dtc)).abs() < 1e-9);
            prop_assert!((s_information(&d, &v).unwrap() - (tc + dtc)).abs() < 1e-9);
            // Ω = (2 - N) TC + Σ TC(X-i)
            let alt = (2.0 - n as f64) * tc
                + (0..n).map(|i| total_correlation(&d, &without(&v, i)).unwrap_or(0.0)).sum::<f64>();
            prop_assert!((alt - (tc - dtc)).abs() < 1e-9);
            // Σ = Σ_i I(Xi; X-i)
            let s: f64 = (0..n).map(|i| mutual_information(&d, &[i], &without(&v, i)).unwrap()).sum();
            prop_assert!((s - (tc + dtc)).abs() < 1e-9);
            // DTC = N · C
            prop_assert!((n as f64 * description_complexity(&d, &v).unwrap() - dtc).abs() < 1e-9);
            // DTC from residual entropies
            let res: f64 = (0..n).map(|i| conditional_entropy(&d, &[i], &without(&v, i)).unwrap()).sum();
            prop_assert!((entropy(&d, &v).unwrap() - res - dtc).abs() < 1e-9);
            // two TSE routes
            let t1 = tse_complexity(&d, &v, TseMode::Exact).unwrap().value;
            let t2 = tse_from_total_correlations(&d, &v).unwrap();
            prop_assert!((t1 - t2).abs() < 1e-9);
            prop_assert!((t1 - tse_oracle(&d, n)).abs() < 1e-9);
            // co-information
            prop_assert!((co_information(&d, &v).unwrap() - co_info_oracle(&d, n)).abs() < 1e-9);
        }

        #[test]
        fn pairwise_co_information_is_mi(w in weights()) {
            let d = random_dist(2, w);
            prop_assert!((co_information(&d, &[0, 1]).unwrap() - mutual_information(&d, &[0], &[1]).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn locals_average(w in weights()) {
            let d = random_dist(4, w);
            let v = [0, 1, 2, 3];
            let p = local_profile(&d, &v).unwrap();
            prop_assert!((p.expectation(&p.tc) - total_correlation(&d, &v).unwrap()).abs() < 1e-9);
            prop_assert!((p.expectation(&p.dtc) - dual_total_correlation(&d, &v).unwrap()).abs() < 1e-9);
            prop_assert!((p.expectation(&p.o_information()) - o_information(&d, &v).unwrap()).abs() < 1e-9);
            prop_assert!((p.expectation(&p.s_information()) - s_information(&d, &v).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn independent_addition_leaves_measures(w in weights()) {
            let d = random_dist(3, w);
            let coin = JointDistribution::from_dense(&[2], &[0.3, 0.7]).unwrap();
            let e = d.product(&coin).unwrap();
            let v = [0, 1, 2];
            prop_assert!((total_correlation(&d, &v).unwrap() - total_correlation(&e, &v).unwrap()).abs() < 1e-9);
            prop_assert!((dual_total_correlation(&d, &v).unwrap() - dual_total_correlation(&e, &v).unwrap()).abs() < 1e-9);
            prop_assert!((o_information(&d, &v).unwrap() - o_information(&e, &v).unwrap()).abs() < 1e-9);
        }
    }
}
