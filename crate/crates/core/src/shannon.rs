//! Shannon measures on discrete joint distributions, in bits.
//!
//! Every expected measure has a pointwise counterpart evaluated at a full
//! joint state of the distribution; the probability-weighted mean of the
//! local values equals the expected value.

use crate::distribution::JointDistribution;
use crate::error::{Error, Result};

/// Probability of each support entry's projection onto `variables`,
/// aligned with the distribution's support order. An empty selection maps
/// every entry to probability one.
pub(crate) fn marginal_at_support(dist: &JointDistribution, variables: &[usize]) -> Vec<f64> {
    let entries = dist.entries();
    if variables.is_empty() {
        return vec![1.0; entries.len()];
    }
    let codes = dist.projected_codes(variables);
    let mut order: Vec<usize> = (0..codes.len()).collect();
    order.sort_unstable_by_key(|&i| codes[i]);
    let mut out = vec![0.0; codes.len()];
    for group in order.chunk_by(|&a, &b| codes[a] == codes[b]) {
        let mass: f64 = group.iter().map(|&i| entries[i].1).sum();
        for &i in group {
            out[i] = mass;
        }
    }
    out
}

/// Marginal probabilities of the distinct projections onto `variables`.
fn marginal_masses(dist: &JointDistribution, variables: &[usize]) -> Vec<f64> {
    let entries = dist.entries();
    let mut pairs: Vec<(u64, f64)> = dist
        .projected_codes(variables)
        .into_iter()
        .zip(entries.iter().map(|e| e.1))
        .collect();
    pairs.sort_by_key(|e| e.0);
    pairs
        .chunk_by(|a, b| a.0 == b.0)
        .map(|g| g.iter().map(|e| e.1).sum())
        .collect()
}

pub(crate) fn plogp_sum(masses: impl IntoIterator<Item = f64>) -> f64 {
    masses
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

fn disjoint(sets: &[&[usize]]) -> Result<()> {
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if let Some(&v) = a.iter().find(|v| b.contains(v)) {
                return Err(Error::OverlappingSets(v));
            }
        }
    }
    Ok(())
}

fn union(sets: &[&[usize]]) -> Vec<usize> {
    sets.iter().flat_map(|s| s.iter().copied()).collect()
}

fn state_prob(dist: &JointDistribution, state: &[usize]) -> Result<f64> {
    let p = dist.prob(state);
    if p <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    Ok(p)
}

fn marginal_prob(dist: &JointDistribution, variables: &[usize], state: &[usize]) -> Result<f64> {
    if variables.is_empty() {
        return Ok(1.0);
    }
    let sub: Vec<usize> = variables.iter().map(|&v| state[v]).collect();
    let p = dist.marginalize(variables)?.prob(&sub);
    if p <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    Ok(p)
}

/// Joint entropy `H(variables)`. An empty selection has zero entropy.
pub fn entropy(dist: &JointDistribution, variables: &[usize]) -> Result<f64> {
    dist.check_variables(variables)?;
    if variables.is_empty() {
        return Ok(0.0);
    }
    Ok(plogp_sum(marginal_masses(dist, variables)))
}

/// Surprise `log(1/P(x_variables))` at a full joint state.
pub fn local_entropy(dist: &JointDistribution, variables: &[usize], state: &[usize]) -> Result<f64> {
    dist.check_variables(variables)?;
    state_prob(dist, state)?;
    Ok(-marginal_prob(dist, variables, state)?.log2())
}

/// `H(target | given) = H(target, given) - H(given)`.
pub fn conditional_entropy(dist: &JointDistribution, target: &[usize], given: &[usize]) -> Result<f64> {
    disjoint(&[target, given])?;
    let h = entropy(dist, &union(&[target, given]))? - entropy(dist, given)?;
    Ok(h.max(0.0))
}

pub fn local_conditional_entropy(
    dist: &JointDistribution,
    target: &[usize],
    given: &[usize],
    state: &[usize],
) -> Result<f64> {
    disjoint(&[target, given])?;
    Ok(local_entropy(dist, &union(&[target, given]), state)? - local_entropy(dist, given, state)?)
}

/// Relative entropy `D(p || q)`. Fails if `p` puts mass where `q` has none.
pub fn kl_divergence(p: &JointDistribution, q: &JointDistribution) -> Result<f64> {
    if p.alphabet() != q.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let mut total = 0.0;
    for (state, pp) in p.iter() {
        let qq = q.prob(&state);
        if qq <= 0.0 {
            return Err(Error::SupportViolation(pp));
        }
        total += pp * (pp / qq).log2();
    }
    Ok(total.max(0.0))
}

/// Local divergence `log(p(x)/q(x)) = h_q(x) - h_p(x)`.
pub fn local_kl_divergence(p: &JointDistribution, q: &JointDistribution, state: &[usize]) -> Result<f64> {
    if p.alphabet() != q.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let pp = state_prob(p, state)?;
    let qq = q.prob(state);
    if qq <= 0.0 {
        return Err(Error::SupportViolation(pp));
    }
    Ok((pp / qq).log2())
}

/// `I(a; b) = H(a) + H(b) - H(a, b)`.
pub fn mutual_information(dist: &JointDistribution, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySelection);
    }
    disjoint(&[a, b])?;
    let mi = entropy(dist, a)? + entropy(dist, b)? - entropy(dist, &union(&[a, b]))?;
    Ok(mi.max(0.0))
}

/// `i(a; b) = log(P(a, b) / (P(a) P(b)))` at a full joint state; may be negative.
pub fn local_mutual_information(
    dist: &JointDistribution,
    a: &[usize],
    b: &[usize],
    state: &[usize],
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySelection);
    }
    disjoint(&[a, b])?;
    state_prob(dist, state)?;
    let pab = marginal_prob(dist, &union(&[a, b]), state)?;
    let pa = marginal_prob(dist, a, state)?;
    let pb = marginal_prob(dist, b, state)?;
    Ok((pab / (pa * pb)).log2())
}

/// `I(a; b | given) = H(a, g) + H(b, g) - H(a, b, g) - H(g)`.
pub fn conditional_mutual_information(
    dist: &JointDistribution,
    a: &[usize],
    b: &[usize],
    given: &[usize],
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySelection);
    }
    disjoint(&[a, b, given])?;
    let cmi = entropy(dist, &union(&[a, given]))? + entropy(dist, &union(&[b, given]))?
        - entropy(dist, &union(&[a, b, given]))?
        - entropy(dist, given)?;
    Ok(cmi.max(0.0))
}

pub fn local_conditional_mutual_information(
    dist: &JointDistribution,
    a: &[usize],
    b: &[usize],
    given: &[usize],
    state: &[usize],
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySelection);
    }
    disjoint(&[a, b, given])?;
    state_prob(dist, state)?;
    let pabg = marginal_prob(dist, &union(&[a, b, given]), state)?;
    let pag = marginal_prob(dist, &union(&[a, given]), state)?;
    let pbg = marginal_prob(dist, &union(&[b, given]), state)?;
    let pg = marginal_prob(dist, given, state)?;
    Ok((pabg * pg / (pag * pbg)).log2())
}

/// Local values of `I(a; b | given)` for every support entry, aligned with
/// [`JointDistribution::iter`]. Cheaper than repeated pointwise calls.
pub fn local_cmi_over_support(
    dist: &JointDistribution,
    a: &[usize],
    b: &[usize],
    given: &[usize],
) -> Result<Vec<f64>> {
    disjoint(&[a, b, given])?;
    dist.check_variables(&union(&[a, b, given]))?;
    let pabg = marginal_at_support(dist, &union(&[a, b, given]));
    let pag = marginal_at_support(dist, &union(&[a, given]));
    let pbg = marginal_at_support(dist, &union(&[b, given]));
    let pg = marginal_at_support(dist, given);
    Ok((0..pabg.len())
        .map(|i| (pabg[i] * pg[i] / (pag[i] * pbg[i])).log2())
        .collect())
}

/// Local entropies `h(x_variables)` for every support entry.
pub fn local_entropy_over_support(dist: &JointDistribution, variables: &[usize]) -> Result<Vec<f64>> {
    dist.check_variables(variables)?;
    Ok(marginal_at_support(dist, variables)
        .into_iter()
        .map(|p| -p.log2())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Alphabet;
    use proptest::prelude::*;

    fn dist(sizes: &[usize], p: &[f64]) -> JointDistribution {
        JointDistribution::from_dense(sizes, p).unwrap()
    }

    fn xor() -> JointDistribution {
        let a = Alphabet::new(vec![2, 2, 2]).unwrap();
        JointDistribution::new(a, (0..4).map(|i| (vec![i >> 1, i & 1, (i >> 1) ^ (i & 1)], 0.25)))
            .unwrap()
    }

    #[test]
    fn entropy_of_coin_and_dice() {
        assert!((entropy(&dist(&[2], &[0.5, 0.5]), &[0]).unwrap() - 1.0).abs() < 1e-12);
        let fair = dist(&[6], &[1.0 / 6.0; 6]);
        assert!((entropy(&fair, &[0]).unwrap() - 6f64.log2()).abs() < 1e-12);
        let loaded = dist(&[6], &[1.0 / 15.0, 2.0 / 3.0, 1.0 / 15.0, 1.0 / 15.0, 1.0 / 15.0, 1.0 / 15.0]);
        let h = entropy(&loaded, &[0]).unwrap();
        // -(2/3)log(2/3) - 5 (1/15) log(1/15)
        let oracle = -(2.0f64 / 3.0) * (2.0f64 / 3.0).log2() - (1.0 / 3.0) * (1.0f64 / 15.0).log2();
        assert!((h - oracle).abs() < 1e-12);
        assert!((h - 1.692).abs() < 1e-3);
    }

    #[test]
    fn local_entropy_values() {
        let certain = dist(&[2], &[1.0, 0.0]);
        assert_eq!(local_entropy(&certain, &[0], &[0]).unwrap(), 0.0);
        let coin = dist(&[2], &[0.5, 0.5]);
        assert_eq!(local_entropy(&coin, &[0], &[1]).unwrap(), 1.0);
        let die = dist(&[6], &[1.0 / 6.0; 6]);
        assert!((local_entropy(&die, &[0], &[4]).unwrap() - 6f64.log2()).abs() < 1e-12);
        assert!(matches!(local_entropy(&certain, &[0], &[1]), Err(Error::ZeroProbability)));
    }

    #[test]
    fn conditional_entropy_cases() {
        let indep = dist(&[2], &[0.3, 0.7]).product(&dist(&[2], &[0.5, 0.5])).unwrap();
        let h1 = entropy(&indep, &[0]).unwrap();
        assert!((conditional_entropy(&indep, &[0], &[1]).unwrap() - h1).abs() < 1e-12);
        let copy = dist(&[2, 2], &[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(conditional_entropy(&copy, &[0], &[1]).unwrap(), 0.0);
        assert_eq!(conditional_entropy(&copy, &[0], &[]).unwrap(), 1.0);
        assert!(matches!(
            conditional_entropy(&copy, &[0], &[0]),
            Err(Error::OverlappingSets(0))
        ));
    }

    #[test]
    fn kl_cases() {
        let fair = dist(&[6], &[1.0 / 6.0; 6]);
        let loaded = dist(&[6], &[1.0 / 15.0, 2.0 / 3.0, 1.0 / 15.0, 1.0 / 15.0, 1.0 / 15.0, 1.0 / 15.0]);
        assert_eq!(kl_divergence(&fair, &fair).unwrap(), 0.0);
        // direct sum over the six faces
        let oracle: f64 = [1.0 / 15.0, 2.0 / 3.0, 1.0 / 15.0, 1.0 / 15.0, 1.0 / 15.0, 1.0 / 15.0]
            .iter()
            .map(|&p: &f64| p * (p * 6.0).log2())
            .sum();
        let d = kl_divergence(&loaded, &fair).unwrap();
        assert!((d - oracle).abs() < 1e-12);
        assert!((d - 0.893).abs() < 1e-3);
        for s in 0..6 {
            let local = local_kl_divergence(&loaded, &fair, &[s]).unwrap();
            let hq = local_entropy(&fair, &[0], &[s]).unwrap();
            let hp = local_entropy(&loaded, &[0], &[s]).unwrap();
            assert!((local - (hq - hp)).abs() < 1e-12);
        }
        let point = dist(&[6], &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(kl_divergence(&fair, &point), Err(Error::SupportViolation(_))));
    }

    #[test]
    fn mutual_information_cases() {
        let indep = dist(&[2, 2], &[0.25; 4]);
        assert_eq!(mutual_information(&indep, &[0], &[1]).unwrap(), 0.0);
        let copy = dist(&[2, 2], &[0.5, 0.0, 0.0, 0.5]);
        assert!((mutual_information(&copy, &[0], &[1]).unwrap() - 1.0).abs() < 1e-12);
        assert!(mutual_information(&xor(), &[0], &[2]).unwrap().abs() < 1e-12);
        assert!(matches!(
            mutual_information(&copy, &[0], &[0]),
            Err(Error::OverlappingSets(0))
        ));
    }

    #[test]
    fn local_mi_cases() {
        let indep = dist(&[2, 2], &[0.25; 4]);
        assert_eq!(local_mutual_information(&indep, &[0], &[1], &[1, 0]).unwrap(), 0.0);
        let copy = dist(&[2, 2], &[0.5, 0.0, 0.0, 0.5]);
        assert!((local_mutual_information(&copy, &[0], &[1], &[1, 1]).unwrap() - 1.0).abs() < 1e-12);
        // anticorrelated-dominant: P(agree) = 0.1 split evenly
        let anti = dist(&[2, 2], &[0.05, 0.45, 0.45, 0.05]);
        let v = local_mutual_information(&anti, &[0], &[1], &[0, 0]).unwrap();
        assert!((v - (0.05f64 / 0.25).log2()).abs() < 1e-12);
        assert!(v < 0.0);
    }

    #[test]
    fn conditional_mi_cases() {
        // X1 and X2 both copy X3
        let a = Alphabet::new(vec![2, 2, 2]).unwrap();
        let driver = JointDistribution::new(a, vec![(vec![0, 0, 0], 0.5), (vec![1, 1, 1], 0.5)]).unwrap();
        assert!(conditional_mutual_information(&driver, &[0], &[1], &[2]).unwrap().abs() < 1e-12);
        // XOR over (X1, X2, X3=X1^X2): I(X1; X3 | X2) = 1
        assert!((conditional_mutual_information(&xor(), &[0], &[2], &[1]).unwrap() - 1.0).abs() < 1e-12);
        let indep = JointDistribution::uniform(&[2, 2, 2]).unwrap();
        assert_eq!(conditional_mutual_information(&indep, &[0], &[1], &[2]).unwrap(), 0.0);
    }

    fn random_dist(sizes: Vec<usize>, w: Vec<f64>) -> JointDistribution {
        let n: usize = sizes.iter().product();
        let w: Vec<f64> = w.into_iter().cycle().take(n).map(|x| x * x * x).collect();
        let t: f64 = w.iter().sum();
        JointDistribution::from_dense(&sizes, &w.iter().map(|x| x / t).collect::<Vec<_>>()).unwrap()
    }

    fn weights() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, 27).prop_filter("mass", |w| w.iter().map(|x| x * x * x).sum::<f64>() > 1e-3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn subadditivity_and_conditioning(w in weights()) {
            let d = random_dist(vec![3, 3], w);
            let h1 = entropy(&d, &[0]).unwrap();
            let h2 = entropy(&d, &[1]).unwrap();
            prop_assert!(entropy(&d, &[0, 1]).unwrap() <= h1 + h2 + 1e-12);
            prop_assert!(conditional_entropy(&d, &[0], &[1]).unwrap() <= h1 + 1e-12);
            prop_assert!(h1 <= 3f64.log2() + 1e-12);
        }

        #[test]
        fn mi_formulations_agree(w in weights()) {
            let d = random_dist(vec![3, 3], w);
            let h1 = entropy(&d, &[0]).unwrap();
            let h2 = entropy(&d, &[1]).unwrap();
            let f1 = h1 - conditional_entropy(&d, &[0], &[1]).unwrap();
            let f2 = h2 - conditional_entropy(&d, &[1], &[0]).unwrap();
            let f3 = h1 + h2 - entropy(&d, &[0, 1]).unwrap();
            let f4 = entropy(&d, &[0, 1]).unwrap()
                - conditional_entropy(&d, &[0], &[1]).unwrap()
                - conditional_entropy(&d, &[1], &[0]).unwrap();
            let prod = d.marginalize(&[0]).unwrap().product(&d.marginalize(&[1]).unwrap()).unwrap();
            let kl = kl_divergence(&d, &prod).unwrap();
            let mi = mutual_information(&d, &[0], &[1]).unwrap();
            for f in [f1, f2, f3, f4, kl] {
                prop_assert!((f - mi).abs() < 1e-9);
            }
            prop_assert!((mi - mutual_information(&d, &[1], &[0]).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn locals_average_to_expected(w in weights()) {
            let d = random_dist(vec![3, 3, 3], w);
            let h = entropy(&d, &[0, 2]).unwrap();
            let mi = mutual_information(&d, &[0], &[1]).unwrap();
            let cmi = conditional_mutual_information(&d, &[0], &[1], &[2]).unwrap();
            let mh = d.expected_value(|s| local_entropy(&d, &[0, 2], s).unwrap());
            let mmi = d.expected_value(|s| local_mutual_information(&d, &[0], &[1], s).unwrap());
            let mcmi = d.expected_value(|s| local_conditional_mutual_information(&d, &[0], &[1], &[2], s).unwrap());
            prop_assert!((h - mh).abs() < 1e-9);
            prop_assert!((mi - mmi).abs() < 1e-9);
            prop_assert!((cmi - mcmi).abs() < 1e-9);
            let fast: f64 = local_cmi_over_support(&d, &[0], &[1], &[2]).unwrap()
                .iter().zip(d.iter()).map(|(v, (_, p))| v * p).sum();
            prop_assert!((cmi - fast).abs() < 1e-9);
        }

        #[test]
        fn non_negativity(w in weights(), w2 in weights()) {
            let d = random_dist(vec![3, 3, 3], w);
            prop_assert!(mutual_information(&d, &[0], &[1, 2]).unwrap() >= 0.0);
            prop_assert!(conditional_mutual_information(&d, &[0], &[1], &[2]).unwrap() >= 0.0);
            let q = random_dist(vec![3, 3, 3], w2);
            if let Ok(kl) = kl_divergence(&d, &q) {
                prop_assert!(kl >= 0.0);
            }
        }
    }
}
