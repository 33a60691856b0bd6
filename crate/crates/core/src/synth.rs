//! Seeded generators with known answers: logic gates, synchronized
//! systems, linear Gaussian processes, common-driver systems and dice.
//!
//! Each generator returns the series together with a [`GroundTruth`]: the
//! true directed graph, the exact joint distribution where one exists, and
//! analytic measure values computed from closed forms (bits unless the key
//! ends in `_nats`).

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand::distr::weighted::WeightedIndex;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::distribution::JointDistribution;
use crate::error::{Error, Result};
use crate::series::{Alphabet, ContinuousSeries, Dataset, DiscreteSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    And,
    Or,
    Xor,
}

impl Gate {
    pub fn apply(self, a: usize, b: usize) -> usize {
        match self {
            Gate::And => a & b,
            Gate::Or => a | b,
            Gate::Xor => a ^ b,
        }
    }
}

impl std::str::FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "and" => Ok(Gate::And),
            "or" => Ok(Gate::Or),
            "xor" => Ok(Gate::Xor),
            other => Err(Error::InvalidParameter(format!("unknown gate {other:?}"))),
        }
    }
}

/// Static systems emit i.i.d. rows; dynamic ones delay the output one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Static,
    Dynamic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GeneratorSpec {
    /// Columns `x1, x2, y` with fair independent inputs.
    Gate { gate: Gate, mode: Mode },
    /// `n` variables cycling together through `states` states.
    Sync { n: usize, states: usize },
    /// `x_t = A x_{t-1} + σ ε_t` with independent standard normal `ε`.
    VarGaussian { coupling: Vec<Vec<f64>>, noise: f64 },
    /// Two i.i.d. standard normals with correlation `rho`.
    CorrelatedPair { rho: f64 },
    /// A fair driver bit `w` copied into each child with flip probability
    /// `flip`; in dynamic mode child `i` copies `w` at lag `i + 1`.
    CommonDriver { children: usize, flip: f64, mode: Mode },
    /// One die with the given face weights.
    Dice { weights: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundTruth {
    /// Directed `(source, target)` dependencies.
    pub edges: Vec<(usize, usize)>,
    /// Exact joint distribution of one row, for static systems.
    pub distribution: Option<JointDistribution>,
    pub values: BTreeMap<String, f64>,
}

impl GroundTruth {
    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    /// Parents of `target` in the true graph, ascending.
    pub fn parents(&self, target: usize) -> Vec<usize> {
        let mut p: Vec<usize> = self.edges.iter().filter(|e| e.1 == target).map(|e| e.0).collect();
        p.sort_unstable();
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthetic {
    pub series: Dataset,
    pub truth: GroundTruth,
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

fn binary_entropy(p: f64) -> f64 {
    plogp(p) + plogp(1.0 - p)
}

fn truth_values(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn generate(spec: &GeneratorSpec, length: usize, seed: u64) -> Result<Synthetic> {
    if length == 0 {
        return Err(Error::InvalidParameter("length must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match spec {
        GeneratorSpec::Gate { gate, mode } => gate_system(*gate, *mode, length, &mut rng),
        GeneratorSpec::Sync { n, states } => sync_system(*n, *states, length),
        GeneratorSpec::VarGaussian { coupling, noise } => var_gaussian(coupling, *noise, length, &mut rng),
        GeneratorSpec::CorrelatedPair { rho } => correlated_pair(*rho, length, &mut rng),
        GeneratorSpec::CommonDriver { children, flip, mode } => {
            common_driver(*children, *flip, *mode, length, &mut rng)
        }
        GeneratorSpec::Dice { weights } => dice(weights, length, &mut rng),
    }
}

/// Exact joint table of `(x1, x2, gate(x1, x2))` with fair inputs.
pub fn gate_distribution(gate: Gate) -> JointDistribution {
    let rows = (0..4).map(|i| {
        let (a, b) = (i >> 1, i & 1);
        (vec![a, b, gate.apply(a, b)], 0.25)
    });
    JointDistribution::new(Alphabet::new(vec![2, 2, 2]).expect("binary"), rows).expect("valid table")
}

fn gate_system(gate: Gate, mode: Mode, n: usize, rng: &mut ChaCha8Rng) -> Result<Synthetic> {
    let a: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
    let b: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
    let y: Vec<usize> = match mode {
        Mode::Static => a.iter().zip(&b).map(|(&p, &q)| gate.apply(p, q)).collect(),
        Mode::Dynamic => std::iter::once(rng.random_range(0..2))
            .chain((1..n).map(|t| gate.apply(a[t - 1], b[t - 1])))
            .collect(),
    };
    // output is 1 with probability q
    let q = match gate {
        Gate::And => 0.25,
        Gate::Or => 0.75,
        Gate::Xor => 0.5,
    };
    let h_y = binary_entropy(q);
    // H(Y | X1): XOR leaves Y fair for both x1; AND and OR fix Y for one x1
    let h_y_x1 = match gate {
        Gate::Xor => 1.0,
        Gate::And | Gate::Or => 0.5,
    };
    let single = h_y - h_y_x1;
    let names = match mode {
        Mode::Static => ["x1", "x2", "y"],
        Mode::Dynamic => ["x", "y", "z"],
    };
    let series = DiscreteSeries::with_alphabet(vec![a, b, y], Alphabet::new(vec![2, 2, 2])?)?
        .with_names(names.iter().map(|s| s.to_string()).collect())?;
    // H(joint) = 2, so TC = 2 + H(Y) - 2 and DTC = 2 - Σ H(X_i | rest)
    let tc = h_y;
    let dtc = 2.0 - residual_sum(gate);
    let mut values = truth_values(&[
        ("mi_x1_y", single),
        ("mi_x2_y", single),
        ("mi_x1x2_y", h_y),
        ("cmi_x1_y_given_x2", h_y_x1),
        ("entropy_y", h_y),
        ("total_correlation", tc),
        ("dual_total_correlation", dtc),
        ("o_information", tc - dtc),
    ]);
    let distribution = match mode {
        Mode::Static => Some(gate_distribution(gate)),
        Mode::Dynamic => {
            values.insert("te_x_z".into(), single);
            values.insert("te_y_z".into(), single);
            values.insert("joint_te_xy_z".into(), h_y);
            None
        }
    };
    Ok(Synthetic {
        series: Dataset::Discrete(series),
        truth: GroundTruth {
            edges: vec![(0, 2), (1, 2)],
            distribution,
            values,
        },
    })
}

/// `Σ_i H(X_i | X_rest)` for a gate triple. The output is a function of
/// the inputs. XOR makes each input a function of the other two; AND and OR
/// leave an input a fair bit in the half of the states where the other
/// input fixes the output.
fn residual_sum(gate: Gate) -> f64 {
    match gate {
        Gate::Xor => 0.0,
        Gate::And | Gate::Or => 0.5 + 0.5,
    }
}

/// Exact distribution of `n` variables locked to the same one of `states`.
pub fn sync_distribution(n: usize, states: usize) -> Result<JointDistribution> {
    JointDistribution::new(
        Alphabet::new(vec![states; n])?,
        (0..states).map(|s| (vec![s; n], 1.0 / states as f64)),
    )
}

fn sync_system(n: usize, states: usize, length: usize) -> Result<Synthetic> {
    if n < 2 || states < 2 {
        return Err(Error::InvalidParameter("sync needs at least 2 variables and 2 states".into()));
    }
    let col: Vec<usize> = (0..length).map(|t| t % states).collect();
    let series = DiscreteSeries::with_alphabet(vec![col; n], Alphabet::new(vec![states; n])?)?
        .with_names((0..n).map(|i| format!("x{i}")).collect())?;
    let h = (states as f64).log2();
    let nf = n as f64;
    Ok(Synthetic {
        series: Dataset::Discrete(series),
        truth: GroundTruth {
            edges: Vec::new(),
            distribution: Some(sync_distribution(n, states)?),
            values: truth_values(&[
                ("entropy", h),
                ("total_correlation", (nf - 1.0) * h),
                ("dual_total_correlation", h),
                ("description_complexity", h / nf),
            ]),
        },
    })
}

fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    a.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

const VAR_BURN_IN: usize = 1000;

fn var_gaussian(coupling: &[Vec<f64>], noise: f64, length: usize, rng: &mut ChaCha8Rng) -> Result<Synthetic> {
    let n = coupling.len();
    if n == 0 || coupling.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter("coupling matrix must be square and non-empty".into()));
    }
    if !(noise > 0.0) {
        return Err(Error::InvalidParameter("noise must be positive".into()));
    }
    let a = DMatrix::from_fn(n, n, |i, j| coupling[i][j]);
    let radius = spectral_radius(&a);
    if radius >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "coupling matrix has spectral radius {radius:.4} >= 1; the process is not stationary"
        )));
    }
    let mut x = vec![0.0; n];
    let mut cols = vec![Vec::with_capacity(length); n];
    for t in 0..VAR_BURN_IN + length {
        let next: Vec<f64> = (0..n)
            .map(|i| {
                let drive: f64 = (0..n).map(|j| coupling[i][j] * x[j]).sum();
                drive + noise * Distribution::<f64>::sample(&StandardNormal, rng)
            })
            .collect();
        x = next;
        if t >= VAR_BURN_IN {
            for (c, &v) in cols.iter_mut().zip(&x) {
                c.push(v);
            }
        }
    }
    let edges = (0..n)
        .flat_map(|i| (0..n).map(move |j| (j, i)))
        .filter(|&(j, i)| i != j && coupling[i][j] != 0.0)
        .collect();
    let series = ContinuousSeries::from_columns(cols)?.with_names((0..n).map(|i| format!("x{i}")).collect())?;
    Ok(Synthetic {
        series: Dataset::Continuous(series),
        truth: GroundTruth {
            edges,
            distribution: None,
            values: truth_values(&[("spectral_radius", radius)]),
        },
    })
}

fn correlated_pair(rho: f64, length: usize, rng: &mut ChaCha8Rng) -> Result<Synthetic> {
    if !(rho.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("correlation must lie in (-1, 1), got {rho}")));
    }
    let mut x = Vec::with_capacity(length);
    let mut y = Vec::with_capacity(length);
    for _ in 0..length {
        let a: f64 = StandardNormal.sample(rng);
        let b: f64 = StandardNormal.sample(rng);
        x.push(a);
        y.push(rho * a + (1.0 - rho * rho).sqrt() * b);
    }
    let series = ContinuousSeries::from_columns(vec![x, y])?.with_names(vec!["x".into(), "y".into()])?;
    Ok(Synthetic {
        series: Dataset::Continuous(series),
        truth: GroundTruth {
            edges: Vec::new(),
            distribution: None,
            values: truth_values(&[("mutual_information_nats", -0.5 * (1.0 - rho * rho).ln())]),
        },
    })
}

fn common_driver(children: usize, flip: f64, mode: Mode, length: usize, rng: &mut ChaCha8Rng) -> Result<Synthetic> {
    if children == 0 {
        return Err(Error::InvalidParameter("need at least one child".into()));
    }
    if !(0.0..=0.5).contains(&flip) {
        return Err(Error::InvalidParameter(format!("flip probability must be in [0, 0.5], got {flip}")));
    }
    let w: Vec<usize> = (0..length).map(|_| rng.random_range(0..2)).collect();
    let mut cols = vec![w.clone()];
    for i in 0..children {
        let lag = match mode {
            Mode::Static => 0,
            Mode::Dynamic => i + 1,
        };
        let child = (0..length)
            .map(|t| {
                let base = if t >= lag { w[t - lag] } else { rng.random_range(0..2) };
                base ^ usize::from(rng.random::<f64>() < flip)
            })
            .collect();
        cols.push(child);
    }
    let n = children + 1;
    let mut names = vec!["w".to_string()];
    names.extend((1..=children).map(|i| format!("c{i}")));
    let series = DiscreteSeries::with_alphabet(cols, Alphabet::new(vec![2; n])?)?.with_names(names)?;
    let h = binary_entropy(flip);
    // two noisy copies of a fair bit: H(c1, c2) = 1 + H(flip ⊕ flip')
    let pair_noise = binary_entropy(2.0 * flip * (1.0 - flip));
    let distribution = match mode {
        Mode::Static => {
            let rows = (0..1usize << n).filter_map(|code| {
                let state: Vec<usize> = (0..n).map(|v| code >> (n - 1 - v) & 1).collect();
                let p = (1..n).fold(0.5, |acc, c| acc * if state[c] == state[0] { 1.0 - flip } else { flip });
                (p > 0.0).then_some((state, p))
            });
            Some(JointDistribution::new(Alphabet::new(vec![2; n])?, rows)?)
        }
        Mode::Dynamic => None,
    };
    Ok(Synthetic {
        series: Dataset::Discrete(series),
        truth: GroundTruth {
            edges: (1..n).map(|c| (0, c)).collect(),
            distribution,
            values: truth_values(&[
                ("mi_driver_child", 1.0 - h),
                ("mi_children", 1.0 - pair_noise),
                ("cmi_children_given_driver", 0.0),
            ]),
        },
    })
}

fn dice(weights: &[f64], length: usize, rng: &mut ChaCha8Rng) -> Result<Synthetic> {
    if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidParameter("face weights must be finite and non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidParameter("face weights sum to zero".into()));
    }
    let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let sampler = WeightedIndex::new(&p).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let col: Vec<usize> = (0..length).map(|_| sampler.sample(rng)).collect();
    let series = DiscreteSeries::with_alphabet(vec![col], Alphabet::new(vec![p.len()])?)?
        .with_names(vec!["face".into()])?;
    let distribution = JointDistribution::from_dense(&[p.len()], &p)?;
    Ok(Synthetic {
        series: Dataset::Discrete(series),
        truth: GroundTruth {
            edges: Vec::new(),
            distribution: Some(distribution),
            values: truth_values(&[("entropy", p.iter().map(|&q| plogp(q)).sum())]),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::plugin_mi;
    use crate::units::Unit;

    fn total_variation(series: &DiscreteSeries, exact: &JointDistribution) -> f64 {
        let vars: Vec<usize> = (0..series.n_vars()).collect();
        let emp = JointDistribution::from_series(series, &vars, &vec![0; vars.len()]).unwrap();
        let mut states: Vec<Vec<usize>> = emp.iter().map(|e| e.0).chain(exact.iter().map(|e| e.0)).collect();
        states.sort();
        states.dedup();
        0.5 * states.iter().map(|s| (emp.prob(s) - exact.prob(s)).abs()).sum::<f64>()
    }

    #[test]
    fn gate_tables_converge() {
        for gate in [Gate::And, Gate::Or, Gate::Xor] {
            let g = generate(&GeneratorSpec::Gate { gate, mode: Mode::Static }, 100_000, 1).unwrap();
            let exact = g.truth.distribution.as_ref().unwrap();
            let tv = total_variation(g.series.discrete().unwrap(), exact);
            assert!(tv < 0.02, "{gate:?} {tv}");
            for a in 0..2 {
                for b in 0..2 {
                    assert_eq!(exact.prob(&[a, b, gate.apply(a, b)]), 0.25);
                }
            }
        }
    }

    #[test]
    fn gate_truth_values() {
        let xor = generate(&GeneratorSpec::Gate { gate: Gate::Xor, mode: Mode::Static }, 10, 0).unwrap();
        assert_eq!(xor.truth.value("mi_x1_y"), Some(0.0));
        assert_eq!(xor.truth.value("cmi_x1_y_given_x2"), Some(1.0));
        assert_eq!(xor.truth.value("o_information"), Some(-1.0));
        let and = generate(&GeneratorSpec::Gate { gate: Gate::And, mode: Mode::Static }, 10, 0).unwrap();
        // I(X1;Y) for AND = h(1/4) - 1/2
        assert!((and.truth.value("mi_x1_y").unwrap() - 0.311278).abs() < 1e-6);
        assert!((and.truth.value("dual_total_correlation").unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sync_metadata() {
        let s = generate(&GeneratorSpec::Sync { n: 10, states: 8 }, 80, 0).unwrap();
        assert_eq!(s.truth.value("total_correlation"), Some(27.0));
        assert_eq!(s.truth.value("dual_total_correlation"), Some(3.0));
        let d = s.series.discrete().unwrap();
        assert!((0..10).all(|v| d.column(v) == d.column(0)));
    }

    #[test]
    fn dynamic_gate_delays_output() {
        let g = generate(&GeneratorSpec::Gate { gate: Gate::Xor, mode: Mode::Dynamic }, 50, 3).unwrap();
        let d = g.series.discrete().unwrap();
        for t in 1..50 {
            assert_eq!(d.get(t, 2), d.get(t - 1, 0) ^ d.get(t - 1, 1));
        }
        assert_eq!(g.truth.parents(2), vec![0, 1]);
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let spec = GeneratorSpec::VarGaussian {
            coupling: vec![vec![0.5, 0.0], vec![0.4, 0.3]],
            noise: 1.0,
        };
        let a = generate(&spec, 500, 42).unwrap();
        let b = generate(&spec, 500, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.truth.edges, vec![(0, 1)]);
    }

    #[test]
    fn unstable_coupling_is_rejected() {
        let spec = GeneratorSpec::VarGaussian {
            coupling: vec![vec![0.9, 0.5], vec![0.5, 0.9]],
            noise: 1.0,
        };
        assert!(generate(&spec, 100, 0).is_err());
    }

    #[test]
    fn var_variance_is_stationary() {
        let spec = GeneratorSpec::VarGaussian {
            coupling: vec![vec![0.8]],
            noise: 1.0,
        };
        let g = generate(&spec, 40_000, 5).unwrap();
        let c = g.series.continuous().unwrap().column(0);
        let var = |s: &[f64]| {
            let m = s.iter().sum::<f64>() / s.len() as f64;
            s.iter().map(|x| (x - m).powi(2)).sum::<f64>() / s.len() as f64
        };
        let theory = 1.0 / (1.0 - 0.64);
        assert!((var(&c[..20_000]) - theory).abs() < 0.15 * theory);
        assert!((var(&c[20_000..]) - theory).abs() < 0.15 * theory);
    }

    #[test]
    fn correlated_pair_metadata() {
        let g = generate(&GeneratorSpec::CorrelatedPair { rho: 0.6 }, 10, 0).unwrap();
        assert!((g.truth.value("mutual_information_nats").unwrap() + 0.5 * 0.64f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn common_driver_children_share_information() {
        let spec = GeneratorSpec::CommonDriver {
            children: 2,
            flip: 0.1,
            mode: Mode::Static,
        };
        let g = generate(&spec, 100_000, 8).unwrap();
        let d = g.series.discrete().unwrap();
        let tv = total_variation(d, g.truth.distribution.as_ref().unwrap());
        assert!(tv < 0.02, "{tv}");
        let mi = plugin_mi(d, &[1], &[2], Unit::Bits).unwrap();
        assert!((mi - g.truth.value("mi_children").unwrap()).abs() < 0.01);
    }

    #[test]
    fn dice_entropy() {
        let g = generate(&GeneratorSpec::Dice { weights: vec![1.0; 6] }, 10, 0).unwrap();
        assert!((g.truth.value("entropy").unwrap() - 6f64.log2()).abs() < 1e-12);
        assert!(generate(&GeneratorSpec::Dice { weights: vec![0.0, 0.0] }, 10, 0).is_err());
    }
}
