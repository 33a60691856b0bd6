//! Closed-form estimators for jointly Gaussian data, in nats.

use nalgebra::{Cholesky, DMatrix, DVector};
use std::f64::consts::{E, PI};

use crate::error::{Error, Result};
use crate::series::ContinuousSeries;
use crate::units::LocalSeries;

const SYMMETRY_TOLERANCE: f64 = 1e-10;
const SINGULAR_RATIO: f64 = 1e-12;

/// Mean vector and covariance matrix of a multivariate normal.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
}

impl GaussianModel {
    pub fn new(mean: Vec<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if covariance.nrows() != n || covariance.ncols() != n {
            return Err(Error::InvalidParameter(format!(
                "covariance is {}x{} for {n} variables",
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        if (&covariance - covariance.transpose()).amax() > SYMMETRY_TOLERANCE {
            return Err(Error::InvalidParameter("covariance is not symmetric".into()));
        }
        if n > 0 && covariance.clone().symmetric_eigenvalues().min() < -SYMMETRY_TOLERANCE {
            return Err(Error::InvalidParameter("covariance is not positive semidefinite".into()));
        }
        Ok(Self {
            mean: DVector::from_vec(mean),
            covariance,
        })
    }

    /// Sample mean and unbiased sample covariance of every column.
    pub fn fit(series: &ContinuousSeries) -> Result<Self> {
        let n = series.len();
        if n < 2 {
            return Err(Error::SeriesTooShort {
                needed: 2,
                available: n,
            });
        }
        let d = series.n_vars();
        let mean: Vec<f64> = series
            .columns()
            .iter()
            .map(|c| c.iter().sum::<f64>() / n as f64)
            .collect();
        let mut cov = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let (ci, cj) = (series.column(i), series.column(j));
                let s: f64 = ci
                    .iter()
                    .zip(cj)
                    .map(|(a, b)| (a - mean[i]) * (b - mean[j]))
                    .sum();
                cov[(i, j)] = s / (n - 1) as f64;
                cov[(j, i)] = cov[(i, j)];
            }
            if cov[(i, i)] <= 0.0 {
                return Err(Error::ZeroVariance(i));
            }
        }
        Ok(Self {
            mean: DVector::from_vec(mean),
            covariance: cov,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    fn check(&self, variables: &[usize]) -> Result<()> {
        for (i, &v) in variables.iter().enumerate() {
            if v >= self.n_vars() {
                return Err(Error::VariableOutOfRange {
                    index: v,
                    n_vars: self.n_vars(),
                });
            }
            if variables[..i].contains(&v) {
                return Err(Error::DuplicateVariable(v));
            }
        }
        Ok(())
    }

    fn block(&self, variables: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(variables.len(), variables.len(), |i, j| {
            self.covariance[(variables[i], variables[j])]
        })
    }

    fn cholesky(&self, variables: &[usize]) -> Result<Cholesky<f64, nalgebra::Dyn>> {
        let block = self.block(variables);
        let chol = block.clone().cholesky().ok_or(Error::SingularCovariance)?;
        // residual variance after regressing on earlier variables, relative
        let degenerate = chol
            .l_dirty()
            .diagonal()
            .iter()
            .zip(block.diagonal().iter())
            .any(|(&l, &v)| l * l <= SINGULAR_RATIO * v);
        if degenerate {
            return Err(Error::SingularCovariance);
        }
        Ok(chol)
    }

    fn log_det(&self, variables: &[usize]) -> Result<f64> {
        let chol = self.cholesky(variables)?;
        Ok(2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>())
    }

    /// Differential entropy `½ ln((2πe)^n |Σ|)` of the selected block.
    pub fn entropy(&self, variables: &[usize]) -> Result<f64> {
        self.check(variables)?;
        if variables.is_empty() {
            return Ok(0.0);
        }
        let n = variables.len() as f64;
        Ok(0.5 * (n * (2.0 * PI * E).ln() + self.log_det(variables)?))
    }

    /// `½ ln(|Σ_a| |Σ_b| / |Σ_ab|)`.
    pub fn mutual_information(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        let ab: Vec<usize> = a.iter().chain(b).copied().collect();
        self.check(&ab)?;
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySelection);
        }
        let v = 0.5 * (self.log_det(a)? + self.log_det(b)? - self.log_det(&ab)?);
        Ok(v.max(0.0))
    }

    /// `H(a,g) + H(b,g) - H(a,b,g) - H(g)`.
    pub fn conditional_mutual_information(&self, a: &[usize], b: &[usize], given: &[usize]) -> Result<f64> {
        if given.is_empty() {
            return self.mutual_information(a, b);
        }
        let ag: Vec<usize> = a.iter().chain(given).copied().collect();
        let bg: Vec<usize> = b.iter().chain(given).copied().collect();
        let abg: Vec<usize> = a.iter().chain(b).chain(given).copied().collect();
        self.check(&abg)?;
        let v = self.entropy(&ag)? + self.entropy(&bg)? - self.entropy(&abg)? - self.entropy(given)?;
        Ok(v.max(0.0))
    }

    /// Log density of the selected block at `x` (one value per variable).
    pub fn log_density(&self, variables: &[usize], x: &[f64]) -> Result<f64> {
        self.check(variables)?;
        let chol = self.cholesky(variables)?;
        let dev = DVector::from_fn(variables.len(), |i, _| x[i] - self.mean[variables[i]]);
        let quad = dev.dot(&chol.solve(&dev));
        let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Ok(-0.5 * (variables.len() as f64 * (2.0 * PI).ln() + log_det + quad))
    }

    /// Local mutual information `ln p(a,b) / (p(a) p(b))` at each row of
    /// `series`, whose columns are indexed like the model's variables.
    pub fn local_mutual_information(
        &self,
        series: &ContinuousSeries,
        a: &[usize],
        b: &[usize],
    ) -> Result<LocalSeries> {
        let ab: Vec<usize> = a.iter().chain(b).copied().collect();
        self.check(&ab)?;
        if series.n_vars() != self.n_vars() {
            return Err(Error::InvalidParameter(format!(
                "series has {} variables, model {}",
                series.n_vars(),
                self.n_vars()
            )));
        }
        let pick = |vars: &[usize], t: usize| -> Vec<f64> { vars.iter().map(|&v| series.column(v)[t]).collect() };
        let values = (0..series.len())
            .map(|t| {
                Ok(self.log_density(&ab, &pick(&ab, t))?
                    - self.log_density(a, &pick(a, t))?
                    - self.log_density(b, &pick(b, t))?)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(LocalSeries::new(values))
    }
}

/// Entropy of the fitted model over `variables`.
pub fn gaussian_entropy(series: &ContinuousSeries, variables: &[usize]) -> Result<f64> {
    GaussianModel::fit(&series.select(variables)?)?.entropy(&(0..variables.len()).collect::<Vec<_>>())
}

/// Mutual information of the fitted model.
pub fn gaussian_mi(series: &ContinuousSeries, a: &[usize], b: &[usize]) -> Result<f64> {
    GaussianModel::fit(series)?.mutual_information(a, b)
}

/// Conditional mutual information of the fitted model.
pub fn gaussian_conditional_mi(series: &ContinuousSeries, a: &[usize], b: &[usize], given: &[usize]) -> Result<f64> {
    GaussianModel::fit(series)?.conditional_mutual_information(a, b, given)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn model(cov: &[f64], n: usize) -> GaussianModel {
        GaussianModel::new(vec![0.0; n], DMatrix::from_row_slice(n, n, cov)).unwrap()
    }

    fn correlated(n: usize, rho: f64, seed: u64) -> ContinuousSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for _ in 0..n {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            x.push(a);
            y.push(rho * a + (1.0 - rho * rho).sqrt() * b);
        }
        ContinuousSeries::from_columns(vec![x, y]).unwrap()
    }

    #[test]
    fn closed_forms() {
        let m = model(&[1.0], 1);
        assert!((m.entropy(&[0]).unwrap() - 0.5 * (2.0 * PI * E).ln()).abs() < 1e-12);
        let scaled = model(&[9.0], 1);
        assert!((scaled.entropy(&[0]).unwrap() - m.entropy(&[0]).unwrap() - 3f64.ln()).abs() < 1e-12);
        let diag = model(&[1.0, 0.0, 0.0, 4.0], 2);
        let sum = diag.entropy(&[0]).unwrap() + diag.entropy(&[1]).unwrap();
        assert!((diag.entropy(&[0, 1]).unwrap() - sum).abs() < 1e-12);
        assert!(diag.mutual_information(&[0], &[1]).unwrap().abs() < 1e-12);
        let r = model(&[1.0, 0.9, 0.9, 1.0], 2);
        assert!((r.mutual_information(&[0], &[1]).unwrap() + 0.5 * 0.19f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn conditional_forms() {
        // z independent of a correlated pair
        let m = model(&[1.0, 0.6, 0.0, 0.6, 1.0, 0.0, 0.0, 0.0, 1.0], 3);
        let mi = m.mutual_information(&[0], &[1]).unwrap();
        assert!((m.conditional_mutual_information(&[0], &[1], &[2]).unwrap() - mi).abs() < 1e-12);
        // chain x <- g -> y with x = a g + e, y = b g + f: Σ_xy = a b
        let (a, b) = (0.8, -0.5);
        let cov = [
            a * a + 1.0,
            a * b,
            a,
            a * b,
            b * b + 1.0,
            b,
            a,
            b,
            1.0,
        ];
        let chain = model(&cov, 3);
        assert!(chain.mutual_information(&[0], &[1]).unwrap() > 0.01);
        assert!(chain.conditional_mutual_information(&[0], &[1], &[2]).unwrap().abs() < 1e-12);
        let id = model(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], 3);
        assert!(id.conditional_mutual_information(&[0], &[1], &[2]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        let s = ContinuousSeries::from_columns(vec![vec![1.0, 2.0, 3.0], vec![5.0; 3]]).unwrap();
        assert!(matches!(GaussianModel::fit(&s), Err(Error::ZeroVariance(1))));
        let collinear =
            ContinuousSeries::from_columns(vec![vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 4.0, 6.0, 8.0]]).unwrap();
        assert!(matches!(gaussian_mi(&collinear, &[0], &[1]), Err(Error::SingularCovariance)));
    }

    #[test]
    fn fitted_estimate_and_locals() {
        let s = correlated(20_000, 0.6, 3);
        let m = GaussianModel::fit(&s).unwrap();
        let mi = m.mutual_information(&[0], &[1]).unwrap();
        assert!((mi + 0.5 * (1.0f64 - 0.36).ln()).abs() < 0.02);
        let local = m.local_mutual_information(&s, &[0], &[1]).unwrap();
        assert!((local.mean() - mi).abs() < 0.02);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn affine_invariance(seed in 0u64..500, a in 0.1f64..10.0, b in -10f64..-0.1, s in -5f64..5.0, t in -5f64..5.0) {
            let base = correlated(300, 0.4, seed);
            let moved = ContinuousSeries::from_columns(vec![
                base.column(0).iter().map(|x| a * x + s).collect(),
                base.column(1).iter().map(|y| b * y + t).collect(),
            ]).unwrap();
            let i0 = gaussian_mi(&base, &[0], &[1]).unwrap();
            let i1 = gaussian_mi(&moved, &[0], &[1]).unwrap();
            prop_assert!((i0 - i1).abs() < 1e-12, "{} vs {}", i0, i1);
        }
    }
}
