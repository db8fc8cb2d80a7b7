//! Population constants of the Gaussian model `x ~ N_p(0, Σ)`, `ε ~ N(0, σ²)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::cholesky_lower;

/// True parameters of a Gaussian scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelTruth {
    pub beta0: Vec<f64>,
    /// Error variance `σ²`.
    pub sigma_sq: f64,
    /// Covariate covariance `Σ`.
    pub sigma: DMatrix<f64>,
}

impl ModelTruth {
    /// Validates dimensions and positive definiteness of `Σ`.
    ///
    /// `σ² = 0` is accepted (noiseless model) as long as `β₀'Σβ₀ + σ² > 0`.
    pub fn new(beta0: Vec<f64>, sigma_sq: f64, sigma: DMatrix<f64>) -> Result<Self> {
        if sigma.nrows() != beta0.len() {
            return Err(Error::InvalidInput(format!(
                "beta0 has {} entries but Sigma is {}x{}",
                beta0.len(),
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        if sigma_sq.is_nan() || sigma_sq < 0.0 || sigma_sq.is_infinite() {
            return Err(Error::InvalidInput("error variance must be >= 0".into()));
        }
        cholesky_lower(&sigma)?;
        let truth = Self {
            beta0,
            sigma_sq,
            sigma,
        };
        if (truth.index_variance() + sigma_sq).partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidInput(
                "beta0'Sigma beta0 + sigma^2 must be positive".into(),
            ));
        }
        Ok(truth)
    }

    /// The scenario used throughout the simulations: `Σ = diag(1, 2)`,
    /// `β₀ = (2, 1)`, `σ² = 1`.
    pub fn gaussian_scenario() -> Self {
        Self::new(
            vec![2.0, 1.0],
            1.0,
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]),
        )
        .expect("fixed scenario is valid")
    }

    pub fn p(&self) -> usize {
        self.beta0.len()
    }

    /// `σ²_{β₀} = β₀'Σβ₀`.
    pub fn index_variance(&self) -> f64 {
        let b = DVector::from_column_slice(&self.beta0);
        (b.transpose() * &self.sigma * &b)[(0, 0)]
    }

    /// `Σβ₀`.
    pub fn sigma_beta(&self) -> DVector<f64> {
        &self.sigma * DVector::from_column_slice(&self.beta0)
    }

    /// `σ*β₀`, the limit of the GQR slopes.
    pub fn scaled_beta(&self) -> Vec<f64> {
        let s = sigma_star(self);
        self.beta0.iter().map(|b| s * b).collect()
    }
}

/// `σ* = (β₀'Σβ₀ + σ²)^{-1/2}`.
pub fn sigma_star(truth: &ModelTruth) -> f64 {
    (truth.index_variance() + truth.sigma_sq).powf(-0.5)
}

/// Dispersion matrix `A` with entries
/// `(σ²_{β₀}+σ²)⁻¹ (E[X_i X_j (x'β₀)²] + σ²Σ_ij − (Σβ₀)_i(Σβ₀)_j)`,
/// the fourth moment evaluated by Isserlis' identity
/// `E[X_i X_j (x'β₀)²] = Σ_ij σ²_{β₀} + 2(Σβ₀)_i(Σβ₀)_j`.
pub fn dispersion_matrix_a(truth: &ModelTruth) -> DMatrix<f64> {
    let sb2 = truth.index_variance();
    let total = sb2 + truth.sigma_sq;
    let v = truth.sigma_beta();
    let p = truth.p();
    DMatrix::from_fn(p, p, |i, j| {
        let fourth = truth.sigma[(i, j)] * sb2 + 2.0 * v[i] * v[j];
        (fourth + truth.sigma_sq * truth.sigma[(i, j)] - v[i] * v[j]) / total
    })
}

/// Dispersion of `n^{-1/2} Σ x_i Φ⁻¹(H_n*(Y_i))` once the randomness of the
/// ranks themselves is accounted for.
///
/// Replacing `H` by the empirical `H_n*` adds a projection (Hájek) term
/// that is negatively correlated with `x_i σ*(x_i'β₀ + ε_i)`; for Gaussian
/// designs the net effect is `A − (3/2)σ*²(Σβ₀)(Σβ₀)'`. This is the matrix
/// that Monte Carlo covariances of the GQR slopes actually approach.
pub fn rank_dispersion_matrix(truth: &ModelTruth) -> DMatrix<f64> {
    let s2 = sigma_star(truth).powi(2);
    let v = truth.sigma_beta();
    let a = dispersion_matrix_a(truth);
    let p = truth.p();
    DMatrix::from_fn(p, p, |i, j| a[(i, j)] - 1.5 * s2 * v[i] * v[j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cholesky_lower;
    use rand::{Rng, SeedableRng};
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn scenario_sigma_star() {
        let t = ModelTruth::gaussian_scenario();
        assert!((sigma_star(&t) - 7f64.powf(-0.5)).abs() < 1e-15);
        assert!((sigma_star(&t) - 0.377964).abs() < 1e-6);
        let sb = t.scaled_beta();
        assert!((sb[0] - 0.7559289460184544).abs() < 1e-12);
        assert!((sb[1] - 0.3779644730092272).abs() < 1e-12);
    }

    #[test]
    fn zero_beta_collapses_to_sigma() {
        let sigma = DMatrix::from_row_slice(2, 2, &[1.5, 0.3, 0.3, 0.8]);
        let t = ModelTruth::new(vec![0.0, 0.0], 1.0, sigma.clone()).unwrap();
        assert_eq!(sigma_star(&t), 1.0);
        assert!((dispersion_matrix_a(&t) - sigma).norm() < 1e-15);
    }

    #[test]
    fn noiseless_homogeneity() {
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let t1 = ModelTruth::new(vec![2.0, 1.0], 0.0, sigma.clone()).unwrap();
        let t2 = ModelTruth::new(vec![4.0, 2.0], 0.0, sigma).unwrap();
        assert!((sigma_star(&t2) - sigma_star(&t1) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_truth() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert_eq!(
            ModelTruth::new(vec![1.0, 1.0], 1.0, bad),
            Err(Error::NotPositiveDefinite)
        );
        let id = DMatrix::<f64>::identity(2, 2);
        assert!(ModelTruth::new(vec![0.0, 0.0], 0.0, id.clone()).is_err());
        assert!(ModelTruth::new(vec![1.0], 1.0, id).is_err());
    }

    #[test]
    fn dispersion_is_symmetric_for_random_covariances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let m = DMatrix::from_fn(3, 3, |_, _| rng.random::<f64>() - 0.5);
            let sigma = &m * m.transpose() + DMatrix::identity(3, 3) * 0.1;
            let beta: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            let t = ModelTruth::new(beta, rng.random::<f64>() + 0.1, sigma).unwrap();
            let a = dispersion_matrix_a(&t);
            assert!((&a - a.transpose()).norm() < 1e-12);
            assert!(cholesky_lower(&a).is_ok());
        }
    }

    #[test]
    fn scenario_closed_form() {
        // Σβ₀ = (2, 2), σ*² = 1/7: A = Σ + (1/7)(Σβ₀)(Σβ₀)'
        let t = ModelTruth::gaussian_scenario();
        let a = dispersion_matrix_a(&t);
        let expect = [1.0 + 4.0 / 7.0, 4.0 / 7.0, 4.0 / 7.0, 2.0 + 4.0 / 7.0];
        for (k, e) in expect.iter().enumerate() {
            assert!((a[(k / 2, k % 2)] - e).abs() < 1e-14);
        }
        let sinv = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]);
        let target = &sinv * a * &sinv;
        assert!((target[(0, 0)] - 11.0 / 7.0).abs() < 1e-14);
        assert!((target[(0, 1)] - 2.0 / 7.0).abs() < 1e-14);
        assert!((target[(1, 1)] - 4.5 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn dispersion_matches_monte_carlo_covariance() {
        let t = ModelTruth::gaussian_scenario();
        let s = sigma_star(&t);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let draws = 1_000_000;
        let mut sum = [0.0f64; 2];
        let mut sxx = [0.0f64; 3];
        for _ in 0..draws {
            let x0: f64 = StandardNormal.sample(&mut rng);
            let x1: f64 = 2f64.sqrt() * Distribution::<f64>::sample(&StandardNormal, &mut rng);
            let e: f64 = StandardNormal.sample(&mut rng);
            let u = s * (2.0 * x0 + x1 + e);
            let v = [x0 * u, x1 * u];
            sum[0] += v[0];
            sum[1] += v[1];
            sxx[0] += v[0] * v[0];
            sxx[1] += v[0] * v[1];
            sxx[2] += v[1] * v[1];
        }
        let n = draws as f64;
        let m = [sum[0] / n, sum[1] / n];
        let cov = [
            sxx[0] / n - m[0] * m[0],
            sxx[1] / n - m[0] * m[1],
            sxx[2] / n - m[1] * m[1],
        ];
        let a = dispersion_matrix_a(&t);
        for (c, e) in cov.iter().zip([a[(0, 0)], a[(0, 1)], a[(1, 1)]]) {
            assert!((c / e - 1.0).abs() < 0.02, "{c} vs {e}");
        }
    }

    #[test]
    fn rank_dispersion_is_smaller_and_positive_definite() {
        let t = ModelTruth::gaussian_scenario();
        let r = rank_dispersion_matrix(&t);
        let a = dispersion_matrix_a(&t);
        assert!(r[(0, 0)] < a[(0, 0)] && r[(1, 1)] < a[(1, 1)]);
        assert!(cholesky_lower(&r).is_ok());
    }
}
