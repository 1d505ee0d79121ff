//! Gaussian test beds: sampling, the Bayes likelihood-ratio oracle and error
//! estimation.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`. Each
//! draw uses its own stream of that seed (training class one and two on
//! streams 0 and 1, test draws on 2 and 3) so that train and test sets never
//! overlap and every run is reproducible on any platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::geometry::{dot, sub, Label, Matrix};
use crate::linalg::Cholesky;
use crate::scalar::Scalar;

pub const TRAIN_STREAMS: (u64, u64) = (0, 1);
pub const TEST_STREAMS: (u64, u64) = (2, 3);
/// Relative Frobenius distance under which two covariances count as equal.
pub const COMMON_COVARIANCE_TOL: f64 = 1e-12;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSpec<T> {
    mean: Vec<T>,
    covariance: Matrix<T>,
    prior: T,
    chol: Cholesky<T>,
}

impl<T: Scalar> GaussianSpec<T> {
    pub fn new(mean: Vec<T>, covariance: Matrix<T>, prior: T) -> Result<Self> {
        if mean.is_empty() {
            return Err(Error::invalid("mean must have dimension > 0"));
        }
        if covariance.rows() != mean.len() || covariance.cols() != mean.len() {
            return Err(Error::DimensionMismatch {
                context: "covariance vs mean",
                expected: mean.len(),
                got: covariance.rows(),
            });
        }
        if !(prior > T::zero() && prior < T::one()) {
            return Err(Error::invalid(format!("prior must lie in (0, 1), found {prior}")));
        }
        let chol = Cholesky::new(&covariance)?;
        Ok(Self {
            mean,
            covariance,
            prior,
            chol,
        })
    }

    /// Prior one half.
    pub fn with_equal_prior(mean: Vec<T>, covariance: Matrix<T>) -> Result<Self> {
        Self::new(mean, covariance, T::lit(0.5))
    }

    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    pub fn covariance(&self) -> &Matrix<T> {
        &self.covariance
    }

    pub fn prior(&self) -> T {
        self.prior
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// `ln P + ln N(x; μ, Σ)` without the `−(d/2)ln 2π` term.
    pub fn log_weighted_density(&self, x: &[T]) -> Result<T> {
        crate::geometry::check_len("point vs mean", self.dim(), x.len())?;
        let diff = sub(x, &self.mean);
        let sol = self.chol.solve(&diff)?;
        let half = T::lit(0.5);
        Ok(self.prior.ln() - half * dot(&diff, &sol) - half * self.chol.log_det())
    }

    pub fn sampler(&self, seed: u64, stream: u64) -> GaussianSampler<'_, T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        GaussianSampler {
            spec: self,
            rng,
            z: vec![T::zero(); self.dim()],
        }
    }
}

/// Streaming draws `μ + Lz` with `z` standard normal and `LLᵀ = Σ`.
pub struct GaussianSampler<'a, T> {
    spec: &'a GaussianSpec<T>,
    rng: ChaCha8Rng,
    z: Vec<T>,
}

impl<T: Scalar> GaussianSampler<'_, T> {
    pub fn next_into(&mut self, out: &mut [T]) {
        for z in self.z.iter_mut() {
            let v: f64 = StandardNormal.sample(&mut self.rng);
            *z = T::lit(v);
        }
        let lz = self.spec.chol.lower_mul(&self.z);
        for ((o, m), v) in out.iter_mut().zip(&self.spec.mean).zip(lz) {
            *o = *m + v;
        }
    }

    pub fn take_matrix(&mut self, n: usize) -> Matrix<T> {
        let d = self.spec.dim();
        let mut data = vec![T::zero(); n * d];
        for row in data.chunks_exact_mut(d) {
            self.next_into(row);
        }
        Matrix::from_row_major(n, d, data).expect("n·d entries")
    }
}

/// `n` draws from `spec` on stream 0 of `seed`.
pub fn sample<T: Scalar>(spec: &GaussianSpec<T>, n: usize, seed: u64) -> Result<Matrix<T>> {
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    Ok(spec.sampler(seed, 0).take_matrix(n))
}

/// Training set: `n1` draws of class one (`+1`) then `n2` of class two (`-1`).
pub fn sample_dataset<T: Scalar>(
    class1: &GaussianSpec<T>,
    class2: &GaussianSpec<T>,
    n1: usize,
    n2: usize,
    seed: u64,
) -> Result<LabeledDataset<T>> {
    sample_dataset_streams(class1, class2, n1, n2, seed, TRAIN_STREAMS)
}

pub fn sample_dataset_streams<T: Scalar>(
    class1: &GaussianSpec<T>,
    class2: &GaussianSpec<T>,
    n1: usize,
    n2: usize,
    seed: u64,
    streams: (u64, u64),
) -> Result<LabeledDataset<T>> {
    crate::geometry::check_len("class dimensions", class1.dim(), class2.dim())?;
    let a = class1.sampler(seed, streams.0).take_matrix(n1);
    let b = class2.sampler(seed, streams.1).take_matrix(n2);
    LabeledDataset::from_classes(&a, &b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Linear,
    Quadratic,
}

/// `ln Λ(x) = xᵀAx + wᵀx + c`; class one is chosen when `ln Λ(x) > η`.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesOracle<T> {
    pub kind: OracleKind,
    pub a: Matrix<T>,
    pub w: Vec<T>,
    pub c: T,
    pub eta: T,
}

pub fn bayes_oracle<T: Scalar>(
    class1: &GaussianSpec<T>,
    class2: &GaussianSpec<T>,
) -> Result<BayesOracle<T>> {
    crate::geometry::check_len("class dimensions", class1.dim(), class2.dim())?;
    let (s1, s2) = (class1.covariance(), class2.covariance());
    let inv1 = class1.chol.inverse();
    let inv2 = class2.chol.inverse();
    let common = s1.sub(s2)?.frobenius_norm() <= T::lit(COMMON_COVARIANCE_TOL) * s1.frobenius_norm();
    let (kind, a) = if common {
        (OracleKind::Linear, Matrix::zeros(class1.dim(), class1.dim()))
    } else {
        (OracleKind::Quadratic, inv2.sub(&inv1)?.scaled(T::lit(0.5)))
    };
    let p1 = inv1.mat_vec(class1.mean())?;
    let p2 = inv2.mat_vec(class2.mean())?;
    let half = T::lit(0.5);
    let w = sub(&p1, &p2);
    let c = half * dot(class2.mean(), &p2) - half * dot(class1.mean(), &p1);
    let eta = class2.prior().ln() - class1.prior().ln() + half * class1.chol.log_det()
        - half * class2.chol.log_det();
    Ok(BayesOracle { kind, a, w, c, eta })
}

impl<T: Scalar> BayesOracle<T> {
    pub fn log_ratio(&self, x: &[T]) -> T {
        let quad = match self.kind {
            OracleKind::Linear => T::zero(),
            OracleKind::Quadratic => self.a.quadratic_form(x).expect("dimension checked"),
        };
        quad + dot(&self.w, x) + self.c
    }

    /// `ln Λ(x) − η`; positive favors class one.
    pub fn discriminant(&self, x: &[T]) -> T {
        self.log_ratio(x) - self.eta
    }

    pub fn decide(&self, x: &[T]) -> Label {
        Label::from_score(self.discriminant(x))
    }

    /// Linear boundary `wᵀx + c − η = 0` as `x₂ = slope·x₁ + intercept`.
    pub fn line_2d(&self) -> Option<(T, T)> {
        match self.kind {
            OracleKind::Linear => crate::model::line_2d(&self.w, self.c - self.eta),
            OracleKind::Quadratic => None,
        }
    }
}

/// Index of the class with the largest weighted density; the lowest index wins ties.
pub fn bayes_decide_multi<T: Scalar>(classes: &[GaussianSpec<T>], x: &[T]) -> Result<usize> {
    let mut best = (0, T::neg_infinity());
    for (k, spec) in classes.iter().enumerate() {
        let v = spec.log_weighted_density(x)?;
        if v > best.1 {
            best = (k, v);
        }
    }
    Ok(best.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorMethod {
    AnalyticLinear,
    MonteCarlo { n: usize, seed: u64 },
}

/// Mahalanobis separation `Δ² = (μ₁ − μ₂)ᵀΣ⁻¹(μ₁ − μ₂)` for a common covariance.
pub fn mahalanobis_sq<T: Scalar>(class1: &GaussianSpec<T>, class2: &GaussianSpec<T>) -> Result<T> {
    let diff = sub(class1.mean(), class2.mean());
    let sol = class1.chol.solve(&diff)?;
    Ok(dot(&diff, &sol))
}

pub fn bayes_error<T: Scalar>(
    class1: &GaussianSpec<T>,
    class2: &GaussianSpec<T>,
    method: ErrorMethod,
) -> Result<f64> {
    let oracle = bayes_oracle(class1, class2)?;
    match method {
        ErrorMethod::AnalyticLinear => {
            if oracle.kind != OracleKind::Linear {
                return Err(Error::invalid(
                    "analytic error needs a common covariance",
                ));
            }
            if (class1.prior() - T::lit(0.5)).abs() > T::lit(1e-12) {
                return Err(Error::invalid("analytic error needs equal priors"));
            }
            let delta = mahalanobis_sq(class1, class2)?.to_f64_lossy().sqrt();
            Ok(normal_cdf(-delta / 2.0))
        }
        ErrorMethod::MonteCarlo { n, seed } => {
            classifier_error(|x| oracle.decide(x), class1, class2, n, seed)
        }
    }
}

/// Prior-weighted error of `decide` on `n` fresh draws per class.
pub fn classifier_error<T: Scalar, F: Fn(&[T]) -> Label>(
    decide: F,
    class1: &GaussianSpec<T>,
    class2: &GaussianSpec<T>,
    n: usize,
    seed: u64,
) -> Result<f64> {
    let (e1, e2) = class_error_rates(decide, class1, class2, n, seed)?;
    let p1 = class1.prior().to_f64_lossy();
    Ok(p1 * e1 + (1.0 - p1) * e2)
}

/// Per-class error rates on test streams.
pub fn class_error_rates<T: Scalar, F: Fn(&[T]) -> Label>(
    decide: F,
    class1: &GaussianSpec<T>,
    class2: &GaussianSpec<T>,
    n: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    crate::geometry::check_len("class dimensions", class1.dim(), class2.dim())?;
    let mut x = vec![T::zero(); class1.dim()];
    let mut count = |spec: &GaussianSpec<T>, stream: u64, truth: Label| {
        let mut s = spec.sampler(seed, stream);
        let mut wrong = 0usize;
        for _ in 0..n {
            s.next_into(&mut x);
            if decide(&x) != truth {
                wrong += 1;
            }
        }
        wrong as f64 / n as f64
    };
    let e1 = count(class1, TEST_STREAMS.0, Label::Plus);
    let e2 = count(class2, TEST_STREAMS.1, Label::Minus);
    Ok((e1, e2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_one() -> (GaussianSpec<f64>, GaussianSpec<f64>) {
        let cov = Matrix::from_diagonal(&[0.5, 2.0]);
        (
            GaussianSpec::with_equal_prior(vec![3.0, 0.5], cov.clone()).unwrap(),
            GaussianSpec::with_equal_prior(vec![3.0, -0.5], cov).unwrap(),
        )
    }

    fn example_two() -> (GaussianSpec<f64>, GaussianSpec<f64>) {
        let cov = Matrix::from_rows(&[[0.95, 0.45], [0.45, 0.35]]).unwrap();
        (
            GaussianSpec::with_equal_prior(vec![3.0, 0.25], cov.clone()).unwrap(),
            GaussianSpec::with_equal_prior(vec![3.0, -0.25], cov).unwrap(),
        )
    }

    #[test]
    fn normal_cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.96) - 0.975_002_104_851_779_6).abs() < 1e-12, "{}", normal_cdf(1.96));
        assert!((normal_cdf(-1.0) - 0.158_655_253_931_457).abs() < 1e-12);
    }

    #[test]
    fn sample_moments() {
        let spec = GaussianSpec::with_equal_prior(vec![0.0, 0.0], Matrix::identity(2)).unwrap();
        let x = sample(&spec, 100_000, 7).unwrap();
        let n = x.rows() as f64;
        let mut mean = [0.0; 2];
        for r in x.row_iter() {
            mean[0] += r[0] / n;
            mean[1] += r[1] / n;
        }
        assert!(mean.iter().all(|m| m.abs() < 0.02), "{mean:?}");
        let mut cov = [[0.0; 2]; 2];
        for r in x.row_iter() {
            for i in 0..2 {
                for j in 0..2 {
                    cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]) / (n - 1.0);
                }
            }
        }
        let fro = ((cov[0][0] - 1.0).powi(2)
            + cov[0][1].powi(2)
            + cov[1][0].powi(2)
            + (cov[1][1] - 1.0).powi(2))
        .sqrt();
        assert!(fro < 0.05, "{cov:?}");
    }

    #[test]
    fn sample_is_deterministic() {
        let (a, _) = example_one();
        assert_eq!(sample(&a, 50, 3).unwrap(), sample(&a, 50, 3).unwrap());
        assert_ne!(sample(&a, 50, 3).unwrap(), sample(&a, 50, 4).unwrap());
    }

    #[test]
    fn indefinite_covariance_rejected() {
        let cov = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(
            GaussianSpec::with_equal_prior(vec![0.0, 0.0], cov),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn example_one_oracle() {
        let (a, b) = example_one();
        let o = bayes_oracle(&a, &b).unwrap();
        assert_eq!(o.kind, OracleKind::Linear);
        assert!(o.w[0].abs() < 1e-15 && (o.w[1] - 0.5).abs() < 1e-15);
        assert!(o.c.abs() < 1e-14);
        assert!(o.eta.abs() < 1e-15);
        assert_eq!(o.a, Matrix::zeros(2, 2));
    }

    #[test]
    fn example_two_boundary() {
        let (a, b) = example_two();
        let o = bayes_oracle(&a, &b).unwrap();
        let (slope, icpt) = o.line_2d().unwrap();
        assert!((slope - 0.225 / 0.475).abs() < 1e-12, "{slope}");
        assert!((icpt + 0.675 / 0.475).abs() < 1e-12, "{icpt}");
        assert!((slope - 0.4737).abs() < 1e-4 && (icpt + 1.4211).abs() < 1e-4);
    }

    #[test]
    fn homogeneous_oracle_is_zero() {
        let s = GaussianSpec::with_equal_prior(vec![1.0, -2.0], Matrix::identity(2)).unwrap();
        let o = bayes_oracle(&s, &s).unwrap();
        assert!(o.w.iter().all(|&v| v == 0.0));
        assert_eq!(o.c, 0.0);
        assert_eq!(o.discriminant(&[4.0, 5.0]), 0.0);
        assert_eq!(bayes_error(&s, &s, ErrorMethod::AnalyticLinear).unwrap(), 0.5);
    }

    #[test]
    fn analytic_errors() {
        let (a, b) = example_one();
        assert!((mahalanobis_sq(&a, &b).unwrap() - 0.5).abs() < 1e-15);
        let e = bayes_error(&a, &b, ErrorMethod::AnalyticLinear).unwrap();
        assert!((e - normal_cdf(-0.5f64.sqrt() / 2.0)).abs() < 1e-15);
        assert!((e - 0.3618).abs() < 1e-4);
        assert!((e - 0.365).abs() <= 0.01);

        let (a, b) = example_two();
        let d2 = mahalanobis_sq(&a, &b).unwrap();
        assert!((d2 - 0.25 * 0.95 / 0.13).abs() < 1e-12);
        let e = bayes_error(&a, &b, ErrorMethod::AnalyticLinear).unwrap();
        assert!((e - 0.2496).abs() < 1e-4, "{e}");
    }

    #[test]
    fn analytic_needs_common_covariance() {
        let a = GaussianSpec::with_equal_prior(vec![0.0], Matrix::identity(1)).unwrap();
        let b = GaussianSpec::with_equal_prior(vec![1.0], Matrix::from_diagonal(&[2.0])).unwrap();
        assert_eq!(bayes_oracle(&a, &b).unwrap().kind, OracleKind::Quadratic);
        assert!(bayes_error(&a, &b, ErrorMethod::AnalyticLinear).is_err());
    }

    #[test]
    fn oracle_against_itself_matches_monte_carlo() {
        let (a, b) = example_one();
        let o = bayes_oracle(&a, &b).unwrap();
        let mc = bayes_error(&a, &b, ErrorMethod::MonteCarlo { n: 20_000, seed: 11 }).unwrap();
        let direct = classifier_error(|x| o.decide(x), &a, &b, 20_000, 11).unwrap();
        assert_eq!(mc, direct);
        assert!((mc - 0.3618).abs() < 0.015);
    }

    #[test]
    fn constant_classifier_half() {
        let (a, b) = example_one();
        let e = classifier_error(|_| Label::Plus, &a, &b, 1000, 1).unwrap();
        assert_eq!(e, 0.5);
    }

    #[test]
    fn two_class_density_rule_matches_oracle() {
        let (a, b) = example_two();
        let o = bayes_oracle(&a, &b).unwrap();
        let specs = [a.clone(), b.clone()];
        let x = sample(&a, 200, 5).unwrap();
        for p in x.row_iter() {
            let k = bayes_decide_multi(&specs, p).unwrap();
            assert_eq!(k == 0, o.decide(p) == Label::Plus);
        }
    }

    #[test]
    fn train_and_test_streams_differ() {
        let (a, b) = example_one();
        let train = sample_dataset(&a, &b, 5, 5, 9).unwrap();
        let test = sample_dataset_streams(&a, &b, 5, 5, 9, TEST_STREAMS).unwrap();
        assert_ne!(train, test);
        assert_eq!(train.count(Label::Plus), 5);
    }
}

