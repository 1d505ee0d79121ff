#![allow(dead_code)]

use eigenlocus::gaussian::GaussianSpec;
use eigenlocus::{Dataset, Label, Matrix};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Enumerated {
    pub psi: Vec<f64>,
    pub objective: f64,
}

/// Exact maximizer of `1ᵀψ − ½ψᵀQψ` over `ψ ≥ 0`, `yᵀψ = 0` by trying every
/// support set. For each set `S` the stationarity system
/// `Q_SS ψ_S + b y_S = 1`, `y_Sᵀψ_S = 0` is solved densely; the candidate is kept
/// when `ψ_S ≥ 0` and every point outside `S` has `(Qψ)ᵢ + b yᵢ ≥ 1`.
pub fn enumerate_active_sets(q: &[Vec<f64>], y: &[f64]) -> Enumerated {
    let n = y.len();
    assert!(n <= 16);
    let mut best: Option<Enumerated> = None;
    for mask in 1u32..(1 << n) {
        let s: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        if !s.iter().any(|&i| y[i] > 0.0) || !s.iter().any(|&i| y[i] < 0.0) {
            continue;
        }
        let k = s.len();
        let mut a = DMatrix::<f64>::zeros(k + 1, k + 1);
        let mut rhs = DVector::<f64>::zeros(k + 1);
        for (r, &i) in s.iter().enumerate() {
            for (c, &j) in s.iter().enumerate() {
                a[(r, c)] = q[i][j];
            }
            a[(r, k)] = y[i];
            a[(k, r)] = y[i];
            rhs[r] = 1.0;
        }
        let Some(sol) = a.lu().solve(&rhs) else { continue };
        let mut psi = vec![0.0; n];
        for (r, &i) in s.iter().enumerate() {
            psi[i] = sol[r];
        }
        let b = sol[k];
        if psi.iter().any(|&p| p < -1e-12) {
            continue;
        }
        let qpsi: Vec<f64> = (0..n).map(|i| (0..n).map(|j| q[i][j] * psi[j]).sum()).collect();
        let dual_ok = (0..n)
            .filter(|i| !s.contains(i))
            .all(|i| qpsi[i] + b * y[i] >= 1.0 - 1e-10);
        if !dual_ok {
            continue;
        }
        let objective = psi.iter().sum::<f64>()
            - 0.5 * psi.iter().zip(&qpsi).map(|(p, v)| p * v).sum::<f64>();
        if best.as_ref().is_none_or(|e| objective > e.objective) {
            best = Some(Enumerated { psi, objective });
        }
    }
    best.expect("a strictly convex problem has a KKT point")
}

/// `Q = X̃X̃ᵀ + εI` built independently of the library.
pub fn gram(rows: &[Vec<f64>], y: &[f64], eps: f64) -> Vec<Vec<f64>> {
    let n = rows.len();
    let mut q = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let dot: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
            q[i][j] = y[i] * y[j] * dot + if i == j { eps } else { 0.0 };
        }
    }
    q
}

/// Random problem with both labels present.
pub fn random_problem(seed: u64, max_n: usize, max_d: usize) -> (Vec<Vec<f64>>, Vec<f64>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_n);
    let d = rng.random_range(1..=max_d);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect())
        .collect();
    let mut y: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    y[0] = 1.0;
    y[n - 1] = -1.0;
    let c = 10f64.powf(rng.random_range(-1.0..1.0));
    (rows, y, c)
}

pub fn dataset(rows: &[Vec<f64>], y: &[f64]) -> Dataset {
    let labels = y.iter().map(|&v| if v > 0.0 { Label::Plus } else { Label::Minus }).collect();
    Dataset::from_rows(rows, labels).unwrap()
}

pub fn example_one() -> (GaussianSpec<f64>, GaussianSpec<f64>) {
    let cov = Matrix::from_diagonal(&[0.5, 2.0]);
    (
        GaussianSpec::with_equal_prior(vec![3.0, 0.5], cov.clone()).unwrap(),
        GaussianSpec::with_equal_prior(vec![3.0, -0.5], cov).unwrap(),
    )
}

pub fn example_two() -> (GaussianSpec<f64>, GaussianSpec<f64>) {
    let cov = Matrix::from_rows(&[[0.95, 0.45], [0.45, 0.35]]).unwrap();
    (
        GaussianSpec::with_equal_prior(vec![3.0, 0.25], cov.clone()).unwrap(),
        GaussianSpec::with_equal_prior(vec![3.0, -0.25], cov).unwrap(),
    )
}

pub fn standard(mean: [f64; 2]) -> GaussianSpec<f64> {
    GaussianSpec::with_equal_prior(mean.to_vec(), Matrix::identity(2)).unwrap()
}

pub fn configs_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}
