//! Wolfe dual of the squared-slack linear SVM.
//!
//! Maximizes `1ᵀψ − ½ψᵀQψ` subject to `ψᵀy = 0` and `ψ ≥ 0`, where
//! `Q = X̃X̃ᵀ + εI`, `X̃ = D_y X` and `ε = 1/C`. The squared slack penalty
//! removes the usual upper box, so only the non-negativity bound and the
//! single equality constraint remain.
//!
//! The solver is a two-coordinate (SMO) ascent. Each step picks the pair
//! that maximally violates the KKT conditions, using the second-order
//! working-set rule, and solves the one-dimensional subproblem in closed
//! form with clipping at zero. Every step preserves `ψᵀy = 0` and never
//! decreases the dual objective.

use serde::Serialize;

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::geometry::{dot, gram_matrix, Label, Matrix};
use crate::scalar::Scalar;

/// Regularization used for hard-margin requests (`C = ∞`).
pub const HARD_MARGIN_EPS: f64 = 1e-10;

/// `C` corresponding to [`HARD_MARGIN_EPS`].
pub fn hard_margin_c<T: Scalar>() -> T {
    T::one() / T::lit(HARD_MARGIN_EPS)
}

#[derive(Clone, Debug)]
pub struct DualProblem<T> {
    q: Matrix<T>,
    y: Vec<Label>,
    c: T,
}

impl<T: Scalar> DualProblem<T> {
    /// Wraps a precomputed `Q` (which must already include `εI`, `ε = 1/C`).
    pub fn new(q: Matrix<T>, y: Vec<Label>, c: T) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::invalid("Q must be square"));
        }
        if q.rows() != y.len() {
            return Err(Error::DimensionMismatch {
                context: "Q rows vs labels",
                expected: q.rows(),
                got: y.len(),
            });
        }
        if !(c > T::zero()) || !c.is_finite() {
            return Err(Error::invalid("C must be finite and > 0"));
        }
        if !y.contains(&Label::Plus) || !y.contains(&Label::Minus) {
            return Err(Error::SingleClass);
        }
        let asym = q.max_asymmetry();
        if asym > T::tol(1e-12) * q.max_abs().max(T::one()) {
            return Err(Error::NotSymmetric(asym.to_f64_lossy()));
        }
        if let Some(i) = (0..q.rows()).find(|&i| !(q[(i, i)] > T::zero())) {
            return Err(Error::NotPositiveDefinite(format!(
                "Q[{i}][{i}] = {:e}",
                q[(i, i)].to_f64_lossy()
            )));
        }
        Ok(Self { q, y, c })
    }

    /// Builds `Q` from data with `ε = 1/C`.
    pub fn from_data(data: &LabeledDataset<T>, c: T) -> Result<Self> {
        if !(c > T::zero()) || !c.is_finite() {
            return Err(Error::invalid("C must be finite and > 0"));
        }
        let q = gram_matrix(data.features(), data.labels(), T::one() / c)?;
        Self::new(q, data.labels().to_vec(), c)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.y.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn q(&self) -> &Matrix<T> {
        &self.q
    }

    pub fn labels(&self) -> &[Label] {
        &self.y
    }

    pub fn c(&self) -> T {
        self.c
    }

    pub fn eps(&self) -> T {
        T::one() / self.c
    }

    fn check_psi(&self, psi: &[T]) -> Result<()> {
        if psi.len() != self.len() {
            return Err(Error::DimensionMismatch {
                context: "psi length",
                expected: self.len(),
                got: psi.len(),
            });
        }
        Ok(())
    }

    /// `ψᵀy`.
    pub fn equality_residual(&self, psi: &[T]) -> T {
        psi.iter()
            .zip(&self.y)
            .fold(T::zero(), |s, (&p, l)| s + p * l.sign::<T>())
    }
}

#[derive(Clone, Debug)]
pub struct SolverOptions<T> {
    /// Stop once the maximal KKT violation drops to this level.
    pub kkt_tol: T,
    /// When set, also stop early once the duality gap drops to this level
    /// (checked every `gap_check_interval` iterations). When `None` the
    /// iteration stops on `kkt_tol` only, and a run cut off by `max_iter`
    /// still counts as converged if its gap is below
    /// `1e-8 · max(1, |dual objective|)`.
    pub gap_tol: Option<T>,
    pub max_iter: usize,
    /// Allowed `|ψᵀy|`; `None` means `1e-10 · N`.
    pub equality_tol: Option<T>,
    /// Iterations between duality-gap evaluations.
    pub gap_check_interval: usize,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            kkt_tol: T::tol(1e-8),
            gap_tol: None,
            max_iter: 2_000_000,
            equality_tol: None,
            gap_check_interval: 2_000,
        }
    }
}

impl<T: Scalar> SolverOptions<T> {
    pub fn equality_tol_for(&self, n: usize) -> T {
        self.equality_tol
            .unwrap_or_else(|| T::tol(1e-10) * T::from_count(n.max(1)))
    }

    pub fn gap_tol_for(&self, dual_objective: T) -> T {
        self.gap_tol
            .unwrap_or_else(|| T::tol(1e-8) * dual_objective.abs().max(T::one()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DualSolution<T> {
    pub psi: Vec<T>,
    pub iterations: usize,
    pub duality_gap: T,
    /// `1ᵀψ − ½ψᵀQψ`.
    pub objective: T,
    pub converged: bool,
    /// Final maximal KKT violation `m(ψ) − M(ψ)`.
    pub kkt_violation: T,
    /// KKT tolerance actually applied (never below the rounding floor of `Qψ`).
    pub kkt_tol_used: T,
}

#[derive(Clone, Debug)]
pub struct ObjectiveAndGradient<T> {
    pub objective: T,
    pub gradient: Vec<T>,
}

/// `Ξ(ψ) = 1ᵀψ − ½ψᵀQψ` and `∇Ξ = 1 − Qψ`.
pub fn objective_and_gradient<T: Scalar>(
    problem: &DualProblem<T>,
    psi: &[T],
) -> Result<ObjectiveAndGradient<T>> {
    problem.check_psi(psi)?;
    let qpsi = problem.q.mat_vec(psi)?;
    let half = T::lit(0.5);
    let objective = psi.iter().copied().sum::<T>() - half * dot(psi, &qpsi);
    let gradient = qpsi.iter().map(|&v| T::one() - v).collect();
    Ok(ObjectiveAndGradient {
        objective,
        gradient,
    })
}

/// Primal point rebuilt from a dual iterate.
#[derive(Clone, Debug)]
pub struct PrimalReconstruction<T> {
    pub tau_norm_sq: T,
    /// `yᵢ xᵢᵀτ` for every point.
    pub margins: Vec<T>,
    /// Offset minimizing the primal objective for this `τ`.
    pub tau0: T,
    /// Smallest feasible slacks `max(0, 1 − yᵢ(xᵢᵀτ + τ₀))`.
    pub xi: Vec<T>,
    /// `½‖τ‖² + (C/2)Σξᵢ²`.
    pub objective: T,
}

/// Rebuilds a primal-feasible point from `ψ` given `Qψ`.
///
/// `τ = Σψᵢyᵢxᵢ` enters only through `‖τ‖² = ψᵀQψ − ε‖ψ‖²` and the margins
/// `yᵢxᵢᵀτ = (Qψ)ᵢ − εψᵢ`, so the data matrix is not needed.
fn primal_from_qpsi<T: Scalar>(
    problem: &DualProblem<T>,
    psi: &[T],
    qpsi: &[T],
) -> PrimalReconstruction<T> {
    let eps = problem.eps();
    let half = T::lit(0.5);
    let margins: Vec<T> = qpsi.iter().zip(psi).map(|(&q, &p)| q - eps * p).collect();
    let tau_norm_sq = (dot(psi, qpsi) - eps * dot(psi, psi)).max(T::zero());
    let tau0 = optimal_offset(&margins, &problem.y);
    let xi: Vec<T> = margins
        .iter()
        .zip(&problem.y)
        .map(|(&m, l)| (T::one() - m - l.sign::<T>() * tau0).max(T::zero()))
        .collect();
    let objective = half * tau_norm_sq + half * problem.c * dot(&xi, &xi);
    PrimalReconstruction {
        tau_norm_sq,
        margins,
        tau0,
        xi,
        objective,
    }
}

/// Minimizes `Σ max(0, 1 − mᵢ − yᵢb)²` over `b` by bisection on its
/// nondecreasing derivative.
fn optimal_offset<T: Scalar>(margins: &[T], y: &[Label]) -> T {
    let slope = |b: T| -> T {
        margins.iter().zip(y).fold(T::zero(), |s, (&m, l)| {
            let yi: T = l.sign();
            let xi = (T::one() - m - yi * b).max(T::zero());
            s - yi * xi
        })
    };
    let spread = margins
        .iter()
        .fold(T::zero(), |a, &m| a.max((T::one() - m).abs()));
    let (mut lo, mut hi) = (-spread - T::one(), spread + T::one());
    for _ in 0..300 {
        let mid = lo + (hi - lo) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + (hi - lo) * T::lit(0.5)
}

/// Primal objective of the reconstructed feasible point minus the dual
/// objective. Non-negative for every feasible `ψ` (weak duality) and zero
/// exactly at the optimum.
pub fn duality_gap<T: Scalar>(problem: &DualProblem<T>, psi: &[T]) -> Result<T> {
    problem.check_psi(psi)?;
    if let Some(i) = psi.iter().position(|&p| p < T::zero() || !p.is_finite()) {
        return Err(Error::Infeasible(format!("psi[{i}] is negative")));
    }
    let eq = problem.equality_residual(psi).abs();
    let eq_tol = SolverOptions::<T>::default().equality_tol_for(problem.len());
    if eq > eq_tol {
        return Err(Error::Infeasible(format!(
            "|psi·y| = {:e} exceeds {:e}",
            eq.to_f64_lossy(),
            eq_tol.to_f64_lossy()
        )));
    }
    Ok(gap_from_qpsi(problem, psi, &problem.q.mat_vec(psi)?))
}

/// Reconstructs the primal point for a feasible `ψ`.
pub fn reconstruct_primal<T: Scalar>(
    problem: &DualProblem<T>,
    psi: &[T],
) -> Result<PrimalReconstruction<T>> {
    problem.check_psi(psi)?;
    Ok(primal_from_qpsi(problem, psi, &problem.q.mat_vec(psi)?))
}

fn gap_from_qpsi<T: Scalar>(problem: &DualProblem<T>, psi: &[T], qpsi: &[T]) -> T {
    let primal = primal_from_qpsi(problem, psi, qpsi);
    let dual = psi.iter().copied().sum::<T>() - T::lit(0.5) * dot(psi, qpsi);
    primal.objective - dual
}

/// Solves from `ψ = 0`.
pub fn solve_dual<T: Scalar>(
    problem: &DualProblem<T>,
    opts: &SolverOptions<T>,
) -> Result<DualSolution<T>> {
    solve_dual_from(problem, opts, vec![T::zero(); problem.len()])
}

/// Solves from a caller-supplied feasible starting point.
///
/// The iteration is run with labels oriented so that the first point is `+1`;
/// since `Q` is unchanged by a global label flip this makes the returned `ψ`
/// bitwise identical for a problem and its label-negated twin.
pub fn solve_dual_from<T: Scalar>(
    problem: &DualProblem<T>,
    opts: &SolverOptions<T>,
    mut psi: Vec<T>,
) -> Result<DualSolution<T>> {
    problem.check_psi(&psi)?;
    let n = problem.len();
    let q = &problem.q;
    let flip = problem.y[0] == Label::Minus;
    let y: Vec<T> = problem
        .y
        .iter()
        .map(|l| if flip { -l.sign::<T>() } else { l.sign::<T>() })
        .collect();

    if psi.iter().any(|&p| p < T::zero() || !p.is_finite()) {
        return Err(Error::Infeasible("initial psi must be >= 0".into()));
    }
    let eq_tol = opts.equality_tol_for(n);
    if problem.equality_residual(&psi).abs() > eq_tol {
        return Err(Error::Infeasible("initial psi violates psi·y = 0".into()));
    }

    let qmax = q.max_abs();
    let half = T::lit(0.5);
    let two = T::one() + T::one();

    // minimization form: G = Qψ − 1
    let mut grad: Vec<T> = q.mat_vec(&psi)?.into_iter().map(|v| v - T::one()).collect();
    let objective_of = |psi: &[T], grad: &[T]| -> T {
        half * psi.iter().copied().sum::<T>() - half * dot(psi, grad)
    };
    let rounding_tol = |psi: &[T]| -> T {
        let mass = psi.iter().copied().sum::<T>();
        T::epsilon() * T::lit(32.0) * (T::one() + qmax * mass)
    };

    let mut iterations = 0;
    let mut converged = false;
    let mut violation = T::infinity();
    let mut tol_used = opts.kkt_tol;
    let mut last_obj = objective_of(&psi, &grad);
    let mut refreshed_at_tol = false;

    while iterations < opts.max_iter {
        // working set: i from I_up by max −yG, M over I_low
        let mut gmax = T::neg_infinity();
        let mut gmin = T::infinity();
        let mut i_sel = usize::MAX;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let positive = psi[t] > T::zero();
            if (y[t] > T::zero() || positive) && v > gmax {
                gmax = v;
                i_sel = t;
            }
            if (y[t] < T::zero() || positive) && v < gmin {
                gmin = v;
            }
        }
        violation = gmax - gmin;
        tol_used = opts.kkt_tol.max(rounding_tol(&psi));
        if violation <= tol_used {
            if refreshed_at_tol {
                converged = true;
                break;
            }
            // confirm against a freshly computed gradient before stopping
            grad = q.mat_vec(&psi)?.into_iter().map(|v| v - T::one()).collect();
            refreshed_at_tol = true;
            continue;
        }
        refreshed_at_tol = false;

        if let Some(gap_tol) = opts.gap_tol {
            if iterations > 0 && iterations % opts.gap_check_interval.max(1) == 0 {
                let qpsi: Vec<T> = grad.iter().map(|&g| g + T::one()).collect();
                if gap_from_qpsi(problem, &psi, &qpsi) <= gap_tol {
                    converged = true;
                    break;
                }
            }
        }

        let i = i_sel;
        let qi = q.row(i);
        let mut j_sel = usize::MAX;
        let mut best = T::infinity();
        let mut a_sel = T::zero();
        for t in 0..n {
            if !(y[t] < T::zero() || psi[t] > T::zero()) {
                continue;
            }
            let v = -y[t] * grad[t];
            if v >= gmax {
                continue;
            }
            let b = gmax - v;
            let a = qi[i] + q[(t, t)] - two * y[i] * y[t] * qi[t];
            if !(a > T::zero()) {
                return Err(Error::NotPositiveDefinite(format!(
                    "non-positive curvature {:e} on pair ({i}, {t})",
                    a.to_f64_lossy()
                )));
            }
            let score = -(b * b) / a;
            if score < best {
                best = score;
                j_sel = t;
                a_sel = a;
            }
        }
        if j_sel == usize::MAX {
            // no admissible partner: the violation is pure rounding
            converged = true;
            break;
        }
        let j = j_sel;
        let b = gmax + y[j] * grad[j];
        let mut step = b / a_sel;
        let mut clip_i = false;
        let mut clip_j = false;
        if y[i] < T::zero() && step >= psi[i] {
            step = psi[i];
            clip_i = true;
        }
        if y[j] > T::zero() && step >= psi[j] {
            step = psi[j];
            clip_j = true;
            clip_i = clip_i && step == psi[i];
        }
        let old_i = psi[i];
        let old_j = psi[j];
        psi[i] = if clip_i { T::zero() } else { old_i + y[i] * step };
        psi[j] = if clip_j { T::zero() } else { old_j - y[j] * step };
        let di = psi[i] - old_i;
        let dj = psi[j] - old_j;
        let qj = q.row(j);
        for ((g, &a), &b) in grad.iter_mut().zip(qi).zip(qj) {
            *g = *g + a * di + b * dj;
        }
        iterations += 1;

        if cfg!(debug_assertions) {
            let obj = objective_of(&psi, &grad);
            let slack = T::tol(1e-9) * (T::one() + obj.abs());
            debug_assert!(
                obj >= last_obj - slack,
                "dual objective decreased: {last_obj:e} -> {obj:e}"
            );
            last_obj = obj;
        }
    }

    let qpsi = q.mat_vec(&psi)?;
    let objective = psi.iter().copied().sum::<T>() - half * dot(&psi, &qpsi);
    let duality_gap = gap_from_qpsi(problem, &psi, &qpsi);
    if !converged {
        converged = duality_gap <= opts.gap_tol_for(objective);
    }
    Ok(DualSolution {
        psi,
        iterations,
        duality_gap,
        objective,
        converged,
        kkt_violation: violation,
        kkt_tol_used: tol_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::LabeledDataset;

    fn two_point(c: f64) -> DualProblem<f64> {
        let ds = LabeledDataset::from_rows(
            &[[1.0, 0.0], [-1.0, 0.0]],
            vec![Label::Plus, Label::Minus],
        )
        .unwrap();
        DualProblem::from_data(&ds, c).unwrap()
    }

    #[test]
    fn two_point_closed_form() {
        let p = two_point(hard_margin_c());
        let sol = solve_dual(&p, &SolverOptions::default()).unwrap();
        assert!(sol.converged);
        for &v in &sol.psi {
            assert!((v - 0.5).abs() < 1e-6, "{v}");
        }
        assert!(sol.duality_gap.abs() <= 1e-8);
    }

    #[test]
    fn single_class_rejected() {
        let q = Matrix::from_rows(&[[2.0, 0.0], [0.0, 2.0]]).unwrap();
        assert!(matches!(
            DualProblem::new(q, vec![Label::Plus, Label::Plus], 1.0),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn zero_diagonal_rejected() {
        let q = Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(
            DualProblem::new(q, vec![Label::Plus, Label::Minus], 1.0),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn singular_pair_reports_not_pd() {
        // duplicate point with opposite labels and no regularization
        let q = Matrix::from_rows(&[[1.0, -1.0], [-1.0, 1.0]]).unwrap();
        let p = DualProblem::new(q, vec![Label::Plus, Label::Minus], 1.0).unwrap();
        assert!(matches!(
            solve_dual(&p, &SolverOptions::default()),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn objective_at_origin() {
        let p = two_point(2.0);
        let og = objective_and_gradient(&p, &[0.0, 0.0]).unwrap();
        assert_eq!(og.objective, 0.0);
        assert_eq!(og.gradient, vec![1.0, 1.0]);
        assert!(objective_and_gradient(&p, &[0.0]).is_err());
    }

    #[test]
    fn objective_two_point_unregularized() {
        let q = Matrix::from_rows(&[[1.0f64, 1.0], [1.0, 1.0]]).unwrap();
        let p = DualProblem::new(q, vec![Label::Plus, Label::Minus], 1.0).unwrap();
        let og = objective_and_gradient(&p, &[0.5, 0.5]).unwrap();
        assert!((og.objective - 0.5).abs() < 1e-15);
        assert_eq!(og.gradient, vec![0.0, 0.0]);
    }

    #[test]
    fn gap_rejects_infeasible() {
        let p = two_point(1.0);
        assert!(matches!(
            duality_gap(&p, &[-0.1, -0.1]),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            duality_gap(&p, &[0.5, 0.1]),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn gap_at_origin_is_primal_value_of_zero_tau() {
        // τ = 0, best offset 0, every slack 1: gap = (C/2)·N − 0
        let p = two_point(3.0);
        let gap = duality_gap(&p, &[0.0, 0.0]).unwrap();
        assert!((gap - 3.0).abs() < 1e-12, "{gap}");
    }

    #[test]
    fn label_negation_gives_identical_psi() {
        let rows = [[1.0f64, 2.0], [0.5, -1.0], [-1.0, 0.3], [2.0, 2.0], [-0.2, -0.7]];
        let y = vec![Label::Plus, Label::Minus, Label::Minus, Label::Plus, Label::Minus];
        let ds = LabeledDataset::from_rows(&rows, y).unwrap();
        let a = solve_dual(&DualProblem::from_data(&ds, 0.7).unwrap(), &Default::default())
            .unwrap();
        let neg = ds.with_negated_labels();
        let b = solve_dual(&DualProblem::from_data(&neg, 0.7).unwrap(), &Default::default())
            .unwrap();
        assert_eq!(a.psi, b.psi);
    }

    #[test]
    fn max_iter_returns_best_iterate() {
        let rows = [[1.0f64, 2.0], [0.5, -1.0], [-1.0, 0.3], [2.0, 2.0], [-0.2, -0.7]];
        let y = vec![Label::Plus, Label::Minus, Label::Minus, Label::Plus, Label::Minus];
        let ds = LabeledDataset::from_rows(&rows, y).unwrap();
        let p = DualProblem::from_data(&ds, 100.0).unwrap();
        let opts = SolverOptions {
            max_iter: 1,
            ..Default::default()
        };
        let sol = solve_dual(&p, &opts).unwrap();
        assert_eq!(sol.iterations, 1);
        assert!(!sol.converged);
        assert!(sol.psi.iter().all(|&v| v >= 0.0));
        assert!(p.equality_residual(&sol.psi).abs() < 1e-12);
    }
}
