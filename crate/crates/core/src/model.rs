//! Trained classifier assembled from a dual solution.
//!
//! From `ψ` the model rebuilds the normal vector `τ = Σψᵢyᵢxᵢ`, its class
//! components `τ₁ = Σ_{class one} ψᵢxᵢ` and `τ₂ = Σ_{class two} ψᵢxᵢ`
//! (so `τ = τ₁ − τ₂`), the per-point slacks `ξᵢ = ψᵢ/C`, and the offset `τ₀`
//! averaged over the extreme (support) points.

use serde::Serialize;

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::geometry::{axpy, dot, norm, scale, sub, Label, LinearLocus};
use crate::scalar::Scalar;
use crate::solver::{solve_dual, DualProblem, DualSolution, SolverOptions};

/// A point is extreme when `ψᵢ > EXTREME_REL_THRESHOLD · max ψ`.
pub const EXTREME_REL_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremePoint<T> {
    pub index: usize,
    pub label: Label,
    pub psi: T,
    pub x: Vec<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverSummary<T> {
    pub iterations: usize,
    pub duality_gap: T,
    pub objective: T,
    pub converged: bool,
}

impl<T: Scalar> From<&DualSolution<T>> for SolverSummary<T> {
    fn from(s: &DualSolution<T>) -> Self {
        Self {
            iterations: s.iterations,
            duality_gap: s.duality_gap,
            objective: s.objective,
            converged: s.converged,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenlocusModel<T> {
    pub(crate) tau: Vec<T>,
    pub(crate) tau1: Vec<T>,
    pub(crate) tau2: Vec<T>,
    pub(crate) tau0: T,
    pub(crate) psi: Vec<T>,
    pub(crate) xi: Vec<T>,
    pub(crate) extremes: Vec<ExtremePoint<T>>,
    pub(crate) c: T,
    pub(crate) eps: T,
    pub(crate) n: usize,
    pub(crate) d: usize,
    pub(crate) extreme_mean: Vec<T>,
    pub(crate) label_term: T,
    pub(crate) solver: Option<SolverSummary<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecisionOutput<T> {
    /// `τᵀx + τ₀`.
    pub score: T,
    pub label: Label,
    /// Score was exactly zero; the label defaults to `Plus`.
    pub on_boundary: bool,
    /// Component of `x − x̄*` along `τ/‖τ‖`; `None` when `τ = 0`.
    pub decision_locus: Option<T>,
    /// `τ = 0`: the label is decided by the sign of `τ₀` alone.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginGeometry<T> {
    pub boundary: LinearLocus<T>,
    pub border_plus: LinearLocus<T>,
    pub border_minus: LinearLocus<T>,
    /// `1/‖τ‖`.
    pub half_width: T,
    /// `2/‖τ‖`.
    pub full_width: T,
}

impl<T: Scalar> MarginGeometry<T> {
    /// Boundary `τᵀx + τ₀ = 0` and borders `τᵀx + τ₀ = ±1`.
    pub fn from_hyperplane(tau: &[T], tau0: T) -> Result<Self> {
        let len = norm(tau);
        if !(len > T::zero()) {
            return Err(Error::ZeroAxis);
        }
        let one = T::one();
        Ok(Self {
            boundary: LinearLocus::new(tau.to_vec(), -tau0 / len)?,
            border_plus: LinearLocus::new(tau.to_vec(), (one - tau0) / len)?,
            border_minus: LinearLocus::new(tau.to_vec(), (-one - tau0) / len)?,
            half_width: one / len,
            full_width: (one + one) / len,
        })
    }
}

/// Indices with `ψᵢ` above the relative extreme threshold.
pub fn extreme_indices<T: Scalar>(psi: &[T]) -> Vec<usize> {
    let max = psi.iter().fold(T::zero(), |m, &p| m.max(p));
    if !(max > T::zero()) {
        return Vec::new();
    }
    let cut = T::lit(EXTREME_REL_THRESHOLD) * max;
    (0..psi.len()).filter(|&i| psi[i] > cut).collect()
}

/// `τ₀ = (1/l)Σ yᵢ(1 − ξᵢ) − (1/l)(Σ xᵢ)ᵀτ` over the `l` extreme points.
pub fn compute_tau0<T: Scalar>(
    data: &LabeledDataset<T>,
    psi: &[T],
    tau: &[T],
    xi: &[T],
) -> Result<T> {
    let idx = extreme_indices(psi);
    let (mean, label_term) = extreme_statistics(data, &idx, xi)?;
    Ok(label_term - dot(&mean, tau))
}

/// Mean of the extreme points and `(1/l)Σ yᵢ(1 − ξᵢ)`.
fn extreme_statistics<T: Scalar>(
    data: &LabeledDataset<T>,
    idx: &[usize],
    xi: &[T],
) -> Result<(Vec<T>, T)> {
    if idx.is_empty() {
        return Err(Error::NoExtremePoints);
    }
    let l = T::from_count(idx.len());
    let mut sum = vec![T::zero(); data.dim()];
    let mut label_sum = T::zero();
    for &i in idx {
        axpy(&mut sum, T::one(), data.point(i));
        label_sum = label_sum + data.labels()[i].sign::<T>() * (T::one() - xi[i]);
    }
    Ok((scale(&sum, T::one() / l), label_sum / l))
}

/// Trains a model with slack penalty `C` (`ε = 1/C`).
pub fn fit<T: Scalar>(
    data: &LabeledDataset<T>,
    c: T,
    opts: &SolverOptions<T>,
) -> Result<EigenlocusModel<T>> {
    if data.len() < 2 {
        return Err(Error::invalid("need at least two training points"));
    }
    if !data.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let problem = DualProblem::from_data(data, c)?;
    let solution = solve_dual(&problem, opts)?;
    EigenlocusModel::from_dual(data, c, &solution.psi, Some((&solution).into()))
}

impl<T: Scalar> EigenlocusModel<T> {
    /// Assembles a model from multipliers `ψ` obtained for `data` at penalty `C`.
    pub fn from_dual(
        data: &LabeledDataset<T>,
        c: T,
        psi: &[T],
        solver: Option<SolverSummary<T>>,
    ) -> Result<Self> {
        if psi.len() != data.len() {
            return Err(Error::DimensionMismatch {
                context: "psi length vs data",
                expected: data.len(),
                got: psi.len(),
            });
        }
        if psi.iter().any(|&p| p < T::zero()) {
            return Err(Error::Infeasible("negative multiplier".into()));
        }
        let idx = extreme_indices(psi);
        let mut kept = vec![T::zero(); psi.len()];
        for &i in &idx {
            kept[i] = psi[i];
        }
        let extremes = idx
            .iter()
            .map(|&i| ExtremePoint {
                index: i,
                label: data.labels()[i],
                psi: kept[i],
                x: data.point(i).to_vec(),
            })
            .collect();
        Self::assemble(data.len(), data.dim(), c, kept, extremes, None, None, solver)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        n: usize,
        d: usize,
        c: T,
        psi: Vec<T>,
        extremes: Vec<ExtremePoint<T>>,
        stored_tau: Option<Vec<T>>,
        stored_tau0: Option<T>,
        solver: Option<SolverSummary<T>>,
    ) -> Result<Self> {
        if extremes.is_empty() {
            return Err(Error::NoExtremePoints);
        }
        let xi: Vec<T> = psi.iter().map(|&p| p / c).collect();
        let mut tau = vec![T::zero(); d];
        let mut tau1 = vec![T::zero(); d];
        let mut tau2 = vec![T::zero(); d];
        for e in &extremes {
            axpy(&mut tau, e.label.sign::<T>() * e.psi, &e.x);
            match e.label {
                Label::Plus => axpy(&mut tau1, e.psi, &e.x),
                Label::Minus => axpy(&mut tau2, e.psi, &e.x),
            }
        }
        let tau = stored_tau.unwrap_or(tau);
        let l = T::from_count(extremes.len());
        let mut sum = vec![T::zero(); d];
        let mut label_sum = T::zero();
        for e in &extremes {
            axpy(&mut sum, T::one(), &e.x);
            label_sum = label_sum + e.label.sign::<T>() * (T::one() - e.psi / c);
        }
        let extreme_mean = scale(&sum, T::one() / l);
        let label_term = label_sum / l;
        let tau0 = stored_tau0.unwrap_or_else(|| label_term - dot(&extreme_mean, &tau));
        Ok(Self {
            tau,
            tau1,
            tau2,
            tau0,
            psi,
            xi,
            extremes,
            c,
            eps: T::one() / c,
            n,
            d,
            extreme_mean,
            label_term,
            solver,
        })
    }

    pub fn tau(&self) -> &[T] {
        &self.tau
    }

    pub fn tau1(&self) -> &[T] {
        &self.tau1
    }

    pub fn tau2(&self) -> &[T] {
        &self.tau2
    }

    pub fn tau0(&self) -> T {
        self.tau0
    }

    pub fn psi(&self) -> &[T] {
        &self.psi
    }

    pub fn xi(&self) -> &[T] {
        &self.xi
    }

    pub fn extremes(&self) -> &[ExtremePoint<T>] {
        &self.extremes
    }

    pub fn extreme_indices(&self, label: Label) -> Vec<usize> {
        self.extremes
            .iter()
            .filter(|e| e.label == label)
            .map(|e| e.index)
            .collect()
    }

    pub fn c(&self) -> T {
        self.c
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    /// Number of training points `N`.
    pub fn n_train(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `x̄*`, the mean of the extreme points.
    pub fn extreme_mean(&self) -> &[T] {
        &self.extreme_mean
    }

    pub fn solver(&self) -> Option<&SolverSummary<T>> {
        self.solver.as_ref()
    }

    /// False only when the solver reported non-convergence.
    pub fn converged(&self) -> bool {
        self.solver.as_ref().is_none_or(|s| s.converged)
    }

    pub fn sv_fraction(&self) -> T {
        T::from_count(self.extremes.len()) / T::from_count(self.n.max(1))
    }

    pub fn tau_norm(&self) -> T {
        norm(&self.tau)
    }

    /// Discriminant `D(x) = τᵀx + τ₀`.
    pub fn score(&self, x: &[T]) -> T {
        dot(&self.tau, x) + self.tau0
    }

    /// `Λ_τ(x) = (x − x̄*)ᵀτ + (1/l)Σ yᵢ(1 − ξᵢ)`; equals [`Self::score`]
    /// up to rounding.
    pub fn test_statistic(&self, x: &[T]) -> T {
        dot(&sub(x, &self.extreme_mean), &self.tau) + self.label_term
    }

    pub fn decide(&self, x: &[T]) -> Result<DecisionOutput<T>> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                context: "decision input",
                expected: self.d,
                got: x.len(),
            });
        }
        let score = self.score(x);
        let len = self.tau_norm();
        let degenerate = len == T::zero();
        let decision_locus = if degenerate {
            None
        } else {
            Some(dot(&sub(x, &self.extreme_mean), &self.tau) / len)
        };
        Ok(DecisionOutput {
            score,
            label: Label::from_score(score),
            on_boundary: score == T::zero(),
            decision_locus,
            degenerate,
        })
    }

    pub fn margin_geometry(&self) -> Result<MarginGeometry<T>> {
        MarginGeometry::from_hyperplane(&self.tau, self.tau0)
    }

    /// Boundary as `x₂ = slope·x₁ + intercept` for two-dimensional models.
    pub fn boundary_line_2d(&self) -> Option<(T, T)> {
        line_2d(&self.tau, self.tau0)
    }

    /// Copy with one multiplier replaced; `τ`, `τ₀` and `ξ` are left as they
    /// were so audits can detect the inconsistency.
    pub fn with_corrupted_psi(&self, index: usize, value: T) -> Self {
        let mut m = self.clone();
        if let Some(p) = m.psi.get_mut(index) {
            *p = value;
        }
        for e in m.extremes.iter_mut().filter(|e| e.index == index) {
            e.psi = value;
        }
        m
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_document_parts(
        n: usize,
        d: usize,
        c: T,
        psi: Vec<T>,
        extremes: Vec<ExtremePoint<T>>,
        tau: Vec<T>,
        tau0: T,
        solver: Option<SolverSummary<T>>,
    ) -> Result<Self> {
        Self::assemble(n, d, c, psi, extremes, Some(tau), Some(tau0), solver)
    }
}

/// `wᵀx + b = 0` rewritten as `x₂ = slope·x₁ + intercept`.
pub fn line_2d<T: Scalar>(w: &[T], b: T) -> Option<(T, T)> {
    if w.len() != 2 || w[1] == T::zero() {
        return None;
    }
    Some((-w[0] / w[1], -b / w[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::hard_margin_c;

    fn two_point() -> LabeledDataset<f64> {
        LabeledDataset::from_rows(&[[1.0, 0.0], [-1.0, 0.0]], vec![Label::Plus, Label::Minus])
            .unwrap()
    }

    fn two_point_model() -> EigenlocusModel<f64> {
        fit(&two_point(), hard_margin_c(), &SolverOptions::default()).unwrap()
    }

    #[test]
    fn two_point_fit() {
        let m = two_point_model();
        assert!((m.tau()[0] - 1.0).abs() < 1e-8 && m.tau()[1] == 0.0);
        assert!(m.tau0().abs() < 1e-8);
        for &p in m.psi() {
            assert!((p - 0.5).abs() < 1e-6);
        }
        let g = m.margin_geometry().unwrap();
        assert!((g.full_width - 2.0).abs() < 1e-8);
        assert!((g.half_width - 1.0).abs() < 1e-8);
    }

    #[test]
    fn model_invariants() {
        let m = two_point_model();
        let diff = sub(m.tau1(), m.tau2());
        assert!(crate::geometry::max_abs_diff(&diff, m.tau()) <= 1e-12);
        for (p, x) in m.psi().iter().zip(m.xi()) {
            assert_eq!(*x, p / m.c());
        }
    }

    #[test]
    fn decide_examples() {
        let m = two_point_model();
        let d = m.decide(&[1.0, 0.0]).unwrap();
        assert!((d.score - 1.0).abs() < 1e-8);
        assert_eq!(d.label, Label::Plus);
        let d = m.decide(&[0.0, 3.0]).unwrap();
        assert_eq!(d.score, 0.0);
        assert!(d.on_boundary);
        assert_eq!(d.label, Label::Plus);
        assert!(m.decide(&[1.0]).is_err());
    }

    #[test]
    fn label_negation_negates_exactly() {
        let rows = [[1.0f64, 2.0], [0.5, -1.0], [-1.0, 0.3], [2.0, 2.0], [-0.2, -0.7]];
        let y = vec![Label::Plus, Label::Minus, Label::Minus, Label::Plus, Label::Minus];
        let ds = LabeledDataset::from_rows(&rows, y).unwrap();
        let a = fit(&ds, 0.8, &SolverOptions::default()).unwrap();
        let b = fit(&ds.with_negated_labels(), 0.8, &SolverOptions::default()).unwrap();
        for (u, v) in a.tau().iter().zip(b.tau()) {
            assert_eq!(*u, -*v);
        }
        assert_eq!(a.tau0(), -b.tau0());
        assert_eq!(a.tau1(), b.tau2());
        let x = [0.3, -4.0];
        assert_eq!(a.score(&x).abs(), b.score(&x).abs());
    }

    #[test]
    fn translation_shifts_tau0() {
        let t = [0.0, 5.0];
        let base = two_point();
        let moved = LabeledDataset::from_rows(
            &[[1.0, 5.0], [-1.0, 5.0]],
            vec![Label::Plus, Label::Minus],
        )
        .unwrap();
        let a = fit(&base, hard_margin_c(), &SolverOptions::default()).unwrap();
        let b = fit(&moved, hard_margin_c(), &SolverOptions::default()).unwrap();
        assert!(crate::geometry::max_abs_diff(a.tau(), b.tau()) < 1e-12);
        let expected = a.tau0() - dot(&t, a.tau());
        assert!((b.tau0() - expected).abs() < 1e-12);
    }

    #[test]
    fn scaled_hyperplane_same_boundary_half_width() {
        let m = two_point_model();
        let g1 = m.margin_geometry().unwrap();
        let tau2: Vec<f64> = m.tau().iter().map(|v| 2.0 * v).collect();
        let g2 = MarginGeometry::from_hyperplane(&tau2, 2.0 * m.tau0()).unwrap();
        assert!(g1.boundary.same_locus(&g2.boundary, 1e-12));
        assert!((g2.full_width - g1.full_width / 2.0).abs() < 1e-12);
    }

    #[test]
    fn locus_distances_from_origin() {
        let tau = [3.0f64, 4.0];
        let g = MarginGeometry::from_hyperplane(&tau, 0.5).unwrap();
        assert!((g.boundary.offset().abs() - 0.5 / 5.0).abs() < 1e-15);
        assert!((g.border_plus.offset().abs() - 0.5 / 5.0).abs() < 1e-15);
        assert!((g.border_minus.offset().abs() - 1.5 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn zero_tau_geometry_rejected() {
        assert!(matches!(
            MarginGeometry::from_hyperplane(&[0.0, 0.0], 1.0),
            Err(Error::ZeroAxis)
        ));
    }

    #[test]
    fn single_class_fit_rejected() {
        let ds =
            LabeledDataset::from_rows(&[[1.0], [2.0]], vec![Label::Plus, Label::Plus]).unwrap();
        assert!(matches!(
            fit(&ds, 1.0, &SolverOptions::default()),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn compute_tau0_needs_extremes() {
        let ds = two_point();
        assert!(matches!(
            compute_tau0(&ds, &[0.0, 0.0], &[1.0, 0.0], &[0.0, 0.0]),
            Err(Error::NoExtremePoints)
        ));
    }
}
