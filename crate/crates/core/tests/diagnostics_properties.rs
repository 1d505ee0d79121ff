mod common;

use common::{dataset, example_one, random_problem};
use eigenlocus::diagnostics::{
    eigenenergy_ledger, equilibrium_check, extreme_rank_agreement, kkt_audit,
    pointwise_covariance, spectrum_report, weak_dual_experiment, DEFAULT_IDENTITY_REL_TOL,
};
use eigenlocus::gaussian::{sample, sample_dataset};
use eigenlocus::geometry::{gram_matrix, inner_product_stats};
use eigenlocus::{diagnose, fit, hard_margin_c, Dataset, DiagnoseOptions, Label, Matrix, Options};
use proptest::prelude::*;

/// Two clouds far enough apart to be separable with a wide gap.
fn separable(seed: u64, n: usize) -> Dataset {
    let a = common::standard([4.0, 4.0]);
    let b = common::standard([-4.0, -4.0]);
    sample_dataset(&a, &b, n, n, seed).unwrap()
}

#[test]
fn hard_margin_separable_model_passes_everything() {
    for seed in 1..=5 {
        let ds = separable(seed, 40);
        let m = fit(&ds, hard_margin_c(), &Options::default()).unwrap();
        let r = diagnose(&m, &ds, &DiagnoseOptions::default()).unwrap();
        assert!(r.pass, "seed {seed}: {:?}", r.failures);
        assert!(m.extremes().len() < 10);
    }
}

#[test]
fn imbalanced_classes_keep_equilibrium() {
    let (a, b) = example_one();
    let ds = sample_dataset(&a, &b, 100, 500, 3).unwrap();
    let m = fit(&ds, 1e-4, &Options::default()).unwrap();
    let eq = equilibrium_check(&m);
    assert!(eq.residual <= 1e-9, "{eq:?}");
    assert!(kkt_audit(&m, &ds, 1e-6).unwrap().pass);
}

/// Extreme points are the ones pushed across their class: on example-one
/// data the largest multipliers sit below the class median of the labeled
/// pointwise covariance.
#[test]
fn top_multipliers_have_low_labeled_covariance() {
    let (a, b) = example_one();
    for seed in 1..=5 {
        let ds = sample_dataset(&a, &b, 300, 300, seed).unwrap();
        for c in [1e-4, 1.0] {
            let m = fit(&ds, c, &Options::default()).unwrap();
            let r = pointwise_covariance(&ds, Some(m.psi())).unwrap();
            let agree = extreme_rank_agreement(&r, m.psi()).unwrap();
            assert_eq!(agree.top_count, 60);
            assert!(agree.below_median >= 0.9, "seed {seed}, C {c}: {agree:?}");
        }
    }
}

#[test]
fn primal_components_share_direction_with_their_points() {
    let (a, b) = example_one();
    let ds = sample_dataset(&a, &b, 50, 50, 2).unwrap();
    let m = fit(&ds, 1.0, &Options::default()).unwrap();
    for e in m.extremes() {
        let comp: Vec<f64> = e.x.iter().map(|v| v * e.psi).collect();
        let s = inner_product_stats(&comp, &e.x).unwrap();
        assert!((s.cos_angle.unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn weak_dual_contrast_on_skewed_data() {
    let cov = Matrix::from_diagonal(&[7.0, 0.5]);
    let p = eigenlocus::gaussian::GaussianSpec::with_equal_prior(vec![3.0, 7.0], cov.clone()).unwrap();
    let q = eigenlocus::gaussian::GaussianSpec::with_equal_prior(vec![2.0, 6.0], cov).unwrap();
    let ds = sample_dataset(&p, &q, 300, 300, 1).unwrap();
    let r = weak_dual_experiment(&ds, None, 0.1, &Options::default(), 1e-6).unwrap();
    assert!(!r.well_posed);
    assert!(r.regularized.converged && r.regularized.kkt_pass);
    assert!((0.8..=0.95).contains(&r.regularized.sv_fraction), "{r:?}");
    assert!(r.regularized.sv_fraction - r.under_regularized.sv_fraction >= 0.10);
    assert_eq!(r.regularized.rank_estimate, 600);
    assert!(r.under_regularized.rank_estimate < 600);
}

#[test]
fn weak_dual_kkt_no_worse_with_regularization() {
    let (a, b) = example_one();
    let mut reg = 0;
    let mut under = 0;
    for seed in 1..=10 {
        let ds = sample_dataset(&a, &b, 40, 40, seed).unwrap();
        let r = weak_dual_experiment(&ds, None, 1e-2, &Options::default(), 1e-6).unwrap();
        reg += usize::from(r.regularized.kkt_pass);
        under += usize::from(r.under_regularized.kkt_pass);
    }
    assert!(reg >= under, "{reg} vs {under}");
    assert_eq!(reg, 10);
}

fn rows_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..4).prop_flat_map(|d| prop::collection::vec(prop::collection::vec(-5.0f64..5.0, d), 2..12))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pointwise_covariance_is_additive(rows in rows_strategy(), split in 1usize..11) {
        let n = rows.len();
        let k = split.min(n - 1);
        let y: Vec<Label> = (0..n).map(|i| if i % 2 == 0 { Label::Plus } else { Label::Minus }).collect();
        let all = Dataset::from_rows(&rows, y.clone()).unwrap();
        let a = Dataset::from_rows(&rows[..k], y[..k].to_vec()).unwrap();
        let b = Dataset::from_rows(&rows[k..], y[k..].to_vec()).unwrap();
        let whole = pointwise_covariance(&all, None).unwrap();
        for i in 0..n {
            let x = all.point(i);
            let part = |ds: &Dataset| {
                ds.features().row_iter().map(|r| r.iter().zip(x).map(|(u, v)| u * v).sum::<f64>()).sum::<f64>()
            };
            let sum = part(&a) + part(&b);
            let got = whole.points[i].cov_up;
            prop_assert!((got - sum).abs() <= 1e-12 * (1.0 + sum.abs()));
        }
    }

    #[test]
    fn spectrum_sum_is_trace_and_shift_is_exact(rows in rows_strategy(), eps in 1e-3f64..10.0) {
        let n = rows.len();
        let y: Vec<Label> = (0..n).map(|i| if i % 2 == 0 { Label::Plus } else { Label::Minus }).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let q0 = gram_matrix(&x, &y, 0.0).unwrap();
        let q1 = gram_matrix(&x, &y, eps).unwrap();
        let s0 = spectrum_report(&q0).unwrap();
        let s1 = spectrum_report(&q1).unwrap();
        let sum: f64 = s1.eigenvalues.iter().sum();
        prop_assert!((sum - s1.trace).abs() <= 1e-9 * s1.trace.abs().max(1.0));
        for (a, b) in s0.eigenvalues.iter().zip(&s1.eigenvalues) {
            prop_assert!((b - a - eps).abs() <= 1e-10 * s1.lambda_max.max(1.0), "{a} {b} {eps}");
        }
        prop_assert!(s0.rank_estimate <= x.cols());
        prop_assert_eq!(s1.rank_estimate, n);
    }

    #[test]
    fn fitted_models_pass_kkt_audit(seed in 0u64..10_000) {
        let (rows, y, c) = random_problem(seed, 12, 3);
        let ds = dataset(&rows, &y);
        let m = fit(&ds, c, &Options::default()).unwrap();
        let audit = kkt_audit(&m, &ds, 1e-6).unwrap();
        prop_assert!(audit.pass, "{:?}", audit.failing);
        let ledger = eigenenergy_ledger(&m, DEFAULT_IDENTITY_REL_TOL);
        for e in ledger.entries.iter().filter(|e| e.name.starts_with("(a)") || e.name.starts_with("(b)") || e.name.starts_with("(c)") || e.name.starts_with("(d)")) {
            prop_assert!(e.pass, "{}: {}", e.name, e.residual);
        }
    }

    #[test]
    fn slack_identity_residual_matches_closed_form(seed in 0u64..10_000) {
        let (rows, y, c) = random_problem(seed, 12, 3);
        let m = fit(&dataset(&rows, &y), c, &Options::default()).unwrap();
        let ledger = eigenenergy_ledger(&m, DEFAULT_IDENTITY_REL_TOL);
        let sq = |label: f64| -> f64 {
            m.psi().iter().zip(&y).filter(|(_, &l)| l == label).map(|(p, _)| p * p).sum()
        };
        let predicted = (sq(1.0) - sq(-1.0)).abs() / (2.0 * c);
        let e1 = ledger.entries.iter().find(|e| e.name.starts_with("(e1)")).unwrap();
        prop_assert!((e1.residual - predicted).abs() <= 1e-7 * (1.0 + predicted), "{} vs {predicted}", e1.residual);
    }

    #[test]
    fn sample_draws_are_reproducible(seed in 0u64..1000) {
        let s = common::standard([1.0, -1.0]);
        prop_assert_eq!(sample(&s, 8, seed).unwrap(), sample(&s, 8, seed).unwrap());
    }
}
