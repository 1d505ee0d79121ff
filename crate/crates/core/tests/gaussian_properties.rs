mod common;

use common::{example_one, example_two};
use eigenlocus::gaussian::{
    bayes_error, bayes_oracle, classifier_error, normal_cdf, ErrorMethod, GaussianSpec, OracleKind,
};
use eigenlocus::{Label, Matrix};
use proptest::prelude::*;

fn spd2() -> impl Strategy<Value = Matrix<f64>> {
    (0.2f64..3.0, 0.2f64..3.0, -0.9f64..0.9).prop_map(|(a, b, r)| {
        let off = r * (a * b).sqrt();
        Matrix::from_rows(&[[a, off], [off, b]]).unwrap()
    })
}

fn mean2() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, 2)
}

#[test]
fn monte_carlo_error_converges_to_analytic() {
    let (a, b) = example_two();
    let exact = bayes_error(&a, &b, ErrorMethod::AnalyticLinear).unwrap();
    let mut prev = f64::INFINITY;
    for n in [1_000, 10_000, 200_000] {
        let mc = bayes_error(&a, &b, ErrorMethod::MonteCarlo { n, seed: 5 }).unwrap();
        let sd = (exact * (1.0 - exact) / (2.0 * n as f64)).sqrt();
        assert!((mc - exact).abs() <= 4.0 * sd, "n {n}: {mc} vs {exact}");
        prev = prev.min((mc - exact).abs());
    }
    assert!(prev < 0.005);
}

#[test]
fn example_one_analytic_error_inside_reported_band() {
    let (a, b) = example_one();
    let e = bayes_error(&a, &b, ErrorMethod::AnalyticLinear).unwrap();
    assert!((e - normal_cdf(-(0.5f64).sqrt() / 2.0)).abs() < 1e-15);
    assert!((e - 0.365).abs() <= 0.01);
}

#[test]
fn unequal_priors_shift_the_threshold() {
    let cov = Matrix::identity(2);
    let a = GaussianSpec::new(vec![1.0, 0.0], cov.clone(), 0.8).unwrap();
    let b = GaussianSpec::new(vec![-1.0, 0.0], cov, 0.2).unwrap();
    let o = bayes_oracle(&a, &b).unwrap();
    assert!((o.eta - (0.2f64.ln() - 0.8f64.ln())).abs() < 1e-15);
    assert_eq!(o.decide(&[0.0, 0.0]), Label::Plus);
    assert!(bayes_error(&a, &b, ErrorMethod::AnalyticLinear).is_err());
    let mc = bayes_error(&a, &b, ErrorMethod::MonteCarlo { n: 50_000, seed: 1 }).unwrap();
    let flat = classifier_error(|x| Label::from_score(x[0]), &a, &b, 50_000, 1).unwrap();
    assert!(mc < flat);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn swapping_classes_negates_the_discriminant(
        m1 in mean2(), m2 in mean2(), s1 in spd2(), s2 in spd2(), x in mean2(), p in 0.1f64..0.9
    ) {
        let a = GaussianSpec::new(m1.clone(), s1.clone(), p).unwrap();
        let b = GaussianSpec::new(m2.clone(), s2.clone(), 1.0 - p).unwrap();
        let ab = bayes_oracle(&a, &b).unwrap();
        let ba = bayes_oracle(&b, &a).unwrap();
        let (u, v) = (ab.discriminant(&x), ba.discriminant(&x));
        prop_assert!((u + v).abs() <= 1e-9 * (1.0 + u.abs()), "{u} {v}");
        prop_assert_eq!(ab.kind, ba.kind);
    }

    #[test]
    fn analytic_error_is_affine_invariant(
        m1 in mean2(), m2 in mean2(), s in spd2(), shift in mean2(),
        a11 in 0.5f64..2.0, a12 in -0.5f64..0.5, a22 in 0.5f64..2.0
    ) {
        let spec = |m: &[f64], s: &Matrix<f64>| GaussianSpec::with_equal_prior(m.to_vec(), s.clone()).unwrap();
        let e0 = bayes_error(&spec(&m1, &s), &spec(&m2, &s), ErrorMethod::AnalyticLinear).unwrap();
        let t = Matrix::from_rows(&[[a11, a12], [0.0, a22]]).unwrap();
        let map = |m: &[f64]| {
            let v = t.mat_vec(m).unwrap();
            vec![v[0] + shift[0], v[1] + shift[1]]
        };
        let ts = t.mat_mul(&s).unwrap().mat_mul(&t.transpose()).unwrap();
        let e1 = bayes_error(&spec(&map(&m1), &ts), &spec(&map(&m2), &ts), ErrorMethod::AnalyticLinear).unwrap();
        prop_assert!((e0 - e1).abs() <= 1e-9, "{e0} {e1}");
    }

    #[test]
    fn common_covariance_gives_linear_oracle(m1 in mean2(), m2 in mean2(), s in spd2()) {
        let a = GaussianSpec::with_equal_prior(m1, s.clone()).unwrap();
        let b = GaussianSpec::with_equal_prior(m2, s).unwrap();
        let o = bayes_oracle(&a, &b).unwrap();
        prop_assert_eq!(o.kind, OracleKind::Linear);
        prop_assert_eq!(o.eta, 0.0);
    }
}
