mod common;

use proptest::prelude::*;
use sphinterp::analysis::uniform_norm_refined;
use sphinterp::experiment::reference_resolution;
use sphinterp::hyperinterp::{evaluate_kernel, project_reference};
use sphinterp::{
    equal_area, equal_weight_rule, eval_basis, fit, fit_samples, l2_error, mz_constant, product_gauss_rule,
    random_uniform, BasisIndex, Provenance, QuadratureRule, TestFunction,
};

fn random_rule(m: usize, seed: u64) -> QuadratureRule {
    equal_weight_rule(random_uniform(m, seed).unwrap(), Provenance::Random).unwrap()
}

#[test]
fn norm_equivalence_inequalities_on_small_rules() {
    let mut rng = common::rng(21);
    let rules = [
        random_rule(3000, 4),
        equal_weight_rule(equal_area(1200).unwrap(), Provenance::EqualArea).unwrap(),
    ];
    let n = 6;
    let reference = product_gauss_rule(n + 1).unwrap();
    for rule in &rules {
        let eta = mz_constant(rule, n).unwrap().eta;
        assert!(eta < 1.0);
        for _ in 0..50 {
            let chi = common::random_poly(n, &mut rng);
            let u = fit(rule, |x| chi.evaluate(x), n).unwrap();
            let uv = u.evaluate_many(reference.points());
            let cv = chi.evaluate_many(reference.points());
            let inner: f64 = reference.weights().iter().zip(uv.iter().zip(&cv)).map(|(w, (a, b))| w * a * b).sum();
            let chi2: f64 = reference.weights().iter().zip(&cv).map(|(w, b)| w * b * b).sum();
            let u2: f64 = reference.weights().iter().zip(&uv).map(|(w, a)| w * a * a).sum();
            let d2: f64 = reference.weights().iter().zip(uv.iter().zip(&cv)).map(|(w, (a, b))| w * (a - b) * (a - b)).sum();
            let tol = 1e-8;
            assert!((1.0 - eta) * chi2 <= inner + tol && inner <= (1.0 + eta) * chi2 + tol);
            assert!((1.0 - eta) * chi2.sqrt() <= u2.sqrt() + tol && u2.sqrt() <= (1.0 + eta) * chi2.sqrt() + tol);
            assert!(d2 <= (eta * eta + 4.0 * eta) * chi2 + tol);
        }
    }
}

#[test]
fn exact_rules_reproduce_polynomials() {
    let mut rng = common::rng(8);
    for n in [1, 4, 9] {
        let rule = product_gauss_rule(n + 1).unwrap();
        let reference = product_gauss_rule(n + 2).unwrap();
        for _ in 0..5 {
            let chi = common::random_poly(n, &mut rng);
            let u = fit(&rule, |x| chi.evaluate(x), n).unwrap();
            for (a, b) in u.coeffs().iter().zip(chi.coeffs()) {
                assert!((a - b).abs() < 1e-11);
            }
            assert!(l2_error(|x| u.evaluate(x), |x| chi.evaluate(x), &reference) < 1e-10);
        }
    }
}

#[test]
fn basis_function_is_reproduced_pointwise() {
    let rule = product_gauss_rule(4).unwrap();
    let idx = BasisIndex::new(2, 3).unwrap().flat();
    let h = fit(&rule, |x| eval_basis(2, x)[idx], 3).unwrap();
    let mut rng = common::rng(1);
    for _ in 0..50 {
        let x = common::random_point(&mut rng);
        assert!((h.evaluate(&x) - eval_basis(2, &x)[idx]).abs() < 1e-9);
    }
}

#[test]
fn stability_bound() {
    let functions = [
        TestFunction::F1,
        TestFunction::F2,
        TestFunction::F3,
        TestFunction::f4(0).unwrap(),
        TestFunction::f4(2).unwrap(),
    ];
    let rules = [
        random_rule(4000, 2),
        equal_weight_rule(equal_area(2000).unwrap(), Provenance::EqualArea).unwrap(),
        product_gauss_rule(12).unwrap(),
    ];
    for f in functions {
        let sup = uniform_norm_refined(|x| f.eval(x), 10_000).unwrap();
        for rule in &rules {
            for n in [3, 8] {
                let eta = mz_constant(rule, n).unwrap().eta;
                if eta >= 1.0 {
                    continue;
                }
                let norm = fit(rule, |x| f.eval(x), n).unwrap().l2_norm();
                let bound = (1.0 + eta).sqrt() * rule.weight_sum().sqrt() * sup;
                assert!(norm <= bound + 1e-8, "{f} n={n}: {norm} > {bound}");
            }
        }
    }
}

#[test]
fn projection_error_splits() {
    let reference = product_gauss_rule(60).unwrap();
    let n = 8;
    for f in [TestFunction::F2, TestFunction::F3, TestFunction::f4(1).unwrap()] {
        let p = project_reference(|x| f.eval(x), n, &reference).unwrap();
        for rule in [
            random_rule(5000, 6),
            equal_weight_rule(equal_area(3000).unwrap(), Provenance::EqualArea).unwrap(),
        ] {
            let q = fit(&rule, |x| f.eval(x), n).unwrap();
            let total = l2_error(|x| q.evaluate(x), |x| f.eval(x), &reference).powi(2);
            let poly = l2_error(|x| q.evaluate(x), |x| p.evaluate(x), &reference).powi(2);
            let tail = l2_error(|x| p.evaluate(x), |x| f.eval(x), &reference).powi(2);
            assert!((total - poly - tail).abs() < 1e-10 * total.max(1.0), "{f}");
        }
    }
}

#[test]
fn franke_coefficients_decay() {
    let reference = product_gauss_rule(60).unwrap();
    let p = project_reference(|x| TestFunction::F3.eval(x), 24, &reference).unwrap();
    let block = |lo: usize, hi: usize| -> f64 {
        p.coeffs()[lo * lo..(hi + 1) * (hi + 1)].iter().fold(0.0f64, |m, c| m.max(c.abs()))
    };
    let envelopes = [block(0, 5), block(6, 11), block(12, 17), block(18, 24)];
    for w in envelopes.windows(2) {
        assert!(w[1] < w[0], "{envelopes:?}");
    }
}

#[test]
fn reference_rule_resolves_targets() {
    for f in [TestFunction::F2, TestFunction::F3, TestFunction::f4(0).unwrap(), TestFunction::f4(2).unwrap()] {
        for n in [6, 12] {
            let change = reference_resolution(&f, n, (n + 11).max(100)).unwrap();
            assert!(change < 0.01, "{f} n={n}: {change}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fit_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0, n in 0usize..8) {
        let rule = random_rule(300, seed);
        let f: Vec<f64> = rule.points().iter().map(|x| TestFunction::F3.eval(x)).collect();
        let g: Vec<f64> = rule.points().iter().map(|x| TestFunction::F2.eval(x)).collect();
        let mix: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let hf = fit_samples(&rule, &f, n).unwrap();
        let hg = fit_samples(&rule, &g, n).unwrap();
        let hm = fit_samples(&rule, &mix, n).unwrap();
        for i in 0..hm.coeffs().len() {
            let expect = a * hf.coeffs()[i] + b * hg.coeffs()[i];
            prop_assert!((hm.coeffs()[i] - expect).abs() < 1e-12 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn kernel_and_basis_forms_agree(seed in any::<u64>(), n in 0usize..12) {
        let rule = random_rule(200, seed);
        let values: Vec<f64> = rule.points().iter().map(|x| TestFunction::F3.eval(x)).collect();
        let h = fit_samples(&rule, &values, n).unwrap();
        let mut rng = common::rng(seed ^ 1);
        for _ in 0..5 {
            let x = common::random_point(&mut rng);
            let k = evaluate_kernel(&rule, &values, n, &x).unwrap();
            prop_assert!((k - h.evaluate(&x)).abs() < 1e-9);
        }
    }
}
