mod common;

use proptest::prelude::*;
use sphinterp::harmonics::legendre_normalized;
use sphinterp::pointsets::equal_area;
use sphinterp::{eval_basis, kernel_eval, product_gauss_rule, HarmonicBasis, SpherePoint, SPHERE_AREA};

fn point(theta: f64, phi: f64) -> SpherePoint {
    SpherePoint::from_polar(theta, phi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn addition_theorem_on_the_diagonal(ell in 0usize..=20, theta in 0.0..std::f64::consts::PI, phi in 0.0..std::f64::consts::TAU) {
        let y = eval_basis(ell, &point(theta, phi));
        let block: f64 = y[ell * ell..].iter().map(|v| v * v).sum();
        let expect = (2 * ell + 1) as f64 / SPHERE_AREA;
        prop_assert!((block - expect).abs() < 1e-10, "{block} {expect}");
    }

    #[test]
    fn addition_theorem_off_diagonal(
        ell in 0usize..=20,
        t1 in 0.0..std::f64::consts::PI, p1 in 0.0..std::f64::consts::TAU,
        t2 in 0.0..std::f64::consts::PI, p2 in 0.0..std::f64::consts::TAU,
    ) {
        let (x, y) = (point(t1, p1), point(t2, p2));
        let (yx, yy) = (eval_basis(ell, &x), eval_basis(ell, &y));
        let sum: f64 = yx[ell * ell..].iter().zip(&yy[ell * ell..]).map(|(a, b)| a * b).sum();
        let expect = (2 * ell + 1) as f64 / SPHERE_AREA * legendre_normalized(ell, x.dot(&y).clamp(-1.0, 1.0)).unwrap();
        prop_assert!((sum - expect).abs() < 1e-10);
    }

    #[test]
    fn kernel_matches_double_sum(
        n in 0usize..=15,
        t1 in 0.0..std::f64::consts::PI, p1 in 0.0..std::f64::consts::TAU,
        t2 in 0.0..std::f64::consts::PI, p2 in 0.0..std::f64::consts::TAU,
    ) {
        let (x, y) = (point(t1, p1), point(t2, p2));
        let direct: f64 = eval_basis(n, &x).iter().zip(eval_basis(n, &y)).map(|(a, b)| a * b).sum();
        let k = kernel_eval(n, &x, &y);
        prop_assert!((k - direct).abs() < 1e-10, "{k} {direct}");
        prop_assert!((k - kernel_eval(n, &y, &x)).abs() < 1e-13);
    }

    #[test]
    fn legendre_is_bounded(ell in 0usize..60, t in -1.0f64..=1.0) {
        prop_assert!(legendre_normalized(ell, t).unwrap().abs() <= 1.0 + 1e-12);
    }
}

#[test]
fn uniform_bound_on_dense_grid() {
    let grid = equal_area(10_000).unwrap();
    let n = 12;
    let mut max_abs = vec![0.0f64; (n + 1) * (n + 1)];
    let basis = HarmonicBasis::new(n);
    let mut y = vec![0.0; basis.dim()];
    for p in &grid {
        basis.eval_into(p, &mut y);
        max_abs.iter_mut().zip(&y).for_each(|(m, v)| *m = m.max(v.abs()));
    }
    for (i, m) in max_abs.iter().enumerate() {
        let ell = (i as f64).sqrt() as usize;
        let bound = ((2 * ell + 1) as f64 / SPHERE_AREA).sqrt();
        assert!(*m <= bound + 1e-10, "index {i}: {m} > {bound}");
    }
}

#[test]
fn orthonormal_under_exact_rule() {
    let n = 12;
    let rule = product_gauss_rule(n + 1).unwrap();
    let dim = (n + 1) * (n + 1);
    let mut gram = vec![0.0; dim * dim];
    for (p, w) in rule.iter() {
        let y = eval_basis(n, p);
        for i in 0..dim {
            for j in 0..dim {
                gram[i * dim + j] += w * y[i] * y[j];
            }
        }
    }
    for i in 0..dim {
        for j in 0..dim {
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((gram[i * dim + j] - expect).abs() < 1e-10, "({i},{j})");
        }
    }
}

#[test]
fn reproducing_property() {
    let mut rng = common::rng(11);
    for n in [0, 3, 9] {
        let rule = product_gauss_rule(n + 1).unwrap();
        for _ in 0..10 {
            let chi = common::random_poly(n, &mut rng);
            let x = common::random_point(&mut rng);
            let inner: f64 = rule.iter().map(|(p, w)| w * chi.evaluate(p) * kernel_eval(n, p, &x)).sum();
            assert!((inner - chi.evaluate(&x)).abs() < 1e-9);
        }
    }
}

#[test]
fn kernel_diagonal_and_constant() {
    let mut rng = common::rng(3);
    for _ in 0..20 {
        let x = common::random_point(&mut rng);
        let y = common::random_point(&mut rng);
        assert!((kernel_eval(0, &x, &y) - 1.0 / SPHERE_AREA).abs() < 1e-15);
        for n in [1, 5, 17] {
            let expect = ((n + 1) * (n + 1)) as f64 / SPHERE_AREA;
            assert!((kernel_eval(n, &x, &x) - expect).abs() < 1e-11);
        }
    }
}
