//! Shared fixtures for the benchmarks in `benches/`.

use sphinterp::{equal_area, equal_weight_rule, random_uniform, Provenance, QuadratureRule, TestFunction};

/// Equal-weight rule on `m` equal-area centers.
pub fn equal_area_rule(m: usize) -> QuadratureRule {
    equal_weight_rule(equal_area(m).expect("m > 0"), Provenance::EqualArea).expect("non-empty")
}

/// Equal-weight rule on `m` seeded uniform points.
pub fn random_rule(m: usize, seed: u64) -> QuadratureRule {
    equal_weight_rule(random_uniform(m, seed).expect("m > 0"), Provenance::Random).expect("non-empty")
}

/// Samples of `f` at the nodes of `rule`.
pub fn samples(rule: &QuadratureRule, f: &TestFunction) -> Vec<f64> {
    rule.points().iter().map(|x| f.eval(x)).collect()
}
