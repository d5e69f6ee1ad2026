#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sphinterp::pointsets::Provenance;
use sphinterp::{Hyperinterpolant, SpherePoint};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Degree-`n` polynomial with coefficients uniform in `[-1, 1]`.
pub fn random_poly(n: usize, rng: &mut impl Rng) -> Hyperinterpolant {
    let coeffs = (0..(n + 1) * (n + 1)).map(|_| rng.random_range(-1.0..1.0)).collect();
    Hyperinterpolant::from_coeffs(n, coeffs, Provenance::Loaded).unwrap()
}

pub fn random_point(rng: &mut impl Rng) -> SpherePoint {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    SpherePoint::from_polar(z.acos(), phi)
}

pub fn data_file(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}
