//! Benchmark functions on S²: a quadratic polynomial, a kinked function, the
//! spherical Franke function, and sums of normalized Wendland functions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harmonics::SpherePoint;

/// Largest supported Wendland smoothness index.
pub const MAX_SIGMA: u32 = 4;

/// Centers of the six Wendland bumps in `f₄,σ`: the octahedron vertices.
pub const WENDLAND_CENTERS: [[f64; 3]; 6] = [
    [1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, -1.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestFunction {
    /// `(x₁ + x₂ + x₃)²`.
    F1,
    /// `|x₁ + x₂ + x₃| + sin²(1 + |x₁ + x₂ + x₃|)`.
    F2,
    /// Franke function on the sphere.
    F3,
    /// Sum of six normalized Wendland functions of smoothness `sigma`.
    F4 { sigma: u32 },
}

impl TestFunction {
    pub fn f4(sigma: u32) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(TestFunction::F4 { sigma })
    }

    pub fn eval(&self, x: &SpherePoint) -> f64 {
        let [x1, x2, x3] = x.coords();
        match *self {
            TestFunction::F1 => {
                let s = x1 + x2 + x3;
                s * s
            }
            TestFunction::F2 => {
                let a = (x1 + x2 + x3).abs();
                let s = (1.0 + a).sin();
                a + s * s
            }
            TestFunction::F3 => franke(x1, x2, x3),
            TestFunction::F4 { sigma } => {
                let delta = wendland_delta_unchecked(sigma);
                WENDLAND_CENTERS
                    .iter()
                    .map(|z| {
                        let d = [z[0] - x1, z[1] - x2, z[2] - x3];
                        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                        wendland_tilde(sigma, r / delta)
                    })
                    .sum()
            }
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::F1 => f.write_str("f1"),
            TestFunction::F2 => f.write_str("f2"),
            TestFunction::F3 => f.write_str("f3"),
            TestFunction::F4 { sigma } => write!(f, "f4_{sigma}"),
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    /// Accepts `f1`, `f2`, `f3`, and `f4_<sigma>` (also `f4,<sigma>`).
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "f1" => Ok(TestFunction::F1),
            "f2" => Ok(TestFunction::F2),
            "f3" => Ok(TestFunction::F3),
            other => {
                let sigma = other
                    .strip_prefix("f4_")
                    .or_else(|| other.strip_prefix("f4,"))
                    .and_then(|v| v.parse::<u32>().ok())
                    .ok_or_else(|| Error::InvalidInput(format!("unknown test function {s:?}")))?;
                TestFunction::f4(sigma)
            }
        }
    }
}

// The second term's y and z arguments enter linearly, not squared.
fn franke(x1: f64, x2: f64, x3: f64) -> f64 {
    let (a, b, c) = (9.0 * x1, 9.0 * x2, 9.0 * x3);
    0.75 * (-((a - 2.0).powi(2)) / 4.0 - (b - 2.0).powi(2) / 4.0 - (c - 2.0).powi(2) / 4.0).exp()
        + 0.75 * (-((a + 1.0).powi(2)) / 49.0 - (b + 1.0) / 10.0 - (c + 1.0) / 10.0).exp()
        + 0.5 * (-((a - 7.0).powi(2)) / 4.0 - (b - 3.0).powi(2) / 4.0 - (c - 5.0).powi(2) / 4.0).exp()
        - 0.2 * (-((a - 4.0).powi(2)) - (b - 7.0).powi(2) - (c - 5.0).powi(2)).exp()
}

fn check_sigma(sigma: u32) -> Result<()> {
    if sigma > MAX_SIGMA {
        return Err(Error::SigmaOutOfRange(sigma));
    }
    Ok(())
}

/// Support radius `δ_σ = 3(σ+1)Γ(σ+½) / (2Γ(σ+1))`.
///
/// Uses `Γ(σ+½) = (2σ)! √π / (4^σ σ!)`, so only the final `√π` is inexact.
pub fn wendland_delta(sigma: u32) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(wendland_delta_unchecked(sigma))
}

fn wendland_delta_unchecked(sigma: u32) -> f64 {
    let s = sigma as u64;
    let fact = |k: u64| (1..=k).product::<u64>();
    // δ_σ / √π = 3(σ+1)(2σ)! / (2 · 4^σ · σ!²) as an exact fraction
    let num = 3 * (s + 1) * fact(2 * s);
    let den = 2 * 4u64.pow(sigma) * fact(s) * fact(s);
    num as f64 / den as f64 * PI.sqrt()
}

/// Original (unscaled) Wendland function `φ̃_σ(r)`, zero for `r ≥ 1`.
pub fn wendland_tilde(sigma: u32, r: f64) -> f64 {
    let t = (1.0 - r).max(0.0);
    if t == 0.0 {
        return 0.0;
    }
    match sigma {
        0 => t * t,
        1 => t.powi(4) * (4.0 * r + 1.0),
        2 => t.powi(6) * (35.0 * r * r + 18.0 * r + 3.0) / 3.0,
        3 => t.powi(8) * (((32.0 * r + 25.0) * r + 8.0) * r + 1.0),
        4 => t.powi(10) * ((((429.0 * r + 450.0) * r + 210.0) * r + 50.0) * r + 5.0) / 5.0,
        _ => unreachable!("sigma validated by callers"),
    }
}

/// Normalized Wendland function `φ_σ(r) = φ̃_σ(r / δ_σ)`.
pub fn wendland_phi(sigma: u32, r: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if r < 0.0 {
        return Err(Error::InvalidInput(format!("negative radius {r}")));
    }
    Ok(wendland_tilde(sigma, r / wendland_delta_unchecked(sigma)))
}
