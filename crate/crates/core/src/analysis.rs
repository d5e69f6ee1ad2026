//! Error norms, Sobolev diagnostics and log-log rate fits.

use crate::error::{Error, Result};
use crate::harmonics::{lb_eigenvalue, BasisIndex, HarmonicBasis, SpherePoint};
use crate::hyperinterp::{fit_samples, Hyperinterpolant};
use crate::pointsets::{equal_area, QuadratureRule};
use crate::quadrature::{exactness_degree, DEFAULT_EXACTNESS_TOL};

/// `‖g − h‖_{L²}` computed with a reference rule.
///
/// Exact when `(g − h)²` is a polynomial within the rule's exactness degree.
pub fn l2_error(
    g: impl Fn(&SpherePoint) -> f64,
    h: impl Fn(&SpherePoint) -> f64,
    reference: &QuadratureRule,
) -> f64 {
    reference
        .iter()
        .map(|(p, w)| {
            let d = g(p) - h(p);
            w * d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Sobolev weights `a_ℓ = (1 + λ_ℓ)^{−s}` with `λ_ℓ = ℓ(ℓ + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolevWeights {
    s: f64,
    a: Vec<f64>,
}

impl SobolevWeights {
    pub fn new(s: f64, max_degree: usize) -> Result<Self> {
        if !(s >= 0.0) {
            return Err(Error::InvalidInput(format!("smoothness s = {s} must be nonnegative")));
        }
        let a = (0..=max_degree)
            .map(|ell| Ok((1.0 + lb_eigenvalue(HarmonicBasis::D, ell)?).powf(-s)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { s, a })
    }

    pub fn smoothness(&self) -> f64 {
        self.s
    }

    pub fn get(&self, ell: usize) -> f64 {
        self.a[ell]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }
}

/// `(Σ_{ℓ,k} |f̂_{ℓ,k}|² / a_ℓ)^{1/2}` for coefficients in canonical order.
pub fn sobolev_norm(coeffs: &[f64], s: f64) -> Result<f64> {
    let n = (coeffs.len() as f64).sqrt() as usize;
    if n == 0 || n * n != coeffs.len() {
        return Err(Error::InvalidInput(format!(
            "{} coefficients do not form complete degrees",
            coeffs.len()
        )));
    }
    let weights = SobolevWeights::new(s, n - 1)?;
    Ok(coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * c / weights.get(BasisIndex::from_flat(i).ell))
        .sum::<f64>()
        .sqrt())
}

/// `max |f|` over an equal-area grid of `grid_size` points.
///
/// This is a lower bound on `‖f‖_∞`.
pub fn uniform_norm_estimate(f: impl Fn(&SpherePoint) -> f64, grid_size: usize) -> Result<f64> {
    if grid_size < 1000 {
        return Err(Error::InvalidInput(format!(
            "grid of {grid_size} points is too coarse for a sup-norm estimate (need >= 1000)"
        )));
    }
    Ok(equal_area(grid_size)?
        .iter()
        .fold(0.0f64, |m, p| m.max(f(p).abs())))
}

/// The larger of the estimates on `grid_size` and `4 · grid_size` points.
pub fn uniform_norm_refined(f: impl Fn(&SpherePoint) -> f64, grid_size: usize) -> Result<f64> {
    let coarse = uniform_norm_estimate(&f, grid_size)?;
    let fine = uniform_norm_estimate(&f, 4 * grid_size)?;
    Ok(coarse.max(fine))
}

/// Least-squares line through `(log size, log error)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

pub fn fit_rate(samples: &[(f64, f64)]) -> Result<RateFit> {
    if samples.len() < 2 {
        return Err(Error::InvalidInput("a rate fit needs at least two samples".into()));
    }
    if let Some(&(s, e)) = samples.iter().find(|(s, e)| !(*s > 0.0 && *e > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "rate samples must be positive, got ({s}, {e})"
        )));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(s, e)| (s.ln(), e.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("rate samples need at least two distinct sizes".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    // a perfectly flat series is fit exactly
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        n_points: pts.len(),
    })
}

/// `‖fg‖_{H^s} / (‖f‖_{H^s} ‖g‖_{H^s})` for two degree-`n` polynomials.
///
/// The product has degree `2n`; its coefficients come from the reference rule,
/// which must be exact to degree `4n`.
pub fn banach_algebra_diagnostic(
    f: &Hyperinterpolant,
    g: &Hyperinterpolant,
    s: f64,
    reference: &QuadratureRule,
) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::InvalidInput(format!("need s > d/2 = 1, got {s}")));
    }
    if f.degree() != g.degree() {
        return Err(Error::SizeMismatch {
            expected: f.coeffs().len(),
            got: g.coeffs().len(),
        });
    }
    let n = f.degree();
    let required = 4 * n;
    let report = exactness_degree(reference, required, DEFAULT_EXACTNESS_TOL);
    match report.degree {
        Some(d) if d >= required => {}
        other => {
            return Err(Error::InsufficientExactness {
                required,
                got: other.unwrap_or(0),
            })
        }
    }
    let fv = f.evaluate_many(reference.points());
    let gv = g.evaluate_many(reference.points());
    let product: Vec<f64> = fv.iter().zip(&gv).map(|(a, b)| a * b).collect();
    let fg = fit_samples(reference, &product, 2 * n)?;
    Ok(sobolev_norm(fg.coeffs(), s)? / (sobolev_norm(f.coeffs(), s)? * sobolev_norm(g.coeffs(), s)?))
}
