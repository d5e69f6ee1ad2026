//! Applying rules, measuring exactness, and the Marcinkiewicz–Zygmund constant.
//!
//! For a rule `{(w_j, x_j)}` and degree `n`, the discrete Gram matrix
//! `G = Σ_j w_j Y(x_j) Y(x_j)ᵀ` represents the discrete inner product on the
//! coefficient space. Since `Σ_j w_j χ(x_j)² = αᵀGα` and `∫ χ² dω = αᵀα` for
//! `χ = Σ α_i Y_i`, the smallest `η` with
//! `|Σ_j w_j χ(x_j)² − ∫ χ²| ≤ η ∫ χ²` on all of `P_n` is `‖G − I‖₂`.

use std::ops::Range;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harmonics::{HarmonicBasis, SpherePoint, SPHERE_AREA};
use crate::pointsets::QuadratureRule;

/// Gram matrices with `λ_min` at or below this are reported as rank deficient.
pub const RANK_TOL: f64 = 1e-10;
/// Default tolerance for [`exactness_degree`].
pub const DEFAULT_EXACTNESS_TOL: f64 = 1e-8;

const MAX_GROUPS: usize = 64;
const BLOCK: usize = 256;

/// Splits `0..m` into at most [`MAX_GROUPS`] contiguous ranges.
///
/// The split depends only on `m`, so parallel reductions that combine the
/// groups in order are bit-reproducible regardless of the thread count.
pub(crate) fn group_ranges(m: usize) -> Vec<Range<usize>> {
    let size = m.div_ceil(MAX_GROUPS).max(BLOCK);
    (0..m).step_by(size).map(|s| s..(s + size).min(m)).collect()
}

/// `Σ_j w_j f(x_j)`.
pub fn apply(rule: &QuadratureRule, f: impl Fn(&SpherePoint) -> f64) -> f64 {
    rule.iter().map(|(p, w)| w * f(p)).sum()
}

/// [`apply`] for fallible integrands; stops at the first error.
pub fn try_apply<E>(
    rule: &QuadratureRule,
    f: impl Fn(&SpherePoint) -> std::result::Result<f64, E>,
) -> std::result::Result<f64, E> {
    let mut acc = 0.0;
    for (p, w) in rule.iter() {
        acc += w * f(p)?;
    }
    Ok(acc)
}

/// Discrete Gram matrix `⟨Y_i, Y_k⟩_m` of the degree-`n` basis.
pub fn gram_matrix(rule: &QuadratureRule, n: usize) -> DMatrix<f64> {
    let basis = HarmonicBasis::new(n);
    let dim = basis.dim();
    let points = rule.points();
    let weights = rule.weights();
    let partials: Vec<DMatrix<f64>> = group_ranges(rule.len())
        .into_par_iter()
        .map(|range| {
            let mut g = DMatrix::<f64>::zeros(dim, dim);
            let mut bt = DMatrix::<f64>::zeros(dim, BLOCK);
            for start in range.clone().step_by(BLOCK) {
                let end = (start + BLOCK).min(range.end);
                let cols = end - start;
                if cols != bt.ncols() {
                    bt = DMatrix::zeros(dim, cols);
                }
                for (c, j) in (start..end).enumerate() {
                    let mut col = bt.column_mut(c);
                    let slice = col.as_mut_slice();
                    basis.eval_into(&points[j], slice);
                    let s = weights[j].sqrt();
                    slice.iter_mut().for_each(|v| *v *= s);
                }
                g.gemm(1.0, &bt, &bt.transpose(), 1.0);
            }
            g
        })
        .collect();
    let mut g = DMatrix::<f64>::zeros(dim, dim);
    for p in &partials {
        g += p;
    }
    // exact symmetry for the eigensolver
    let gt = g.transpose();
    (g + gt) * 0.5
}

/// Marcinkiewicz–Zygmund certificate for a `(rule, n)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MzReport {
    pub n: usize,
    /// `max(|λ_min − 1|, |λ_max − 1|)`.
    pub eta: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub dim: usize,
    pub rank_deficient: bool,
}

impl MzReport {
    /// `η < 1` and the Gram matrix has full rank.
    pub fn is_usable(&self) -> bool {
        self.eta < 1.0 && !self.rank_deficient
    }

    pub fn from_extremes(n: usize, dim: usize, lambda_min: f64, lambda_max: f64) -> Self {
        Self {
            n,
            eta: (lambda_min - 1.0).abs().max((lambda_max - 1.0).abs()),
            lambda_min,
            lambda_max,
            dim,
            rank_deficient: lambda_min <= RANK_TOL,
        }
    }
}

/// Computes `η = ‖G − I‖₂` from the extreme eigenvalues of the Gram matrix.
pub fn mz_constant(rule: &QuadratureRule, n: usize) -> Result<MzReport> {
    if rule.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let g = gram_matrix(rule, n);
    let (lo, hi) = extreme_eigenvalues(g)?;
    Ok(MzReport::from_extremes(n, (n + 1) * (n + 1), lo, hi))
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn extreme_eigenvalues(g: DMatrix<f64>) -> Result<(f64, f64)> {
    let dim = g.nrows();
    if dim == 1 {
        return Ok((g[(0, 0)], g[(0, 0)]));
    }
    let eig = SymmetricEigen::try_new(g, f64::EPSILON, 0).ok_or(Error::EigenSolver { dim })?;
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Result of scanning a rule for polynomial exactness.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactnessReport {
    /// Largest `t` such that every degree `≤ t` passed; `None` if even the
    /// constants fail.
    pub degree: Option<usize>,
    /// `max_k |Σ_j w_j Y_{ℓ,k}(x_j) − ∫ Y_{ℓ,k} dω|` for every scanned `ℓ`.
    pub residuals: Vec<f64>,
    pub tol: f64,
}

/// Scans `ℓ = 0, 1, …, max_scan` and stops at the first degree whose worst
/// harmonic integrates with error above `tol`.
pub fn exactness_degree(rule: &QuadratureRule, max_scan: usize, tol: f64) -> ExactnessReport {
    let basis = HarmonicBasis::new(max_scan);
    let dim = basis.dim();
    let points = rule.points();
    let weights = rule.weights();
    let partials: Vec<Vec<f64>> = group_ranges(rule.len())
        .into_par_iter()
        .map(|range| {
            let mut acc = vec![0.0; dim];
            let mut y = vec![0.0; dim];
            for j in range {
                basis.eval_into(&points[j], &mut y);
                let w = weights[j];
                acc.iter_mut().zip(&y).for_each(|(a, v)| *a += w * v);
            }
            acc
        })
        .collect();
    let mut moments = vec![0.0; dim];
    for p in &partials {
        moments.iter_mut().zip(p).for_each(|(a, v)| *a += v);
    }
    // ∫ Y_{0,1} dω = √(4π); every other harmonic integrates to zero
    moments[0] -= SPHERE_AREA.sqrt();

    let mut residuals = Vec::with_capacity(max_scan + 1);
    let mut degree = None;
    for ell in 0..=max_scan {
        let r = moments[ell * ell..(ell + 1) * (ell + 1)]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        residuals.push(r);
        if r > tol {
            break;
        }
        degree = Some(ell);
    }
    ExactnessReport {
        degree,
        residuals,
        tol,
    }
}
