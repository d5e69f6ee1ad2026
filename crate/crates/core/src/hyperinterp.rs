//! Hyperinterpolation: discrete Fourier coefficients from a quadrature rule.
//!
//! The classical, unfettered and QMC variants are the same construction; they
//! differ only in which rule supplies the coefficients. A rule with exactness
//! degree `2n` gives the classical operator, a rule with Marcinkiewicz–Zygmund
//! constant `η < 1` the unfettered one, and an equal-weight QMC design the QMC one.

use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harmonics::{kernel_from_dot, BasisIndex, HarmonicBasis, SpherePoint, SPHERE_AREA};
use crate::pointsets::{Provenance, QuadratureRule};
use crate::quadrature::{exactness_degree, group_ranges, mz_constant, DEFAULT_EXACTNESS_TOL};

/// A degree-`n` spherical polynomial given by its coefficients in the
/// canonical harmonic basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperinterpolant {
    n: usize,
    coeffs: Vec<f64>,
    provenance: Provenance,
    eta_used: Option<f64>,
}

impl Hyperinterpolant {
    /// Wraps an explicit coefficient vector of length `(n + 1)²`.
    pub fn from_coeffs(n: usize, coeffs: Vec<f64>, provenance: Provenance) -> Result<Self> {
        let dim = HarmonicBasis::new(n).dim();
        if coeffs.len() != dim {
            return Err(Error::SizeMismatch {
                expected: dim,
                got: coeffs.len(),
            });
        }
        Ok(Self {
            n,
            coeffs,
            provenance,
            eta_used: None,
        })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, idx: BasisIndex) -> f64 {
        self.coeffs[idx.flat()]
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `η` of the rule, when the fit was audited.
    pub fn eta_used(&self) -> Option<f64> {
        self.eta_used
    }

    /// `Σ α_{ℓ,k} Y_{ℓ,k}(x)`.
    pub fn evaluate(&self, x: &SpherePoint) -> f64 {
        let y = HarmonicBasis::new(self.n).eval(x);
        y.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum()
    }

    /// Evaluates many points, reusing one basis buffer per thread.
    pub fn evaluate_many(&self, xs: &[SpherePoint]) -> Vec<f64> {
        let basis = HarmonicBasis::new(self.n);
        xs.par_iter()
            .map_init(
                || vec![0.0; basis.dim()],
                |y, x| {
                    basis.eval_into(x, y);
                    y.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum()
                },
            )
            .collect()
    }

    /// `‖·‖_{L²}`, which is the Euclidean norm of the coefficients.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `(ℓ, k, coefficient)` CSV with 17 significant digits.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "ell,k,coeff")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            let idx = BasisIndex::from_flat(i);
            writeln!(w, "{},{},{:.16e}", idx.ell, idx.k, c)?;
        }
        Ok(())
    }

    /// Reads the format written by [`Hyperinterpolant::write_csv`].
    pub fn read_csv(r: impl BufRead, provenance: Provenance) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: "<coefficients>".into(),
            line,
            message,
        };
        let mut coeffs = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: "<coefficients>".into(),
                source,
            })?;
            if i == 0 {
                if line.trim() != "ell,k,coeff" {
                    return Err(parse_err(1, format!("unexpected header {line:?}")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(parse_err(i + 1, "expected ell,k,coeff".into()));
            }
            let ell: usize = fields[0]
                .trim()
                .parse()
                .map_err(|_| parse_err(i + 1, format!("bad degree {:?}", fields[0])))?;
            let k: usize = fields[1]
                .trim()
                .parse()
                .map_err(|_| parse_err(i + 1, format!("bad order {:?}", fields[1])))?;
            let value: f64 = fields[2]
                .trim()
                .parse()
                .map_err(|_| parse_err(i + 1, format!("bad value {:?}", fields[2])))?;
            let idx = BasisIndex::new(ell, k).map_err(|e| parse_err(i + 1, e.to_string()))?;
            if idx.flat() != coeffs.len() {
                return Err(parse_err(i + 1, format!("({ell},{k}) out of canonical order")));
            }
            coeffs.push(value);
        }
        let n = (coeffs.len() as f64).sqrt() as usize;
        if n == 0 || (n * n) != coeffs.len() {
            return Err(parse_err(0, format!("{} coefficients is not a square", coeffs.len())));
        }
        Self::from_coeffs(n - 1, coeffs, provenance)
    }
}

/// `α_{ℓ,k} = Σ_j w_j y_j Y_{ℓ,k}(x_j)` from sampled values `y_j = f(x_j)`.
///
/// No exactness or Marcinkiewicz–Zygmund condition is checked; see [`fit_audited`].
pub fn fit_samples(rule: &QuadratureRule, values: &[f64], n: usize) -> Result<Hyperinterpolant> {
    if values.len() != rule.len() {
        return Err(Error::SizeMismatch {
            expected: rule.len(),
            got: values.len(),
        });
    }
    let basis = HarmonicBasis::new(n);
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
                let s = weights[j] * values[j];
                acc.iter_mut().zip(&y).for_each(|(a, v)| *a += s * v);
            }
            acc
        })
        .collect();
    let mut coeffs = vec![0.0; dim];
    for p in &partials {
        coeffs.iter_mut().zip(p).for_each(|(a, v)| *a += v);
    }
    Hyperinterpolant::from_coeffs(n, coeffs, rule.provenance())
}

/// Hyperinterpolant of `f` of degree `n` with respect to `rule`.
pub fn fit(
    rule: &QuadratureRule,
    f: impl Fn(&SpherePoint) -> f64 + Sync,
    n: usize,
) -> Result<Hyperinterpolant> {
    let values: Vec<f64> = rule.points().par_iter().map(&f).collect();
    fit_samples(rule, &values, n)
}

/// Computes `η` first and refuses rules whose Gram matrix is rank deficient or
/// has `η ≥ 1`; the returned hyperinterpolant records `η`.
pub fn fit_audited(rule: &QuadratureRule, values: &[f64], n: usize) -> Result<Hyperinterpolant> {
    let report = mz_constant(rule, n)?;
    if !report.is_usable() {
        return Err(Error::RankDeficient {
            n,
            lambda_min: report.lambda_min,
            eta: report.eta,
        });
    }
    let mut h = fit_samples(rule, values, n)?;
    h.eta_used = Some(report.eta);
    Ok(h)
}

/// Kernel form `Σ_j w_j y_j G_n(x, x_j)` of the same hyperinterpolant.
pub fn evaluate_kernel(rule: &QuadratureRule, values: &[f64], n: usize, x: &SpherePoint) -> Result<f64> {
    if values.len() != rule.len() {
        return Err(Error::SizeMismatch {
            expected: rule.len(),
            got: values.len(),
        });
    }
    Ok(rule
        .iter()
        .zip(values)
        .map(|((p, w), y)| w * y * kernel_from_dot(n, x.dot(p).clamp(-1.0, 1.0)))
        .sum())
}

/// Degree-`n` L²-orthogonal projection, with Fourier coefficients computed by
/// a high-exactness reference rule.
///
/// Refuses references that are not exact at least to degree `n + 1`.
pub fn project_reference(
    f: impl Fn(&SpherePoint) -> f64 + Sync,
    n: usize,
    reference: &QuadratureRule,
) -> Result<Hyperinterpolant> {
    let report = exactness_degree(reference, n + 1, DEFAULT_EXACTNESS_TOL);
    let got = report.degree.unwrap_or(0);
    if report.degree.is_none() || got < n + 1 {
        return Err(Error::InsufficientExactness {
            required: n + 1,
            got,
        });
    }
    fit(reference, f, n)
}

/// `1/√(4π)`, the value of the constant harmonic.
pub fn constant_harmonic() -> f64 {
    1.0 / SPHERE_AREA.sqrt()
}
