//! Real spherical harmonics on S², Legendre polynomials and the reproducing kernel
//! of the space of spherical polynomials of degree at most `n`.
//!
//! The basis is orthonormal with respect to the unnormalized surface measure, so
//! `∫ Y² dω = 1` and the surface area is `4π`. Within each degree `ℓ` the
//! `2ℓ + 1` functions are ordered as
//!
//! ```text
//! k = 1        m = 0
//! k = 2m       √2 · p_ℓ^m(cos θ) · cos(mφ)
//! k = 2m + 1   √2 · p_ℓ^m(cos θ) · sin(mφ)
//! ```
//!
//! where `p_ℓ^m` are fully normalized associated Legendre functions. Degrees are
//! laid out one after the other, so `(ℓ, k)` sits at flat index `ℓ² + k − 1`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Surface area of the unit 2-sphere.
pub const SPHERE_AREA: f64 = 4.0 * PI;

/// A point on the unit sphere in Cartesian coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint([f64; 3]);

impl SpherePoint {
    /// Builds a point from any nonzero finite vector by normalizing it.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::DegeneratePoint([x, y, z]));
        }
        Ok(Self([x / norm, y / norm, z / norm]))
    }

    /// Point with colatitude `theta ∈ [0, π]` and azimuth `phi`.
    pub fn from_polar(theta: f64, phi: f64) -> Self {
        let s = theta.sin();
        Self([s * phi.cos(), s * phi.sin(), theta.cos()])
    }

    pub const NORTH_POLE: Self = Self([0.0, 0.0, 1.0]);
    pub const SOUTH_POLE: Self = Self([0.0, 0.0, -1.0]);

    pub fn coords(&self) -> [f64; 3] {
        self.0
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    /// Euclidean (chordal) distance in R³.
    pub fn chordal_distance(&self, other: &SpherePoint) -> f64 {
        let d = [
            self.0[0] - other.0[0],
            self.0[1] - other.0[1],
            self.0[2] - other.0[2],
        ];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    /// Great-circle distance.
    pub fn geodesic_distance(&self, other: &SpherePoint) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }
}

/// Position of a harmonic `Y_{ℓ,k}` within a degree-`n` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    pub ell: usize,
    /// One-based order index, `1 ≤ k ≤ 2ℓ + 1`.
    pub k: usize,
}

impl BasisIndex {
    pub fn new(ell: usize, k: usize) -> Result<Self> {
        if k == 0 || k > 2 * ell + 1 {
            return Err(Error::InvalidInput(format!(
                "order index k = {k} out of range 1..={} for degree {ell}",
                2 * ell + 1
            )));
        }
        Ok(Self { ell, k })
    }

    /// Flat position in the canonical ordering.
    pub fn flat(&self) -> usize {
        self.ell * self.ell + self.k - 1
    }

    /// Inverse of [`BasisIndex::flat`].
    pub fn from_flat(i: usize) -> Self {
        let ell = (i as f64).sqrt() as usize;
        // guard against rounding in the square root
        let ell = if (ell + 1) * (ell + 1) <= i {
            ell + 1
        } else if ell * ell > i {
            ell - 1
        } else {
            ell
        };
        Self {
            ell,
            k: i - ell * ell + 1,
        }
    }
}

/// Dimension `Z(d, ℓ)` of the space of degree-`ℓ` spherical harmonics on `S^d`.
///
/// Computed in integer arithmetic as the number of homogeneous harmonic
/// polynomials, `C(ℓ+d, d) − C(ℓ+d−2, d)`.
pub fn dim_harmonics(d: u32, ell: usize) -> Result<u64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if ell == 0 {
        return Ok(1);
    }
    let d = d as u128;
    let l = ell as u128;
    let total = binomial(l + d, d) - if l >= 2 { binomial(l + d - 2, d) } else { 0 };
    u64::try_from(total).map_err(|_| Error::InvalidInput(format!("Z({d}, {ell}) overflows u64")))
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    // exact at every step: the running product is C(n-k+i, i)
    (1..=k).fold(1u128, |acc, i| acc * (n - k + i) / i)
}

/// Eigenvalue `ℓ(ℓ + d − 1)` of the negative Laplace–Beltrami operator.
pub fn lb_eigenvalue(d: u32, ell: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok((ell * (ell + d as usize - 1)) as f64)
}

/// Legendre polynomial `P_ℓ(t)` normalized so that `P_ℓ(1) = 1`.
pub fn legendre_normalized(ell: usize, t: f64) -> Result<f64> {
    check_interval(t)?;
    if t == 1.0 {
        return Ok(1.0);
    }
    let t = t.clamp(-1.0, 1.0);
    let (mut prev, mut cur) = (1.0, t);
    if ell == 0 {
        return Ok(prev);
    }
    for j in 2..=ell {
        let jf = j as f64;
        let next = ((2.0 * jf - 1.0) * t * cur - (jf - 1.0) * prev) / jf;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

fn check_interval(t: f64) -> Result<()> {
    if !(t.abs() <= 1.0 + 1e-12) {
        return Err(Error::OutsideInterval { t });
    }
    Ok(())
}

/// Real orthonormal basis of spherical polynomials of degree at most `n` on S².
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarmonicBasis {
    n: usize,
}

impl HarmonicBasis {
    /// Sphere dimension. Numerics are implemented for S² only.
    pub const D: u32 = 2;

    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// `(n + 1)²`.
    pub fn dim(&self) -> usize {
        (self.n + 1) * (self.n + 1)
    }

    pub fn indices(&self) -> impl Iterator<Item = BasisIndex> {
        (0..self.dim()).map(BasisIndex::from_flat)
    }

    pub fn eval(&self, x: &SpherePoint) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(x, &mut out);
        out
    }

    /// Writes every `Y_{ℓ,k}(x)`, `ℓ ≤ n`, into `out` in canonical order.
    ///
    /// # Panics
    /// If `out.len() != self.dim()`.
    pub fn eval_into(&self, x: &SpherePoint, out: &mut [f64]) {
        assert_eq!(out.len(), self.dim(), "basis buffer has the wrong length");
        let n = self.n;
        let [px, py, pz] = x.coords();
        let ct = pz.clamp(-1.0, 1.0);
        let st = (px * px + py * py).sqrt();
        let (cphi, sphi) = if st > 0.0 { (px / st, py / st) } else { (1.0, 0.0) };

        let mut pmm = 1.0 / SPHERE_AREA.sqrt();
        // cos(mφ), sin(mφ)
        let (mut cm, mut sm) = (1.0, 0.0);
        for m in 0..=n {
            if m > 0 {
                let mf = m as f64;
                pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * st;
                let c_next = cm * cphi - sm * sphi;
                sm = sm * cphi + cm * sphi;
                cm = c_next;
            }
            let mf = m as f64;
            let (mut p_prev, mut p) = (0.0, pmm);
            for ell in m..=n {
                if ell == m + 1 {
                    p_prev = p;
                    p *= (2.0 * mf + 3.0).sqrt() * ct;
                } else if ell > m + 1 {
                    let lf = ell as f64;
                    let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                    let l1 = lf - 1.0;
                    let b = ((l1 * l1 - mf * mf) / (4.0 * l1 * l1 - 1.0)).sqrt();
                    let next = a * (ct * p - b * p_prev);
                    p_prev = p;
                    p = next;
                }
                let base = ell * ell;
                if m == 0 {
                    out[base] = p;
                } else {
                    out[base + 2 * m - 1] = std::f64::consts::SQRT_2 * p * cm;
                    out[base + 2 * m] = std::f64::consts::SQRT_2 * p * sm;
                }
            }
        }
    }
}

/// All `Y_{ℓ,k}(x)` for `ℓ ≤ n`, length `(n + 1)²`.
pub fn eval_basis(n: usize, x: &SpherePoint) -> Vec<f64> {
    HarmonicBasis::new(n).eval(x)
}

/// Reproducing kernel `G_n(x, y) = Σ_{ℓ≤n} (2ℓ+1)/(4π) P_ℓ(x·y)`.
///
/// Evaluated through the addition theorem in `O(n)` operations.
pub fn kernel_eval(n: usize, x: &SpherePoint, y: &SpherePoint) -> f64 {
    kernel_from_dot(n, x.dot(y).clamp(-1.0, 1.0))
}

pub(crate) fn kernel_from_dot(n: usize, t: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, t);
    let mut sum = 1.0;
    if n >= 1 {
        sum += 3.0 * t;
    }
    for j in 2..=n {
        let jf = j as f64;
        let next = ((2.0 * jf - 1.0) * t * cur - (jf - 1.0) * prev) / jf;
        prev = cur;
        cur = next;
        sum += (2.0 * jf + 1.0) * cur;
    }
    sum / SPHERE_AREA
}
