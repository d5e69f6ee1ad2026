//! Node sets on S² and positive-weight quadrature rules built from them.
//!
//! Every rule produced here has weights summing to `4π`, so constants are
//! integrated exactly.

use std::f64::consts::PI;
use std::fmt;
use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::harmonics::{SpherePoint, SPHERE_AREA};

/// Where the nodes of a rule came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Random,
    EqualArea,
    GaussProduct,
    Loaded,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Random => "random",
            Provenance::EqualArea => "equal_area",
            Provenance::GaussProduct => "gauss_product",
            Provenance::Loaded => "loaded",
        })
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Provenance::Random),
            "equal_area" | "equal-area" => Ok(Provenance::EqualArea),
            "gauss_product" | "gauss-product" => Ok(Provenance::GaussProduct),
            "loaded" => Ok(Provenance::Loaded),
            other => Err(Error::InvalidInput(format!("unknown provenance {other:?}"))),
        }
    }
}

/// Nodes `x_j` with strictly positive weights `w_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    points: Vec<SpherePoint>,
    weights: Vec<f64>,
    provenance: Provenance,
}

impl QuadratureRule {
    pub fn new(points: Vec<SpherePoint>, weights: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        if points.len() != weights.len() {
            return Err(Error::SizeMismatch {
                expected: points.len(),
                got: weights.len(),
            });
        }
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(**w > 0.0 && w.is_finite()))
        {
            return Err(Error::NonPositiveWeight { index, value });
        }
        Ok(Self {
            points,
            weights,
            provenance,
        })
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Same nodes with every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.points.clone(),
            self.weights.iter().map(|w| w * factor).collect(),
            self.provenance,
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SpherePoint, f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

/// `m` i.i.d. uniform points: elevation `asin(2u − 1)`, azimuth `2πu′`.
///
/// Uses ChaCha20 seeded from `seed`, so the output is identical on every platform.
pub fn random_uniform(m: usize, seed: u64) -> Result<Vec<SpherePoint>> {
    if m == 0 {
        return Err(Error::EmptyPointSet);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(m);
    for _ in 0..m {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        let elevation = (2.0 * u - 1.0).asin();
        let azimuth = 2.0 * PI * v;
        let ce = elevation.cos();
        // already unit length up to rounding; normalize for the 1e-12 contract
        pts.push(SpherePoint::new(
            ce * azimuth.cos(),
            ce * azimuth.sin(),
            elevation.sin(),
        )?);
    }
    Ok(pts)
}

/// Recursive zonal equal-area partition of S² into `m` cells.
///
/// The partition consists of two polar caps and a sequence of collars, each
/// collar split into equal-area cells.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualAreaPartition {
    /// Colatitude of the lower boundary of every zone, north cap first; the
    /// last entry is `π`.
    pub zone_boundaries: Vec<f64>,
    /// Number of cells in every zone, caps included.
    pub cells_per_zone: Vec<usize>,
}

impl EqualAreaPartition {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyPointSet);
        }
        if m == 1 {
            return Ok(Self {
                zone_boundaries: vec![PI],
                cells_per_zone: vec![1],
            });
        }
        let cell_area = SPHERE_AREA / m as f64;
        let cap = polar_cap_colatitude(m);
        if m == 2 {
            return Ok(Self {
                zone_boundaries: vec![cap, PI],
                cells_per_zone: vec![1, 1],
            });
        }
        let ideal_angle = cell_area.sqrt();
        let n_collars = (((PI - 2.0 * cap) / ideal_angle).round() as usize).max(1);
        let collar_angle = (PI - 2.0 * cap) / n_collars as f64;

        // ideal (fractional) cell counts per collar, then rounded so that the
        // running discrepancy stays below one half
        let mut cells = Vec::with_capacity(n_collars + 2);
        cells.push(1);
        let mut discrepancy = 0.0;
        for i in 1..=n_collars {
            let top = cap + (i - 1) as f64 * collar_angle;
            let bottom = cap + i as f64 * collar_angle;
            let ideal = (cap_area(bottom) - cap_area(top)) / cell_area;
            let rounded = (ideal + discrepancy).round();
            discrepancy += ideal - rounded;
            cells.push(rounded as usize);
        }
        cells.push(1);

        let mut boundaries = Vec::with_capacity(cells.len());
        let mut subtotal = 0usize;
        for &c in &cells[..cells.len() - 1] {
            subtotal += c;
            boundaries.push(cap_colatitude(subtotal as f64 * cell_area));
        }
        boundaries.push(PI);
        Ok(Self {
            zone_boundaries: boundaries,
            cells_per_zone: cells,
        })
    }

    pub fn len(&self) -> usize {
        self.cells_per_zone.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Area of every zone, computed from its boundary colatitudes.
    pub fn zone_areas(&self) -> Vec<f64> {
        let mut top = 0.0;
        self.zone_boundaries
            .iter()
            .map(|&bottom| {
                let a = cap_area(bottom) - cap_area(top);
                top = bottom;
                a
            })
            .collect()
    }

    /// Cell centers: poles for the caps, mid-colatitude for collar cells,
    /// with the azimuthal offset between consecutive collars.
    pub fn centers(&self) -> Vec<SpherePoint> {
        let zones = self.cells_per_zone.len();
        if zones == 1 {
            return vec![SpherePoint::NORTH_POLE];
        }
        let mut out = Vec::with_capacity(self.len());
        out.push(SpherePoint::NORTH_POLE);
        let mut offset = 0.0f64;
        for zone in 1..zones - 1 {
            let top = self.zone_boundaries[zone - 1];
            let bottom = self.zone_boundaries[zone];
            let theta = 0.5 * (top + bottom);
            let n_here = self.cells_per_zone[zone];
            for j in 0..n_here {
                let phi = ((j as f64 + 0.5) / n_here as f64 + offset) * 2.0 * PI;
                out.push(SpherePoint::from_polar(theta, phi.rem_euclid(2.0 * PI)));
            }
            offset += circle_offset(n_here, self.cells_per_zone[zone + 1]);
            offset -= offset.floor();
        }
        out.push(SpherePoint::SOUTH_POLE);
        out
    }
}

fn cap_area(colatitude: f64) -> f64 {
    let h = (0.5 * colatitude).sin();
    SPHERE_AREA * h * h
}

fn cap_colatitude(area: f64) -> f64 {
    2.0 * (area / SPHERE_AREA).sqrt().min(1.0).asin()
}

fn polar_cap_colatitude(m: usize) -> f64 {
    cap_colatitude(SPHERE_AREA / m as f64)
}

// Rotation (in turns) between a collar with `top` cells and the next one with
// `bottom` cells that maximizes the minimum distance between their centers.
fn circle_offset(top: usize, bottom: usize) -> f64 {
    let (t, b) = (top as f64, bottom as f64);
    (1.0 / b - 1.0 / t) / 2.0 + gcd(top, bottom) as f64 / (2.0 * t * b)
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Centers of the `m`-cell recursive zonal equal-area partition.
pub fn equal_area(m: usize) -> Result<Vec<SpherePoint>> {
    Ok(EqualAreaPartition::new(m)?.centers())
}

/// Contents of a point file.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFile {
    pub points: Vec<SpherePoint>,
    pub weights: Option<Vec<f64>>,
}

impl PointFile {
    /// File weights when present, otherwise equal weights `4π/m`.
    pub fn into_rule(self) -> Result<QuadratureRule> {
        match self.weights {
            Some(w) => QuadratureRule::new(self.points, w, Provenance::Loaded),
            None => equal_weight_rule(self.points, Provenance::Loaded),
        }
    }
}

/// Norm deviation beyond which a row is rejected rather than renormalized.
pub const LOAD_NORM_TOL: f64 = 1e-6;

/// Reads a point file: one point per line, `x y z` or `x y z w`, `#` comments.
///
/// With `expect_weights` every row must carry a weight.
pub fn load_pointset(path: impl AsRef<Path>, expect_weights: bool) -> Result<PointFile> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_pointset(std::io::BufReader::new(file), path, expect_weights)
}

/// Same as [`load_pointset`] for an already opened reader; `origin` is used in errors.
pub fn parse_pointset(
    reader: impl BufRead,
    origin: impl AsRef<Path>,
    expect_weights: bool,
) -> Result<PointFile> {
    let origin: PathBuf = origin.as_ref().to_owned();
    let err = |line: usize, message: String| Error::Parse {
        path: origin.clone(),
        line,
        message,
    };
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut columns: Option<usize> = None;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|source| Error::Io {
            path: origin.clone(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields = trimmed
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| err(lineno, format!("cannot parse {tok:?} as a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        match fields.len() {
            3 | 4 => {}
            k => return Err(err(lineno, format!("expected 3 or 4 columns, found {k}"))),
        }
        match columns {
            None => columns = Some(fields.len()),
            Some(c) if c != fields.len() => {
                return Err(err(
                    lineno,
                    format!("found {} columns after earlier rows with {c}", fields.len()),
                ))
            }
            _ => {}
        }
        if expect_weights && fields.len() != 4 {
            return Err(err(lineno, "weights expected but row has 3 columns".into()));
        }
        let norm = (fields[0] * fields[0] + fields[1] * fields[1] + fields[2] * fields[2]).sqrt();
        if (norm - 1.0).abs() > LOAD_NORM_TOL {
            return Err(err(
                lineno,
                format!("point norm {norm:.9} deviates from 1 by more than {LOAD_NORM_TOL:e}"),
            ));
        }
        points.push(SpherePoint::new(fields[0], fields[1], fields[2])?);
        if let Some(&w) = fields.get(3) {
            if w <= 0.0 {
                return Err(err(lineno, format!("weight {w} is not positive")));
            }
            weights.push(w);
        }
    }
    if points.is_empty() {
        return Err(err(0, "file contains no points".into()));
    }
    let weights = (columns == Some(4)).then_some(weights);
    Ok(PointFile { points, weights })
}

/// Writes points (and weights, when given) in the point-file format.
pub fn write_pointset(
    mut w: impl std::io::Write,
    points: &[SpherePoint],
    weights: Option<&[f64]>,
) -> std::io::Result<()> {
    for (j, p) in points.iter().enumerate() {
        let [x, y, z] = p.coords();
        match weights {
            Some(ws) => writeln!(w, "{x:.17e} {y:.17e} {z:.17e} {:.17e}", ws[j])?,
            None => writeln!(w, "{x:.17e} {y:.17e} {z:.17e}")?,
        }
    }
    Ok(())
}

/// Equal weights `4π/m`.
pub fn equal_weight_rule(points: Vec<SpherePoint>, provenance: Provenance) -> Result<QuadratureRule> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let m = points.len();
    QuadratureRule::new(points, vec![SPHERE_AREA / m as f64; m], provenance)
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor rule: `order` Gauss–Legendre nodes in `cos θ` times `2·order`
/// equispaced azimuths. Exact for spherical polynomials of degree `≤ 2·order − 1`.
pub fn product_gauss_rule(order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::InvalidInput("product rule order must be at least 1".into()));
    }
    let (nodes, gl_weights) = gauss_legendre(order);
    let n_phi = 2 * order;
    let dphi = 2.0 * PI / n_phi as f64;
    let mut points = Vec::with_capacity(order * n_phi);
    let mut weights = Vec::with_capacity(order * n_phi);
    for (&t, &w) in nodes.iter().zip(&gl_weights) {
        let s = (1.0 - t * t).max(0.0).sqrt();
        for k in 0..n_phi {
            let phi = k as f64 * dphi;
            points.push(SpherePoint::new(s * phi.cos(), s * phi.sin(), t)?);
            weights.push(w * dphi);
        }
    }
    QuadratureRule::new(points, weights, Provenance::GaussProduct)
}
