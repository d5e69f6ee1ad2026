//! Convergence sweeps over `(n, m, repetition)` cells.
//!
//! A sweep fits the hyperinterpolant of a test function for every degree `n`
//! and node count `m` of a configuration, measures the L² error against a
//! Gauss product reference rule and, optionally, the Marcinkiewicz–Zygmund
//! constant of the rule. Cells run in parallel; results are sorted before
//! they are returned, so output is reproducible from the configuration alone.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harmonics::SpherePoint;
use crate::hyperinterp::fit_samples;
use crate::pointsets::{
    equal_area, equal_weight_rule, load_pointset, product_gauss_rule, random_uniform, Provenance,
    QuadratureRule,
};
use crate::quadrature::mz_constant;
use crate::testfuncs::TestFunction;

/// Where the nodes of each cell come from.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSource {
    Random,
    EqualArea,
    /// `m` is rounded to the nearest product rule `2N²`.
    GaussProduct,
    /// One cell per file; the file size is `m` and the schedule is ignored.
    Files(Vec<PathBuf>),
}

impl PointSource {
    pub fn is_random(&self) -> bool {
        matches!(self, PointSource::Random)
    }
}

impl FromStr for PointSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "random" => Ok(PointSource::Random),
            "equal-area" | "equal_area" => Ok(PointSource::EqualArea),
            "gauss-product" | "gauss_product" => Ok(PointSource::GaussProduct),
            _ => match s.strip_prefix("files:") {
                Some(list) => {
                    let files: Vec<PathBuf> = list
                        .split(',')
                        .map(str::trim)
                        .filter(|p| !p.is_empty())
                        .map(PathBuf::from)
                        .collect();
                    if files.is_empty() {
                        return Err(Error::InvalidInput("files: needs at least one path".into()));
                    }
                    Ok(PointSource::Files(files))
                }
                None => Err(Error::InvalidInput(format!("unknown point source {s:?}"))),
            },
        }
    }
}

/// How the node count depends on the degree.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// The same list of `m` for every `n`.
    FixedList(Vec<usize>),
    /// `m = (n + 1)²`.
    Square,
    /// `m = ⌈(n + 1)² n^{2/s}⌉`, `s = σ + 3/2`.
    Growth { smoothness: f64 },
    /// `m = β ⌈(n + 1)² n^{2 + 2/s}⌉`, `s = σ + 3/2`.
    RateMatched { smoothness: f64, beta: usize },
}

impl Schedule {
    /// Canonical names accepted by [`Schedule::parse`].
    pub const NAMES: [&'static str; 4] = [
        "fixed-list",
        "(n+1)^2",
        "ceil((n+1)^2 * n^(2/(sigma+3/2)))",
        "beta * ceil((n+1)^2 * n^(2 + 2/(sigma+3/2)))",
    ];

    /// Parses a schedule formula; `sigma`, `beta` and `sizes` fill its parameters.
    pub fn parse(name: &str, sigma: f64, beta: usize, sizes: &[usize]) -> Result<Self> {
        let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
        let smoothness = sigma + 1.5;
        match compact.as_str() {
            "fixed-list" | "fixed" => {
                if sizes.is_empty() {
                    return Err(Error::InvalidInput("fixed-list schedule needs sizes".into()));
                }
                Ok(Schedule::FixedList(sizes.to_vec()))
            }
            "(n+1)^2" | "square" => Ok(Schedule::Square),
            "ceil((n+1)^2*n^(2/(sigma+3/2)))" | "growth" => Ok(Schedule::Growth { smoothness }),
            "beta*ceil((n+1)^2*n^(2+2/(sigma+3/2)))" | "rate-matched" => {
                if beta == 0 {
                    return Err(Error::InvalidInput("beta must be at least 1".into()));
                }
                Ok(Schedule::RateMatched { smoothness, beta })
            }
            _ => Err(Error::InvalidInput(format!(
                "unknown schedule {name:?}; registered: {}",
                Self::NAMES.join(" | ")
            ))),
        }
    }

    pub fn sizes_for(&self, n: usize) -> Vec<usize> {
        let sq = ((n + 1) * (n + 1)) as f64;
        let nf = n as f64;
        match self {
            Schedule::FixedList(v) => v.clone(),
            Schedule::Square => vec![(n + 1) * (n + 1)],
            Schedule::Growth { smoothness } => vec![(sq * nf.powf(2.0 / smoothness)).ceil() as usize],
            Schedule::RateMatched { smoothness, beta } => {
                vec![beta * (sq * nf.powf(2.0 + 2.0 / smoothness)).ceil() as usize]
            }
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::FixedList(_) => f.write_str(Self::NAMES[0]),
            Schedule::Square => f.write_str(Self::NAMES[1]),
            Schedule::Growth { .. } => f.write_str(Self::NAMES[2]),
            Schedule::RateMatched { .. } => f.write_str(Self::NAMES[3]),
        }
    }
}

/// A full sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub experiment: String,
    pub function: TestFunction,
    pub source: PointSource,
    pub degrees: Vec<usize>,
    pub schedule: Schedule,
    pub seed: u64,
    pub repetitions: usize,
    /// Gauss product order of the error-measuring reference rule; `None`
    /// picks `max(n + 11, 100)` so the rule is exact beyond degree `2n + 20`.
    pub reference_order: Option<usize>,
    pub compute_eta: bool,
    /// Allow `(n + 1)² > m`.
    pub force: bool,
}

impl SweepConfig {
    pub fn new(experiment: impl Into<String>, function: TestFunction, source: PointSource) -> Self {
        let repetitions = if source.is_random() { 10 } else { 1 };
        Self {
            experiment: experiment.into(),
            function,
            source,
            degrees: Vec::new(),
            schedule: Schedule::FixedList(Vec::new()),
            seed: 1,
            repetitions,
            reference_order: None,
            compute_eta: true,
            force: false,
        }
    }

    /// Parses `key = value` lines (`#` comments). Returns the config and any
    /// `output` path it names.
    pub fn from_kv(text: &str) -> Result<(Self, Option<PathBuf>)> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: "<config>".into(),
                line: i + 1,
                message: format!("expected key = value, got {line:?}"),
            })?;
            map.insert(k.trim().to_ascii_lowercase(), (i + 1, v.trim().to_string()));
        }
        let take = |map: &mut BTreeMap<String, (usize, String)>, key: &str| map.remove(key).map(|(_, v)| v);
        let bad = |key: &str, v: &str| Error::InvalidInput(format!("bad value for {key}: {v:?}"));

        let function: TestFunction = take(&mut map, "function")
            .ok_or_else(|| Error::InvalidInput("config needs `function`".into()))?
            .parse()?;
        let source: PointSource = take(&mut map, "points")
            .ok_or_else(|| Error::InvalidInput("config needs `points`".into()))?
            .parse()?;
        let experiment = take(&mut map, "experiment").unwrap_or_else(|| "sweep".into());
        let mut cfg = SweepConfig::new(experiment, function, source);

        cfg.degrees = parse_list(&take(&mut map, "degrees").or_else(|| take(&mut map, "n")).unwrap_or_default())
            .map_err(|v| bad("degrees", &v))?;
        let sizes = parse_list(&take(&mut map, "sizes").or_else(|| take(&mut map, "m")).unwrap_or_default())
            .map_err(|v| bad("sizes", &v))?;
        let sigma = match take(&mut map, "sigma") {
            Some(v) => v.parse::<f64>().map_err(|_| bad("sigma", &v))?,
            None => match function {
                TestFunction::F4 { sigma } => sigma as f64,
                _ => 0.0,
            },
        };
        let beta = match take(&mut map, "beta") {
            Some(v) => v.parse::<usize>().map_err(|_| bad("beta", &v))?,
            None => 1,
        };
        let schedule = take(&mut map, "schedule").unwrap_or_else(|| "fixed-list".into());
        cfg.schedule = match (&cfg.source, sizes.is_empty()) {
            // file cells take m from the file
            (PointSource::Files(_), true) => Schedule::FixedList(Vec::new()),
            _ => Schedule::parse(&schedule, sigma, beta, &sizes)?,
        };
        if let Some(v) = take(&mut map, "seed") {
            cfg.seed = v.parse().map_err(|_| bad("seed", &v))?;
        }
        if let Some(v) = take(&mut map, "repetitions") {
            cfg.repetitions = v.parse().map_err(|_| bad("repetitions", &v))?;
        }
        if let Some(v) = take(&mut map, "reference_order") {
            cfg.reference_order = Some(v.parse().map_err(|_| bad("reference_order", &v))?);
        }
        if let Some(v) = take(&mut map, "eta") {
            cfg.compute_eta = v.parse().map_err(|_| bad("eta", &v))?;
        }
        if let Some(v) = take(&mut map, "force") {
            cfg.force = v.parse().map_err(|_| bad("force", &v))?;
        }
        let output = take(&mut map, "output").map(PathBuf::from);
        if let Some((key, (line, _))) = map.into_iter().next() {
            return Err(Error::Parse {
                path: "<config>".into(),
                line,
                message: format!("unknown key {key:?}"),
            });
        }
        cfg.validate()?;
        Ok((cfg, output))
    }

    pub fn validate(&self) -> Result<()> {
        if self.degrees.is_empty() {
            return Err(Error::InvalidInput("degree grid is empty".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidInput("repetitions must be at least 1".into()));
        }
        if let Schedule::FixedList(v) = &self.schedule {
            if v.is_empty() && !matches!(self.source, PointSource::Files(_)) {
                return Err(Error::InvalidInput("size grid is empty".into()));
            }
            if v.contains(&0) {
                return Err(Error::InvalidInput("sizes must be positive".into()));
            }
        }
        Ok(())
    }

    fn effective_repetitions(&self) -> usize {
        if self.source.is_random() {
            self.repetitions
        } else {
            1
        }
    }

    fn reference_order_for(&self, n: usize) -> usize {
        self.reference_order.unwrap_or((n + 11).max(100))
    }
}

fn parse_list(v: &str) -> std::result::Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for tok in v.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        // `a..b` or `a..=b` ranges are accepted for degree grids
        if let Some((a, b)) = tok.split_once("..") {
            let (b, inclusive) = match b.strip_prefix('=') {
                Some(b) => (b, true),
                None => (b, false),
            };
            let a: usize = a.trim().parse().map_err(|_| tok.to_string())?;
            let b: usize = b.trim().parse().map_err(|_| tok.to_string())?;
            let end = if inclusive { b + 1 } else { b };
            out.extend(a..end);
        } else {
            // sizes may be written as 1e4 or 3162.28
            let x: f64 = tok.parse().map_err(|_| tok.to_string())?;
            if !(x >= 0.0) || !x.is_finite() {
                return Err(tok.to_string());
            }
            out.push(x.round() as usize);
        }
    }
    Ok(out)
}

/// Per-cell seed for repetition `rep` of size `m`; independent of `n` so that
/// all degrees of one `(m, rep)` share the same nodes.
pub fn derive_seed(base: u64, m: usize, rep: usize) -> u64 {
    let mut z = base
        ^ splitmix(m as u64).rotate_left(17)
        ^ splitmix(rep as u64 ^ 0x9e37_79b9_7f4a_7c15).rotate_left(41);
    z = splitmix(z);
    z
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One fitted cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub m: usize,
    pub rep: usize,
    pub seed: u64,
    /// `NaN` when η was not requested.
    pub eta: f64,
    pub l2_error: f64,
    /// `‖U_n f‖_{L²}`, for stability checks.
    pub fit_norm: f64,
    /// `Σ w_j`.
    pub weight_sum: f64,
    pub wall_time: f64,
}

/// Mean, min and max of the error over repetitions of one `(n, m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateRow {
    pub n: usize,
    pub m: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub experiment: String,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone)]
struct Cell {
    n: usize,
    m_requested: usize,
    rep: usize,
    file: Option<PathBuf>,
}

/// Builds the rule of one cell.
pub fn build_rule(source: &PointSource, m: usize, seed: u64, file: Option<&PathBuf>) -> Result<QuadratureRule> {
    match source {
        PointSource::Random => equal_weight_rule(random_uniform(m, seed)?, Provenance::Random),
        PointSource::EqualArea => equal_weight_rule(equal_area(m)?, Provenance::EqualArea),
        PointSource::GaussProduct => product_gauss_rule((((m as f64) / 2.0).sqrt().round() as usize).max(1)),
        PointSource::Files(_) => {
            let path = file.ok_or_else(|| Error::InvalidInput("file cell without a path".into()))?;
            load_pointset(path, false)?.into_rule()
        }
    }
}

/// Runs every cell of `cfg`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let reps = cfg.effective_repetitions();
    let mut cells = Vec::new();
    for &n in &cfg.degrees {
        match &cfg.source {
            PointSource::Files(files) => {
                for f in files {
                    cells.push(Cell {
                        n,
                        m_requested: 0,
                        rep: 0,
                        file: Some(f.clone()),
                    });
                }
            }
            _ => {
                for m in cfg.schedule.sizes_for(n) {
                    for rep in 0..reps {
                        cells.push(Cell {
                            n,
                            m_requested: m,
                            rep,
                            file: None,
                        });
                    }
                }
            }
        }
    }
    if !cfg.force {
        if let Some(c) = cells
            .iter()
            .find(|c| c.file.is_none() && (c.n + 1) * (c.n + 1) > c.m_requested)
        {
            return Err(Error::InvalidInput(format!(
                "degree {} needs at least {} nodes but the grid has m = {}; pass force to override",
                c.n,
                (c.n + 1) * (c.n + 1),
                c.m_requested
            )));
        }
    }

    // target values on each reference rule, shared by every cell of that order
    let mut references: BTreeMap<usize, (QuadratureRule, Vec<f64>)> = BTreeMap::new();
    for &n in &cfg.degrees {
        let order = cfg.reference_order_for(n);
        if let std::collections::btree_map::Entry::Vacant(e) = references.entry(order) {
            let rule = product_gauss_rule(order)?;
            let values = rule.points().par_iter().map(|p| cfg.function.eval(p)).collect();
            e.insert((rule, values));
        }
    }

    let mut rows: Vec<SweepRow> = cells
        .par_iter()
        .map(|cell| -> Result<SweepRow> {
            let start = Instant::now();
            let seed = derive_seed(cfg.seed, cell.m_requested, cell.rep);
            let rule = build_rule(&cfg.source, cell.m_requested, seed, cell.file.as_ref())?;
            if let Some(file) = cell.file.as_ref().filter(|_| !cfg.force && (cell.n + 1) * (cell.n + 1) > rule.len()) {
                return Err(Error::InvalidInput(format!(
                    "degree {} needs at least {} nodes but {} has {}",
                    cell.n,
                    (cell.n + 1) * (cell.n + 1),
                    file.display(),
                    rule.len()
                )));
            }
            let values: Vec<f64> = rule.points().iter().map(|p| cfg.function.eval(p)).collect();
            let h = fit_samples(&rule, &values, cell.n)?;
            let eta = if cfg.compute_eta {
                mz_constant(&rule, cell.n)?.eta
            } else {
                f64::NAN
            };
            let (reference, target) = &references[&cfg.reference_order_for(cell.n)];
            let approx = h.evaluate_many(reference.points());
            let l2_error = reference
                .weights()
                .iter()
                .zip(approx.iter().zip(target))
                .map(|(w, (a, t))| w * (a - t) * (a - t))
                .sum::<f64>()
                .sqrt();
            Ok(SweepRow {
                n: cell.n,
                m: rule.len(),
                rep: cell.rep,
                seed: if cfg.source.is_random() { seed } else { 0 },
                eta,
                l2_error,
                fit_norm: h.l2_norm(),
                weight_sum: rule.weight_sum(),
                wall_time: start.elapsed().as_secs_f64(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.n, r.m, r.rep));
    Ok(SweepResult {
        experiment: cfg.experiment.clone(),
        rows,
    })
}

impl SweepResult {
    pub fn aggregate(&self) -> Vec<AggregateRow> {
        let mut groups: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
        for r in &self.rows {
            groups.entry((r.n, r.m)).or_default().push(r.l2_error);
        }
        groups
            .into_iter()
            .map(|((n, m), errs)| AggregateRow {
                n,
                m,
                mean: errs.iter().sum::<f64>() / errs.len() as f64,
                min: errs.iter().copied().fold(f64::INFINITY, f64::min),
                max: errs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
            .collect()
    }

    /// Mean error of degree `n` at size `m`.
    pub fn mean_error(&self, n: usize, m: usize) -> Option<f64> {
        self.aggregate().into_iter().find(|a| a.n == n && a.m == m).map(|a| a.mean)
    }

    /// `(m, mean error)` for one degree, ascending in `m`.
    pub fn curve(&self, n: usize) -> Vec<(usize, f64)> {
        self.aggregate()
            .into_iter()
            .filter(|a| a.n == n)
            .map(|a| (a.m, a.mean))
            .collect()
    }

    /// For every `m` fitted with more than one degree, the degree with the
    /// smallest mean error.
    pub fn best_degree_per_size(&self) -> Vec<(usize, usize)> {
        let mut best: BTreeMap<usize, (usize, f64, usize)> = BTreeMap::new();
        for a in self.aggregate() {
            let e = best.entry(a.m).or_insert((a.n, a.mean, 0));
            e.2 += 1;
            if a.mean < e.1 {
                e.0 = a.n;
                e.1 = a.mean;
            }
        }
        best.into_iter()
            .filter(|(_, (_, _, count))| *count > 1)
            .map(|(m, (n, _, _))| (m, n))
            .collect()
    }

    /// `experiment,n,m,seed,eta,l2_error`.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "experiment,n,m,seed,eta,l2_error")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{:.16e},{:.16e}",
                self.experiment, r.n, r.m, r.seed, r.eta, r.l2_error
            )?;
        }
        Ok(())
    }

    /// `experiment,n,m,mean,min,max`.
    pub fn write_aggregate_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "experiment,n,m,mean,min,max")?;
        for a in self.aggregate() {
            writeln!(
                w,
                "{},{},{},{:.16e},{:.16e},{:.16e}",
                self.experiment, a.n, a.m, a.mean, a.min, a.max
            )?;
        }
        Ok(())
    }

    /// Wall times live in their own file so the result CSVs stay byte-identical.
    pub fn write_timing_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "experiment,n,m,seed,wall_time")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{},{:.6}", self.experiment, r.n, r.m, r.seed, r.wall_time)?;
        }
        Ok(())
    }
}

/// Relative change of `‖f − P_n f‖_{L²}` when the reference order doubles.
///
/// Used to confirm that a reference rule resolves a non-polynomial target.
pub fn reference_resolution(f: &TestFunction, n: usize, order: usize) -> Result<f64> {
    let err_at = |order: usize| -> Result<f64> {
        let reference = product_gauss_rule(order)?;
        let p = crate::hyperinterp::fit(&reference, |x: &SpherePoint| f.eval(x), n)?;
        let approx = p.evaluate_many(reference.points());
        Ok(reference
            .iter()
            .zip(approx)
            .map(|((x, w), a)| w * (a - f.eval(x)).powi(2))
            .sum::<f64>()
            .sqrt())
    };
    let coarse = err_at(order)?;
    let fine = err_at(2 * order)?;
    Ok((coarse - fine).abs() / fine)
}
