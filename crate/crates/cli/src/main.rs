use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sphinterp::experiment::build_rule;
use sphinterp::pointsets::write_pointset;
use sphinterp::{
    equal_area, load_pointset, mz_constant, product_gauss_rule, random_uniform, run_sweep, PointSource, SweepConfig,
};

mod check;

/// Hyperinterpolation experiments on the unit sphere.
#[derive(Parser)]
#[command(name = "sphinterp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate, or validate and echo, a point set.
    Points {
        #[arg(long, value_enum)]
        kind: PointKind,
        /// Number of points (random, equal-area).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Gauss product order N (2N² points, written with weights).
        #[arg(long)]
        order: Option<usize>,
        /// Input file for `--kind load`.
        #[arg(long)]
        path: Option<PathBuf>,
        /// Require a weight column when loading.
        #[arg(long)]
        weights: bool,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Marcinkiewicz–Zygmund constant of a rule at degree n.
    Eta {
        /// random | equal-area | gauss-product | files:<path>[,<path>…]
        #[arg(long)]
        points: String,
        #[arg(long)]
        n: usize,
        /// Node count (random, equal-area) or 2N² (gauss-product).
        #[arg(long)]
        m: Option<usize>,
        /// Gauss product order; overrides --m.
        #[arg(long)]
        order: Option<usize>,
        /// Use equal weights 4π/m even when files carry weights.
        #[arg(long, value_enum, default_value_t = WeightsMode::File)]
        weights: WeightsMode,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of random seeds, starting at --seed; the median is reported.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
    },
    /// Run a convergence sweep from a `key = value` config file.
    Sweep {
        config: PathBuf,
        /// Result CSV; overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Allow degrees with (n+1)² > m.
        #[arg(long)]
        force: bool,
    },
    /// Run the invariant suite on the bundled corpus.
    Check {
        /// Only run checks of this group.
        #[arg(long)]
        filter: Option<String>,
        /// Directory of point files.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PointKind {
    Random,
    EqualArea,
    GaussProduct,
    Load,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeightsMode {
    /// Weights from the file when present, else equal.
    File,
    Equal,
}

/// Failure of a command: bad input (exit 2) or a failed check (exit 1).
#[derive(Debug)]
enum Failure {
    Input(String),
    Check,
}

impl From<sphinterp::Error> for Failure {
    fn from(e: sphinterp::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Points {
            kind,
            m,
            seed,
            order,
            path,
            weights,
            out,
        } => cmd_points(kind, m, seed, order, path, weights, out),
        Command::Eta {
            points,
            n,
            m,
            order,
            weights,
            seed,
            seeds,
        } => cmd_eta(&points, n, m, order, weights, seed, seeds),
        Command::Sweep { config, out, force } => cmd_sweep(&config, out, force),
        Command::Check { filter, corpus } => check::run(filter.as_deref(), corpus),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Input(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn require<T>(value: Option<T>, flag: &str, kind: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Input(format!("--kind {kind} needs {flag}")))
}

fn cmd_points(
    kind: PointKind,
    m: Option<usize>,
    seed: u64,
    order: Option<usize>,
    path: Option<PathBuf>,
    weights: bool,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let mut w = output(out.as_deref())?;
    match kind {
        PointKind::Random => write_pointset(&mut w, &random_uniform(require(m, "--m", "random")?, seed)?, None)?,
        PointKind::EqualArea => write_pointset(&mut w, &equal_area(require(m, "--m", "equal-area")?)?, None)?,
        PointKind::GaussProduct => {
            let rule = product_gauss_rule(require(order, "--order", "gauss-product")?)?;
            write_pointset(&mut w, rule.points(), Some(rule.weights()))?
        }
        PointKind::Load => {
            let file = load_pointset(require(path, "--path", "load")?, weights)?;
            write_pointset(&mut w, &file.points, file.weights.as_deref())?
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_eta(
    points: &str,
    n: usize,
    m: Option<usize>,
    order: Option<usize>,
    weights: WeightsMode,
    seed: u64,
    seeds: u64,
) -> Result<(), Failure> {
    let source: PointSource = points.parse()?;
    let m = match (&source, order) {
        (PointSource::GaussProduct, Some(order)) => 2 * order * order,
        (PointSource::Files(_), _) => 0,
        _ => m.ok_or_else(|| Failure::Input(format!("--points {points} needs --m")))?,
    };
    let files = match &source {
        PointSource::Files(files) => files.iter().map(Some).collect(),
        _ => vec![None],
    };
    let seed_list: Vec<u64> = if source.is_random() {
        (0..seeds.max(1)).map(|i| seed + i).collect()
    } else {
        vec![seed]
    };
    let mut out = io::stdout().lock();
    writeln!(out, "source,m,n,seed,eta,lambda_min,lambda_max,rank_deficient")?;
    let mut etas = Vec::new();
    for file in files {
        for &s in &seed_list {
            let mut rule = build_rule(&source, m, s, file)?;
            if weights == WeightsMode::Equal {
                rule = sphinterp::equal_weight_rule(rule.points().to_vec(), rule.provenance())?;
            }
            let r = mz_constant(&rule, n)?;
            let label = file.map_or_else(|| points.to_string(), |f| f.display().to_string());
            writeln!(
                out,
                "{label},{},{n},{s},{:.16e},{:.16e},{:.16e},{}",
                rule.len(),
                r.eta,
                r.lambda_min,
                r.lambda_max,
                r.rank_deficient
            )?;
            if r.rank_deficient {
                eprintln!(
                    "warning: {label} (seed {s}) is rank deficient at n = {n}: lambda_min = {:.3e}",
                    r.lambda_min
                );
            } else if r.eta >= 1.0 {
                eprintln!("warning: {label} (seed {s}) has eta = {:.3e} >= 1 at n = {n}; no norm equivalence", r.eta);
            }
            etas.push(r.eta);
        }
    }
    if etas.len() > 1 {
        etas.sort_by(f64::total_cmp);
        let k = etas.len();
        let median = if k % 2 == 1 { etas[k / 2] } else { 0.5 * (etas[k / 2 - 1] + etas[k / 2]) };
        eprintln!("median eta over {k} rules: {median:.6e}");
    }
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn cmd_sweep(config: &Path, out: Option<PathBuf>, force: bool) -> Result<(), Failure> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", config.display())))?;
    let (mut cfg, configured) = SweepConfig::from_kv(&text).map_err(|e| {
        // config errors name the config file rather than a placeholder
        Failure::Input(e.to_string().replace("<config>", &config.display().to_string()))
    })?;
    cfg.force |= force;
    // relative point files resolve against the config's directory
    if let PointSource::Files(files) = &mut cfg.source {
        let base = config.parent().unwrap_or(Path::new("."));
        for f in files.iter_mut() {
            if f.is_relative() {
                *f = base.join(&*f);
            }
        }
    }
    let result = run_sweep(&cfg)?;
    let target = out.or(configured);
    match &target {
        Some(path) => {
            let mut w = output(Some(path))?;
            result.write_csv(&mut w)?;
            w.flush()?;
            let mut w = output(Some(&sibling(path, "aggregate")))?;
            result.write_aggregate_csv(&mut w)?;
            w.flush()?;
            let mut w = output(Some(&sibling(path, "timing")))?;
            result.write_timing_csv(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = output(None)?;
            result.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    for (m, n) in result.best_degree_per_size() {
        eprintln!("advisory: m = {m}: smallest mean error at n = {n}");
    }
    Ok(())
}
