//! `sphinterp check`: invariant suite over generated rules and a point-file corpus.

use std::path::{Path, PathBuf};

use sphinterp::analysis::uniform_norm_refined;
use sphinterp::harmonics::legendre_normalized;
use sphinterp::quadrature::DEFAULT_EXACTNESS_TOL;
use sphinterp::{
    eval_basis, equal_area, equal_weight_rule, exactness_degree, fit, l2_error, load_pointset, mz_constant,
    product_gauss_rule, random_uniform, Hyperinterpolant, Provenance, QuadratureRule, TestFunction, SPHERE_AREA,
};

use crate::Failure;

/// Check groups; the second name of a pair is an accepted alias.
const GROUPS: [(&str, &str); 5] = [
    ("corpus", "corpus"),
    ("addition", "addition-theorem"),
    ("reproduction", "reproduction"),
    ("norm-equivalence", "lemma31"),
    ("stability", "stability"),
];

struct Report {
    failures: usize,
    passes: usize,
}

impl Report {
    fn line(&mut self, group: &str, name: &str, ok: bool, detail: impl AsRef<str>) {
        if ok {
            self.passes += 1;
        } else {
            self.failures += 1;
        }
        println!("{} {group}/{name}: {}", if ok { "PASS" } else { "FAIL" }, detail.as_ref());
    }
}

fn default_corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Pseudo-random values in `[-1, 1]` taken from seeded sphere coordinates.
fn noise(count: usize, seed: u64) -> Vec<f64> {
    random_uniform(count.div_ceil(3).max(1), seed)
        .expect("count is positive")
        .iter()
        .flat_map(|p| p.coords())
        .take(count)
        .collect()
}

fn random_poly(n: usize, seed: u64) -> Hyperinterpolant {
    Hyperinterpolant::from_coeffs(n, noise((n + 1) * (n + 1), seed), Provenance::Loaded).expect("sizes match")
}

/// Degree with `m ≥ 4 (n + 1)²`, capped at 10.
fn working_degree(rule: &QuadratureRule) -> usize {
    let mut n = 0;
    while n < 10 && 4 * (n + 2) * (n + 2) <= rule.len() {
        n += 1;
    }
    n
}

/// `T` from a file named like `tdesign_t20.txt`.
fn design_strength(path: &Path) -> Option<usize> {
    let stem = path.file_stem()?.to_str()?;
    stem.strip_prefix("tdesign_t")?.parse().ok()
}

pub fn run(filter: Option<&str>, corpus: Option<PathBuf>) -> Result<(), Failure> {
    let group = match filter {
        None => None,
        Some(f) => Some(
            GROUPS
                .iter()
                .find(|(name, alias)| *name == f || *alias == f)
                .map(|(name, _)| *name)
                .ok_or_else(|| {
                    let names: Vec<&str> = GROUPS.iter().map(|(n, _)| *n).collect();
                    Failure::Input(format!("unknown check group {f:?}; known: {}", names.join(", ")))
                })?,
        ),
    };
    let enabled = |g: &str| group.is_none_or(|s| s == g);
    let dir = corpus.unwrap_or_else(default_corpus);
    let dir = dir.canonicalize().unwrap_or(dir);
    let mut report = Report { failures: 0, passes: 0 };

    let mut entries: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(|e| Failure::Input(format!("cannot read corpus {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    entries.sort();

    // (label, rule, degree override)
    let mut rules: Vec<(String, QuadratureRule, Option<usize>)> = vec![
        (
            "random m=20000".into(),
            equal_weight_rule(random_uniform(20_000, 1)?, Provenance::Random)?,
            None,
        ),
        (
            "equal-area m=5000".into(),
            equal_weight_rule(equal_area(5000)?, Provenance::EqualArea)?,
            None,
        ),
    ];
    for path in &entries {
        let name = path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned());
        match load_pointset(path, false).and_then(|f| f.into_rule()) {
            Ok(rule) => {
                if enabled("corpus") {
                    match design_strength(path) {
                        Some(t) => {
                            let rep = exactness_degree(&rule, t + 1, DEFAULT_EXACTNESS_TOL);
                            let ok = rep.degree.is_some_and(|d| d >= t);
                            report.line("corpus", &name, ok, format!("{} points, exact to degree {:?} (need {t})", rule.len(), rep.degree));
                        }
                        None => report.line("corpus", &name, true, format!("{} points loaded", rule.len())),
                    }
                }
                rules.push((name, rule, design_strength(path).map(|t| (t / 2).min(10))));
            }
            // a corrupt file fails the run whatever the filter
            Err(e) => report.line("corpus", &name, false, e.to_string()),
        }
    }

    if enabled("addition") {
        let pts = random_uniform(200, 7)?;
        let mut worst = 0.0f64;
        for (i, p) in pts.iter().enumerate() {
            let ell = i % 21;
            let y = eval_basis(ell, p);
            let block: f64 = y[ell * ell..].iter().map(|v| v * v).sum();
            worst = worst.max((block - (2 * ell + 1) as f64 / SPHERE_AREA).abs());
            let q = &pts[(i + 1) % pts.len()];
            let yq = eval_basis(ell, q);
            let cross: f64 = y[ell * ell..].iter().zip(&yq[ell * ell..]).map(|(a, b)| a * b).sum();
            let expect = (2 * ell + 1) as f64 / SPHERE_AREA * legendre_normalized(ell, p.dot(q).clamp(-1.0, 1.0))?;
            worst = worst.max((cross - expect).abs());
        }
        report.line("addition", "random points, degree <= 20", worst < 1e-10, format!("max deviation {worst:.2e}"));
    }

    if enabled("reproduction") {
        for n in [2, 6, 10] {
            let rule = product_gauss_rule(n + 1)?;
            let reference = product_gauss_rule(n + 2)?;
            let chi = random_poly(n, 100 + n as u64);
            let u = fit(&rule, |x| chi.evaluate(x), n)?;
            let err = l2_error(|x| u.evaluate(x), |x| chi.evaluate(x), &reference);
            report.line("reproduction", &format!("exact rule, n={n}"), err < 1e-10, format!("L2 residual {err:.2e}"));
        }
    }

    if enabled("norm-equivalence") {
        for (name, rule, degree) in &rules {
            let n = degree.unwrap_or_else(|| working_degree(rule));
            let eta = mz_constant(rule, n)?.eta;
            let reference = product_gauss_rule(n + 1)?;
            let inner = |a: &[f64], b: &[f64]| -> f64 {
                reference.weights().iter().zip(a.iter().zip(b)).map(|(w, (x, y))| w * x * y).sum()
            };
            let mut bad = 0;
            for trial in 0..100u64 {
                let chi = random_poly(n, 1000 + trial);
                let u = fit(rule, |x| chi.evaluate(x), n)?;
                let uv = u.evaluate_many(reference.points());
                let cv = chi.evaluate_many(reference.points());
                let dv: Vec<f64> = uv.iter().zip(&cv).map(|(a, b)| a - b).collect();
                let (uc, cc, uu, dd) = (inner(&uv, &cv), inner(&cv, &cv), inner(&uv, &uv), inner(&dv, &dv));
                let tol = 1e-8;
                let ok = (1.0 - eta) * cc <= uc + tol
                    && uc <= (1.0 + eta) * cc + tol
                    && (1.0 - eta) * cc.sqrt() <= uu.sqrt() + tol
                    && uu.sqrt() <= (1.0 + eta) * cc.sqrt() + tol
                    && dd <= (eta * eta + 4.0 * eta) * cc + tol;
                if !ok {
                    bad += 1;
                }
            }
            report.line(
                "norm-equivalence",
                &format!("{name}, n={n}"),
                bad == 0,
                format!("eta {eta:.3e}, {bad}/100 polynomials violate"),
            );
        }
    }

    if enabled("stability") {
        let functions = [TestFunction::F1, TestFunction::F2, TestFunction::F3, TestFunction::f4(2)?];
        let sups: Vec<f64> = functions
            .iter()
            .map(|f| uniform_norm_refined(|x| f.eval(x), 10_000))
            .collect::<Result<_, _>>()?;
        for (name, rule, degree) in &rules {
            let n = degree.unwrap_or_else(|| working_degree(rule));
            let eta = mz_constant(rule, n)?.eta;
            if eta >= 1.0 {
                report.line("stability", name, true, format!("skipped, eta {eta:.3e} >= 1"));
                continue;
            }
            let mut worst = 0.0f64;
            for (f, sup) in functions.iter().zip(&sups) {
                let norm = fit(rule, |x| f.eval(x), n)?.l2_norm();
                worst = worst.max(norm / ((1.0 + eta).sqrt() * rule.weight_sum().sqrt() * sup));
            }
            report.line("stability", &format!("{name}, n={n}"), worst <= 1.0 + 1e-6, format!("max norm/bound {worst:.3}"));
        }
    }

    println!("{} passed, {} failed", report.passes, report.failures);
    if report.failures > 0 {
        Err(Failure::Check)
    } else {
        Ok(())
    }
}
