use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sphinterp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphinterp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).display().to_string()
}

#[test]
fn random_points_file_format() {
    let o = sphinterp(&["points", "--kind", "random", "--m", "100", "--seed", "7"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 100);
    for row in rows {
        let v: Vec<f64> = row.split_whitespace().map(|t| t.parse().unwrap()).collect();
        assert_eq!(v.len(), 3);
        assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
    }
    assert_eq!(text, stdout(&sphinterp(&["points", "--kind", "random", "--m", "100", "--seed", "7"])));
}

#[test]
fn equal_area_points_are_deterministic() {
    let a = sphinterp(&["points", "--kind", "equal-area", "--m", "400"]);
    let b = sphinterp(&["points", "--kind", "equal-area", "--m", "400"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a).lines().count(), 400);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn load_echoes_and_validates() {
    let o = sphinterp(&["points", "--kind", "load", "--path", &data("tdesign_t8.txt")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 81);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1 0 0\n0 1 0\n0 0 1.002\n").unwrap();
    let o = sphinterp(&["points", "--kind", "load", "--path", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.txt:3"), "{}", stderr(&o));

    let weights = dir.path().join("w.txt");
    fs::write(&weights, "1 0 0 2.0\n0 1 0 -1.0\n").unwrap();
    let o = sphinterp(&["points", "--kind", "load", "--weights", "--path", weights.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("w.txt:2"), "{}", stderr(&o));
}

#[test]
fn gauss_product_points_carry_weights() {
    let o = sphinterp(&["points", "--kind", "gauss-product", "--order", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 18);
    let total: f64 = text.lines().map(|l| l.split_whitespace().nth(3).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 4.0 * std::f64::consts::PI).abs() < 1e-12);
}

fn eta_column(text: &str) -> Vec<f64> {
    text.lines().skip(1).map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect()
}

#[test]
fn eta_of_exact_rule_vanishes() {
    let o = sphinterp(&["eta", "--points", "gauss-product", "--order", "12", "--n", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("source,m,n,seed,eta,lambda_min,lambda_max,rank_deficient\n"));
    assert!(eta_column(&text)[0] < 1e-10);
}

#[test]
fn eta_warns_near_dimension() {
    let o = sphinterp(&["eta", "--points", "random", "--m", "500", "--n", "20"]);
    assert!(o.status.success());
    let eta = eta_column(&stdout(&o))[0];
    assert!(stderr(&o).contains("warning") && eta > 0.9);
}

#[test]
fn eta_median_falls_with_m() {
    let median = |m: &str| {
        let o = sphinterp(&["eta", "--points", "random", "--m", m, "--n", "10", "--seeds", "10"]);
        assert!(o.status.success());
        let err = stderr(&o);
        let line = err.lines().find(|l| l.starts_with("median eta")).unwrap().to_string();
        line.rsplit(' ').next().unwrap().parse::<f64>().unwrap()
    };
    assert!(median("50000") < median("5000"));
}

#[test]
fn eta_on_files_with_equal_weights() {
    let o = sphinterp(&[
        "eta",
        "--points",
        &format!("files:{}", data("tdesign_t20.txt")),
        "--n",
        "10",
        "--weights",
        "equal",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(eta_column(&stdout(&o))[0] < 1e-10);
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(sphinterp(&["eta", "--points", "nowhere", "--n", "3"]).status.code(), Some(2));
    assert_eq!(sphinterp(&["points", "--kind", "random"]).status.code(), Some(2));
    assert_eq!(sphinterp(&["points", "--kind", "hexagonal", "--m", "3"]).status.code(), Some(2));
    assert_eq!(sphinterp(&["frobnicate"]).status.code(), Some(2));
}

const SWEEP: &str = "\
experiment = smoke
function = f3
points = random
degrees = 2, 4
sizes = 200, 400
repetitions = 3
seed = 11
reference_order = 40
";

#[test]
fn sweep_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("smoke.cfg");
    fs::write(&cfg, SWEEP).unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = sphinterp(&["sweep", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stderr(&o).contains("advisory"));
        out
    };
    let a = run("a.csv");
    let b = run("b.csv");
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("experiment,n,m,seed,eta,l2_error\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 3);
    let agg = fs::read_to_string(dir.path().join("a.aggregate.csv")).unwrap();
    assert!(agg.starts_with("experiment,n,m,mean,min,max\n"));
    assert_eq!(agg.lines().count(), 1 + 4);
    assert_eq!(
        agg,
        fs::read_to_string(dir.path().join("b.aggregate.csv")).unwrap()
    );
    let timing = fs::read_to_string(dir.path().join("a.timing.csv")).unwrap();
    assert!(timing.starts_with("experiment,n,m,seed,wall_time\n"));
}

#[test]
fn sweep_refuses_underdetermined_grids() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("under.cfg");
    fs::write(&cfg, SWEEP.replace("degrees = 2, 4", "degrees = 15")).unwrap();
    let o = sphinterp(&["sweep", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("force"));
    let o = sphinterp(&["sweep", cfg.to_str().unwrap(), "--force"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn sweep_rejects_unknown_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    fs::write(&cfg, format!("{SWEEP}schedule = n^3\n")).unwrap();
    let o = sphinterp(&["sweep", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fixed-list"));
}

#[test]
fn sweep_over_point_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("files.cfg");
    fs::write(
        &cfg,
        format!(
            "function = f1\npoints = files:{},{}\ndegrees = 2\nreference_order = 20\n",
            data("tdesign_t4.txt"),
            data("tdesign_t8.txt")
        ),
    )
    .unwrap();
    let o = sphinterp(&["sweep", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    // both designs are exact to degree 4 and f1 has degree 2
    for l in text.lines().skip(1) {
        let err: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
        assert!(err < 1e-12, "{l}");
    }
}

#[test]
fn check_passes_on_bundled_corpus() {
    let o = sphinterp(&["check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
}

#[test]
fn check_filter_selects_one_group() {
    let o = sphinterp(&["check", "--filter", "lemma31"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).collect();
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|l| l.contains("norm-equivalence/")), "{text}");
    assert_eq!(sphinterp(&["check", "--filter", "nothing"]).status.code(), Some(2));
}

#[test]
fn check_names_corrupt_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(data("tdesign_t4.txt"), dir.path().join("tdesign_t4.txt")).unwrap();
    fs::write(dir.path().join("broken.txt"), "1 0 0\n0 1 zero\n").unwrap();
    let o = sphinterp(&["check", "--corpus", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL corpus/broken.txt") && text.contains("broken.txt:2"), "{text}");
}
