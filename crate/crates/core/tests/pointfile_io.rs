use std::fs;

use sphinterp::pointsets::write_pointset;
use sphinterp::{equal_area, load_pointset, product_gauss_rule, Error, SpherePoint};

// loading renormalizes, which may move a coordinate by an ulp
fn assert_close(a: &[SpherePoint], b: &[SpherePoint]) {
    assert_eq!(a.len(), b.len());
    for (p, q) in a.iter().zip(b) {
        assert!(p.coords().iter().zip(q.coords()).all(|(x, y)| (x - y).abs() <= 1e-15), "{p:?} vs {q:?}");
    }
}

#[test]
fn round_trip_without_weights() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ea.txt");
    let pts = equal_area(257).unwrap();
    write_pointset(fs::File::create(&path).unwrap(), &pts, None).unwrap();
    let back = load_pointset(&path, false).unwrap();
    assert!(back.weights.is_none());
    assert_close(&back.points, &pts);
}

#[test]
fn round_trip_with_weights() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gauss.txt");
    let rule = product_gauss_rule(7).unwrap();
    write_pointset(fs::File::create(&path).unwrap(), rule.points(), Some(rule.weights())).unwrap();
    let back = load_pointset(&path, true).unwrap();
    assert_close(&back.points, rule.points());
    assert_eq!(back.weights.as_deref(), Some(rule.weights()));
    let again = back.into_rule().unwrap();
    assert!((again.weight_sum() - rule.weight_sum()).abs() < 1e-14);
}

#[test]
fn comments_and_blank_lines_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.txt");
    fs::write(&path, "# poles\n\n0 0 1\n  \n0 0 -1\n").unwrap();
    assert_eq!(load_pointset(&path, false).unwrap().points.len(), 2);
}

#[test]
fn errors_carry_path_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("mixed.txt", "1 0 0\n0 1 0 1.0\n", 2),
        ("short.txt", "1 0 0\n0 1\n", 2),
        ("nan.txt", "1 0 0\n0 1 0\nNaN 0 1\n", 3),
        ("zero.txt", "1 0 0 0.0\n", 1),
        ("norm.txt", "0.5 0 0\n", 1),
    ];
    for (name, body, want) in cases {
        let path = dir.path().join(name);
        fs::write(&path, body).unwrap();
        match load_pointset(&path, false) {
            Err(Error::Parse { path: p, line, .. }) => {
                assert_eq!(p, path);
                assert_eq!(line, want, "{name}");
            }
            other => panic!("{name}: expected parse error, got {other:?}"),
        }
    }
    let weighted = dir.path().join("plain.txt");
    fs::write(&weighted, "1 0 0\n").unwrap();
    assert!(matches!(load_pointset(&weighted, true), Err(Error::Parse { line: 1, .. })));
    assert!(matches!(load_pointset(dir.path().join("missing.txt"), false), Err(Error::Io { .. })));
}
