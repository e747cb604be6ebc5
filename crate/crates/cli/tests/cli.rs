use std::process::{Command, Output};

fn adelic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adelic")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn list_names_the_cited_suites() {
    let o = adelic(&["list"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("siegel,Prop 3.2 Hecke-average convergence"));
    assert!(s.contains("zeta-identities,Prop 4.7"));
    assert!(s.contains("schanuel,Theorem 1.6 / Prop 5.4"));
    assert_eq!(s.lines().count(), 15);
}

#[test]
fn hecke_suite_passes() {
    let o = adelic(&["verify", "hecke", "--q", "2,3", "--m-max", "3", "--k-max", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.starts_with("check,case,value,expected,pass"));
    assert!(!s.contains(",false"));
}

#[test]
fn siegel_gaps_decrease() {
    let o = adelic(&["verify", "siegel", "--field", "Q", "--n", "3", "--primes", "11,101", "--region", "ball:3.5"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let gaps: Vec<f64> = s.lines().skip(1).map(|l| l.split(',').nth(5).unwrap().parse().unwrap()).collect();
    assert_eq!(gaps.len(), 2);
    assert!(gaps[1] < gaps[0]);
}

#[test]
fn projective_count_prints_an_integer() {
    let o = adelic(&["count", "projective", "--field", "Q", "--n", "2", "--B", "10"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "96");
}

#[test]
fn schanuel_constant_over_q() {
    let o = adelic(&["constants", "schanuel", "--field", "Q", "--n", "2"]);
    let c: f64 = stdout(&o).trim().parse().unwrap();
    assert!((c - 3.0 / std::f64::consts::PI).abs() < 1e-10);
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = adelic(&["verify", "echelon", "--cases", "10", "--seed", "7", "--format", "json", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    let v: serde_json::Value = serde_json::from_slice(&x).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["config"]["seed"], "7");
    assert_eq!(v["rows"].as_array().unwrap().len(), 11);
}

#[test]
fn failing_checks_exit_one_with_failure_list() {
    let o = adelic(&["verify", "siegel", "--primes", "11", "--tolerance", "1e-9"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    let v: serde_json::Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
    assert_eq!(v["suite"], "siegel");
    assert!(!v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn error_classes_have_distinct_codes() {
    assert_eq!(adelic(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(adelic(&["verify", "siegel", "--field", "Q(sqrt(-5))"]).status.code(), Some(3));
    assert_eq!(adelic(&["verify", "heights", "--spec", "/nonexistent/field.toml"]).status.code(), Some(3));
    assert_eq!(adelic(&["verify", "hecke", "--q", "7", "--m-max", "6", "--k-max", "6"]).status.code(), Some(4));
    assert_eq!(adelic(&["count", "projective", "--n", "2"]).status.code(), Some(3));
}

#[test]
fn field_spec_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("q7.field");
    std::fs::write(&good, "label = Q(sqrt(7))\nm = 7\n").unwrap();
    let o = adelic(&["constants", "schanuel", "--spec", good.to_str().unwrap(), "--n", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).trim().parse::<f64>().unwrap() > 0.0);
    let bad = dir.path().join("bad.field");
    std::fs::write(&bad, "label = broken\nm = 4\n").unwrap();
    assert_eq!(adelic(&["verify", "heights", "--spec", bad.to_str().unwrap()]).status.code(), Some(3));
}
