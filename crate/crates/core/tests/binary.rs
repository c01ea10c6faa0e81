use std::process::{Command, Output};

fn rmcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmcalc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn density_of_the_semicircle() {
    let o = rmcalc(&["density", "wigner", "--zmin", "-1", "--zmax", "1", "--points", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("z,f"));
    let mid: Vec<f64> = lines.nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(mid[0], 0.0);
    assert!((mid[1] - std::f64::consts::FRAC_1_PI).abs() < 1e-6);
}

#[test]
fn moments_and_polynomials() {
    let o = rmcalc(&["moments", "wishart(1)", "--n", "5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1,1,2,5,14,42");
    let o = rmcalc(&["poly", "wigner + wishart(1/2)"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("m^3"));
    let o = rmcalc(&["--json", "poly", "wigner"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["kind"], "mz");
}

#[test]
fn file_input() {
    let dir = std::env::temp_dir().join(format!("rmcalc-bin-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("expr.txt");
    std::fs::write(&path, "compress(atomic(1/2@0, 1/2@1), 0.4)\n").unwrap();
    let arg = format!("@{}", path.display());
    let o = rmcalc(&["moments", &arg, "--n", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "1,1/2,7/20,11/40");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(rmcalc(&["poly", "wigner +"]).status.code(), Some(1));
    assert_eq!(rmcalc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(rmcalc(&["density", "wigner", "--points", "1"]).status.code(), Some(1));
    assert_eq!(rmcalc(&["--help"]).status.code(), Some(0));
    let ok = rmcalc(&["verify", "atomic(1/2@0, 1/2@1)", "--dim", "20", "--trials", "10"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("PASS"));
    let strict = rmcalc(&["verify", "wigner", "--dim", "10", "--trials", "2", "--bins", "40", "--threshold", "0.0001"]);
    assert_eq!(strict.status.code(), Some(2));
    assert!(stdout(&strict).contains("FAIL"));
}
