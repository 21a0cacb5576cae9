use std::process::{Command, Output};

fn gzroots(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gzroots"))
        .args(args)
        .env_remove("GZROOTS_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn dim_prints_the_dimension() {
    let o = gzroots(&["dim", "--top", "6,2,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "24");
    let o = gzroots(&["dim", "--top", "4,2", "--rank", "3"]);
    assert_eq!(stdout(&o).trim(), "8");
}

#[test]
fn enumerate_lists_patterns_and_weights() {
    let o = gzroots(&["enumerate", "--top", "4,2,0"]);
    assert_eq!(stdout(&o).lines().count(), 8);
    let o = gzroots(&["enumerate", "--top", "4,2,0", "--weights"]);
    assert!(stdout(&o).lines().count() > 1);
}

#[test]
fn exit_codes() {
    assert_eq!(gzroots(&["paper-case", "flat-7"]).status.code(), Some(0));
    assert_eq!(gzroots(&["build", "--top", "7,2,0", "--m", "3"]).status.code(), Some(3));
    assert_eq!(gzroots(&["dim", "--top", "4,4,0"]).status.code(), Some(2));
    assert_eq!(gzroots(&["build", "--top", "3,1,0"]).status.code(), Some(2));
    assert_eq!(gzroots(&["build", "--top", "3,1,0", "--m", "4"]).status.code(), Some(2));
    assert_eq!(gzroots(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn verify_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.json");
    let f = file.to_str().unwrap();
    let o = gzroots(&["build", "--top", "5,2,0", "--m", "3", "--out", f]);
    assert_eq!(o.status.code(), Some(0));

    let o = gzroots(&["verify", f]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("closure dimensions: [15]"));

    let o = gzroots(&["export", f, "--format", "csv"]);
    let csv = stdout(&o);
    assert!(csv.starts_with("generator,row,col,re,im"));
    assert!(csv.lines().any(|l| l.starts_with("k1,")));

    let o = gzroots(&["export", f, "--format", "json"]);
    assert_eq!(stdout(&o).trim_end(), std::fs::read_to_string(&file).unwrap());
}

#[test]
fn tolerance_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.json");
    let f = file.to_str().unwrap();
    assert_eq!(gzroots(&["build", "--top", "4,2,0", "--generic-angle", "0.37", "--out", f]).status.code(), Some(0));
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_gzroots"))
            .args(["verify", f])
            .env("GZROOTS_TOL", tol)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(run("1e-9"), Some(0));
    assert_eq!(run("1e-30"), Some(1));
    assert_eq!(run("-1"), Some(2));
}
