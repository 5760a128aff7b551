use std::fs;
use std::process::{Command, Output};

fn opfam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opfam")).args(args).output().unwrap()
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("opfam-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn bracket_csv_has_one_row_per_order() {
    let dir = scratch("bracket");
    fs::write(dir.join("t"), "2\n0 0\n0 1\n").unwrap();
    fs::write(dir.join("s"), "2\n0 0\n0 2\n").unwrap();
    let out = opfam(&[
        "bracket",
        "--t",
        dir.join("t").to_str().unwrap(),
        "--s",
        dir.join("s").to_str().unwrap(),
        "--nmax",
        "6",
        "--emit",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.starts_with("n,norm_ts,rho_ts,norm_st,rho_st"));
}

#[test]
fn spectrum_csv_round_trips_through_plot() {
    let dir = scratch("plot");
    let fam = dir.join("f");
    fs::write(&fam, "dim 2\nconst\n2\n1 0\n0 -1\n").unwrap();
    let csv = dir.join("grid.csv");
    let out = opfam(&[
        "spectrum",
        "--family",
        fam.to_str().unwrap(),
        "--res",
        "16",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = dir.join("grid.svg");
    let out = opfam(&[
        "plot",
        "--input",
        csv.to_str().unwrap(),
        "--output",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(fs::read_to_string(svg).unwrap().contains("<svg"));
}

#[test]
fn bad_input_exits_with_two() {
    let dir = scratch("bad");
    let fam = dir.join("f");
    fs::write(&fam, "dim 2\nconst\n2\n1 0\n").unwrap();
    let out = opfam(&["spectrum", "--family", fam.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(opfam(&["no-such-verb"]).status.code(), Some(2));
}

#[test]
fn single_check_runs() {
    let out = opfam(&["verify", "--check", "bracket.recurrence-vs-binomial", "--machine"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("recurrence-vs-binomial"));
}
