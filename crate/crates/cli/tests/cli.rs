use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const EXAMPLE_ONE: &str = r#"{"kind":"schrodinger","period":5,"v":[1,1.1,1.2,1.3,1.4]}"#;
const TWO_PERIODIC: &str = r#"{"kind":"schrodinger","period":2,"v":[0,1]}"#;
const CONSTANT: &str = r#"{"kind":"schrodinger","period":3,"v":[0.5,0.5,0.5]}"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_borg-spectra")).args(args).arg("--out").arg(dir).output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).map(str::to_string).collect()
}

fn segments(svg: &Path) -> usize {
    fs::read_to_string(svg).unwrap().matches(r#"class="segment""#).count()
}

#[test]
fn spectrum_segments() {
    let dir = tempfile::tempdir().unwrap();
    for (name, spec, check) in [
        ("ex1", EXAMPLE_ONE, (|n: usize| n >= 2) as fn(usize) -> bool),
        ("flat", CONSTANT, |n| n == 1),
        ("two", TWO_PERIODIC, |n| n == 2),
    ] {
        let out = dir.path().join(name);
        let o = run(&out, &["spectrum", "--spec", spec]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(check(segments(&out.join("spectrum.svg"))), "{name}");
        let rows = csv_rows(&out.join("bands.csv"));
        assert_eq!(rows[0], "theta,band_index,lambda");
        let period = read_json(&out.join("spectrum.json"))["spec"]["period"].as_u64().unwrap() as usize;
        assert_eq!(rows.len(), 1 + 1024 * period);
    }
    let doc = read_json(&dir.path().join("two/spectrum.json"));
    let iv = doc["intervals"].as_array().unwrap();
    let gap = iv[1][0].as_f64().unwrap() - iv[0][1].as_f64().unwrap();
    assert!((gap - 1.0).abs() < 0.02, "gap {gap}");
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn pseudospectrum_regions() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["pseudospectrum", "--spec", EXAMPLE_ONE, "--epsilon", "0.2", "--epsilon", "0"]);
    assert!(o.status.success());
    let doc = read_json(&dir.path().join("pseudospectrum.json"));
    let fat = &doc["pseudospectra"];
    assert_eq!(fat[0]["intervals"].as_array().unwrap().len(), 1);
    assert_eq!(fat[0]["gap_report"]["connected"], true);
    assert_eq!(fat[1]["intervals"], doc["spectrum"]["intervals"]);
    let svg = fs::read_to_string(dir.path().join("pseudospectrum.svg")).unwrap();
    assert!(svg.contains("<path"));

    let two = dir.path().join("two");
    assert!(run(&two, &["pseudospectrum", "--spec", TWO_PERIODIC, "--epsilon", "0.25"]).status.success());
    let doc = read_json(&two.join("pseudospectrum.json"));
    assert_eq!(doc["pseudospectra"][0]["intervals"].as_array().unwrap().len(), 2);
}

#[test]
fn borg_reports_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["borg", "--spec", EXAMPLE_ONE, "--epsilon", "0.2"]);
    assert!(o.status.success());
    let doc = read_json(&dir.path().join("borg.json"));
    let forward = &doc["checks"][0]["forward"];
    assert_eq!(forward["theorem"], "forward_schrodinger");
    assert_eq!(forward["satisfied"], true);
    assert_eq!(forward["bound"].as_f64().unwrap(), 1.6);
    for field in ["epsilon", "best_c", "deviation", "bound", "satisfied", "margin"] {
        assert!(!forward[field].is_null(), "{field}");
    }

    let flat = dir.path().join("flat");
    assert!(run(&flat, &["borg", "--spec", CONSTANT, "--epsilon", "0.1"]).status.success());
    let r = &read_json(&flat.join("borg.json"))["checks"][0]["forward"];
    let slack = r["resolution_slack"].as_f64().unwrap();
    assert_eq!(r["margin"].as_f64().unwrap(), r["bound"].as_f64().unwrap() + slack);

    let jacobi = r#"{"kind":"jacobi","period":2,"v":[-0.1,0.1],"a":[0.9,1.1]}"#;
    let o = run(&dir.path().join("jac"), &["borg", "--spec", jacobi, "--epsilon", "0.1"]);
    assert_eq!(o.status.code(), Some(3));

    let unsorted = r#"{"kind":"laurent","period":2,"v":[1,0],"fourier":[[1,1]]}"#;
    assert_eq!(run(&dir.path().join("lau"), &["borg", "--spec", unsorted]).status.code(), Some(3));
}

#[test]
fn borg_suite_exit_code_matches_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["borg", "--count", "40", "--seed", "3", "--grid", "256"]);
    let doc = read_json(&dir.path().join("borg_suite.json"));
    let violations = doc["forward_violations"].as_u64().unwrap() + doc["converse_violations"].as_u64().unwrap();
    assert_eq!(o.status.code(), Some(if violations > 0 { 3 } else { 0 }));
    assert_eq!(doc["config"]["instances"], 40);
}

#[test]
fn mathieu_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["mathieu", "--count", "4"]).status.success());
    let rows = csv_rows(&dir.path().join("sweep.csv"));
    assert_eq!(rows[0], "b,period,gap_count,epsilon_star,d_H_to_next");
    let bs: Vec<u64> = rows[1..].iter().map(|r| r.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(bs.len(), 4);
    assert!(bs.windows(2).all(|w| w[0] <= w[1]));
    assert!(rows.last().unwrap().ends_with(','));
    assert!(dir.path().join("butterfly.svg").exists());

    let rational = dir.path().join("rational");
    assert!(run(&rational, &["mathieu", "--alpha", "0.4", "--count", "3"]).status.success());
    let rows = csv_rows(&rational.join("sweep.csv"));
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("5,5,"));

    let free = dir.path().join("free");
    assert!(run(&free, &["mathieu", "--coupling", "0", "--count", "4"]).status.success());
    assert!(csv_rows(&free.join("sweep.csv"))[1..].iter().all(|r| r.split(',').nth(2) == Some("0")));
}

#[test]
fn oracle_comparison() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["oracle", "--spec", TWO_PERIODIC, "--blocks", "4", "--blocks", "8"]).status.success());
    let rows = csv_rows(&dir.path().join("oracle.csv"));
    assert_eq!(rows[0], "n,index,eigenvalue,dist_to_symbol_spectrum");
    assert_eq!(rows.len(), 1 + 8 + 16);
    let doc = read_json(&dir.path().join("oracle.json"));
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn spec_from_file_and_format_subset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.json");
    fs::write(&path, EXAMPLE_ONE).unwrap();
    let out = dir.path().join("out");
    let o = run(&out, &["spectrum", "--spec", path.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success());
    let mut names: Vec<String> =
        fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    assert_eq!(names, ["spectrum.json"]);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(run(dir.path(), &["spectrum", "--spec", missing.to_str().unwrap()]).status.code(), Some(2));
    let bad_period = r#"{"kind":"schrodinger","period":3,"v":[0,1]}"#;
    assert_eq!(run(dir.path(), &["spectrum", "--spec", bad_period]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["spectrum", "--spec", EXAMPLE_ONE, "--grid", "1"]).status.code(), Some(2));
    let o = run(dir.path(), &["pseudospectrum", "--spec", EXAMPLE_ONE, "--epsilon", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(run(dir.path(), &["spectrum"]).status.code(), Some(2));
}

#[test]
fn thread_cap_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_borg-spectra"))
        .env("BORG_SPECTRA_THREADS", "1")
        .args(["spectrum", "--spec", EXAMPLE_ONE, "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
}
