mod common;

use std::fs;

use common::*;
use mvhac::dataset::synthetic_fixture;
use mvhac::output::read_report;

fn fixture_files(dir: &std::path::Path) -> (String, String) {
    let (c, p) = write_input(dir, &synthetic_fixture(3, 10, 4));
    (path_str(&c).to_string(), path_str(&p).to_string())
}

#[test]
fn mvhac_happy_path_writes_report_and_trees() {
    let tmp = tempfile::tempdir().unwrap();
    let (cur, prev) = fixture_files(tmp.path());
    let report = tmp.path().join("report.json");
    let trees = tmp.path().join("trees");
    let run = cli(&[
        "mvhac", "--current", &cur, "--previous", &prev, "--reference", "PROV",
        "--linkage", "average", "--features", "lq", "--epsilon", "1e-9",
        "--out", path_str(&report), "--newick", path_str(&trees), "--format", "json",
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.is_empty());
    let parsed = read_report(&fs::read_to_string(&report).unwrap()).unwrap();
    for v in &parsed.views {
        let file = trees.join(format!("{}.nwk", v.quadrant.code()));
        assert_eq!(file.exists(), !v.members.is_empty(), "{}", v.quadrant);
        if file.exists() {
            let text = fs::read_to_string(file).unwrap();
            assert!(text.ends_with(";\n") && !text.contains('\r'));
        }
    }
}

#[test]
fn missing_previous_is_a_usage_error() {
    let run = cli(&["mvhac", "--current", "a.csv", "--reference", "P"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("--previous"), "{}", run.stderr);
    assert!(run.stderr.contains("Usage"), "{}", run.stderr);
}

#[test]
fn bad_flag_values_are_usage_errors() {
    for args in [
        &["mvhac", "--current", "a", "--previous", "b", "--reference", "P", "--linkage", "ward"][..],
        &["mvhac", "--current", "a", "--previous", "b", "--reference", "P", "--features", "gdp"][..],
        &["hac", "--input", "a", "--format", "png"][..],
    ] {
        assert_eq!(cli(args).code, 2, "{args:?}");
    }
}

#[test]
fn negative_cell_names_the_cell() {
    let tmp = tempfile::tempdir().unwrap();
    let cur = tmp.path().join("cur.csv");
    let prev = tmp.path().join("prev.csv");
    fs::write(&cur, "region,Agriculture,Mining\nA,10,-3\nP,100,50\n").unwrap();
    fs::write(&prev, "region,Agriculture,Mining\nA,10,3\nP,100,50\n").unwrap();
    let run = cli(&["mvhac", "--current", path_str(&cur), "--previous", path_str(&prev), "--reference", "P"]);
    assert_eq!(run.code, 1);
    for needle in ["cur.csv", "line 2", "`A`", "Mining", "-3"] {
        assert!(run.stderr.contains(needle), "missing {needle}: {}", run.stderr);
    }
}

#[test]
fn mismatched_panels_fail_validation() {
    let tmp = tempfile::tempdir().unwrap();
    let cur = tmp.path().join("cur.csv");
    let prev = tmp.path().join("prev.csv");
    fs::write(&cur, "region,S1,S2\nA,1,2\nP,3,4\n").unwrap();
    fs::write(&prev, "region,S1,S3\nA,1,2\nP,3,4\n").unwrap();
    let run = cli(&["validate", "--current", path_str(&cur), "--previous", path_str(&prev), "--reference", "P"]);
    assert_eq!(run.code, 1);
    assert!(run.stderr.starts_with("error: "));

    fs::write(&prev, "region,S1,S2\nP,3,4\nA,1,2\n").unwrap();
    let run = cli(&["validate", "--current", path_str(&cur), "--previous", path_str(&prev), "--reference", "P"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.stdout, "ok: 1 district(s), 2 sector(s), reference P\n");
}

#[test]
fn missing_file_is_reported() {
    let run = cli(&["lq", "--current", "/nonexistent/cur.csv", "--reference", "P"]);
    assert_eq!(run.code, 1);
    assert!(run.stderr.contains("/nonexistent/cur.csv"));
}

#[test]
fn klassen_with_sector_matrix() {
    let tmp = tempfile::tempdir().unwrap();
    let (cur, prev) = fixture_files(tmp.path());
    let run = cli(&["klassen", "--current", &cur, "--previous", &prev, "--reference", "PROV", "--sectors"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.contains("Sector quadrants"));
    let json = cli(&["klassen", "--current", &cur, "--previous", &prev, "--reference", "PROV", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    assert_eq!(v["districts"].as_array().unwrap().len(), 10);
    assert!(v.get("sector_quadrants").is_none());
}

#[test]
fn zero_previous_sector_fails_sector_typology_with_location() {
    let tmp = tempfile::tempdir().unwrap();
    let cur = tmp.path().join("cur.csv");
    let prev = tmp.path().join("prev.csv");
    fs::write(&cur, "region,S1,S2\nA,5,2\nB,4,4\nP,20,10\n").unwrap();
    fs::write(&prev, "region,S1,S2\nA,5,0\nB,4,4\nP,20,8\n").unwrap();
    let args = ["klassen", "--current", path_str(&cur), "--previous", path_str(&prev), "--reference", "P"];
    assert_eq!(cli(&args).code, 0);
    let mut with_sectors = args.to_vec();
    with_sectors.push("--sectors");
    let run = cli(&with_sectors);
    assert_eq!(run.code, 1);
    assert!(run.stderr.contains("klassen: ") && run.stderr.contains("S2"), "{}", run.stderr);
}

#[test]
fn lq_formats() {
    let tmp = tempfile::tempdir().unwrap();
    let cur = tmp.path().join("cur.csv");
    fs::write(&cur, "region,S1,S2\nA,10,10\nB,1,3\nP,100,300\n").unwrap();
    let base = ["lq", "--current", path_str(&cur), "--reference", "P"];
    let csv = cli(&[&base[..], &["--format", "csv"]].concat());
    assert_eq!(csv.stdout, "district,S1,S2\nA,1,-1\nB,-1,-1\n");
    let values = cli(&[&base[..], &["--format", "csv", "--values"]].concat());
    assert_eq!(values.stdout, "district,S1,S2\nA,2,0.666666666667\nB,1,1\n");
    let json = cli(&[&base[..], &["--format", "json"]].concat());
    let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    assert_eq!(v["counts"]["basis"], 1);
    assert_eq!(v["rows"][1]["labels"][0], "non_basis_unit");
    // a wider tolerance does not turn B into a basis sector
    let wide = cli(&[&base[..], &["--format", "csv", "--epsilon", "0.5"]].concat());
    assert_eq!(wide.stdout, "district,S1,S2\nA,1,-1\nB,-1,-1\n");
}

#[test]
fn hac_subcommand_formats() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("pts.csv");
    fs::write(&input, "id,x\na,0\nb,1\nc,5\n").unwrap();
    let base = ["hac", "--input", path_str(&input), "--linkage", "single"];
    assert_eq!(cli(&base).stdout, "((a:1,b:1):3,c:4);\n");
    let text = cli(&[&base[..], &["--format", "text"]].concat()).stdout;
    assert_eq!(text, "[4] height 4, 3 leaves\n+-- [3] height 1, 2 leaves\n|   +-- a\n|   `-- b\n`-- c\n");
    let dot = cli(&[&base[..], &["--format", "dot"]].concat()).stdout;
    assert!(dot.starts_with("digraph dendrogram {"));
    let json = cli(&[&base[..], &["--format", "json"]].concat()).stdout;
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["merges"][1]["height"], 4.0);
    assert_eq!(v["leaves"][2], "c");

    fs::write(&input, "id,x\na,0\nb,oops\n").unwrap();
    let bad = cli(&base);
    assert_eq!(bad.code, 1);
    assert!(bad.stderr.contains("oops") && bad.stderr.contains("line 3"), "{}", bad.stderr);
}

#[test]
fn text_report_and_tables_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let (cur, prev) = fixture_files(tmp.path());
    let tables = tmp.path().join("tables");
    let run = cli(&[
        "mvhac", "--current", &cur, "--previous", &prev, "--reference", "PROV",
        "--format", "text", "--tables", path_str(&tables),
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.starts_with("Klassen typology, reference PROV\n"));
    assert!(run.stdout.contains("\nQ4 relatively underdeveloped\n"));
    let mut names: Vec<String> = fs::read_dir(&tables).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["indicators.csv", "klassen.csv", "lq.csv", "tables.txt"]);
}

#[test]
fn version_and_help_exit_zero() {
    let v = cli(&["--version"]);
    assert_eq!(v.code, 0);
    assert!(v.stdout.contains(env!("CARGO_PKG_VERSION")));
    assert_eq!(cli(&["mvhac", "--help"]).code, 0);
}

#[test]
fn binary_exit_codes() {
    assert_eq!(cli_process(&[]).code, 2);
    assert_eq!(cli_process(&["validate", "--current", "/nonexistent", "--previous", "/nonexistent", "--reference", "P"]).code, 1);
}
