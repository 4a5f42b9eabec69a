#![allow(dead_code)]

use std::path::{Path, PathBuf};

use mvhac::dataset::{validate_input, AnalysisInput, Panel, RegionRecord};
use mvhac::output::render_panel;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const REF: &str = "PROV";

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, dim: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(lo..hi)).collect())
        .collect()
}

fn sector_names(s: usize) -> Vec<String> {
    (1..=s).map(|i| format!("S{i}")).collect()
}

/// Builds a validated pair from district rows; the reference row is the
/// district sum plus `margin` per sector.
pub fn input_from_rows(cur: Vec<Vec<f64>>, prev: Vec<Vec<f64>>, margin: f64) -> AnalysisInput {
    let s = cur[0].len();
    let names = sector_names(s);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let panel = |rows: Vec<Vec<f64>>, year: &str| {
        let mut reference = vec![0.0; s];
        for r in &rows {
            for (acc, v) in reference.iter_mut().zip(r) {
                *acc += v;
            }
        }
        for (j, v) in reference.iter_mut().enumerate() {
            if *v > 0.0 {
                *v += margin * (j + 1) as f64;
            }
        }
        let mut records: Vec<RegionRecord> = rows
            .into_iter()
            .enumerate()
            .map(|(i, values)| RegionRecord::new(format!("D{:02}", i + 1), values))
            .collect();
        records.push(RegionRecord::new(REF, reference));
        Panel::new(year, &refs, records, REF).unwrap()
    };
    validate_input(panel(cur, "current"), panel(prev, "previous")).unwrap()
}

/// Random pair of panels. With `zero_sectors`, some sectors are zero in
/// every current-year row, giving 0/0 location quotients.
pub fn random_input(rng: &mut ChaCha8Rng, districts: usize, sectors: usize, zero_sectors: bool) -> AnalysisInput {
    let zero: Vec<bool> = (0..sectors)
        .map(|j| zero_sectors && j > 0 && rng.gen_bool(0.2))
        .collect();
    let mut cur = Vec::new();
    let mut prev = Vec::new();
    for _ in 0..districts {
        let scale = rng.gen_range(0.1..10.0);
        let p: Vec<f64> = (0..sectors).map(|_| scale * rng.gen_range(1.0..1000.0)).collect();
        let c: Vec<f64> = p
            .iter()
            .zip(&zero)
            .map(|(v, &z)| if z { 0.0 } else { v * rng.gen_range(0.85..1.25) })
            .collect();
        prev.push(p);
        cur.push(c);
    }
    let margin = rng.gen_range(0.0..500.0);
    input_from_rows(cur, prev, margin)
}

/// Multiplies every value of both panels by `factor`.
pub fn scale_input(input: &AnalysisInput, factor: f64) -> AnalysisInput {
    let scale = |p: &Panel| {
        let mut q = p.clone();
        for r in &mut q.records {
            for v in &mut r.values {
                *v *= factor;
            }
        }
        q
    };
    validate_input(scale(&input.current), scale(&input.previous)).unwrap()
}

pub fn write_input(dir: &Path, input: &AnalysisInput) -> (PathBuf, PathBuf) {
    let cur = dir.join("current.csv");
    let prev = dir.join("previous.csv");
    std::fs::write(&cur, render_panel(&input.current)).unwrap();
    std::fs::write(&prev, render_panel(&input.previous)).unwrap();
    (cur, prev)
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the CLI in-process.
pub fn cli(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["mvhac"];
    argv.extend_from_slice(args);
    let code = mvhac::cli::cli_main(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// Runs the built binary as a separate process.
pub fn cli_process(args: &[&str]) -> Run {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_mvhac"))
        .args(args)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Hand-style evaluation of the district typology: every column total is
/// formed cell by cell and quadrants are read off a lookup table.
pub struct SheetRow {
    pub district: String,
    pub r: f64,
    pub y: f64,
    pub code: &'static str,
}

pub fn sheet_klassen(input: &AnalysisInput) -> (f64, f64, Vec<SheetRow>) {
    let row_total = |rec: &RegionRecord| {
        let mut t = 0.0;
        for v in &rec.values {
            t += *v;
        }
        t
    };
    let reference = &input.current.reference;
    let ref_now = row_total(input.current.record(reference).unwrap());
    let ref_before = row_total(input.previous.record(reference).unwrap());
    let ref_r = 100.0 * (ref_now - ref_before) / ref_before;

    let mut rows = Vec::new();
    for rec in &input.current.records {
        if &rec.region == reference {
            continue;
        }
        let now = row_total(rec);
        let before = row_total(input.previous.record(&rec.region).unwrap());
        rows.push((rec.region.clone(), 100.0 * (now - before) / before, 100.0 * (now + before) / (ref_now + ref_before)));
    }
    let y_bar = rows.iter().map(|r| r.2).sum::<f64>() / rows.len() as f64;
    // [growth at or above][contribution at or above]
    const TABLE: [[&str; 2]; 2] = [["K4", "K2"], ["K3", "K1"]];
    let out = rows
        .into_iter()
        .map(|(district, r, y)| SheetRow {
            district,
            r,
            y,
            code: TABLE[(r >= ref_r) as usize][(y >= y_bar) as usize],
        })
        .collect();
    (ref_r, y_bar, out)
}

/// Hand-style location quotient matrix of the current panel: each cell is
/// the ratio of the district's sector share to the reference's.
pub fn sheet_lq(input: &AnalysisInput) -> Vec<(String, Vec<f64>)> {
    let panel = &input.current;
    let reference = panel.record(&panel.reference).unwrap();
    let big_y: f64 = reference.values.iter().sum();
    panel
        .records
        .iter()
        .filter(|r| r.region != panel.reference)
        .map(|r| {
            let y_j: f64 = r.values.iter().sum();
            let cells = r
                .values
                .iter()
                .zip(&reference.values)
                .map(|(&s_i, &s)| if s == 0.0 { 0.0 } else { (s_i / y_j) / (s / big_y) })
                .collect();
            (r.region.clone(), cells)
        })
        .collect()
}

/// Prim's minimum spanning tree over Euclidean distances; returns edge
/// weights.
pub fn prim_mst(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let dist = |a: usize, b: usize| {
        points[a]
            .iter()
            .zip(&points[b])
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut weights = Vec::with_capacity(n.saturating_sub(1));
    for step in 0..n {
        let u = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .unwrap();
        in_tree[u] = true;
        if step > 0 {
            weights.push(best[u]);
        }
        for v in 0..n {
            if !in_tree[v] {
                best[v] = best[v].min(dist(u, v));
            }
        }
    }
    weights
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs());
    a == b || (a - b).abs() <= tol * scale
}
