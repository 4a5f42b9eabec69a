use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::fmt_num;
use crate::klassen::{KlassenResult, Quadrant};
use crate::lq::LqProfile;
use crate::multiview::MultiviewResult;

/// District × sector matrix of `+1` (basis) and `-1` (non-basis).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorTable {
    pub districts: Vec<String>,
    pub sectors: Vec<String>,
    pub cells: Vec<Vec<i8>>,
}

impl IndicatorTable {
    pub fn from_profile(profile: &LqProfile) -> Self {
        IndicatorTable {
            districts: profile.districts.clone(),
            sectors: profile.sectors.clone(),
            cells: profile
                .cells
                .iter()
                .map(|row| row.iter().map(|c| c.label.indicator()).collect())
                .collect(),
        }
    }

    pub fn basis_count(&self) -> usize {
        self.cells.iter().flatten().filter(|&&v| v == 1).count()
    }
}

/// Two-space separated columns; the first column is left-aligned and the
/// rest right-aligned. Every line is indented by `indent`.
fn align(rows: &[Vec<String>], indent: &str) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::from(indent);
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                line.push_str(cell);
                line.extend(std::iter::repeat_n(' ', pad));
            } else {
                line.extend(std::iter::repeat_n(' ', pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

pub fn render_klassen_table(klassen: &KlassenResult) -> String {
    let mut out = String::new();
    writeln!(out, "Klassen typology, reference {}", klassen.reference).unwrap();
    writeln!(out, "reference growth rate (%): {}", fmt_num(klassen.reference_growth)).unwrap();
    writeln!(out, "contribution benchmark (%): {}", fmt_num(klassen.contribution_benchmark)).unwrap();
    for q in Quadrant::ALL {
        let members: Vec<_> = klassen.districts.iter().filter(|e| e.quadrant == q).collect();
        writeln!(out, "\n{} {}: {} district(s)", q.table_code(), q.label(), members.len()).unwrap();
        let mut rows = vec![vec![
            "district".to_string(),
            "r_d (%)".to_string(),
            "y_d (%)".to_string(),
            "quadrant".to_string(),
        ]];
        rows.extend(members.iter().map(|e| {
            vec![
                e.district.clone(),
                fmt_num(e.growth_rate),
                fmt_num(e.contribution),
                q.table_code().to_string(),
            ]
        }));
        out.push_str(&align(&rows, "  "));
    }
    if let Some(sq) = &klassen.sectors {
        writeln!(out, "\nSector quadrants").unwrap();
        let mut header = vec!["district".to_string()];
        header.extend(sq.sectors.iter().cloned());
        let mut rows = vec![header];
        for (d, cells) in sq.districts.iter().zip(&sq.cells) {
            let mut row = vec![d.clone()];
            row.extend(cells.iter().map(|c| c.quadrant.table_code().to_string()));
            rows.push(row);
        }
        out.push_str(&align(&rows, "  "));
    }
    out
}

pub fn render_lq_table(profile: &LqProfile) -> String {
    let table = IndicatorTable::from_profile(profile);
    let mut out = String::new();
    writeln!(
        out,
        "Location quotient indicators (1 = basis, -1 = non-basis), tolerance {}",
        fmt_num(profile.epsilon)
    )
    .unwrap();
    let mut header = vec!["district".to_string()];
    header.extend(table.sectors.iter().cloned());
    let mut rows = vec![header];
    for (d, cells) in table.districts.iter().zip(&table.cells) {
        let mut row = vec![d.clone()];
        row.extend(cells.iter().map(|v| v.to_string()));
        rows.push(row);
    }
    out.push_str(&align(&rows, "  "));
    let [basis, unit, below] = profile.label_counts();
    writeln!(
        out,
        "basis: {basis}, non-basis: {} (LQ = 1: {unit}, LQ < 1: {below}), cells: {}",
        unit + below,
        basis + unit + below
    )
    .unwrap();
    let degenerate: Vec<String> = profile
        .districts
        .iter()
        .zip(&profile.cells)
        .flat_map(|(d, row)| {
            row.iter()
                .zip(&profile.sectors)
                .filter(|(c, _)| c.degenerate)
                .map(move |(_, s)| format!("{d}/{s}"))
        })
        .collect();
    if !degenerate.is_empty() {
        writeln!(out, "degenerate cells (0/0, LQ reported as 0): {}", degenerate.join(", ")).unwrap();
    }
    out
}

/// Klassen table grouped by quadrant followed by the ±1 indicator table.
pub fn render_tables(result: &MultiviewResult) -> String {
    format!("{}\n{}", render_klassen_table(&result.klassen), render_lq_table(&result.lq))
}

fn csv_text(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
}

/// `district,r_d,y_d,quadrant` with `K1`..`K4` codes, districts in input
/// order.
pub fn klassen_csv(klassen: &KlassenResult) -> String {
    let mut rows = vec![vec!["district".into(), "r_d".into(), "y_d".into(), "quadrant".into()]];
    rows.extend(klassen.districts.iter().map(|e| {
        vec![
            e.district.clone(),
            fmt_num(e.growth_rate),
            fmt_num(e.contribution),
            e.quadrant.table_code().to_string(),
        ]
    }));
    csv_text(rows)
}

fn matrix_csv<T>(profile: &LqProfile, cell: impl Fn(&crate::lq::LqCell) -> T) -> String
where
    T: ToString,
{
    let mut header = vec!["district".to_string()];
    header.extend(profile.sectors.iter().cloned());
    let mut rows = vec![header];
    for (d, cells) in profile.districts.iter().zip(&profile.cells) {
        let mut row = vec![d.clone()];
        row.extend(cells.iter().map(|c| cell(c).to_string()));
        rows.push(row);
    }
    csv_text(rows)
}

pub fn indicator_csv(profile: &LqProfile) -> String {
    matrix_csv(profile, |c| c.label.indicator())
}

pub fn lq_values_csv(profile: &LqProfile) -> String {
    matrix_csv(profile, |c| fmt_num(c.lq))
}
