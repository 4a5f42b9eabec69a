//! Rendering: CSV panels, Newick, DOT, ASCII dendrograms, plain-text and
//! CSV tables, and the canonical JSON report.

use crate::dataset::Panel;

mod dot;
mod newick;
mod report;
mod tables;
mod text;

pub use dot::to_dot;
pub use newick::{parse_newick, to_newick, NewickNode, NewickError};
pub use report::{
    read_report, report_json, DendrogramReport, KlassenRow, KlassenSection, LabelCounts, LqRow,
    LqSection, MergeReport, Report, ReportConfig, ToolInfo, ViewReport, SCHEMA_VERSION,
};
pub use tables::{
    indicator_csv, klassen_csv, lq_values_csv, render_klassen_table, render_lq_table,
    render_tables, IndicatorTable,
};
pub use text::render_text;

/// Rounds to 12 significant digits. Negative zero becomes zero.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    r + 0.0
}

/// Shortest decimal that round-trips the 12-significant-digit rounding of
/// `x`: `1`, `0.5`, `-0.133974596216`.
pub fn fmt_num(x: f64) -> String {
    format!("{}", round_sig(x))
}

/// Canonical CSV form of a panel, LF line endings. Values are written in
/// shortest round-trip form so [`crate::dataset::parse_panel`] restores them
/// exactly.
pub fn render_panel(panel: &Panel) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header = vec!["region".to_string()];
    header.extend(panel.sectors.iter().map(|s| s.name.clone()));
    w.write_record(&header).expect("write to memory");
    for r in &panel.records {
        let mut row = vec![r.region.clone()];
        row.extend(r.values.iter().map(|v| format!("{v}")));
        w.write_record(&row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{parse_panel, synthetic_fixture};

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(4.5), "4.5");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_num(123_456_789.123_456_78), "123456789.123");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
    }

    #[test]
    fn panel_csv_round_trip() {
        let f = synthetic_fixture(5, 4, 3);
        let text = render_panel(&f.current);
        assert!(text.starts_with("region,S1,S2,S3\n"));
        assert!(!text.contains('\r'));
        let mut back = parse_panel(&text, &f.current.reference).unwrap();
        back.year = f.current.year.clone();
        assert_eq!(back, f.current);
    }

    #[test]
    fn panel_csv_quotes_awkward_names() {
        let p = parse_panel("region,\"S,1\",S2\n\"Kab. \"\"X\"\"\",1.5,2\nP,3,4\n", "P").unwrap();
        let text = render_panel(&p);
        let back = parse_panel(&text, "P").unwrap();
        assert_eq!(back, p);
    }
}
