//! Two-year GRDP panels: parsing, validation and a deterministic fixture
//! generator.
//!
//! A [`Panel`] holds one year of sector values for every district plus the
//! reference (province) row. An [`AnalysisInput`] pairs the current and the
//! previous year after checking that both describe the same regions and the
//! same sectors.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Year label given to the current-year panel by the CLI and the fixture.
pub const CURRENT_YEAR: &str = "current";
/// Year label given to the previous-year panel by the CLI and the fixture.
pub const PREVIOUS_YEAR: &str = "previous";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("empty input: no header row")]
    MissingHeader,
    #[error("header: first column must be `region`, found `{0}`")]
    BadFirstColumn(String),
    #[error("header: no sector columns after `region`")]
    NoSectors,
    #[error("header column {column}: empty sector name")]
    EmptySectorName { column: usize },
    #[error("header column {column}: duplicate sector `{name}`")]
    DuplicateSector { column: usize, name: String },
    #[error("no data rows after the header")]
    EmptyBody,
    #[error("need at least one district and the reference row, found {0} data row(s)")]
    TooFewRows(usize),
    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: empty region identifier")]
    EmptyRegion { line: u64 },
    #[error("line {line}: duplicate region `{region}`")]
    DuplicateRegion { line: u64, region: String },
    #[error("line {line}, region `{region}`, column `{column}`: not a decimal number: `{value}`")]
    NonNumeric {
        line: u64,
        region: String,
        column: String,
        value: String,
    },
    #[error("line {line}, region `{region}`, column `{column}`: value `{value}` is not finite")]
    NonFinite {
        line: u64,
        region: String,
        column: String,
        value: String,
    },
    #[error("line {line}, region `{region}`, column `{column}`: negative value `{value}`")]
    NegativeValue {
        line: u64,
        region: String,
        column: String,
        value: String,
    },
    #[error("line {line}, region `{region}`: region total is zero")]
    ZeroTotal { line: u64, region: String },
    #[error("reference region `{0}` not found")]
    ReferenceAbsent(String),
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("sector lists differ: current has [{current}], previous has [{previous}]")]
    SectorMismatch { current: String, previous: String },
    #[error("region sets differ: {0}")]
    RegionMismatch(String),
    #[error("reference regions differ: current `{current}`, previous `{previous}`")]
    ReferenceMismatch { current: String, previous: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SectorId {
    pub name: String,
    pub ordinal: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRecord {
    pub region: String,
    pub values: Vec<f64>,
}

impl RegionRecord {
    pub fn new(region: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            region: region.into(),
            values,
        }
    }

    /// Sum of all sector values, accumulated left to right.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub year: String,
    pub sectors: Vec<SectorId>,
    pub records: Vec<RegionRecord>,
    pub reference: String,
}

impl Panel {
    /// Builds a panel from already-parsed parts, enforcing every panel
    /// invariant.
    pub fn new(
        year: impl Into<String>,
        sector_names: &[&str],
        records: Vec<RegionRecord>,
        reference: impl Into<String>,
    ) -> Result<Self, DatasetError> {
        let sectors = sector_names
            .iter()
            .enumerate()
            .map(|(ordinal, name)| SectorId {
                name: (*name).to_string(),
                ordinal,
            })
            .collect();
        let panel = Panel {
            year: year.into(),
            sectors,
            records,
            reference: reference.into(),
        };
        panel.check()?;
        Ok(panel)
    }

    fn check(&self) -> Result<(), DatasetError> {
        if self.sectors.is_empty() {
            return Err(DatasetError::NoSectors);
        }
        let mut names = HashSet::new();
        for (i, s) in self.sectors.iter().enumerate() {
            if s.name.is_empty() {
                return Err(DatasetError::EmptySectorName { column: i + 1 });
            }
            if s.ordinal != i {
                return Err(DatasetError::Invalid(format!(
                    "sector `{}` has ordinal {} at position {i}",
                    s.name, s.ordinal
                )));
            }
            if !names.insert(s.name.as_str()) {
                return Err(DatasetError::DuplicateSector {
                    column: i + 1,
                    name: s.name.clone(),
                });
            }
        }
        if self.records.len() < 2 {
            return Err(DatasetError::TooFewRows(self.records.len()));
        }
        let mut regions = HashSet::new();
        for (row, rec) in self.records.iter().enumerate() {
            let line = row as u64 + 2;
            if rec.region.is_empty() {
                return Err(DatasetError::EmptyRegion { line });
            }
            if !regions.insert(rec.region.as_str()) {
                return Err(DatasetError::DuplicateRegion {
                    line,
                    region: rec.region.clone(),
                });
            }
            if rec.values.len() != self.sectors.len() {
                return Err(DatasetError::RaggedRow {
                    line,
                    expected: self.sectors.len() + 1,
                    found: rec.values.len() + 1,
                });
            }
            for (v, s) in rec.values.iter().zip(&self.sectors) {
                let cell = || (line, rec.region.clone(), s.name.clone(), v.to_string());
                if !v.is_finite() {
                    let (line, region, column, value) = cell();
                    return Err(DatasetError::NonFinite {
                        line,
                        region,
                        column,
                        value,
                    });
                }
                if *v < 0.0 {
                    let (line, region, column, value) = cell();
                    return Err(DatasetError::NegativeValue {
                        line,
                        region,
                        column,
                        value,
                    });
                }
            }
            if rec.total() <= 0.0 || rec.total().is_nan() {
                return Err(DatasetError::ZeroTotal {
                    line,
                    region: rec.region.clone(),
                });
            }
        }
        if !regions.contains(self.reference.as_str()) {
            return Err(DatasetError::ReferenceAbsent(self.reference.clone()));
        }
        Ok(())
    }

    pub fn sector_names(&self) -> Vec<&str> {
        self.sectors.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn record(&self, region: &str) -> Option<&RegionRecord> {
        self.records.iter().find(|r| r.region == region)
    }

    pub fn reference_record(&self) -> &RegionRecord {
        self.record(&self.reference)
            .expect("validated panel contains its reference row")
    }

    /// District rows in input order, reference excluded.
    pub fn districts(&self) -> impl Iterator<Item = &RegionRecord> {
        self.records.iter().filter(move |r| r.region != self.reference)
    }

    pub fn district_ids(&self) -> Vec<String> {
        self.districts().map(|r| r.region.clone()).collect()
    }
}

/// Parses a plain decimal (see [`is_plain_decimal`]) to a finite value.
pub(crate) fn parse_decimal(s: &str) -> Option<f64> {
    if !is_plain_decimal(s) {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Plain decimal with an optional exponent: `12`, `-3.5`, `.5`, `1e6`.
/// Rejects thousands separators, `inf`, `nan` and hex forms that
/// `f64::from_str` would otherwise accept.
fn is_plain_decimal(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return false;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return false;
        }
    }
    i == b.len()
}

/// Parses one year of GRDP values from CSV text.
///
/// The header must be `region,<sector>,...`; every following row is one
/// region. `reference` selects the province row. LF and CRLF line endings
/// are both accepted. Year is left empty; see [`Panel::year`].
pub fn parse_panel(csv_text: &str, reference: &str) -> Result<Panel, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(csv_text.as_bytes());

    let mut rows = reader.records();
    let header = match rows.next() {
        None => return Err(DatasetError::MissingHeader),
        Some(r) => r.map_err(|e| DatasetError::Csv(e.to_string()))?,
    };
    let first = header.get(0).unwrap_or("");
    if first != "region" {
        return Err(DatasetError::BadFirstColumn(first.to_string()));
    }
    if header.len() < 2 {
        return Err(DatasetError::NoSectors);
    }
    let mut sectors = Vec::with_capacity(header.len() - 1);
    let mut seen = HashSet::new();
    for (i, name) in header.iter().skip(1).enumerate() {
        if name.is_empty() {
            return Err(DatasetError::EmptySectorName { column: i + 2 });
        }
        if name == "region" || !seen.insert(name.to_string()) {
            return Err(DatasetError::DuplicateSector {
                column: i + 2,
                name: name.to_string(),
            });
        }
        sectors.push(SectorId {
            name: name.to_string(),
            ordinal: i,
        });
    }

    let mut records = Vec::new();
    let mut regions: HashMap<String, u64> = HashMap::new();
    for row in rows {
        let row = row.map_err(|e| DatasetError::Csv(e.to_string()))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        // A blank line yields a single empty field.
        if row.len() == 1 && row.get(0) == Some("") {
            continue;
        }
        if row.len() != header.len() {
            return Err(DatasetError::RaggedRow {
                line,
                expected: header.len(),
                found: row.len(),
            });
        }
        let region = row.get(0).unwrap_or("").to_string();
        if region.is_empty() {
            return Err(DatasetError::EmptyRegion { line });
        }
        if regions.contains_key(&region) {
            return Err(DatasetError::DuplicateRegion { line, region });
        }
        let mut values = Vec::with_capacity(sectors.len());
        for (cell, sector) in row.iter().skip(1).zip(&sectors) {
            if !is_plain_decimal(cell) {
                return Err(DatasetError::NonNumeric {
                    line,
                    region,
                    column: sector.name.clone(),
                    value: cell.to_string(),
                });
            }
            let v: f64 = cell.parse().map_err(|_| DatasetError::NonNumeric {
                line,
                region: region.clone(),
                column: sector.name.clone(),
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(DatasetError::NonFinite {
                    line,
                    region,
                    column: sector.name.clone(),
                    value: cell.to_string(),
                });
            }
            if v < 0.0 {
                return Err(DatasetError::NegativeValue {
                    line,
                    region,
                    column: sector.name.clone(),
                    value: cell.to_string(),
                });
            }
            // normalizes "-0"
            values.push(v + 0.0);
        }
        let rec = RegionRecord { region, values };
        if rec.total() <= 0.0 || rec.total().is_nan() {
            return Err(DatasetError::ZeroTotal {
                line,
                region: rec.region,
            });
        }
        regions.insert(rec.region.clone(), line);
        records.push(rec);
    }

    if records.is_empty() {
        return Err(DatasetError::EmptyBody);
    }
    if !regions.contains_key(reference) {
        return Err(DatasetError::ReferenceAbsent(reference.to_string()));
    }
    if records.len() < 2 {
        return Err(DatasetError::TooFewRows(records.len()));
    }
    Ok(Panel {
        year: String::new(),
        sectors,
        records,
        reference: reference.to_string(),
    })
}

/// A current/previous panel pair that describe the same regions and sectors.
/// Region order in `previous` follows `current`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisInput {
    pub current: Panel,
    pub previous: Panel,
}

impl AnalysisInput {
    pub fn reference(&self) -> &str {
        &self.current.reference
    }

    pub fn district_ids(&self) -> Vec<String> {
        self.current.district_ids()
    }

    pub fn sector_names(&self) -> Vec<&str> {
        self.current.sector_names()
    }

    /// `(current, previous)` rows for one region.
    pub fn pair(&self, region: &str) -> Option<(&RegionRecord, &RegionRecord)> {
        Some((self.current.record(region)?, self.previous.record(region)?))
    }
}

pub fn validate_input(current: Panel, previous: Panel) -> Result<AnalysisInput, DatasetError> {
    current.check()?;
    previous.check()?;
    if current.sector_names() != previous.sector_names() {
        return Err(DatasetError::SectorMismatch {
            current: current.sector_names().join(","),
            previous: previous.sector_names().join(","),
        });
    }
    if current.reference != previous.reference {
        return Err(DatasetError::ReferenceMismatch {
            current: current.reference.clone(),
            previous: previous.reference.clone(),
        });
    }

    let cur_set: HashSet<&str> = current.records.iter().map(|r| r.region.as_str()).collect();
    let prev_set: HashSet<&str> = previous.records.iter().map(|r| r.region.as_str()).collect();
    if cur_set != prev_set {
        let mut missing: Vec<&str> = cur_set.difference(&prev_set).copied().collect();
        let mut extra: Vec<&str> = prev_set.difference(&cur_set).copied().collect();
        missing.sort_unstable();
        extra.sort_unstable();
        let mut parts = Vec::new();
        if !missing.is_empty() {
            parts.push(format!("missing from previous: {}", missing.join(", ")));
        }
        if !extra.is_empty() {
            parts.push(format!("missing from current: {}", extra.join(", ")));
        }
        return Err(DatasetError::RegionMismatch(parts.join("; ")));
    }

    let mut by_region: HashMap<String, RegionRecord> = previous
        .records
        .into_iter()
        .map(|r| (r.region.clone(), r))
        .collect();
    let records = current
        .records
        .iter()
        .map(|r| by_region.remove(&r.region).expect("region sets are equal"))
        .collect();
    let previous = Panel {
        year: previous.year,
        sectors: previous.sectors,
        records,
        reference: previous.reference,
    };
    Ok(AnalysisInput { current, previous })
}

/// Reference row identifier used by [`synthetic_fixture`].
pub const FIXTURE_REFERENCE: &str = "PROV";

/// Deterministic synthetic two-year panel.
///
/// District rows are drawn from a seeded ChaCha stream; each district has its
/// own size and growth tendency so that quadrants are populated unevenly. The
/// reference row is the element-wise district sum plus a positive margin.
/// Values are rounded to cents.
pub fn synthetic_fixture(seed: u64, districts: usize, sectors: usize) -> AnalysisInput {
    assert!(districts >= 1 && sectors >= 1, "fixture needs ≥ 1 district and ≥ 1 sector");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cents = |v: f64| (v * 100.0).round() / 100.0;

    let names: Vec<String> = (1..=sectors).map(|i| format!("S{i}")).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let width = districts.to_string().len().max(2);

    let mut prev_rows = Vec::with_capacity(districts + 1);
    let mut cur_rows = Vec::with_capacity(districts + 1);
    for d in 0..districts {
        let id = format!("D{:0width$}", d + 1);
        let scale = rng.gen_range(0.2..5.0);
        let trend = rng.gen_range(-0.04..0.12);
        let mut prev = Vec::with_capacity(sectors);
        let mut cur = Vec::with_capacity(sectors);
        for _ in 0..sectors {
            let base = cents(scale * rng.gen_range(50.0..1500.0)).max(0.01);
            let growth = 1.0 + trend + rng.gen_range(-0.06..0.06);
            prev.push(base);
            cur.push(cents(base * growth).max(0.01));
        }
        prev_rows.push(RegionRecord::new(id.clone(), prev));
        cur_rows.push(RegionRecord::new(id, cur));
    }

    let reference_row = |rows: &[RegionRecord], margins: &[f64]| {
        let values = (0..sectors)
            .map(|s| cents(rows.iter().map(|r| r.values[s]).sum::<f64>() + margins[s]))
            .collect();
        RegionRecord::new(FIXTURE_REFERENCE, values)
    };
    let prev_margin: Vec<f64> = (0..sectors).map(|_| rng.gen_range(10.0..400.0)).collect();
    let cur_margin: Vec<f64> = prev_margin
        .iter()
        .map(|m| m * (1.0 + rng.gen_range(0.0..0.08)))
        .collect();
    let prev_ref = reference_row(&prev_rows, &prev_margin);
    let cur_ref = reference_row(&cur_rows, &cur_margin);
    prev_rows.push(prev_ref);
    cur_rows.push(cur_ref);

    let current = Panel::new(CURRENT_YEAR, &name_refs, cur_rows, FIXTURE_REFERENCE)
        .expect("fixture panel is valid");
    let previous = Panel::new(PREVIOUS_YEAR, &name_refs, prev_rows, FIXTURE_REFERENCE)
        .expect("fixture panel is valid");
    validate_input(current, previous).expect("fixture panels agree")
}
