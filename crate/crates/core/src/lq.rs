//! Location quotients and basis / non-basis sector labels.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Panel, RegionRecord};

/// Default tolerance for the `LQ = 1` class.
pub const DEFAULT_EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LqError {
    #[error("region `{0}` has a zero total")]
    ZeroTotal(String),
    #[error("sector #{}: district value {value} against a zero reference value", .index + 1)]
    UndefinedQuotient { index: usize, value: f64 },
    #[error("district and reference have different sector counts ({district} vs {reference})")]
    Shape { district: usize, reference: usize },
    #[error("location quotient {0} is negative or not finite")]
    BadQuotient(f64),
    #[error("tolerance {0} is negative or not finite")]
    BadEpsilon(f64),
    #[error("district `{district}`: {source}")]
    District {
        district: String,
        #[source]
        source: Box<LqError>,
    },
    #[error("district `{district}`, sector `{sector}`: district value {value} against a zero reference value")]
    ZeroReferenceSector {
        district: String,
        sector: String,
        value: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LqLabel {
    /// LQ > 1.
    Basis,
    /// LQ = 1, non-basis with a competitive advantage.
    NonBasisUnit,
    /// LQ < 1.
    NonBasisBelow,
}

impl LqLabel {
    /// `+1` for basis sectors, `-1` for both non-basis classes.
    pub fn indicator(self) -> i8 {
        match self {
            LqLabel::Basis => 1,
            _ => -1,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            LqLabel::Basis => "basis",
            LqLabel::NonBasisUnit => "non_basis_unit",
            LqLabel::NonBasisBelow => "non_basis_below",
        }
    }
}

/// One sector quotient. `degenerate` marks a sector absent from both the
/// district and the reference (0/0), reported as LQ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LqValue {
    pub value: f64,
    pub degenerate: bool,
}

/// `(S_i / Y_j) / (S / Y)` per sector: the district's sector share over the
/// reference's sector share.
pub fn compute_lq(district: &RegionRecord, reference: &RegionRecord) -> Result<Vec<LqValue>, LqError> {
    if district.values.len() != reference.values.len() {
        return Err(LqError::Shape {
            district: district.values.len(),
            reference: reference.values.len(),
        });
    }
    let district_total = district.total();
    let reference_total = reference.total();
    if district_total <= 0.0 || district_total.is_nan() {
        return Err(LqError::ZeroTotal(district.region.clone()));
    }
    if reference_total <= 0.0 || reference_total.is_nan() {
        return Err(LqError::ZeroTotal(reference.region.clone()));
    }
    district
        .values
        .iter()
        .zip(&reference.values)
        .enumerate()
        .map(|(i, (&s_i, &s))| {
            if s == 0.0 {
                if s_i == 0.0 {
                    return Ok(LqValue {
                        value: 0.0,
                        degenerate: true,
                    });
                }
                return Err(LqError::UndefinedQuotient { index: i, value: s_i });
            }
            Ok(LqValue {
                value: (s_i / district_total) / (s / reference_total),
                degenerate: false,
            })
        })
        .collect()
}

pub fn label_lq(lq: f64, epsilon: f64) -> Result<LqLabel, LqError> {
    if !lq.is_finite() || lq < 0.0 {
        return Err(LqError::BadQuotient(lq));
    }
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(LqError::BadEpsilon(epsilon));
    }
    Ok(if lq > 1.0 + epsilon {
        LqLabel::Basis
    } else if (lq - 1.0).abs() <= epsilon {
        LqLabel::NonBasisUnit
    } else {
        LqLabel::NonBasisBelow
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LqCell {
    pub lq: f64,
    pub label: LqLabel,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LqProfile {
    pub epsilon: f64,
    pub districts: Vec<String>,
    pub sectors: Vec<String>,
    /// `cells[d][s]`, districts in panel order.
    pub cells: Vec<Vec<LqCell>>,
}

impl LqProfile {
    pub fn row(&self, district: &str) -> Option<&[LqCell]> {
        let i = self.districts.iter().position(|d| d == district)?;
        Some(&self.cells[i])
    }

    /// `[basis, non-basis unit, non-basis below]` over all cells.
    pub fn label_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for cell in self.cells.iter().flatten() {
            let i = match cell.label {
                LqLabel::Basis => 0,
                LqLabel::NonBasisUnit => 1,
                LqLabel::NonBasisBelow => 2,
            };
            counts[i] += 1;
        }
        counts
    }
}

/// Quotients and labels for every district of one panel (the reference row
/// is the denominator and is not itself profiled).
pub fn lq_profile(panel: &Panel, epsilon: f64) -> Result<LqProfile, LqError> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(LqError::BadEpsilon(epsilon));
    }
    let reference = panel.reference_record();
    let sectors: Vec<String> = panel.sector_names().iter().map(|s| s.to_string()).collect();
    let mut districts = Vec::new();
    let mut cells = Vec::new();
    for d in panel.districts() {
        let located = |e: LqError| match e {
            LqError::UndefinedQuotient { index, value } => LqError::ZeroReferenceSector {
                district: d.region.clone(),
                sector: sectors[index].clone(),
                value,
            },
            other => LqError::District {
                district: d.region.clone(),
                source: Box::new(other),
            },
        };
        let row = compute_lq(d, reference)
            .map_err(located)?
            .into_iter()
            .map(|v| {
                Ok(LqCell {
                    lq: v.value,
                    label: label_lq(v.value, epsilon).map_err(located)?,
                    degenerate: v.degenerate,
                })
            })
            .collect::<Result<Vec<_>, LqError>>()?;
        districts.push(d.region.clone());
        cells.push(row);
    }
    Ok(LqProfile {
        epsilon,
        districts,
        sectors,
        cells,
    })
}
