//! Canonical JSON report.
//!
//! Every decimal is rounded to 12 significant digits when the report is
//! built, so writing, reading and writing again yields the same bytes. Field
//! order is the declaration order below.

use serde::{Deserialize, Serialize};

use super::round_sig;
use crate::hac::{Dendrogram, Linkage};
use crate::klassen::{KlassenResult, Quadrant, SectorQuadrants};
use crate::lq::{LqLabel, LqProfile};
use crate::multiview::{FeatureSource, MultiviewResult, Provenance, TOOL_VERSION};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub linkage: Linkage,
    pub features: FeatureSource,
    pub epsilon: f64,
    pub standardize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlassenRow {
    pub district: String,
    pub growth_rate: f64,
    pub contribution: f64,
    pub quadrant: Quadrant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlassenSection {
    pub reference: String,
    pub reference_growth: f64,
    pub contribution_benchmark: f64,
    /// Member counts for Q1..Q4.
    pub counts: [usize; 4],
    pub districts: Vec<KlassenRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector_quadrants: Option<Vec<Vec<Quadrant>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LqRow {
    pub district: String,
    pub values: Vec<f64>,
    pub labels: Vec<LqLabel>,
    pub indicators: Vec<i8>,
    /// Sectors absent from both district and reference.
    pub degenerate: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub basis: usize,
    pub non_basis_unit: usize,
    pub non_basis_below: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LqSection {
    pub epsilon: f64,
    pub counts: LabelCounts,
    pub rows: Vec<LqRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeReport {
    pub left: usize,
    pub right: usize,
    pub id: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DendrogramReport {
    pub linkage: Linkage,
    pub leaves: Vec<String>,
    pub inversion: bool,
    pub merges: Vec<MergeReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewReport {
    pub quadrant: Quadrant,
    pub label: String,
    pub members: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub dendrogram: Option<DendrogramReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub config: ReportConfig,
    pub provenance: Provenance,
    pub sectors: Vec<String>,
    pub klassen: KlassenSection,
    pub lq: LqSection,
    pub views: Vec<ViewReport>,
}

fn round_all(v: &[f64]) -> Vec<f64> {
    v.iter().copied().map(round_sig).collect()
}

impl KlassenSection {
    pub fn from_result(k: &KlassenResult) -> Self {
        KlassenSection {
            reference: k.reference.clone(),
            reference_growth: round_sig(k.reference_growth),
            contribution_benchmark: round_sig(k.contribution_benchmark),
            counts: k.counts(),
            districts: k
                .districts
                .iter()
                .map(|e| KlassenRow {
                    district: e.district.clone(),
                    growth_rate: round_sig(e.growth_rate),
                    contribution: round_sig(e.contribution),
                    quadrant: e.quadrant,
                })
                .collect(),
            sector_quadrants: k.sectors.as_ref().map(|s: &SectorQuadrants| {
                s.cells
                    .iter()
                    .map(|row| row.iter().map(|c| c.quadrant).collect())
                    .collect()
            }),
        }
    }
}

impl LqSection {
    pub fn from_profile(p: &LqProfile) -> Self {
        let [basis, non_basis_unit, non_basis_below] = p.label_counts();
        LqSection {
            epsilon: round_sig(p.epsilon),
            counts: LabelCounts {
                basis,
                non_basis_unit,
                non_basis_below,
            },
            rows: p
                .districts
                .iter()
                .zip(&p.cells)
                .map(|(d, cells)| LqRow {
                    district: d.clone(),
                    values: cells.iter().map(|c| round_sig(c.lq)).collect(),
                    labels: cells.iter().map(|c| c.label).collect(),
                    indicators: cells.iter().map(|c| c.label.indicator()).collect(),
                    degenerate: cells
                        .iter()
                        .zip(&p.sectors)
                        .filter(|(c, _)| c.degenerate)
                        .map(|(_, s)| s.clone())
                        .collect(),
                })
                .collect(),
        }
    }
}

impl DendrogramReport {
    pub fn from_dendrogram(d: &Dendrogram) -> Self {
        DendrogramReport {
            linkage: d.linkage,
            leaves: d.labels.clone(),
            inversion: d.inversion,
            merges: d
                .merges
                .iter()
                .map(|m| MergeReport {
                    left: m.left,
                    right: m.right,
                    id: m.id,
                    height: round_sig(m.height),
                    size: m.size,
                })
                .collect(),
        }
    }
}

impl Report {
    pub fn from_result(r: &MultiviewResult) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo {
                name: "mvhac".to_string(),
                version: TOOL_VERSION.to_string(),
            },
            config: ReportConfig {
                linkage: r.config.linkage,
                features: r.config.features,
                epsilon: round_sig(r.config.epsilon),
                standardize: r.config.standardize,
            },
            provenance: r.provenance.clone(),
            sectors: r.sectors.clone(),
            klassen: KlassenSection::from_result(&r.klassen),
            lq: LqSection::from_profile(&r.lq),
            views: r
                .views
                .iter()
                .map(|v| ViewReport {
                    quadrant: v.quadrant,
                    label: v.quadrant.label().to_string(),
                    members: v.members.clone(),
                    features: v.features.iter().map(|row| round_all(row)).collect(),
                    dendrogram: v.dendrogram.as_ref().map(DendrogramReport::from_dendrogram),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Canonical JSON for a pipeline result.
pub fn report_json(result: &MultiviewResult) -> String {
    Report::from_result(result).to_json()
}

pub fn read_report(text: &str) -> Result<Report, serde_json::Error> {
    serde_json::from_str(text)
}
