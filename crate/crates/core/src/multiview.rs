//! The full pipeline: districts are split into Klassen quadrants, and the
//! members of each quadrant are clustered on their own feature vectors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dataset::{AnalysisInput, Panel};
use crate::hac::{agglomerate, Dendrogram, HacError, Linkage};
use crate::klassen::{self, klassen_districts, KlassenError, KlassenResult, Quadrant};
use crate::lq::{lq_profile, LqError, LqProfile, DEFAULT_EPSILON};
use crate::output::render_panel;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MvhacError {
    #[error("klassen: {0}")]
    Klassen(#[from] KlassenError),
    #[error("lq: {0}")]
    Lq(#[from] LqError),
    #[error("hac:{quadrant}: {source}")]
    Hac {
        quadrant: Quadrant,
        #[source]
        source: HacError,
    },
    #[error("features: unknown district `{0}`")]
    UnknownMember(String),
    #[error("features: no members")]
    NoMembers,
    #[error("features: {0}")]
    Features(KlassenError),
    #[error("config: tolerance {0} is negative or not finite")]
    BadEpsilon(f64),
}

/// What each district is described by when clustering inside a quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSource {
    /// Current-year location quotient per sector.
    Lq,
    /// Current-year sector values.
    RawCurrent,
    /// Growth rate and own-region contribution per sector, interleaved
    /// `r(S1), y(S1), r(S2), ...`.
    GrowthContribution,
}

impl FeatureSource {
    pub const ALL: [FeatureSource; 3] = [
        FeatureSource::Lq,
        FeatureSource::RawCurrent,
        FeatureSource::GrowthContribution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureSource::Lq => "lq",
            FeatureSource::RawCurrent => "raw_current",
            FeatureSource::GrowthContribution => "growth_contribution",
        }
    }
}

impl fmt::Display for FeatureSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureSource::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown feature source `{s}` (expected lq, raw_current or growth_contribution)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MvhacConfig {
    pub linkage: Linkage,
    pub epsilon: f64,
    pub features: FeatureSource,
    /// z-score every feature column within a quadrant before clustering.
    pub standardize: bool,
}

impl Default for MvhacConfig {
    fn default() -> Self {
        MvhacConfig {
            linkage: Linkage::Average,
            epsilon: DEFAULT_EPSILON,
            features: FeatureSource::Lq,
            standardize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrantView {
    pub quadrant: Quadrant,
    pub members: Vec<String>,
    /// One row per member, in member order.
    pub features: Vec<Vec<f64>>,
    /// `None` for an empty quadrant.
    pub dendrogram: Option<Dendrogram>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub current_sha256: String,
    pub previous_sha256: String,
    pub tool_version: String,
}

impl Provenance {
    pub fn of(input: &AnalysisInput) -> Self {
        Provenance {
            current_sha256: panel_digest(&input.current),
            previous_sha256: panel_digest(&input.previous),
            tool_version: TOOL_VERSION.to_string(),
        }
    }
}

/// SHA-256 of the canonical CSV rendering of a panel, lowercase hex.
pub fn panel_digest(panel: &Panel) -> String {
    Sha256::digest(render_panel(panel).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiviewResult {
    pub sectors: Vec<String>,
    pub klassen: KlassenResult,
    pub lq: LqProfile,
    /// Always four views, Q1 to Q4.
    pub views: Vec<QuadrantView>,
    pub config: MvhacConfig,
    pub provenance: Provenance,
}

impl MultiviewResult {
    pub fn view(&self, quadrant: Quadrant) -> &QuadrantView {
        &self.views[quadrant.index()]
    }
}

/// In-place column z-scores with the population standard deviation.
/// Constant columns are left as they are.
pub fn standardize_columns(rows: &mut [Vec<f64>]) {
    let Some(first) = rows.first() else { return };
    let n = rows.len() as f64;
    for c in 0..first.len() {
        let mean = rows.iter().map(|r| r[c]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[c] - mean) * (r[c] - mean)).sum::<f64>() / n;
        if var > 0.0 {
            let sd = var.sqrt();
            for r in rows.iter_mut() {
                r[c] = (r[c] - mean) / sd;
            }
        }
    }
}

pub fn feature_vectors(
    input: &AnalysisInput,
    profile: &LqProfile,
    config: &MvhacConfig,
    members: &[String],
) -> Result<Vec<Vec<f64>>, MvhacError> {
    if members.is_empty() {
        return Err(MvhacError::NoMembers);
    }
    let mut rows = Vec::with_capacity(members.len());
    for m in members {
        if m == input.reference() {
            return Err(MvhacError::UnknownMember(m.clone()));
        }
        let row = match config.features {
            FeatureSource::Lq => profile
                .row(m)
                .ok_or_else(|| MvhacError::UnknownMember(m.clone()))?
                .iter()
                .map(|c| c.lq)
                .collect(),
            FeatureSource::RawCurrent => input
                .current
                .record(m)
                .ok_or_else(|| MvhacError::UnknownMember(m.clone()))?
                .values
                .clone(),
            FeatureSource::GrowthContribution => {
                let (cur, prev) = input
                    .pair(m)
                    .ok_or_else(|| MvhacError::UnknownMember(m.clone()))?;
                let (t, t_prev) = (cur.total(), prev.total());
                let mut row = Vec::with_capacity(2 * cur.values.len());
                for ((&p, &q), sector) in cur.values.iter().zip(&prev.values).zip(input.sector_names()) {
                    let at = |e: KlassenError| {
                        MvhacError::Features(KlassenError::Cell {
                            region: m.clone(),
                            sector: sector.to_string(),
                            source: Box::new(e),
                        })
                    };
                    row.push(klassen::growth_rate(p, q).map_err(at)?);
                    row.push(klassen::contribution(p, q, t, t_prev).map_err(at)?);
                }
                row
            }
        };
        rows.push(row);
    }
    if config.standardize {
        standardize_columns(&mut rows);
    }
    Ok(rows)
}

/// Clusters one quadrant's members. Empty membership gives no dendrogram.
pub fn quadrant_view(
    input: &AnalysisInput,
    profile: &LqProfile,
    config: &MvhacConfig,
    quadrant: Quadrant,
    members: Vec<String>,
) -> Result<QuadrantView, MvhacError> {
    if members.is_empty() {
        return Ok(QuadrantView {
            quadrant,
            members,
            features: Vec::new(),
            dendrogram: None,
        });
    }
    let features = feature_vectors(input, profile, config, &members)?;
    let hac_err = |source| MvhacError::Hac { quadrant, source };
    let dendrogram = agglomerate(&features, config.linkage)
        .map_err(hac_err)?
        .with_labels(members.clone())
        .map_err(hac_err)?;
    Ok(QuadrantView {
        quadrant,
        members,
        features,
        dendrogram: Some(dendrogram),
    })
}

pub fn run_mvhac(input: &AnalysisInput, config: &MvhacConfig) -> Result<MultiviewResult, MvhacError> {
    if !config.epsilon.is_finite() || config.epsilon < 0.0 {
        return Err(MvhacError::BadEpsilon(config.epsilon));
    }
    let klassen = klassen_districts(input)?;
    let lq = lq_profile(&input.current, config.epsilon)?;
    let views = Quadrant::ALL
        .into_iter()
        .map(|q| quadrant_view(input, &lq, config, q, klassen.members(q)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MultiviewResult {
        sectors: input.sector_names().iter().map(|s| s.to_string()).collect(),
        klassen,
        lq,
        views,
        config: *config,
        provenance: Provenance::of(input),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{parse_panel, synthetic_fixture, validate_input};

    fn small() -> AnalysisInput {
        validate_input(
            parse_panel("region,S1,S2\nA,10,10\nB,4,4\nP,100,300\n", "P").unwrap(),
            parse_panel("region,S1,S2\nA,9,10\nB,4,3\nP,90,280\n", "P").unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn lq_features_pass_through() {
        let input = small();
        let profile = lq_profile(&input.current, 1e-9).unwrap();
        let rows = feature_vectors(&input, &profile, &MvhacConfig::default(), &["A".into()]).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0][0] - 2.0).abs() < 1e-12);
        assert!((rows[0][1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn raw_and_growth_features() {
        let input = small();
        let profile = lq_profile(&input.current, 1e-9).unwrap();
        let raw = MvhacConfig {
            features: FeatureSource::RawCurrent,
            ..Default::default()
        };
        assert_eq!(feature_vectors(&input, &profile, &raw, &["B".into()]).unwrap(), vec![vec![4.0, 4.0]]);
        let gc = MvhacConfig {
            features: FeatureSource::GrowthContribution,
            ..Default::default()
        };
        let row = &feature_vectors(&input, &profile, &gc, &["B".into()]).unwrap()[0];
        // B: S1 4→4 (r 0), S2 3→4 (r 33.3); totals 7→8, y(S1)=8/15, y(S2)=7/15
        assert_eq!(row.len(), 4);
        assert_eq!(row[0], 0.0);
        assert!((row[1] - 800.0 / 15.0).abs() < 1e-12);
        assert!((row[2] - 100.0 / 3.0).abs() < 1e-12);
        assert!((row[3] - 700.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_members_rejected() {
        let input = small();
        let profile = lq_profile(&input.current, 1e-9).unwrap();
        let cfg = MvhacConfig::default();
        assert_eq!(
            feature_vectors(&input, &profile, &cfg, &["Z".into()]).unwrap_err(),
            MvhacError::UnknownMember("Z".into())
        );
        assert!(feature_vectors(&input, &profile, &cfg, &["P".into()]).is_err());
        assert_eq!(feature_vectors(&input, &profile, &cfg, &[]).unwrap_err(), MvhacError::NoMembers);
    }

    #[test]
    fn standardize_rules() {
        let mut rows = vec![vec![1.0, 7.0], vec![2.0, 7.0], vec![3.0, 7.0]];
        standardize_columns(&mut rows);
        let s = (1.5f64).sqrt(); // 1 / population sd of [1,2,3] = sqrt(3/2)
        assert!((rows[0][0] + s).abs() < 1e-12);
        assert_eq!(rows[1][0], 0.0);
        assert!((rows[2][0] - s).abs() < 1e-12);
        assert!(rows.iter().all(|r| r[1] == 7.0));
    }

    #[test]
    fn single_district_pipeline() {
        let input = validate_input(
            parse_panel("region,S1,S2\nA,10,10\nP,100,300\n", "P").unwrap(),
            parse_panel("region,S1,S2\nA,9,10\nP,90,280\n", "P").unwrap(),
        )
        .unwrap();
        let res = run_mvhac(&input, &MvhacConfig::default()).unwrap();
        assert_eq!(res.views.len(), 4);
        let nonempty: Vec<_> = res.views.iter().filter(|v| !v.members.is_empty()).collect();
        assert_eq!(nonempty.len(), 1);
        let d = nonempty[0].dendrogram.as_ref().unwrap();
        assert!(d.merges.is_empty());
        assert_eq!(d.labels, vec!["A"]);
        assert!(res.views.iter().filter(|v| v.members.is_empty()).all(|v| v.dendrogram.is_none()));
    }

    #[test]
    fn views_partition_districts() {
        let input = synthetic_fixture(3, 12, 5);
        let res = run_mvhac(&input, &MvhacConfig::default()).unwrap();
        let mut all: Vec<String> = res.views.iter().flat_map(|v| v.members.clone()).collect();
        all.sort();
        let mut expected = input.district_ids();
        expected.sort();
        assert_eq!(all, expected);
        for v in &res.views {
            assert_eq!(v.members, res.klassen.members(v.quadrant));
            if let Some(d) = &v.dendrogram {
                assert_eq!(d.labels, v.members);
                assert_eq!(d.merges.len(), v.members.len() - 1);
            }
        }
    }

    #[test]
    fn stage_context_in_errors() {
        let input = validate_input(
            parse_panel("region,S1,S2\nA,10,10\nP,100,0\n", "P").unwrap(),
            parse_panel("region,S1,S2\nA,9,10\nP,90,280\n", "P").unwrap(),
        )
        .unwrap();
        let err = run_mvhac(&input, &MvhacConfig::default()).unwrap_err();
        assert!(err.to_string().starts_with("lq: "), "{err}");
        let bad = MvhacConfig {
            epsilon: -1.0,
            ..Default::default()
        };
        assert_eq!(run_mvhac(&small(), &bad).unwrap_err(), MvhacError::BadEpsilon(-1.0));
    }
}
