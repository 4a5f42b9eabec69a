//! Klassen typology: growth rate, two-year contribution and the four
//! development quadrants.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::AnalysisInput;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KlassenError {
    #[error("growth rate undefined: previous-year value {prev} is not positive")]
    UndefinedGrowth { prev: f64 },
    #[error("contribution undefined: two-year total {total} is not positive")]
    UndefinedContribution { total: f64 },
    #[error("non-finite input to quadrant rule")]
    NonFinite,
    #[error("region `{region}`: {source}")]
    Region {
        region: String,
        #[source]
        source: Box<KlassenError>,
    },
    #[error("region `{region}`, sector `{sector}`: {source}")]
    Cell {
        region: String,
        sector: String,
        #[source]
        source: Box<KlassenError>,
    },
    #[error("no districts besides the reference region")]
    NoDistricts,
}

impl KlassenError {
    fn at_region(self, region: &str) -> Self {
        KlassenError::Region {
            region: region.to_string(),
            source: Box::new(self),
        }
    }

    fn at_cell(self, region: &str, sector: &str) -> Self {
        KlassenError::Cell {
            region: region.to_string(),
            sector: sector.to_string(),
            source: Box::new(self),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quadrant {
    Q1,
    Q2,
    Q3,
    Q4,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::Q1, Quadrant::Q2, Quadrant::Q3, Quadrant::Q4];

    pub fn code(self) -> &'static str {
        match self {
            Quadrant::Q1 => "Q1",
            Quadrant::Q2 => "Q2",
            Quadrant::Q3 => "Q3",
            Quadrant::Q4 => "Q4",
        }
    }

    /// Table code, `K1`..`K4`.
    pub fn table_code(self) -> &'static str {
        match self {
            Quadrant::Q1 => "K1",
            Quadrant::Q2 => "K2",
            Quadrant::Q3 => "K3",
            Quadrant::Q4 => "K4",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Quadrant::Q1 => "advanced and rapidly growing",
            Quadrant::Q2 => "advanced but depressed",
            Quadrant::Q3 => "potential or possible-to-develop",
            Quadrant::Q4 => "relatively underdeveloped",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Growth rate `r` and contribution `y`, both in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthContribution {
    pub r: f64,
    pub y: f64,
}

/// Percentage growth from `p_prev` to `p_t`.
pub fn growth_rate(p_t: f64, p_prev: f64) -> Result<f64, KlassenError> {
    if p_prev <= 0.0 || !p_prev.is_finite() {
        return Err(KlassenError::UndefinedGrowth { prev: p_prev });
    }
    Ok((p_t - p_prev) / p_prev * 100.0)
}

/// Two-year share of `p` in `t`, in percent.
pub fn contribution(p_t: f64, p_prev: f64, t_t: f64, t_prev: f64) -> Result<f64, KlassenError> {
    let total = t_t + t_prev;
    if total <= 0.0 || !total.is_finite() {
        return Err(KlassenError::UndefinedContribution { total });
    }
    Ok((p_t + p_prev) / total * 100.0)
}

/// Quadrant rule. Ties go to the higher quadrant: the ladder tests Q1, Q2
/// and Q3 in that order with `>=`.
pub fn classify_quadrant(
    r_subject: f64,
    r_benchmark: f64,
    y_subject: f64,
    y_benchmark: f64,
) -> Result<Quadrant, KlassenError> {
    if ![r_subject, r_benchmark, y_subject, y_benchmark]
        .iter()
        .all(|v| v.is_finite())
    {
        return Err(KlassenError::NonFinite);
    }
    let fast = r_subject >= r_benchmark;
    let large = y_subject >= y_benchmark;
    Ok(match (fast, large) {
        (true, true) => Quadrant::Q1,
        (false, true) => Quadrant::Q2,
        (true, false) => Quadrant::Q3,
        (false, false) => Quadrant::Q4,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistrictEntry {
    pub district: String,
    pub growth_rate: f64,
    pub contribution: f64,
    pub quadrant: Quadrant,
}

/// District × sector quadrant matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorQuadrants {
    pub districts: Vec<String>,
    pub sectors: Vec<String>,
    /// Reference figures per sector.
    pub benchmark: Vec<GrowthContribution>,
    /// `cells[d][s]`.
    pub cells: Vec<Vec<SectorCell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorCell {
    pub growth_rate: f64,
    pub contribution: f64,
    pub quadrant: Quadrant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlassenResult {
    pub reference: String,
    /// Growth of the reference total.
    pub reference_growth: f64,
    /// Mean district contribution, the benchmark on the contribution axis.
    pub contribution_benchmark: f64,
    pub districts: Vec<DistrictEntry>,
    pub sectors: Option<SectorQuadrants>,
}

impl KlassenResult {
    /// District ids in `quadrant`, in input order.
    pub fn members(&self, quadrant: Quadrant) -> Vec<String> {
        self.districts
            .iter()
            .filter(|e| e.quadrant == quadrant)
            .map(|e| e.district.clone())
            .collect()
    }

    pub fn counts(&self) -> [usize; 4] {
        let mut counts = [0; 4];
        for e in &self.districts {
            counts[e.quadrant.index()] += 1;
        }
        counts
    }
}

/// Sector-level figures for one region: growth of every sector and its
/// two-year share of that region's own total.
fn sector_figures(
    cur: &[f64],
    prev: &[f64],
    region: &str,
    sectors: &[&str],
) -> Result<Vec<GrowthContribution>, KlassenError> {
    let t_t: f64 = cur.iter().sum();
    let t_prev: f64 = prev.iter().sum();
    cur.iter()
        .zip(prev)
        .zip(sectors)
        .map(|((&p_t, &p_prev), sector)| {
            let r = growth_rate(p_t, p_prev).map_err(|e| e.at_cell(region, sector))?;
            let y = contribution(p_t, p_prev, t_t, t_prev).map_err(|e| e.at_cell(region, sector))?;
            Ok(GrowthContribution { r, y })
        })
        .collect()
}

/// Quadrant of every (district, sector) cell against the same sector of the
/// reference region.
pub fn klassen_sectors(input: &AnalysisInput) -> Result<SectorQuadrants, KlassenError> {
    let sectors = input.sector_names();
    let reference = input.reference();
    let (ref_cur, ref_prev) = input.pair(reference).expect("validated input");
    let benchmark = sector_figures(&ref_cur.values, &ref_prev.values, reference, &sectors)?;

    let districts = input.district_ids();
    let mut cells = Vec::with_capacity(districts.len());
    for d in &districts {
        let (cur, prev) = input.pair(d).expect("validated input");
        let figures = sector_figures(&cur.values, &prev.values, d, &sectors)?;
        let row = figures
            .iter()
            .zip(&benchmark)
            .zip(&sectors)
            .map(|((s, b), name)| {
                let quadrant =
                    classify_quadrant(s.r, b.r, s.y, b.y).map_err(|e| e.at_cell(d, name))?;
                Ok(SectorCell {
                    growth_rate: s.r,
                    contribution: s.y,
                    quadrant,
                })
            })
            .collect::<Result<Vec<_>, KlassenError>>()?;
        cells.push(row);
    }
    Ok(SectorQuadrants {
        districts,
        sectors: sectors.iter().map(|s| s.to_string()).collect(),
        benchmark,
        cells,
    })
}

/// District-level typology.
///
/// Growth axis: district total growth against reference total growth.
/// Contribution axis: two-year share of the district in the reference
/// total, against the mean share over all districts.
pub fn klassen_districts(input: &AnalysisInput) -> Result<KlassenResult, KlassenError> {
    let reference = input.reference();
    let (ref_cur, ref_prev) = input.pair(reference).expect("validated input");
    let (ref_t, ref_prev_t) = (ref_cur.total(), ref_prev.total());
    let reference_growth = growth_rate(ref_t, ref_prev_t).map_err(|e| e.at_region(reference))?;

    let ids = input.district_ids();
    if ids.is_empty() {
        return Err(KlassenError::NoDistricts);
    }
    let mut figures = Vec::with_capacity(ids.len());
    for d in &ids {
        let (cur, prev) = input.pair(d).expect("validated input");
        let (t, t_prev) = (cur.total(), prev.total());
        let r = growth_rate(t, t_prev).map_err(|e| e.at_region(d))?;
        let y = contribution(t, t_prev, ref_t, ref_prev_t).map_err(|e| e.at_region(d))?;
        figures.push(GrowthContribution { r, y });
    }
    let contribution_benchmark = figures.iter().map(|g| g.y).sum::<f64>() / figures.len() as f64;

    let districts = ids
        .into_iter()
        .zip(&figures)
        .map(|(district, g)| {
            let quadrant = classify_quadrant(g.r, reference_growth, g.y, contribution_benchmark)
                .map_err(|e| e.at_region(&district))?;
            Ok(DistrictEntry {
                district,
                growth_rate: g.r,
                contribution: g.y,
                quadrant,
            })
        })
        .collect::<Result<Vec<_>, KlassenError>>()?;

    Ok(KlassenResult {
        reference: reference.to_string(),
        reference_growth,
        contribution_benchmark,
        districts,
        sectors: None,
    })
}
