//! CSV and JSON documents written by the commands.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use spinent::analytic::{Kink, KinkKind};
use spinent::ed::GroundState;
use spinent::entanglement::EntanglementReport;
use spinent::observables::{CorrelatorSet, XForm};
use spinent::pauli::Family;
use spinent::sweep::{DetectorParams, Route, SweepResult};
use spinent::verify::CriterionResult;

pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub const CSV_COLUMNS: [&str; 8] = [
    "param",
    "energy_per_site",
    "xx_plus_yy",
    "zz",
    "c_tilde",
    "concurrence",
    "entropy",
    "degenerate_flag",
];

/// One row per grid point. With both routes the closed-form columns follow
/// under an `analytic_` prefix.
pub fn write_sweep_csv(path: &Path, r: &SweepResult) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let primary = r.primary();
    let extra = if r.ed.is_some() { r.analytic.as_ref() } else { None };

    let mut header: Vec<String> = CSV_COLUMNS.iter().map(|s| s.to_string()).collect();
    if let Some(a) = extra {
        header.extend(a.columns().iter().map(|(name, _)| format!("analytic_{name}")));
    }
    w.write_record(&header)?;

    for (k, &p) in r.grid.iter().enumerate() {
        let mut row = vec![fmt_float(p)];
        row.extend(primary.columns().iter().map(|(_, col)| fmt_float(col[k])));
        row.push(if r.degenerate[k] { "1" } else { "0" }.to_string());
        if let Some(a) = extra {
            row.extend(a.columns().iter().map(|(_, col)| fmt_float(col[k])));
        }
        w.write_record(&row)?;
    }
    w.flush()
}

pub fn write_json<T: Serialize>(path: &Path, doc: &T) -> std::io::Result<()> {
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, doc)?;
    f.write_all(b"\n")
}

#[derive(Serialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

#[derive(Serialize)]
pub struct KinkEntry {
    pub location: f64,
    pub kind: KinkKind,
    pub slope_left: f64,
    pub slope_right: f64,
    pub slope_jump: f64,
}

impl From<&Kink> for KinkEntry {
    fn from(k: &Kink) -> Self {
        Self {
            location: k.location,
            kind: k.kind,
            slope_left: k.slope_left,
            slope_right: k.slope_right,
            slope_jump: k.slope_jump(),
        }
    }
}

#[derive(Serialize)]
pub struct PointFailure {
    pub param: f64,
    pub error: String,
}

#[derive(Serialize)]
pub struct KinksDocument {
    pub schema_version: u32,
    pub family: Family,
    pub param_name: String,
    pub route: Route,
    pub n_sites: Option<usize>,
    pub grid: GridSpec,
    pub detector: DetectorParams,
    /// Series the detector ran on.
    pub series: &'static str,
    pub kinks: Vec<KinkEntry>,
    pub degenerate_points: usize,
    pub failed_points: Vec<PointFailure>,
}

impl KinksDocument {
    pub fn new(r: &SweepResult, detector: DetectorParams) -> Self {
        let n = r.grid.len();
        Self {
            schema_version: SCHEMA_VERSION,
            family: r.family,
            param_name: r.param_name.clone(),
            route: r.route,
            n_sites: r.n_sites,
            grid: GridSpec { min: r.grid[0], max: r.grid[n - 1], steps: n },
            detector,
            series: if r.ed.is_some() { "ed.concurrence" } else { "analytic.concurrence" },
            kinks: r.kinks.kinks.iter().map(KinkEntry::from).collect(),
            degenerate_points: r.degenerate.iter().filter(|&&d| d).count(),
            failed_points: r
                .errors
                .iter()
                .zip(&r.grid)
                .filter_map(|(e, &p)| e.as_ref().map(|e| PointFailure { param: p, error: e.clone() }))
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct SectorInfo {
    pub n_up: usize,
    pub total_sigma_z: i64,
}

#[derive(Serialize)]
pub struct DensityMatrix {
    /// Row-major 4×4, each entry `[re, im]`, basis |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩.
    pub full: Vec<Vec<[f64; 2]>>,
    pub x_form: Option<XForm>,
}

#[derive(Serialize)]
pub struct ConcurrenceRoutes {
    pub wootters: f64,
    pub symmetric: Option<f64>,
    pub c_tilde: f64,
    pub reported: f64,
}

/// Fields that need a unique ground state.
#[derive(Serialize)]
pub struct PairData {
    pub correlators: CorrelatorSet,
    pub rdm: DensityMatrix,
    pub gammas: [f64; 4],
    pub concurrence: ConcurrenceRoutes,
    pub entropy: f64,
}

#[derive(Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub family: Family,
    pub param_name: &'static str,
    pub param: f64,
    pub n_sites: usize,
    pub ground_energy: f64,
    pub energy_per_site: f64,
    pub sector: SectorInfo,
    pub residual: f64,
    pub degenerate: bool,
    pub tied_sectors: Vec<usize>,
    #[serde(flatten)]
    pub pair: Option<PairData>,
}

impl ReportDocument {
    pub fn new(family: Family, param: f64, gs: &GroundState, pair: Option<(&EntanglementReport, DensityMatrix)>) -> Self {
        let sector = gs.sector();
        Self {
            schema_version: SCHEMA_VERSION,
            family,
            param_name: family.param_name(),
            param,
            n_sites: gs.n_sites(),
            ground_energy: gs.energy(),
            energy_per_site: gs.energy_per_site(),
            sector: SectorInfo { n_up: sector.n_up, total_sigma_z: sector.total_sigma_z() },
            residual: gs.residual(),
            degenerate: gs.is_degenerate(),
            tied_sectors: gs.tied_sectors().to_vec(),
            pair: pair.map(|(r, rdm)| PairData {
                correlators: r.correlators,
                rdm,
                gammas: r.wootters.gammas,
                concurrence: ConcurrenceRoutes {
                    wootters: r.wootters.concurrence,
                    symmetric: r.symmetric.map(|(c, _)| c),
                    c_tilde: r.c_tilde,
                    reported: r.concurrence,
                },
                entropy: r.entropy_site,
            }),
        }
    }
}

#[derive(Serialize)]
pub struct CriterionEntry {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Serialize)]
pub struct VerifyDocument {
    pub schema_version: u32,
    pub quick: bool,
    pub passed: bool,
    pub criteria: Vec<CriterionEntry>,
}

impl VerifyDocument {
    /// Timings are left out so that repeated runs give the same document.
    pub fn new(quick: bool, results: &[CriterionResult]) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            quick,
            passed: results.iter().all(|r| r.passed),
            criteria: results
                .iter()
                .map(|r| CriterionEntry { id: r.id, name: r.name.clone(), passed: r.passed, detail: r.detail.clone() })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, -1.0 / 3.0, 2.0 / std::f64::consts::PI, 1e-300, 123456.789] {
            let s = fmt_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_float(f64::NAN), "NaN");
    }
}
