//! Parameter sweeps, finite-difference derivatives and kink detection.

mod diff;
mod kinks;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use diff::{finite_diff, finite_diff_masked, grid_step, uniform_grid};
pub use kinks::{detect_kinks, detect_kinks_with, DetectorParams};

use crate::analytic::{self, KinkSet};
use crate::ed::{ground_state_with, EdOptions, GroundState};
use crate::entanglement::EntanglementReport;
use crate::error::{Error, Result};
use crate::observables::correlators;
use crate::pauli::Family;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Ed,
    Analytic,
    Both,
}

impl Route {
    pub fn uses_ed(self) -> bool {
        matches!(self, Route::Ed | Route::Both)
    }

    pub fn uses_analytic(self) -> bool {
        matches!(self, Route::Analytic | Route::Both)
    }
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ed" => Ok(Route::Ed),
            "analytic" => Ok(Route::Analytic),
            "both" => Ok(Route::Both),
            other => Err(Error::domain(format!("unknown route '{other}'"))),
        }
    }
}

/// Observable values at one grid point. Fields that could not be computed
/// hold NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointValues {
    pub energy_per_site: f64,
    pub xx_plus_yy: f64,
    pub zz: f64,
    pub c_tilde: f64,
    pub concurrence: f64,
    pub entropy: f64,
}

impl PointValues {
    pub const MISSING: Self = Self {
        energy_per_site: f64::NAN,
        xx_plus_yy: f64::NAN,
        zz: f64::NAN,
        c_tilde: f64::NAN,
        concurrence: f64::NAN,
        entropy: f64::NAN,
    };

    pub fn from_report(energy_per_site: f64, r: &EntanglementReport) -> Self {
        Self {
            energy_per_site,
            xx_plus_yy: r.correlators.xx_plus_yy(),
            zz: r.correlators.zz,
            c_tilde: r.c_tilde,
            concurrence: r.concurrence,
            entropy: r.entropy_site,
        }
    }
}

/// Column-oriented observables along the grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub energy_per_site: Vec<f64>,
    pub xx_plus_yy: Vec<f64>,
    pub zz: Vec<f64>,
    pub c_tilde: Vec<f64>,
    pub concurrence: Vec<f64>,
    pub entropy: Vec<f64>,
}

impl ObservableSeries {
    fn from_points(points: &[PointValues]) -> Self {
        let col = |f: fn(&PointValues) -> f64| points.iter().map(f).collect();
        Self {
            energy_per_site: col(|p| p.energy_per_site),
            xx_plus_yy: col(|p| p.xx_plus_yy),
            zz: col(|p| p.zz),
            c_tilde: col(|p| p.c_tilde),
            concurrence: col(|p| p.concurrence),
            entropy: col(|p| p.entropy),
        }
    }

    pub fn len(&self) -> usize {
        self.concurrence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concurrence.is_empty()
    }

    /// `(name, values)` pairs in a fixed order.
    pub fn columns(&self) -> [(&'static str, &[f64]); 6] {
        [
            ("energy_per_site", &self.energy_per_site),
            ("xx_plus_yy", &self.xx_plus_yy),
            ("zz", &self.zz),
            ("c_tilde", &self.c_tilde),
            ("concurrence", &self.concurrence),
            ("entropy", &self.entropy),
        ]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DerivativeSeries {
    pub d_energy_per_site: Vec<f64>,
    pub d_concurrence: Vec<f64>,
    pub d2_concurrence: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Worker threads for grid points; `None` uses the global pool.
    pub workers: Option<usize>,
    pub detector: DetectorParams,
    #[serde(skip)]
    pub ed: EdOptions,
    /// Step of the energy difference that supplies d𝓔/dΔ at degenerate
    /// XXZ points.
    pub degenerate_step: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            workers: None,
            detector: DetectorParams::default(),
            ed: EdOptions::default(),
            degenerate_step: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub family: Family,
    pub param_name: String,
    pub route: Route,
    pub n_sites: Option<usize>,
    pub grid: Vec<f64>,
    pub ed: Option<ObservableSeries>,
    pub analytic: Option<ObservableSeries>,
    /// Derivatives of the primary series (ED when present).
    pub derivatives: DerivativeSeries,
    /// Kinks of the primary concurrence series.
    pub kinks: KinkSet,
    pub degenerate: Vec<bool>,
    /// Per-point failure messages; `None` where the point succeeded.
    pub errors: Vec<Option<String>>,
}

impl SweepResult {
    pub fn primary(&self) -> &ObservableSeries {
        self.ed.as_ref().or(self.analytic.as_ref()).expect("a sweep fills at least one route")
    }

    pub fn failed_points(&self) -> usize {
        self.errors.iter().filter(|e| e.is_some()).count()
    }
}

/// Closed-form values at one λ. The energy has no closed form here.
pub fn analytic_point(family: Family, param: f64) -> Result<PointValues> {
    match family {
        Family::Xx3 => {
            let g = analytic::g_correlator(param)?;
            Ok(PointValues {
                energy_per_site: f64::NAN,
                xx_plus_yy: 2.0 * g,
                zz: -g * g,
                c_tilde: analytic::xx3_c_tilde(param)?,
                concurrence: analytic::xx3_concurrence(param)?,
                entropy: 1.0,
            })
        }
        Family::Xxz => Err(Error::domain(
            "xxz has no closed-form route; its relations need an energy curve from ED",
        )),
    }
}

pub struct EdPoint {
    pub values: PointValues,
    pub degenerate: bool,
}

fn ground(family: Family, n_sites: usize, param: f64, opts: &EdOptions) -> Result<GroundState> {
    ground_state_with(&family.build(n_sites, param)?, opts)
}

/// One ED grid point. Degenerate XXZ points take d𝓔/dΔ from a central
/// difference of ground energies and the pair data from the energy relations;
/// entropy there is left undefined.
pub fn ed_point(family: Family, n_sites: usize, param: f64, opts: &SweepOptions) -> Result<EdPoint> {
    let gs = ground(family, n_sites, param, &opts.ed)?;
    let e = gs.energy_per_site();
    if !gs.is_degenerate() {
        let report = EntanglementReport::for_pair(&gs, 0, 1)?;
        return Ok(EdPoint { values: PointValues::from_report(e, &report), degenerate: false });
    }
    let values = match family {
        Family::Xxz => {
            let h = opts.degenerate_step;
            let up = ground(family, n_sites, param + h, &opts.ed)?.energy_per_site();
            let down = ground(family, n_sites, param - h, &opts.ed)?.energy_per_site();
            let de = (up - down) / (2.0 * h);
            let c_tilde = analytic::xxz_ctilde(e, de, param);
            PointValues {
                energy_per_site: e,
                xx_plus_yy: e - param * de,
                zz: de,
                c_tilde,
                concurrence: c_tilde.max(0.0),
                entropy: f64::NAN,
            }
        }
        Family::Xx3 => PointValues { energy_per_site: e, ..PointValues::MISSING },
    };
    Ok(EdPoint { values, degenerate: true })
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::domain("worker count must be positive")),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Evaluates the family along `grid`. ED failures at individual points are
/// recorded in `errors` and leave NaN in the series; the sweep itself only
/// fails on invalid arguments.
pub fn run_sweep(
    family: Family,
    n_sites: usize,
    grid: &[f64],
    route: Route,
    opts: &SweepOptions,
) -> Result<SweepResult> {
    if grid.len() < 3 {
        return Err(Error::domain("a sweep needs at least three grid points"));
    }
    grid_step(grid)?;
    if route.uses_analytic() && family == Family::Xxz {
        return Err(Error::domain("the analytic route is only available for xx3"));
    }
    if route.uses_ed() {
        // validates the size guards once, before any work
        family.build(n_sites, grid[0])?;
    }

    let n = grid.len();
    let mut errors: Vec<Option<String>> = vec![None; n];
    let mut degenerate = vec![false; n];

    let analytic_series = if route.uses_analytic() {
        let mut points = Vec::with_capacity(n);
        for (k, &p) in grid.iter().enumerate() {
            points.push(analytic_point(family, p).unwrap_or_else(|e| {
                errors[k] = Some(e.to_string());
                PointValues::MISSING
            }));
        }
        Some(ObservableSeries::from_points(&points))
    } else {
        None
    };

    let ed_series = if route.uses_ed() {
        let results: Vec<Result<EdPoint>> = in_pool(opts.workers, || {
            grid.par_iter().map(|&p| ed_point(family, n_sites, p, opts)).collect()
        })?;
        let mut points = Vec::with_capacity(n);
        for (k, r) in results.into_iter().enumerate() {
            match r {
                Ok(pt) => {
                    degenerate[k] = pt.degenerate;
                    points.push(pt.values);
                }
                Err(e) => {
                    errors[k].get_or_insert_with(|| e.to_string());
                    points.push(PointValues::MISSING);
                }
            }
        }
        Some(ObservableSeries::from_points(&points))
    } else {
        None
    };

    let primary = ed_series.as_ref().or(analytic_series.as_ref()).expect("route selects a series");
    let mask: Vec<bool> = (0..n).map(|k| degenerate[k] || errors[k].is_some()).collect();
    let derivatives = DerivativeSeries {
        d_energy_per_site: finite_diff_masked(&primary.energy_per_site, grid, 1, &mask)?,
        d_concurrence: finite_diff_masked(&primary.concurrence, grid, 1, &mask)?,
        d2_concurrence: finite_diff_masked(&primary.concurrence, grid, 2, &mask)?,
    };
    let kinks = if n >= 5 {
        detect_kinks_with(&primary.concurrence, grid, &mask, &opts.detector)?
    } else {
        KinkSet::default()
    };

    Ok(SweepResult {
        family,
        param_name: family.param_name().to_string(),
        route,
        n_sites: route.uses_ed().then_some(n_sites),
        grid: grid.to_vec(),
        ed: ed_series,
        analytic: analytic_series,
        derivatives,
        kinks,
        degenerate,
        errors,
    })
}

/// |(𝓔(Δ+h) − 𝓔(Δ−h))/2h − ⟨σᶻᵢσᶻᵢ₊₁⟩(Δ)| for the XXZ chain, all from ED.
pub fn hellmann_feynman_check(n_sites: usize, delta: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::domain("difference step must be positive"));
    }
    let opts = EdOptions::default();
    let mut energies = [0.0; 2];
    for (slot, d) in energies.iter_mut().zip([delta + h, delta - h]) {
        let gs = ground(Family::Xxz, n_sites, d, &opts)?;
        if gs.is_degenerate() {
            return Err(Error::Ambiguous(format!("ground state degenerate at delta = {d}")));
        }
        *slot = gs.energy_per_site();
    }
    let gs = ground(Family::Xxz, n_sites, delta, &opts)?;
    let zz = correlators(&gs, 0, 1)?.zz;
    Ok(((energies[0] - energies[1]) / (2.0 * h) - zz).abs())
}
