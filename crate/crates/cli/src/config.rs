//! Run configuration: command-line flags layered over an optional JSON file.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spinent::pauli::{Family, MAX_SITES};
use spinent::sweep::{DetectorParams, Route};

pub const WORKERS_ENV: &str = "SPINENT_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown output format '{other}'")),
        }
    }
}

/// Every setting, all optional. Both the config file and the flags produce
/// one of these; flags win field by field.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub family: Option<String>,
    pub route: Option<String>,
    pub sites: Option<usize>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub steps: Option<usize>,
    pub param: Option<f64>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<String>>,
    pub workers: Option<usize>,
    pub theta: Option<f64>,
    pub eps_zero: Option<f64>,
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))
    }

    pub fn overlay(self, flags: Settings) -> Settings {
        Settings {
            family: flags.family.or(self.family),
            route: flags.route.or(self.route),
            sites: flags.sites.or(self.sites),
            min: flags.min.or(self.min),
            max: flags.max.or(self.max),
            steps: flags.steps.or(self.steps),
            param: flags.param.or(self.param),
            out: flags.out.or(self.out),
            formats: flags.formats.or(self.formats),
            workers: flags.workers.or(self.workers),
            theta: flags.theta.or(self.theta),
            eps_zero: flags.eps_zero.or(self.eps_zero),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &'static str, message: impl Into<String>) -> Self {
        Self { field, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid {}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub family: Family,
    pub route: Route,
    pub n_sites: usize,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    pub workers: Option<usize>,
    pub detector: DetectorParams,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConfig {
    pub family: Family,
    pub n_sites: usize,
    pub param: f64,
    pub out: Option<PathBuf>,
}

fn family(s: &Settings) -> Result<Family, ConfigError> {
    let name = s.family.as_deref().unwrap_or("xx3");
    name.parse().map_err(|_| ConfigError::new("family", format!("'{name}' is not one of xx3, xxz")))
}

fn sites(s: &Settings) -> Result<usize, ConfigError> {
    let n = s.sites.unwrap_or(12);
    if n % 2 != 0 || !(4..=MAX_SITES).contains(&n) {
        return Err(ConfigError::new("sites", format!("{n} must be even and between 4 and {MAX_SITES}")));
    }
    Ok(n)
}

fn workers(s: &Settings) -> Result<Option<usize>, ConfigError> {
    let w = match s.workers {
        Some(w) => Some(w),
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| {
                ConfigError::new("workers", format!("{WORKERS_ENV}='{v}' is not a positive integer"))
            })?),
            Err(_) => None,
        },
    };
    if w == Some(0) {
        return Err(ConfigError::new("workers", "must be at least 1"));
    }
    Ok(w)
}

fn finite(field: &'static str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::new(field, format!("{v} is not a finite number")))
    }
}

pub fn sweep_config(s: &Settings) -> Result<SweepConfig, ConfigError> {
    let family = family(s)?;
    let route_name = s.route.as_deref().unwrap_or("ed");
    let route: Route = route_name
        .parse()
        .map_err(|_| ConfigError::new("route", format!("'{route_name}' is not one of ed, analytic, both")))?;
    if route != Route::Ed && family == Family::Xxz {
        return Err(ConfigError::new("route", "only the ed route is available for xxz"));
    }
    let n_sites = if route == Route::Analytic { s.sites.unwrap_or(0) } else { sites(s)? };
    let min = finite("min", s.min.ok_or_else(|| ConfigError::new("min", "is required"))?)?;
    let max = finite("max", s.max.ok_or_else(|| ConfigError::new("max", "is required"))?)?;
    if !(min < max) {
        return Err(ConfigError::new("max", format!("{max} must exceed min {min}")));
    }
    let steps = s.steps.unwrap_or(101);
    if steps < 3 {
        return Err(ConfigError::new("steps", format!("{steps} is fewer than 3")));
    }
    let formats = match &s.formats {
        None => vec![Format::Csv, Format::Json],
        Some(list) => {
            let mut out = Vec::new();
            for f in list.iter().flat_map(|x| x.split(',')) {
                let f: Format = f.parse().map_err(|e: String| ConfigError::new("format", e))?;
                if !out.contains(&f) {
                    out.push(f);
                }
            }
            out
        }
    };
    let mut detector = DetectorParams::default();
    if let Some(t) = s.theta {
        if !(finite("theta", t)? > 0.0) {
            return Err(ConfigError::new("theta", format!("{t} must be positive")));
        }
        detector.theta = t;
    }
    if let Some(e) = s.eps_zero {
        if !(finite("eps-zero", e)? >= 0.0) {
            return Err(ConfigError::new("eps-zero", format!("{e} must be non-negative")));
        }
        detector.eps_zero = e;
    }
    Ok(SweepConfig {
        family,
        route,
        n_sites,
        min,
        max,
        steps,
        out: s.out.clone().unwrap_or_else(|| PathBuf::from(".")),
        formats,
        workers: workers(s)?,
        detector,
    })
}

pub fn report_config(s: &Settings) -> Result<ReportConfig, ConfigError> {
    Ok(ReportConfig {
        family: family(s)?,
        n_sites: sites(s)?,
        param: finite("param", s.param.ok_or_else(|| ConfigError::new("param", "is required"))?)?,
        out: s.out.clone(),
    })
}
