//! `spinent`: sweeps, single-point reports and the acceptance suite for
//! ground-state entanglement of the xx3 and xxz spin chains.

mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{report_config, sweep_config, ConfigError, Format, Settings};
use output::{DensityMatrix, KinkEntry, KinksDocument, ReportDocument, VerifyDocument, SCHEMA_VERSION};
use spinent::analytic;
use spinent::ed::ground_state;
use spinent::entanglement::EntanglementReport;
use spinent::observables::{one_site_rdm, two_site_rdm};
use spinent::pauli::Family;
use spinent::sweep::{run_sweep, uniform_grid, SweepOptions};
use spinent::verify::{run_all, VerifyOptions};

const EXIT_CONFIG: u8 = 1;
const EXIT_PARTIAL: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "spinent", version, about = "Nearest-neighbour entanglement in periodic spin chains")]
struct Cli {
    /// JSON file with default settings; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the model parameter and write sweep.csv, kinks.json, concurrence.svg
    Sweep(RunArgs),
    /// Ground state, pair density matrix and entanglement at one parameter value
    Report(RunArgs),
    /// Closed-form thermodynamic-limit values for xx3
    Analytic(RunArgs),
    /// Run the acceptance checks
    Verify(VerifyArgs),
}

#[derive(Args, Default)]
struct RunArgs {
    /// xx3 or xxz
    #[arg(long)]
    family: Option<String>,
    /// ed, analytic or both
    #[arg(long)]
    route: Option<String>,
    /// Chain length (even, 4 to 24)
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    max: Option<f64>,
    /// Number of grid points, endpoints included
    #[arg(long)]
    steps: Option<usize>,
    /// Single parameter value (report, analytic)
    #[arg(long, allow_negative_numbers = true)]
    param: Option<f64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of csv, json, svg
    #[arg(long = "format", value_delimiter = ',')]
    formats: Option<Vec<String>>,
    /// Worker threads (default from SPINENT_WORKERS, else all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Kink threshold multiple
    #[arg(long)]
    theta: Option<f64>,
    /// Tolerance for a clamped (zero) concurrence
    #[arg(long = "eps-zero")]
    eps_zero: Option<f64>,
}

impl RunArgs {
    fn settings(&self) -> Settings {
        Settings {
            family: self.family.clone(),
            route: self.route.clone(),
            sites: self.sites,
            min: self.min,
            max: self.max,
            steps: self.steps,
            param: self.param,
            out: self.out.clone(),
            formats: self.formats.clone(),
            workers: self.workers,
            theta: self.theta,
            eps_zero: self.eps_zero,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Use N = 12 in place of the larger chains
    #[arg(long)]
    quick: bool,
    /// Print a JSON document instead of the table
    #[arg(long)]
    json: bool,
}

enum Failure {
    Config(ConfigError),
    Io(std::io::Error),
    Run(spinent::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<spinent::Error> for Failure {
    fn from(e: spinent::Error) -> Self {
        Failure::Run(e)
    }
}

fn to_stdout<T: Serialize>(doc: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(doc).map_err(std::io::Error::from)?;
    println!("{text}");
    Ok(())
}

fn cmd_sweep(settings: &Settings) -> Result<u8, Failure> {
    let cfg = sweep_config(settings)?;
    let grid = uniform_grid(cfg.min, cfg.max, cfg.steps)?;
    let opts = SweepOptions { workers: cfg.workers, detector: cfg.detector, ..Default::default() };
    let result = run_sweep(cfg.family, cfg.n_sites, &grid, cfg.route, &opts).map_err(|e| match e {
        spinent::Error::Domain(m) => Failure::Config(ConfigError::new("sweep", m)),
        other => Failure::Run(other),
    })?;

    std::fs::create_dir_all(&cfg.out)?;
    if cfg.formats.contains(&Format::Csv) {
        output::write_sweep_csv(&cfg.out.join("sweep.csv"), &result)?;
    }
    if cfg.formats.contains(&Format::Json) {
        output::write_json(&cfg.out.join("kinks.json"), &KinksDocument::new(&result, cfg.detector))?;
    }
    if cfg.formats.contains(&Format::Svg) {
        let mut curves = vec![svg::Curve {
            label: if result.ed.is_some() { "exact diagonalization" } else { "closed form" },
            color: "#1f77b4",
            values: &result.primary().concurrence,
        }];
        if let (Some(_), Some(a)) = (&result.ed, &result.analytic) {
            curves.push(svg::Curve { label: "closed form", color: "#7f7f7f", values: &a.concurrence });
        }
        let markers = result.kinks.locations();
        let plot = svg::Plot { x_label: &result.param_name, y_label: "concurrence", x: &result.grid, curves, markers: &markers };
        std::fs::write(cfg.out.join("concurrence.svg"), plot.render())?;
    }

    let failed = result.failed_points();
    let kinks: Vec<String> = result.kinks.kinks.iter().map(|k| format!("{:.4}", k.location)).collect();
    println!(
        "{} {} points, {} degenerate, {} failed; kinks: [{}]",
        cfg.family.name(),
        grid.len(),
        result.degenerate.iter().filter(|&&d| d).count(),
        failed,
        kinks.join(", ")
    );
    Ok(if failed > 0 { EXIT_PARTIAL } else { 0 })
}

fn cmd_report(settings: &Settings) -> Result<u8, Failure> {
    let cfg = report_config(settings)?;
    let spec = cfg.family.build(cfg.n_sites, cfg.param).map_err(|e| Failure::Config(ConfigError::new("param", e.to_string())))?;
    let gs = ground_state(&spec)?;
    let doc = if gs.is_degenerate() {
        ReportDocument::new(cfg.family, cfg.param, &gs, None)
    } else {
        let rho = two_site_rdm(&gs, 0, 1)?;
        let report = EntanglementReport::from_rdm(&rho, &one_site_rdm(&gs, 1)?)?;
        let rdm = DensityMatrix { full: rho.matrix().to_rows(), x_form: rho.x_form() };
        ReportDocument::new(cfg.family, cfg.param, &gs, Some((&report, rdm)))
    };
    if let Some(out) = &cfg.out {
        std::fs::create_dir_all(out)?;
        output::write_json(&out.join("report.json"), &doc)?;
    }
    to_stdout(&doc)?;
    Ok(0)
}

#[derive(Serialize)]
struct AnalyticPoint {
    lambda: f64,
    g: f64,
    c_tilde: f64,
    concurrence: f64,
}

#[derive(Serialize)]
struct AnalyticDocument {
    schema_version: u32,
    family: Family,
    plateau_concurrence: f64,
    lambda_critical: f64,
    lambda_zero: f64,
    kinks: Vec<KinkEntry>,
    point: Option<AnalyticPoint>,
}

fn cmd_analytic(settings: &Settings) -> Result<u8, Failure> {
    let family: Family = settings
        .family
        .as_deref()
        .unwrap_or("xx3")
        .parse()
        .map_err(|e: spinent::Error| ConfigError::new("family", e.to_string()))?;
    if family != Family::Xx3 {
        return Err(ConfigError::new("family", "closed forms are available for xx3 only").into());
    }
    let point = match settings.param {
        None => None,
        Some(l) => {
            let bad = |e: spinent::Error| ConfigError::new("param", e.to_string());
            Some(AnalyticPoint {
                lambda: l,
                g: analytic::g_correlator(l).map_err(bad)?,
                c_tilde: analytic::xx3_c_tilde(l).map_err(bad)?,
                concurrence: analytic::xx3_concurrence(l).map_err(bad)?,
            })
        }
    };
    let doc = AnalyticDocument {
        schema_version: SCHEMA_VERSION,
        family,
        plateau_concurrence: analytic::xx3_concurrence(0.0)?,
        lambda_critical: analytic::XX3_CRITICAL_LAMBDA,
        lambda_zero: analytic::xx3_lambda_zero(),
        kinks: analytic::xx3_kinks().kinks.iter().map(KinkEntry::from).collect(),
        point,
    };
    if let Some(out) = &settings.out {
        std::fs::create_dir_all(out)?;
        output::write_json(&out.join("analytic.json"), &doc)?;
    }
    to_stdout(&doc)?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let results = run_all(&VerifyOptions { quick: args.quick });
    if args.json {
        to_stdout(&VerifyDocument::new(args.quick, &results))?;
    } else {
        for r in &results {
            println!("{}", r.line());
        }
    }
    Ok(if results.iter().all(|r| r.passed) { 0 } else { EXIT_VERIFY })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let file = match &cli.config {
        Some(p) => Settings::from_file(p)?,
        None => Settings::default(),
    };
    match &cli.command {
        Command::Sweep(a) => cmd_sweep(&file.overlay(a.settings())),
        Command::Report(a) => cmd_report(&file.overlay(a.settings())),
        Command::Analytic(a) => cmd_analytic(&file.overlay(a.settings())),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_PARTIAL)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_PARTIAL)
        }
    }
}
