use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use fbweyl_core::conformal_disc::{
    gauss_bonnet_residual, gauss_curvature, geodesic_curvature, path_invariant_report, CurvatureReport,
};
use fbweyl_core::embedding::{free_boundary_residuals, solve_embedding};
use fbweyl_core::numerics::uniform_grid;
use fbweyl_core::quasilocal::{branch_of, scan_with_workers};
use fbweyl_core::schwarzschild::{admissible_gammas, boundary_traces, conformal_profile, support_sphere_data};
use fbweyl_core::series::{catalan, majorant_product, recurrence_check};
use fbweyl_core::{
    invariants, output, ExactRational, Format, GeometryError, RadialConformalMetric, ScanRow, SchwarzschildParams,
    Tolerances,
};

mod records;

const EXIT_PRECONDITION: u8 = 1;
const EXIT_CONSISTENCY: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;

#[derive(Debug, Parser)]
#[command(name = "fbweyl", version, about = "Free-boundary isometric embeddings of positively curved discs")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format (default: pretty on stdout, csv with --out).
    #[arg(long, value_enum, global = true)]
    format: Option<FormatArg>,

    /// Radial sample count.
    #[arg(long, global = true)]
    grid_n: Option<usize>,

    #[arg(long, global = true)]
    quad_tol: Option<f64>,

    #[arg(long, global = true)]
    root_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Pretty,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
            FormatArg::Pretty => Format::Pretty,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Curvature and embedding of the round polar cap.
    Cap,
    /// A polar cap in the spatial Schwarzschild manifold.
    Schwarzschild {
        #[arg(long)]
        mass: f64,
        #[arg(long)]
        gamma: f64,
        /// Print the mass integrals as a scan row.
        #[arg(long)]
        report: bool,
    },
    /// Coordinate-sphere radii with unit boundary geodesic curvature.
    Admissible {
        #[arg(long)]
        mass: f64,
    },
    /// Mass integrals over a uniform mass grid, both branches.
    Scan {
        #[arg(long, default_value_t = 0.01)]
        m_lo: f64,
        #[arg(long, default_value_t = 0.19)]
        m_hi: f64,
        #[arg(long, default_value_t = 19)]
        n_m: usize,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Curvature along the harmonic path from the cap to a Schwarzschild cap.
    Path {
        #[arg(long, default_value_t = 0.1875)]
        mass: f64,
        #[arg(long, default_value_t = 0.28125)]
        gamma: f64,
        #[arg(long, default_value_t = 11)]
        n_t: usize,
    },
    /// Run the invariant suite.
    Check,
    /// Exact Catalan identities up to `max_l`.
    Catalan {
        #[arg(long, default_value_t = 25)]
        max_l: u32,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{failed} of {total} checks failed")]
    Check { failed: usize, total: usize },
    #[error("invalid value for {name}: {value:?}")]
    Env { name: &'static str, value: String },
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Geometry(e) if e.is_internal() => EXIT_CONSISTENCY,
            CliError::Geometry(_) => EXIT_PRECONDITION,
            CliError::Check { .. } => EXIT_CONSISTENCY,
            CliError::Env { .. } => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

fn env_override<T: std::str::FromStr>(name: &'static str) -> Result<Option<T>, CliError> {
    match std::env::var(name) {
        Ok(value) => value
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Env { name, value }),
        Err(_) => Ok(None),
    }
}

/// Defaults, then environment, then flags.
fn tolerances(cli: &Cli) -> Result<Tolerances, CliError> {
    let mut tol = Tolerances::default();
    if let Some(v) = env_override("FBWEYL_QUAD_TOL")? {
        tol.quad_tol = v;
    }
    if let Some(v) = env_override("FBWEYL_ROOT_TOL")? {
        tol.root_tol = v;
    }
    if let Some(v) = env_override("FBWEYL_FD_STEP")? {
        tol.fd_step = v;
    }
    if let Some(v) = env_override("FBWEYL_GRID_N")? {
        tol.grid_n = v;
    }
    if let Some(v) = cli.quad_tol {
        tol.quad_tol = v;
    }
    if let Some(v) = cli.root_tol {
        tol.root_tol = v;
    }
    if let Some(v) = cli.grid_n {
        tol.grid_n = v;
    }
    tol.validate().map_err(GeometryError::from)?;
    Ok(tol)
}

#[derive(Debug, Serialize)]
struct CapSummary {
    r_b: f64,
    #[serde(rename = "min_K")]
    min_k: f64,
    #[serde(rename = "max_K")]
    max_k: f64,
    k_h: f64,
    gauss_bonnet_residual: f64,
    boundary_height: f64,
    free_boundary_residual: f64,
}

#[derive(Debug, Serialize)]
struct SchwarzschildSummary {
    m_adm: f64,
    gamma: f64,
    branch: Option<u32>,
    k_h: f64,
    #[serde(rename = "min_K")]
    min_k: f64,
    gauss_bonnet_residual: f64,
    #[serde(rename = "H_S")]
    h_s: f64,
    #[serde(rename = "K_S")]
    k_s: f64,
    #[serde(rename = "tr_Ae")]
    tr_ae: f64,
    #[serde(rename = "tr_A")]
    tr_a: f64,
    #[serde(rename = "tr_A_oracle")]
    tr_a_oracle: f64,
    boundary_gap: f64,
    free_boundary_residual: f64,
}

#[derive(Debug, Serialize)]
struct AdmissibleRoot {
    gamma: f64,
    tangential: bool,
}

#[derive(Debug, Serialize)]
struct PathRow {
    t: f64,
    #[serde(rename = "min_K")]
    min_k: f64,
    k_h: f64,
    gauss_bonnet_residual: f64,
}

impl From<&CurvatureReport> for PathRow {
    fn from(r: &CurvatureReport) -> Self {
        Self {
            t: r.t,
            min_k: r.min_k,
            k_h: r.k_boundary,
            gauss_bonnet_residual: r.gauss_bonnet_residual,
        }
    }
}

#[derive(Debug, Serialize)]
struct CatalanRow {
    l: u32,
    catalan: String,
    majorant_product: String,
    product_matches: bool,
    recurrence_holds: bool,
}

#[derive(Debug, Serialize)]
struct CheckRow {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn min_max_k(m: &RadialConformalMetric, n: usize) -> Result<(f64, f64), GeometryError> {
    uniform_grid(0.0, m.r_b(), n)
        .into_iter()
        .map(|r| gauss_curvature(m, r))
        .try_fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), k| k.map(|k| (lo.min(k), hi.max(k))))
}

fn cap_summary(tol: &Tolerances) -> Result<CapSummary, GeometryError> {
    let m = RadialConformalMetric::cap();
    let (min_k, max_k) = min_max_k(&m, tol.grid_n)?;
    let e = solve_embedding(&m, tol)?;
    Ok(CapSummary {
        r_b: m.r_b(),
        min_k,
        max_k,
        k_h: geodesic_curvature(&m, m.r_b())?,
        gauss_bonnet_residual: gauss_bonnet_residual(&m, tol)?,
        boundary_height: *e.z.last().unwrap_or(&f64::NAN),
        free_boundary_residual: free_boundary_residuals(&e).max(),
    })
}

fn schwarzschild_summary(p: &SchwarzschildParams, tol: &Tolerances) -> Result<SchwarzschildSummary, GeometryError> {
    let m = conformal_profile(p);
    let e = solve_embedding(&m, tol)?;
    let b = boundary_traces(p, &e, tol)?;
    let s = support_sphere_data(p);
    Ok(SchwarzschildSummary {
        m_adm: p.m_adm,
        gamma: p.gamma,
        branch: branch_of(p, tol)?,
        k_h: geodesic_curvature(&m, m.r_b())?,
        min_k: min_max_k(&m, tol.grid_n)?.0,
        gauss_bonnet_residual: gauss_bonnet_residual(&m, tol)?,
        h_s: s.mean_curvature,
        k_s: s.gauss_curvature,
        tr_ae: b.tr_ae,
        tr_a: b.tr_a,
        tr_a_oracle: b.tr_a_oracle,
        boundary_gap: b.gap,
        free_boundary_residual: b.fb_residuals.max(),
    })
}

fn schwarzschild_row(p: &SchwarzschildParams, tol: &Tolerances) -> Result<ScanRow, GeometryError> {
    let mut row = ScanRow::compute(p, 0, tol)?;
    match branch_of(p, tol)? {
        Some(b) => row.gamma_branch_index = b,
        None => log::warn!("gamma = {} is not within 1e-6 of a computed root; branch reported as 0", p.gamma),
    }
    Ok(row)
}

fn catalan_rows(max_l: u32) -> Vec<CatalanRow> {
    (1..=max_l)
        .map(|l| {
            let c = catalan(l - 1);
            let prod = majorant_product(l);
            CatalanRow {
                l,
                catalan: c.to_string(),
                majorant_product: prod.to_string(),
                product_matches: prod == ExactRational::from(c),
                recurrence_holds: l < 2 || recurrence_check(l),
            }
        })
        .collect()
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let tol = tolerances(cli)?;
    let format: Format = match (cli.format, &cli.out) {
        (Some(f), _) => f.into(),
        (None, Some(_)) => Format::Csv,
        (None, None) => Format::Pretty,
    };
    let io_err = |source: io::Error| CliError::Io {
        path: cli.out.as_ref().map_or("<stdout>".into(), |p| p.display().to_string()),
        source,
    };

    let mut failed_checks = None;
    let bytes = match &cli.command {
        Command::Cap => records::render(&[cap_summary(&tol)?], format),
        Command::Schwarzschild { mass, gamma, report } => {
            let p = SchwarzschildParams::new(*mass, *gamma)?;
            if *report {
                let mut buf = Vec::new();
                output::emit(&[schwarzschild_row(&p, &tol)?], format, &mut buf).map(|_| buf)
            } else {
                records::render(&[schwarzschild_summary(&p, &tol)?], format)
            }
        }
        Command::Admissible { mass } => {
            let roots: Vec<AdmissibleRoot> = admissible_gammas(*mass, &tol)?
                .into_iter()
                .map(|r| AdmissibleRoot { gamma: r.x, tangential: r.tangential })
                .collect();
            if roots.is_empty() && format == Format::Pretty {
                Ok(format!("no admissible gamma for m_adm = {mass}\n").into_bytes())
            } else if roots.is_empty() && format == Format::Csv {
                Ok(b"gamma,tangential\n".to_vec())
            } else {
                records::render(&roots, format)
            }
        }
        Command::Scan { m_lo, m_hi, n_m, workers } => {
            let rows = scan_with_workers(*m_lo, *m_hi, *n_m, &tol, *workers)?;
            let mut buf = Vec::new();
            output::emit(&rows, format, &mut buf).map(|_| buf)
        }
        Command::Path { mass, gamma, n_t } => {
            let p = SchwarzschildParams::new(*mass, *gamma)?;
            let reports = path_invariant_report(
                &RadialConformalMetric::cap(),
                &conformal_profile(&p),
                *n_t,
                tol.grid_n,
                &tol,
            )?;
            let rows: Vec<PathRow> = reports.iter().map(PathRow::from).collect();
            records::render(&rows, format)
        }
        Command::Check => {
            let outcomes = invariants::run_suite(&tol);
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed > 0 {
                failed_checks = Some(CliError::Check { failed, total: outcomes.len() });
            }
            if format == Format::Pretty {
                let mut s = String::new();
                for o in &outcomes {
                    let status = if o.passed { "PASS" } else { "FAIL" };
                    s.push_str(&format!("{status}  {:<36} {}\n", o.name, o.detail));
                }
                Ok(s.into_bytes())
            } else {
                let rows: Vec<CheckRow> = outcomes
                    .into_iter()
                    .map(|o| CheckRow { name: o.name, passed: o.passed, detail: o.detail })
                    .collect();
                records::render(&rows, format)
            }
        }
        Command::Catalan { max_l } => records::render(&catalan_rows(*max_l), format),
    }
    .map_err(io_err)?;

    match &cli.out {
        Some(path) => File::create(path).and_then(|mut f| f.write_all(&bytes)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(&bytes).and_then(|_| stdout.flush())
        }
    }
    .map_err(io_err)?;

    match failed_checks {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("fbweyl: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
