//! `pcband scan | gaps | verify`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use pcband_core::bandscan::ScanConfig;
use pcband_core::{BandStructure, IncidenceConfig, Medium, Pathway, Polarization};

use crate::output::{self, Format};
use crate::verify::{self, OracleChoice, VerifyRequest};
use crate::{parallel, schema, CliError, ExitCode};

#[derive(Debug, Parser)]
#[command(name = "pcband", version, about = "Band structures of one-dimensional photonic crystals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample cos(κL) on a uniform frequency grid.
    Scan(ScanArgs),
    /// Print the forbidden gaps found by a scan.
    Gaps(GapsArgs),
    /// Compare the selected pathway with independent oracles.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct MediumArgs {
    /// Canonical profile name or path to a JSON profile.
    #[arg(long)]
    pub profile: String,
    #[arg(long, default_value = "te")]
    pub pol: Polarization,
    /// Refractive index of the ambient medium.
    #[arg(long, default_value_t = 1.0)]
    pub na: f64,
    /// Angle of incidence in the ambient medium, in degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_deg: f64,
    #[arg(long, default_value = "auto")]
    pub pathway: Pathway,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    /// Lowest normalised frequency L/λ0.
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    pub omega_min: f64,
    #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
    pub omega_max: f64,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub medium: MediumArgs,
    #[command(flatten)]
    pub range: RangeArgs,
    #[arg(long, default_value_t = 600)]
    pub samples: usize,
    /// csv, json or gnuplot.
    #[arg(long, default_value = "csv")]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GapsArgs {
    #[command(flatten)]
    pub medium: MediumArgs,
    #[command(flatten)]
    pub range: RangeArgs,
    #[arg(long, default_value_t = 600)]
    pub samples: usize,
    /// text, csv or json.
    #[arg(long, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub medium: MediumArgs,
    #[command(flatten)]
    pub range: RangeArgs,
    /// Number of frequencies compared.
    #[arg(long, default_value_t = 32)]
    pub omega_grid: usize,
    /// monodromy, staircase, two-layer or all.
    #[arg(long, default_value = "all")]
    pub oracle: OracleChoice,
    /// Maximum tolerated |cos κL| error; overrides the per-pathway default.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl MediumArgs {
    fn load(&self) -> Result<(Medium, IncidenceConfig), CliError> {
        let medium = schema::load_medium(&self.profile)?;
        let inc = IncidenceConfig::from_degrees(self.na, self.theta_deg)?;
        Ok((medium, inc))
    }
}

fn band_structure(medium: &MediumArgs, range: &RangeArgs, samples: usize) -> Result<BandStructure, CliError> {
    let (m, inc) = medium.load()?;
    let cfg = ScanConfig::new(range.omega_min, range.omega_max, samples)
        .with_polarization(medium.pol)
        .with_incidence(inc)
        .with_pathway(medium.pathway);
    cfg.validate()?;
    let pool = parallel::pool(parallel::requested_threads()?)?;
    parallel::scan(&pool, &m, &cfg)
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Write { path: PathBuf::from("<stdout>"), source }),
    }
}

fn cmd_scan(args: &ScanArgs, stdout: &mut dyn Write) -> Result<ExitCode, CliError> {
    let text_fn = match args.format {
        Format::Csv => output::scan_csv,
        Format::Json => output::scan_json,
        Format::Gnuplot => output::scan_gnuplot,
        Format::Text => return Err(CliError::Config("scan output format must be csv, json or gnuplot".into())),
    };
    let bs = band_structure(&args.medium, &args.range, args.samples)?;
    emit(args.out.as_deref(), &text_fn(&bs), stdout)?;
    Ok(ExitCode::Success)
}

fn cmd_gaps(args: &GapsArgs, stdout: &mut dyn Write) -> Result<ExitCode, CliError> {
    let text_fn = match args.format {
        Format::Text => output::gaps_text,
        Format::Csv => output::gaps_csv,
        Format::Json => output::gaps_json,
        Format::Gnuplot => return Err(CliError::Config("gap output format must be text, csv or json".into())),
    };
    let bs = band_structure(&args.medium, &args.range, args.samples)?;
    emit(args.out.as_deref(), &text_fn(&bs.gaps), stdout)?;
    Ok(ExitCode::Success)
}

fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<ExitCode, CliError> {
    let (medium, inc) = args.medium.load()?;
    if let Some(tol) = args.tol {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(CliError::Config(format!("--tol must be a non-negative number, got {tol}")));
        }
    }
    let grid = ScanConfig::new(args.range.omega_min, args.range.omega_max, args.omega_grid);
    grid.validate()?;
    let req = VerifyRequest {
        medium,
        label: args.medium.profile.clone(),
        inc,
        pol: args.medium.pol,
        pathway: args.medium.pathway,
        omegas: grid.grid(),
        oracle: args.oracle,
        tol: args.tol,
    };
    let pool = parallel::pool(parallel::requested_threads()?)?;
    let report = verify::run(&pool, &req)?;
    emit(args.out.as_deref(), &report.to_json(), stdout)?;
    Ok(if report.passed { ExitCode::Success } else { ExitCode::ThresholdExceeded })
}

/// Runs the CLI and returns the process exit status. Diagnostics go to
/// `stderr`; data goes to `stdout` unless `--out` is given.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Scan(a) => cmd_scan(a, stdout),
        Command::Gaps(a) => cmd_gaps(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
    };
    match result {
        Ok(code) => {
            if code == ExitCode::ThresholdExceeded {
                let _ = writeln!(stderr, "pcband: verification threshold exceeded");
            }
            code as i32
        }
        Err(e) => {
            let _ = writeln!(stderr, "pcband: {e}");
            e.exit_code() as i32
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run_with(args, &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}
