//! Serialisation of band structures and gap tables.
//!
//! Floats are written with Rust's shortest round-trip formatting, so output is
//! byte-identical across runs and thread counts. All output is UTF-8 with LF
//! line endings.

use std::fmt::Write as _;
use std::str::FromStr;

use pcband_core::{BandState, BandStructure, Gap, ScanPoint};
use serde::Serialize;

/// Frozen CSV header of `pcband scan`.
pub const CSV_HEADER: &str = "omega,cos_kl,kappa_L,xi,state,band";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Gnuplot,
    /// Whitespace-separated gap lines.
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "gnuplot" => Ok(Format::Gnuplot),
            "text" => Ok(Format::Text),
            _ => Err(format!("unknown format '{s}' (expected csv, json, gnuplot or text)")),
        }
    }
}

/// One output row of a scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputRecord {
    pub omega: f64,
    pub cos_kl: Option<f64>,
    /// Reduced Bloch phase in `[0, π]`; absent inside gaps.
    #[serde(rename = "kappa_L")]
    pub kappa_l: Option<f64>,
    /// Decay per period; absent in bands.
    pub xi: Option<f64>,
    pub state: &'static str,
    pub band: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl From<&ScanPoint> for OutputRecord {
    fn from(p: &ScanPoint) -> Self {
        match &p.sample {
            Ok(s) => {
                let (kappa_l, xi) = match s.state {
                    BandState::Allowed { kappa_l } => (Some(kappa_l), None),
                    BandState::Edge { parity } => (Some(f64::from(parity) * std::f64::consts::PI), None),
                    BandState::Forbidden { xi, .. } => (None, Some(xi)),
                };
                OutputRecord {
                    omega: p.omega_norm,
                    cos_kl: Some(s.cos_kl),
                    kappa_l,
                    xi,
                    state: s.state.label(),
                    band: p.band_index,
                    error: None,
                }
            }
            Err(e) => OutputRecord {
                omega: p.omega_norm,
                cos_kl: None,
                kappa_l: None,
                xi: None,
                state: "failed",
                band: None,
                error: Some(e.to_string()),
            },
        }
    }
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn records(bs: &BandStructure) -> Vec<OutputRecord> {
    bs.points.iter().map(OutputRecord::from).collect()
}

pub fn scan_csv(bs: &BandStructure) -> String {
    let mut out = String::with_capacity(64 * (bs.points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records(bs) {
        let _ =
            writeln!(out, "{},{},{},{},{},{}", r.omega, opt(r.cos_kl), opt(r.kappa_l), opt(r.xi), r.state, opt(r.band));
    }
    out
}

#[derive(Serialize)]
struct GapRecord {
    index: usize,
    omega_lo: f64,
    omega_hi: f64,
    width: f64,
    max_xi: f64,
    parity: u8,
    open_lo: bool,
    open_hi: bool,
}

fn gap_records(gaps: &[Gap]) -> Vec<GapRecord> {
    gaps.iter()
        .enumerate()
        .map(|(i, g)| GapRecord {
            index: i + 1,
            omega_lo: g.omega_lo,
            omega_hi: g.omega_hi,
            width: g.width(),
            max_xi: g.max_xi,
            parity: g.parity,
            open_lo: g.open_lo,
            open_hi: g.open_hi,
        })
        .collect()
}

#[derive(Serialize)]
struct ScanDocument<'a> {
    pathway: &'a str,
    polarization: String,
    n_ambient: f64,
    theta_rad: f64,
    omega_min: f64,
    omega_max: f64,
    samples: usize,
    failed: usize,
    points: Vec<OutputRecord>,
    gaps: Vec<GapRecord>,
}

pub fn scan_json(bs: &BandStructure) -> String {
    let cfg = &bs.config;
    let doc = ScanDocument {
        pathway: bs.pathway.name(),
        polarization: cfg.pol.to_string(),
        n_ambient: cfg.inc.n_ambient(),
        theta_rad: cfg.inc.theta(),
        omega_min: cfg.omega_min,
        omega_max: cfg.omega_max,
        samples: cfg.samples,
        failed: bs.failed,
        points: records(bs),
        gaps: gap_records(&bs.gaps),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("scan document serialises");
    s.push('\n');
    s
}

/// Two data blocks separated by a double blank line, so that gnuplot's
/// `index 0` draws the bands and `index 1` the gap intervals.
pub fn scan_gnuplot(bs: &BandStructure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# pcband {} {} band structure", bs.config.pol, bs.pathway);
    out.push_str("# block 0: allowed bands\n# omega kappa_L band cos_kl\n");
    for p in &bs.points {
        let Ok(s) = &p.sample else { continue };
        let kappa = match s.state {
            BandState::Allowed { kappa_l } => kappa_l,
            BandState::Edge { parity } => f64::from(parity) * std::f64::consts::PI,
            BandState::Forbidden { .. } => continue,
        };
        let _ = writeln!(out, "{} {} {} {}", p.omega_norm, kappa, opt(p.band_index), s.cos_kl);
    }
    out.push_str("\n\n# block 1: forbidden gaps\n# omega_lo omega_hi max_xi\n");
    for g in &bs.gaps {
        let _ = writeln!(out, "{} {} {}", g.omega_lo, g.omega_hi, g.max_xi);
    }
    out
}

pub fn gaps_text(gaps: &[Gap]) -> String {
    let mut out = String::new();
    for g in gap_records(gaps) {
        let _ = writeln!(out, "{} {} {} {} {}", g.index, g.omega_lo, g.omega_hi, g.width, g.max_xi);
    }
    out
}

pub fn gaps_csv(gaps: &[Gap]) -> String {
    let mut out = String::from("index,omega_lo,omega_hi,width,max_xi\n");
    for g in gap_records(gaps) {
        let _ = writeln!(out, "{},{},{},{},{}", g.index, g.omega_lo, g.omega_hi, g.width, g.max_xi);
    }
    out
}

pub fn gaps_json(gaps: &[Gap]) -> String {
    let mut s = serde_json::to_string_pretty(&gap_records(gaps)).expect("gap table serialises");
    s.push('\n');
    s
}
