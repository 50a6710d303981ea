//! Pathway-versus-oracle comparison reports.

use pcband_core::oracle::{self, OracleKind, OracleReport};
use pcband_core::{k0_from_omega, DispersionModel, IncidenceConfig, Medium, Pathway, Polarization, Profile};
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::Serialize;

use crate::CliError;

/// Default threshold when the pathway is exact (layered media).
pub const EXACT_TOL: f64 = 1e-8;
/// Default threshold for continuous profiles.
pub const CONTINUOUS_TOL: f64 = 1e-3;
/// Finest staircase used by the staircase oracle.
pub const STAIRCASE_N_MAX: usize = 4096;

/// Which oracles to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleChoice {
    One(OracleKind),
    /// Every oracle applicable to the medium.
    All,
}

impl std::str::FromStr for OracleChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(OracleChoice::All);
        }
        s.parse()
            .map(OracleChoice::One)
            .map_err(|_| format!("unknown oracle '{s}' (expected monodromy, staircase, two-layer or all)"))
    }
}

#[derive(Debug, Clone)]
pub struct VerifyRequest {
    pub medium: Medium,
    pub label: String,
    pub inc: IncidenceConfig,
    pub pol: Polarization,
    pub pathway: Pathway,
    pub omegas: Vec<f64>,
    pub oracle: OracleChoice,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub omega_norm: f64,
    pub dtmm_value: f64,
    pub oracle_value: f64,
    pub abs_error: f64,
    pub oracle: &'static str,
}

impl From<OracleReport> for ReportRow {
    fn from(r: OracleReport) -> Self {
        ReportRow {
            omega_norm: r.omega_norm,
            dtmm_value: r.dtmm_value,
            oracle_value: r.oracle_value,
            abs_error: r.abs_error,
            oracle: r.oracle_kind.name(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub pathway: &'static str,
    pub oracle: &'static str,
    pub threshold: f64,
    pub max_abs_error: f64,
    pub mean_abs_error: f64,
    pub worst_omega: f64,
    pub passed: bool,
}

/// Largest disagreement between the monodromy and staircase oracles, when
/// both ran.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OracleAgreement {
    pub max_abs_difference: f64,
    pub worst_omega: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub profile: String,
    pub polarization: String,
    pub n_ambient: f64,
    pub theta_rad: f64,
    pub pathway: &'static str,
    pub summary: Vec<Summary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_agreement: Option<OracleAgreement>,
    /// Oracles left out of `all` because the medium does not admit them.
    pub skipped: Vec<&'static str>,
    pub passed: bool,
    pub reports: Vec<ReportRow>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

/// A prepared oracle for one medium.
enum Oracle {
    Monodromy(Profile),
    Staircase(Profile),
    TwoLayer { n1: f64, n2: f64, d1: f64, d2: f64 },
}

impl Oracle {
    fn kind(&self) -> OracleKind {
        match self {
            Oracle::Monodromy(_) => OracleKind::Monodromy,
            Oracle::Staircase(_) => OracleKind::Staircase,
            Oracle::TwoLayer { .. } => OracleKind::TwoLayer,
        }
    }

    fn prepare(kind: OracleKind, medium: &Medium) -> Option<Oracle> {
        match kind {
            OracleKind::Monodromy => Some(Oracle::Monodromy(medium.to_profile())),
            OracleKind::Staircase => Some(Oracle::Staircase(medium.to_profile())),
            OracleKind::TwoLayer => {
                let (a, b) = medium.layer_stack()?.two_layer()?;
                Some(Oracle::TwoLayer { n1: a.n, n2: b.n, d1: a.d, d2: b.d })
            }
        }
    }

    fn eval(&self, inc: &IncidenceConfig, k0: f64, pol: Polarization) -> pcband_core::Result<f64> {
        match self {
            Oracle::Monodromy(p) => oracle::monodromy_cos(p, inc, k0, pol),
            Oracle::Staircase(p) => oracle::staircase_limit_cos(p, inc, k0, pol, STAIRCASE_N_MAX).map(|e| e.value),
            &Oracle::TwoLayer { n1, n2, d1, d2 } => oracle::analytic_two_layer(n1, n2, d1, d2, inc, k0, pol),
        }
    }
}

fn oracle_error(kind: OracleKind, source: pcband_core::Error) -> CliError {
    CliError::Oracle { oracle: kind.name(), source }
}

pub fn run(pool: &ThreadPool, req: &VerifyRequest) -> Result<VerifyReport, CliError> {
    let model = DispersionModel::new(&req.medium, req.inc, req.pol, req.pathway)?;
    let kinds: Vec<OracleKind> = match req.oracle {
        OracleChoice::One(k) => vec![k],
        OracleChoice::All => OracleKind::ALL.to_vec(),
    };
    let mut oracles = Vec::new();
    let mut skipped = Vec::new();
    for kind in kinds {
        match Oracle::prepare(kind, &req.medium) {
            Some(o) => oracles.push(o),
            None if req.oracle == OracleChoice::All => skipped.push(kind.name()),
            None => {
                return Err(oracle_error(
                    kind,
                    pcband_core::Error::OracleUnavailable("the medium is not a two-layer stack".into()),
                ))
            }
        }
    }

    let period = model.period();
    let rows: Vec<Result<Vec<OracleReport>, CliError>> = pool.install(|| {
        req.omegas
            .par_iter()
            .map(|&omega| {
                let dtmm = model.cos_kl(omega)?.re;
                let k0 = k0_from_omega(omega, period);
                oracles
                    .iter()
                    .map(|o| {
                        let value = o.eval(&req.inc, k0, req.pol).map_err(|e| oracle_error(o.kind(), e))?;
                        Ok(OracleReport::new(omega, dtmm, value, o.kind()))
                    })
                    .collect()
            })
            .collect()
    });
    let mut reports = Vec::with_capacity(req.omegas.len() * oracles.len());
    for r in rows {
        reports.extend(r?);
    }

    let exact = model.pathway() == Pathway::Stratified && req.medium.layer_stack().is_some();
    let threshold = req.tol.unwrap_or(if exact { EXACT_TOL } else { CONTINUOUS_TOL });
    let summary: Vec<Summary> = oracles
        .iter()
        .map(|o| {
            let errs: Vec<&OracleReport> = reports.iter().filter(|r| r.oracle_kind == o.kind()).collect();
            let worst = errs.iter().copied().max_by(|a, b| a.abs_error.total_cmp(&b.abs_error));
            let max_abs_error = worst.map_or(0.0, |r| r.abs_error);
            let mean_abs_error =
                if errs.is_empty() { 0.0 } else { errs.iter().map(|r| r.abs_error).sum::<f64>() / errs.len() as f64 };
            Summary {
                pathway: model.pathway().name(),
                oracle: o.kind().name(),
                threshold,
                max_abs_error,
                mean_abs_error,
                worst_omega: worst.map_or(f64::NAN, |r| r.omega_norm),
                passed: max_abs_error <= threshold,
            }
        })
        .collect();

    let oracle_agreement = agreement(&reports);
    Ok(VerifyReport {
        profile: req.label.clone(),
        polarization: req.pol.to_string(),
        n_ambient: req.inc.n_ambient(),
        theta_rad: req.inc.theta(),
        pathway: model.pathway().name(),
        passed: summary.iter().all(|s| s.passed),
        summary,
        oracle_agreement,
        skipped,
        reports: reports.into_iter().map(ReportRow::from).collect(),
    })
}

fn agreement(reports: &[OracleReport]) -> Option<OracleAgreement> {
    let pick = |kind| reports.iter().filter(move |r: &&OracleReport| r.oracle_kind == kind);
    let mut out: Option<OracleAgreement> = None;
    for (m, s) in pick(OracleKind::Monodromy).zip(pick(OracleKind::Staircase)) {
        let d = (m.oracle_value - s.oracle_value).abs();
        if out.is_none_or(|a| d > a.max_abs_difference) {
            out = Some(OracleAgreement { max_abs_difference: d, worst_omega: m.omega_norm });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parallel;
    use pcband_core::{Layer, LayerStack};

    fn request(medium: Medium, oracle: OracleChoice) -> VerifyRequest {
        VerifyRequest {
            medium,
            label: "test".into(),
            inc: IncidenceConfig::normal(),
            pol: Polarization::Te,
            pathway: Pathway::Auto,
            omegas: (1..=8).map(|i| 0.15 * i as f64).collect(),
            oracle,
            tol: None,
        }
    }

    fn two_layer() -> Medium {
        Medium::Layers(LayerStack::new(vec![Layer { n: 1.0, d: 0.5 }, Layer { n: 3.0, d: 0.5 }]).unwrap())
    }

    #[test]
    fn two_layer_stack_passes_every_oracle() {
        let pool = parallel::pool(Some(2)).unwrap();
        let report = run(&pool, &request(two_layer(), OracleChoice::All)).unwrap();
        assert!(report.passed);
        assert_eq!(report.summary.len(), 3);
        assert!(report.skipped.is_empty());
        for s in &report.summary {
            assert_eq!(s.threshold, EXACT_TOL);
            assert!(s.max_abs_error <= 1e-8, "{s:?}");
        }
        assert_eq!(report.reports.len(), 24);
    }

    #[test]
    fn two_layer_oracle_on_a_continuous_profile() {
        let pool = parallel::pool(Some(1)).unwrap();
        let medium = Medium::Profile(Profile::canonical(pcband_core::CanonicalProfile::Sinusoidal));
        let all = run(&pool, &request(medium.clone(), OracleChoice::All)).unwrap();
        assert_eq!(all.skipped, vec!["two_layer"]);
        let err = run(&pool, &request(medium, OracleChoice::One(OracleKind::TwoLayer))).unwrap_err();
        assert_eq!(err.exit_code(), crate::ExitCode::Numeric);
    }

    #[test]
    fn tolerance_override() {
        let pool = parallel::pool(Some(1)).unwrap();
        let mut req = request(two_layer(), OracleChoice::One(OracleKind::Monodromy));
        req.tol = Some(0.0);
        let report = run(&pool, &req).unwrap();
        assert_eq!(report.summary[0].threshold, 0.0);
    }
}
