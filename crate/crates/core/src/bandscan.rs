//! Frequency sweeps: band structures, gap edges and the low-frequency
//! effective index.
//!
//! Evaluation of the frequency grid is separated from assembly so that a
//! caller with threads can evaluate the grid concurrently and hand the
//! ordered results to [`assemble`]; [`scan`] does both sequentially.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dispersion::{BandState, DispersionModel, DispersionSample};
pub use crate::dispersion::{Medium, Pathway};
use crate::error::{Error, Result};
use crate::profile::{IncidenceConfig, Polarization};

/// Bisection stops once the bracket is this narrow.
pub const EDGE_RESOLUTION: f64 = 1e-9;
/// Largest fraction of grid samples allowed to fail.
pub const MAX_FAILED_FRACTION: f64 = 0.05;
/// Cap on samples spent below `omega_min` to count traversed gaps.
const MAX_PREFIX: usize = 20_000;
/// Slack on the monotonicity test of unfolded κL.
const UNFOLD_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    pub samples: usize,
    pub pol: Polarization,
    pub inc: IncidenceConfig,
    pub pathway: Pathway,
}

impl ScanConfig {
    pub fn new(omega_min: f64, omega_max: f64, samples: usize) -> Self {
        Self {
            omega_min,
            omega_max,
            samples,
            pol: Polarization::Te,
            inc: IncidenceConfig::normal(),
            pathway: Pathway::Auto,
        }
    }

    pub fn with_polarization(mut self, pol: Polarization) -> Self {
        self.pol = pol;
        self
    }

    pub fn with_incidence(mut self, inc: IncidenceConfig) -> Self {
        self.inc = inc;
        self
    }

    pub fn with_pathway(mut self, pathway: Pathway) -> Self {
        self.pathway = pathway;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_min.is_finite() && self.omega_max.is_finite()) {
            return Err(Error::InvalidConfig("frequency bounds must be finite".into()));
        }
        if !(0.0 < self.omega_min && self.omega_min < self.omega_max) {
            return Err(Error::InvalidConfig(alloc::format!(
                "need 0 < omega_min < omega_max, got [{}, {}]",
                self.omega_min,
                self.omega_max
            )));
        }
        if self.samples < 2 {
            return Err(Error::InvalidConfig(alloc::format!("need at least 2 samples, got {}", self.samples)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.omega_max - self.omega_min) / (self.samples - 1) as f64
    }

    /// The uniform frequency grid.
    pub fn grid(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.samples)
            .map(|i| if i + 1 == self.samples { self.omega_max } else { self.omega_min + h * i as f64 })
            .collect()
    }

    /// Frequencies below `omega_min`, used only to count the gaps a band
    /// has already crossed.
    pub fn prefix(&self) -> Vec<f64> {
        let h = self.spacing();
        let count = ((self.omega_min / h).floor() as usize).min(MAX_PREFIX);
        if count == 0 {
            return Vec::new();
        }
        let step = self.omega_min / (count + 1) as f64;
        (1..=count).map(|i| step * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub omega_norm: f64,
    pub sample: Result<DispersionSample>,
    /// Band number `ν` counted from `Ω = 0`; `None` inside gaps and for failed samples.
    pub band_index: Option<usize>,
    /// κL unfolded across zones along the band.
    pub kappa_unfolded: Option<f64>,
}

impl ScanPoint {
    pub fn state(&self) -> Option<BandState> {
        self.sample.as_ref().ok().map(|s| s.state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub omega_lo: f64,
    pub omega_hi: f64,
    /// Largest decay constant seen inside the gap.
    pub max_xi: f64,
    pub parity: u8,
    /// The gap runs into the lower end of the scan.
    pub open_lo: bool,
    /// The gap runs into the upper end of the scan.
    pub open_hi: bool,
}

impl Gap {
    pub fn width(&self) -> f64 {
        self.omega_hi - self.omega_lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.omega_lo + self.omega_hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    pub config: ScanConfig,
    pub pathway: Pathway,
    pub points: Vec<ScanPoint>,
    pub gaps: Vec<Gap>,
    pub failed: usize,
}

impl BandStructure {
    /// Gaps whose both edges were located inside the scan.
    pub fn closed_gaps(&self) -> impl Iterator<Item = &Gap> {
        self.gaps.iter().filter(|g| !g.open_lo && !g.open_hi)
    }

    /// First gap that opens above the lowest band.
    pub fn first_gap(&self) -> Option<&Gap> {
        self.gaps.iter().find(|g| !g.open_lo)
    }
}

/// Sequential scan.
pub fn scan(medium: &Medium, cfg: &ScanConfig) -> Result<BandStructure> {
    scan_with(medium, cfg, |model, omegas| omegas.iter().map(|&w| model.evaluate(w)).collect())
}

/// Scan with a caller-supplied grid evaluator. `eval` must return one result
/// per frequency, in order.
pub fn scan_with<E>(medium: &Medium, cfg: &ScanConfig, eval: E) -> Result<BandStructure>
where
    E: Fn(&DispersionModel, &[f64]) -> Vec<Result<DispersionSample>>,
{
    cfg.validate()?;
    let model = DispersionModel::new(medium, cfg.inc, cfg.pol, cfg.pathway)?;
    let prefix_omegas = cfg.prefix();
    let grid = cfg.grid();
    let prefix = eval(&model, &prefix_omegas);
    let samples = eval(&model, &grid);
    assemble(&model, cfg, &prefix, samples)
}

/// Builds the band structure from evaluated prefix and grid samples,
/// bisecting gap edges with `model`.
pub fn assemble(
    model: &DispersionModel,
    cfg: &ScanConfig,
    prefix: &[Result<DispersionSample>],
    samples: Vec<Result<DispersionSample>>,
) -> Result<BandStructure> {
    if samples.len() != cfg.samples {
        return Err(Error::InvalidConfig(alloc::format!(
            "evaluator returned {} samples for a grid of {}",
            samples.len(),
            cfg.samples
        )));
    }
    let failed = samples.iter().filter(|s| s.is_err()).count();
    if failed as f64 > MAX_FAILED_FRACTION * cfg.samples as f64 {
        let first = samples.iter().find_map(|s| s.as_ref().err()).map(|e| e.to_string()).unwrap_or_default();
        return Err(Error::ScanFailed { failed, total: cfg.samples, first });
    }

    let grid = cfg.grid();
    let mut points: Vec<ScanPoint> = grid
        .iter()
        .zip(samples)
        .map(|(&omega_norm, sample)| ScanPoint { omega_norm, sample, band_index: None, kappa_unfolded: None })
        .collect();

    let mut unfolder = Unfolder::default();
    for s in prefix.iter().filter_map(|s| s.as_ref().ok()) {
        unfolder.push(&s.state);
    }
    for p in points.iter_mut() {
        if let Ok(s) = &p.sample {
            if let Some((band, kappa)) = unfolder.push(&s.state) {
                p.band_index = Some(band);
                p.kappa_unfolded = Some(kappa);
            }
        }
    }

    let gaps = find_gap_edges(&points, |w| model.cos_kl(w).map(|c| c.re));
    Ok(BandStructure { config: *cfg, pathway: model.pathway(), points, gaps, failed })
}

/// Tracks the zone index while walking up in frequency.
#[derive(Debug, Default)]
struct Unfolder {
    band: usize,
    prev: Option<f64>,
    /// Last increment of the unfolded phase within the current band.
    step: Option<f64>,
    seen_allowed: bool,
    in_gap: bool,
}

impl Unfolder {
    fn unfold(band: usize, reduced: f64) -> f64 {
        if band.is_multiple_of(2) {
            band as f64 * PI + reduced
        } else {
            (band + 1) as f64 * PI - reduced
        }
    }

    fn push(&mut self, state: &BandState) -> Option<(usize, f64)> {
        let reduced = match *state {
            BandState::Allowed { kappa_l } => kappa_l,
            BandState::Edge { parity } => f64::from(parity) * PI,
            BandState::Forbidden { .. } => {
                // a forbidden run before any allowed sample is the Ω → 0 edge, not a gap
                self.in_gap = self.seen_allowed;
                return None;
            }
        };
        if self.in_gap {
            self.band += 1;
            self.in_gap = false;
            self.step = None;
        }
        self.seen_allowed = true;
        let mut kappa = Self::unfold(self.band, reduced);
        if let Some(prev) = self.prev {
            // a closed gap (touching edge) reverses the reduced phase; the
            // unfolded phase must keep growing, and when a trend is known the
            // zone continuing it most smoothly wins
            while kappa < prev - UNFOLD_SLACK {
                self.band += 1;
                kappa = Self::unfold(self.band, reduced);
            }
            if let Some(step) = self.step {
                let target = prev + step;
                let next = Self::unfold(self.band + 1, reduced);
                if (next - target).abs() < (kappa - target).abs() {
                    self.band += 1;
                    kappa = next;
                }
            }
            self.step = Some(kappa - prev);
        }
        self.prev = Some(kappa);
        Some((self.band, kappa))
    }
}

fn excess(c: f64) -> f64 {
    c.abs() - 1.0
}

/// Locates gaps from sign changes of `|c| − 1` between neighbouring
/// successful samples, refining each crossing by bisection with `eval`.
pub fn find_gap_edges<F>(points: &[ScanPoint], mut eval: F) -> Vec<Gap>
where
    F: FnMut(f64) -> Result<f64>,
{
    let ok: Vec<(f64, DispersionSample)> =
        points.iter().filter_map(|p| p.sample.as_ref().ok().map(|s| (p.omega_norm, *s))).collect();
    let mut gaps = Vec::new();
    if ok.is_empty() {
        return gaps;
    }
    let forbidden = |s: &DispersionSample| excess(s.cos_kl) > 0.0;
    let xi_of = |s: &DispersionSample| match s.state {
        BandState::Forbidden { xi, .. } => xi,
        _ => 0.0,
    };

    let mut open: Option<Gap> = None;
    if forbidden(&ok[0].1) {
        open = Some(Gap {
            omega_lo: ok[0].0,
            omega_hi: ok[0].0,
            max_xi: xi_of(&ok[0].1),
            parity: u8::from(ok[0].1.cos_kl < 0.0),
            open_lo: true,
            open_hi: false,
        });
    }
    for w in ok.windows(2) {
        let ((w0, s0), (w1, s1)) = (w[0], w[1]);
        let (f0, f1) = (forbidden(&s0), forbidden(&s1));
        if f0 != f1 {
            let edge = bisect(&mut eval, w0, w1, f0);
            if f1 {
                open = Some(Gap {
                    omega_lo: edge,
                    omega_hi: edge,
                    max_xi: 0.0,
                    parity: u8::from(s1.cos_kl < 0.0),
                    open_lo: false,
                    open_hi: false,
                });
            } else if let Some(mut g) = open.take() {
                g.omega_hi = edge;
                gaps.push(g);
            }
        }
        if f1 {
            if let Some(g) = open.as_mut() {
                g.max_xi = g.max_xi.max(xi_of(&s1));
            }
        }
    }
    if let Some(mut g) = open {
        g.omega_hi = ok[ok.len() - 1].0;
        g.open_hi = true;
        gaps.push(g);
    }
    gaps
}

/// Bisection for the point where `|c| − 1` changes sign inside `[lo, hi]`.
/// A failed evaluation ends the refinement at the current bracket.
fn bisect<F>(eval: &mut F, mut lo: f64, mut hi: f64, lo_forbidden: bool) -> f64
where
    F: FnMut(f64) -> Result<f64>,
{
    while hi - lo > EDGE_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        match eval(mid) {
            Ok(c) if (excess(c) > 0.0) == lo_forbidden => lo = mid,
            Ok(_) => hi = mid,
            Err(_) => break,
        }
    }
    0.5 * (lo + hi)
}

/// Straight-line fit `κ ≈ n_phase·k0` through the origin at low frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowFrequencyFit {
    /// Effective (phase) index.
    pub slope: f64,
    /// Largest `|κ − slope·k0| / κ` over the fitted points.
    pub max_rel_residual: f64,
}

pub const LOW_FREQ_RANGE: (f64, f64) = (0.001, 0.01);
pub const LOW_FREQ_POINTS: usize = 20;

pub fn low_freq_effective_index(
    medium: &Medium,
    inc: IncidenceConfig,
    pol: Polarization,
    pathway: Pathway,
) -> Result<LowFrequencyFit> {
    let model = DispersionModel::new(medium, inc, pol, pathway)?;
    let period = model.period();
    let (lo, hi) = LOW_FREQ_RANGE;
    let mut pts = Vec::with_capacity(LOW_FREQ_POINTS);
    for i in 0..LOW_FREQ_POINTS {
        let omega = lo + (hi - lo) * i as f64 / (LOW_FREQ_POINTS - 1) as f64;
        let s = model.evaluate(omega)?;
        let kappa_l = match s.state {
            BandState::Allowed { kappa_l } => kappa_l,
            _ => {
                return Err(Error::InvalidConfig(alloc::format!(
                    "low-frequency sample at Ω = {} is not in the first band (cos κL = {})",
                    omega,
                    s.cos_kl
                )))
            }
        };
        pts.push((crate::k0_from_omega(omega, period), kappa_l / period));
    }
    let sxy: f64 = pts.iter().map(|(k0, kappa)| k0 * kappa).sum();
    let sxx: f64 = pts.iter().map(|(k0, _)| k0 * k0).sum();
    let slope = sxy / sxx;
    let max_rel_residual = pts.iter().map(|(k0, kappa)| ((kappa - slope * k0) / kappa).abs()).fold(0.0, f64::max);
    Ok(LowFrequencyFit { slope, max_rel_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{CanonicalProfile, Profile};
    use crate::stratified::{Layer, LayerStack};

    fn homogeneous() -> Medium {
        Medium::Profile(Profile::parse_expr("2").unwrap())
    }

    #[test]
    fn config_validation() {
        assert!(ScanConfig::new(0.0, 1.0, 10).validate().is_err());
        assert!(ScanConfig::new(0.5, 0.4, 10).validate().is_err());
        assert!(ScanConfig::new(0.1, 0.4, 1).validate().is_err());
        assert!(ScanConfig::new(0.1, 0.4, 2).validate().is_ok());
        let g = ScanConfig::new(0.1, 0.4, 4).grid();
        assert_eq!(g.len(), 4);
        assert_eq!(g[3], 0.4);
    }

    #[test]
    fn homogeneous_has_no_gaps_and_linear_kappa() {
        let cfg = ScanConfig::new(0.01, 1.0, 200);
        let bs = scan(&homogeneous(), &cfg).unwrap();
        assert!(bs.gaps.is_empty());
        for p in &bs.points {
            let k = p.kappa_unfolded.unwrap();
            assert!((k - 2.0 * PI * p.omega_norm * 2.0).abs() < 1e-6, "Ω = {}", p.omega_norm);
        }
        let fit = low_freq_effective_index(&homogeneous(), IncidenceConfig::normal(), Polarization::Te, Pathway::Auto)
            .unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-6);
    }

    #[test]
    fn band_index_counts_gaps() {
        let stack = LayerStack::new(alloc::vec![Layer { n: 1.0, d: 0.5 }, Layer { n: 3.0, d: 0.5 }]).unwrap();
        let medium = Medium::Layers(stack);
        let full = scan(&medium, &ScanConfig::new(0.01, 1.5, 400)).unwrap();
        assert!(full.closed_gaps().count() >= 2);
        // the index above omega_min must not depend on where the scan starts
        let late = scan(&medium, &ScanConfig::new(0.6, 1.5, 200)).unwrap();
        let band_at = |bs: &BandStructure, w: f64| {
            bs.points
                .iter()
                .find(|p| (p.omega_norm - w).abs() < 2e-3 && p.band_index.is_some())
                .and_then(|p| p.band_index)
        };
        let probe = late.points.iter().rev().find(|p| p.band_index.is_some()).unwrap().omega_norm;
        assert_eq!(band_at(&full, probe), band_at(&late, probe));
        // unfolded κL is monotone along the whole scan
        let ks: Vec<f64> = full.points.iter().filter_map(|p| p.kappa_unfolded).collect();
        assert!(ks.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    }

    #[test]
    fn gaps_are_ordered_and_bracket_forbidden_samples() {
        let bs = scan(&Profile::canonical(CanonicalProfile::Square).into(), &ScanConfig::new(0.01, 1.5, 300)).unwrap();
        assert!(!bs.gaps.is_empty());
        for g in &bs.gaps {
            assert!(g.omega_lo < g.omega_hi);
            for p in &bs.points {
                if p.omega_norm > g.omega_lo && p.omega_norm < g.omega_hi {
                    assert!(p.state().unwrap().is_forbidden() || matches!(p.state(), Some(BandState::Edge { .. })));
                }
            }
        }
        assert!(bs.gaps.windows(2).all(|w| w[0].omega_hi < w[1].omega_lo));
    }

    #[test]
    fn failed_samples_are_annotated() {
        let cfg = ScanConfig::new(0.1, 1.0, 100);
        let medium = homogeneous();
        let bs = scan_with(&medium, &cfg, |m, ws| {
            ws.iter().map(|&w| if (w - 0.5).abs() < 0.005 { Err(Error::NotANumber) } else { m.evaluate(w) }).collect()
        })
        .unwrap();
        assert_eq!(bs.failed, 1);
        let err = scan_with(&medium, &cfg, |_, ws| ws.iter().map(|_| Err(Error::NotANumber)).collect()).unwrap_err();
        assert!(matches!(err, Error::ScanFailed { failed: 100, total: 100, .. }));
    }

    #[test]
    fn open_gap_at_scan_end() {
        let stack = LayerStack::new(alloc::vec![Layer { n: 1.0, d: 0.5 }, Layer { n: 3.0, d: 0.5 }]).unwrap();
        let medium = Medium::Layers(stack);
        let full = scan(&medium, &ScanConfig::new(0.01, 1.0, 400)).unwrap();
        let g = *full.first_gap().unwrap();
        let cut = scan(&medium, &ScanConfig::new(0.01, g.center(), 200)).unwrap();
        let last = cut.gaps.last().unwrap();
        assert!(last.open_hi);
        assert!((last.omega_lo - g.omega_lo).abs() < 1e-8);
    }
}
