//! Reference values for `cos(κL)` that share no code with the transfer-matrix
//! pathways.
//!
//! * [`monodromy_cos`] integrates the second-order wave equation itself with
//!   fixed-step RK4 from two independent initial conditions and takes half
//!   the trace of the resulting monodromy matrix.
//! * [`analytic_two_layer`] is the textbook dispersion relation of a
//!   two-layer stack.
//! * [`staircase_limit_cos`] Richardson-extrapolates the exact layered
//!   result as the staircase is refined.

use core::fmt;
use core::str::FromStr;

use crate::dispersion::bloch_cos_stratified;
use crate::error::{Error, Result};
use crate::profile::{IncidenceConfig, Polarization, Profile, Side};
use crate::stratified::{period_transfer, staircase};

/// RK4 steps per period.
pub const MONODROMY_STEPS: usize = 20_000;
/// Largest tolerated drift of `det W` from 1.
pub const WRONSKIAN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleKind {
    Monodromy,
    TwoLayer,
    Staircase,
}

impl OracleKind {
    pub const ALL: [OracleKind; 3] = [OracleKind::Monodromy, OracleKind::TwoLayer, OracleKind::Staircase];

    pub fn name(self) -> &'static str {
        match self {
            OracleKind::Monodromy => "monodromy",
            OracleKind::TwoLayer => "two_layer",
            OracleKind::Staircase => "staircase",
        }
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OracleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "monodromy" => Ok(OracleKind::Monodromy),
            "two-layer" | "two_layer" | "twolayer" => Ok(OracleKind::TwoLayer),
            "staircase" => Ok(OracleKind::Staircase),
            _ => Err(Error::InvalidConfig(alloc::format!("unknown oracle '{}'", s))),
        }
    }
}

/// One pathway-versus-oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub omega_norm: f64,
    pub dtmm_value: f64,
    pub oracle_value: f64,
    pub abs_error: f64,
    pub oracle_kind: OracleKind,
}

impl OracleReport {
    pub fn new(omega_norm: f64, dtmm_value: f64, oracle_value: f64, oracle_kind: OracleKind) -> Self {
        Self { omega_norm, dtmm_value, oracle_value, abs_error: (dtmm_value - oracle_value).abs(), oracle_kind }
    }
}

/// State `(A, A')` for both fundamental solutions, column-wise.
type Fundamental = [[f64; 2]; 2];

/// Floquet discriminant `tr(W)/2` of the wave equation over one period.
///
/// TE: `A'' = −k²A`. TM: `A'' = 2(n'/n)A' − k²A`. At index jumps `A` is
/// continuous, and so is `A'` (TE) or `A'/n²` (TM).
pub fn monodromy_cos(p: &Profile, inc: &IncidenceConfig, k0: f64, pol: Polarization) -> Result<f64> {
    let l = p.period();
    let (a, b) = (-0.5 * l, 0.5 * l);
    let ne2 = inc.n_eff() * inc.n_eff();
    let k0sq = k0 * k0;

    let mut stops: alloc::vec::Vec<f64> = p.breakpoints_between(a, b);
    stops.push(b);
    stops.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
    stops.dedup();
    let jumps = p.jumps_between(a, b);

    // columns: solution started from (1, 0) and from (0, 1)
    let mut w: Fundamental = [[1.0, 0.0], [0.0, 1.0]];
    let mut start = a;
    for &stop in &stops {
        if stop > start {
            let steps = ((MONODROMY_STEPS as f64) * (stop - start) / l).ceil().max(1.0) as usize;
            let h = (stop - start) / steps as f64;
            // stage points are clamped to the piece and its ends use one-sided values, so
            // rounding in `start + h·i` can never pick up the neighbouring medium
            let coeffs = |x: f64| {
                let x = x.clamp(start, stop);
                let side = if x >= stop { Side::Left } else { Side::Right };
                let (n, dn) = p.eval(x, side);
                let ksq = k0sq * (n * n - ne2);
                let damping = match pol {
                    Polarization::Te => 0.0,
                    Polarization::Tm => 2.0 * dn / n,
                };
                (damping, ksq)
            };
            let rhs = |x: f64, s: [f64; 2]| {
                let (damping, ksq) = coeffs(x);
                [s[1], damping * s[1] - ksq * s[0]]
            };
            for col in w.iter_mut() {
                let mut s = *col;
                for i in 0..steps {
                    let x = start + h * i as f64;
                    let k1 = rhs(x, s);
                    let k2 = rhs(x + 0.5 * h, [s[0] + 0.5 * h * k1[0], s[1] + 0.5 * h * k1[1]]);
                    let k3 = rhs(x + 0.5 * h, [s[0] + 0.5 * h * k2[0], s[1] + 0.5 * h * k2[1]]);
                    let k4 = rhs(x + h, [s[0] + h * k3[0], s[1] + h * k3[1]]);
                    s[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
                    s[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
                }
                *col = s;
            }
        }
        if let Some(d) = jumps.iter().find(|d| d.x == stop) {
            let factor = match pol {
                Polarization::Te => 1.0,
                Polarization::Tm => (d.right / d.left) * (d.right / d.left),
            };
            for col in w.iter_mut() {
                col[1] *= factor;
            }
        }
        start = stop;
    }

    let det = w[0][0] * w[1][1] - w[1][0] * w[0][1];
    if !det.is_finite() || (det - 1.0).abs() > WRONSKIAN_TOL {
        return Err(Error::Unstable { det, expected: 1.0 });
    }
    Ok(0.5 * (w[0][0] + w[1][1]))
}

/// `cos k1d1·cos k2d2 − ½(η + 1/η)·sin k1d1·sin k2d2`, with `η = k1/k2` (TE)
/// or `n2²k1/(n1²k2)` (TM).
pub fn analytic_two_layer(
    n1: f64,
    n2: f64,
    d1: f64,
    d2: f64,
    inc: &IncidenceConfig,
    k0: f64,
    pol: Polarization,
) -> Result<f64> {
    let ne = inc.n_eff();
    let min_n = n1.min(n2);
    if min_n <= ne {
        return Err(Error::ComplexWavenumber { n_eff: ne, n_min: min_n });
    }
    let k1 = k0 * (n1 * n1 - ne * ne).sqrt();
    let k2 = k0 * (n2 * n2 - ne * ne).sqrt();
    let eta = match pol {
        Polarization::Te => k1 / k2,
        Polarization::Tm => (n2 * n2 * k1) / (n1 * n1 * k2),
    };
    let (p1, p2) = (k1 * d1, k2 * d2);
    Ok(p1.cos() * p2.cos() - 0.5 * (eta + 1.0 / eta) * p1.sin() * p2.sin())
}

/// Richardson-extrapolated staircase limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaircaseEstimate {
    pub value: f64,
    /// `|extrapolated − finest|`.
    pub error_estimate: f64,
    /// Values at `N_max/4`, `N_max/2`, `N_max` layers.
    pub raw: [f64; 3],
}

/// Below this, successive staircase differences count as converged.
const CONVERGED: f64 = 1e-13;

pub fn staircase_limit_cos(
    p: &Profile,
    inc: &IncidenceConfig,
    k0: f64,
    pol: Polarization,
    n_max: usize,
) -> Result<StaircaseEstimate> {
    if n_max < 64 || !n_max.is_power_of_two() {
        return Err(Error::InvalidConfig(alloc::format!("N_max must be a power of two ≥ 64, got {}", n_max)));
    }
    let mut raw = [0.0; 3];
    for (slot, n) in raw.iter_mut().zip([n_max / 4, n_max / 2, n_max]) {
        let stack = staircase(p, n)?;
        let t = period_transfer(&stack, inc, k0, pol)?;
        if !t.all_real {
            return Err(Error::ComplexWavenumber { n_eff: inc.n_eff(), n_min: stack.min_index() });
        }
        *slot = bloch_cos_stratified(t.q.a11, t.k_first, stack.period());
    }
    let (d1, d2) = (raw[1] - raw[0], raw[2] - raw[1]);
    if d2.abs() <= CONVERGED {
        return Ok(StaircaseEstimate { value: raw[2], error_estimate: d2.abs(), raw });
    }
    if d1 * d2 < 0.0 || d2.abs() > d1.abs() {
        return Err(Error::NonMonotoneConvergence { values: raw });
    }
    let value = raw[2] + d2 / 3.0;
    Ok(StaircaseEstimate { value, error_estimate: (value - raw[2]).abs(), raw })
}
