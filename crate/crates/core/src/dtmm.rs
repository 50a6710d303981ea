//! Differential transfer matrices.
//!
//! The envelope `A = (A⁺, A⁻)` of the field `A(x) = e^{−jkx}A⁺ + e^{+jkx}A⁻`
//! obeys `dA/dx = U(x)·A` (TE) or `V(x)·A` (TM). Integrating the coefficient
//! matrix over `[a, b]` gives `M_{a→b}`, and `Q_{a→b} = exp(M_{a→b})`.
//!
//! `U` at different points does not commute, so `exp(∫U)` is the first
//! Magnus term of the true propagator rather than the propagator itself.
//! [`TransferContext::composed_transfer`] multiplies the exponentials of many
//! short sub-intervals and converges to the exact flow; the oracle module
//! uses both to quantify the difference.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Mat2c;
use crate::profile::{wavenumber_from_index, IncidenceConfig, Polarization, Profile, Side};
use crate::quad::{self, QuadOptions};
use crate::stratified::jump_matrix;

/// Entrywise absolute tolerance for integrated coefficient matrices.
pub const MATRIX_TOL: f64 = 1e-10;
/// `|k|` below this fraction of `k0` is treated as a cutoff singularity.
const CUTOFF_GUARD: f64 = 1e-8;
/// Points used to scan an interval for cutoff crossings.
const GUARD_SAMPLES: usize = 256;
/// Points used to test monotonicity of `k` on the half period.
const MONOTONIC_SAMPLES: usize = 256;

/// Everything the coefficient matrices depend on.
#[derive(Debug, Clone, Copy)]
pub struct TransferContext<'a> {
    profile: &'a Profile,
    inc: IncidenceConfig,
    k0: f64,
    pol: Polarization,
}

/// `M_{a→b}` (TE) or `N_{a→b}` (TM).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalMatrix {
    pub m: Mat2c,
    pub a: f64,
    pub b: f64,
    pub pol: Polarization,
}

/// One-period transfer matrix together with the reference wavenumber of its window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodMatrix {
    pub q: Mat2c,
    pub x_ref: f64,
    pub k_ref: Complex64,
}

#[derive(Debug, Clone, Copy)]
struct Local {
    n: f64,
    dn: f64,
    k: Complex64,
    dk: Complex64,
}

impl<'a> TransferContext<'a> {
    pub fn new(profile: &'a Profile, inc: IncidenceConfig, k0: f64, pol: Polarization) -> Result<Self> {
        if !(k0.is_finite() && k0 > 0.0) {
            return Err(Error::InvalidConfig(alloc::format!("free-space wavenumber must be positive, got {}", k0)));
        }
        Ok(Self { profile, inc, k0, pol })
    }

    pub fn profile(&self) -> &'a Profile {
        self.profile
    }

    pub fn incidence(&self) -> IncidenceConfig {
        self.inc
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn polarization(&self) -> Polarization {
        self.pol
    }

    pub fn with_polarization(&self, pol: Polarization) -> Self {
        Self { pol, ..*self }
    }

    pub fn wavenumber(&self, x: f64) -> Complex64 {
        self.profile.wavenumber(&self.inc, self.k0, x)
    }

    fn local(&self, x: f64, side: Side) -> Local {
        let (n, dn) = self.profile.eval(x, side);
        let k = wavenumber_from_index(n, self.inc.n_eff(), self.k0);
        // k' = k0²·n·n'/k, avoiding a difference of k
        let dk = if k.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { (self.k0 * self.k0 * n * dn) / k };
        Local { n, dn, k, dk }
    }

    fn checked_local(&self, x: f64) -> Result<Local> {
        let loc = self.local(x, Side::Right);
        if loc.k.norm() < CUTOFF_GUARD * self.k0 {
            return Err(Error::Cutoff { x });
        }
        Ok(loc)
    }

    /// TE coefficient matrix
    /// `(k'/2k)·[[−1 + j2kx, e^{+j2kx}], [e^{−j2kx}, −1 − j2kx]]`.
    pub fn u_matrix(&self, x: f64) -> Result<Mat2c> {
        Ok(u_entries(&self.checked_local(x)?, x))
    }

    /// TM coefficient matrix.
    pub fn v_matrix(&self, x: f64) -> Result<Mat2c> {
        Ok(v_entries(&self.checked_local(x)?, x))
    }

    /// `U` or `V` depending on the context polarization.
    pub fn coefficient_matrix(&self, x: f64) -> Result<Mat2c> {
        match self.pol {
            Polarization::Te => self.u_matrix(x),
            Polarization::Tm => self.v_matrix(x),
        }
    }

    /// Refuses intervals that reach within the cutoff guard of `k = 0`.
    fn guard_cutoff(&self, lo: f64, hi: f64) -> Result<()> {
        let ne2 = self.inc.n_eff() * self.inc.n_eff();
        let mut prev: Option<f64> = None;
        let mut pts: Vec<f64> = (0..=GUARD_SAMPLES).map(|i| lo + (hi - lo) * i as f64 / GUARD_SAMPLES as f64).collect();
        pts.extend(self.profile.breakpoints_between(lo, hi));
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        for (i, &x) in pts.iter().enumerate() {
            let side = if i + 1 == pts.len() { Side::Left } else { Side::Right };
            let n = self.profile.eval(x, side).0;
            let d = n * n - ne2;
            if self.k0 * d.abs().sqrt() < CUTOFF_GUARD * self.k0 {
                return Err(Error::Cutoff { x });
            }
            if let Some(p) = prev {
                if p.signum() != d.signum() {
                    return Err(Error::Cutoff { x });
                }
            }
            prev = Some(d);
        }
        Ok(())
    }

    /// `∫_a^b U(x) dx` (or `V`) by oscillation-aware adaptive quadrature.
    ///
    /// The interval must not contain an index jump in its interior.
    pub fn interval_matrix(&self, a: f64, b: f64) -> Result<IntervalMatrix> {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if let Some(d) = self.profile.jumps_between(lo, hi).into_iter().find(|d| d.x < hi) {
            return Err(Error::Discontinuity { x: d.x });
        }
        if lo == hi {
            return Ok(IntervalMatrix { m: Mat2c::zero(), a, b, pol: self.pol });
        }
        self.guard_cutoff(lo, hi)?;
        let cuts = self.profile.breakpoints_between(lo, hi);
        let phase = |x: f64| 2.0 * self.local(x, Side::Right).k.re * x;
        let pol = self.pol;
        let entries = quad::integrate(
            |x| {
                let loc = self.local(x, Side::Right);
                match pol {
                    Polarization::Te => u_entries(&loc, x),
                    Polarization::Tm => v_entries(&loc, x),
                }
                .entries()
            },
            a,
            b,
            &cuts,
            Some(&phase),
            QuadOptions::with_tol(MATRIX_TOL),
        )?;
        Ok(IntervalMatrix { m: Mat2c::from_entries(entries), a, b, pol })
    }

    /// `Q_{a→b} = exp(M_{a→b})`.
    pub fn transfer_matrix(&self, a: f64, b: f64) -> Result<Mat2c> {
        Ok(exp_auto(&self.interval_matrix(a, b)?.m))
    }

    /// Product of `exp(M)` over `pieces` equal sub-intervals of `[a, b]`,
    /// latest sub-interval on the left.
    pub fn composed_transfer(&self, a: f64, b: f64, pieces: usize) -> Result<Mat2c> {
        let pieces = pieces.max(1);
        let mut q = Mat2c::identity();
        let h = (b - a) / pieces as f64;
        for i in 0..pieces {
            let lo = a + h * i as f64;
            let hi = if i + 1 == pieces { b } else { a + h * (i + 1) as f64 };
            q = self.transfer_matrix(lo, hi)? * q;
        }
        Ok(q)
    }

    /// Transfer matrix over the period window `[x0, x0 + L]`, with jump
    /// matrices spliced in at every index discontinuity. Each smooth piece is
    /// exponentiated as a whole (`pieces_per_period = 1`) or composed from
    /// sub-intervals of about `L / pieces_per_period`.
    pub fn period_matrix(&self, x0: f64, pieces_per_period: usize) -> Result<PeriodMatrix> {
        let l = self.profile.period();
        let end = x0 + l;
        let jumps = self.profile.jumps_between(x0, end);
        let mut q = Mat2c::identity();
        let mut start = x0;
        let smooth = |from: f64, to: f64, q: Mat2c| -> Result<Mat2c> {
            if to <= from {
                return Ok(q);
            }
            let pieces = if pieces_per_period <= 1 {
                1
            } else {
                ((pieces_per_period as f64) * (to - from) / l).ceil().max(1.0) as usize
            };
            Ok(self.composed_transfer(from, to, pieces)? * q)
        };
        for d in &jumps {
            q = smooth(start, d.x, q)?;
            let ne = self.inc.n_eff();
            let k_left = wavenumber_from_index(d.left, ne, self.k0);
            let k_right = wavenumber_from_index(d.right, ne, self.k0);
            q = jump_matrix(self.pol, d.left, d.right, k_left, k_right, d.x)? * q;
            start = d.x;
        }
        q = smooth(start, end, q)?;
        Ok(PeriodMatrix { q, x_ref: x0, k_ref: self.wavenumber(x0) })
    }

    /// Off-diagonal entry of the symmetric
    /// period matrix, integrated in the wavenumber variable instead of `x`:
    /// `j∫_{k(0)}^{k(L/2)} sin(2x(k)k)/k dk`, with `x(k)` inverted by bisection.
    pub fn m12_by_substitution(&self) -> Result<Complex64> {
        if self.pol != Polarization::Te {
            return Err(Error::InvalidConfig("substitution path is defined for TE".into()));
        }
        let p = self.profile;
        if !p.has_real_wavenumber(&self.inc) {
            return Err(Error::ComplexWavenumber { n_eff: self.inc.n_eff(), n_min: p.min_index() });
        }
        let half = 0.5 * p.period();
        let k_at = |x: f64| {
            let side = if x >= half { Side::Left } else { Side::Right };
            wavenumber_from_index(p.eval(x, side).0, self.inc.n_eff(), self.k0).re
        };
        let samples: Vec<f64> =
            (0..=MONOTONIC_SAMPLES).map(|i| k_at(half * i as f64 / MONOTONIC_SAMPLES as f64)).collect();
        let diffs = samples.windows(2).map(|w| w[1] - w[0]);
        let (mut up, mut down, mut flat) = (0usize, 0usize, 0usize);
        for d in diffs {
            if d > 0.0 {
                up += 1;
            } else if d < 0.0 {
                down += 1;
            } else {
                flat += 1;
            }
        }
        if flat == MONOTONIC_SAMPLES {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if !(up == MONOTONIC_SAMPLES || down == MONOTONIC_SAMPLES) {
            return Err(Error::NotMonotonic);
        }
        let increasing = up > 0;
        let (k_start, k_end) = (samples[0], samples[MONOTONIC_SAMPLES]);
        let x_tol = 1e-12 * p.period();
        let invert = |k: f64| {
            let (mut lo, mut hi) = (0.0, half);
            while hi - lo > x_tol {
                let mid = 0.5 * (lo + hi);
                if (k_at(mid) < k) == increasing {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let phase = |k: f64| 2.0 * invert(k) * k;
        let value = quad::integrate_real(
            |k| (2.0 * invert(k) * k).sin() / k,
            k_start,
            k_end,
            &[],
            Some(&phase),
            QuadOptions::with_tol(MATRIX_TOL),
        )?;
        Ok(Complex64::new(0.0, value))
    }
}

fn u_entries(loc: &Local, x: f64) -> Mat2c {
    let j = Complex64::i();
    let f = loc.dk / (loc.k * 2.0);
    let phase = (j * loc.k * (2.0 * x)).exp();
    let drift = j * loc.dk * x;
    Mat2c::new(-f + drift, f * phase, f / phase, -f - drift)
}

fn v_entries(loc: &Local, x: f64) -> Mat2c {
    let j = Complex64::i();
    let g = loc.dk / (loc.k * 2.0) - loc.dn / loc.n;
    let phase = (j * loc.k * (2.0 * x)).exp();
    let drift = j * loc.dk * x;
    Mat2c::new(-g + drift, g * phase, g / phase, -g - drift)
}

/// Closed traceless form when the trace vanishes, scaling and squaring otherwise.
pub(crate) fn exp_auto(m: &Mat2c) -> Mat2c {
    m.exp_traceless().unwrap_or_else(|_| m.exp())
}

/// Fast path for even profiles with real wavenumber.
///
/// The diagonal of the period matrix, `±jL(k(L/2) − k̄)`, is linear in `k0`
/// and is computed once at construction; each frequency then needs only the
/// off-diagonal integral over the half period.
#[derive(Debug, Clone)]
pub struct SymmetricPeriod {
    profile: Profile,
    inc: IncidenceConfig,
    pol: Polarization,
    /// `k(L/2)` at unit `k0`.
    edge_k_unit: f64,
    /// `k̄` at unit `k0`.
    mean_k_unit: f64,
}

impl SymmetricPeriod {
    pub fn new(profile: Profile, inc: IncidenceConfig, pol: Polarization) -> Result<Self> {
        if !profile.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if let Some(d) = profile.discontinuities().first() {
            return Err(Error::Discontinuity { x: d.x });
        }
        if !profile.has_real_wavenumber(&inc) {
            return Err(Error::ComplexWavenumber { n_eff: inc.n_eff(), n_min: profile.min_index() });
        }
        let half = 0.5 * profile.period();
        let edge_k_unit = wavenumber_from_index(profile.index_left(half), inc.n_eff(), 1.0).re;
        let mean_k_unit = profile.average_wavenumber(&inc, 1.0)?;
        Ok(Self { profile, inc, pol, edge_k_unit, mean_k_unit })
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn polarization(&self) -> Polarization {
        self.pol
    }

    pub fn incidence(&self) -> IncidenceConfig {
        self.inc
    }

    /// `u = k(L/2)·L`.
    pub fn edge_phase(&self, k0: f64) -> f64 {
        k0 * self.edge_k_unit * self.profile.period()
    }

    /// `k̄·L`.
    pub fn mean_phase(&self, k0: f64) -> f64 {
        k0 * self.mean_k_unit * self.profile.period()
    }

    /// `m11 / j = L(k(L/2) − k̄)`.
    fn diagonal(&self, k0: f64) -> f64 {
        k0 * (self.profile.period() * (self.edge_k_unit - self.mean_k_unit))
    }

    /// Off-diagonal entry `m12 = j∫_0^{L/2} sin(2kx)·w(x) dx`, with
    /// `w = k'/k` (TE) or `k'/k − 2n'/n` (TM).
    pub fn off_diagonal(&self, k0: f64) -> Result<Complex64> {
        let p = &self.profile;
        let ne2 = self.inc.n_eff() * self.inc.n_eff();
        let half = 0.5 * p.period();
        let pol = self.pol;
        let phase = |x: f64| {
            let n = p.index(x);
            2.0 * k0 * (n * n - ne2).sqrt() * x
        };
        let cuts = p.breakpoints_between(0.0, half);
        let value = quad::integrate_real(
            |x| {
                let (n, dn) = p.eval(x, Side::Right);
                let d = n * n - ne2;
                let k = k0 * d.sqrt();
                // k'/k = n·n'/(n² − n_eff²), independent of k0
                let log_dk = n * dn / d;
                let weight = match pol {
                    Polarization::Te => log_dk,
                    Polarization::Tm => log_dk - 2.0 * dn / n,
                };
                (2.0 * k * x).sin() * weight
            },
            0.0,
            half,
            &cuts,
            Some(&phase),
            QuadOptions::with_tol(MATRIX_TOL),
        )?;
        Ok(Complex64::new(0.0, value))
    }

    /// Period matrix `M_{−L/2→L/2}` (or `N`) at free-space wavenumber `k0`.
    pub fn matrix(&self, k0: f64) -> Result<IntervalMatrix> {
        let diag = Complex64::new(0.0, self.diagonal(k0));
        Ok(self.assemble(diag, self.off_diagonal(k0)?))
    }

    /// Same matrix, but with the diagonal integrated afresh at this `k0`
    /// from its defining integrand over the whole period. Baseline for the
    /// diagonal reuse.
    pub fn matrix_uncached(&self, k0: f64) -> Result<IntervalMatrix> {
        let p = &self.profile;
        let half = 0.5 * p.period();
        let ctx = TransferContext::new(p, self.inc, k0, self.pol)?;
        let phase = |x: f64| 2.0 * ctx.local(x, Side::Right).k.re * x;
        let pol = self.pol;
        let [diag] = quad::integrate(
            |x| {
                let loc = ctx.local(x, Side::Right);
                let m = match pol {
                    Polarization::Te => u_entries(&loc, x),
                    Polarization::Tm => v_entries(&loc, x),
                };
                [m.a11]
            },
            -half,
            half,
            &p.breakpoints_between(-half, half),
            Some(&phase),
            QuadOptions::with_tol(MATRIX_TOL),
        )?;
        Ok(self.assemble(diag, self.off_diagonal(k0)?))
    }

    fn assemble(&self, diag: Complex64, off: Complex64) -> IntervalMatrix {
        let half = 0.5 * self.profile.period();
        IntervalMatrix { m: Mat2c::new(diag, off, -off, -diag), a: -half, b: half, pol: self.pol }
    }
}

/// Symmetric-period matrix for TE (`m_ij`).
pub fn m_symmetric(ctx: &TransferContext<'_>) -> Result<IntervalMatrix> {
    SymmetricPeriod::new(ctx.profile.clone(), ctx.inc, Polarization::Te)?.matrix(ctx.k0)
}

/// Symmetric-period matrix for TM (`n_ij`).
pub fn m_symmetric_tm(ctx: &TransferContext<'_>) -> Result<IntervalMatrix> {
    SymmetricPeriod::new(ctx.profile.clone(), ctx.inc, Polarization::Tm)?.matrix(ctx.k0)
}
