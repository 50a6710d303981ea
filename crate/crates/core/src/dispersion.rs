//! Bloch dispersion `cos(κL)` and band classification.

use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::dtmm::{IntervalMatrix, SymmetricPeriod, TransferContext};
use crate::error::{Error, Result};
use crate::matrix::cosh_sinhc;
use crate::profile::{IncidenceConfig, Polarization, Profile};
use crate::stratified::{self, LayerStack};

/// `||c| − 1|` below this is a band edge.
pub const EDGE_TOL: f64 = 1e-12;
/// Largest imaginary part tolerated before a real dispersion value is reported.
pub const IMAG_TOL: f64 = 1e-10;
/// Layers used when the stratified pathway is asked to handle a continuous profile.
pub const STAIRCASE_LAYERS: usize = 4096;

/// Where a frequency sits in the band structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandState {
    /// Propagating; `kappa_l` is the reduced Bloch phase in `[0, π]`.
    Allowed { kappa_l: f64 },
    /// `|cos κL| = 1`; parity 0 at `κL = 2νπ`, 1 at `(2ν+1)π`.
    Edge { parity: u8 },
    /// Evanescent with decay `ξ` per period; parity as for edges.
    Forbidden { parity: u8, xi: f64 },
}

impl BandState {
    pub fn is_allowed(&self) -> bool {
        matches!(self, BandState::Allowed { .. })
    }

    pub fn is_forbidden(&self) -> bool {
        matches!(self, BandState::Forbidden { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            BandState::Allowed { .. } => "allowed",
            BandState::Edge { .. } => "edge",
            BandState::Forbidden { .. } => "forbidden",
        }
    }
}

pub fn classify(c: f64) -> Result<BandState> {
    if !c.is_finite() {
        return Err(Error::NotANumber);
    }
    let excess = c.abs() - 1.0;
    let parity = u8::from(c < 0.0);
    Ok(if excess.abs() <= EDGE_TOL {
        BandState::Edge { parity }
    } else if excess < 0.0 {
        BandState::Allowed { kappa_l: c.acos() }
    } else {
        BandState::Forbidden { parity, xi: c.abs().acosh() }
    })
}

/// `(q11/2)·e^{−jk_ref·L} + (q22/2)·e^{+jk_ref·L}` for a period matrix whose
/// window starts where the wavenumber is `k_ref`.
pub fn bloch_cos_general(q11: Complex64, q22: Complex64, k_ref: Complex64, period: f64) -> Complex64 {
    let phase = (Complex64::i() * k_ref * period).exp();
    (q11 / phase + q22 * phase) * 0.5
}

/// Closed form for the even-profile period matrix:
/// `cosh λ·cos u + (u − k̄L)·(sinh λ/λ)·sin u`, where `λ² = m11² + m12·m21`.
pub fn bloch_cos_symmetric(m: &IntervalMatrix, u: f64, kbar_l: f64) -> Result<f64> {
    let m = m.m;
    let scale = m.norm().max(1.0);
    if m.trace().norm() > IMAG_TOL * scale {
        return Err(Error::NotTraceless { trace: m.trace().norm() });
    }
    let structural = m.entries().iter().map(|z| z.re.abs()).fold(0.0, f64::max).max((m.a12 + m.a21).norm());
    if structural > IMAG_TOL * scale {
        return Err(Error::ComplexDispersion { residual: structural });
    }
    let lambda = (m.a11 * m.a11 + m.a12 * m.a21).sqrt();
    let (cosh, sinhc) = cosh_sinhc(lambda);
    let c = cosh * u.cos() + sinhc * ((u - kbar_l) * u.sin());
    if c.im.abs() > IMAG_TOL * c.re.abs().max(1.0) {
        return Err(Error::ComplexDispersion { residual: c.im.abs() });
    }
    Ok(c.re)
}

/// `Re(q11·e^{−jk1L})` for a closed layer-stack period.
pub fn bloch_cos_stratified(q11: Complex64, k1: Complex64, period: f64) -> f64 {
    (q11 * (-Complex64::i() * k1 * period).exp()).re
}

/// One evaluated frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSample {
    pub omega_norm: f64,
    pub cos_kl: f64,
    /// Imaginary part dropped from `cos_kl`.
    pub imag_residual: f64,
    pub state: BandState,
}

impl DispersionSample {
    pub fn new(omega_norm: f64, value: Complex64) -> Result<Self> {
        Ok(Self { omega_norm, cos_kl: value.re, imag_residual: value.im.abs(), state: classify(value.re)? })
    }
}

/// A periodic medium described either by a profile or by its layers.
#[derive(Debug, Clone)]
pub enum Medium {
    Profile(Profile),
    Layers(LayerStack),
}

impl Medium {
    pub fn period(&self) -> f64 {
        match self {
            Medium::Profile(p) => p.period(),
            Medium::Layers(s) => s.period(),
        }
    }

    /// The medium as an index profile (layer stacks become piecewise-constant profiles).
    pub fn to_profile(&self) -> Profile {
        match self {
            Medium::Profile(p) => p.clone(),
            Medium::Layers(s) => Profile::from_layers(s),
        }
    }

    /// Exact layer stack when the medium is piecewise constant.
    pub fn layer_stack(&self) -> Option<LayerStack> {
        match self {
            Medium::Profile(p) => p.as_layer_stack(),
            Medium::Layers(s) => Some(s.clone()),
        }
    }
}

impl From<Profile> for Medium {
    fn from(p: Profile) -> Self {
        Medium::Profile(p)
    }
}

impl From<LayerStack> for Medium {
    fn from(s: LayerStack) -> Self {
        Medium::Layers(s)
    }
}

/// How `cos(κL)` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Pathway {
    /// Pick the cheapest pathway the medium supports.
    #[default]
    Auto,
    /// Even profile, real wavenumber: closed form with a cached diagonal.
    Symmetric,
    /// Full coefficient-matrix integral with jump matrices spliced in.
    General,
    /// Product of jump matrices; continuous profiles are staircased first.
    Stratified,
}

impl Pathway {
    pub const ALL: [Pathway; 4] = [Pathway::Auto, Pathway::Symmetric, Pathway::General, Pathway::Stratified];

    pub fn name(self) -> &'static str {
        match self {
            Pathway::Auto => "auto",
            Pathway::Symmetric => "symmetric",
            Pathway::General => "general",
            Pathway::Stratified => "stratified",
        }
    }
}

impl fmt::Display for Pathway {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pathway {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pathway::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidConfig(alloc::format!("unknown pathway '{}'", s)))
    }
}

#[derive(Debug, Clone)]
enum Engine {
    Symmetric(SymmetricPeriod),
    General(Profile),
    Stratified(LayerStack),
}

/// A medium, incidence and polarization bound to one evaluation pathway.
#[derive(Debug, Clone)]
pub struct DispersionModel {
    engine: Engine,
    inc: IncidenceConfig,
    pol: Polarization,
}

impl DispersionModel {
    pub fn new(medium: &Medium, inc: IncidenceConfig, pol: Polarization, pathway: Pathway) -> Result<Self> {
        let engine = match pathway {
            Pathway::Auto => {
                if let Some(stack) = medium.layer_stack() {
                    Engine::Stratified(stack)
                } else {
                    let p = medium.to_profile();
                    if p.is_symmetric() && p.is_smooth() && p.has_real_wavenumber(&inc) {
                        Engine::Symmetric(SymmetricPeriod::new(p, inc, pol)?)
                    } else {
                        Engine::General(p)
                    }
                }
            }
            Pathway::Symmetric => Engine::Symmetric(SymmetricPeriod::new(medium.to_profile(), inc, pol)?),
            Pathway::General => Engine::General(medium.to_profile()),
            Pathway::Stratified => match medium.layer_stack() {
                Some(stack) => Engine::Stratified(stack),
                None => Engine::Stratified(stratified::staircase(&medium.to_profile(), STAIRCASE_LAYERS)?),
            },
        };
        Ok(Self { engine, inc, pol })
    }

    /// The pathway actually in use (never `Auto`).
    pub fn pathway(&self) -> Pathway {
        match self.engine {
            Engine::Symmetric(_) => Pathway::Symmetric,
            Engine::General(_) => Pathway::General,
            Engine::Stratified(_) => Pathway::Stratified,
        }
    }

    pub fn period(&self) -> f64 {
        match &self.engine {
            Engine::Symmetric(s) => s.profile().period(),
            Engine::General(p) => p.period(),
            Engine::Stratified(s) => s.period(),
        }
    }

    pub fn polarization(&self) -> Polarization {
        self.pol
    }

    pub fn incidence(&self) -> IncidenceConfig {
        self.inc
    }

    /// `cos(κL)` at normalized frequency `Ω`, before classification.
    pub fn cos_kl(&self, omega_norm: f64) -> Result<Complex64> {
        if !(omega_norm.is_finite() && omega_norm > 0.0) {
            return Err(Error::InvalidConfig(alloc::format!("frequency must be positive, got {}", omega_norm)));
        }
        let k0 = crate::k0_from_omega(omega_norm, self.period());
        match &self.engine {
            Engine::Symmetric(sp) => {
                let m = sp.matrix(k0)?;
                let c = bloch_cos_symmetric(&m, sp.edge_phase(k0), sp.mean_phase(k0))?;
                Ok(Complex64::new(c, 0.0))
            }
            Engine::General(p) => {
                let ctx = TransferContext::new(p, self.inc, k0, self.pol)?;
                general_cos(&ctx, -0.5 * p.period(), 1)
            }
            Engine::Stratified(stack) => {
                let t = stratified::period_transfer(stack, &self.inc, k0, self.pol)?;
                if t.all_real {
                    Ok(Complex64::new(bloch_cos_stratified(t.q.a11, t.k_first, stack.period()), 0.0))
                } else {
                    Ok(bloch_cos_general(t.q.a11, t.q.a22, t.k_first, stack.period()))
                }
            }
        }
    }

    pub fn evaluate(&self, omega_norm: f64) -> Result<DispersionSample> {
        DispersionSample::new(omega_norm, self.cos_kl(omega_norm)?)
    }
}

/// `cos(κL)` from the period window starting at `x0`. With `pieces = 1`
/// every smooth stretch is one matrix exponential; larger values compose
/// shorter exponentials.
pub fn general_cos(ctx: &TransferContext<'_>, x0: f64, pieces: usize) -> Result<Complex64> {
    let pm = ctx.period_matrix(x0, pieces)?;
    Ok(bloch_cos_general(pm.q.a11, pm.q.a22, pm.k_ref, ctx.profile().period()))
}

/// `cos(κL)` of the true period map from the window starting at `x0`.
///
/// The product of `pieces` short exponentials differs from the exact flow by
/// `O(pieces⁻²)`; one Richardson step against `pieces/2` removes that term.
pub fn flow_cos(ctx: &TransferContext<'_>, x0: f64, pieces: usize) -> Result<Complex64> {
    let pieces = pieces.max(2);
    let fine = general_cos(ctx, x0, pieces)?;
    let coarse = general_cos(ctx, x0, pieces / 2)?;
    Ok(fine + (fine - coarse) / 3.0)
}
