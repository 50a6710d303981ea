//! Periodic refractive-index profiles and the local wavenumber they induce.
//!
//! Positions are absolute; the index is evaluated after wrapping into the
//! period window `[−L/2, L/2)`. At a discontinuity the index takes its
//! right-hand limit unless the left limit is asked for explicitly.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::quad::{self, QuadOptions};
use crate::stratified::{Layer, LayerStack};

/// Grid used to validate and characterize expression profiles.
const SAMPLE_GRID: usize = 1024;
/// Central-difference step for expression profiles, relative to the period.
const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    Te,
    Tm,
}

impl FromStr for Polarization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "te" => Ok(Polarization::Te),
            "tm" => Ok(Polarization::Tm),
            _ => Err(Error::InvalidConfig(alloc::format!("unknown polarization `{}`", s))),
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::Te => "te",
            Polarization::Tm => "tm",
        })
    }
}

/// Illumination from a homogeneous ambient medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidenceConfig {
    n_ambient: f64,
    theta: f64,
    n_eff: f64,
}

impl IncidenceConfig {
    pub fn new(n_ambient: f64, theta: f64) -> Result<Self> {
        if !(n_ambient.is_finite() && n_ambient > 0.0) {
            return Err(Error::InvalidConfig(alloc::format!("ambient index must be positive, got {}", n_ambient)));
        }
        if !(theta.is_finite() && (0.0..PI / 2.0).contains(&theta)) {
            return Err(Error::InvalidConfig(alloc::format!("incidence angle must lie in [0, π/2), got {}", theta)));
        }
        Ok(Self { n_ambient, theta, n_eff: n_ambient * theta.sin() })
    }

    pub fn from_degrees(n_ambient: f64, theta_deg: f64) -> Result<Self> {
        Self::new(n_ambient, theta_deg.to_radians())
    }

    /// Normal incidence from air.
    pub fn normal() -> Self {
        Self { n_ambient: 1.0, theta: 0.0, n_eff: 0.0 }
    }

    pub fn n_ambient(&self) -> f64 {
        self.n_ambient
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Transverse effective index `n_a·sin θ`.
    pub fn n_eff(&self) -> f64 {
        self.n_eff
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CanonicalProfile {
    /// `n = 2 + cos(2πx/L)`.
    Sinusoidal,
    /// Even triangle wave, 3 at the centre and 1 at the cell edges.
    Triangular,
    /// 3 for `|x| < L/4`, 1 elsewhere.
    Square,
    /// Linear ramp from 1 to 3 across the cell with a 3 → 1 jump at the edge.
    RampJump,
}

impl CanonicalProfile {
    pub const ALL: [CanonicalProfile; 4] = [
        CanonicalProfile::Sinusoidal,
        CanonicalProfile::Triangular,
        CanonicalProfile::Square,
        CanonicalProfile::RampJump,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CanonicalProfile::Sinusoidal => "sinusoidal",
            CanonicalProfile::Triangular => "triangular",
            CanonicalProfile::Square => "square",
            CanonicalProfile::RampJump => "ramp_jump",
        }
    }
}

impl FromStr for CanonicalProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CanonicalProfile::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownProfile(s.to_string()))
    }
}

impl fmt::Display for CanonicalProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which one-sided limit to take at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A jump of the index at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discontinuity {
    pub x: f64,
    pub left: f64,
    pub right: f64,
}

#[derive(Debug, Clone)]
enum Shape {
    Canonical(CanonicalProfile),
    Expression(Arc<Expr>),
    /// Boundaries `b_0 = −L/2 < … < b_m = L/2`; `values[i]` holds on `[b_i, b_{i+1})`.
    Piecewise {
        bounds: Vec<f64>,
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct Profile {
    period: f64,
    shape: Shape,
    symmetric: bool,
    discontinuities: Vec<Discontinuity>,
    kinks: Vec<f64>,
    min_index: f64,
    max_index: f64,
}

impl Profile {
    pub fn canonical(kind: CanonicalProfile) -> Self {
        Self::canonical_with_period(kind, 1.0).expect("unit period is valid")
    }

    pub fn canonical_with_period(kind: CanonicalProfile, period: f64) -> Result<Self> {
        check_period(period)?;
        let l = period;
        let (symmetric, discontinuities, kinks) = match kind {
            CanonicalProfile::Sinusoidal => (true, Vec::new(), Vec::new()),
            CanonicalProfile::Triangular => (true, Vec::new(), alloc::vec![-0.5 * l, 0.0]),
            CanonicalProfile::Square => (
                true,
                alloc::vec![
                    Discontinuity { x: -0.25 * l, left: 1.0, right: 3.0 },
                    Discontinuity { x: 0.25 * l, left: 3.0, right: 1.0 },
                ],
                Vec::new(),
            ),
            CanonicalProfile::RampJump => {
                (false, alloc::vec![Discontinuity { x: -0.5 * l, left: 3.0, right: 1.0 }], Vec::new())
            }
        };
        Ok(Self {
            period,
            shape: Shape::Canonical(kind),
            symmetric,
            discontinuities,
            kinks,
            min_index: 1.0,
            max_index: 3.0,
        })
    }

    /// Parses an index expression in `x` with unit period.
    pub fn parse_expr(text: &str) -> Result<Self> {
        Self::parse_expr_with_period(text, 1.0)
    }

    pub fn parse_expr_with_period(text: &str, period: f64) -> Result<Self> {
        check_period(period)?;
        let expr = Arc::new(expr::parse(text)?);
        let mut profile = Self {
            period,
            shape: Shape::Expression(expr),
            symmetric: false,
            discontinuities: Vec::new(),
            kinks: Vec::new(),
            min_index: f64::INFINITY,
            max_index: f64::NEG_INFINITY,
        };
        let mut symmetric = true;
        for i in 0..SAMPLE_GRID {
            let x = period * (-0.5 + i as f64 / SAMPLE_GRID as f64);
            let n = profile.index(x);
            if !(n.is_finite() && n > 0.0) {
                return Err(Error::NonPositiveIndex { x, value: n });
            }
            profile.min_index = profile.min_index.min(n);
            profile.max_index = profile.max_index.max(n);
            let mirrored = profile.index(-x);
            if (n - mirrored).abs() > 1e-12 * n.abs().max(1.0) {
                symmetric = false;
            }
        }
        profile.symmetric = symmetric;
        Ok(profile)
    }

    /// Piecewise-constant profile of a layer stack, laid out from `−L/2`.
    pub fn from_layers(stack: &LayerStack) -> Self {
        let period = stack.period();
        let mut bounds = Vec::with_capacity(stack.layers().len() + 1);
        bounds.push(-0.5 * period);
        bounds.extend(stack.interfaces());
        if let Some(last) = bounds.last_mut() {
            *last = 0.5 * period;
        }
        let values: Vec<f64> = stack.layers().iter().map(|l| l.n).collect();
        let m = values.len();
        let mut discontinuities = Vec::new();
        for i in 0..m {
            let left = values[(i + m - 1) % m];
            if left != values[i] {
                discontinuities.push(Discontinuity { x: bounds[i], left, right: values[i] });
            }
        }
        let min_index = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max_index = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut profile = Self {
            period,
            shape: Shape::Piecewise { bounds, values },
            symmetric: false,
            discontinuities,
            kinks: Vec::new(),
            min_index,
            max_index,
        };
        profile.symmetric = (0..SAMPLE_GRID).all(|i| {
            // offset keeps samples off layer boundaries of simple stacks
            let x = period * (-0.5 + (i as f64 + 0.381_966_011) / SAMPLE_GRID as f64);
            profile.index(x) == profile.index(-x)
        });
        profile
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn canonical_kind(&self) -> Option<CanonicalProfile> {
        match self.shape {
            Shape::Canonical(k) => Some(k),
            _ => None,
        }
    }

    pub fn expression(&self) -> Option<&Expr> {
        match &self.shape {
            Shape::Expression(e) => Some(e),
            _ => None,
        }
    }

    /// Index jumps inside the window `[−L/2, L/2)`.
    pub fn discontinuities(&self) -> &[Discontinuity] {
        &self.discontinuities
    }

    pub fn is_smooth(&self) -> bool {
        self.discontinuities.is_empty()
    }

    /// Jumps and derivative kinks inside the window, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.discontinuities.iter().map(|d| d.x).chain(self.kinks.iter().copied()).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        pts.dedup();
        pts
    }

    /// Breakpoints (all periodic images) inside the open interval `(a, b)`.
    pub fn breakpoints_between(&self, a: f64, b: f64) -> Vec<f64> {
        images_between(&self.breakpoints(), self.period, a, b)
    }

    /// Discontinuities (all periodic images) in `(a, b]`, each with its absolute position.
    pub fn jumps_between(&self, a: f64, b: f64) -> Vec<Discontinuity> {
        let l = self.period;
        let mut out = Vec::new();
        for d in &self.discontinuities {
            let mut m = ((a - d.x) / l).floor();
            loop {
                let x = d.x + m * l;
                if x > b {
                    break;
                }
                if x > a {
                    out.push(Discontinuity { x, ..*d });
                }
                m += 1.0;
            }
        }
        out.sort_by(|p, q| p.x.partial_cmp(&q.x).unwrap_or(core::cmp::Ordering::Equal));
        out
    }

    pub fn min_index(&self) -> f64 {
        self.min_index
    }

    pub fn max_index(&self) -> f64 {
        self.max_index
    }

    /// Layer stack describing the same medium, when the profile is piecewise constant.
    pub fn as_layer_stack(&self) -> Option<LayerStack> {
        let l = self.period;
        match &self.shape {
            Shape::Canonical(CanonicalProfile::Square) => LayerStack::new(alloc::vec![
                Layer { n: 1.0, d: 0.25 * l },
                Layer { n: 3.0, d: 0.5 * l },
                Layer { n: 1.0, d: 0.25 * l },
            ])
            .ok(),
            Shape::Piecewise { bounds, values } => {
                LayerStack::new(bounds.windows(2).zip(values).map(|(w, &n)| Layer { n, d: w[1] - w[0] }).collect()).ok()
            }
            _ => None,
        }
    }

    /// Refractive index at `x` (right-hand limit at jumps).
    pub fn index(&self, x: f64) -> f64 {
        self.eval(x, Side::Right).0
    }

    pub fn index_left(&self, x: f64) -> f64 {
        self.eval(x, Side::Left).0
    }

    /// `dn/dx` at `x` (right-hand derivative at kinks).
    pub fn index_derivative(&self, x: f64) -> f64 {
        self.eval(x, Side::Right).1
    }

    /// `(n, dn/dx)` at `x`, taking one-sided limits at breakpoints.
    pub fn eval(&self, x: f64, side: Side) -> (f64, f64) {
        let l = self.period;
        let u = wrap_unit(x / l, side);
        match &self.shape {
            Shape::Canonical(kind) => canonical_eval(*kind, u, side, l),
            Shape::Expression(e) => {
                let n = e.eval(u * l);
                let h = FD_STEP * l;
                let plus = e.eval(wrap_unit((x + h) / l, Side::Right) * l);
                let minus = e.eval(wrap_unit((x - h) / l, Side::Right) * l);
                (n, (plus - minus) / (2.0 * h))
            }
            Shape::Piecewise { bounds, values } => {
                let xw = u * l;
                let idx = match side {
                    Side::Right => bounds[1..].iter().position(|&b| xw < b),
                    Side::Left => bounds[1..].iter().position(|&b| xw <= b),
                };
                (values[idx.unwrap_or(values.len() - 1)], 0.0)
            }
        }
    }

    /// `k0·sqrt(n(x)² − n_eff²)`, on the positive-imaginary branch below cutoff.
    pub fn wavenumber(&self, inc: &IncidenceConfig, k0: f64, x: f64) -> Complex64 {
        wavenumber_from_index(self.index(x), inc.n_eff(), k0)
    }

    /// True when `k` is real across the whole period.
    pub fn has_real_wavenumber(&self, inc: &IncidenceConfig) -> bool {
        inc.n_eff() < self.min_index
    }

    /// Period average of the (real) wavenumber, `L⁻¹∫k dx`.
    pub fn average_wavenumber(&self, inc: &IncidenceConfig, k0: f64) -> Result<f64> {
        if !self.has_real_wavenumber(inc) {
            return Err(Error::ComplexWavenumber { n_eff: inc.n_eff(), n_min: self.min_index });
        }
        let l = self.period;
        let ne2 = inc.n_eff() * inc.n_eff();
        let mut opts = QuadOptions::with_tol(1e-10 * k0 * l);
        opts.min_panels = 8;
        let integral = quad::integrate_real(
            |x| {
                let n = self.index(x);
                k0 * (n * n - ne2).sqrt()
            },
            -0.5 * l,
            0.5 * l,
            &self.breakpoints(),
            None,
            opts,
        )?;
        Ok(integral / l)
    }
}

pub(crate) fn wavenumber_from_index(n: f64, n_eff: f64, k0: f64) -> Complex64 {
    let d = n * n - n_eff * n_eff;
    if d >= 0.0 {
        Complex64::new(k0 * d.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, k0 * (-d).sqrt())
    }
}

fn check_period(period: f64) -> Result<()> {
    if period.is_finite() && period > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(alloc::format!("period must be positive, got {}", period)))
    }
}

/// Wraps into `[−1/2, 1/2)` (right) or `(−1/2, 1/2]` (left).
fn wrap_unit(u: f64, side: Side) -> f64 {
    // points already in the window are returned untouched: `u ± 0.5` can
    // round onto an integer just inside the window edge
    match side {
        Side::Right if (-0.5..0.5).contains(&u) => u,
        Side::Right => u - (u + 0.5).floor(),
        Side::Left if u > -0.5 && u <= 0.5 => u,
        Side::Left => u - (u - 0.5).ceil(),
    }
}

fn images_between(points: &[f64], period: f64, a: f64, b: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for &p in points {
        let mut m = ((a - p) / period).floor();
        loop {
            let x = p + m * period;
            if x >= b {
                break;
            }
            if x > a {
                out.push(x);
            }
            m += 1.0;
        }
    }
    out.sort_by(|p, q| p.partial_cmp(q).unwrap_or(core::cmp::Ordering::Equal));
    out
}

fn canonical_eval(kind: CanonicalProfile, u: f64, side: Side, l: f64) -> (f64, f64) {
    match kind {
        CanonicalProfile::Sinusoidal => {
            let arg = 2.0 * PI * u;
            (2.0 + arg.cos(), -2.0 * PI * arg.sin() / l)
        }
        CanonicalProfile::Triangular => {
            let rising = match side {
                Side::Right => u < 0.0,
                Side::Left => u <= 0.0,
            };
            (3.0 - 4.0 * u.abs(), if rising { 4.0 / l } else { -4.0 / l })
        }
        CanonicalProfile::Square => {
            let inside = match side {
                Side::Right => (-0.25..0.25).contains(&u),
                Side::Left => u > -0.25 && u <= 0.25,
            };
            (if inside { 3.0 } else { 1.0 }, 0.0)
        }
        CanonicalProfile::RampJump => (2.0 + 2.0 * u, 2.0 / l),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wavenumber_examples() {
        let vacuum = Profile::parse_expr("1").unwrap();
        let k = vacuum.wavenumber(&IncidenceConfig::normal(), 2.0 * PI, 0.1);
        assert_eq!(k, Complex64::new(2.0 * PI, 0.0));

        let three = Profile::parse_expr("3").unwrap();
        let inc = IncidenceConfig::new(1.0, PI / 4.0).unwrap();
        let k = three.wavenumber(&inc, 1.0, 0.0);
        assert!((k.re - 8.5f64.sqrt()).abs() < 1e-15 && k.im == 0.0);

        assert_eq!(wavenumber_from_index(0.7, 0.7, 3.0), Complex64::new(0.0, 0.0));
        let evanescent = wavenumber_from_index(1.0, 1.2, 2.0);
        assert_eq!(evanescent.re, 0.0);
        assert!(evanescent.im > 0.0);
    }

    #[test]
    fn canonical_values() {
        let sin = Profile::canonical(CanonicalProfile::Sinusoidal);
        assert_eq!(sin.index(0.0), 3.0);
        let sq = Profile::canonical(CanonicalProfile::Square);
        assert_eq!(sq.index(0.0), 3.0);
        assert_eq!(sq.index(0.4), 1.0);
        let ramp = Profile::canonical(CanonicalProfile::RampJump);
        assert!((ramp.index_left(0.5) - 3.0).abs() < 1e-15);
        assert_eq!(ramp.index(-0.5), 1.0);
        assert!(!ramp.is_symmetric());
        let tri = Profile::canonical(CanonicalProfile::Triangular);
        assert_eq!(tri.index(0.0), 3.0);
        assert_eq!(tri.index(0.5), 1.0);
        assert_eq!(tri.index(-0.5), 1.0);
        for p in CanonicalProfile::ALL {
            let prof = Profile::canonical(p);
            assert_eq!(prof.min_index(), 1.0);
            assert_eq!(prof.max_index(), 3.0);
        }
    }

    #[test]
    fn one_sided_derivatives_at_kinks() {
        let tri = Profile::canonical(CanonicalProfile::Triangular);
        assert_eq!(tri.eval(0.0, Side::Right).1, -4.0);
        assert_eq!(tri.eval(0.0, Side::Left).1, 4.0);
        assert_eq!(tri.eval(0.5, Side::Left).1, -4.0);
        assert_eq!(tri.eval(-0.5, Side::Right).1, 4.0);
    }

    #[test]
    fn unknown_canonical_name() {
        assert_eq!("gaussian".parse::<CanonicalProfile>(), Err(Error::UnknownProfile("gaussian".into())));
        assert_eq!("ramp_jump".parse::<CanonicalProfile>(), Ok(CanonicalProfile::RampJump));
    }

    #[test]
    fn expression_profiles() {
        let c = Profile::parse_expr("2").unwrap();
        assert_eq!(c.index(0.3), 2.0);
        assert!(c.is_symmetric());
        let s = Profile::parse_expr("2 + cos(2*pi*x)").unwrap();
        assert_eq!(s.index(0.0), 3.0);
        assert!(s.is_symmetric());
        let ramp = Profile::parse_expr("2 + x").unwrap();
        assert!(!ramp.is_symmetric());
        assert!(matches!(Profile::parse_expr("2 + cos(2*pi*x"), Err(Error::Parse(_))));
        assert!(matches!(Profile::parse_expr("cos(2*pi*x)"), Err(Error::NonPositiveIndex { .. })));
        assert!(matches!(Profile::parse_expr("2 + q"), Err(Error::Parse(_))));
    }

    #[test]
    fn layered_profile_from_stack() {
        let stack = LayerStack::new(alloc::vec![Layer { n: 1.0, d: 0.5 }, Layer { n: 3.0, d: 0.5 }]).unwrap();
        let p = Profile::from_layers(&stack);
        assert_eq!(p.index(-0.25), 1.0);
        assert_eq!(p.index(0.25), 3.0);
        assert_eq!(p.index(0.0), 3.0);
        assert_eq!(p.index_left(0.0), 1.0);
        assert_eq!(p.discontinuities().len(), 2);
        assert!(!p.is_symmetric());
        let round = p.as_layer_stack().unwrap();
        assert_eq!(round.layers(), stack.layers());
    }

    #[test]
    fn average_wavenumber_examples() {
        let inc = IncidenceConfig::normal();
        let c = Profile::parse_expr("2").unwrap();
        assert!((c.average_wavenumber(&inc, 1.0).unwrap() - 2.0).abs() < 1e-12);
        let sq = Profile::canonical(CanonicalProfile::Square);
        assert!((sq.average_wavenumber(&inc, 1.0).unwrap() - 2.0).abs() < 1e-12);

        // dense trapezoid oracle, 10⁶ panels on the periodic integrand
        let sin = Profile::canonical(CanonicalProfile::Sinusoidal);
        let n = 1_000_000;
        let h = 1.0 / n as f64;
        let trap: f64 = (0..n).map(|i| 2.0 + (2.0 * PI * (-0.5 + i as f64 * h)).cos()).sum::<f64>() * h;
        assert!((sin.average_wavenumber(&inc, 1.0).unwrap() - trap).abs() < 1e-8);

        let oblique = IncidenceConfig::new(3.5, 0.5).unwrap();
        assert!(matches!(sin.average_wavenumber(&oblique, 1.0), Err(Error::ComplexWavenumber { .. })));
    }

    #[test]
    fn jumps_between_windows() {
        let ramp = Profile::canonical(CanonicalProfile::RampJump);
        let j = ramp.jumps_between(-0.5, 0.5);
        assert_eq!(j.len(), 1);
        assert_eq!(j[0].x, 0.5);
        let j = ramp.jumps_between(-0.2, 0.8);
        assert_eq!(j.len(), 1);
        assert!((j[0].x - 0.5).abs() < 1e-15);
        let sq = Profile::canonical(CanonicalProfile::Square);
        assert_eq!(sq.jumps_between(-0.5, 0.5).len(), 2);
        assert_eq!(sq.breakpoints_between(-0.5, 1.5).len(), 4);
    }

    #[test]
    fn incidence_validation() {
        let inc = IncidenceConfig::new(1.0, PI / 4.0).unwrap();
        assert_eq!(inc.n_eff(), 1.0 * (PI / 4.0).sin());
        assert!(IncidenceConfig::new(1.0, PI / 2.0).is_err());
        assert!(IncidenceConfig::new(1.0, -0.1).is_err());
        assert!(IncidenceConfig::new(0.0, 0.1).is_err());
    }

    #[test]
    fn canonical_periodicity_exact_on_dyadic_points() {
        for kind in CanonicalProfile::ALL {
            let p = Profile::canonical(kind);
            for i in 0..1000 {
                let x = -0.5 + i as f64 / 1024.0;
                assert_eq!(p.index(x), p.index(x + 1.0), "{kind} at {x}");
                assert_eq!(p.index(x), p.index(x - 3.0), "{kind} at {x}");
            }
        }
    }

    fn near_breakpoint(p: &Profile, x: f64) -> bool {
        p.breakpoints().iter().any(|&b| {
            let d = (x - b) / p.period();
            (d - d.round()).abs() < 1e-9
        })
    }

    #[test]
    fn wrapping_just_inside_the_window_edges() {
        let below = 0.5f64.next_down();
        assert_eq!(wrap_unit(below, Side::Right), below);
        assert_eq!(wrap_unit(-below, Side::Left), -below);
        let ramp = Profile::canonical(CanonicalProfile::RampJump);
        assert!(ramp.index(below) > 2.99);
        assert!(ramp.index_left(-below) < 1.01);
    }

    proptest! {
        #[test]
        fn periodicity(x in -0.5f64..0.5) {
            for kind in CanonicalProfile::ALL {
                let p = Profile::canonical(kind);
                if near_breakpoint(&p, x) { continue; }
                prop_assert!((p.index(x) - p.index(x + 1.0)).abs() <= 1e-14);
            }
            let e = Profile::parse_expr("2 + cos(2*pi*x) + 0.3*sin(4*pi*x)").unwrap();
            prop_assert!((e.index(x) - e.index(x + 1.0)).abs() <= 1e-12);
        }

        #[test]
        fn symmetry_flag_is_honest(x in -0.5f64..0.5) {
            for kind in CanonicalProfile::ALL {
                let p = Profile::canonical(kind);
                if p.is_symmetric() && !near_breakpoint(&p, x) && !near_breakpoint(&p, -x) {
                    prop_assert!((p.index(x) - p.index(-x)).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn derivative_matches_finite_difference(x in -0.49f64..0.49) {
            let h = 1e-6;
            for kind in [CanonicalProfile::Sinusoidal, CanonicalProfile::Triangular, CanonicalProfile::RampJump] {
                let p = Profile::canonical(kind);
                if p.breakpoints().iter().any(|&b| (x - b).abs() < 1e-3) { continue; }
                let fd = (p.index(x + h) - p.index(x - h)) / (2.0 * h);
                let d = p.index_derivative(x);
                prop_assert!((fd - d).abs() <= 1e-6 * d.abs().max(1.0));
            }
        }

        #[test]
        fn wavenumber_branch(n in 0.1f64..4.0, neff in 0.0f64..4.0, k0 in 0.1f64..10.0) {
            let k = wavenumber_from_index(n, neff, k0);
            prop_assert!(k.im >= 0.0);
            prop_assert_eq!(k.im == 0.0, n >= neff);
            prop_assert!(k.re >= 0.0);
        }
    }
}
