//! Adaptive composite Gauss–Legendre quadrature for vector-valued complex
//! integrands, with initial panel density keyed to an oscillation phase.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

// 7-point Gauss–Legendre rule on [-1, 1].
const NODES: [f64; 7] = [
    -0.949_107_912_342_758_5,
    -0.741_531_185_599_394_4,
    -0.405_845_151_377_397_2,
    0.0,
    0.405_845_151_377_397_2,
    0.741_531_185_599_394_4,
    0.949_107_912_342_758_5,
];
const WEIGHTS: [f64; 7] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
    0.381_830_050_505_118_9,
    0.279_705_391_489_276_7,
    0.129_484_966_168_869_7,
];

/// Samples used to estimate the total phase variation of a piece.
const PHASE_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy)]
pub(crate) struct QuadOptions {
    /// Absolute tolerance on every entry of the whole integral.
    pub tol: f64,
    pub max_depth: u32,
    /// Panels per piece when the integrand does not oscillate.
    pub min_panels: usize,
    /// Initial panels per 2π of phase variation.
    pub panels_per_oscillation: f64,
}

impl QuadOptions {
    pub const fn with_tol(tol: f64) -> Self {
        Self { tol, max_depth: 24, min_panels: 4, panels_per_oscillation: 20.0 }
    }
}

fn gauss7<const N: usize, F>(f: &mut F, a: f64, b: f64) -> [Complex64; N]
where
    F: FnMut(f64) -> [Complex64; N],
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = [Complex64::new(0.0, 0.0); N];
    for (node, w) in NODES.iter().zip(WEIGHTS.iter()) {
        let v = f(mid + half * node);
        for (slot, z) in acc.iter_mut().zip(v.iter()) {
            *slot += z * (w * half);
        }
    }
    acc
}

fn add<const N: usize>(a: &[Complex64; N], b: &[Complex64; N]) -> [Complex64; N] {
    let mut out = *a;
    for (o, z) in out.iter_mut().zip(b.iter()) {
        *o += z;
    }
    out
}

/// Total variation of `phase` over `[a, b]`, sampled.
fn phase_variation(phase: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = (b - a) / PHASE_SAMPLES as f64;
    let mut prev = phase(a);
    let mut total = 0.0;
    for i in 1..=PHASE_SAMPLES {
        let p = phase(a + h * i as f64);
        total += (p - prev).abs();
        prev = p;
    }
    total
}

/// Integrates `f` over `[a, b]`.
///
/// `cuts` are interior points where the integrand is not smooth; panels never
/// straddle them. When `phase` is given, each piece starts with enough panels
/// to put `panels_per_oscillation` panels on every 2π of phase.
pub(crate) fn integrate<const N: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    cuts: &[f64],
    phase: Option<&dyn Fn(f64) -> f64>,
    opts: QuadOptions,
) -> Result<[Complex64; N]>
where
    F: FnMut(f64) -> [Complex64; N],
{
    if a == b {
        return Ok([Complex64::new(0.0, 0.0); N]);
    }
    if a > b {
        let mut v = integrate(f, b, a, cuts, phase, opts)?;
        for z in v.iter_mut() {
            *z = -*z;
        }
        return Ok(v);
    }

    let mut edges: Vec<f64> = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    let span = b - a;
    let mut interior: Vec<f64> =
        cuts.iter().copied().filter(|&c| c > a + 1e-14 * span && c < b - 1e-14 * span).collect();
    interior.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
    edges.extend(interior);
    edges.push(b);

    let mut total = [Complex64::new(0.0, 0.0); N];
    let mut worst = 0.0f64;
    let mut failed = false;
    let mut stack: Vec<(f64, f64, [Complex64; N], u32)> = Vec::new();

    for piece in edges.windows(2) {
        let (lo, hi) = (piece[0], piece[1]);
        if hi <= lo {
            continue;
        }
        let panels = match phase {
            Some(p) => {
                let tv = phase_variation(p, lo, hi);
                let wanted = (opts.panels_per_oscillation * tv / (2.0 * PI)).ceil();
                opts.min_panels.max(wanted as usize)
            }
            None => opts.min_panels,
        };
        let width = (hi - lo) / panels as f64;
        for i in (0..panels).rev() {
            let l = lo + width * i as f64;
            let r = if i + 1 == panels { hi } else { lo + width * (i + 1) as f64 };
            let whole = gauss7(&mut f, l, r);
            stack.push((l, r, whole, 0));
        }

        while let Some((l, r, whole, depth)) = stack.pop() {
            let m = 0.5 * (l + r);
            let left = gauss7(&mut f, l, m);
            let right = gauss7(&mut f, m, r);
            let halves = add(&left, &right);
            let mut err = 0.0f64;
            let mut magnitude = 0.0f64;
            for (w, h) in whole.iter().zip(halves.iter()) {
                err = err.max((w - h).norm());
                magnitude = magnitude.max(h.norm());
            }
            let local_tol = (opts.tol * (r - l) / span).max(64.0 * f64::EPSILON * magnitude);
            if err <= local_tol {
                total = add(&total, &halves);
            } else if depth >= opts.max_depth {
                failed = true;
                worst = worst.max(err);
                total = add(&total, &halves);
            } else {
                stack.push((m, r, right, depth + 1));
                stack.push((l, m, left, depth + 1));
            }
        }
    }

    if failed {
        return Err(Error::Quadrature { a, b, worst });
    }
    Ok(total)
}

/// Real scalar convenience wrapper around [`integrate`].
pub(crate) fn integrate_real<F>(
    mut f: F,
    a: f64,
    b: f64,
    cuts: &[f64],
    phase: Option<&dyn Fn(f64) -> f64>,
    opts: QuadOptions,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let [v] = integrate(|x| [Complex64::new(f(x), 0.0)], a, b, cuts, phase, opts)?;
    Ok(v.re)
}
