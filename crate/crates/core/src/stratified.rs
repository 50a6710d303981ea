//! Piecewise-homogeneous media: jump matrices across interfaces and the
//! exact one-period transfer matrix of a layer stack.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Mat2c;
use crate::profile::{wavenumber_from_index, IncidenceConfig, Polarization, Profile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    /// Refractive index.
    pub n: f64,
    /// Thickness.
    pub d: f64,
}

/// One period of homogeneous layers, laid out from `−L/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    layers: Vec<Layer>,
    period: f64,
}

impl LayerStack {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidLayers("a stack needs at least one layer".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if !(l.n.is_finite() && l.n > 0.0) {
                return Err(Error::InvalidLayers(alloc::format!("layer {} has non-positive index {}", i, l.n)));
            }
            if !(l.d.is_finite() && l.d > 0.0) {
                return Err(Error::InvalidLayers(alloc::format!("layer {} has non-positive thickness {}", i, l.d)));
            }
        }
        let period = layers.iter().map(|l| l.d).sum();
        Ok(Self { layers, period })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Left edge of the period window.
    pub fn origin(&self) -> f64 {
        -0.5 * self.period
    }

    /// Right edges `X_1 … X_n` of every layer; the last one closes the period.
    pub fn interfaces(&self) -> Vec<f64> {
        let origin = self.origin();
        let mut acc = 0.0;
        self.layers
            .iter()
            .map(|l| {
                acc += l.d;
                origin + acc
            })
            .collect()
    }

    pub fn min_index(&self) -> f64 {
        self.layers.iter().map(|l| l.n).fold(f64::INFINITY, f64::min)
    }

    /// The stack as two alternating layers, merging neighbours (cyclically)
    /// that share an index. `None` unless exactly two media remain.
    pub fn two_layer(&self) -> Option<(Layer, Layer)> {
        let mut merged: Vec<Layer> = Vec::new();
        for l in &self.layers {
            match merged.last_mut() {
                Some(last) if last.n == l.n => last.d += l.d,
                _ => merged.push(*l),
            }
        }
        if merged.len() > 1 && merged[0].n == merged[merged.len() - 1].n {
            let last = merged.pop().expect("non-empty");
            merged[0].d += last.d;
        }
        match merged.as_slice() {
            [a, b] => Some((*a, *b)),
            _ => None,
        }
    }
}

/// Transfer matrix of the envelope amplitudes across an index step at `x`,
/// from medium `(n_j, k_j)` on the left to `(n_j1, k_j1)` on the right.
pub fn jump_matrix(pol: Polarization, n_j: f64, n_j1: f64, k_j: Complex64, k_j1: Complex64, x: f64) -> Result<Mat2c> {
    if k_j.norm() == 0.0 || k_j1.norm() == 0.0 {
        return Err(Error::Cutoff { x });
    }
    let scaled = match pol {
        Polarization::Te => k_j,
        Polarization::Tm => k_j * ((n_j1 / n_j) * (n_j1 / n_j)),
    };
    let denom = k_j1 * 2.0;
    let same = (k_j1 + scaled) / denom;
    let cross = (k_j1 - scaled) / denom;
    let j = Complex64::i();
    let diff_phase = (j * (k_j1 - k_j) * x).exp();
    let sum_phase = (j * (k_j1 + k_j) * x).exp();
    Ok(Mat2c::new(same * diff_phase, cross * sum_phase, cross / sum_phase, same / diff_phase))
}

/// One-period transfer matrix of a stack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodTransfer {
    pub q: Mat2c,
    /// Wavenumber in the first (leftmost) layer.
    pub k_first: Complex64,
    /// Every layer has a real wavenumber; only then does `q11 = conj(q22)` hold.
    pub all_real: bool,
}

/// Ordered product of the jump matrices at every interface of one period,
/// including the closing interface from the last layer back into the first.
pub fn period_transfer(
    stack: &LayerStack,
    inc: &IncidenceConfig,
    k0: f64,
    pol: Polarization,
) -> Result<PeriodTransfer> {
    let n_eff = inc.n_eff();
    let layers = stack.layers();
    let ks: Vec<Complex64> = layers.iter().map(|l| wavenumber_from_index(l.n, n_eff, k0)).collect();
    let mut q = Mat2c::identity();
    for (i, x) in stack.interfaces().into_iter().enumerate() {
        let next = (i + 1) % layers.len();
        if layers[i].n == layers[next].n {
            continue;
        }
        q = jump_matrix(pol, layers[i].n, layers[next].n, ks[i], ks[next], x)? * q;
    }
    Ok(PeriodTransfer { q, k_first: ks[0], all_real: ks.iter().all(|k| k.im == 0.0) })
}

/// `N` equal-width layers over one period, each carrying the index at its
/// midpoint. Jumps of the source profile become extra layer boundaries.
pub fn staircase(p: &Profile, layers: usize) -> Result<LayerStack> {
    if layers < 2 {
        return Err(Error::InvalidConfig(alloc::format!("staircase needs at least 2 layers, got {}", layers)));
    }
    let l = p.period();
    let mut bounds: Vec<f64> = (0..=layers).map(|i| l * (-0.5 + i as f64 / layers as f64)).collect();
    bounds.extend(p.discontinuities().iter().map(|d| d.x));
    bounds.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    bounds.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * l);
    let stack = bounds.windows(2).map(|w| Layer { n: p.index(0.5 * (w[0] + w[1])), d: w[1] - w[0] }).collect();
    LayerStack::new(stack)
}
