//! Band structure of one-dimensional periodic optical media.
//!
//! The crate evaluates the Bloch dispersion `cos(κL)` of a periodic
//! refractive-index profile with the differential transfer matrix method:
//! the envelope of the forward and backward waves is propagated by
//! `Q = exp(∫ U(x) dx)`, where `U` (TE) or `V` (TM) is a 2×2 coefficient
//! matrix built from the local wavenumber `k(x) = k0·sqrt(n(x)² − n_eff²)`.
//!
//! Three evaluation pathways are provided:
//!
//! * a fast path for even profiles with real wavenumber, where only the
//!   off-diagonal entries of the period matrix need an integral per
//!   frequency ([`dtmm::SymmetricPeriod`]);
//! * a general path that integrates the full coefficient matrix over one
//!   period and splices jump matrices at index discontinuities;
//! * an exact path for stacks of homogeneous layers ([`stratified`]).
//!
//! Every pathway can be checked against the independent generators in
//! [`oracle`]: a direct Runge–Kutta monodromy of the wave equation, the
//! classical two-layer dispersion relation, and the extrapolated
//! staircase limit.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bandscan;
pub mod dispersion;
pub mod dtmm;
mod error;
pub mod expr;
pub mod matrix;
pub mod oracle;
pub mod profile;
mod quad;
pub mod stratified;

pub use bandscan::{BandStructure, Gap, Medium, Pathway, ScanConfig, ScanPoint};
pub use dispersion::{BandState, DispersionModel, DispersionSample};
pub use error::{Error, Result};
pub use matrix::Mat2c;
pub use profile::{CanonicalProfile, IncidenceConfig, Polarization, Profile};
pub use stratified::{Layer, LayerStack};

pub use num_complex::Complex64;

/// Free-space wavenumber `k0 = 2π/λ0` for a normalized frequency `Ω = L/λ0`.
pub fn k0_from_omega(omega_norm: f64, period: f64) -> f64 {
    2.0 * core::f64::consts::PI * omega_norm / period
}
