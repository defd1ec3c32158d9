//! Physical-layer coverage model for dual-polarized broad-beam transmission.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - [`em`]: material constants, intrinsic impedance and Fresnel reflection
//!   coefficients for perpendicular and parallel polarization.
//! - [`geometry`]: access-point layout, image-method first-order reflections
//!   and received electric-field directions.
//! - [`channel`]: per-path channel coefficients for narrowband and
//!   multi-subcarrier evaluation.
//! - [`beamforming`]: broad-beam weight pairs, OSTBC code matrices, slot
//!   precoders and radiation patterns.
//! - [`pg`]: the per-case power-gain evaluation, a symbol-level oracle and
//!   transmit-energy accounting.
//! - [`analytics`]: empirical CDFs, quantiles and distribution distances.
//!
//! File formats, configuration and the command line live in the companion
//! `broadbeam` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analytics;
pub mod beamforming;
pub mod channel;
pub mod em;
mod error;
pub mod geometry;
pub mod linalg;
pub mod pg;
pub mod scenario;

pub use error::Error;
pub use num_complex::Complex64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Wavelength in metres for a frequency in hertz.
#[inline]
pub fn wavelength(freq_hz: f64) -> f64 {
    SPEED_OF_LIGHT / freq_hz
}

/// Linear power to decibels.
#[inline]
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
