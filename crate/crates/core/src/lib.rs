//! Numerics for time-domain first quantization of a one-dimensional waveguide.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure function
//! of its inputs; file formats, the command line and parallel evaluation live in
//! the `tdqo` crate.
//!
//! Fourier convention, used everywhere:
//!
//! ```text
//! x~(f) = ∫ dt x(t) e^{+i2πft}        x(t) = ∫ df x~(f) e^{-i2πft}
//! ```
//!
//! Modules:
//! - [`transforms`]: grids, FFT, singular-kernel convolutions, quadrature oracle
//! - [`packet`]: photon packets and the response function χ
//! - [`states`]: voltage moments, energy, arrival statistics
//! - [`fieldconv`]: voltage ↔ quadratures, photon flux
//! - [`opalgebra`]: truncated Fock-space operator checks

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod fieldconv;
pub mod opalgebra;
pub mod packet;
pub mod special;
pub mod states;
pub mod transforms;

pub use num_complex::Complex64;

/// Physical constants used by every moment formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysConsts {
    /// Characteristic impedance (ohms).
    pub z: f64,
    /// Planck constant (joule-seconds).
    pub h: f64,
}

impl PhysConsts {
    /// Z = 1, h = 1.
    pub const NATURAL: PhysConsts = PhysConsts { z: 1.0, h: 1.0 };
    /// Z = 50 Ω, h = 6.62607015e-34 J·s.
    pub const SI: PhysConsts = PhysConsts {
        z: 50.0,
        h: 6.626_070_15e-34,
    };

    pub fn new(z: f64, h: f64) -> Result<Self, ConstsError> {
        if !(z.is_finite() && z > 0.0) {
            return Err(ConstsError::Impedance(z));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(ConstsError::Planck(h));
        }
        Ok(PhysConsts { z, h })
    }

    pub fn hbar(&self) -> f64 {
        self.h / (2.0 * core::f64::consts::PI)
    }

    /// Z·h, the combination every moment formula depends on.
    pub fn zh(&self) -> f64 {
        self.z * self.h
    }
}

impl Default for PhysConsts {
    fn default() -> Self {
        PhysConsts::NATURAL
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstsError {
    #[error("impedance must be finite and positive, got {0}")]
    Impedance(f64),
    #[error("Planck constant must be finite and positive, got {0}")]
    Planck(f64),
}
