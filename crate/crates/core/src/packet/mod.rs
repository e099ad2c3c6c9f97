//! Photon packets and the response function
//! `χ(t) = ∫dt' φ(t−t')·(1 + i·sgn t')/|t'|^{3/2}`.
//!
//! χ is computed two ways: directly by finite-part quadrature of the defining
//! integral, and spectrally as `8π·c·ψ` with
//! `ψ(t) = ∫_{f>0} df √f·φ~(f)·e^{−i2πft}`.

mod closed_form;

pub use closed_form::{chi_closed_form_exponential, chi_closed_form_exponential_as_printed};

use crate::transforms::{
    apply_multiplier, forward_fourier, pv_quadrature_oracle, quad::QuadOptions, Boundary, Kernel,
    OracleError, OracleFunction, OracleOptions, Signal, TimeGrid, TransformError, Unit,
};
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Phase `c` in `χ = 8π·c·ψ`, pinned by `tests::pin_chi_psi_constant`.
pub const CHI_PSI_PHASE: Complex64 = Complex64 { re: -1.0, im: 0.0 };

/// Samples at a grid edge must stay below this fraction of the sup-norm.
pub const EDGE_DECAY: f64 = 1e-8;

/// Minimum positive-frequency weight accepted by the spectral route outside idealized mode.
pub const MIN_POSITIVE_WEIGHT: f64 = 0.99;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PacketError {
    #[error("packet width must be finite and positive, got {0}")]
    Width(f64),
    #[error("carrier and center must be finite")]
    Carrier,
    #[error("packet does not decay at the grid edges (|φ| = {left:e} and {right:e} of the peak; limit 1e-8)")]
    EdgeDecay { left: f64, right: f64 },
    #[error("packet samples have zero norm")]
    ZeroNorm,
    #[error("positive-frequency weight {0:.6} is below 0.99; the spectral route needs idealized mode")]
    LowPositiveWeight(f64),
    #[error("closed form is undefined at t = 0")]
    AtOrigin,
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Shape descriptor.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// `φ(t) = Θ(t)·e^{−t/2σ}/√σ`.
    ExponentialDecay { sigma_t: f64 },
    /// `φ(t) = (2πσ²)^{-1/4}·e^{−(t−c)²/4σ²}·e^{−i2πf0 t}`; σ is the RMS width of |φ|².
    Gaussian { sigma: f64, f0: f64, center: f64 },
    /// User samples on the packet grid, with optional jump locations.
    Custom { samples: Vec<Complex64>, jumps: Vec<f64> },
}

/// Shape metadata kept by a packet (custom samples live in `phi`).
#[derive(Clone, Debug, PartialEq)]
pub enum ShapeKind {
    ExponentialDecay { sigma_t: f64 },
    Gaussian { sigma: f64, f0: f64, center: f64 },
    Custom,
}

/// A normalized packet amplitude on its own (packet-local) time grid.
#[derive(Clone, Debug)]
pub struct PhotonPacket {
    phi: Signal,
    tau: f64,
    shape: ShapeKind,
    jumps: Vec<f64>,
    norm_factor: f64,
}

fn exp_amplitude(sigma: f64, t: f64) -> f64 {
    if t > 0.0 {
        (-t / (2.0 * sigma)).exp() / sigma.sqrt()
    } else if t == 0.0 {
        0.5 / sigma.sqrt()
    } else {
        0.0
    }
}

fn gauss_amplitude(sigma: f64, f0: f64, center: f64, t: f64) -> Complex64 {
    let d = t - center;
    let env = (2.0 * PI * sigma * sigma).powf(-0.25) * (-d * d / (4.0 * sigma * sigma)).exp();
    let a = -2.0 * PI * f0 * t;
    Complex64::new(a.cos(), a.sin()) * env
}

/// Builds a normalized packet on `grid` (packet-local time, τ = 0).
pub fn make_packet(shape: Shape, grid: TimeGrid) -> Result<PhotonPacket, PacketError> {
    let (samples, kind, jumps) = match shape {
        Shape::ExponentialDecay { sigma_t } => {
            if !(sigma_t.is_finite() && sigma_t > 0.0) {
                return Err(PacketError::Width(sigma_t));
            }
            let s = grid.times().map(|t| Complex64::new(exp_amplitude(sigma_t, t), 0.0)).collect();
            (s, ShapeKind::ExponentialDecay { sigma_t }, alloc::vec![0.0])
        }
        Shape::Gaussian { sigma, f0, center } => {
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(PacketError::Width(sigma));
            }
            if !(f0.is_finite() && center.is_finite()) {
                return Err(PacketError::Carrier);
            }
            let s = grid.times().map(|t| gauss_amplitude(sigma, f0, center, t)).collect();
            (s, ShapeKind::Gaussian { sigma, f0, center }, Vec::new())
        }
        Shape::Custom { samples, jumps } => (samples, ShapeKind::Custom, jumps),
    };
    let raw = Signal::new(grid, samples, Unit::PerSqrtSecond)?;
    let energy = raw.energy();
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(PacketError::ZeroNorm);
    }
    let norm_factor = energy.sqrt();
    let phi = raw.scaled(Complex64::new(1.0 / norm_factor, 0.0));
    let sup = phi.sup_norm();
    let s = phi.samples();
    let left = s[0].norm() / sup;
    let right = s[s.len() - 1].norm() / sup;
    if left > EDGE_DECAY || right > EDGE_DECAY {
        return Err(PacketError::EdgeDecay { left, right });
    }
    Ok(PhotonPacket { phi, tau: 0.0, shape: kind, jumps, norm_factor })
}

impl PhotonPacket {
    /// Sets the emission offset τ.
    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn phi(&self) -> &Signal {
        &self.phi
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn shape(&self) -> &ShapeKind {
        &self.shape
    }
    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }
    pub fn grid(&self) -> &TimeGrid {
        self.phi.grid()
    }

    /// Norm of the input samples before normalization (`φ_in = factor·φ`).
    pub fn norm_factor(&self) -> f64 {
        self.norm_factor
    }

    /// Characteristic width used for tolerances (σ of the built-in shapes, or the RMS spread).
    pub fn width(&self) -> f64 {
        match self.shape {
            ShapeKind::ExponentialDecay { sigma_t } => sigma_t,
            ShapeKind::Gaussian { sigma, .. } => sigma,
            ShapeKind::Custom => self.spread(),
        }
    }

    /// Continuum amplitude φ(t) in packet-local time: analytic for the built-in
    /// shapes, cubic interpolation of the normalized samples otherwise.
    pub fn amplitude(&self, t: f64) -> Complex64 {
        match self.shape {
            ShapeKind::ExponentialDecay { sigma_t } => Complex64::new(exp_amplitude(sigma_t, t), 0.0),
            ShapeKind::Gaussian { sigma, f0, center } => gauss_amplitude(sigma, f0, center, t),
            ShapeKind::Custom => cubic_interpolate(&self.phi, t),
        }
    }

    /// Interval outside which φ is treated as zero.
    pub fn support(&self) -> (f64, f64) {
        match self.shape {
            ShapeKind::ExponentialDecay { sigma_t } => (0.0, 80.0 * sigma_t),
            ShapeKind::Gaussian { sigma, center, .. } => (center - 20.0 * sigma, center + 20.0 * sigma),
            ShapeKind::Custom => (self.grid().t0(), self.grid().last_time()),
        }
    }

    /// φ~(f) = ∫dt φ(t) e^{+i2πft}: analytic for built-in shapes, direct sum otherwise.
    pub fn spectrum_at(&self, f: f64) -> Complex64 {
        match self.shape {
            ShapeKind::ExponentialDecay { sigma_t } => {
                Complex64::new(2.0 * sigma_t.sqrt(), 0.0) / Complex64::new(1.0, -4.0 * PI * f * sigma_t)
            }
            ShapeKind::Gaussian { sigma, f0, center } => {
                let d = f - f0;
                let mag = (2.0 * PI * sigma * sigma).powf(-0.25)
                    * (4.0 * PI * sigma * sigma).sqrt()
                    * (-4.0 * PI * PI * sigma * sigma * d * d).exp();
                let a = 2.0 * PI * d * center;
                Complex64::new(a.cos(), a.sin()) * mag
            }
            ShapeKind::Custom => {
                let g = self.grid();
                self.phi
                    .samples()
                    .iter()
                    .zip(g.times())
                    .map(|(&x, t)| {
                        let a = 2.0 * PI * f * t;
                        x * Complex64::new(a.cos(), a.sin())
                    })
                    .sum::<Complex64>()
                    * g.dt()
            }
        }
    }

    /// `∫ t|φ|² dt` from the samples (packet-local).
    pub fn centroid(&self) -> f64 {
        let g = self.grid();
        g.dt() * self.phi.samples().iter().zip(g.times()).map(|(x, t)| t * x.norm_sqr()).sum::<f64>()
    }

    /// `√(∫t²|φ|² − (∫t|φ|²)²)`.
    pub fn spread(&self) -> f64 {
        let g = self.grid();
        let c = self.centroid();
        let m2 = g.dt()
            * self
                .phi
                .samples()
                .iter()
                .zip(g.times())
                .map(|(x, t)| (t - c) * (t - c) * x.norm_sqr())
                .sum::<f64>();
        m2.max(0.0).sqrt()
    }
}

/// Keys cubic convolution interpolation (a = −1/2); zero outside the grid.
fn cubic_interpolate(sig: &Signal, t: f64) -> Complex64 {
    let g = sig.grid();
    let x = (t - g.t0()) / g.dt();
    let n = g.n() as i64;
    if !(x > -1.0 && x < n as f64) {
        return Complex64::new(0.0, 0.0);
    }
    let i = x.floor() as i64;
    let u = x - i as f64;
    let s = sig.samples();
    let at = |k: i64| if k >= 0 && k < n { s[k as usize] } else { Complex64::new(0.0, 0.0) };
    let w = |d: f64| {
        let d = d.abs();
        if d < 1.0 {
            1.5 * d * d * d - 2.5 * d * d + 1.0
        } else if d < 2.0 {
            -0.5 * d * d * d + 2.5 * d * d - 4.0 * d + 2.0
        } else {
            0.0
        }
    };
    at(i - 1) * w(u + 1.0) + at(i) * w(u) + at(i + 1) * w(u - 1.0) + at(i + 2) * w(u - 2.0)
}

/// Spectral weight of a bin in the positive-frequency projector: DC and
/// Nyquist count half, interior positive bins fully, negative bins not at all.
pub fn positive_projector_weight(grid: &TimeGrid, k: usize) -> f64 {
    let n = grid.n();
    if k == 0 || k == n / 2 {
        0.5
    } else if k < n / 2 {
        1.0
    } else {
        0.0
    }
}

/// `∫_{f>0}|φ~|² / ∫|φ~|²` on the packet grid.
pub fn positive_frequency_weight(p: &PhotonPacket) -> f64 {
    let spec = forward_fourier(p.phi());
    let g = *spec.grid();
    let mut pos = 0.0;
    let mut total = 0.0;
    for (k, b) in spec.bins().iter().enumerate() {
        let e = b.norm_sqr();
        pos += positive_projector_weight(&g, k) * e;
        total += e;
    }
    if total == 0.0 {
        0.0
    } else {
        pos / total
    }
}

/// Idealized mode uses φ as given; band-limited mode uses the renormalized
/// positive-frequency projection, whose χ is `χ/√w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PacketMode {
    #[default]
    Idealized,
    BandLimited,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Route {
    /// Adaptive finite-part quadrature of the defining integral.
    FinitePart,
    /// `8π·c·ψ` from the padded FFT of the samples.
    Spectral { pad_factor: usize },
}

impl Route {
    pub const SPECTRAL_DEFAULT: Route = Route::Spectral { pad_factor: 16 };
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiOptions {
    pub mode: PacketMode,
    pub quad: QuadOptions,
}

impl Default for ChiOptions {
    fn default() -> Self {
        ChiOptions {
            mode: PacketMode::Idealized,
            quad: QuadOptions { abs_tol: 1e-13, rel_tol: 1e-10, max_intervals: 4000 },
        }
    }
}

/// χ sampled on the packet grid.
#[derive(Clone, Debug)]
pub struct ChiFunction {
    pub chi: Signal,
    pub route: Route,
    pub mode: PacketMode,
    /// Positive-frequency weight w of the source packet.
    pub positive_weight: f64,
    /// Grid indices where χ diverges (samples coinciding with a jump of φ); stored as NaN.
    pub singular: Vec<usize>,
}

/// `ψ(t) = df·Σ_{f_k>0} √f_k·φ~(f_k)·e^{−i2πf_k t}`.
#[derive(Clone, Debug)]
pub struct PsiFunction {
    pub psi: Signal,
    pub pad_factor: usize,
}

pub fn psi_spectral(p: &PhotonPacket, pad_factor: usize) -> Result<PsiFunction, PacketError> {
    let boundary = if pad_factor <= 1 { Boundary::Periodic } else { Boundary::ZeroPad(pad_factor) };
    let psi = apply_multiplier(p.phi(), boundary, |f, s| {
        let w = if s > 0.0 {
            1.0
        } else if s == 0.0 && f > 0.0 {
            0.5
        } else {
            0.0
        };
        Complex64::new(w * f.max(0.0).sqrt(), 0.0)
    })?;
    Ok(PsiFunction { psi, pad_factor })
}

/// χ at one packet-local time by finite-part quadrature (idealized normalization).
pub fn chi_finite_part_at(p: &PhotonPacket, t: f64, quad: &QuadOptions) -> Result<Complex64, PacketError> {
    let amp = |x: f64| p.amplitude(x);
    let (a, b) = p.support();
    let func = OracleFunction::new(&amp).with_support(a, b).with_jumps(p.jumps());
    let opts = OracleOptions { quad: *quad, ..Default::default() };
    Ok(pv_quadrature_oracle(&func, Kernel::Chi, t, &opts)?.value)
}

/// Scale applied to idealized χ in the given mode (`1/√w` for band-limited).
pub fn mode_scale(mode: PacketMode, positive_weight: f64) -> f64 {
    match mode {
        PacketMode::Idealized => 1.0,
        PacketMode::BandLimited => 1.0 / positive_weight.sqrt(),
    }
}

/// χ on the packet grid by the requested route.
pub fn compute_chi(p: &PhotonPacket, route: Route, opts: &ChiOptions) -> Result<ChiFunction, PacketError> {
    let w = positive_frequency_weight(p);
    let scale = mode_scale(opts.mode, w);
    let grid = *p.grid();
    match route {
        Route::FinitePart => {
            let mut values = Vec::with_capacity(grid.n());
            let mut singular = Vec::new();
            for (j, t) in grid.times().enumerate() {
                match chi_finite_part_at(p, t, &opts.quad) {
                    Ok(v) => values.push(v * scale),
                    Err(PacketError::Oracle(OracleError::AtJump { .. })) => {
                        singular.push(j);
                        values.push(Complex64::new(f64::NAN, f64::NAN));
                    }
                    Err(e) => return Err(e),
                }
            }
            let chi = Signal::new(grid, values, Unit::Dimensionless)?;
            Ok(ChiFunction { chi, route, mode: opts.mode, positive_weight: w, singular })
        }
        Route::Spectral { pad_factor } => {
            if opts.mode != PacketMode::Idealized && w < MIN_POSITIVE_WEIGHT {
                return Err(PacketError::LowPositiveWeight(w));
            }
            let psi = psi_spectral(p, pad_factor)?;
            let chi = psi.psi.scaled(CHI_PSI_PHASE * (8.0 * PI * scale));
            Ok(ChiFunction { chi, route, mode: opts.mode, positive_weight: w, singular: Vec::new() })
        }
    }
}

#[cfg(test)]
mod tests;
