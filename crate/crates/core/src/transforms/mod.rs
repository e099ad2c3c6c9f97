//! Sampled-signal infrastructure: grids, Fourier transforms, singular-kernel
//! convolutions and the quadrature oracle that validates them.

pub mod fft;
pub mod oracle;
pub mod quad;
pub mod table;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

pub use oracle::{pv_quadrature_oracle, Kernel, OracleError, OracleFunction, OracleOptions, Tail};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransformError {
    #[error("grid needs an even sample count of at least 2, got {0}")]
    SampleCount(usize),
    #[error("grid spacing must be finite and positive, got {0}")]
    Spacing(f64),
    #[error("grid origin must be finite, got {0}")]
    Origin(f64),
    #[error("expected {expected} samples, got {got}")]
    Length { expected: usize, got: usize },
    #[error("signal must be real-valued (imaginary sup {imag:e} vs sup-norm {sup:e})")]
    NotReal { imag: f64, sup: f64 },
    #[error("zero-padding factor {0} is below the minimum of 2 for slowly decaying kernels")]
    Padding(usize),
}

/// Uniform time axis `t_j = t0 + j·dt`, `j = 0..n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    n: usize,
    dt: f64,
    t0: f64,
}

impl TimeGrid {
    pub fn new(n: usize, dt: f64, t0: f64) -> Result<Self, TransformError> {
        if n < 2 || n % 2 != 0 {
            return Err(TransformError::SampleCount(n));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(TransformError::Spacing(dt));
        }
        if !t0.is_finite() {
            return Err(TransformError::Origin(t0));
        }
        Ok(TimeGrid { n, dt, t0 })
    }

    /// Grid with `t = 0` at sample `n/2`.
    pub fn centered(n: usize, dt: f64) -> Result<Self, TransformError> {
        TimeGrid::new(n, dt, -((n / 2) as f64) * dt)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn t0(&self) -> f64 {
        self.t0
    }
    pub fn df(&self) -> f64 {
        1.0 / (self.n as f64 * self.dt)
    }
    pub fn f_max(&self) -> f64 {
        0.5 / self.dt
    }
    pub fn span(&self) -> f64 {
        self.n as f64 * self.dt
    }
    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.time(j))
    }
    pub fn last_time(&self) -> f64 {
        self.time(self.n - 1)
    }

    /// Signed bin frequency: `k·df` for `k ≤ n/2`, `(k−n)·df` above. The Nyquist
    /// bin is assigned `+f_max`.
    pub fn freq(&self, k: usize) -> f64 {
        let k = k as i64;
        let n = self.n as i64;
        let m = if k <= n / 2 { k } else { k - n };
        m as f64 * self.df()
    }

    /// Sign of the bin frequency with `sgn(0) = sgn(Nyquist) = 0`.
    pub fn freq_sign(&self, k: usize) -> f64 {
        if k == 0 || k == self.n / 2 {
            0.0
        } else if k < self.n / 2 {
            1.0
        } else {
            -1.0
        }
    }

    /// Same spacing, shifted origin.
    pub fn shifted(&self, by: f64) -> TimeGrid {
        TimeGrid { t0: self.t0 + by, ..*self }
    }

    /// Same spacing and origin with `n_new ≥ n` samples.
    pub fn extended(&self, n_new: usize) -> Result<TimeGrid, TransformError> {
        TimeGrid::new(n_new, self.dt, self.t0)
    }

    /// Index of the sample nearest to `t`, if `t` lies on the grid span.
    pub fn nearest_index(&self, t: f64) -> Option<usize> {
        let x = ((t - self.t0) / self.dt).round();
        if x < 0.0 || x >= self.n as f64 {
            None
        } else {
            Some(x as usize)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Unit {
    Dimensionless,
    Volts,
    PerSqrtSecond,
    VoltsSquared,
}

/// Complex samples on a [`TimeGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    grid: TimeGrid,
    samples: Vec<Complex64>,
    unit: Unit,
}

impl Signal {
    pub fn new(grid: TimeGrid, samples: Vec<Complex64>, unit: Unit) -> Result<Self, TransformError> {
        if samples.len() != grid.n {
            return Err(TransformError::Length { expected: grid.n, got: samples.len() });
        }
        Ok(Signal { grid, samples, unit })
    }

    pub fn from_real(grid: TimeGrid, values: &[f64], unit: Unit) -> Result<Self, TransformError> {
        Signal::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), unit)
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: TimeGrid, unit: Unit, f: F) -> Self {
        let samples = grid.times().map(f).collect();
        Signal { grid, samples, unit }
    }

    pub fn from_real_fn<F: Fn(f64) -> f64>(grid: TimeGrid, unit: Unit, f: F) -> Self {
        Signal::from_fn(grid, unit, |t| Complex64::new(f(t), 0.0))
    }

    pub fn zeros(grid: TimeGrid, unit: Unit) -> Self {
        Signal { grid, samples: vec![ZERO; grid.n], unit }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }
    pub fn unit(&self) -> Unit {
        self.unit
    }
    pub fn with_unit(mut self, unit: Unit) -> Self {
        self.unit = unit;
        self
    }
    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }
    pub fn real_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.re).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `dt·Σ|x|²`.
    pub fn energy(&self) -> f64 {
        self.grid.dt * self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// True when imaginary parts are at most `1e-12` of the sup-norm.
    pub fn is_real(&self) -> bool {
        self.check_real().is_ok()
    }

    pub fn check_real(&self) -> Result<(), TransformError> {
        let sup = self.sup_norm();
        let imag = self.samples.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        if imag <= 1e-12 * sup {
            Ok(())
        } else {
            Err(TransformError::NotReal { imag, sup })
        }
    }

    pub fn scaled(&self, s: Complex64) -> Signal {
        Signal {
            grid: self.grid,
            samples: self.samples.iter().map(|&x| x * s).collect(),
            unit: self.unit,
        }
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Signal {
        Signal {
            grid: self.grid,
            samples: self.samples.iter().map(|&x| f(x)).collect(),
            unit: self.unit,
        }
    }

    /// Samples at `t_{n−j}` (index 0 stays put). This is `x(−t)` when the grid
    /// is centered.
    pub fn reversed(&self) -> Signal {
        let n = self.grid.n;
        let samples = (0..n).map(|j| self.samples[(n - j) % n]).collect();
        Signal { grid: self.grid, samples, unit: self.unit }
    }

    pub fn conj(&self) -> Signal {
        self.map(|x| x.conj())
    }

    /// Mean of the samples.
    pub fn mean(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() / self.grid.n as f64
    }

    /// Zero-extends to `n_new` samples on the same origin and spacing.
    pub fn zero_padded(&self, n_new: usize) -> Result<Signal, TransformError> {
        let grid = self.grid.extended(n_new)?;
        let mut samples = self.samples.clone();
        samples.resize(n_new, ZERO);
        Ok(Signal { grid, samples, unit: self.unit })
    }

    /// First `grid.n` samples re-attached to `grid` (which must share origin and spacing).
    pub fn truncated_to(&self, grid: TimeGrid) -> Signal {
        Signal { grid, samples: self.samples[..grid.n].to_vec(), unit: self.unit }
    }
}

/// Bins `x~(f_k)` for the signed frequencies of [`TimeGrid::freq`].
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: TimeGrid,
    bins: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: TimeGrid, bins: Vec<Complex64>) -> Result<Self, TransformError> {
        if bins.len() != grid.n {
            return Err(TransformError::Length { expected: grid.n, got: bins.len() });
        }
        Ok(Spectrum { grid, bins })
    }
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }
    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }
    pub fn bins_mut(&mut self) -> &mut [Complex64] {
        &mut self.bins
    }
    pub fn freq(&self, k: usize) -> f64 {
        self.grid.freq(k)
    }
}

/// `x~(f_k) = dt·Σ_j x(t_j) e^{+i2πf_k t_j}`.
pub fn forward_fourier(sig: &Signal) -> Spectrum {
    let g = sig.grid;
    let mut bins = sig.samples.clone();
    fft::dft_in_place(&mut bins, 1.0);
    for (k, b) in bins.iter_mut().enumerate() {
        let a = 2.0 * PI * g.freq(k) * g.t0;
        *b *= Complex64::new(a.cos(), a.sin()) * g.dt;
    }
    Spectrum { grid: g, bins }
}

/// `x(t_j) = df·Σ_k x~(f_k) e^{−i2πf_k t_j}`.
pub fn inverse_fourier(spec: &Spectrum, unit: Unit) -> Signal {
    let g = spec.grid;
    let df = g.df();
    let mut samples: Vec<Complex64> = spec
        .bins
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            let a = -2.0 * PI * g.freq(k) * g.t0;
            b * Complex64::new(a.cos(), a.sin()) * df
        })
        .collect();
    fft::dft_in_place(&mut samples, -1.0);
    Signal { grid: g, samples, unit }
}

/// How the finite window is extended before a spectral convolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Treat the window as one period of a periodic signal.
    Periodic,
    /// Append zeros so the padded length is at least `factor·n` (rounded up to a power of two).
    ZeroPad(usize),
}

impl Default for Boundary {
    fn default() -> Self {
        Boundary::ZeroPad(2)
    }
}

/// Non-fatal findings attached to a transform result.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Warning {
    /// |mean| exceeds `1e-9·sup-norm`; the DC bin is discarded by every singular multiplier.
    DcComponent { ratio: f64 },
    /// Fraction of spectral energy in the two lowest-|f| bins exceeds 1%.
    LowFrequencyEnergy { fraction: f64 },
}

/// A value with the warnings raised while computing it.
#[derive(Clone, Debug, PartialEq)]
pub struct Checked<T, W = Warning> {
    pub value: T,
    pub warnings: Vec<W>,
}

pub const DC_TOLERANCE: f64 = 1e-9;
pub const LOW_FREQUENCY_LIMIT: f64 = 0.01;

/// DC and low-frequency diagnostics for a real input.
pub fn input_diagnostics(sig: &Signal, check_low_frequency: bool) -> Vec<Warning> {
    let mut w = Vec::new();
    let sup = sig.sup_norm();
    if sup == 0.0 {
        return w;
    }
    let ratio = sig.mean().norm() / sup;
    if ratio > DC_TOLERANCE {
        w.push(Warning::DcComponent { ratio });
    }
    if check_low_frequency {
        let spec = forward_fourier(sig);
        let n = sig.grid.n;
        let total: f64 = spec.bins.iter().map(|b| b.norm_sqr()).sum();
        let low = spec.bins[0].norm_sqr() + spec.bins[1].norm_sqr() + spec.bins[n - 1].norm_sqr();
        let fraction = low / total;
        if fraction > LOW_FREQUENCY_LIMIT {
            w.push(Warning::LowFrequencyEnergy { fraction });
        }
    }
    w
}

/// Multiplies the spectrum of `sig` by `m(f, sgn f)` under the given boundary.
///
/// `sgn` follows [`TimeGrid::freq_sign`], so DC and Nyquist see 0.
pub fn apply_multiplier<M: Fn(f64, f64) -> Complex64>(
    sig: &Signal,
    boundary: Boundary,
    m: M,
) -> Result<Signal, TransformError> {
    let n = sig.grid.n;
    let work = match boundary {
        Boundary::Periodic => sig.clone(),
        Boundary::ZeroPad(factor) => {
            if factor < 2 {
                return Err(TransformError::Padding(factor));
            }
            sig.zero_padded((factor * n).next_power_of_two())?
        }
    };
    let mut spec = forward_fourier(&work);
    let g = spec.grid;
    for (k, b) in spec.bins.iter_mut().enumerate() {
        *b *= m(g.freq(k), g.freq_sign(k));
    }
    let out = inverse_fourier(&spec, sig.unit);
    Ok(out.truncated_to(sig.grid))
}

/// Options shared by the spectral singular-kernel operations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvolveOptions {
    pub boundary: Boundary,
}

impl Default for ConvolveOptions {
    fn default() -> Self {
        ConvolveOptions { boundary: Boundary::default() }
    }
}

/// Convolution with `kernel` through its spectral multiplier. Requires a real input.
pub fn convolve_kernel(
    sig: &Signal,
    kernel: Kernel,
    opts: &ConvolveOptions,
) -> Result<Checked<Signal>, TransformError> {
    sig.check_real()?;
    let warnings = input_diagnostics(sig, kernel.is_half_order());
    let out = apply_multiplier(sig, opts.boundary, |f, s| kernel.multiplier(f, s))?;
    // The multiplier is Hermitian, so the exact output is real.
    let value = out.map(|c| Complex64::new(c.re, 0.0));
    Ok(Checked { value, warnings })
}

/// Principal-value Hilbert transform without the 1/π factor:
/// `f_h(t) = p.v.∫ dt' f(t−t')/t'`, multiplier `iπ·sgn f`.
pub fn hilbert_paper(sig: &Signal, opts: &ConvolveOptions) -> Result<Checked<Signal>, TransformError> {
    convolve_kernel(sig, Kernel::InverseT, opts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// Kernel `1/√|t|`, multiplier `1/√|f|`.
    Even,
    /// Kernel `sgn(t)/√|t|`, multiplier `i·sgn(f)/√|f|`.
    Odd,
}

pub fn half_order_convolve(
    sig: &Signal,
    parity: Parity,
    opts: &ConvolveOptions,
) -> Result<Checked<Signal>, TransformError> {
    let kernel = match parity {
        Parity::Even => Kernel::InvSqrtAbs,
        Parity::Odd => Kernel::SgnInvSqrtAbs,
    };
    convolve_kernel(sig, kernel, opts)
}

/// Evaluates a real, band-limited sampled signal between samples by
/// trigonometric interpolation of its DFT (exact for periodic band-limited data).
#[derive(Clone, Debug)]
pub struct TrigInterpolator {
    grid: TimeGrid,
    terms: Vec<(f64, Complex64)>,
}

impl TrigInterpolator {
    /// Bins below `cutoff·max|bin|` are dropped to speed up evaluation.
    pub fn new(sig: &Signal, cutoff: f64) -> Self {
        let spec = forward_fourier(sig);
        let g = spec.grid;
        let peak = spec.bins.iter().map(|b| b.norm()).fold(0.0, f64::max);
        let df = g.df();
        let mut terms = Vec::new();
        for (k, &b) in spec.bins.iter().enumerate() {
            if b.norm() <= cutoff * peak {
                continue;
            }
            if k == g.n / 2 {
                // Split the Nyquist bin evenly over ±f_max.
                terms.push((g.freq(k), b * 0.5 * df));
                terms.push((-g.freq(k), b * 0.5 * df));
            } else {
                terms.push((g.freq(k), b * df));
            }
        }
        TrigInterpolator { grid: g, terms }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(f, c)| {
                let a = -2.0 * PI * f * t;
                c * Complex64::new(a.cos(), a.sin())
            })
            .sum()
    }
}
