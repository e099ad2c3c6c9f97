//! Spectral multipliers checked against the quadrature oracle on a fixed corpus
//! of smooth, band-interior test signals.

use super::oracle::{pv_quadrature_oracle, Kernel, OracleError, OracleFunction, OracleOptions};
use super::quad::QuadOptions;
use super::{convolve_kernel, Boundary, ConvolveOptions, Signal, TimeGrid, TransformError, Unit};
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Kernels of the Fourier-pair table.
pub const TABLE_KERNELS: [Kernel; 4] =
    [Kernel::InverseT, Kernel::InvSqrtAbs, Kernel::SgnInvSqrtAbs, Kernel::HeavisideInvSqrt];

/// Agreement required between the two routes, relative to the output sup-norm.
pub const TABLE_TOLERANCE: f64 = 1e-5;

/// `Σ_i a_i·e^{−(t−c_i)²/4σ_i²}·cos(2πf_i t + φ_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusSignal {
    pub name: &'static str,
    /// `(amplitude, center, sigma, carrier, phase)` per component.
    pub components: Vec<(f64, f64, f64, f64, f64)>,
}

impl CorpusSignal {
    pub fn eval(&self, t: f64) -> f64 {
        self.components
            .iter()
            .map(|&(a, c, s, f, ph)| a * (-(t - c) * (t - c) / (4.0 * s * s)).exp() * (2.0 * PI * f * t + ph).cos())
            .sum()
    }

    /// Interval outside which every component is below `e^{−100}` of its peak.
    pub fn support(&self) -> (f64, f64) {
        let lo = self.components.iter().map(|&(_, c, s, _, _)| c - 20.0 * s).fold(f64::INFINITY, f64::min);
        let hi = self.components.iter().map(|&(_, c, s, _, _)| c + 20.0 * s).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    pub fn sample(&self, grid: TimeGrid) -> Signal {
        Signal::from_real_fn(grid, Unit::Dimensionless, |t| self.eval(t))
    }
}

/// Ten carrier-modulated Gaussian signals; carriers sit at least seven spectral
/// widths above DC.
pub fn corpus() -> Vec<CorpusSignal> {
    let one = |name, c, s, f, ph| CorpusSignal { name, components: alloc::vec![(1.0, c, s, f, ph)] };
    alloc::vec![
        one("gauss_f2", 0.0, 0.6, 2.0, 0.0),
        one("gauss_f3_sin", 0.0, 0.5, 3.0, -PI / 2.0),
        one("gauss_f5_offset", 0.7, 0.4, 5.0, 0.3),
        one("gauss_f8_narrow", -0.4, 0.3, 8.0, 1.1),
        one("gauss_f1_wide", 0.2, 1.0, 1.2, 2.0),
        one("gauss_f4_phase", -1.0, 0.45, 4.0, 2.7),
        CorpusSignal { name: "pair_f2_f6", components: alloc::vec![(1.0, -0.5, 0.5, 2.0, 0.0), (0.6, 0.8, 0.4, 6.0, 0.9)] },
        CorpusSignal { name: "pair_beat", components: alloc::vec![(0.7, 0.0, 0.8, 3.0, 0.0), (0.7, 0.0, 0.8, 3.5, 0.0)] },
        CorpusSignal { name: "pair_overlap", components: alloc::vec![(1.0, 0.3, 0.35, 7.0, 0.4), (-0.5, 0.1, 0.6, 2.5, 1.7)] },
        CorpusSignal {
            name: "triple",
            components: alloc::vec![(0.5, -1.2, 0.5, 2.2, 0.0), (0.8, 0.0, 0.4, 4.4, 1.0), (0.4, 1.3, 0.3, 6.6, 2.0)],
        },
    ]
}

/// Grid shared by the corpus: 4096 samples at `dt = 0.01`, centered.
pub fn corpus_grid() -> TimeGrid {
    TimeGrid::centered(4096, 0.01).expect("valid grid")
}

/// Sample offsets (relative to the grid center) at which the oracle is evaluated.
pub const PROBE_OFFSETS: [isize; 9] = [-150, -90, -47, -13, 0, 11, 52, 96, 140];

#[derive(Clone, Debug, PartialEq)]
pub struct TableResidual {
    pub kernel: Kernel,
    pub signal: &'static str,
    /// `max |spectral − oracle| / sup|spectral|` over the probe times.
    pub residual: f64,
    pub probes: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TableError {
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

pub fn oracle_options() -> OracleOptions {
    OracleOptions { quad: QuadOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 4000 }, ..Default::default() }
}

/// Spectral (zero-padded ×4) vs oracle residual for one kernel and one corpus signal.
pub fn table_residual(kernel: Kernel, sig: &CorpusSignal) -> Result<TableResidual, TableError> {
    let grid = corpus_grid();
    let sampled = sig.sample(grid);
    let spectral = convolve_kernel(&sampled, kernel, &ConvolveOptions { boundary: Boundary::ZeroPad(4) })?.value;
    let scale = spectral.sup_norm();
    let f = |t: f64| Complex64::new(sig.eval(t), 0.0);
    let (a, b) = sig.support();
    let func = OracleFunction::new(&f).with_support(a, b);
    let opts = oracle_options();
    let mid = (grid.n() / 2) as isize;
    let mut worst: f64 = 0.0;
    for off in PROBE_OFFSETS {
        let j = (mid + off) as usize;
        let o = pv_quadrature_oracle(&func, kernel, grid.time(j), &opts)?.value;
        worst = worst.max((spectral.samples()[j] - o).norm() / scale);
    }
    Ok(TableResidual { kernel, signal: sig.name, residual: worst, probes: PROBE_OFFSETS.len() })
}

/// Every kernel of the table on every corpus signal.
pub fn table_check() -> Result<Vec<TableResidual>, TableError> {
    let c = corpus();
    let mut out = Vec::with_capacity(TABLE_KERNELS.len() * c.len());
    for k in TABLE_KERNELS {
        for s in &c {
            out.push(table_residual(k, s)?);
        }
    }
    Ok(out)
}
