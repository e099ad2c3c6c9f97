//! Direct quadrature of singular convolutions `∫ dt' f(t−t')·K(t')`.
//!
//! Both half-lines are folded onto `s = |t'| > 0`. Half-order and `|t|^{-3/2}`
//! kernels are integrated in `u = √s`, which turns `s^{-1/2}` into a constant
//! and `s^{-3/2}` into `u^{-2}`; the `|t|^{-3/2}` family subtracts `f(t)` so the
//! remaining integrand is bounded, and the subtracted constant contributes only
//! through the analytic tail `-2f(t)·∫_L^∞ s^{-3/2} ds`.

use super::quad::{integrate, QuadOptions};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Convolution kernels with known spectral multipliers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// Principal value of `1/t`; multiplier `iπ·sgn f`.
    InverseT,
    /// `1/√|t|`; multiplier `1/√|f|`.
    InvSqrtAbs,
    /// `sgn(t)/√|t|`; multiplier `i·sgn(f)/√|f|`.
    SgnInvSqrtAbs,
    /// `Θ(t)/√t`; multiplier `(1 + i·sgn f)/(2√|f|)`.
    HeavisideInvSqrt,
    /// Hadamard finite part of `|t|^{-3/2}`; multiplier `-4π√|f|`.
    FinitePartAbs32,
    /// `sgn(t)/|t|^{3/2}` (principal value); multiplier `4πi·sgn(f)·√|f|`.
    SgnAbs32,
    /// `(1 + i·sgn t)/|t|^{3/2}` (finite part); multiplier `-4π√|f|·(1 + sgn f)`.
    Chi,
}

impl Kernel {
    pub const ALL: [Kernel; 7] = [
        Kernel::InverseT,
        Kernel::InvSqrtAbs,
        Kernel::SgnInvSqrtAbs,
        Kernel::HeavisideInvSqrt,
        Kernel::FinitePartAbs32,
        Kernel::SgnAbs32,
        Kernel::Chi,
    ];

    /// Spectral multiplier at frequency `f` with `s = sgn f` supplied by the
    /// caller (so DC and Nyquist can be given 0). Zero at `f = 0`.
    pub fn multiplier(&self, f: f64, s: f64) -> Complex64 {
        let a = f.abs();
        if a == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match self {
            Kernel::InverseT => I * (PI * s),
            Kernel::InvSqrtAbs => ONE / a.sqrt(),
            Kernel::SgnInvSqrtAbs => I * (s / a.sqrt()),
            Kernel::HeavisideInvSqrt => Complex64::new(1.0, s) / (2.0 * a.sqrt()),
            Kernel::FinitePartAbs32 => ONE * (-4.0 * PI * a.sqrt()),
            Kernel::SgnAbs32 => I * (4.0 * PI * s * a.sqrt()),
            Kernel::Chi => ONE * (-4.0 * PI * a.sqrt() * (1.0 + s)),
        }
    }

    /// Kernels decaying like `|t|^{-1/2}`.
    pub fn is_half_order(&self) -> bool {
        matches!(self, Kernel::InvSqrtAbs | Kernel::SgnInvSqrtAbs | Kernel::HeavisideInvSqrt)
    }

    fn substituted(&self) -> bool {
        !matches!(self, Kernel::InverseT)
    }

    fn subtracts_center(&self) -> bool {
        matches!(self, Kernel::FinitePartAbs32 | Kernel::Chi)
    }

    /// Weights `(w+, w-, w0)` so that the folded numerator is
    /// `w+·f(t−s) + w-·f(t+s) + w0·f(t)`.
    fn weights(&self) -> (Complex64, Complex64, Complex64) {
        let z = Complex64::new(0.0, 0.0);
        match self {
            Kernel::InverseT | Kernel::SgnInvSqrtAbs | Kernel::SgnAbs32 => (ONE, -ONE, z),
            Kernel::InvSqrtAbs => (ONE, ONE, z),
            Kernel::HeavisideInvSqrt => (ONE, z, z),
            Kernel::FinitePartAbs32 => (ONE, ONE, -2.0 * ONE),
            Kernel::Chi => (Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0), -2.0 * ONE),
        }
    }

    /// Power `p` of the folded kernel `s^{-p}`.
    fn power(&self) -> f64 {
        match self {
            Kernel::InverseT => 1.0,
            Kernel::InvSqrtAbs | Kernel::SgnInvSqrtAbs | Kernel::HeavisideInvSqrt => 0.5,
            _ => 1.5,
        }
    }
}

/// A function handed to the oracle, with its support and discontinuities.
#[derive(Clone, Copy)]
pub struct OracleFunction<'a> {
    pub f: &'a dyn Fn(f64) -> Complex64,
    /// Closed interval outside which `f` vanishes (bounds may be infinite).
    pub support: (f64, f64),
    /// Points where `f` jumps.
    pub jumps: &'a [f64],
}

impl<'a> OracleFunction<'a> {
    pub fn new(f: &'a dyn Fn(f64) -> Complex64) -> Self {
        OracleFunction { f, support: (f64::NEG_INFINITY, f64::INFINITY), jumps: &[] }
    }
    pub fn with_support(mut self, a: f64, b: f64) -> Self {
        self.support = (a, b);
        self
    }
    pub fn with_jumps(mut self, jumps: &'a [f64]) -> Self {
        self.jumps = jumps;
        self
    }
}

/// Treatment of `|t'|` beyond the integration window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tail {
    /// The function is negligible beyond the window.
    Truncate,
    /// Persistent oscillation with the given period: half-period cells are
    /// integrated and the partial sums extrapolated with Wynn's ε-algorithm.
    Oscillatory { period: f64, cells: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleOptions {
    pub quad: QuadOptions,
    /// Half-width of the `t'` window when the support is unbounded.
    pub window: f64,
    pub tail: Tail,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { quad: QuadOptions::default(), window: 50.0, tail: Tail::Truncate }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleValue {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("quadrature did not converge at t = {t}: error estimate {error:e} exceeds tolerance")]
    NonConvergence { t: f64, error: f64 },
    #[error("evaluation time {t} coincides with a declared jump; the singular integral diverges there")]
    AtJump { t: f64 },
    #[error("integration window must be finite and positive, got {0}")]
    Window(f64),
}

/// Evaluates `∫ dt' f(t−t')·K(t')` by adaptive quadrature.
pub fn pv_quadrature_oracle(
    func: &OracleFunction<'_>,
    kernel: Kernel,
    t: f64,
    opts: &OracleOptions,
) -> Result<OracleValue, OracleError> {
    if func.jumps.iter().any(|&j| j == t) && kernel != Kernel::HeavisideInvSqrt {
        return Err(OracleError::AtJump { t });
    }
    let (a, b) = func.support;
    let bounded = a.is_finite() && b.is_finite();
    let window = if bounded { (t - a).max(b - t).max(0.0) } else { opts.window };
    if !(window.is_finite() && window >= 0.0) || (!bounded && window <= 0.0) {
        return Err(OracleError::Window(window));
    }
    let f = func.f;
    let (wp, wm, w0) = kernel.weights();
    let center = if kernel.subtracts_center() { f(t) } else { Complex64::new(0.0, 0.0) };

    // Breakpoints in s.
    let mut s_points = vec![0.0, window];
    for &x in func.jumps.iter().chain([a, b].iter()) {
        for s in [t - x, x - t] {
            if s.is_finite() && s > 0.0 && s < window {
                s_points.push(s);
            }
        }
    }
    s_points.sort_by(|x, y| x.partial_cmp(y).unwrap());
    s_points.dedup();

    let numerator = |s: f64| wp * f(t - s) + wm * f(t + s) + w0 * center;
    let result = if kernel.substituted() {
        let p = kernel.power();
        let u_points: Vec<f64> = s_points.iter().map(|s| s.sqrt()).collect();
        // ds = 2u du, s^{-p} = u^{-2p}.
        integrate(
            |u: f64| {
                if u == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                numerator(u * u) * (2.0 * u.powf(1.0 - 2.0 * p))
            },
            &u_points,
            &opts.quad,
        )
    } else {
        integrate(
            |s: f64| if s == 0.0 { Complex64::new(0.0, 0.0) } else { numerator(s) / s },
            &s_points,
            &opts.quad,
        )
    };
    if !result.converged {
        return Err(OracleError::NonConvergence { t, error: result.error });
    }
    let mut value = result.value;
    let mut error = result.error;
    let mut evaluations = result.evaluations;

    // Analytic remainder of the subtracted constant: w0·f(t)·∫_L^∞ s^{-3/2} ds.
    let tail_constant = |l: f64| {
        if kernel.subtracts_center() && l > 0.0 {
            w0 * center * (2.0 / l.sqrt())
        } else {
            Complex64::new(0.0, 0.0)
        }
    };

    match opts.tail {
        Tail::Truncate => {
            value += tail_constant(window);
        }
        Tail::Oscillatory { period, cells } => {
            let p = kernel.power();
            let raw = |s: f64| (wp * f(t - s) + wm * f(t + s)) * s.powf(-p);
            let half = 0.5 * period;
            let mut partial = Vec::with_capacity(cells + 1);
            let mut acc = value;
            partial.push(acc + tail_constant(window));
            for k in 0..cells {
                let lo = window + k as f64 * half;
                let hi = lo + half;
                let r = integrate(raw, &[lo, hi], &opts.quad);
                if !r.converged {
                    return Err(OracleError::NonConvergence { t, error: r.error });
                }
                acc += r.value;
                error += r.error;
                evaluations += r.evaluations;
                partial.push(acc + tail_constant(window));
            }
            value = wynn_epsilon(&partial);
        }
    }
    Ok(OracleValue { value, error, evaluations })
}

/// Wynn's ε-algorithm; returns the deepest even-column entry.
pub fn wynn_epsilon(s: &[Complex64]) -> Complex64 {
    let n = s.len();
    if n < 3 {
        return s[n - 1];
    }
    let mut prev = vec![Complex64::new(0.0, 0.0); n];
    let mut cur = s.to_vec();
    let mut best = s[n - 1];
    for k in 1..n {
        let m = cur.len() - 1;
        let mut next = Vec::with_capacity(m);
        for i in 0..m {
            let d = cur[i + 1] - cur[i];
            if d.norm() == 0.0 {
                return if k % 2 == 1 { cur[i + 1] } else { best };
            }
            next.push(prev[i + 1] + d.inv());
        }
        if k % 2 == 0 {
            best = next[next.len() - 1];
        }
        prev = cur;
        cur = next;
        if cur.len() < 2 {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn osc(period: f64) -> OracleOptions {
        OracleOptions {
            window: 10.0 * period,
            tail: Tail::Oscillatory { period, cells: 24 },
            ..Default::default()
        }
    }

    #[test]
    fn pv_inverse_t_on_cosine() {
        let f0 = 0.7;
        let cos = move |x: f64| Complex64::new((2.0 * PI * f0 * x).cos(), 0.0);
        let func = OracleFunction::new(&cos);
        for &t in &[0.0, 0.2, 1.3] {
            let v = pv_quadrature_oracle(&func, Kernel::InverseT, t, &osc(1.0 / f0)).unwrap();
            let expect = PI * (2.0 * PI * f0 * t).sin();
            assert!((v.value.re - expect).abs() < 1e-8, "t={t}: {} vs {expect}", v.value.re);
            assert!(v.value.im.abs() < 1e-10);
        }
    }

    #[test]
    fn finite_part_of_constant_over_window() {
        // Hadamard finite part of ∫_{-L}^{L} |t'|^{-3/2} dt' is -4/√L.
        let one = |_x: f64| Complex64::new(1.0, 0.0);
        let func = OracleFunction::new(&one);
        for &w in &[1.0, 10.0, 1234.5] {
            let opts = OracleOptions { window: w, ..Default::default() };
            let v = pv_quadrature_oracle(&func, Kernel::FinitePartAbs32, 0.3, &opts).unwrap();
            let expect = -4.0 / w.sqrt();
            assert!((v.value.re - expect).abs() < 1e-13 && v.value.im == 0.0, "window {w}: {}", v.value);
        }
    }

    #[test]
    fn half_order_kernels_on_cosine_match_multipliers() {
        let f0 = 1.3;
        let cos = move |x: f64| Complex64::new((2.0 * PI * f0 * x).cos(), 0.0);
        let func = OracleFunction::new(&cos);
        let t = 0.37;
        let w = 2.0 * PI * f0 * t;
        let even = pv_quadrature_oracle(&func, Kernel::InvSqrtAbs, t, &osc(1.0 / f0)).unwrap();
        assert!((even.value.re - w.cos() / f0.sqrt()).abs() < 1e-7);
        let odd = pv_quadrature_oracle(&func, Kernel::SgnInvSqrtAbs, t, &osc(1.0 / f0)).unwrap();
        assert!((odd.value.re - w.sin() / f0.sqrt()).abs() < 1e-7);
        let fp = pv_quadrature_oracle(&func, Kernel::FinitePartAbs32, t, &osc(1.0 / f0)).unwrap();
        assert!((fp.value.re + 4.0 * PI * f0.sqrt() * w.cos()).abs() < 1e-7);
    }

    #[test]
    fn rejects_evaluation_at_jump() {
        let step = |x: f64| Complex64::new(if x > 0.0 { 1.0 } else { 0.0 }, 0.0);
        let jumps = [0.0];
        let func = OracleFunction::new(&step).with_support(0.0, 5.0).with_jumps(&jumps);
        let r = pv_quadrature_oracle(&func, Kernel::Chi, 0.0, &OracleOptions::default());
        assert_eq!(r.unwrap_err(), OracleError::AtJump { t: 0.0 });
    }

    #[test]
    fn wynn_accelerates_alternating_harmonic() {
        // Σ (-1)^k/(k+1) = ln 2
        let mut acc = 0.0;
        let partial: Vec<Complex64> = (0..15)
            .map(|k| {
                acc += if k % 2 == 0 { 1.0 } else { -1.0 } / (k as f64 + 1.0);
                Complex64::new(acc, 0.0)
            })
            .collect();
        assert!((wynn_epsilon(&partial).re - core::f64::consts::LN_2).abs() < 1e-10);
    }
}
