//! Classical voltage traces to time-domain quadratures and photon flux, and back.
//!
//! With `p = √(2/Zh)·(|t|^{-1/2} * v)` and `q = √(2/Zh)·(sgn t·|t|^{-1/2} * v)` the
//! spectral multipliers are `√(2/Zh)/√|f|` and `√(2/Zh)·i·sgn f/√|f|`, so
//! `q = (1/π)·H[p]` with the paper-literal Hilbert transform `H`.
//!
//! The one-sided transforms satisfy `s₊ + s₋ = √(Zh/2)·p` and
//! `s₊ − s₋ = √(Zh/2)·q`, and `s₊ = (√(Zh)/2)·q_{π/4}`.

use crate::transforms::{
    apply_multiplier, half_order_convolve, input_diagnostics, pv_quadrature_oracle, Boundary, Checked,
    ConvolveOptions, Kernel, OracleError, OracleFunction, OracleOptions, Parity, Signal, Tail,
    TransformError, TrigInterpolator, Unit, Warning,
};
use crate::transforms::quad::QuadOptions;
use crate::PhysConsts;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Sign `s` in `q = s·(1/π)·hilbert_paper(p)`, calibrated on a monochromatic trace.
pub const HILBERT_PAIR_SIGN: f64 = 1.0;

/// Fraction of the window masked on each side.
pub const EDGE_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldError {
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("quadrature traces live on different grids")]
    GridMismatch,
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Warnings specific to the conversion layer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldWarning {
    Input(Warning),
    /// The validity masks of p and q differ.
    MaskMismatch,
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct FieldOptions {
    pub boundary: Boundary,
}

impl FieldOptions {
    pub fn periodic() -> Self {
        FieldOptions { boundary: Boundary::Periodic }
    }
    fn convolve(&self) -> ConvolveOptions {
        ConvolveOptions { boundary: self.boundary }
    }
}

/// `true` outside the outer 10% of the window on each side.
pub fn edge_mask(n: usize) -> Vec<bool> {
    let cut = (EDGE_FRACTION * n as f64).ceil() as usize;
    (0..n).map(|j| j >= cut && j + cut < n).collect()
}

/// Edge-to-interior RMS ratio above which [`auto_boundary`] treats a trace as periodic.
pub const AUTO_PERIODIC_RATIO: f64 = 1e-6;

/// Periodic when the outer 10% of the window carries RMS above `1e-6` of the
/// interior RMS (a persistent signal), zero-padding ×2 otherwise (a pulse).
pub fn auto_boundary(v: &Signal) -> Boundary {
    let mask = edge_mask(v.grid().n());
    let rms = |keep: bool| {
        let (sum, count) = v
            .samples()
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m == keep)
            .fold((0.0, 0usize), |(s, c), (x, _)| (s + x.norm_sqr(), c + 1));
        if count == 0 {
            0.0
        } else {
            (sum / count as f64).sqrt()
        }
    };
    let (edge, interior) = (rms(false), rms(true));
    if interior > 0.0 && edge > AUTO_PERIODIC_RATIO * interior {
        Boundary::Periodic
    } else {
        Boundary::ZeroPad(2)
    }
}

#[derive(Clone, Debug)]
pub struct QuadraturePair {
    pub p: Signal,
    pub q: Signal,
    pub consts: PhysConsts,
    pub valid: Vec<bool>,
    /// False when the pair was assembled from traces with different masks.
    pub masks_agree: bool,
}

impl QuadraturePair {
    /// Assembles a pair from separately obtained traces; the combined mask is the intersection.
    pub fn from_parts(
        p: Signal,
        q: Signal,
        consts: PhysConsts,
        valid_p: &[bool],
        valid_q: &[bool],
    ) -> Result<Self, FieldError> {
        if p.grid() != q.grid() || valid_p.len() != p.grid().n() || valid_q.len() != p.grid().n() {
            return Err(FieldError::GridMismatch);
        }
        p.check_real()?;
        q.check_real()?;
        let valid = valid_p.iter().zip(valid_q).map(|(a, b)| *a && *b).collect();
        Ok(QuadraturePair { p, q, consts, valid, masks_agree: valid_p == valid_q })
    }
}

#[derive(Clone, Debug)]
pub struct FluxTrace {
    pub n: Signal,
    pub valid: Vec<bool>,
}

fn wrap_warnings(w: Vec<Warning>) -> Vec<FieldWarning> {
    w.into_iter().map(FieldWarning::Input).collect()
}

fn real(sig: Signal) -> Signal {
    sig.map(|c| Complex64::new(c.re, 0.0))
}

pub fn quadratures_from_voltage(
    v: &Signal,
    consts: PhysConsts,
    opts: &FieldOptions,
) -> Result<Checked<QuadraturePair, FieldWarning>, FieldError> {
    let scale = Complex64::new((2.0 / consts.zh()).sqrt(), 0.0);
    let even = half_order_convolve(v, Parity::Even, &opts.convolve())?;
    let odd = half_order_convolve(v, Parity::Odd, &opts.convolve())?;
    let p = even.value.scaled(scale).with_unit(Unit::Dimensionless);
    let q = odd.value.scaled(scale).with_unit(Unit::Dimensionless);
    let valid = edge_mask(v.grid().n());
    Ok(Checked {
        value: QuadraturePair { p, q, consts, valid, masks_agree: true },
        warnings: wrap_warnings(even.warnings),
    })
}

/// One-sided transforms `s₊ = ∫_{t'>0} v(t−t')/√t'` and `s₋ = ∫_{t'>0} v(t+t')/√t'`.
pub fn s_transforms(v: &Signal, opts: &FieldOptions) -> Result<Checked<(Signal, Signal), FieldWarning>, FieldError> {
    v.check_real()?;
    let warnings = wrap_warnings(input_diagnostics(v, true));
    let plus = apply_multiplier(v, opts.boundary, |f, s| Kernel::HeavisideInvSqrt.multiplier(f, s))?;
    // Mirrored kernel: conjugate multiplier.
    let minus = apply_multiplier(v, opts.boundary, |f, s| Kernel::HeavisideInvSqrt.multiplier(f, s).conj())?;
    Ok(Checked { value: (real(plus), real(minus)), warnings })
}

/// `q_θ = cos θ·q + sin θ·p`.
pub fn general_quadrature(pair: &QuadraturePair, theta: f64) -> Signal {
    let (s, c) = theta.sin_cos();
    let samples = pair
        .q
        .samples()
        .iter()
        .zip(pair.p.samples())
        .map(|(q, p)| Complex64::new(c * q.re + s * p.re, 0.0))
        .collect();
    Signal::new(*pair.p.grid(), samples, Unit::Dimensionless).expect("same grid")
}

/// `n(t) = (q² + p²)/2` on every sample, with the pair's validity mask.
pub fn photon_flux(pair: &QuadraturePair) -> FluxTrace {
    let samples = pair
        .q
        .samples()
        .iter()
        .zip(pair.p.samples())
        .map(|(q, p)| Complex64::new(0.5 * (q.re * q.re + p.re * p.re), 0.0))
        .collect();
    let n = Signal::new(*pair.p.grid(), samples, Unit::Dimensionless).expect("same grid");
    FluxTrace { n, valid: pair.valid.clone() }
}

/// Inverse of [`quadratures_from_voltage`]: `V = ½√(Zh/2)·√|f|·(P − i·sgn f·Q)`.
pub fn voltage_from_quadratures(
    pair: &QuadraturePair,
    opts: &FieldOptions,
) -> Result<Checked<Signal, FieldWarning>, FieldError> {
    let c = 0.5 * (pair.consts.zh() / 2.0).sqrt();
    let from_p = apply_multiplier(&pair.p, opts.boundary, |f, _| Complex64::new(c * f.abs().sqrt(), 0.0))?;
    let from_q = apply_multiplier(&pair.q, opts.boundary, |f, s| Complex64::new(0.0, -c * s * f.abs().sqrt()))?;
    let samples = from_p
        .samples()
        .iter()
        .zip(from_q.samples())
        .map(|(a, b)| Complex64::new(a.re + b.re, 0.0))
        .collect();
    let v = Signal::new(*pair.p.grid(), samples, Unit::Volts)?;
    let mut warnings = Vec::new();
    if !pair.masks_agree {
        warnings.push(FieldWarning::MaskMismatch);
    }
    Ok(Checked { value: v, warnings })
}

/// Time-domain kernel form of the inverse at a single time:
/// `v(t) = −√(Zh/2)/(8π)·∫dt' [p(t−t') + sgn(t')·q(t−t')]/|t'|^{3/2}`,
/// with p and q evaluated by trigonometric interpolation of the (periodic)
/// pair. `period` is the repetition period used for the oscillatory tail.
pub fn voltage_kernel_at(pair: &QuadraturePair, t: f64, period: f64) -> Result<f64, FieldError> {
    let ip = TrigInterpolator::new(&pair.p, 1e-14);
    let iq = TrigInterpolator::new(&pair.q, 1e-14);
    let fp = |x: f64| ip.eval(x);
    let fq = |x: f64| iq.eval(x);
    let opts = OracleOptions {
        quad: QuadOptions { abs_tol: 1e-11, rel_tol: 1e-9, max_intervals: 4000 },
        window: 4.0 * period,
        tail: Tail::Oscillatory { period, cells: 24 },
    };
    let a = pv_quadrature_oracle(&OracleFunction::new(&fp), Kernel::FinitePartAbs32, t, &opts)?;
    let b = pv_quadrature_oracle(&OracleFunction::new(&fq), Kernel::SgnAbs32, t, &opts)?;
    Ok(-(pair.consts.zh() / 2.0).sqrt() / (8.0 * PI) * (a.value.re + b.value.re))
}

/// Discrete impulse response of the `v → p` map on the grid of `like`, centered at sample n/2.
pub fn quadrature_kernel(like: &Signal, consts: PhysConsts, opts: &FieldOptions) -> Result<Signal, FieldError> {
    let g = *like.grid();
    let mut x = alloc::vec![0.0; g.n()];
    x[g.n() / 2] = 1.0 / g.dt();
    let imp = Signal::from_real(g, &x, Unit::Volts)?;
    let even = half_order_convolve(&imp, Parity::Even, &opts.convolve())?;
    Ok(even.value.scaled(Complex64::new((2.0 / consts.zh()).sqrt(), 0.0)))
}

/// Share of the ℓ¹ mass of a kernel sampled on the grid lying at `t' < 0`
/// (relative to the center sample n/2).
pub fn acausal_mass_fraction(kernel: &Signal) -> f64 {
    let s = kernel.samples();
    let c = s.len() / 2;
    let total: f64 = s.iter().map(|x| x.norm()).sum();
    let past: f64 = s[..c].iter().map(|x| x.norm()).sum();
    if total == 0.0 {
        0.0
    } else {
        past / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::{hilbert_paper, TimeGrid};
    use proptest::prelude::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    const N: usize = 1024;
    const DT: f64 = 1.0 / 64.0;

    fn grid() -> TimeGrid {
        TimeGrid::new(N, DT, 0.0).unwrap()
    }

    fn bin_freq(k: usize) -> f64 {
        k as f64 / (N as f64 * DT)
    }

    fn tone(v0: f64, k: usize, phase: f64) -> Signal {
        let f0 = bin_freq(k);
        Signal::from_real_fn(grid(), Unit::Volts, |t| v0 * (2.0 * PI * f0 * t + phase).cos())
    }

    fn random_trace(rng: &mut StdRng) -> Signal {
        let comps: Vec<(usize, f64, f64)> =
            (0..8).map(|_| (rng.gen_range(40..200), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0 * PI))).collect();
        Signal::from_real_fn(grid(), Unit::Volts, |t| {
            comps.iter().map(|&(k, a, ph)| a * (2.0 * PI * bin_freq(k) * t + ph).cos()).sum()
        })
    }

    fn max_dev(a: &Signal, b: &Signal, mask: &[bool]) -> f64 {
        a.samples()
            .iter()
            .zip(b.samples())
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|((x, y), _)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn valid_sup(s: &Signal, mask: &[bool]) -> f64 {
        s.samples().iter().zip(mask).filter(|(_, &m)| m).map(|(x, _)| x.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn auto_boundary_choices() {
        assert_eq!(auto_boundary(&tone(1.0, 48, 0.0)), Boundary::Periodic);
        let g = grid();
        let mid = g.time(N / 2);
        let pulse = Signal::from_real_fn(g, Unit::Volts, |t| (-(t - mid).powi(2) / 0.5).exp() * (2.0 * PI * 6.0 * t).cos());
        assert_eq!(auto_boundary(&pulse), Boundary::ZeroPad(2));
        assert_eq!(auto_boundary(&Signal::zeros(g, Unit::Volts)), Boundary::ZeroPad(2));
    }

    #[test]
    fn monochromatic_quadratures() {
        let consts = PhysConsts::new(2.0, 0.5).unwrap();
        let (v0, k) = (1.7, 48);
        let f0 = bin_freq(k);
        let pair = quadratures_from_voltage(&tone(v0, k, 0.0), consts, &FieldOptions::periodic()).unwrap().value;
        let amp = v0 * (2.0 / (consts.zh() * f0)).sqrt();
        for (j, t) in grid().times().enumerate() {
            if !pair.valid[j] {
                continue;
            }
            assert!((pair.p.samples()[j].re - amp * (2.0 * PI * f0 * t).cos()).abs() < 1e-6 * amp);
            assert!((pair.q.samples()[j].re - amp * (2.0 * PI * f0 * t).sin()).abs() < 1e-6 * amp);
        }
    }

    #[test]
    fn zero_and_linearity() {
        let c = PhysConsts::NATURAL;
        let o = FieldOptions::default();
        let z = quadratures_from_voltage(&Signal::zeros(grid(), Unit::Volts), c, &o).unwrap().value;
        assert!(z.p.sup_norm() == 0.0 && z.q.sup_norm() == 0.0);
        let v = tone(1.0, 30, 0.3);
        let a = quadratures_from_voltage(&v, c, &o).unwrap().value;
        let b = quadratures_from_voltage(&v.scaled(Complex64::new(2.0, 0.0)), c, &o).unwrap().value;
        for (x, y) in a.p.samples().iter().zip(b.p.samples()) {
            assert_eq!(x.re * 2.0, y.re);
        }
        for (x, y) in a.q.samples().iter().zip(b.q.samples()) {
            assert_eq!(x.re * 2.0, y.re);
        }
    }

    #[test]
    fn hilbert_pair_sign_calibration() {
        // cos → sin under (1/π)·H; q of a cosine is +sin.
        let pair = quadratures_from_voltage(&tone(1.0, 20, 0.0), PhysConsts::NATURAL, &FieldOptions::periodic())
            .unwrap()
            .value;
        let h = hilbert_paper(&pair.p, &ConvolveOptions { boundary: Boundary::Periodic }).unwrap().value;
        let plus = max_dev(&h.scaled(Complex64::new(1.0 / PI, 0.0)), &pair.q, &pair.valid);
        let minus = max_dev(&h.scaled(Complex64::new(-1.0 / PI, 0.0)), &pair.q, &pair.valid);
        assert!(plus < minus);
        assert_eq!(HILBERT_PAIR_SIGN, 1.0);
    }

    #[test]
    fn hilbert_pair_on_random_traces() {
        let mut rng = StdRng::seed_from_u64(7);
        let conv = ConvolveOptions { boundary: Boundary::Periodic };
        for _ in 0..20 {
            let v = random_trace(&mut rng);
            let pair = quadratures_from_voltage(&v, PhysConsts::NATURAL, &FieldOptions::periodic()).unwrap().value;
            let h = hilbert_paper(&pair.p, &conv).unwrap().value;
            let dev = max_dev(&h.scaled(Complex64::new(HILBERT_PAIR_SIGN / PI, 0.0)), &pair.q, &pair.valid);
            assert!(dev <= 1e-9 * pair.p.sup_norm(), "{dev}");
        }
    }

    #[test]
    fn s_transform_identities() {
        let consts = PhysConsts::new(3.0, 0.7).unwrap();
        let r = (consts.zh() / 2.0).sqrt();
        let mut rng = StdRng::seed_from_u64(11);
        let v = random_trace(&mut rng);
        let o = FieldOptions::periodic();
        let (sp, sm) = s_transforms(&v, &o).unwrap().value;
        let pair = quadratures_from_voltage(&v, consts, &o).unwrap().value;
        let sum = Signal::new(*v.grid(), sp.samples().iter().zip(sm.samples()).map(|(a, b)| a + b).collect(), Unit::Dimensionless).unwrap();
        let diff = Signal::new(*v.grid(), sp.samples().iter().zip(sm.samples()).map(|(a, b)| a - b).collect(), Unit::Dimensionless).unwrap();
        let scale = pair.p.sup_norm() * r;
        assert!(max_dev(&sum, &pair.p.scaled(Complex64::new(r, 0.0)), &pair.valid) < 1e-8 * scale);
        assert!(max_dev(&diff, &pair.q.scaled(Complex64::new(r, 0.0)), &pair.valid) < 1e-8 * scale);
        // The half-sum is off by exactly a factor 2.
        let half = sum.scaled(Complex64::new(0.5, 0.0));
        assert!(max_dev(&half, &pair.p.scaled(Complex64::new(r, 0.0)), &pair.valid) > 0.4 * scale);
    }

    #[test]
    fn s_plus_is_the_quarter_turn_quadrature() {
        let consts = PhysConsts::NATURAL;
        let v = tone(1.0, 33, 0.4);
        let o = FieldOptions::periodic();
        let (sp, _) = s_transforms(&v, &o).unwrap().value;
        let pair = quadratures_from_voltage(&v, consts, &o).unwrap().value;
        let q45 = general_quadrature(&pair, PI / 4.0);
        let expect = q45.scaled(Complex64::new(consts.zh().sqrt() / 2.0, 0.0));
        assert!(max_dev(&sp, &expect, &pair.valid) < 1e-9 * sp.sup_norm());
    }

    #[test]
    fn general_quadrature_special_angles() {
        let v = tone(1.0, 25, 1.1);
        let pair = quadratures_from_voltage(&v, PhysConsts::NATURAL, &FieldOptions::periodic()).unwrap().value;
        assert_eq!(general_quadrature(&pair, 0.0).samples(), pair.q.samples());
        let p = general_quadrature(&pair, PI / 2.0);
        for (a, b) in p.samples().iter().zip(pair.p.samples()) {
            assert!((a.re - b.re).abs() <= 1e-15 * pair.p.sup_norm() + 1e-16 * pair.q.sup_norm());
        }
        let x = general_quadrature(&pair, 0.8);
        let y = general_quadrature(&pair, 0.8 + PI);
        for (a, b) in x.samples().iter().zip(y.samples()) {
            assert!((a.re + b.re).abs() < 1e-14);
        }
    }

    #[test]
    fn sinusoid_flux_is_constant() {
        let consts = PhysConsts::new(50.0, 0.1).unwrap();
        let (v0, k) = (0.8, 64);
        let f0 = bin_freq(k);
        let v = Signal::from_real_fn(grid(), Unit::Volts, |t| v0 * (2.0 * PI * f0 * t).sin());
        let pair = quadratures_from_voltage(&v, consts, &FieldOptions::periodic()).unwrap().value;
        let flux = photon_flux(&pair);
        let level = v0 * v0 / (consts.zh() * f0);
        for (x, &m) in flux.n.samples().iter().zip(&flux.valid) {
            if m {
                assert!((x.re - level).abs() < 1e-9 * level);
            }
        }
        // h·f0·n is twice the period-averaged power v²/Z.
        let mean_power = v0 * v0 / (2.0 * consts.z);
        assert!((consts.h * f0 * level - 2.0 * mean_power).abs() < 1e-12 * mean_power);
    }

    #[test]
    fn zero_flux() {
        let pair = quadratures_from_voltage(&Signal::zeros(grid(), Unit::Volts), PhysConsts::NATURAL, &FieldOptions::default())
            .unwrap()
            .value;
        assert!(photon_flux(&pair).n.sup_norm() == 0.0);
    }

    #[test]
    fn round_trip_is_identity() {
        let mut rng = StdRng::seed_from_u64(3);
        let consts = PhysConsts::new(50.0, 2.0).unwrap();
        let o = FieldOptions::periodic();
        for _ in 0..5 {
            let v = random_trace(&mut rng);
            let pair = quadratures_from_voltage(&v, consts, &o).unwrap().value;
            let back = voltage_from_quadratures(&pair, &o).unwrap().value;
            assert!(max_dev(&back, &v, &pair.valid) < 1e-8 * v.sup_norm().max(1.0));
        }
    }

    #[test]
    fn mismatched_masks_warn() {
        let v = tone(1.0, 40, 0.0);
        let pair = quadratures_from_voltage(&v, PhysConsts::NATURAL, &FieldOptions::periodic()).unwrap().value;
        let mut other = pair.valid.clone();
        other[N / 2] = false;
        let mixed = QuadraturePair::from_parts(pair.p.clone(), pair.q.clone(), pair.consts, &pair.valid, &other).unwrap();
        let out = voltage_from_quadratures(&mixed, &FieldOptions::periodic()).unwrap();
        assert!(out.warnings.contains(&FieldWarning::MaskMismatch));
        assert!(!mixed.valid[N / 2]);
    }

    #[test]
    fn time_domain_kernel_matches_inverse() {
        let consts = PhysConsts::new(1.5, 1.0).unwrap();
        let (v0, k) = (1.3, 16);
        let f0 = bin_freq(k);
        let v = tone(v0, k, 0.25);
        let pair = quadratures_from_voltage(&v, consts, &FieldOptions::periodic()).unwrap().value;
        for i in 0..10 {
            let j = N / 5 + i * 53;
            let t = grid().time(j);
            let direct = voltage_kernel_at(&pair, t, 1.0 / f0).unwrap();
            let expect = v.samples()[j].re;
            assert!((direct - expect).abs() < 1e-4 * v0, "t={t}: {direct} vs {expect}");
        }
    }

    #[test]
    fn conversion_is_not_causal() {
        let g = TimeGrid::centered(N, DT).unwrap();
        let like = Signal::zeros(g, Unit::Volts);
        let k = quadrature_kernel(&like, PhysConsts::NATURAL, &FieldOptions::default()).unwrap();
        assert!(acausal_mass_fraction(&k) >= 0.25);
    }

    #[test]
    fn dc_input_is_flagged() {
        let v = Signal::from_real_fn(grid(), Unit::Volts, |t| 1.0 + (2.0 * PI * bin_freq(10) * t).cos());
        let out = quadratures_from_voltage(&v, PhysConsts::NATURAL, &FieldOptions::periodic()).unwrap();
        assert!(out.warnings.iter().any(|w| matches!(w, FieldWarning::Input(Warning::DcComponent { .. }))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn flux_is_non_negative(seed in any::<u64>()) {
            let mut rng = StdRng::seed_from_u64(seed);
            let v = random_trace(&mut rng);
            let pair = quadratures_from_voltage(&v, PhysConsts::NATURAL, &FieldOptions::default()).unwrap().value;
            let flux = photon_flux(&pair);
            let sup = valid_sup(&flux.n, &flux.valid);
            for (x, &m) in flux.n.samples().iter().zip(&flux.valid) {
                if m { prop_assert!(x.re >= -1e-9 * sup); }
            }
        }

        #[test]
        fn round_trip_random(seed in any::<u64>()) {
            let mut rng = StdRng::seed_from_u64(seed);
            let v = random_trace(&mut rng);
            let o = FieldOptions::periodic();
            let pair = quadratures_from_voltage(&v, PhysConsts::NATURAL, &o).unwrap().value;
            let back = voltage_from_quadratures(&pair, &o).unwrap().value;
            prop_assert!(max_dev(&back, &v, &pair.valid) < 1e-8 * v.sup_norm().max(1.0));
        }
    }
}
