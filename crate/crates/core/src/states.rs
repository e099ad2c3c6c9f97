//! Voltage moments, energy and arrival statistics of vacuum, Fock and coherent
//! states on one packet mode.
//!
//! Every reported moment is vacuum-subtracted and normal-ordered. The variance of
//! θ is never derived by hand; it comes from the matrix oracle in [`crate::opalgebra`].

use crate::opalgebra::{
    coherent_packet_state, fock_packet_state, theta_variance_oracle, AlgebraError, ModeSystem, PacketModes,
    ThetaMoments,
};
use crate::packet::{
    chi_finite_part_at, compute_chi, positive_projector_weight, ChiFunction, ChiOptions, PacketError, PacketMode,
    PhotonPacket, Route,
};
use crate::transforms::{forward_fourier, Signal, TimeGrid, TransformError, Unit};
use crate::PhysConsts;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Relative log-slope `d⟨H⟩/d(ln f_max) / ⟨H⟩` above which the energy is flagged as cutoff-dependent.
pub const LOG_SLOPE_FLAG: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StateError {
    #[error("Fock photon number must be at least 1")]
    FockZero,
    #[error("coherent amplitude must be finite")]
    Amplitude,
    #[error(transparent)]
    Packet(#[from] PacketError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateKind {
    Vacuum,
    Fock { n: u32 },
    Coherent { alpha: Complex64 },
}

impl StateKind {
    pub fn validate(&self) -> Result<(), StateError> {
        match *self {
            StateKind::Fock { n: 0 } => Err(StateError::FockZero),
            StateKind::Coherent { alpha } if !(alpha.re.is_finite() && alpha.im.is_finite()) => Err(StateError::Amplitude),
            _ => Ok(()),
        }
    }

    /// Normal-ordered `⟨N⟩` of the packet mode.
    pub fn n_mean(&self) -> f64 {
        match *self {
            StateKind::Vacuum => 0.0,
            StateKind::Fock { n } => n as f64,
            StateKind::Coherent { alpha } => alpha.norm_sqr(),
        }
    }
}

/// A state of the packet mode `A = ∫dt φ*(t−τ) a(t)`.
#[derive(Clone, Copy, Debug)]
pub struct StateSpec<'a> {
    pub kind: StateKind,
    pub mode: &'a PhotonPacket,
}

impl<'a> StateSpec<'a> {
    pub fn new(kind: StateKind, mode: &'a PhotonPacket) -> Result<Self, StateError> {
        kind.validate()?;
        Ok(StateSpec { kind, mode })
    }
}

/// `⟨v(t)⟩` from `χ(t−τ)`: zero for vacuum and Fock, `(1/4π)√(Zh/2)·Im[α·χ*]` for coherent.
pub fn mean_voltage_at(kind: StateKind, chi: Complex64, consts: PhysConsts) -> f64 {
    match kind {
        StateKind::Vacuum | StateKind::Fock { .. } => 0.0,
        StateKind::Coherent { alpha } => (consts.zh() / 2.0).sqrt() / (4.0 * PI) * (alpha * chi.conj()).im,
    }
}

/// Vacuum-subtracted `⟨v(t₁)v(t₂)⟩` from `χ(t₁−τ)` and `χ(t₂−τ)`.
pub fn covariance_from_chi(kind: StateKind, chi1: Complex64, chi2: Complex64, consts: PhysConsts) -> f64 {
    match kind {
        StateKind::Vacuum => 0.0,
        StateKind::Fock { n } => consts.zh() * n as f64 / (64.0 * PI * PI) * (chi1 * chi2.conj()).re,
        StateKind::Coherent { alpha } => {
            consts.zh() / (32.0 * PI * PI) * (alpha * chi1.conj()).im * (alpha * chi2.conj()).im
        }
    }
}

fn chi_at(state: &StateSpec, t: f64, opts: &ChiOptions) -> Result<Complex64, StateError> {
    let p = state.mode;
    let scale = match opts.mode {
        PacketMode::Idealized => 1.0,
        PacketMode::BandLimited => 1.0 / crate::packet::positive_frequency_weight(p).sqrt(),
    };
    Ok(chi_finite_part_at(p, t - p.tau(), &opts.quad)? * scale)
}

/// Vacuum-subtracted two-time covariance at arbitrary lab times, with χ from finite-part quadrature.
pub fn voltage_covariance(state: &StateSpec, t1: f64, t2: f64, consts: PhysConsts, opts: &ChiOptions) -> Result<f64, StateError> {
    state.kind.validate()?;
    if state.kind == StateKind::Vacuum {
        return Ok(0.0);
    }
    let c1 = chi_at(state, t1, opts)?;
    let c2 = if t2 == t1 { c1 } else { chi_at(state, t2, opts)? };
    Ok(covariance_from_chi(state.kind, c1, c2, consts))
}

/// `⟨v(t)⟩` at one lab time, with χ from finite-part quadrature.
pub fn mean_voltage_point(state: &StateSpec, t: f64, consts: PhysConsts, opts: &ChiOptions) -> Result<f64, StateError> {
    state.kind.validate()?;
    match state.kind {
        StateKind::Coherent { .. } => Ok(mean_voltage_at(state.kind, chi_at(state, t, opts)?, consts)),
        _ => Ok(0.0),
    }
}

/// Band-limited vacuum correlator `(Zh/2)·∫₀^F f·cos(2πfΔ) df`, `F = f_max` of the grid.
pub fn vacuum_covariance(grid: &TimeGrid, delta: f64, consts: PhysConsts) -> f64 {
    vacuum_covariance_band(grid.f_max(), delta, consts)
}

/// As [`vacuum_covariance`] with an explicit cutoff.
pub fn vacuum_covariance_band(f_max: f64, delta: f64, consts: PhysConsts) -> f64 {
    let f = f_max;
    let b = 2.0 * PI * delta.abs();
    let x = b * f;
    let integral = if x < 1e-2 {
        // Σ (−1)^n x^{2n} F²/((2n)!(2n+2))
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 0..8 {
            let k = 2 * n;
            if n > 0 {
                term *= -x * x / ((k - 1) as f64 * k as f64);
            }
            sum += term / (k + 2) as f64;
        }
        sum * f * f
    } else {
        f * x.sin() / b + (x.cos() - 1.0) / (b * b)
    };
    0.5 * consts.zh() * integral
}

/// Provenance of a [`MomentReport`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentMeta {
    pub mode: PacketMode,
    pub route: Route,
    pub positive_weight: f64,
    pub consts: PhysConsts,
    /// Cutoff of the vacuum baseline.
    pub f_max: f64,
    pub tau: f64,
}

/// Mean and vacuum-subtracted variance traces on the lab-time grid `t = τ + t_packet`.
#[derive(Clone, Debug)]
pub struct MomentReport {
    pub grid: TimeGrid,
    pub mean_v: Signal,
    pub var_v_subtracted: Signal,
    pub vac_var: Signal,
    pub meta: MomentMeta,
    /// Samples where χ diverges; both traces hold NaN there.
    pub singular: Vec<usize>,
}

impl MomentReport {
    pub fn from_chi(kind: StateKind, chi: &ChiFunction, tau: f64, consts: PhysConsts) -> Result<Self, StateError> {
        kind.validate()?;
        let grid = chi.chi.grid().shifted(tau);
        let samples = chi.chi.samples();
        let mean: Vec<f64> = samples.iter().map(|&c| mean_voltage_at(kind, c, consts)).collect();
        let var: Vec<f64> = samples.iter().map(|&c| covariance_from_chi(kind, c, c, consts)).collect();
        let vac = vacuum_covariance(&grid, 0.0, consts);
        Ok(MomentReport {
            grid,
            mean_v: Signal::from_real(grid, &mean, Unit::Volts)?,
            var_v_subtracted: Signal::from_real(grid, &var, Unit::VoltsSquared)?,
            vac_var: Signal::from_real(grid, &vec![vac; grid.n()], Unit::VoltsSquared)?,
            meta: MomentMeta {
                mode: chi.mode,
                route: chi.route,
                positive_weight: chi.positive_weight,
                consts,
                f_max: grid.f_max(),
                tau,
            },
            singular: chi.singular.clone(),
        })
    }

    /// Connected variance minus vacuum: `var_subtracted − mean²`.
    pub fn connected_excess(&self) -> Vec<f64> {
        self.var_v_subtracted
            .samples()
            .iter()
            .zip(self.mean_v.samples())
            .map(|(v, m)| v.re - m.re * m.re)
            .collect()
    }
}

/// Computes χ by `route` and evaluates the moment traces for `state`.
pub fn moments(state: &StateSpec, route: Route, opts: &ChiOptions, consts: PhysConsts) -> Result<MomentReport, StateError> {
    state.kind.validate()?;
    let chi = compute_chi(state.mode, route, opts)?;
    MomentReport::from_chi(state.kind, &chi, state.mode.tau(), consts)
}

/// Trace of `⟨v(t)⟩` on the packet's lab-time grid.
pub fn mean_voltage(state: &StateSpec, route: Route, opts: &ChiOptions, consts: PhysConsts) -> Result<Signal, StateError> {
    state.kind.validate()?;
    let grid = state.mode.grid().shifted(state.mode.tau());
    match state.kind {
        // Zero by construction, without evaluating χ.
        StateKind::Vacuum | StateKind::Fock { .. } => Ok(Signal::zeros(grid, Unit::Volts)),
        StateKind::Coherent { .. } => Ok(moments(state, route, opts, consts)?.mean_v),
    }
}

/// Normal-ordered, vacuum-subtracted `⟨H⟩` on the packet grid's band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyReport {
    pub energy: f64,
    pub n_mean: f64,
    /// `∫_{f>0} f|φ~|² df`.
    pub mean_frequency: f64,
    pub f_max: f64,
    /// `d⟨H⟩/d(ln f_max) = ⟨N⟩·h·f_max²·|φ~(f_max)|²`, with φ~ from [`PhotonPacket::spectrum_at`].
    pub log_slope: f64,
    /// Set when the relative log-slope exceeds [`LOG_SLOPE_FLAG`].
    pub cutoff_dependent: bool,
}

pub fn energy_mean(state: &StateSpec, consts: PhysConsts) -> Result<EnergyReport, StateError> {
    state.kind.validate()?;
    let spec = forward_fourier(state.mode.phi());
    let g = *spec.grid();
    let df = g.df();
    let mut fbar = 0.0;
    for (k, b) in spec.bins().iter().enumerate() {
        fbar += positive_projector_weight(&g, k) * g.freq(k) * b.norm_sqr();
    }
    fbar *= df;
    let n = state.kind.n_mean();
    let f_max = g.f_max();
    let edge = state.mode.spectrum_at(f_max).norm_sqr();
    let log_slope = n * consts.h * f_max * f_max * edge;
    let energy = n * consts.h * fbar;
    let cutoff_dependent = energy > 0.0 && log_slope > LOG_SLOPE_FLAG * energy;
    Ok(EnergyReport { energy, n_mean: n, mean_frequency: fbar, f_max, log_slope, cutoff_dependent })
}

/// Matrix-oracle moments of θ attached to an [`ArrivalReport`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleTheta {
    pub moments: ThetaMoments,
    pub m: usize,
    pub n_max: usize,
    pub delta_f: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArrivalReport {
    /// `τ + ∫t|φ|²dt`.
    pub mean_arrival: f64,
    /// `√(∫t²|φ|² − (∫t|φ|²)²)`.
    pub intra_pulse_spread: f64,
    /// Normal-ordered `⟨θ⟩ = ⟨N⟩·mean_arrival`.
    pub theta_mean: f64,
    pub n_mean: f64,
    /// Present only when evaluated through the matrix oracle.
    pub theta_oracle: Option<OracleTheta>,
}

impl ArrivalReport {
    pub fn theta_variance(&self) -> Option<f64> {
        self.theta_oracle.map(|o| o.moments.theta_variance)
    }
}

pub fn arrival_stats(state: &StateSpec) -> Result<ArrivalReport, StateError> {
    state.kind.validate()?;
    let p = state.mode;
    let mean_arrival = p.tau() + p.centroid();
    let n = state.kind.n_mean();
    Ok(ArrivalReport {
        mean_arrival,
        intra_pulse_spread: p.spread(),
        theta_mean: n * mean_arrival,
        n_mean: n,
        theta_oracle: None,
    })
}

/// How the packet is placed on a [`ModeSystem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Projection {
    /// `c_k = √Δf·φ~(f_k)` as sampled.
    #[default]
    Resampled,
    /// Sampled coefficients renormalized to unit weight.
    Normalized,
}

/// State vector of `kind` on `sys` (packet-local time; τ is not represented).
pub fn realize_state(kind: StateKind, packet: &PhotonPacket, sys: &ModeSystem, projection: Projection) -> Result<Vec<Complex64>, StateError> {
    kind.validate()?;
    let mut modes = PacketModes::from_packet(packet, sys);
    if projection == Projection::Normalized {
        modes = modes.normalized();
    }
    Ok(match kind {
        StateKind::Vacuum => {
            let mut v = vec![Complex64::new(0.0, 0.0); sys.dim()];
            v[0] = Complex64::new(1.0, 0.0);
            v
        }
        StateKind::Fock { n } => fock_packet_state(sys, &modes, n as usize)?,
        StateKind::Coherent { alpha } => coherent_packet_state(sys, &modes, alpha)?,
    })
}

/// Arrival statistics with θ moments from the matrix oracle on `sys`.
pub fn arrival_stats_with_oracle(
    state: &StateSpec,
    sys: &ModeSystem,
    projection: Projection,
    consts: PhysConsts,
) -> Result<ArrivalReport, StateError> {
    let mut r = arrival_stats(state)?;
    let psi = realize_state(state.kind, state.mode, sys, projection)?;
    let moments = theta_variance_oracle(sys, consts, &psi)?;
    r.theta_oracle = Some(OracleTheta { moments, m: sys.m(), n_max: sys.n_max(), delta_f: sys.delta_f() });
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UncertaintyReport {
    /// `√(⟨Δθ²⟩⟨ΔH²⟩)`.
    pub lhs: f64,
    /// `(ħ/2)⟨N⟩`, normal-ordered.
    pub bound: f64,
    pub margin: f64,
    /// Margin against the symmetric-ordered `⟨N⟩` (includes `M/2`).
    pub margin_symmetric: f64,
    pub moments: ThetaMoments,
    /// `⟨ΔH²⟩` below `(10⁻³·h·Δf)²`: the discrete identity degrades on such states.
    pub eigenstate_like: bool,
}

pub fn uncertainty_from_moments(mo: &ThetaMoments, consts: PhysConsts, delta_f: f64) -> UncertaintyReport {
    let lhs = (mo.theta_variance * mo.h_variance).sqrt();
    let half = 0.5 * consts.hbar();
    let tiny = 1e-3 * consts.h * delta_f;
    UncertaintyReport {
        lhs,
        bound: half * mo.n_normal,
        margin: lhs - half * mo.n_normal,
        margin_symmetric: lhs - half * mo.n_symmetric,
        moments: *mo,
        eigenstate_like: mo.h_variance < tiny * tiny,
    }
}

/// `√(⟨Δθ²⟩⟨ΔH²⟩) − (ħ/2)⟨N⟩` for a state vector on `sys`.
pub fn uncertainty_margin(sys: &ModeSystem, consts: PhysConsts, psi: &[Complex64]) -> Result<UncertaintyReport, StateError> {
    let mo = theta_variance_oracle(sys, consts, psi)?;
    Ok(uncertainty_from_moments(&mo, consts, sys.delta_f()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalgebra::single_bin_state;
    use crate::packet::{make_packet, Shape};

    const NAT: PhysConsts = PhysConsts::NATURAL;

    fn exp_packet() -> PhotonPacket {
        make_packet(Shape::ExponentialDecay { sigma_t: 1.0 }, TimeGrid::new(1 << 14, 0.005, -8.0).unwrap()).unwrap()
    }

    fn gauss(sigma: f64, f0: f64, center: f64, n: usize, dt: f64) -> PhotonPacket {
        make_packet(Shape::Gaussian { sigma, f0, center }, TimeGrid::centered(n, dt).unwrap()).unwrap()
    }

    fn band_gauss(f0: f64, power_std_bins: f64, center: f64) -> PhotonPacket {
        gauss(1.0 / (4.0 * PI * power_std_bins), f0, center, 512, 0.01)
    }

    #[test]
    fn invalid_states_rejected() {
        let p = band_gauss(3.0, 0.75, 0.0);
        assert_eq!(StateSpec::new(StateKind::Fock { n: 0 }, &p).unwrap_err(), StateError::FockZero);
        let bad = StateKind::Coherent { alpha: Complex64::new(f64::NAN, 0.0) };
        assert_eq!(StateSpec::new(bad, &p).unwrap_err(), StateError::Amplitude);
    }

    #[test]
    fn fock_and_vacuum_means_are_zero() {
        let p = exp_packet();
        for kind in [StateKind::Vacuum, StateKind::Fock { n: 1 }, StateKind::Fock { n: 4 }] {
            let s = StateSpec::new(kind, &p).unwrap();
            let m = mean_voltage(&s, Route::SPECTRAL_DEFAULT, &ChiOptions::default(), NAT).unwrap();
            assert!(m.samples().iter().all(|v| *v == Complex64::new(0.0, 0.0)));
        }
    }

    #[test]
    fn coherent_alpha_one_and_i_are_quadrature_projections() {
        let p = gauss(0.5, 2.0, 0.0, 1024, 0.02);
        let opts = ChiOptions::default();
        let chi = compute_chi(&p, Route::SPECTRAL_DEFAULT, &opts).unwrap();
        let one = MomentReport::from_chi(StateKind::Coherent { alpha: Complex64::new(1.0, 0.0) }, &chi, 0.0, NAT).unwrap();
        let i = MomentReport::from_chi(StateKind::Coherent { alpha: Complex64::new(0.0, 1.0) }, &chi, 0.0, NAT).unwrap();
        let k = (NAT.zh() / 2.0).sqrt() / (4.0 * PI);
        for (j, c) in chi.chi.samples().iter().enumerate() {
            assert!((one.mean_v.samples()[j].re - k * c.conj().im).abs() < 1e-14);
            assert!((i.mean_v.samples()[j].re - k * c.re).abs() < 1e-14);
        }
    }

    #[test]
    fn coherent_excess_vanishes() {
        let p = exp_packet();
        let chi = compute_chi(&p, Route::SPECTRAL_DEFAULT, &ChiOptions::default()).unwrap();
        for alpha in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.3, -0.7)] {
            let r = MomentReport::from_chi(StateKind::Coherent { alpha }, &chi, 0.0, NAT).unwrap();
            let vac = r.vac_var.samples()[0].re;
            let worst = r.connected_excess().iter().fold(0.0f64, |a, &x| a.max(x.abs()));
            assert!(worst <= 1e-9 * vac, "{worst:e}");
        }
    }

    #[test]
    fn fock_variance_linear_in_n() {
        let p = gauss(0.4, 3.0, 0.0, 1024, 0.01);
        let chi = compute_chi(&p, Route::SPECTRAL_DEFAULT, &ChiOptions::default()).unwrap();
        let one = MomentReport::from_chi(StateKind::Fock { n: 1 }, &chi, 0.0, NAT).unwrap();
        let two = MomentReport::from_chi(StateKind::Fock { n: 2 }, &chi, 0.0, NAT).unwrap();
        for (a, b) in one.var_v_subtracted.samples().iter().zip(two.var_v_subtracted.samples()) {
            assert!((b.re - 2.0 * a.re).abs() <= 1e-12 * b.re.abs().max(1e-300));
            assert!(a.re >= 0.0);
        }
    }

    #[test]
    fn fock_variance_near_onset_follows_inverse_law() {
        let p = exp_packet();
        let s = StateSpec::new(StateKind::Fock { n: 1 }, &p).unwrap();
        let v = voltage_covariance(&s, 0.01, 0.01, NAT, &ChiOptions::default()).unwrap();
        let law = NAT.z * NAT.hbar() / (4.0 * PI * 0.01);
        assert!((v / law - 1.0).abs() < 0.1, "{}", v / law);
    }

    #[test]
    fn off_grid_covariance_matches_chi_product() {
        let p = gauss(0.5, 2.0, 0.0, 1024, 0.02).with_tau(1.5);
        let alpha = Complex64::new(0.3, -0.7);
        let s = StateSpec::new(StateKind::Coherent { alpha }, &p).unwrap();
        let opts = ChiOptions::default();
        let (t1, t2) = (1.537, 1.21);
        let c = voltage_covariance(&s, t1, t2, NAT, &opts).unwrap();
        let m1 = mean_voltage_point(&s, t1, NAT, &opts).unwrap();
        let m2 = mean_voltage_point(&s, t2, NAT, &opts).unwrap();
        assert!((c - m1 * m2).abs() <= 1e-12 * c.abs().max(1e-30));
        assert_eq!(voltage_covariance(&StateSpec::new(StateKind::Vacuum, &p).unwrap(), t1, t2, NAT, &opts).unwrap(), 0.0);
    }

    #[test]
    fn vacuum_covariance_examples() {
        let g = TimeGrid::centered(256, 0.05).unwrap();
        let f = g.f_max();
        assert!((vacuum_covariance(&g, 0.0, NAT) - 0.5 * f * f / 2.0).abs() < 1e-12);
        for d in [1e-5, 0.003, 0.02, 0.3, 2.0] {
            assert_eq!(vacuum_covariance(&g, d, NAT), vacuum_covariance(&g, -d, NAT));
        }
        // Δ = 1/F: ∫₀^F f cos(2πf/F) df = 0.
        assert!(vacuum_covariance(&g, 1.0 / f, NAT).abs() < 1e-12);
        // Independent midpoint quadrature.
        let d = 0.0137;
        let n = 200_000;
        let h = f / n as f64;
        let q: f64 = (0..n).map(|i| (i as f64 + 0.5) * h).map(|x| x * (2.0 * PI * x * d).cos()).sum::<f64>() * h * 0.5;
        assert!((vacuum_covariance(&g, d, NAT) - q).abs() < 1e-7 * q.abs().max(1.0));
    }

    #[test]
    fn vacuum_covariance_series_branch_is_continuous() {
        let f = 10.0;
        let b = |d: f64| vacuum_covariance_band(f, d, NAT);
        let d0 = 1e-2 / (2.0 * PI * f);
        assert!((b(d0 * (1.0 - 1e-9)) - b(d0 * (1.0 + 1e-9))).abs() < 1e-9);
    }

    #[test]
    fn energy_examples() {
        let sigma = 0.5;
        let f0 = 10.0 / sigma;
        let p = gauss(sigma, f0, 0.0, 4096, 0.004);
        let e1 = energy_mean(&StateSpec::new(StateKind::Fock { n: 1 }, &p).unwrap(), NAT).unwrap();
        assert!((e1.energy / (NAT.h * f0) - 1.0).abs() < 0.01);
        assert!(!e1.cutoff_dependent);
        let e3 = energy_mean(&StateSpec::new(StateKind::Fock { n: 3 }, &p).unwrap(), NAT).unwrap();
        assert!((e3.energy - 3.0 * e1.energy).abs() < 1e-12 * e3.energy);
        assert_eq!(energy_mean(&StateSpec::new(StateKind::Vacuum, &p).unwrap(), NAT).unwrap().energy, 0.0);
    }

    #[test]
    fn exponential_energy_is_flagged() {
        let p = exp_packet();
        let e = energy_mean(&StateSpec::new(StateKind::Fock { n: 1 }, &p).unwrap(), NAT).unwrap();
        assert!(e.cutoff_dependent);
        // |φ~(F)|² → 1/(4π²F²σ) so the slope tends to h/(4π²σ).
        let expected = NAT.h / (4.0 * PI * PI);
        assert!((e.log_slope / expected - 1.0).abs() < 0.05, "{}", e.log_slope / expected);
    }

    #[test]
    fn arrival_examples() {
        let p = make_packet(Shape::ExponentialDecay { sigma_t: 1.0 }, TimeGrid::new(1 << 16, 0.001, -8.0).unwrap()).unwrap().with_tau(2.0);
        let r = arrival_stats(&StateSpec::new(StateKind::Fock { n: 1 }, &p).unwrap()).unwrap();
        assert!((r.mean_arrival - 3.0).abs() < 1e-3);
        assert!((r.intra_pulse_spread - 1.0).abs() < 1e-2);
        assert!(r.theta_variance().is_none());
        let g = gauss(0.7, 1.0, 0.0, 1024, 0.02).with_tau(-1.25);
        let r = arrival_stats(&StateSpec::new(StateKind::Fock { n: 2 }, &g).unwrap()).unwrap();
        assert!((r.mean_arrival + 1.25).abs() < 1e-12);
        assert!((r.theta_mean - 2.0 * r.mean_arrival).abs() < 1e-12);
    }

    #[test]
    fn coherent_theta_mean_matches_oracle() {
        let sys = ModeSystem::new(4, 7, 1.0).unwrap();
        let p = band_gauss(2.0, 1.2, 0.1);
        let alpha = Complex64::new(2.0, 0.0);
        let s = StateSpec::new(StateKind::Coherent { alpha }, &p).unwrap();
        let r = arrival_stats_with_oracle(&s, &sys, Projection::Normalized, NAT).unwrap();
        let o = r.theta_oracle.unwrap().moments;
        assert!(o.cutoff_weight < 1e-3);
        // Discrete centroid of the band-projected packet.
        let c = PacketModes::from_packet(&p, &sys).normalized().c;
        let rep = sys.single_particle(NAT);
        let tc: f64 = c.iter().zip(rep.apply_t(&c)).map(|(a, b)| (a.conj() * b).re).sum();
        assert!((o.theta_mean_normal - 4.0 * tc).abs() < 4e-3, "{} vs {}", o.theta_mean_normal, 4.0 * tc);
        assert!((o.n_normal - 4.0).abs() < 1e-2);
        assert!((o.theta_mean_normal - r.theta_mean).abs() < 4.0 * sys.band().delta_t());
    }

    #[test]
    fn uncertainty_coherent_m6() {
        let sys = ModeSystem::new(6, 3, 1.0).unwrap();
        let p = band_gauss(3.0, 0.75, 0.0);
        let psi = realize_state(StateKind::Coherent { alpha: Complex64::new(0.4, 0.2) }, &p, &sys, Projection::Resampled).unwrap();
        let u = uncertainty_margin(&sys, NAT, &psi).unwrap();
        assert!(u.margin >= 0.0, "{:e}", u.margin);
        assert!(!u.eigenstate_like);
    }

    #[test]
    fn uncertainty_scaling_with_alpha() {
        let sys = ModeSystem::new(4, 3, 1.0).unwrap();
        let p = band_gauss(2.0, 0.75, 0.0);
        let a = Complex64::new(0.2, 0.1);
        let u1 = uncertainty_margin(&sys, NAT, &realize_state(StateKind::Coherent { alpha: a }, &p, &sys, Projection::Normalized).unwrap()).unwrap();
        let u2 = uncertainty_margin(&sys, NAT, &realize_state(StateKind::Coherent { alpha: a * 2.0 }, &p, &sys, Projection::Normalized).unwrap()).unwrap();
        let ratio = u2.moments.n_normal / u1.moments.n_normal;
        assert!((ratio - 4.0).abs() < 1e-3, "{ratio}");
        assert!((u2.bound / u1.bound - ratio).abs() < 1e-12);
        assert!(u1.margin >= 0.0 && u2.margin >= 0.0);
    }

    #[test]
    fn uncertainty_vacuum_and_eigenstate_reported() {
        let sys = ModeSystem::new(4, 2, 1.0).unwrap();
        let p = band_gauss(2.0, 0.75, 0.0);
        let vac = realize_state(StateKind::Vacuum, &p, &sys, Projection::Resampled).unwrap();
        let u = uncertainty_margin(&sys, NAT, &vac).unwrap();
        assert_eq!(u.bound, 0.0);
        assert!(u.lhs.is_finite());
        let e = uncertainty_margin(&sys, NAT, &single_bin_state(&sys, 1)).unwrap();
        assert!(e.eigenstate_like);
        assert!(e.margin < 0.0);
    }

    #[test]
    fn refinement_changes_fock_variance_little() {
        let coarse = gauss(0.4, 2.0, 0.0, 1024, 0.01);
        let fine = gauss(0.4, 2.0, 0.0, 2048, 0.005);
        let opts = ChiOptions::default();
        let a = moments(&StateSpec::new(StateKind::Fock { n: 1 }, &coarse).unwrap(), Route::SPECTRAL_DEFAULT, &opts, NAT).unwrap();
        let b = moments(&StateSpec::new(StateKind::Fock { n: 1 }, &fine).unwrap(), Route::SPECTRAL_DEFAULT, &opts, NAT).unwrap();
        let peak = a.var_v_subtracted.samples().iter().fold(0.0f64, |m, v| m.max(v.re));
        for j in (0..1024).step_by(7) {
            let va = a.var_v_subtracted.samples()[j].re;
            let vb = b.var_v_subtracted.samples()[2 * j].re;
            if va > 1e-3 * peak {
                assert!((va - vb).abs() < 5e-3 * va, "{j}: {va} {vb}");
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn chi() -> impl Strategy<Value = Complex64> {
            (-50.0f64..50.0, -50.0f64..50.0).prop_map(|(a, b)| Complex64::new(a, b))
        }

        proptest! {
            #[test]
            fn coherent_covariance_is_product_of_means(ar in -3.0f64..3.0, ai in -3.0f64..3.0, c1 in chi(), c2 in chi()) {
                let kind = StateKind::Coherent { alpha: Complex64::new(ar, ai) };
                let cov = covariance_from_chi(kind, c1, c2, NAT);
                let prod = mean_voltage_at(kind, c1, NAT) * mean_voltage_at(kind, c2, NAT);
                prop_assert!((cov - prod).abs() <= 1e-12 * (1.0 + prod.abs()));
            }

            #[test]
            fn fock_covariance_linear_and_psd(n in 1u32..20, c1 in chi(), c2 in chi()) {
                let one = covariance_from_chi(StateKind::Fock { n: 1 }, c1, c2, NAT);
                let kind = StateKind::Fock { n };
                let many = covariance_from_chi(kind, c1, c2, NAT);
                let diag = covariance_from_chi(kind, c1, c1, NAT);
                prop_assert!((many - n as f64 * one).abs() <= 1e-12 * many.abs().max(1e-300));
                prop_assert!(diag >= 0.0);
            }

            #[test]
            fn coherent_mean_bilinear(ar in -3.0f64..3.0, ai in -3.0f64..3.0, s in -4.0f64..4.0, c in chi()) {
                let a = Complex64::new(ar, ai);
                let m = mean_voltage_at(StateKind::Coherent { alpha: a }, c, NAT);
                let ms = mean_voltage_at(StateKind::Coherent { alpha: a * s }, c, NAT);
                prop_assert!((ms - s * m).abs() <= 1e-12 * (1.0 + ms.abs()));
            }

            #[test]
            fn vacuum_covariance_even_and_bounded(f in 0.5f64..100.0, d in -3.0f64..3.0) {
                let v = vacuum_covariance_band(f, d, NAT);
                prop_assert_eq!(v, vacuum_covariance_band(f, -d, NAT));
                prop_assert!(v <= vacuum_covariance_band(f, 0.0, NAT) * (1.0 + 1e-12));
            }
        }
    }
}
