//! Verification registry behind `tdqo verify`.
//!
//! Every check records a measured value, its threshold and a comparison.
//! Informational checks are reported but never affect the exit status.

use crate::commands::trace_moments;
use crate::config::{PacketField, RunConfig};
use crate::error::CliError;
use crate::VERSION;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::time::Instant;
use tdqo_core::fieldconv::{
    photon_flux, quadratures_from_voltage, voltage_from_quadratures, FieldOptions, HILBERT_PAIR_SIGN,
};
use tdqo_core::opalgebra::{
    discrete_commutator_suite, fock_commutator_check, packet_bosonic_check, single_bin_state, single_particle_check,
    theta_variance_oracle, ModeSystem, PacketModes, SingleParticleRep,
};
use tdqo_core::packet::{
    chi_closed_form_exponential, chi_closed_form_exponential_as_printed, chi_finite_part_at, compute_chi, make_packet,
    positive_frequency_weight, psi_spectral, ChiOptions, PhotonPacket, Route, Shape,
};
use tdqo_core::states::{
    arrival_stats, energy_mean, mean_voltage, realize_state, uncertainty_from_moments,
    MomentReport, Projection, StateKind, StateSpec,
};
use tdqo_core::transforms::table::{table_check, TABLE_TOLERANCE};
use tdqo_core::transforms::{
    forward_fourier, hilbert_paper, inverse_fourier, Boundary, ConvolveOptions, Signal, TimeGrid, Unit,
};
use tdqo_core::{Complex64, PhysConsts};

const NAT: PhysConsts = PhysConsts::NATURAL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Transforms,
    Packet,
    States,
    Fieldconv,
    Algebra,
}

impl std::str::FromStr for Suite {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "all" => Suite::All,
            "transforms" => Suite::Transforms,
            "packet" => Suite::Packet,
            "states" => Suite::States,
            "fieldconv" => Suite::Fieldconv,
            "algebra" => Suite::Algebra,
            _ => return Err(CliError::config(format!("unknown suite `{s}` (all, transforms, packet, states, fieldconv, algebra)"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    /// The identity is asserted NOT to hold: passes when the measured residual exceeds the threshold.
    #[serde(rename = "expected-failure")]
    ExpectedFailure,
    #[serde(rename = "none")]
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Informational,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: String,
    pub suite: Suite,
    pub criterion: Option<u32>,
    pub description: String,
    pub measured: f64,
    pub threshold: Option<f64>,
    pub comparison: Comparison,
    pub status: Status,
    pub details: Value,
}

impl Check {
    fn new(id: &str, suite: Suite, criterion: Option<u32>, description: &str, measured: f64, threshold: Option<f64>, comparison: Comparison) -> Self {
        let status = match (comparison, threshold) {
            (Comparison::None, _) | (_, None) => Status::Informational,
            (Comparison::AtMost, Some(t)) => pass(measured <= t),
            (Comparison::AtLeast, Some(t)) => pass(measured >= t),
            (Comparison::ExpectedFailure, Some(t)) => pass(measured > t),
        };
        Check {
            id: id.into(),
            suite,
            criterion,
            description: description.into(),
            measured,
            threshold,
            comparison,
            status,
            details: Value::Null,
        }
    }

    fn with(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn is_failure(&self) -> bool {
        self.status == Status::Fail
    }

    /// One line: status, id, measured vs threshold.
    pub fn summary_line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Informational => "INFO",
        };
        let crit = self.criterion.map_or(String::from("  -"), |c| format!("C{c:<2}"));
        match (self.comparison, self.threshold) {
            (Comparison::None, _) | (_, None) => format!("{tag} {crit} {:<40} measured {:.3e}", self.id, self.measured),
            (c, Some(t)) => {
                let op = match c {
                    Comparison::AtMost => "<=",
                    Comparison::AtLeast => ">=",
                    _ => "> (expected failure)",
                };
                format!("{tag} {crit} {:<40} measured {:.3e} {op} {:.3e}", self.id, self.measured, t)
            }
        }
    }
}

fn pass(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn at_most(id: &str, suite: Suite, c: Option<u32>, desc: &str, measured: f64, threshold: f64) -> Check {
    Check::new(id, suite, c, desc, measured, Some(threshold), Comparison::AtMost)
}

fn at_least(id: &str, suite: Suite, c: Option<u32>, desc: &str, measured: f64, threshold: f64) -> Check {
    Check::new(id, suite, c, desc, measured, Some(threshold), Comparison::AtLeast)
}

fn info(id: &str, suite: Suite, c: Option<u32>, desc: &str, measured: f64) -> Check {
    Check::new(id, suite, c, desc, measured, None, Comparison::None)
}

fn runtime(id: &str, suite: Suite, c: u32, start: Instant, limit: f64) -> Check {
    at_most(id, suite, Some(c), "wall-clock seconds", start.elapsed().as_secs_f64(), limit)
}

/// A failed computation becomes a failing check rather than aborting the suite.
fn guarded(id: &str, suite: Suite, c: Option<u32>, f: impl FnOnce() -> Result<Vec<Check>, String>) -> Vec<Check> {
    f().unwrap_or_else(|e| {
        vec![Check::new(id, suite, c, "computation failed", f64::NAN, Some(0.0), Comparison::AtMost).with(json!({"error": e}))]
    })
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |a, x| if x.is_nan() || a.is_nan() { f64::NAN } else { a.max(x.abs()) })
}

fn exp_packet(sigma: f64, n: usize, dt: f64) -> Result<PhotonPacket, String> {
    let g = TimeGrid::new(n, dt, -((n / 8) as f64) * dt).map_err(err)?;
    make_packet(Shape::ExponentialDecay { sigma_t: sigma }, g).map_err(err)
}

fn gauss_packet(sigma: f64, f0: f64, center: f64, n: usize, dt: f64) -> Result<PhotonPacket, String> {
    let g = TimeGrid::centered(n, dt).map_err(err)?.shifted(center);
    make_packet(Shape::Gaussian { sigma, f0, center }, g).map_err(err)
}

/// Gaussian whose power spectrum has the given standard deviation in bins of width `df`.
fn band_gauss(f0: f64, power_std_bins: f64, center: f64, df: f64) -> Result<PhotonPacket, String> {
    let sigma = 1.0 / (4.0 * PI * power_std_bins * df);
    make_packet(Shape::Gaussian { sigma, f0, center }, TimeGrid::centered(512, 0.01 / df).map_err(err)?).map_err(err)
}

pub const CRITERIA: [(u32, Suite, &str); 12] = [
    (1, Suite::States, "near-singularity law of the Fock-1 exponential-packet variance"),
    (2, Suite::States, "coherent states carry only vacuum fluctuations"),
    (3, Suite::States, "Fock mean voltage is zero and variance is linear in N"),
    (4, Suite::Packet, "chi finite-part vs closed form, and |chi|/|psi| = 8 pi"),
    (5, Suite::Fieldconv, "p and q are Hilbert transforms of one another"),
    (6, Suite::Fieldconv, "photon flux of a sinusoid is constant"),
    (7, Suite::Fieldconv, "voltage -> quadratures -> voltage round trip"),
    (8, Suite::Algebra, "discrete commutator identities on the safe subspace"),
    (9, Suite::Algebra, "[H, theta] = i hbar N at single-particle and Fock level"),
    (10, Suite::Algebra, "time-energy uncertainty relation"),
    (11, Suite::Transforms, "Fourier-pair table: spectral vs quadrature oracle"),
    (12, Suite::All, "verify all passes and enumerates every criterion"),
];

pub fn criterion_suite(c: u32) -> Suite {
    CRITERIA.iter().find(|x| x.0 == c).map_or(Suite::All, |x| x.1)
}

/// Checks of one acceptance criterion (1–11). Criterion 12 is [`run_suite`]`(Suite::All)`.
pub fn criterion_checks(c: u32) -> Vec<Check> {
    match c {
        1 => c1_singularity_law(),
        2 => c2_coherent_excess(),
        3 => c3_fock_linearity(),
        4 => c4_chi_cross_validation(),
        5 => c5_hilbert_pair(),
        6 => c6_sinusoid_flux(),
        7 => c7_round_trip(),
        8 => c8_commutators(),
        9 => c9_h_theta(),
        10 => c10_uncertainty(),
        11 => c11_table(),
        _ => Vec::new(),
    }
}

fn c1_singularity_law() -> Vec<Check> {
    let s = Suite::States;
    let start = Instant::now();
    let mut out = guarded("c1_singularity_law", s, Some(1), || {
        let cfg = RunConfig {
            grid: Some("n=65536,dt=0.001".parse().map_err(err)?),
            packet: Some(PacketField::Descriptor("exp:sigma=1".into())),
            state: Some("fock:1".into()),
            route: Some("finite-part".into()),
            ..RunConfig::empty()
        };
        let r = cfg.resolve().map_err(err)?;
        let rep = trace_moments(&r).map_err(err)?;
        let sigma = 1.0;
        let (mut after, mut before, mut samples) = (0.0f64, 0.0f64, 0usize);
        let mut table = Vec::new();
        for (j, t) in rep.grid.times().enumerate() {
            let d = t - r.tau;
            if !(0.002 - 1e-12..=0.02 + 1e-12).contains(&d.abs()) {
                continue;
            }
            let law = NAT.z * NAT.hbar() / (4.0 * PI * d.abs() * sigma);
            let dev = (rep.var_v_subtracted.samples()[j].re / law - 1.0).abs();
            let dev = if dev.is_nan() { f64::INFINITY } else { dev };
            if d > 0.0 {
                after = after.max(dev);
            } else {
                before = before.max(dev);
            }
            if (d.abs() - 0.002).abs() < 1e-9 || (d.abs() - 0.01).abs() < 1e-9 || (d.abs() - 0.02).abs() < 1e-9 {
                table.push(json!({"t_minus_tau": d, "relative_deviation": dev}));
            }
            samples += 1;
        }
        Ok(vec![
            at_most("c1_singularity_law", s, Some(1), "max relative deviation from Z hbar/(4 pi |t-tau| sigma) on 0.002 <= |t-tau| <= 0.02", after.max(before), 0.1)
                .with(json!({"worst_after_onset": after, "worst_before_onset": before, "samples": samples, "route": "finite-part", "grid": {"n": 65536, "dt": 0.001}, "probes": table})),
            info("c1_after_onset", s, Some(1), "worst deviation for t > tau", after),
            info("c1_before_onset", s, Some(1), "worst deviation for t < tau", before),
        ])
    });
    out.push(runtime("c1_runtime", s, 1, start, 60.0));
    out
}

fn c2_coherent_excess() -> Vec<Check> {
    let s = Suite::States;
    let start = Instant::now();
    let mut out = guarded("c2_coherent_excess", s, Some(2), || {
        let shapes = [("exp_sigma1", exp_packet(1.0, 1 << 14, 0.005)?), ("gauss_sigma1_f2", gauss_packet(1.0, 2.0, 0.0, 4096, 0.01)?)];
        let alphas = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.3, -0.7)];
        let mut worst = 0.0f64;
        let mut cases = Vec::new();
        for (name, p) in &shapes {
            let chi = compute_chi(p, Route::SPECTRAL_DEFAULT, &ChiOptions::default()).map_err(err)?;
            for &alpha in &alphas {
                let r = MomentReport::from_chi(StateKind::Coherent { alpha }, &chi, 0.0, NAT).map_err(err)?;
                let vac = r.vac_var.samples()[0].re;
                let rel = max_abs(r.connected_excess()) / vac;
                worst = worst.max(rel);
                cases.push(json!({"shape": name, "alpha": [alpha.re, alpha.im], "max_excess_over_vacuum": rel}));
            }
        }
        Ok(vec![at_most("c2_coherent_excess", s, Some(2), "max |connected variance excess| / vacuum variance over every sample", worst, 1e-9)
            .with(json!({"cases": cases}))])
    });
    out.push(runtime("c2_runtime", s, 2, start, 60.0));
    out
}

fn c3_fock_linearity() -> Vec<Check> {
    let s = Suite::States;
    guarded("c3_fock", s, Some(3), || {
        let shapes = [("exp_sigma1", exp_packet(1.0, 1 << 14, 0.005)?), ("gauss_sigma04_f3", gauss_packet(0.4, 3.0, 0.0, 1024, 0.01)?)];
        let (mut mean_worst, mut lin_worst) = (0.0f64, 0.0f64);
        for (_, p) in &shapes {
            let chi = compute_chi(p, Route::SPECTRAL_DEFAULT, &ChiOptions::default()).map_err(err)?;
            for n in [1, 2, 5] {
                let kind = StateKind::Fock { n };
                let spec = StateSpec::new(kind, p).map_err(err)?;
                let m = mean_voltage(&spec, Route::SPECTRAL_DEFAULT, &ChiOptions::default(), NAT).map_err(err)?;
                let r = MomentReport::from_chi(kind, &chi, 0.0, NAT).map_err(err)?;
                mean_worst = mean_worst.max(max_abs(m.samples().iter().map(|c| c.norm()))).max(max_abs(r.mean_v.real_parts()));
            }
            let one = MomentReport::from_chi(StateKind::Fock { n: 1 }, &chi, 0.0, NAT).map_err(err)?;
            let two = MomentReport::from_chi(StateKind::Fock { n: 2 }, &chi, 0.0, NAT).map_err(err)?;
            for (a, b) in one.var_v_subtracted.samples().iter().zip(two.var_v_subtracted.samples()) {
                if b.re != 0.0 {
                    lin_worst = lin_worst.max((b.re - 2.0 * a.re).abs() / b.re.abs());
                }
            }
        }
        Ok(vec![
            at_most("c3_fock_mean_zero", s, Some(3), "max |<v(t)>| over Fock states N = 1, 2, 5", mean_worst, 0.0),
            at_most("c3_fock_variance_linear", s, Some(3), "max relative |var(N=2) - 2 var(N=1)|", lin_worst, 1e-12),
        ])
    })
}

fn c4_chi_cross_validation() -> Vec<Check> {
    let s = Suite::Packet;
    guarded("c4_chi", s, Some(4), || {
        let quad = ChiOptions::default().quad;
        let p = exp_packet(1.0, 1 << 14, 0.005)?;
        let ts: Vec<f64> = (0..25)
            .map(|k| 0.1 * (50.0f64).powf(k as f64 / 24.0))
            .flat_map(|a| [a, -a])
            .collect();
        let rows: Vec<Result<(f64, f64, f64), String>> = ts
            .par_iter()
            .map(|&t| {
                let fp = chi_finite_part_at(&p, t, &quad).map_err(err)?;
                let cf = chi_closed_form_exponential(1.0, t).map_err(err)?;
                let printed = chi_closed_form_exponential_as_printed(1.0, t).map_err(err)?;
                Ok((t, (fp - cf).norm() / cf.norm(), (fp - printed).norm() / fp.norm()))
            })
            .collect();
        let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
        let closed = max_abs(rows.iter().map(|r| r.1));
        let printed = max_abs(rows.iter().map(|r| r.2));

        // |χ|/|ψ| across the shape corpus.
        let corpus: Vec<(&str, PhotonPacket, usize, f64, f64, usize)> = vec![
            ("gauss_s1_f8", gauss_packet(1.0, 8.0, 0.0, 4096, 0.01)?, 4, 0.0, 2.0, 16),
            ("gauss_s1_f3", gauss_packet(1.0, 3.0, 0.0, 4096, 0.01)?, 4, 0.0, 2.0, 16),
            ("gauss_s05_f4", gauss_packet(0.5, 4.0, 0.0, 4096, 0.01)?, 4, 0.0, 1.0, 8),
            ("gauss_s2_f15", gauss_packet(2.0, 1.5, 0.0, 4096, 0.01)?, 4, 0.0, 4.0, 32),
            ("exp_s1", exp_packet(1.0, 1 << 16, 0.001)?, 64, 0.05, 8.0, 73),
        ];
        let mut ratio_worst = 0.0f64;
        let mut per_shape = Vec::new();
        for (name, p, pad, lo, hi, step) in &corpus {
            let psi = psi_spectral(p, *pad).map_err(err)?.psi;
            let idx: Vec<usize> = (0..p.grid().n())
                .step_by(*step)
                .filter(|&j| {
                    let t = p.grid().time(j);
                    t.abs() > *lo && t.abs() <= *hi
                })
                .collect();
            let devs: Vec<Result<f64, String>> = idx
                .par_iter()
                .map(|&j| {
                    let chi = chi_finite_part_at(p, p.grid().time(j), &quad).map_err(err)?;
                    Ok((chi.norm() / psi.samples()[j].norm() / (8.0 * PI) - 1.0).abs())
                })
                .collect();
            let w = max_abs(devs.into_iter().collect::<Result<Vec<_>, _>>()?);
            ratio_worst = ratio_worst.max(w);
            per_shape.push(json!({"shape": name, "pad": pad, "probes": idx.len(), "max_relative_deviation": w}));
        }
        Ok(vec![
            at_most("c4_closed_form", s, Some(4), "max relative |chi_fp - chi_closed| on 0.1 <= |t|/sigma <= 5", closed, 1e-3)
                .with(json!({"probes": ts.len()})),
            at_most("c4_chi_psi_ratio", s, Some(4), "max | |chi|/(8 pi |psi|) - 1 | across the shape corpus", ratio_worst, 1e-3)
                .with(json!({"shapes": per_shape})),
            info("c4_as_printed_closed_form", s, Some(4), "max relative deviation of the as-printed closed form from the defining integral", printed),
        ])
    })
}

const FC_N: usize = 1024;
const FC_DT: f64 = 1.0 / 64.0;

fn fc_grid() -> TimeGrid {
    TimeGrid::new(FC_N, FC_DT, 0.0).expect("valid grid")
}

fn bin_freq(k: usize) -> f64 {
    k as f64 / (FC_N as f64 * FC_DT)
}

/// Zero-mean band-interior trace: eight on-bin tones between bins 40 and 200.
pub fn random_trace(rng: &mut StdRng) -> Signal {
    let comps: Vec<(usize, f64, f64)> =
        (0..8).map(|_| (rng.gen_range(40..200), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0 * PI))).collect();
    Signal::from_real_fn(fc_grid(), Unit::Volts, |t| comps.iter().map(|&(k, a, ph)| a * (2.0 * PI * bin_freq(k) * t + ph).cos()).sum())
}

fn masked_dev(a: &Signal, b: &Signal, scale_a: f64, mask: &[bool]) -> f64 {
    a.samples()
        .iter()
        .zip(b.samples())
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|((x, y), _)| (x.re * scale_a - y.re).abs())
        .fold(0.0, f64::max)
}

fn c5_hilbert_pair() -> Vec<Check> {
    let s = Suite::Fieldconv;
    guarded("c5_hilbert_pair", s, Some(5), || {
        let mut rng = StdRng::seed_from_u64(2024);
        let conv = ConvolveOptions { boundary: Boundary::Periodic };
        let mut pairs = Vec::new();
        for _ in 0..20 {
            let v = random_trace(&mut rng);
            let pair = quadratures_from_voltage(&v, NAT, &FieldOptions::periodic()).map_err(err)?.value;
            let h = hilbert_paper(&pair.p, &conv).map_err(err)?.value;
            pairs.push((pair, h));
        }
        // One global sign, calibrated on the first trace.
        let (p0, h0) = &pairs[0];
        let sign = if masked_dev(h0, &p0.q, 1.0 / PI, &p0.valid) <= masked_dev(h0, &p0.q, -1.0 / PI, &p0.valid) { 1.0 } else { -1.0 };
        let worst = pairs
            .iter()
            .map(|(pair, h)| masked_dev(h, &pair.q, sign / PI, &pair.valid) / pair.p.sup_norm())
            .fold(0.0, f64::max);
        Ok(vec![
            at_most("c5_hilbert_pair", s, Some(5), "max sup|q - s H(p)/pi| / ||p|| on valid samples, 20 random traces", worst, 1e-9)
                .with(json!({"calibrated_sign": sign, "traces": 20, "seed": 2024})),
            at_most("c5_sign_matches_library", s, Some(5), "|calibrated sign - HILBERT_PAIR_SIGN|", (sign - HILBERT_PAIR_SIGN).abs(), 0.0),
        ])
    })
}

fn c6_sinusoid_flux() -> Vec<Check> {
    let s = Suite::Fieldconv;
    guarded("c6_flux", s, Some(6), || {
        let (mut spread, mut level_dev) = (0.0f64, 0.0f64);
        let mut cases = Vec::new();
        for (consts, v0, k, phase) in [(NAT, 1.0, 64usize, 0.0), (PhysConsts::SI, 0.8, 48, 0.7), (PhysConsts::new(50.0, 0.1).map_err(err)?, 2.5, 100, -1.3)] {
            let f0 = bin_freq(k);
            let v = Signal::from_real_fn(fc_grid(), Unit::Volts, |t| v0 * (2.0 * PI * f0 * t + phase).sin());
            let pair = quadratures_from_voltage(&v, consts, &FieldOptions::periodic()).map_err(err)?.value;
            let n = photon_flux(&pair).n.real_parts();
            let central = &n[FC_N / 4..3 * FC_N / 4];
            let mean = central.iter().sum::<f64>() / central.len() as f64;
            let sd = (central.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / central.len() as f64).sqrt();
            let level = v0 * v0 / (consts.zh() * f0);
            spread = spread.max(sd / mean);
            level_dev = level_dev.max((mean / level - 1.0).abs());
            cases.push(json!({"z": consts.z, "h": consts.h, "v0": v0, "f0": f0, "relative_std": sd / mean, "level": mean, "expected_level": level}));
        }
        Ok(vec![
            at_most("c6_flux_constant", s, Some(6), "relative standard deviation of n(t) over the central half-window", spread, 1e-6)
                .with(json!({"cases": cases})),
            at_most("c6_flux_level", s, Some(6), "relative deviation of the flux level from V0^2/(Z h f0)", level_dev, 1e-6),
        ])
    })
}

fn c7_round_trip() -> Vec<Check> {
    let s = Suite::Fieldconv;
    guarded("c7_round_trip", s, Some(7), || {
        let mut rng = StdRng::seed_from_u64(77);
        let o = FieldOptions::periodic();
        let mut worst = 0.0f64;
        for consts in [NAT, PhysConsts::new(50.0, 2.0).map_err(err)?].into_iter().cycle().take(20) {
            let v = random_trace(&mut rng);
            let pair = quadratures_from_voltage(&v, consts, &o).map_err(err)?.value;
            let back = voltage_from_quadratures(&pair, &o).map_err(err)?.value;
            let dev = masked_dev(&back, &v, 1.0, &pair.valid) / v.sup_norm();
            worst = worst.max(dev);
        }
        Ok(vec![at_most("c7_round_trip", s, Some(7), "max sup|v_back - v| / ||v|| on valid samples, 20 random traces", worst, 1e-8)
            .with(json!({"traces": 20, "seed": 77}))])
    })
}

fn c8_commutators() -> Vec<Check> {
    let s = Suite::Algebra;
    let start = Instant::now();
    let mut out = guarded("c8_commutators", s, Some(8), || {
        let mut checks = Vec::new();
        for (m, n_max) in [(4, 3), (6, 2)] {
            let sys = ModeSystem::new(m, n_max, 1.0).map_err(err)?;
            let r = discrete_commutator_suite(&sys, NAT);
            for id in &r.identities {
                checks.push(
                    at_most(&format!("c8_m{m}_n{n_max}_{}", id.name), s, Some(8), "max residual on the safe occupation subspace", id.max_residual, 1e-12)
                        .with(json!({"cases": id.cases})),
                );
            }
            checks.push(at_most(&format!("c8_m{m}_n{n_max}_hermiticity"), s, Some(8), "adjoint consistency of the ladder matrices", r.hermiticity_defect, 1e-12));
            checks.push(at_most(
                &format!("c8_m{m}_n{n_max}_matrix_free"),
                s,
                Some(8),
                "sparse-matrix vs matrix-free evaluation of the time-domain identity",
                r.matrix_free_agreement,
                1e-12,
            ));
        }
        Ok(checks)
    });
    out.push(runtime("c8_runtime", s, 8, start, 120.0));
    out
}

fn c9_h_theta() -> Vec<Check> {
    let s = Suite::Algebra;
    guarded("c9_h_theta", s, Some(9), || {
        let rep = SingleParticleRep::new(1024, 1.0, NAT.h).map_err(err)?;
        let sp = single_particle_check(&rep);
        let edge = sp.edge.iter().map(|r| r.residual).fold(0.0, f64::max);
        let mut out = vec![
            at_most("c9_single_particle_interior", s, Some(9), "max ||R psi||/||psi|| on band-interior Gaussian profiles, M_sp = 1024", sp.worst_interior(), 1e-3)
                .with(json!({"profiles": sp.interior.iter().map(|r| json!({"center": r.center, "width_bins": r.width_bins, "residual": r.residual})).collect::<Vec<_>>()})),
            info("c9_single_particle_edge", s, Some(9), "band-edge profile residual (boundary anomaly)", edge),
            info("c9_single_particle_trace", s, Some(9), "Im trace(R) / (hbar M_sp), expected -1", sp.residual_trace.im / (rep.hbar() * 1024.0)),
        ];

        let sys = ModeSystem::new(6, 2, 1.0).map_err(err)?;
        let p = band_gauss(3.0, 0.75, 0.0, 1.0)?;
        let psi = realize_state(StateKind::Fock { n: 1 }, &p, &sys, Projection::Resampled).map_err(err)?;
        let mut vac = vec![Complex64::new(0.0, 0.0); sys.dim()];
        vac[0] = Complex64::new(1.0, 0.0);
        let bin = single_bin_state(&sys, 3);
        let r = fock_commutator_check(&sys, NAT, &[psi, vac, bin]).map_err(err)?;
        let fock = r[0].residual.unwrap_or(f64::NAN);
        out.push(
            at_most("c9_fock_single_photon", s, Some(9), "||([H,theta] - i hbar N) psi|| / ||N psi||, normal-ordered N, M = 6, n_max = 2", fock, 5e-2)
                .with(json!({"residual_over_hbar": r[0].residual_over_hbar, "packet": {"f0": 3.0, "power_std_bins": 0.75}})),
        );
        out.push(info("c9_fock_single_photon_symmetric_n", s, Some(9), "same residual with symmetric-ordered N (vacuum constant M/2)", r[0].residual_symmetric));
        out.push(info("c9_fock_vacuum_symmetric_n", s, Some(9), "vacuum: ||([H,theta] - i hbar N_sym)|0>|| / ||N_sym|0>||", r[1].residual_symmetric));
        let eig = r[2].residual.unwrap_or(f64::NAN);
        out.push(
            Check::new("c9_eigenstate_expected_failure", s, Some(9), "single-bin H eigenstate: the identity must fail (residual above 5e-2)", eig, Some(5e-2), Comparison::ExpectedFailure)
                .with(json!({
                    "commutator_expectation": [r[2].commutator_expectation.re, r[2].commutator_expectation.im],
                    "ihbar_n": [r[2].ihbar_n.re, r[2].ihbar_n.im],
                })),
        );
        out.push(info("c9_eigenstate_commutator_expectation", s, Some(9), "|<[H,theta]>| on the H eigenstate", r[2].commutator_expectation.norm()));
        Ok(out)
    })
}

fn c10_uncertainty() -> Vec<Check> {
    let s = Suite::Algebra;
    guarded("c10_uncertainty", s, Some(10), || {
        struct Case {
            name: &'static str,
            m: usize,
            n_max: usize,
            f0: f64,
            center: f64,
            kind: StateKind,
        }
        let c = |re, im| StateKind::Coherent { alpha: Complex64::new(re, im) };
        let corpus = [
            Case { name: "fock1_m6", m: 6, n_max: 2, f0: 3.0, center: 0.0, kind: StateKind::Fock { n: 1 } },
            Case { name: "fock1_m4", m: 4, n_max: 3, f0: 2.0, center: 0.0, kind: StateKind::Fock { n: 1 } },
            Case { name: "fock2_m4", m: 4, n_max: 3, f0: 2.0, center: 0.0, kind: StateKind::Fock { n: 2 } },
            Case { name: "coherent_0.5_m4", m: 4, n_max: 3, f0: 2.0, center: 0.0, kind: c(0.5, 0.0) },
            Case { name: "coherent_0.3+0.4i_m4", m: 4, n_max: 3, f0: 2.0, center: 0.0, kind: c(0.3, 0.4) },
            Case { name: "coherent_0.4+0.2i_m6", m: 6, n_max: 3, f0: 3.0, center: 0.0, kind: c(0.4, 0.2) },
        ];
        let off = Case { name: "fock1_m6_off_center", m: 6, n_max: 2, f0: 3.0, center: 0.05, kind: StateKind::Fock { n: 1 } };
        let eval = |case: &Case| -> Result<(f64, f64, Value), String> {
            let sys = ModeSystem::new(case.m, case.n_max, 1.0).map_err(err)?;
            let p = band_gauss(case.f0, 0.75, case.center, 1.0)?;
            let psi = realize_state(case.kind, &p, &sys, Projection::Resampled).map_err(err)?;
            let mo = theta_variance_oracle(&sys, NAT, &psi).map_err(err)?;
            let u = uncertainty_from_moments(&mo, NAT, 1.0);
            Ok((u.margin, u.margin_symmetric, json!({"state": case.name, "lhs": u.lhs, "bound": u.bound, "margin": u.margin, "n_normal": mo.n_normal, "cutoff_weight": mo.cutoff_weight})))
        };
        let mut worst = f64::INFINITY;
        let mut worst_sym = f64::INFINITY;
        let mut rows = Vec::new();
        for case in &corpus {
            let (m, ms, row) = eval(case)?;
            worst = worst.min(m);
            worst_sym = worst_sym.min(ms);
            rows.push(row);
        }
        let (off_margin, _, off_row) = eval(&off)?;
        Ok(vec![
            at_least("c10_uncertainty_margin", s, Some(10), "min sqrt(<dtheta^2><dH^2>) - (hbar/2)<N> over the band-interior corpus", worst, 0.0)
                .with(json!({"states": rows})),
            info("c10_symmetric_n_margin", s, Some(10), "min margin against symmetric-ordered <N>", worst_sym),
            info("c10_off_center_margin", s, Some(10), "margin for a packet centered off the time grid (t0 = 0.05)", off_margin).with(off_row),
        ])
    })
}

fn c11_table() -> Vec<Check> {
    let s = Suite::Transforms;
    guarded("c11_table", s, Some(11), || {
        let rows = table_check().map_err(err)?;
        let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
        let detail: Vec<Value> = rows.iter().map(|r| json!({"kernel": format!("{:?}", r.kernel), "signal": r.signal, "residual": r.residual})).collect();
        Ok(vec![at_most("c11_fourier_pair_table", s, Some(11), "max spectral-vs-oracle residual, 4 kernels x 10 signals", worst, TABLE_TOLERANCE)
            .with(json!({"residuals": detail}))])
    })
}

/// Module invariants outside the numbered criteria.
fn extra_checks(suite: Suite) -> Vec<Check> {
    let mut out = Vec::new();
    if matches!(suite, Suite::All | Suite::Transforms) {
        out.extend(guarded("transforms_round_trip", Suite::Transforms, None, || {
            let mut rng = StdRng::seed_from_u64(5);
            let g = TimeGrid::new(2048, 0.01, -3.7).map_err(err)?;
            let x: Vec<Complex64> = (0..2048).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let sig = Signal::new(g, x, Unit::Volts).map_err(err)?;
            let spec = forward_fourier(&sig);
            let back = inverse_fourier(&spec, Unit::Volts);
            let rt = max_abs(back.samples().iter().zip(sig.samples()).map(|(a, b)| (a - b).norm())) / sig.sup_norm();
            let e_t = sig.energy();
            let e_f: f64 = spec.bins().iter().map(|b| b.norm_sqr()).sum::<f64>() * g.df();
            Ok(vec![
                at_most("transforms_round_trip", Suite::Transforms, None, "inverse(forward(x)) - x, relative sup-norm", rt, 1e-12),
                at_most("transforms_parseval", Suite::Transforms, None, "relative Parseval defect", (e_t - e_f).abs() / e_t, 1e-12),
            ])
        }));
        out.extend(guarded("transforms_hilbert_twice", Suite::Transforms, None, || {
            let g = TimeGrid::new(1024, 1.0 / 64.0, 0.0).map_err(err)?;
            let x = Signal::from_real_fn(g, Unit::Volts, |t| (2.0 * PI * 3.0 * t).cos() + 0.5 * (2.0 * PI * 7.0 * t + 1.0).sin());
            let o = ConvolveOptions { boundary: Boundary::Periodic };
            let hh = hilbert_paper(&hilbert_paper(&x, &o).map_err(err)?.value, &o).map_err(err)?.value;
            let dev = max_abs(hh.samples().iter().zip(x.samples()).map(|(a, b)| (a + b * (PI * PI)).norm())) / (PI * PI * x.sup_norm());
            Ok(vec![at_most("transforms_hilbert_twice", Suite::Transforms, None, "H(H(x)) + pi^2 x on a zero-mean periodic trace", dev, 1e-12)])
        }));
    }
    if matches!(suite, Suite::All | Suite::Packet) {
        out.extend(guarded("packet_positive_weight", Suite::Packet, None, || {
            let e = exp_packet(1.0, 1 << 14, 0.005)?;
            let g = gauss_packet(0.5, 4.0, 0.0, 2048, 0.01)?;
            Ok(vec![
                at_most("packet_exp_weight_half", Suite::Packet, None, "|w(exp) - 1/2| for a real packet", (positive_frequency_weight(&e) - 0.5).abs(), 1e-12),
                at_most("packet_gauss_weight_one", Suite::Packet, None, "|w - 1| for a carrier Gaussian well above DC", (positive_frequency_weight(&g) - 1.0).abs(), 1e-9),
            ])
        }));
        out.extend(guarded("packet_bosonic", Suite::Packet, None, || {
            let sys = ModeSystem::new(8, 1, 1.0).map_err(err)?;
            let b = packet_bosonic_check(&band_gauss(4.0, 1.0, 0.0, 1.0)?, &sys);
            Ok(vec![
                at_most("packet_bosonic_mid_band", Suite::Packet, None, "|[A, A+] - 1| for a mid-band carrier Gaussian", (b.commutator - 1.0).abs(), 1e-3),
                info("packet_bosonic_leakage", Suite::Packet, None, "out-of-band spectral weight", b.leakage),
            ])
        }));
    }
    if matches!(suite, Suite::All | Suite::States) {
        out.extend(guarded("states_energy", Suite::States, None, || {
            let p = gauss_packet(0.5, 20.0, 0.0, 4096, 0.004)?;
            let e = energy_mean(&StateSpec::new(StateKind::Fock { n: 1 }, &p).map_err(err)?, NAT).map_err(err)?;
            Ok(vec![at_most("states_energy_h_f0", Suite::States, None, "relative deviation of <H> from h f0 for a narrow-band Fock-1 packet", (e.energy / 20.0 - 1.0).abs(), 1e-2)])
        }));
        out.extend(guarded("states_arrival", Suite::States, None, || {
            let e = exp_packet(1.0, 1 << 16, 0.001)?;
            let a = arrival_stats(&StateSpec::new(StateKind::Fock { n: 1 }, &e).map_err(err)?).map_err(err)?;
            let g = gauss_packet(0.5, 3.0, 0.0, 2048, 0.01)?.with_tau(5.0);
            let b = arrival_stats(&StateSpec::new(StateKind::Fock { n: 1 }, &g).map_err(err)?).map_err(err)?;
            Ok(vec![
                at_most("states_arrival_exp", Suite::States, None, "|mean arrival - sigma_t| for the exponential packet", (a.mean_arrival - 1.0).abs(), 1e-3),
                at_most("states_arrival_gauss_shift", Suite::States, None, "|mean arrival - tau| for a centered Gaussian, tau = 5", (b.mean_arrival - 5.0).abs(), 0.01),
            ])
        }));
        out.extend(guarded("states_coherent_theta", Suite::States, None, || {
            let sys = ModeSystem::new(4, 7, 1.0).map_err(err)?;
            let p = band_gauss(2.0, 1.2, 0.1, 1.0)?;
            let psi = realize_state(StateKind::Coherent { alpha: Complex64::new(2.0, 0.0) }, &p, &sys, Projection::Normalized).map_err(err)?;
            let mo = theta_variance_oracle(&sys, NAT, &psi).map_err(err)?;
            // Discrete centroid of the band-projected packet.
            let c = PacketModes::from_packet(&p, &sys).normalized().c;
            let tc: f64 = c.iter().zip(sys.single_particle(NAT).apply_t(&c)).map(|(a, b)| (a.conj() * b).re).sum();
            Ok(vec![
                at_most(
                    "states_coherent_theta_mean",
                    Suite::States,
                    None,
                    "|<theta> - |alpha|^2 t_c| for alpha = 2, t_c the discrete centroid of the projected packet",
                    (mo.theta_mean_normal - 4.0 * tc).abs(),
                    4e-3,
                ),
                at_most(
                    "states_coherent_theta_vs_centroid",
                    Suite::States,
                    None,
                    "|<theta> - |alpha|^2 centroid| in units of the oracle time step",
                    (mo.theta_mean_normal - 4.0 * p.centroid()).abs() / sys.band().delta_t(),
                    4.0,
                ),
            ])
        }));
    }
    if matches!(suite, Suite::All | Suite::Algebra) {
        out.extend(guarded("algebra_two_level", Suite::Algebra, None, || {
            let sys = ModeSystem::new(1, 1, 1.0).map_err(err)?;
            let b = sys.b(0);
            let c = b.commutator(&b.adjoint());
            let expect = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
            let dev = max_abs((0..2).map(|i| (c.apply(&unit(2, i))[i] - expect[i]).norm()));
            Ok(vec![at_most("algebra_truncation_anomaly", Suite::Algebra, None, "[b, b+] = diag(1, -1) for M = 1, n_max = 1", dev, 1e-14)])
        }));
    }
    out
}

fn unit(n: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[i] = Complex64::new(1.0, 0.0);
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionSummary {
    pub criterion: u32,
    pub title: &'static str,
    pub passed: bool,
    pub checks: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub suite: Suite,
    pub passed: bool,
    pub criteria: Vec<CriterionSummary>,
    pub checks: Vec<Check>,
}

fn summarize(c: u32, title: &'static str, checks: &[Check]) -> CriterionSummary {
    let mine: Vec<&Check> = checks.iter().filter(|k| k.criterion == Some(c)).collect();
    CriterionSummary {
        criterion: c,
        title,
        passed: !mine.is_empty() && mine.iter().all(|k| !k.is_failure()),
        checks: mine.iter().map(|k| k.id.clone()).collect(),
    }
}

pub fn run_suite(suite: Suite) -> Report {
    let mut checks = Vec::new();
    for &(c, s, _) in CRITERIA.iter().filter(|x| x.0 <= 11) {
        if suite == Suite::All || suite == s {
            checks.extend(criterion_checks(c));
        }
    }
    checks.extend(extra_checks(suite));
    let mut criteria: Vec<CriterionSummary> = CRITERIA
        .iter()
        .filter(|x| x.0 <= 11 && (suite == Suite::All || suite == x.1))
        .map(|&(c, _, title)| summarize(c, title, &checks))
        .collect();
    if suite == Suite::All {
        let failing: Vec<u32> = criteria.iter().filter(|c| !c.passed).map(|c| c.criterion).collect();
        let missing: Vec<u32> = (1..=11)
            .filter(|c| !checks.iter().any(|k| k.criterion == Some(*c) && k.threshold.is_some() && k.measured.is_finite()))
            .collect();
        let other_failures: Vec<&str> = checks.iter().filter(|k| k.criterion.is_none() && k.is_failure()).map(|k| k.id.as_str()).collect();
        checks.push(
            at_most(
                "c12_all_criteria",
                Suite::All,
                Some(12),
                "criteria 1-11 failing or missing a measured residual, plus failing module checks",
                (failing.len() + missing.len() + other_failures.len()) as f64,
                0.0,
            )
            .with(json!({"failing_criteria": failing, "criteria_without_measurement": missing, "failing_module_checks": other_failures})),
        );
        criteria.push(summarize(12, CRITERIA[11].2, &checks));
    }
    let passed = checks.iter().all(|c| !c.is_failure());
    Report { schema: crate::config::SCHEMA, tool: "tdqo", version: VERSION, suite, passed, criteria, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_rules() {
        let s = Suite::Algebra;
        assert_eq!(at_most("a", s, None, "", 1.0, 2.0).status, Status::Pass);
        assert_eq!(at_most("a", s, None, "", f64::NAN, 2.0).status, Status::Fail);
        assert_eq!(at_least("a", s, None, "", -1e-3, 0.0).status, Status::Fail);
        assert_eq!(info("a", s, None, "", 5.0).status, Status::Informational);
        let e = Check::new("e", s, None, "", 1.0, Some(0.05), Comparison::ExpectedFailure);
        assert_eq!(e.status, Status::Pass);
        let e = Check::new("e", s, None, "", 0.01, Some(0.05), Comparison::ExpectedFailure);
        assert_eq!(e.status, Status::Fail);
    }

    #[test]
    fn guarded_errors_fail() {
        let c = guarded("x", Suite::States, Some(3), || Err("boom".into()));
        assert_eq!(c.len(), 1);
        assert!(c[0].is_failure());
        assert_eq!(c[0].details["error"], "boom");
    }

    #[test]
    fn suite_names() {
        for s in ["all", "transforms", "packet", "states", "fieldconv", "algebra"] {
            let parsed: Suite = s.parse().unwrap();
            assert_eq!(serde_json::to_value(parsed).unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn transforms_suite_lists_table_residuals() {
        let r = run_suite(Suite::Transforms);
        let table = r.checks.iter().find(|c| c.id == "c11_fourier_pair_table").unwrap();
        assert_eq!(table.status, Status::Pass);
        assert_eq!(table.details["residuals"].as_array().unwrap().len(), 40);
        assert!(r.criteria.iter().all(|c| c.criterion == 11));
    }

    #[test]
    fn algebra_suite_contains_expected_failure() {
        let checks = criterion_checks(9);
        let e = checks.iter().find(|c| c.id == "c9_eigenstate_expected_failure").unwrap();
        assert_eq!(e.comparison, Comparison::ExpectedFailure);
        assert_eq!(e.status, Status::Pass);
    }
}
