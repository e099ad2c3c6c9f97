use super::*;
use crate::transforms::TimeGrid;
use std::vec::Vec;

fn exp_packet(sigma: f64, n: usize, dt: f64) -> PhotonPacket {
    let g = TimeGrid::new(n, dt, -((n / 8) as f64) * dt).unwrap();
    make_packet(Shape::ExponentialDecay { sigma_t: sigma }, g).unwrap()
}

fn gauss_packet(sigma: f64, f0: f64, center: f64, n: usize, dt: f64) -> PhotonPacket {
    let g = TimeGrid::centered(n, dt).unwrap().shifted(center);
    make_packet(Shape::Gaussian { sigma, f0, center }, g).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn exponential_normalized_on_recommended_grid() {
    let p = exp_packet(1.0, 1 << 16, 0.001);
    assert!((p.phi().energy() - 1.0).abs() < 1e-9);
    assert_eq!(p.jumps(), &[0.0]);
}

#[test]
fn gaussian_centroid_is_center() {
    let p = gauss_packet(1.0, 0.0, 0.0, 4096, 0.01);
    assert!(p.centroid().abs() < 1e-10);
    assert!((p.spread() - 1.0).abs() < 1e-9);
}

#[test]
fn custom_samples_are_renormalized_with_reported_factor() {
    let base = gauss_packet(0.5, 1.0, 0.0, 2048, 0.005);
    let doubled: Vec<Complex64> = base.phi().samples().iter().map(|x| x * 2.0).collect();
    let p = make_packet(Shape::Custom { samples: doubled, jumps: Vec::new() }, *base.grid()).unwrap();
    assert!((p.norm_factor() - 2.0).abs() < 1e-12);
    for (a, b) in p.phi().samples().iter().zip(base.phi().samples()) {
        assert!((a - b).norm() < 1e-14);
    }
}

#[test]
fn rejects_bad_width_and_truncated_packets() {
    let g = TimeGrid::centered(1024, 0.01).unwrap();
    assert_eq!(
        make_packet(Shape::ExponentialDecay { sigma_t: 0.0 }, g).unwrap_err(),
        PacketError::Width(0.0)
    );
    assert!(matches!(
        make_packet(Shape::ExponentialDecay { sigma_t: 1.0 }, g),
        Err(PacketError::EdgeDecay { .. })
    ));
    assert!(matches!(
        make_packet(Shape::Gaussian { sigma: 3.0, f0: 0.0, center: 0.0 }, g),
        Err(PacketError::EdgeDecay { .. })
    ));
}

#[test]
fn positive_weight_examples() {
    let g = gauss_packet(1.0, 10.0, 0.0, 8192, 0.01);
    assert!(positive_frequency_weight(&g) >= 1.0 - 1e-12);
    for &s in &[0.5, 1.0, 3.0] {
        let p = exp_packet(s, 1 << 15, 0.005 * s);
        assert!((positive_frequency_weight(&p) - 0.5).abs() < 1e-6);
    }
}

#[test]
fn reversal_and_conjugation_have_equal_weight() {
    let p = gauss_packet(0.4, 1.5, 0.3, 4096, 0.01);
    let rev = make_packet(
        Shape::Custom { samples: p.phi().reversed().into_samples(), jumps: Vec::new() },
        *p.grid(),
    )
    .unwrap();
    let conj = make_packet(
        Shape::Custom { samples: p.phi().conj().into_samples(), jumps: Vec::new() },
        *p.grid(),
    )
    .unwrap();
    let (a, b) = (positive_frequency_weight(&rev), positive_frequency_weight(&conj));
    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
}

#[test]
fn closed_form_matches_defining_integral() {
    let p = exp_packet(1.0, 1 << 14, 0.005);
    let q = ChiOptions::default().quad;
    for &t in &[1.0, 0.5, -0.5, 0.1, -0.1, 2.5, -4.0] {
        let direct = chi_finite_part_at(&p, t, &q).unwrap();
        let closed = chi_closed_form_exponential(1.0, t).unwrap();
        assert!(rel(closed, direct) < 1e-8, "t={t}: {closed} vs {direct}");
    }
}

#[test]
fn printed_closed_form_disagrees_with_definition() {
    // Documented defect: the printed expression is not the defining integral.
    let p = exp_packet(1.0, 1 << 14, 0.005);
    let q = ChiOptions::default().quad;
    let direct = chi_finite_part_at(&p, 1.0, &q).unwrap();
    let printed = chi_closed_form_exponential_as_printed(1.0, 1.0).unwrap();
    assert!(rel(printed, direct) > 1.0);
    assert!((direct - Complex64::new(-2.0709, 0.9697)).norm() < 1e-3);
}

#[test]
fn closed_form_rejects_origin() {
    assert_eq!(chi_closed_form_exponential(1.0, 0.0).unwrap_err(), PacketError::AtOrigin);
}

#[test]
fn near_singularity_law_after_onset() {
    for &t in &[1e-4, 1e-3, 0.005, 0.01] {
        let chi = chi_closed_form_exponential(1.0, t).unwrap();
        let ratio = chi.norm_sqr() * t / 8.0;
        assert!((ratio - 1.0).abs() < 0.05, "t={t}: ratio {ratio}");
    }
}

#[test]
fn near_singularity_law_before_onset_deviates() {
    // Before the onset |χ|²|t|σ/8 = (1 − √(π|t|/2σ))² + O(|t|): 0.84 at |t| = 0.01σ.
    for &a in &[1e-3, 0.005, 0.01, 0.02] {
        let chi = chi_closed_form_exponential(1.0, -a).unwrap();
        let ratio = chi.norm_sqr() * a / 8.0;
        let leading = (1.0 - (PI * a / 2.0).sqrt()).powi(2);
        assert!((ratio - leading).abs() < 2.0 * a, "a={a}: {ratio} vs {leading}");
    }
    let r = chi_closed_form_exponential(1.0, -0.01).unwrap().norm_sqr() * 0.01 / 8.0;
    assert!(r < 0.95);
}

#[test]
fn pin_chi_psi_constant() {
    // Windowed monochromatic packet: χ_fp/(8πψ) is a single unimodular constant.
    let f0 = 8.0;
    let p = gauss_packet(1.0, f0, 0.0, 4096, 0.01);
    let psi = psi_spectral(&p, 4).unwrap();
    let q = ChiOptions::default().quad;
    let mut cs = Vec::new();
    for j in (0..p.grid().n()).step_by(16) {
        let t = p.grid().time(j);
        if t.abs() > 2.0 {
            continue;
        }
        let chi = chi_finite_part_at(&p, t, &q).unwrap();
        let ps = psi.psi.samples()[j];
        assert!((chi.norm() / ps.norm() / (8.0 * PI) - 1.0).abs() < 1e-3);
        cs.push(chi / (ps * 8.0 * PI));
    }
    let mean: Complex64 = cs.iter().sum::<Complex64>() / cs.len() as f64;
    assert!((mean - CHI_PSI_PHASE).norm() < 1e-6, "pinned {mean}");
    for c in &cs {
        assert!((c - mean).norm() < 1e-6);
    }
}

#[test]
fn psi_single_bin_dominance() {
    let f0 = 10.0;
    let p = gauss_packet(2.0, f0, 0.0, 8192, 0.01);
    let psi = psi_spectral(&p, 2).unwrap();
    for (j, t) in p.grid().times().enumerate() {
        if t.abs() < 2.0 {
            let expect = f0.sqrt() * p.phi().samples()[j].norm();
            assert!((psi.psi.samples()[j].norm() / expect - 1.0).abs() < 1e-3);
        }
    }
}

#[test]
fn psi_vanishes_without_positive_content() {
    let p = gauss_packet(1.0, -10.0, 0.0, 4096, 0.01);
    let psi = psi_spectral(&p, 2).unwrap();
    assert!(psi.psi.sup_norm() < 1e-12);
}

#[test]
fn psi_is_linear() {
    let a = gauss_packet(0.5, 3.0, -1.0, 2048, 0.01);
    let b = gauss_packet(0.7, 5.0, 1.0, 2048, 0.01);
    let (x, y) = (Complex64::new(0.3, -1.2), Complex64::new(2.0, 0.5));
    let mix: Vec<Complex64> =
        a.phi().samples().iter().zip(b.phi().samples()).map(|(p, q)| x * p + y * q).collect();
    let m = make_packet(Shape::Custom { samples: mix, jumps: Vec::new() }, *a.grid()).unwrap();
    let pa = psi_spectral(&a, 2).unwrap().psi;
    let pb = psi_spectral(&b, 2).unwrap().psi;
    let pm = psi_spectral(&m, 2).unwrap().psi;
    let k = m.norm_factor();
    for j in 0..2048 {
        let lin = (x * pa.samples()[j] + y * pb.samples()[j]) / k;
        assert!((pm.samples()[j] - lin).norm() < 1e-12);
    }
}

#[test]
fn dilation_scaling_law() {
    let q = ChiOptions::default().quad;
    let p1 = exp_packet(1.0, 1 << 14, 0.005);
    for &s in &[0.5, 2.0, 4.0] {
        let ps = exp_packet(s, 1 << 14, 0.005 * s);
        for &t in &[-3.0, -0.7, 0.3, 1.1, 4.0] {
            let lhs = chi_finite_part_at(&ps, t, &q).unwrap();
            let rhs = chi_finite_part_at(&p1, t / s, &q).unwrap() / s;
            assert!(rel(lhs, rhs) < 1e-3, "s={s} t={t}");
        }
    }
}

#[test]
fn routes_agree_on_gaussian_with_carrier() {
    let p = gauss_packet(1.0, 3.0, 0.0, 4096, 0.01);
    let opts = ChiOptions::default();
    let spec = compute_chi(&p, Route::Spectral { pad_factor: 4 }, &opts).unwrap();
    for j in (0..4096).step_by(8) {
        let t = p.grid().time(j);
        if t.abs() > 4.0 {
            continue;
        }
        let fp = chi_finite_part_at(&p, t, &opts.quad).unwrap();
        assert!(rel(spec.chi.samples()[j], fp) < 1e-3, "t={t}");
    }
}

#[test]
fn routes_agree_on_exponential_away_from_jump() {
    let n = 1 << 16;
    let dt = 0.001;
    let g = TimeGrid::new(n, dt, -((n / 8) as f64) * dt).unwrap();
    let p = make_packet(Shape::ExponentialDecay { sigma_t: 1.0 }, g).unwrap();
    let opts = ChiOptions::default();
    let spec = compute_chi(&p, Route::Spectral { pad_factor: 64 }, &opts).unwrap();
    let mut worst: f64 = 0.0;
    for j in (0..n).step_by(73) {
        let t = g.time(j);
        if t.abs() <= 0.05 || t.abs() > 8.0 {
            continue;
        }
        let fp = chi_finite_part_at(&p, t, &opts.quad).unwrap();
        worst = worst.max(rel(spec.chi.samples()[j], fp));
    }
    assert!(worst < 1e-3, "worst relative difference {worst}");
}

#[test]
fn spectral_route_refuses_low_weight_in_band_limited_mode() {
    let p = exp_packet(1.0, 1 << 12, 0.02);
    let opts = ChiOptions { mode: PacketMode::BandLimited, ..Default::default() };
    assert!(matches!(
        compute_chi(&p, Route::Spectral { pad_factor: 2 }, &opts),
        Err(PacketError::LowPositiveWeight(_))
    ));
    assert!(compute_chi(&p, Route::Spectral { pad_factor: 2 }, &ChiOptions::default()).is_ok());
}

#[test]
fn finite_part_route_marks_jump_samples() {
    let g = TimeGrid::new(128, 0.25, -8.0).unwrap();
    let p = make_packet(Shape::ExponentialDecay { sigma_t: 0.5 }, g).unwrap();
    let chi = compute_chi(&p, Route::FinitePart, &ChiOptions::default()).unwrap();
    assert_eq!(chi.singular, std::vec![32]);
    assert!(chi.chi.samples()[32].re.is_nan());
    assert!(chi.chi.samples()[33].re.is_finite());
}

#[test]
fn band_limited_mode_rescales_chi() {
    let p = exp_packet(1.0, 1 << 12, 0.02);
    let ideal = compute_chi(&p, Route::FinitePart, &ChiOptions::default()).unwrap();
    let bl = compute_chi(
        &p,
        Route::FinitePart,
        &ChiOptions { mode: PacketMode::BandLimited, ..Default::default() },
    )
    .unwrap();
    let j = 1000;
    let r = bl.chi.samples()[j] / ideal.chi.samples()[j];
    assert!((r.re - 2f64.sqrt()).abs() < 1e-5);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn normalization_holds_for_every_constructor(sigma in 0.3f64..2.0, f0 in -5.0f64..5.0, c in -1.0f64..1.0) {
            let p = gauss_packet(sigma, f0, c, 4096, 0.01);
            prop_assert!((p.phi().energy() - 1.0).abs() < 1e-9);
            let q = make_packet(Shape::Custom { samples: p.phi().samples().to_vec(), jumps: Vec::new() }, *p.grid()).unwrap();
            prop_assert!((q.phi().energy() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn closed_form_scaling(sigma in 0.2f64..5.0, t in prop_oneof![-5.0f64..-0.05, 0.05f64..5.0]) {
            let a = chi_closed_form_exponential(sigma, t * sigma).unwrap();
            let b = chi_closed_form_exponential(1.0, t).unwrap() / sigma;
            prop_assert!((a - b).norm() <= 1e-10 * b.norm());
        }
    }
}
