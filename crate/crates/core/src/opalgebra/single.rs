//! One-particle sector: `Ĥ = diag(h·f_k)` and `T̂ = F†·diag(t_j)·F`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::AlgebraError;

/// Largest single-particle grid accepted.
pub const MAX_SINGLE_PARTICLE: usize = 4096;

/// Bin frequencies `f_k = (k+½)Δf` and the conjugate grid `t_j = (j − (M−1)/2)·Δt`, `Δt = 1/(MΔf)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Band {
    pub m: usize,
    pub delta_f: f64,
}

impl Band {
    pub fn freq(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.delta_f
    }
    pub fn delta_t(&self) -> f64 {
        1.0 / (self.m as f64 * self.delta_f)
    }
    pub fn time(&self, j: usize) -> f64 {
        (j as f64 - (self.m as f64 - 1.0) / 2.0) * self.delta_t()
    }
    /// Unitary change of basis `F_jk = e^{−i2πf_k t_j}/√M`.
    pub fn fourier_entry(&self, j: usize, k: usize) -> Complex64 {
        let a = -2.0 * PI * self.freq(k) * self.time(j);
        Complex64::new(a.cos(), a.sin()) / (self.m as f64).sqrt()
    }
    /// Band-limited delta `D(Δ) = Δf·Σ_k e^{−i2πf_kΔ}` by the closed-form geometric sum.
    pub fn band_kernel(&self, delta: f64) -> Complex64 {
        let x = self.delta_f * delta;
        let m = self.m as f64;
        let phase = Complex64::new((-PI * m * x).cos(), (-PI * m * x).sin());
        let den = (PI * x).sin();
        if den.abs() < 1e-12 {
            let r = x.round();
            let sign = if (r as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            return Complex64::new(self.delta_f * m * sign, 0.0);
        }
        phase * (self.delta_f * (PI * m * x).sin() / den)
    }
}

/// Single-particle representation on `M_sp` bins. `T̂` is Toeplitz and stored by its
/// `2M−1` distinct entries.
#[derive(Clone, Debug)]
pub struct SingleParticleRep {
    band: Band,
    h: f64,
    toeplitz: Vec<Complex64>,
}

impl SingleParticleRep {
    pub fn new(m: usize, delta_f: f64, h: f64) -> Result<Self, AlgebraError> {
        if m == 0 || m > MAX_SINGLE_PARTICLE {
            return Err(AlgebraError::SingleParticleSize(m));
        }
        if !(delta_f.is_finite() && delta_f > 0.0) {
            return Err(AlgebraError::BinWidth(delta_f));
        }
        let band = Band { m, delta_f };
        let inv = 1.0 / m as f64;
        let toeplitz = (0..2 * m - 1)
            .map(|i| {
                let d = i as f64 - (m as f64 - 1.0);
                (0..m)
                    .map(|j| {
                        let t = band.time(j);
                        let a = 2.0 * PI * d * delta_f * t;
                        Complex64::new(a.cos(), a.sin()) * (t * inv)
                    })
                    .sum()
            })
            .collect();
        Ok(SingleParticleRep { band, h, toeplitz })
    }

    pub fn band(&self) -> Band {
        self.band
    }
    pub fn m(&self) -> usize {
        self.band.m
    }
    pub fn hbar(&self) -> f64 {
        self.h / (2.0 * PI)
    }

    /// `T̂_{pq}`.
    pub fn t_entry(&self, p: usize, q: usize) -> Complex64 {
        self.toeplitz[p + self.band.m - 1 - q]
    }

    pub fn h_entry(&self, k: usize) -> f64 {
        self.h * self.band.freq(k)
    }

    pub fn apply_t(&self, x: &[Complex64]) -> Vec<Complex64> {
        let m = self.band.m;
        (0..m).map(|p| (0..m).map(|q| self.t_entry(p, q) * x[q]).sum()).collect()
    }

    pub fn apply_h(&self, x: &[Complex64]) -> Vec<Complex64> {
        x.iter().enumerate().map(|(k, v)| v * self.h_entry(k)).collect()
    }

    /// `R·x` with `R = [Ĥ, T̂] − iħI`.
    pub fn apply_residual(&self, x: &[Complex64]) -> Vec<Complex64> {
        let m = self.band.m;
        let ih = Complex64::new(0.0, self.hbar());
        (0..m)
            .map(|p| {
                let c: Complex64 = (0..m).map(|q| self.t_entry(p, q) * (self.h_entry(p) - self.h_entry(q)) * x[q]).sum();
                c - ih * x[p]
            })
            .collect()
    }

    /// `trace(R) = −iħ·M` because the commutator part is traceless.
    pub fn residual_trace(&self) -> Complex64 {
        let ih = Complex64::new(0.0, self.hbar());
        (0..self.band.m).map(|p| self.t_entry(p, p) * (self.h_entry(p) - self.h_entry(p)) - ih).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let m = self.band.m;
        (0..2 * m - 1).map(|i| (self.toeplitz[i] - self.toeplitz[2 * m - 2 - i].conj()).norm()).fold(0.0, f64::max)
    }

    /// Max `|F†F − I|` entry; O(M³), intended for small M.
    pub fn unitarity_defect(&self) -> f64 {
        let m = self.band.m;
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in 0..m {
                let s: Complex64 = (0..m).map(|j| self.band.fourier_entry(j, a).conj() * self.band.fourier_entry(j, b)).sum();
                let e = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - e).norm());
            }
        }
        worst
    }

    /// Gaussian spectral amplitude `e^{−(f_k − f_c)²/(4w²)}` with `f_c = center·M·Δf` and width
    /// `w = width_bins·Δf`, normalized.
    pub fn gaussian_profile(&self, center: f64, width_bins: f64) -> Vec<Complex64> {
        let fc = center * self.band.m as f64 * self.band.delta_f;
        let w = width_bins * self.band.delta_f;
        let raw: Vec<f64> = (0..self.band.m).map(|k| (-(self.band.freq(k) - fc).powi(2) / (4.0 * w * w)).exp()).collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        raw.into_iter().map(|x| Complex64::new(x / norm, 0.0)).collect()
    }
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖R·ψ‖/‖ψ‖` for one profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileResidual {
    /// Profile center as a fraction of the band.
    pub center: f64,
    pub width_bins: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingleParticleReport {
    pub m: usize,
    pub interior: Vec<ProfileResidual>,
    pub edge: Vec<ProfileResidual>,
    pub hermiticity_defect: f64,
    pub residual_trace: Complex64,
}

impl SingleParticleReport {
    pub fn worst_interior(&self) -> f64 {
        self.interior.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

pub fn profile_residual(rep: &SingleParticleRep, center: f64, width_bins: f64) -> ProfileResidual {
    let psi = rep.gaussian_profile(center, width_bins);
    let r = rep.apply_residual(&psi);
    ProfileResidual { center, width_bins, residual: norm(&r) / norm(&psi) }
}

/// Interior corpus: centers in [¼, ¾] of the band, widths M/32 and M/48 bins.
/// Edge corpus: centered in the lowest 2% of bins.
pub fn single_particle_check(rep: &SingleParticleRep) -> SingleParticleReport {
    let m = rep.m() as f64;
    let mut interior = Vec::new();
    for &c in &[0.25, 0.375, 0.5, 0.625, 0.75] {
        for &w in &[m / 32.0, m / 48.0] {
            interior.push(profile_residual(rep, c, w));
        }
    }
    let edge = vec![profile_residual(rep, 0.01, (0.01 * m).max(0.5))];
    SingleParticleReport {
        m: rep.m(),
        interior,
        edge,
        hermiticity_defect: rep.hermiticity_defect(),
        residual_trace: rep.residual_trace(),
    }
}
