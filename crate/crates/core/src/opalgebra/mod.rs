//! Frequency-binned bosonic modes with occupation truncation, and numerical
//! checks of the commutator algebra, `[H, θ] = iħN` and the θ–H uncertainty relation.
//!
//! Conventions: `a(f_k) = b_k/√Δf`, `a(t_j) = √Δf·Σ_k b_k e^{−i2πf_k t_j}`,
//! `H = Σ_k h f_k (b_k†b_k + ½)`, `θ = Σ_{kq} T̂_{kq} b_k†b_q + ½·tr T̂`.

mod fock;
mod single;
pub mod sparse;

pub use fock::{basis_state, scalar_commutator_residual, FockSpace, LadderForm, SparseState};
pub use single::{
    profile_residual, single_particle_check, Band, ProfileResidual, SingleParticleRep, SingleParticleReport,
    MAX_SINGLE_PARTICLE,
};
pub use sparse::CsrMatrix;

use crate::packet::PhotonPacket;
use crate::PhysConsts;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Desk-scale guard on `(n_max+1)^M`.
pub const MAX_DIM: usize = 4096;

/// Largest weight a state may carry on basis vectors at the occupation cutoff.
pub const TRUNCATION_TOLERANCE: f64 = 1e-3;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgebraError {
    #[error("Hilbert dimension (n_max+1)^M = {dim} exceeds the limit {limit}")]
    Dimension { dim: u128, limit: usize },
    #[error("need at least one mode and n_max >= 1 (got M = {m}, n_max = {n_max})")]
    Shape { m: usize, n_max: usize },
    #[error("bin width must be finite and positive, got {0}")]
    BinWidth(f64),
    #[error("single-particle size must be in 1..=4096, got {0}")]
    SingleParticleSize(usize),
    #[error("state has weight {weight:e} at the occupation cutoff (limit {limit:e})")]
    Truncation { weight: f64, limit: f64 },
    #[error("state vector has length {got}, system dimension is {expected}")]
    StateLength { expected: usize, got: usize },
    #[error("state has zero norm")]
    ZeroState,
}

/// Truncated multimode bosonic system on `M` bins of width `Δf`.
#[derive(Clone, Debug)]
pub struct ModeSystem {
    space: FockSpace,
    band: Band,
    lower: Vec<CsrMatrix>,
    dim: usize,
}

fn single_mode_lowering(n_max: usize) -> CsrMatrix {
    let t = (1..=n_max).map(|n| (n - 1, n, Complex64::new((n as f64).sqrt(), 0.0))).collect();
    CsrMatrix::from_triplets(n_max + 1, n_max + 1, t)
}

pub fn build_mode_system(m: usize, n_max: usize, delta_f: f64) -> Result<ModeSystem, AlgebraError> {
    ModeSystem::new(m, n_max, delta_f)
}

impl ModeSystem {
    pub fn new(m: usize, n_max: usize, delta_f: f64) -> Result<Self, AlgebraError> {
        if m == 0 || n_max == 0 {
            return Err(AlgebraError::Shape { m, n_max });
        }
        if !(delta_f.is_finite() && delta_f > 0.0) {
            return Err(AlgebraError::BinWidth(delta_f));
        }
        let dim = (n_max as u128 + 1).checked_pow(m as u32).unwrap_or(u128::MAX);
        if dim > MAX_DIM as u128 {
            return Err(AlgebraError::Dimension { dim, limit: MAX_DIM });
        }
        let b = single_mode_lowering(n_max);
        let id = CsrMatrix::identity(n_max + 1);
        let lower = (0..m)
            .map(|k| {
                let mut acc = if k == 0 { b.clone() } else { id.clone() };
                for i in 1..m {
                    acc = acc.kron(if i == k { &b } else { &id });
                }
                acc
            })
            .collect();
        Ok(ModeSystem { space: FockSpace { modes: m, n_max }, band: Band { m, delta_f }, lower, dim: dim as usize })
    }

    pub fn m(&self) -> usize {
        self.space.modes
    }
    pub fn n_max(&self) -> usize {
        self.space.n_max
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn space(&self) -> FockSpace {
        self.space
    }
    pub fn band(&self) -> Band {
        self.band
    }
    pub fn delta_f(&self) -> f64 {
        self.band.delta_f
    }

    pub fn b(&self, k: usize) -> &CsrMatrix {
        &self.lower[k]
    }

    pub fn a_freq(&self, k: usize) -> CsrMatrix {
        self.lower[k].scale(ONE / self.band.delta_f.sqrt())
    }

    /// `a(t) = √Δf·Σ_k b_k e^{−i2πf_k t}` at an arbitrary time.
    pub fn a_time(&self, t: f64) -> CsrMatrix {
        let mut acc = CsrMatrix::zeros(self.dim, self.dim);
        for k in 0..self.m() {
            let a = -2.0 * PI * self.band.freq(k) * t;
            acc = acc.axpby(ONE, &self.lower[k], Complex64::new(a.cos(), a.sin()) * self.band.delta_f.sqrt());
        }
        acc
    }

    /// Normal-ordered `Σ_k b_k†b_k`.
    pub fn number_normal(&self) -> CsrMatrix {
        CsrMatrix::diagonal(&(0..self.dim).map(|i| Complex64::new(self.space.total(i as u64) as f64, 0.0)).collect::<Vec<_>>())
    }

    /// Symmetric-ordered `Σ_k (b_k†b_k + ½)`.
    pub fn number_symmetric(&self) -> CsrMatrix {
        let half = 0.5 * self.m() as f64;
        CsrMatrix::diagonal(
            &(0..self.dim).map(|i| Complex64::new(self.space.total(i as u64) as f64 + half, 0.0)).collect::<Vec<_>>(),
        )
    }

    fn energy(&self, index: u64, h: f64) -> f64 {
        (0..self.m()).map(|k| h * self.band.freq(k) * (self.space.occupation(index, k) as f64 + 0.5)).sum()
    }

    /// Symmetric-ordered `H = Σ_k h f_k (b_k†b_k + ½)`; diagonal in the Fock basis.
    pub fn hamiltonian(&self, consts: PhysConsts) -> CsrMatrix {
        CsrMatrix::diagonal(&(0..self.dim).map(|i| Complex64::new(self.energy(i as u64, consts.h), 0.0)).collect::<Vec<_>>())
    }

    /// Symmetric-ordered `θ = Σ T̂_{kq} b_k†b_q + ½·tr T̂`.
    pub fn theta(&self, rep: &SingleParticleRep) -> CsrMatrix {
        let m = self.m();
        let mut t = Vec::new();
        for k in 0..m {
            for q in 0..m {
                let c = rep.t_entry(k, q);
                let op = self.lower[k].adjoint().matmul(&self.lower[q]);
                t.extend(op.entries().map(|(r, col, v)| (r, col, v * c)));
            }
        }
        let tr: Complex64 = (0..m).map(|k| rep.t_entry(k, k)).sum();
        t.extend((0..self.dim).map(|i| (i, i, tr * 0.5)));
        CsrMatrix::from_triplets(self.dim, self.dim, t)
    }

    /// Normal-ordered θ (the symmetric form minus its vacuum constant).
    pub fn theta_normal(&self, rep: &SingleParticleRep) -> CsrMatrix {
        let tr: Complex64 = (0..self.m()).map(|k| rep.t_entry(k, k)).sum();
        self.theta(rep).sub(&CsrMatrix::identity(self.dim).scale(tr * 0.5))
    }

    /// Single-particle representation on the same band.
    pub fn single_particle(&self, consts: PhysConsts) -> SingleParticleRep {
        SingleParticleRep::new(self.m(), self.band.delta_f, consts.h).expect("validated band")
    }

    /// `U(t) = e^{−iHt/ħ}`, diagonal in the Fock basis.
    pub fn evolution(&self, consts: PhysConsts, t: f64) -> CsrMatrix {
        let hbar = consts.hbar();
        CsrMatrix::diagonal(
            &(0..self.dim)
                .map(|i| {
                    let a = -self.energy(i as u64, consts.h) * t / hbar;
                    Complex64::new(a.cos(), a.sin())
                })
                .collect::<Vec<_>>(),
        )
    }

    /// Heisenberg picture `U(t)†·op·U(t)`.
    pub fn heisenberg(&self, op: &CsrMatrix, consts: PhysConsts, t: f64) -> CsrMatrix {
        let u = self.evolution(consts, t);
        u.adjoint().matmul(op).matmul(&u)
    }

    /// Largest `|(C − c·I)_{rj}|` over safe columns `j`.
    pub fn safe_residual(&self, c: &CsrMatrix, expected: Complex64) -> f64 {
        let r = c.sub(&CsrMatrix::identity(self.dim).scale(expected));
        r.entries().filter(|&(_, col, _)| self.space.is_safe(col as u64)).map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }
}

/// Residual of one identity family, maximized over all index pairs checked.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityResidual {
    pub name: &'static str,
    pub max_residual: f64,
    pub cases: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorSuiteReport {
    pub m: usize,
    pub n_max: usize,
    pub identities: Vec<IdentityResidual>,
    /// Largest Hermiticity defect among H, θ, N.
    pub hermiticity_defect: f64,
    /// Largest mismatch between the matrix-free and matrix commutators of a(t_j).
    pub matrix_free_agreement: f64,
}

impl CommutatorSuiteReport {
    pub fn worst(&self) -> f64 {
        self.identities.iter().map(|r| r.max_residual).fold(0.0, f64::max)
    }
}

fn phase(a: f64) -> Complex64 {
    Complex64::new(a.cos(), a.sin())
}

/// Identities (i)–(iv) on the safe subspace.
///
/// (i) `[a(f_k), a†(f_k')] = δ_{kk'}/Δf`;
/// (ii) `[a(t_j), a†(t_j')] = D(t_j − t_j')`;
/// (iii) with two directional branches, `[a_τ(t), a_τ'†(t')] = D(Δt − Δτ) + D(Δt + Δτ)` and
/// `[a_{τ,σ}(f_k), a†_{τ',σ'}(f_k')] = δ_{σσ'}δ_{kk'} e^{iσ2πf_k(τ−τ')}/Δf` (matrix-free, 2M modes);
/// (iv) Heisenberg-evolved `[a(f_k, t), a†(f_k', t')] = δ_{kk'} e^{−i2πf_k(t−t')}/Δf` and
/// `[a(t_j; s), a†(t_j'; s')] = D(t_j − t_j' + s − s')`.
pub fn discrete_commutator_suite(sys: &ModeSystem, consts: PhysConsts) -> CommutatorSuiteReport {
    let m = sys.m();
    let band = sys.band();
    let df = band.delta_f;
    let mut ids = Vec::new();

    // (i)
    let af: Vec<CsrMatrix> = (0..m).map(|k| sys.a_freq(k)).collect();
    let mut worst: f64 = 0.0;
    for k in 0..m {
        for kk in 0..m {
            let c = af[k].commutator(&af[kk].adjoint());
            let e = if k == kk { ONE / df } else { ZERO };
            worst = worst.max(sys.safe_residual(&c, e));
        }
    }
    ids.push(IdentityResidual { name: "frequency_bosonic", max_residual: worst, cases: m * m });

    // (ii) on the conjugate grid plus off-grid times.
    let mut times: Vec<f64> = (0..m).map(|j| band.time(j)).collect();
    times.extend([0.137 * band.delta_t(), -0.41 * band.delta_t()]);
    let at: Vec<CsrMatrix> = times.iter().map(|&t| sys.a_time(t)).collect();
    let mut worst: f64 = 0.0;
    for (i, &t1) in times.iter().enumerate() {
        for (j, &t2) in times.iter().enumerate() {
            let c = at[i].commutator(&at[j].adjoint());
            worst = worst.max(sys.safe_residual(&c, band.band_kernel(t1 - t2)));
        }
    }
    ids.push(IdentityResidual { name: "time_band_kernel", max_residual: worst, cases: times.len() * times.len() });

    // Matrix-free vs matrix for (ii).
    let space = sys.space();
    let form = |t: f64| {
        LadderForm::annihilation((0..m).map(|k| (k, phase(-2.0 * PI * band.freq(k) * t) * df.sqrt())).collect())
    };
    let mut agree: f64 = 0.0;
    for (i, &t1) in times.iter().enumerate().take(3) {
        for (j, &t2) in times.iter().enumerate().take(3) {
            let c = at[i].commutator(&at[j].adjoint());
            let (f1, f2) = (form(t1), form(t2).adjoint());
            for idx in space.safe_indices() {
                let mf = f1.commutator_apply(&f2, &space, &basis_state(idx));
                for (r, v) in &mf {
                    agree = agree.max((c.get(*r as usize, idx as usize) - v).norm());
                }
            }
        }
    }

    // (iii) two directional branches on 2M modes, matrix-free.
    let two = FockSpace { modes: 2 * m, n_max: sys.n_max() };
    let directional = |tau: f64, sigma: f64, t: f64| -> LadderForm {
        let off = if sigma > 0.0 { 0 } else { m };
        LadderForm::annihilation(
            (0..m).map(|k| (off + k, phase(-2.0 * PI * band.freq(k) * (t - sigma * tau)) * df.sqrt())).collect(),
        )
    };
    let localized = |tau: f64, t: f64| -> LadderForm {
        let mut f = directional(tau, 1.0, t);
        f.terms.extend(directional(tau, -1.0, t).terms);
        f
    };
    let dt = band.delta_t();
    let events = [(0.0, 0.0, 0.3 * dt, 0.3 * dt), (1.2 * dt, 0.5 * dt, -0.7 * dt, 0.2 * dt), (0.4 * dt, 2.1 * dt, 0.0, 1.3 * dt)];
    let mut worst_loc: f64 = 0.0;
    let mut worst_dir: f64 = 0.0;
    for &(t1, t2, tau1, tau2) in &events {
        let (d_t, d_tau) = (t1 - t2, tau1 - tau2);
        let expected = band.band_kernel(d_t - d_tau) + band.band_kernel(d_t + d_tau);
        worst_loc = worst_loc.max(scalar_commutator_residual(&localized(tau1, t1), &localized(tau2, t2).adjoint(), expected, &two));
        for &s1 in &[1.0, -1.0] {
            for &s2 in &[1.0, -1.0] {
                let e = if s1 == s2 { band.band_kernel(d_t - s1 * d_tau) } else { ZERO };
                let r = scalar_commutator_residual(&directional(tau1, s1, t1), &directional(tau2, s2, t2).adjoint(), e, &two);
                worst_dir = worst_dir.max(r);
            }
        }
    }
    ids.push(IdentityResidual { name: "localized_two_branch", max_residual: worst_loc, cases: events.len() });
    ids.push(IdentityResidual { name: "directional_time", max_residual: worst_dir, cases: 4 * events.len() });

    let freq_dir = |k: usize, sigma: f64, tau: f64| -> LadderForm {
        let off = if sigma > 0.0 { 0 } else { m };
        LadderForm::annihilation(vec![(off + k, phase(2.0 * PI * sigma * band.freq(k) * tau) / df.sqrt())])
    };
    let (tau1, tau2) = (0.35 * dt, -0.8 * dt);
    let mut worst_fd: f64 = 0.0;
    for k in 0..m {
        for kk in 0..m {
            for &s1 in &[1.0, -1.0] {
                for &s2 in &[1.0, -1.0] {
                    let e = if s1 == s2 && k == kk { phase(s1 * 2.0 * PI * band.freq(k) * (tau1 - tau2)) / df } else { ZERO };
                    let r = scalar_commutator_residual(&freq_dir(k, s1, tau1), &freq_dir(kk, s2, tau2).adjoint(), e, &two);
                    worst_fd = worst_fd.max(r);
                }
            }
        }
    }
    ids.push(IdentityResidual { name: "directional_frequency", max_residual: worst_fd, cases: 4 * m * m });

    // (iv) Heisenberg evolution.
    let pairs = [(0.0, 0.0), (0.3 * dt, -0.2 * dt), (1.7 * dt, 0.4 * dt)];
    let mut worst: f64 = 0.0;
    for &(s1, s2) in &pairs {
        for k in 0..m {
            for kk in 0..m {
                let a1 = sys.heisenberg(&af[k], consts, s1);
                let a2 = sys.heisenberg(&af[kk], consts, s2).adjoint();
                let e = if k == kk { phase(-2.0 * PI * band.freq(k) * (s1 - s2)) / df } else { ZERO };
                worst = worst.max(sys.safe_residual(&a1.commutator(&a2), e));
            }
        }
        for (i, &t1) in times.iter().enumerate().take(3) {
            for (j, &t2) in times.iter().enumerate().take(3) {
                let a1 = sys.heisenberg(&at[i], consts, s1);
                let a2 = sys.heisenberg(&at[j], consts, s2).adjoint();
                worst = worst.max(sys.safe_residual(&a1.commutator(&a2), band.band_kernel(t1 - t2 + s1 - s2)));
            }
        }
    }
    ids.push(IdentityResidual { name: "time_evolved", max_residual: worst, cases: pairs.len() * (m * m + 9) });

    let rep = sys.single_particle(consts);
    let herm = [sys.hamiltonian(consts), sys.theta(&rep), sys.number_symmetric()]
        .iter()
        .map(|o| o.hermiticity_defect())
        .fold(0.0, f64::max);
    CommutatorSuiteReport { m, n_max: sys.n_max(), identities: ids, hermiticity_defect: herm, matrix_free_agreement: agree }
}

/// Packet mode on the system's band: `A = Σ_k c_k* b_k` with `c_k = √Δf·φ~(f_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PacketModes {
    pub c: Vec<Complex64>,
}

impl PacketModes {
    pub fn from_packet(p: &PhotonPacket, sys: &ModeSystem) -> Self {
        let band = sys.band();
        let s = band.delta_f.sqrt();
        PacketModes { c: (0..sys.m()).map(|k| p.spectrum_at(band.freq(k)) * s).collect() }
    }

    /// Scalar part of `[A, A†]`.
    pub fn weight(&self) -> f64 {
        self.c.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn creation(&self) -> LadderForm {
        LadderForm { terms: self.c.iter().copied().enumerate().collect(), creation: true }
    }

    pub fn annihilation(&self) -> LadderForm {
        self.creation().adjoint()
    }

    /// Renormalized to `Σ|c_k|² = 1`.
    pub fn normalized(&self) -> Self {
        let w = self.weight().sqrt();
        PacketModes { c: self.c.iter().map(|c| c / w).collect() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BosonicCheck {
    /// Scalar part of `[A, A†]`: `Δf·Σ_k|φ~(f_k)|²`.
    pub commutator: f64,
    /// Largest deviation of the matrix-free `[A, A†]` from that scalar on the safe subspace.
    pub operator_residual: f64,
    /// Spectral weight of the packet outside the band `(0, M·Δf)`.
    pub leakage: f64,
}

/// `[A, A†]` for a packet resampled onto the band.
pub fn packet_bosonic_check(p: &PhotonPacket, sys: &ModeSystem) -> BosonicCheck {
    let modes = PacketModes::from_packet(p, sys);
    let w = modes.weight();
    let r = scalar_commutator_residual(&modes.annihilation(), &modes.creation(), Complex64::new(w, 0.0), &sys.space());
    let band_top = sys.m() as f64 * sys.delta_f();
    let leakage = out_of_band_weight(p, band_top);
    BosonicCheck { commutator: w, operator_residual: r, leakage }
}

/// `∫|φ~|² df` outside `(0, top)`, by trapezoid sums of the analytic spectrum.
fn out_of_band_weight(p: &PhotonPacket, top: f64) -> f64 {
    let g = p.grid();
    let fmax = g.f_max();
    let n = 20_000;
    let integrate = |a: f64, b: f64| {
        if b <= a {
            return 0.0;
        }
        let h = (b - a) / n as f64;
        (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * p.spectrum_at(a + i as f64 * h).norm_sqr()
            })
            .sum::<f64>()
            * h
    };
    integrate(-fmax, 0.0) + integrate(top, fmax.max(top))
}

fn vec_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn dense_from_sparse(sys: &ModeSystem, s: &SparseState) -> Vec<Complex64> {
    let mut v = vec![ZERO; sys.dim()];
    for (&i, &a) in s {
        v[i as usize] = a;
    }
    v
}

/// `(A†)^N/√N!|vac⟩`, renormalized to unit norm.
pub fn fock_packet_state(sys: &ModeSystem, modes: &PacketModes, n: usize) -> Result<Vec<Complex64>, AlgebraError> {
    let space = sys.space();
    let mut s = basis_state(0);
    let up = modes.creation();
    for _ in 0..n {
        s = up.apply(&space, &s);
    }
    finish_state(sys, dense_from_sparse(sys, &s))
}

/// Product of per-mode truncated coherent states with amplitudes `β_k = α·c_k`, renormalized.
pub fn coherent_packet_state(sys: &ModeSystem, modes: &PacketModes, alpha: Complex64) -> Result<Vec<Complex64>, AlgebraError> {
    let n_max = sys.n_max();
    let per_mode: Vec<Vec<Complex64>> = modes
        .c
        .iter()
        .map(|&c| {
            let beta = alpha * c;
            let mut amp = Complex64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
            let mut v = Vec::with_capacity(n_max + 1);
            for n in 0..=n_max {
                if n > 0 {
                    amp = amp * beta / (n as f64).sqrt();
                }
                v.push(amp);
            }
            v
        })
        .collect();
    let space = sys.space();
    let v = (0..sys.dim())
        .map(|i| (0..sys.m()).map(|k| per_mode[k][space.occupation(i as u64, k)]).product())
        .collect();
    finish_state(sys, v)
}

/// Single-mode Fock state `b_k†|vac⟩` (an H eigenstate).
pub fn single_bin_state(sys: &ModeSystem, k: usize) -> Vec<Complex64> {
    let mut occ = vec![0; sys.m()];
    occ[k] = 1;
    let mut v = vec![ZERO; sys.dim()];
    v[sys.space().index(&occ) as usize] = ONE;
    v
}

/// Weight on basis vectors with some occupation at the cutoff.
pub fn cutoff_weight(sys: &ModeSystem, psi: &[Complex64]) -> f64 {
    let space = sys.space();
    psi.iter().enumerate().filter(|(i, _)| !space.is_safe(*i as u64)).map(|(_, a)| a.norm_sqr()).sum()
}

fn finish_state(sys: &ModeSystem, v: Vec<Complex64>) -> Result<Vec<Complex64>, AlgebraError> {
    let nrm = vec_norm(&v);
    if nrm == 0.0 {
        return Err(AlgebraError::ZeroState);
    }
    let v: Vec<Complex64> = v.into_iter().map(|a| a / nrm).collect();
    let w = cutoff_weight(sys, &v);
    if w > TRUNCATION_TOLERANCE {
        return Err(AlgebraError::Truncation { weight: w, limit: TRUNCATION_TOLERANCE });
    }
    Ok(v)
}

/// Per-state outcome of `[H, θ] = iħN`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockCommutatorResult {
    /// `‖([H,θ] − iħN)ψ‖/‖Nψ‖` with normal-ordered N; `None` when `Nψ = 0`.
    pub residual: Option<f64>,
    /// The same divided by ħ.
    pub residual_over_hbar: Option<f64>,
    /// With symmetric-ordered N (vacuum constant M/2 included).
    pub residual_symmetric: f64,
    /// `⟨ψ|[H,θ]|ψ⟩`.
    pub commutator_expectation: Complex64,
    /// `iħ⟨N⟩`, normal-ordered.
    pub ihbar_n: Complex64,
}

/// `[H, θ]` on the system, built as a sparse matrix.
pub fn h_theta_commutator(sys: &ModeSystem, consts: PhysConsts) -> CsrMatrix {
    let rep = sys.single_particle(consts);
    sys.hamiltonian(consts).commutator(&sys.theta(&rep))
}

pub fn fock_commutator_check(sys: &ModeSystem, consts: PhysConsts, states: &[Vec<Complex64>]) -> Result<Vec<FockCommutatorResult>, AlgebraError> {
    let c = h_theta_commutator(sys, consts);
    let nn = sys.number_normal();
    let ns = sys.number_symmetric();
    let ih = Complex64::new(0.0, consts.hbar());
    states
        .iter()
        .map(|psi| {
            if psi.len() != sys.dim() {
                return Err(AlgebraError::StateLength { expected: sys.dim(), got: psi.len() });
            }
            let cpsi = c.apply(psi);
            let npsi = nn.apply(psi);
            let spsi = ns.apply(psi);
            let r: Vec<Complex64> = cpsi.iter().zip(&npsi).map(|(a, b)| a - ih * b).collect();
            let rs: Vec<Complex64> = cpsi.iter().zip(&spsi).map(|(a, b)| a - ih * b).collect();
            let nn_norm = vec_norm(&npsi);
            let residual = (nn_norm > 0.0).then(|| vec_norm(&r) / nn_norm);
            let expect: Complex64 = psi.iter().zip(&cpsi).map(|(a, b)| a.conj() * b).sum();
            let n_mean: Complex64 = psi.iter().zip(&npsi).map(|(a, b)| a.conj() * b).sum();
            Ok(FockCommutatorResult {
                residual,
                residual_over_hbar: residual.map(|r| r / consts.hbar()),
                residual_symmetric: vec_norm(&rs) / vec_norm(&spsi),
                commutator_expectation: expect,
                ihbar_n: ih * n_mean,
            })
        })
        .collect()
}

/// Exact matrix moments of θ, H and N in one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaMoments {
    /// Symmetric-ordered ⟨θ⟩ (includes ½·tr T̂, which is 0 on the centered grid).
    pub theta_mean: f64,
    pub theta_mean_normal: f64,
    pub theta_variance: f64,
    /// Symmetric-ordered ⟨H⟩.
    pub h_mean: f64,
    pub h_variance: f64,
    pub n_normal: f64,
    pub n_symmetric: f64,
    /// Weight on basis vectors at the occupation cutoff.
    pub cutoff_weight: f64,
}

pub fn theta_variance_oracle(sys: &ModeSystem, consts: PhysConsts, psi: &[Complex64]) -> Result<ThetaMoments, AlgebraError> {
    if psi.len() != sys.dim() {
        return Err(AlgebraError::StateLength { expected: sys.dim(), got: psi.len() });
    }
    let w = cutoff_weight(sys, psi);
    if w > TRUNCATION_TOLERANCE {
        return Err(AlgebraError::Truncation { weight: w, limit: TRUNCATION_TOLERANCE });
    }
    let rep = sys.single_particle(consts);
    let theta = sys.theta(&rep);
    let theta_n = sys.theta_normal(&rep);
    let h = sys.hamiltonian(consts);
    let norm2: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
    let ev = |op: &CsrMatrix| op.expectation(psi).re / norm2;
    let ev2 = |op: &CsrMatrix| {
        let y = op.apply(psi);
        y.iter().map(|a| a.norm_sqr()).sum::<f64>() / norm2
    };
    let tm = ev(&theta);
    let hm = ev(&h);
    Ok(ThetaMoments {
        theta_mean: tm,
        theta_mean_normal: ev(&theta_n),
        theta_variance: (ev2(&theta) - tm * tm).max(0.0),
        h_mean: hm,
        h_variance: (ev2(&h) - hm * hm).max(0.0),
        n_normal: ev(&sys.number_normal()),
        n_symmetric: ev(&sys.number_symmetric()),
        cutoff_weight: w,
    })
}
