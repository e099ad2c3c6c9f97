//! Occupation-number bases and matrix-free linear ladder forms.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Product basis of `modes` bosonic modes with occupations `0..=n_max`.
/// Mode 0 is the most significant digit, matching Kronecker order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockSpace {
    pub modes: usize,
    pub n_max: usize,
}

impl FockSpace {
    pub fn base(&self) -> u64 {
        self.n_max as u64 + 1
    }

    /// Total dimension, or `None` on overflow.
    pub fn dim(&self) -> Option<u64> {
        let mut d: u64 = 1;
        for _ in 0..self.modes {
            d = d.checked_mul(self.base())?;
        }
        Some(d)
    }

    fn stride(&self, mode: usize) -> u64 {
        self.base().pow((self.modes - 1 - mode) as u32)
    }

    pub fn occupation(&self, index: u64, mode: usize) -> usize {
        ((index / self.stride(mode)) % self.base()) as usize
    }

    pub fn occupations(&self, index: u64) -> Vec<usize> {
        (0..self.modes).map(|k| self.occupation(index, k)).collect()
    }

    pub fn index(&self, occ: &[usize]) -> u64 {
        occ.iter().fold(0u64, |acc, &n| acc * self.base() + n as u64)
    }

    pub fn total(&self, index: u64) -> usize {
        (0..self.modes).map(|k| self.occupation(index, k)).sum()
    }

    /// True when every occupation is at most `n_max − 1`, where `[b, b†] = 1` holds exactly.
    pub fn is_safe(&self, index: u64) -> bool {
        (0..self.modes).all(|k| self.occupation(index, k) < self.n_max)
    }

    /// All safe basis indices, in increasing order.
    pub fn safe_indices(&self) -> Vec<u64> {
        let sub = FockSpace { modes: self.modes, n_max: self.n_max.saturating_sub(1) };
        let count = if self.n_max == 0 { 0 } else { sub.dim().expect("safe subspace fits in u64") };
        (0..count).map(|i| self.index(&sub.occupations(i))).collect()
    }

    /// `b_k|index⟩ = √n_k |index − e_k⟩`.
    pub fn lower(&self, index: u64, mode: usize) -> Option<(u64, f64)> {
        let n = self.occupation(index, mode);
        (n > 0).then(|| (index - self.stride(mode), (n as f64).sqrt()))
    }

    /// `b_k†|index⟩ = √(n_k+1) |index + e_k⟩`, zero at the cutoff.
    pub fn raise(&self, index: u64, mode: usize) -> Option<(u64, f64)> {
        let n = self.occupation(index, mode);
        (n < self.n_max).then(|| (index + self.stride(mode), ((n + 1) as f64).sqrt()))
    }
}

/// Sparse state vector keyed by basis index.
pub type SparseState = BTreeMap<u64, Complex64>;

pub fn basis_state(index: u64) -> SparseState {
    let mut s = SparseState::new();
    s.insert(index, Complex64::new(1.0, 0.0));
    s
}

/// `Σ_k c_k b_k` (annihilation form) or `Σ_k c_k b_k†` (creation form).
#[derive(Clone, Debug, PartialEq)]
pub struct LadderForm {
    pub terms: Vec<(usize, Complex64)>,
    pub creation: bool,
}

impl LadderForm {
    pub fn annihilation(terms: Vec<(usize, Complex64)>) -> Self {
        LadderForm { terms, creation: false }
    }

    pub fn adjoint(&self) -> Self {
        LadderForm { terms: self.terms.iter().map(|&(k, c)| (k, c.conj())).collect(), creation: !self.creation }
    }

    pub fn apply(&self, space: &FockSpace, state: &SparseState) -> SparseState {
        let mut out = SparseState::new();
        for (&idx, &amp) in state {
            for &(k, c) in &self.terms {
                let step = if self.creation { space.raise(idx, k) } else { space.lower(idx, k) };
                if let Some((j, w)) = step {
                    *out.entry(j).or_insert(Complex64::new(0.0, 0.0)) += amp * c * w;
                }
            }
        }
        out
    }

    /// `[self, other]|state⟩`.
    pub fn commutator_apply(&self, other: &LadderForm, space: &FockSpace, state: &SparseState) -> SparseState {
        let ab = self.apply(space, &other.apply(space, state));
        let ba = other.apply(space, &self.apply(space, state));
        let mut out = ab;
        for (j, v) in ba {
            *out.entry(j).or_insert(Complex64::new(0.0, 0.0)) -= v;
        }
        out
    }
}

/// Largest entry of `[a, b]|e⟩ − c·|e⟩` over every safe basis vector `e`.
pub fn scalar_commutator_residual(a: &LadderForm, b: &LadderForm, expected: Complex64, space: &FockSpace) -> f64 {
    let mut worst: f64 = 0.0;
    for idx in space.safe_indices() {
        let out = a.commutator_apply(b, space, &basis_state(idx));
        let mut diag_seen = false;
        for (j, v) in out {
            let e = if j == idx {
                diag_seen = true;
                expected
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((v - e).norm());
        }
        if !diag_seen {
            worst = worst.max(expected.norm());
        }
    }
    worst
}
