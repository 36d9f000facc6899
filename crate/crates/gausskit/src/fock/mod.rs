//! Particle-basis constructions on a truncated window.
//!
//! The window is `{t ∈ ℤ₊ⁿ : |t| ≤ N}` ordered by shells of increasing total
//! number `|t|`; inside a shell, multi-indices come in descending
//! lexicographic order, so the one-particle vectors are `χ₁, …, χₙ` and the
//! two-particle vectors are `χ₁₁, χ₁₂, …, χₙₙ`. In this order `E_A` is unit
//! lower triangular and `Γ(Λ)` is block diagonal across shells.
//!
//! Matrix entries of an E₂ operator follow from its generating function:
//! `⟨r|Z|s⟩` is `√(r!s!)` times the coefficient of `uʳvˢ` in `G_Z(u,v)`.

mod delta;
mod gamma;
mod matrices;

use std::collections::HashMap;

use crate::{C64, CMat, CVec};

pub use delta::{enumerate_delta, phi, PhiTable, UpperTriangularCount};
pub use gamma::{gamma_lambda_blocks, gamma_lambda_entry};
pub use matrices::{
    density_matrix, dmf, e_a_matrix, exp_quadratic_coefficients, general_truncate, matrix_element, number_diagonal,
    pure_state_vector, state_vector, z1_matrix,
};

/// Occupation numbers `t = (t₁, …, tₙ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// `|t| = Σ tⱼ`.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// `t! = Π tⱼ!`.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&k| factorial(k)).product()
    }

    /// `s ≤ t` componentwise.
    pub fn le(&self, t: &MultiIndex) -> bool {
        self.0.iter().zip(&t.0).all(|(a, b)| a <= b)
    }

    /// `binom(t, s) = Π binom(tⱼ, sⱼ)`, zero unless `s ≤ t`.
    pub fn binom(&self, s: &MultiIndex) -> f64 {
        if !s.le(self) {
            return 0.0;
        }
        self.0.iter().zip(&s.0).map(|(&t, &s)| binomial(t, s)).product()
    }

    /// `t ∧ t′`, the componentwise minimum.
    pub fn meet(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    /// `t − s` when `s ≤ t`.
    pub fn checked_sub(&self, s: &MultiIndex) -> Option<MultiIndex> {
        s.le(self).then(|| MultiIndex(self.0.iter().zip(&s.0).map(|(a, b)| a - b).collect()))
    }

    /// `zᵗ = Π zⱼ^{tⱼ}`.
    pub fn power(&self, z: &[C64]) -> C64 {
        self.0.iter().zip(z).fold(C64::new(1.0, 0.0), |acc, (&k, w)| acc * w.powu(k as u32))
    }

    /// All `s ≤ self` (the box below `t`), in lexicographic order.
    pub fn below(&self) -> Vec<MultiIndex> {
        let mut out = vec![Vec::with_capacity(self.n())];
        for &k in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=k).map(move |v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(MultiIndex).collect()
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex(v)
    }
}

/// `k!` in floating point.
pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `binom(n, k)` in floating point.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The graded particle basis of `n` modes with total number at most `cutoff`.
#[derive(Clone, Debug)]
pub struct Basis {
    n: usize,
    cutoff: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    shell_start: Vec<usize>,
}

impl Basis {
    pub fn new(n: usize, cutoff: usize) -> Self {
        fn shell(n: usize, m: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if n == 0 {
                if m == 0 {
                    out.push(MultiIndex(prefix.clone()));
                }
                return;
            }
            if prefix.len() + 1 == n {
                prefix.push(m);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for first in (0..=m).rev() {
                prefix.push(first);
                shell(n, m - first, prefix, out);
                prefix.pop();
            }
        }
        let mut indices = Vec::new();
        let mut shell_start = Vec::with_capacity(cutoff + 2);
        for m in 0..=cutoff {
            shell_start.push(indices.len());
            shell(n, m, &mut Vec::with_capacity(n), &mut indices);
        }
        shell_start.push(indices.len());
        let lookup = indices.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Basis { n, cutoff, indices, lookup, shell_start }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `C(N + n, n)`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn get(&self, i: usize) -> &MultiIndex {
        &self.indices[i]
    }

    /// Position of `t` in the basis, if inside the window.
    pub fn index_of(&self, t: &MultiIndex) -> Option<usize> {
        self.lookup.get(t).copied()
    }

    /// Index range of the shell `|t| = m`.
    pub fn shell(&self, m: usize) -> std::ops::Range<usize> {
        self.shell_start[m]..self.shell_start[m + 1]
    }
}

/// Total-number tail estimate of a truncated trace-one object.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailReport {
    /// `max(0, 1 − trace)` on the window.
    pub deficit: f64,
    /// Advisory geometric extrapolation of the mass beyond the cutoff, from
    /// the last two nonzero shells.
    pub extrapolated: f64,
}

impl TailReport {
    /// Builds the report from per-shell masses `m₀, …, m_N`.
    pub fn from_shell_masses(masses: &[f64]) -> Self {
        let total: f64 = masses.iter().sum();
        let nonzero: Vec<(usize, f64)> =
            masses.iter().copied().enumerate().filter(|&(_, m)| m > 1e-300).collect();
        let extrapolated = match nonzero.as_slice() {
            [.., (i, a), (j, b)] if b < a => {
                let q = (b / a).powf(1.0 / (j - i) as f64);
                let last = masses.len() - 1;
                // Geometric continuation from shell j onwards, past the cutoff.
                b * q.powi((last + 1 - j) as i32) / (1.0 - q)
            }
            [.., (_, _), (_, _)] => f64::INFINITY,
            _ => 0.0,
        };
        TailReport { deficit: (1.0 - total).max(0.0), extrapolated }
    }
}

/// A dense complex matrix over the truncated particle basis.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    pub basis: Basis,
    pub entries: CMat,
    /// Set when the entries are known to form a hermitian matrix.
    pub hermitian: bool,
}

impl TruncatedOperator {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn cutoff(&self) -> usize {
        self.basis.cutoff()
    }

    /// `⟨t|Z|t′⟩`, or `None` outside the window.
    pub fn entry(&self, t: &MultiIndex, tp: &MultiIndex) -> Option<C64> {
        Some(self.entries[(self.basis.index_of(t)?, self.basis.index_of(tp)?)])
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// Real parts of the diagonal summed per shell.
    pub fn shell_masses(&self) -> Vec<f64> {
        (0..=self.cutoff()).map(|m| self.basis.shell(m).map(|i| self.entries[(i, i)].re).sum()).collect()
    }

    pub fn tail(&self) -> TailReport {
        TailReport::from_shell_masses(&self.shell_masses())
    }

    /// Frobenius norm of the difference with another operator on the same window.
    pub fn frobenius_distance(&self, other: &TruncatedOperator) -> f64 {
        (&self.entries - &other.entries).norm()
    }
}

/// A dense complex vector over the truncated particle basis.
#[derive(Clone, Debug)]
pub struct TruncatedVector {
    pub basis: Basis,
    pub entries: CVec,
}

impl TruncatedVector {
    /// `⟨t|ψ⟩`, or `None` outside the window.
    pub fn entry(&self, t: &MultiIndex) -> Option<C64> {
        Some(self.entries[self.basis.index_of(t)?])
    }

    pub fn norm_squared(&self) -> f64 {
        self.entries.norm_squared()
    }

    /// Squared moduli summed per shell.
    pub fn shell_masses(&self) -> Vec<f64> {
        (0..=self.basis.cutoff()).map(|m| self.basis.shell(m).map(|i| self.entries[i].norm_sqr()).sum()).collect()
    }

    pub fn tail(&self) -> TailReport {
        TailReport::from_shell_masses(&self.shell_masses())
    }
}
