//! The index sets `Δ(t)` and the coefficient function `φ_B`.
//!
//! For an upper-triangular nonnegative integer matrix `R`, let
//! `r̃(R)ᵢ = Σ_{j≤i} r_{ji} + Σ_{j≥i} r_{ij}` (so diagonal entries count
//! twice) and `Δ(t) = {R : r̃(R) = t}`. Then
//!
//! ```text
//! φ_B(t) = √(t!) Σ_{R∈Δ(t)} 2^{|R| − tr R} B^{∘R} / R!,
//! exp(zᵀBz) = Σ_t φ_B(t) zᵗ / √(t!),
//! ```
//!
//! where `B^{∘R} = Π b_{ij}^{r_{ij}}` and `R! = Π r_{ij}!`. `Δ(t)` is empty
//! whenever `|t|` is odd.

use rayon::prelude::*;

use super::{factorial, Basis, MultiIndex};
use crate::{C64, CMat};

/// An upper-triangular matrix of nonnegative integers, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpperTriangularCount {
    n: usize,
    r: Vec<usize>,
}

impl UpperTriangularCount {
    /// Builds from a full row-major `n×n` array; entries below the diagonal
    /// must vanish.
    pub fn from_rows(rows: &[Vec<usize>]) -> Option<Self> {
        let n = rows.len();
        let mut r = vec![0; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return None;
            }
            for (j, &v) in row.iter().enumerate() {
                if j < i && v != 0 {
                    return None;
                }
                r[i * n + j] = v;
            }
        }
        Some(UpperTriangularCount { n, r })
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.r[i * self.n + j]
    }

    /// `|R| = Σ r_{ij}`.
    pub fn total(&self) -> usize {
        self.r.iter().sum()
    }

    /// `tr R = Σ r_{ii}`.
    pub fn trace(&self) -> usize {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `R! = Π r_{ij}!`.
    pub fn factorial(&self) -> f64 {
        self.r.iter().map(|&k| factorial(k)).product()
    }

    /// `r̃(R)`.
    pub fn r_tilde(&self) -> MultiIndex {
        MultiIndex(
            (0..self.n)
                .map(|i| (0..=i).map(|j| self.get(j, i)).sum::<usize>() + (i..self.n).map(|j| self.get(i, j)).sum::<usize>())
                .collect(),
        )
    }

    /// `B^{∘R} = Π b_{ij}^{r_{ij}}` over the upper triangle.
    pub fn power_of(&self, b: &CMat) -> C64 {
        let mut out = C64::new(1.0, 0.0);
        for i in 0..self.n {
            for j in i..self.n {
                let k = self.get(i, j);
                if k > 0 {
                    out *= b[(i, j)].powu(k as u32);
                }
            }
        }
        out
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.r.chunks(self.n.max(1)).map(|c| c.to_vec()).collect()
    }
}

/// All `R ∈ Δ(t)` in a deterministic order.
///
/// Cells of the upper triangle are visited row by row; an off-diagonal cell
/// `(i,j)` draws from the remaining budgets of both `tᵢ` and `tⱼ` and a
/// diagonal cell draws twice from `tᵢ`. Row `i` is the last place budget `i`
/// can be spent, so its final cell is forced and dead branches are cut there.
pub fn enumerate_delta(t: &MultiIndex) -> Vec<UpperTriangularCount> {
    let n = t.n();
    let mut out = Vec::new();
    if t.total() % 2 == 1 {
        return out;
    }
    let mut r = vec![0usize; n * n];
    let mut budget = t.0.clone();
    fn visit(
        n: usize,
        i: usize,
        j: usize,
        r: &mut Vec<usize>,
        budget: &mut Vec<usize>,
        out: &mut Vec<UpperTriangularCount>,
    ) {
        if i == n {
            out.push(UpperTriangularCount { n, r: r.clone() });
            return;
        }
        if j == i {
            // Diagonal cell.
            if i == n - 1 {
                if budget[i].is_multiple_of(2) {
                    let k = budget[i] / 2;
                    r[i * n + i] = k;
                    budget[i] = 0;
                    visit(n, n, n, r, budget, out);
                    budget[i] = 2 * k;
                    r[i * n + i] = 0;
                }
                return;
            }
            let max = budget[i] / 2;
            for k in 0..=max {
                r[i * n + i] = k;
                budget[i] -= 2 * k;
                visit(n, i, i + 1, r, budget, out);
                budget[i] += 2 * k;
            }
            r[i * n + i] = 0;
            return;
        }
        if j == n - 1 {
            // Last cell of row i must exhaust budget i.
            let k = budget[i];
            if k <= budget[j] {
                r[i * n + j] = k;
                budget[i] = 0;
                budget[j] -= k;
                visit(n, i + 1, i + 1, r, budget, out);
                budget[j] += k;
                budget[i] = k;
                r[i * n + j] = 0;
            }
            return;
        }
        let max = budget[i].min(budget[j]);
        for k in 0..=max {
            r[i * n + j] = k;
            budget[i] -= k;
            budget[j] -= k;
            visit(n, i, j + 1, r, budget, out);
            budget[i] += k;
            budget[j] += k;
        }
        r[i * n + j] = 0;
    }
    if n == 0 {
        out.push(UpperTriangularCount { n: 0, r });
        return out;
    }
    visit(n, 0, 0, &mut r, &mut budget, &mut out);
    out
}

/// `φ_B(t) = √(t!) Σ_{R∈Δ(t)} 2^{|R| − tr R} B^{∘R}/R!`.
pub fn phi(b: &CMat, t: &MultiIndex) -> C64 {
    let sum = enumerate_delta(t).iter().fold(C64::new(0.0, 0.0), |acc, r| {
        let weight = 2f64.powi((r.total() - r.trace()) as i32) / r.factorial();
        acc + r.power_of(b) * weight
    });
    sum * t.factorial().sqrt()
}

/// `φ_B(t)` for every `t` of a basis, evaluated once and then shared
/// read-only (the memo behind every matrix assembly).
#[derive(Clone, Debug)]
pub struct PhiTable {
    values: Vec<C64>,
}

impl PhiTable {
    pub fn new(b: &CMat, basis: &Basis) -> Self {
        let values = basis.indices().par_iter().map(|t| phi(b, t)).collect();
        PhiTable { values }
    }

    /// `φ_B(t)` for the basis element with index `i`.
    pub fn get(&self, i: usize) -> C64 {
        self.values[i]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }
}
