//! Occupation-basis matrix of the second quantization `Γ(Λ)`.
//!
//! `G_{Γ(Λ)}(u,v) = exp(uᵀΛv) = Π_{ij} exp(uᵢΛᵢⱼvⱼ)`, so `⟨k|Γ(Λ)|l⟩` is
//! `√(k!l!)` times the sum over nonnegative integer matrices `R` with row
//! sums `k` and column sums `l` of `Π Λᵢⱼ^{Rᵢⱼ}/Rᵢⱼ!`. It vanishes unless
//! `|k| = |l|`: `Γ(Λ)` preserves every shell.

use super::{Basis, MultiIndex};
use crate::{C64, CMat};

/// `⟨k|Γ(Λ)|l⟩` by exhaustive enumeration of the contributing integer
/// matrices. The number of such matrices grows exponentially with `|k|`
/// and `n`; use [`gamma_lambda_blocks`] for whole shells.
pub fn gamma_lambda_entry(lambda: &CMat, k: &MultiIndex, l: &MultiIndex) -> C64 {
    let n = k.n();
    if k.total() != l.total() {
        return C64::new(0.0, 0.0);
    }
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut rows = k.0.clone();
    let mut cols = l.0.clone();
    let mut total = C64::new(0.0, 0.0);
    // Depth-first over cells (i, j) row by row; the last cell of each row is
    // forced by the remaining row budget.
    fn visit(
        lambda: &CMat,
        n: usize,
        cell: usize,
        rows: &mut Vec<usize>,
        cols: &mut Vec<usize>,
        acc: C64,
        total: &mut C64,
    ) {
        if cell == n * n {
            if cols.iter().all(|&c| c == 0) {
                *total += acc;
            }
            return;
        }
        let (i, j) = (cell / n, cell % n);
        let choices: Vec<usize> = if j == n - 1 {
            if rows[i] <= cols[j] {
                vec![rows[i]]
            } else {
                vec![]
            }
        } else {
            (0..=rows[i].min(cols[j])).collect()
        };
        for r in choices {
            rows[i] -= r;
            cols[j] -= r;
            let term = lambda[(i, j)].powu(r as u32) / super::factorial(r);
            visit(lambda, n, cell + 1, rows, cols, acc * term, total);
            rows[i] += r;
            cols[j] += r;
        }
    }
    visit(lambda, n, 0, &mut rows, &mut cols, C64::new(1.0, 0.0), &mut total);
    total * (k.factorial() * l.factorial()).sqrt()
}

/// The diagonal blocks of `Γ(Λ)`, one per shell `0..=cutoff`, each indexed
/// by the shell's basis order.
///
/// Built shell by shell from `Γ(Λ)a†ⱼ = (Σᵢ Λᵢⱼ a†ᵢ)Γ(Λ)`: writing
/// `|l⟩ = a†ⱼ|l − eⱼ⟩/√lⱼ` gives
/// `⟨k|Γ(Λ)|l⟩ = lⱼ^{−1/2} Σᵢ Λᵢⱼ √kᵢ ⟨k − eᵢ|Γ(Λ)|l − eⱼ⟩`.
pub fn gamma_lambda_blocks(lambda: &CMat, basis: &Basis) -> Vec<CMat> {
    let n = basis.n();
    let mut blocks: Vec<CMat> = Vec::with_capacity(basis.cutoff() + 1);
    blocks.push(CMat::from_element(1, 1, C64::new(1.0, 0.0)));
    for m in 1..=basis.cutoff() {
        let range = basis.shell(m);
        let prev = basis.shell(m - 1);
        let prev_block = &blocks[m - 1];
        let d = range.len();
        let mut block = CMat::zeros(d, d);
        for (col, li) in range.clone().enumerate() {
            let l = basis.get(li);
            let j = l.0.iter().position(|&x| x > 0).expect("nonzero shell");
            let mut lp = l.clone();
            lp.0[j] -= 1;
            let lp_local = basis.index_of(&lp).expect("lower shell inside window") - prev.start;
            let scale = 1.0 / (l.0[j] as f64).sqrt();
            for (row, ki) in range.clone().enumerate() {
                let k = basis.get(ki);
                let mut s = C64::new(0.0, 0.0);
                for i in 0..n {
                    if k.0[i] == 0 || lambda[(i, j)] == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let mut kp = k.clone();
                    kp.0[i] -= 1;
                    let kp_local = basis.index_of(&kp).expect("lower shell inside window") - prev.start;
                    s += lambda[(i, j)] * (k.0[i] as f64).sqrt() * prev_block[(kp_local, lp_local)];
                }
                block[(row, col)] = s * scale;
            }
        }
        blocks.push(block);
    }
    blocks
}
