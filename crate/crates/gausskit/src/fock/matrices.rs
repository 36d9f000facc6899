//! Truncated particle-basis matrices of E₂ operators.
//!
//! Every matrix here has the shape `L·Γ(K)·Rᵀ` (or `L·Γ(K)·R†`) with `L`,
//! `R` lower triangular in the graded order and `Γ(K)` block diagonal. For
//! example the density matrix formula reads `ρ = c(A,Λ)·E_A·Γ(Λ)·E_A†` with
//! `E_A(t,s) = √binom(t,s)·φ_A(t−s)`. All such products are exact on the
//! window: the lower-triangular factors never reach outside it.

use rayon::prelude::*;

use super::delta::PhiTable;
use super::gamma::gamma_lambda_blocks;
use super::{gamma_lambda_entry, phi, Basis, MultiIndex, TruncatedOperator, TruncatedVector};
use crate::linalg::{c_factor, check_symmetric, spectral_norm, sqrt_psd};
use crate::params::{is_valid_state, E2Params, GeneralE2Params};
use crate::{C64, CMat, CVec, Error, Result};

/// Row-sparse lower-triangular factor: row `t` lists `(s, value)` for `s ≤ t`.
struct SparseRows {
    rows: Vec<Vec<(usize, C64)>>,
}

impl SparseRows {
    /// Rows `L(t, t − k) = weight(t, k)` over all `k ≤ t`, skipping zeros.
    fn build(basis: &Basis, weight: impl Fn(&MultiIndex, &MultiIndex, usize) -> C64 + Sync) -> Self {
        let rows = basis
            .indices()
            .par_iter()
            .map(|t| {
                let mut row: Vec<(usize, C64)> = t
                    .below()
                    .into_iter()
                    .filter_map(|k| {
                        let ki = basis.index_of(&k).expect("k ≤ t lies in the window");
                        let w = weight(t, &k, ki);
                        if w == C64::new(0.0, 0.0) {
                            return None;
                        }
                        let s = t.checked_sub(&k).expect("k ≤ t");
                        Some((basis.index_of(&s).expect("s ≤ t lies in the window"), w))
                    })
                    .collect();
                row.sort_by_key(|&(s, _)| s);
                row
            })
            .collect();
        SparseRows { rows }
    }

    /// Rows `√(t!/s!)·coeff(t − s)` for a coefficient table of `zᵏ`.
    fn from_coefficients(basis: &Basis, coeff: &[C64]) -> Self {
        Self::build(basis, |t, k, ki| {
            let c = coeff[ki];
            if c == C64::new(0.0, 0.0) {
                return c;
            }
            let s = t.checked_sub(k).expect("k ≤ t");
            c * (t.factorial() / s.factorial()).sqrt()
        })
    }

    fn to_dense(&self, d: usize) -> CMat {
        let mut m = CMat::zeros(d, d);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] = v;
            }
        }
        m
    }
}

/// Row `i` of `L·Γ` as a dense vector.
fn left_times_blocks(basis: &Basis, left: &SparseRows, blocks: &[CMat], i: usize) -> Vec<C64> {
    let mut x = vec![C64::new(0.0, 0.0); basis.len()];
    for &(s, l) in &left.rows[i] {
        let m = basis.get(s).total();
        let range = basis.shell(m);
        let local = s - range.start;
        let block = &blocks[m];
        for (c, xi) in x[range].iter_mut().enumerate() {
            *xi += l * block[(local, c)];
        }
    }
    x
}

/// `scale·L·Γ·R†` (or `·Rᵀ` when `conj_right` is false).
fn sandwich(basis: &Basis, left: &SparseRows, blocks: &[CMat], right: &SparseRows, conj_right: bool, scale: C64) -> CMat {
    let d = basis.len();
    let rows: Vec<Vec<C64>> = (0..d)
        .into_par_iter()
        .map(|i| {
            let x = left_times_blocks(basis, left, blocks, i);
            (0..d)
                .map(|j| {
                    let s: C64 = right.rows[j]
                        .iter()
                        .map(|&(sp, r)| x[sp] * if conj_right { r.conj() } else { r })
                        .sum();
                    s * scale
                })
                .collect()
        })
        .collect();
    CMat::from_fn(d, d, |i, j| rows[i][j])
}

/// Diagonal of [`sandwich`].
fn sandwich_diagonal(basis: &Basis, left: &SparseRows, blocks: &[CMat], right: &SparseRows, conj_right: bool, scale: C64) -> Vec<C64> {
    (0..basis.len())
        .into_par_iter()
        .map(|i| {
            let x = left_times_blocks(basis, left, blocks, i);
            let s: C64 = right.rows[i].iter().map(|&(sp, r)| x[sp] * if conj_right { r.conj() } else { r }).sum();
            s * scale
        })
        .collect()
}

/// Coefficients of `zᵗ` (not normalized by `√t!`) in `exp(μᵀz + zᵀBz)`,
/// for every `t` of the basis:
/// `Σ_{k≤t} μᵏ/k! · φ_B(t−k)/√((t−k)!)`.
pub fn exp_quadratic_coefficients(mu: &CVec, b: &CMat, basis: &Basis) -> Vec<C64> {
    let phis = PhiTable::new(b, basis);
    let mu: Vec<C64> = mu.iter().copied().collect();
    let zero_mean = mu.iter().all(|z| *z == C64::new(0.0, 0.0));
    basis
        .indices()
        .par_iter()
        .enumerate()
        .map(|(ti, t)| {
            if zero_mean {
                return phis.get(ti) / t.factorial().sqrt();
            }
            t.below()
                .into_iter()
                .map(|k| {
                    let rest = t.checked_sub(&k).expect("k ≤ t");
                    let ri = basis.index_of(&rest).expect("inside window");
                    k.power(&mu) / k.factorial() * phis.get(ri) / rest.factorial().sqrt()
                })
                .sum()
        })
        .collect()
}

/// The unit lower-triangular matrix `E_A(t,s) = √binom(t,s)·φ_A(t−s)`.
pub fn e_a_matrix(a: &CMat, cutoff: usize) -> Result<TruncatedOperator> {
    check_symmetric(a, crate::DEFAULT_TOL, "A")?;
    let basis = Basis::new(a.nrows(), cutoff);
    let rows = e_a_rows(a, &basis);
    Ok(TruncatedOperator { entries: rows.to_dense(basis.len()), basis, hermitian: false })
}

fn e_a_rows(a: &CMat, basis: &Basis) -> SparseRows {
    let phis = PhiTable::new(a, basis);
    SparseRows::build(basis, |t, k, ki| {
        let p = phis.get(ki);
        if p == C64::new(0.0, 0.0) {
            return p;
        }
        let s = t.checked_sub(k).expect("k ≤ t");
        p * t.binom(&s).sqrt()
    })
}

/// Density matrix `c(A,Λ)·E_A·Γ(Λ)·E_A†` of the mean-zero state `ρ(A,Λ)`.
pub fn dmf(a: &CMat, lambda: &CMat, cutoff: usize, tol: f64) -> Result<TruncatedOperator> {
    if !is_valid_state(a, lambda, tol)? {
        return Err(Error::InvalidState("M(A,Λ) is not positive definite or Λ is not positive".into()));
    }
    let c = c_factor(a, lambda, tol)?;
    let basis = Basis::new(a.nrows(), cutoff);
    let e = e_a_rows(a, &basis);
    let blocks = gamma_lambda_blocks(lambda, &basis);
    let entries = sandwich(&basis, &e, &blocks, &e, true, C64::new(c, 0.0));
    Ok(TruncatedOperator { basis, entries, hermitian: true })
}

/// Single entry `⟨t|ρ(A,Λ)|t′⟩` of the density matrix formula, summed
/// directly over `s ≤ t`, `s′ ≤ t′` with `|s| = |s′|` without building any
/// matrix:
/// `c(A,Λ) Σ √binom(t,s) φ_A(t−s) ⟨s|Γ(Λ)|s′⟩ √binom(t′,s′) conj φ_A(t′−s′)`.
pub fn matrix_element(a: &CMat, lambda: &CMat, t: &MultiIndex, tp: &MultiIndex, tol: f64) -> Result<C64> {
    if !is_valid_state(a, lambda, tol)? {
        return Err(Error::InvalidState("M(A,Λ) is not positive definite or Λ is not positive".into()));
    }
    if t.n() != a.nrows() || tp.n() != a.nrows() {
        return Err(Error::Shape("multi-index length must equal the number of modes".into()));
    }
    let c = c_factor(a, lambda, tol)?;
    let mut total = C64::new(0.0, 0.0);
    let left: Vec<(MultiIndex, C64)> = t
        .below()
        .into_iter()
        .filter_map(|s| {
            let k = t.checked_sub(&s)?;
            let p = phi(a, &k);
            (p != C64::new(0.0, 0.0)).then(|| (s.clone(), p * t.binom(&s).sqrt()))
        })
        .collect();
    let right: Vec<(MultiIndex, C64)> = tp
        .below()
        .into_iter()
        .filter_map(|s| {
            let k = tp.checked_sub(&s)?;
            let p = phi(a, &k);
            (p != C64::new(0.0, 0.0)).then(|| (s.clone(), (p * tp.binom(&s).sqrt()).conj()))
        })
        .collect();
    for (s, l) in &left {
        for (sp, r) in &right {
            if s.total() == sp.total() {
                total += l * gamma_lambda_entry(lambda, s, sp) * r;
            }
        }
    }
    Ok(total * c)
}

/// The pure state `ψ_A = √c(A,0) Σ_t φ_A(t)|t⟩` on the window.
pub fn pure_state_vector(a: &CMat, cutoff: usize, tol: f64) -> Result<TruncatedVector> {
    check_symmetric(a, tol, "A")?;
    let n = a.nrows();
    let norm = spectral_norm(a);
    if norm >= 0.5 {
        return Err(Error::InvalidState(format!("2A is not a strict contraction (‖A‖ = {norm})")));
    }
    let c = c_factor(a, &CMat::zeros(n, n), tol)?;
    let basis = Basis::new(n, cutoff);
    let phis = PhiTable::new(a, &basis);
    let entries = CVec::from_iterator(basis.len(), phis.values().iter().map(|p| p * c.sqrt()));
    Ok(TruncatedVector { basis, entries })
}

/// The vector of a pure state `(c, μ, A, 0)`, possibly with nonzero mean:
/// `⟨t|ψ⟩ = √c·√(t!)·[zᵗ] exp(μᵀz + zᵀAz)`, phased so that `⟨Ω|ψ⟩ > 0`.
pub fn state_vector(p: &E2Params, cutoff: usize, tol: f64) -> Result<TruncatedVector> {
    if !crate::params::is_pure(p, tol) {
        return Err(Error::Unsupported("state vector requested for a mixed state".into()));
    }
    let basis = Basis::new(p.n(), cutoff);
    let coeff = exp_quadratic_coefficients(&p.mu, &p.a, &basis);
    let entries = CVec::from_iterator(
        basis.len(),
        basis.indices().iter().zip(&coeff).map(|(t, g)| g * (t.factorial() * p.c).sqrt()),
    );
    Ok(TruncatedVector { basis, entries })
}

/// Matrix of `Z₁ = √c·Γ(√Λ)·exp(μ̄ᵀa + aᵀĀa)`, the factor with `Z = Z₁†Z₁`.
///
/// `exp(μ̄ᵀa + aᵀĀa)|t⟩ = Σ_{s≤t} √(t!/s!)·g(t−s)|s⟩` where `g` are the
/// coefficients of `exp(μ̄ᵀz + zᵀĀz)`; `Γ(√Λ)` then acts inside each shell.
pub fn z1_matrix(p: &E2Params, cutoff: usize, tol: f64) -> Result<TruncatedOperator> {
    crate::linalg::check_hermitian(&p.lambda, tol, "Λ")?;
    if !crate::linalg::is_positive_semidefinite_hermitian(&p.lambda, tol)? {
        return Err(Error::InvalidState("Λ is not positive semidefinite".into()));
    }
    let basis = Basis::new(p.n(), cutoff);
    let g = exp_quadratic_coefficients(&p.mu.map(|z| z.conj()), &p.a.map(|z| z.conj()), &basis);
    let blocks = gamma_lambda_blocks(&sqrt_psd(&p.lambda), &basis);
    let sqrt_c = p.c.sqrt();
    let d = basis.len();
    let columns: Vec<Vec<C64>> = basis
        .indices()
        .par_iter()
        .map(|t| {
            let mut col = vec![C64::new(0.0, 0.0); d];
            for k in t.below() {
                let gk = g[basis.index_of(&k).expect("inside window")];
                if gk == C64::new(0.0, 0.0) {
                    continue;
                }
                let s = t.checked_sub(&k).expect("k ≤ t");
                let x = gk * (t.factorial() / s.factorial()).sqrt() * sqrt_c;
                let m = s.total();
                let range = basis.shell(m);
                let local = basis.index_of(&s).expect("inside window") - range.start;
                for (row, v) in col[range].iter_mut().enumerate() {
                    *v += blocks[m][(row, local)] * x;
                }
            }
            col
        })
        .collect();
    let entries = CMat::from_fn(d, d, |i, j| columns[j][i]);
    Ok(TruncatedOperator { basis, entries, hermitian: false })
}

fn general_factors(p: &GeneralE2Params, basis: &Basis) -> (SparseRows, Vec<CMat>, SparseRows) {
    let f = exp_quadratic_coefficients(&p.alpha, &p.a, basis);
    let h = exp_quadratic_coefficients(&p.beta, &p.b, basis);
    (
        SparseRows::from_coefficients(basis, &f),
        gamma_lambda_blocks(&p.lambda, basis),
        SparseRows::from_coefficients(basis, &h),
    )
}

/// Matrix `⟨r|Z|s⟩` of a general E₂ operator on the window.
///
/// The generating function factorizes as
/// `c·exp(uᵀα + uᵀAu)·exp(uᵀΛv)·exp(βᵀv + vᵀBv)`; the truncated product
/// of the three coefficient series gives `Z = c·L_u·Γ(Λ)·L_vᵀ` with
/// `L(r, r′) = √(r!/r′!)·[z^{r−r′}] exp(…)`.
pub fn general_truncate(p: &GeneralE2Params, cutoff: usize) -> TruncatedOperator {
    let basis = Basis::new(p.n(), cutoff);
    let (lu, blocks, lv) = general_factors(p, &basis);
    let entries = sandwich(&basis, &lu, &blocks, &lv, false, p.c);
    TruncatedOperator { basis, entries, hermitian: false }
}

/// Density matrix of a Gaussian state with arbitrary mean.
pub fn density_matrix(p: &E2Params, cutoff: usize) -> TruncatedOperator {
    let mut op = general_truncate(&GeneralE2Params::from(p), cutoff);
    op.hermitian = true;
    op
}

/// Diagonal `⟨t|ρ|t⟩` of the density matrix of a state, without building
/// the full matrix.
pub fn number_diagonal(p: &E2Params, cutoff: usize) -> (Basis, Vec<f64>) {
    let basis = Basis::new(p.n(), cutoff);
    let (lu, blocks, lv) = general_factors(&GeneralE2Params::from(p), &basis);
    let diag = sandwich_diagonal(&basis, &lu, &blocks, &lv, false, C64::new(p.c, 0.0));
    (basis, diag.into_iter().map(|z| z.re).collect())
}
