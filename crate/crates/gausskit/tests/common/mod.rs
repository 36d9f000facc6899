//! Deterministic random inputs shared by the integration tests.
//!
//! Every generator draws from a seeded ChaCha stream, so each test sees the
//! same matrices on every run. Norm budgets keep the states well inside the
//! valid region, which keeps their particle-number tails short enough for
//! the truncated windows used in the comparisons.

#![allow(dead_code)]

use gausskit::fock::{Basis, MultiIndex};
use gausskit::linalg::{spectral_norm, SymplecticMap};
use gausskit::params::{E2Params, GeneralE2Params};
use gausskit::{C64, CMat, CVec};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub const TOL: f64 = 1e-10;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Complex number with independent uniform parts in `[-1, 1]`.
pub fn complex(rng: &mut ChaCha20Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn complex_vec(rng: &mut ChaCha20Rng, n: usize, scale: f64) -> CVec {
    CVec::from_fn(n, |_, _| complex(rng) * scale)
}

pub fn complex_mat(rng: &mut ChaCha20Rng, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| complex(rng))
}

/// Complex symmetric matrix with spectral norm exactly `norm`.
pub fn symmetric(rng: &mut ChaCha20Rng, n: usize, norm: f64) -> CMat {
    let g = complex_mat(rng, n);
    let s = (&g + g.transpose()) * c(0.5, 0.0);
    let current = spectral_norm(&s);
    if current == 0.0 {
        return s;
    }
    s * c(norm / current, 0.0)
}

/// Positive semidefinite hermitian matrix with spectral norm exactly `norm`.
pub fn psd(rng: &mut ChaCha20Rng, n: usize, norm: f64) -> CMat {
    let g = complex_mat(rng, n);
    let h = &g * g.adjoint();
    if norm == 0.0 {
        return CMat::zeros(n, n);
    }
    let current = spectral_norm(&h);
    h * c(norm / current, 0.0)
}

/// Haar-ish random unitary from the QR factor of a complex Gaussian-like matrix.
pub fn unitary(rng: &mut ChaCha20Rng, n: usize) -> CMat {
    complex_mat(rng, n).qr().q()
}

/// Permutation matrix sending basis vector `j` to `perm[j]`.
pub fn permutation(perm: &[usize]) -> CMat {
    let n = perm.len();
    let mut p = CMat::zeros(n, n);
    for (j, &k) in perm.iter().enumerate() {
        p[(k, j)] = c(1.0, 0.0);
    }
    p
}

/// A normalized state with `‖A‖ ≤ a_max`, `‖Λ‖ ≤ l_max` and, when `mean`
/// is set, a nonzero μ of modulus at most `0.3` per mode.
pub fn state_with(rng: &mut ChaCha20Rng, n: usize, a_max: f64, l_max: f64, mean: bool) -> E2Params {
    let a_norm = rng.random_range(0.0..a_max);
    let a = symmetric(rng, n, a_norm);
    let l_norm = if l_max > 0.0 { rng.random_range(0.0..l_max) } else { 0.0 };
    let lambda = psd(rng, n, l_norm);
    let mu = if mean { complex_vec(rng, n, 0.2) } else { CVec::zeros(n) };
    E2Params::state(mu, a, lambda, TOL).expect("generated parameters are valid")
}

/// A valid state drawn with norms up to `a_max` and `l_max`; a draw outside
/// the valid region is shrunk by a common factor until it lies inside, so
/// the result may sit close to the boundary.
pub fn bold_state(rng: &mut ChaCha20Rng, n: usize, a_max: f64, l_max: f64, mean: bool) -> E2Params {
    let a_norm = rng.random_range(0.0..a_max);
    let mut a = symmetric(rng, n, a_norm);
    let l_norm = rng.random_range(0.0..l_max);
    let mut lambda = psd(rng, n, l_norm);
    let mu = if mean { complex_vec(rng, n, 0.2) } else { CVec::zeros(n) };
    while !gausskit::params::is_valid_state(&a, &lambda, TOL).expect("shapes agree") {
        a *= c(0.9, 0.0);
        lambda *= c(0.9, 0.0);
    }
    E2Params::state(mu, a, lambda, TOL).expect("shrunk parameters are valid")
}

/// A random valid state whose photon-number tail is short.
pub fn state(rng: &mut ChaCha20Rng, n: usize, mean: bool) -> E2Params {
    state_with(rng, n, 0.15, 0.3, mean)
}

/// A random pure state with `‖A‖ ≤ a_max`.
pub fn pure_state(rng: &mut ChaCha20Rng, n: usize, a_max: f64, mean: bool) -> E2Params {
    state_with(rng, n, a_max, 0.0, mean)
}

/// Random symplectic map built as a passive unitary, a diagonal squeeze and
/// another passive unitary.
pub fn symplectic(rng: &mut ChaCha20Rng, n: usize, r_max: f64) -> SymplecticMap {
    let u1 = SymplecticMap::from_unitary(&unitary(rng, n), 1e-9).expect("unitary");
    let u2 = SymplecticMap::from_unitary(&unitary(rng, n), 1e-9).expect("unitary");
    let r: Vec<f64> = (0..n).map(|_| rng.random_range(-r_max..r_max)).collect();
    u1.then_after(&SymplecticMap::squeeze(&r)).then_after(&u2)
}

/// `G_Z(u, v) = c·exp(uᵀα + βᵀv + uᵀAu + uᵀΛv + vᵀBv)`.
pub fn generating_function(p: &GeneralE2Params, u: &CVec, v: &CVec) -> C64 {
    let exponent = u.dot(&p.alpha)
        + p.beta.dot(v)
        + (u.transpose() * &p.a * u)[(0, 0)]
        + (u.transpose() * &p.lambda * v)[(0, 0)]
        + (v.transpose() * &p.b * v)[(0, 0)];
    p.c * exponent.exp()
}

/// The positive-element parameters viewed as a general 6-tuple.
pub fn general(p: &E2Params) -> GeneralE2Params {
    GeneralE2Params {
        c: c(p.c, 0.0),
        alpha: p.mu.clone(),
        beta: p.mu.map(|z| z.conj()),
        a: p.a.clone(),
        lambda: p.lambda.clone(),
        b: p.a.map(|z| z.conj()),
    }
}

pub fn mi(t: &[usize]) -> MultiIndex {
    MultiIndex(t.to_vec())
}

/// Multi-indices of the basis as plain vectors, for the oracle crate.
pub fn basis_vecs(basis: &Basis) -> Vec<Vec<usize>> {
    basis.indices().iter().map(|t| t.0.clone()).collect()
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}
