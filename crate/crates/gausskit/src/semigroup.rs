//! Calculus on E₂ parameters: standard operators, adjoints, products and
//! conjugations.
//!
//! # Composition
//!
//! Products are computed from the coherent-state resolution of identity,
//!
//! ```text
//! G_{Z₁Z₂}(u, v) = π⁻ⁿ ∫ G_{Z₁}(u, z) G_{Z₂}(z̄, v) e^{−|z|²} d²ⁿz.
//! ```
//!
//! Writing `z = Pξ`, `z̄ = P̄ξ` with `ξ = [x; y] ∈ ℝ²ⁿ`, `P = [I iI]` and
//! `P̄ = [I −iI]`, the integrand is `exp(−ξᵀRξ + mᵀξ)` times terms free of
//! `ξ`, where
//!
//! ```text
//! R = I − PᵀB₁P − P̄ᵀA₂P̄,
//! m = m₀ + M_u u + M_v v,   m₀ = Pᵀβ₁ + P̄ᵀα₂,   M_u = PᵀΛ₁ᵀ,   M_v = P̄ᵀΛ₂.
//! ```
//!
//! The Gaussian integral gives `π⁻ⁿ·πⁿ det(R)^{−1/2} exp(mᵀWm)` with
//! `W = ¼R⁻¹`, and expanding `mᵀWm` in `u` and `v` yields
//!
//! ```text
//! c = c₁c₂ det(R)^{−1/2} exp(m₀ᵀWm₀),
//! α = α₁ + 2M_uᵀWm₀,      β = β₂ + 2M_vᵀWm₀,
//! A = A₁ + M_uᵀWM_u,      Λ = 2M_uᵀWM_v,      B = B₂ + M_vᵀWM_v.
//! ```
//!
//! The integral converges exactly when `Re R ≻ 0`; otherwise the product is
//! reported as not composable.

use crate::linalg::{
    build_m_tol, det_inv_sqrt, inverse_complex, inverse_real, is_positive_definite, p_bar_matrix, p_matrix,
    real_part_symmetric, realify_vec, complexify_vec, solve_real, spectral_norm, symmetrize, to_complex,
    SymplecticMap,
};
use crate::params::{E2Params, GeneralE2Params};
use crate::{C64, CMat, CVec, Error, RMat, Result};

/// Parameters of the Weyl operator `W(z)`: `(e^{−|z|²/2}, z, −z̄, 0, I, 0)`.
pub fn weyl_params(z: &CVec) -> GeneralE2Params {
    let n = z.len();
    GeneralE2Params {
        c: C64::new((-0.5 * z.norm_squared()).exp(), 0.0),
        alpha: z.clone(),
        beta: -z.map(|w| w.conj()),
        a: CMat::zeros(n, n),
        lambda: CMat::identity(n, n),
        b: CMat::zeros(n, n),
    }
}

/// Parameters `(1, 0, 0, 0, K, 0)` of the second quantization `Γ(K)` of a
/// contraction.
pub fn second_quantization_params(k: &CMat, tol: f64) -> Result<GeneralE2Params> {
    if k.nrows() != k.ncols() {
        return Err(Error::Shape("K must be square".into()));
    }
    let norm = spectral_norm(k);
    if norm > 1.0 + tol {
        return Err(Error::NotContraction(format!("‖K‖ = {norm}")));
    }
    let n = k.nrows();
    let mut p = GeneralE2Params::identity(n);
    p.lambda = k.clone();
    Ok(p)
}

/// `α(L) = det ½(I + L₀ᵀL₀)`.
pub fn alpha_of(l: &SymplecticMap) -> f64 {
    let l0 = l.l0();
    let n2 = l0.nrows();
    ((RMat::identity(n2, n2) + l0.transpose() * l0) * 0.5).lu().determinant()
}

/// Parameters of the canonically normalized unitary `Γ₀(L)` implementing
/// the symplectic map `L`:
///
/// ```text
/// c = α(L)^{−1/4},
/// A = ½[I iI](I + L₀⁻ᵀL₀⁻¹)⁻¹[I; iI],
/// Λ = [I iI](L₀⁻¹ + L₀ᵀ)⁻¹[I; −iI],
/// B = ½[I −iI](I + L₀ᵀL₀)⁻¹[I; −iI].
/// ```
pub fn gamma0_params(l: &SymplecticMap) -> Result<GeneralE2Params> {
    let n = l.n();
    let l0 = l.l0();
    let id = RMat::identity(2 * n, 2 * n);
    let l0_inv = inverse_real(l0)?;
    let p = p_matrix(n);
    let pb = p_bar_matrix(n);
    let half = C64::new(0.5, 0.0);
    let ka = to_complex(&inverse_real(&(&id + l0_inv.transpose() * &l0_inv))?);
    let kl = to_complex(&inverse_real(&(&l0_inv + l0.transpose()))?);
    let kb = to_complex(&inverse_real(&(&id + l0.transpose() * l0))?);
    let a = &p * ka * p.transpose() * half;
    let lambda = &p * kl * pb.transpose();
    let b = &pb * kb * pb.transpose() * half;
    GeneralE2Params::new(
        C64::new(alpha_of(l).powf(-0.25), 0.0),
        CVec::zeros(n),
        CVec::zeros(n),
        symmetrize(&a),
        lambda,
        symmetrize(&b),
    )
}

/// Parameters of `Z†`: `(c̄, β̄, ᾱ, B̄, Λ†, Ā)`.
pub fn adjoint_params(p: &GeneralE2Params) -> GeneralE2Params {
    GeneralE2Params {
        c: p.c.conj(),
        alpha: p.beta.map(|z| z.conj()),
        beta: p.alpha.map(|z| z.conj()),
        a: p.b.map(|z| z.conj()),
        lambda: p.lambda.adjoint(),
        b: p.a.map(|z| z.conj()),
    }
}

/// Parameters of the product `Z₁Z₂` (see the module documentation).
pub fn compose(p1: &GeneralE2Params, p2: &GeneralE2Params) -> Result<GeneralE2Params> {
    compose_tol(p1, p2, crate::DEFAULT_TOL)
}

/// [`compose`] with an explicit integrability tolerance.
pub fn compose_tol(p1: &GeneralE2Params, p2: &GeneralE2Params, tol: f64) -> Result<GeneralE2Params> {
    let n = p1.n();
    if p2.n() != n {
        return Err(Error::Shape(format!("cannot compose {n}-mode with {}-mode parameters", p2.n())));
    }
    let p = p_matrix(n);
    let pb = p_bar_matrix(n);
    let r = CMat::identity(2 * n, 2 * n) - p.transpose() * &p1.b * &p - pb.transpose() * &p2.a * &pb;
    let r = symmetrize(&r);
    if !is_positive_definite(&real_part_symmetric(&r), tol)? {
        return Err(Error::NonComposable("real part of the Gaussian exponent is not positive definite".into()));
    }
    let w = symmetrize(&inverse_complex(&r)?) * C64::new(0.25, 0.0);
    let mu = p.transpose() * p1.lambda.transpose();
    let mv = pb.transpose() * &p2.lambda;
    let m0 = p.transpose() * &p1.beta + pb.transpose() * &p2.alpha;
    let wm0 = &w * &m0;
    let two = C64::new(2.0, 0.0);
    let c = p1.c * p2.c * det_inv_sqrt(&r)? * (m0.transpose() * &wm0)[(0, 0)].exp();
    let alpha = &p1.alpha + mu.transpose() * &wm0 * two;
    let beta = &p2.beta + mv.transpose() * &wm0 * two;
    let a = &p1.a + mu.transpose() * &w * &mu;
    let lambda = mu.transpose() * &w * &mv * two;
    let b = &p2.b + mv.transpose() * &w * &mv;
    Ok(GeneralE2Params { c, alpha, beta, a: symmetrize(&a), lambda, b: symmetrize(&b) })
}

/// Parameters of `Γ(K)ZΓ(K)†`: `(c, Kμ, KAKᵀ, KΛK†)`.
pub fn conjugate_by_gamma(p: &E2Params, k: &CMat) -> Result<E2Params> {
    if k.shape() != (p.n(), p.n()) {
        return Err(Error::Shape("K must be n×n".into()));
    }
    E2Params::new(p.c, k * &p.mu, k * &p.a * k.transpose(), k * &p.lambda * k.adjoint())
}

/// Parameters of `W(−z)ZW(z)`: `(c′, μ − (I − Λ − 2AC)z, A, Λ)` where
/// `c′ = ⟨ψ(z)|Z|ψ(z)⟩ = e^{−|z|²}G_Z(z̄, z)` and the real-linear map
/// `I − Λ − 2AC` acts through `M(A,Λ)` on `[Re z; Im z]`.
pub fn conjugate_by_weyl(p: &E2Params, z: &CVec) -> Result<E2Params> {
    if z.len() != p.n() {
        return Err(Error::Shape("z must have length n".into()));
    }
    let zb = z.map(|w| w.conj());
    let g_exponent = zb.dot(&p.mu) + p.mu.map(|w| w.conj()).dot(z)
        + (zb.transpose() * &p.a * &zb)[(0, 0)]
        + (zb.transpose() * &p.lambda * z)[(0, 0)]
        + (z.transpose() * p.a.map(|w| w.conj()) * z)[(0, 0)];
    let c = p.c * (g_exponent.re - z.norm_squared()).exp();
    let shift = complexify_vec(&(p.m_matrix() * realify_vec(z)));
    E2Params::new(c, &p.mu - shift, p.a.clone(), p.lambda.clone())
}

/// Mean annihilation vector `m`, solving `M(A,Λ)[Re m; Im m] = [Re μ; Im μ]`.
pub fn mean_of_state(p: &E2Params, tol: f64) -> Result<CVec> {
    let m = build_m_tol(&p.a, &p.lambda, tol)?;
    if !is_positive_definite(&m, tol)? {
        return Err(Error::InvalidState("M(A,Λ) is not positive definite".into()));
    }
    Ok(complexify_vec(&solve_real(&m, &realify_vec(&p.mu))?))
}
