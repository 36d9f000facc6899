//! Parameter types and the conversions between them.
//!
//! A Gaussian state is stored canonically as [`E2Params`] `(c, μ, A, Λ)`,
//! the coefficients of its generating function
//! `G_ρ(u,v) = c·exp(uᵀμ + μ̄ᵀv + uᵀAu + uᵀΛv + vᵀĀv)`. The customary
//! description by mean annihilation vector `m` and covariance matrix `S`
//! ([`CovarianceParams`]) is derived from it:
//!
//! ```text
//! S = M(−A,Λ)⁻¹ − ½I,      M(A,Λ)·[Re m; Im m] = [Re μ; Im μ],
//! ```
//!
//! and conversely `A = ¼[I iI](½I+S)⁻¹[I; iI]`,
//! `Λ = I − ½[I iI](½I+S)⁻¹[I; −iI]`, `μ = i[I iI](½I+S)⁻¹J[Re m; Im m]`.
//! The covariance convention is the one of the characteristic function
//! `tr ρW(z) = exp(−2i Im⟨z|m⟩ − [x;y]ᵀS[x;y])` for `z = x + iy`.

use crate::linalg::{
    build_m_tol, c_factor, check_hermitian, check_symmetric, complexify_vec, hermitize, inverse_real,
    is_positive_definite, is_positive_semidefinite_hermitian, j_matrix, max_abs_c, p_bar_matrix, p_matrix,
    realify_vec, solve_real, spectral_norm, symmetric_eigenvalues, symmetrize, symmetrize_real, to_complex,
};
use crate::{C64, CMat, CVec, Error, RMat, Result, DEFAULT_TOL};

/// Parameters `(c, μ, A, Λ)` of a positive element of E₂, in particular of
/// a Gaussian state.
#[derive(Clone, Debug, PartialEq)]
pub struct E2Params {
    pub c: f64,
    pub mu: CVec,
    pub a: CMat,
    pub lambda: CMat,
}

impl E2Params {
    /// Checks shapes, symmetry of `A` and hermiticity of `Λ`; `A` is stored
    /// symmetrized and `Λ` hermitized.
    pub fn new(c: f64, mu: CVec, a: CMat, lambda: CMat) -> Result<Self> {
        let n = mu.len();
        if a.shape() != (n, n) || lambda.shape() != (n, n) {
            return Err(Error::Shape(format!(
                "μ has length {n} but A is {:?} and Λ is {:?}",
                a.shape(),
                lambda.shape()
            )));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Domain(format!("c must be positive, got {c}")));
        }
        check_symmetric(&a, DEFAULT_TOL, "A")?;
        check_hermitian(&lambda, DEFAULT_TOL, "Λ")?;
        Ok(E2Params { c, mu, a: symmetrize(&a), lambda: hermitize(&lambda) })
    }

    /// The normalized Gaussian state with the given `(μ, A, Λ)`; `c` is set by
    /// [`normalization_c`].
    pub fn state(mu: CVec, a: CMat, lambda: CMat, tol: f64) -> Result<Self> {
        let c = normalization_c(&mu, &a, &lambda, tol)?;
        E2Params::new(c, mu, a, lambda)
    }

    /// The mean-zero state `(c(A,Λ), 0, A, Λ)`.
    pub fn mean_zero_state(a: CMat, lambda: CMat, tol: f64) -> Result<Self> {
        let n = a.nrows();
        Self::state(CVec::zeros(n), a, lambda, tol)
    }

    pub fn vacuum(n: usize) -> Self {
        E2Params { c: 1.0, mu: CVec::zeros(n), a: CMat::zeros(n, n), lambda: CMat::zeros(n, n) }
    }

    /// The coherent state `ψ(z)`: `(e^{−|z|²}, z, 0, 0)`.
    pub fn coherent(z: CVec) -> Self {
        let n = z.len();
        E2Params { c: (-z.norm_squared()).exp(), mu: z, a: CMat::zeros(n, n), lambda: CMat::zeros(n, n) }
    }

    /// Product of thermal states with `Λ = diag(λ)`.
    pub fn thermal(lambdas: &[f64]) -> Result<Self> {
        let n = lambdas.len();
        let lambda = CMat::from_diagonal(&CVec::from_iterator(n, lambdas.iter().map(|&l| C64::new(l, 0.0))));
        Self::mean_zero_state(CMat::zeros(n, n), lambda, DEFAULT_TOL)
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    /// `M(A,Λ)` for these parameters.
    pub fn m_matrix(&self) -> RMat {
        build_m_tol(&self.a, &self.lambda, f64::INFINITY).expect("shapes were validated on construction")
    }

    /// Largest absolute difference over all entries of the two parameter sets.
    pub fn max_diff(&self, other: &E2Params) -> f64 {
        let mut d = (self.c - other.c).abs();
        d = d.max(max_abs_c(&CMat::from_column_slice(self.n(), 1, (&self.mu - &other.mu).as_slice())));
        d = d.max(max_abs_c(&(&self.a - &other.a)));
        d.max(max_abs_c(&(&self.lambda - &other.lambda)))
    }
}

/// Parameters `(c, α, β, A, Λ, B)` of a general element of E₂.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralE2Params {
    pub c: C64,
    pub alpha: CVec,
    pub beta: CVec,
    pub a: CMat,
    pub lambda: CMat,
    pub b: CMat,
}

impl GeneralE2Params {
    /// Checks shapes and symmetry of `A` and `B`; both are stored symmetrized.
    pub fn new(c: C64, alpha: CVec, beta: CVec, a: CMat, lambda: CMat, b: CMat) -> Result<Self> {
        let n = alpha.len();
        if beta.len() != n || a.shape() != (n, n) || lambda.shape() != (n, n) || b.shape() != (n, n) {
            return Err(Error::Shape("inconsistent dimensions in 6-tuple".into()));
        }
        check_symmetric(&a, DEFAULT_TOL, "A")?;
        check_symmetric(&b, DEFAULT_TOL, "B")?;
        Ok(GeneralE2Params { c, alpha, beta, a: symmetrize(&a), lambda, b: symmetrize(&b) })
    }

    /// Parameters of the identity operator: `(1, 0, 0, 0, I, 0)`.
    pub fn identity(n: usize) -> Self {
        GeneralE2Params {
            c: C64::new(1.0, 0.0),
            alpha: CVec::zeros(n),
            beta: CVec::zeros(n),
            a: CMat::zeros(n, n),
            lambda: CMat::identity(n, n),
            b: CMat::zeros(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    /// Whether the parameters describe a self-adjoint operator:
    /// `c` real, `β = ᾱ`, `B = Ā`, `Λ = Λ†`.
    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        let scale = 1.0 + self.c.norm();
        self.c.im.abs() <= tol * scale
            && self.alpha.iter().zip(self.beta.iter()).all(|(a, b)| (a.conj() - b).norm() <= tol * scale)
            && max_abs_c(&(self.a.map(|z| z.conj()) - &self.b)) <= tol * scale
            && max_abs_c(&(&self.lambda - self.lambda.adjoint())) <= tol * scale
    }

    /// Collapses self-adjoint parameters with `c > 0` to [`E2Params`].
    pub fn to_positive(&self, tol: f64) -> Result<E2Params> {
        if !self.is_self_adjoint(tol) {
            return Err(Error::Domain("parameters are not self-adjoint".into()));
        }
        E2Params::new(self.c.re, self.alpha.clone(), self.a.clone(), hermitize(&self.lambda))
    }

    /// Largest absolute difference over all entries.
    pub fn max_diff(&self, other: &GeneralE2Params) -> f64 {
        let v = |x: &CVec, y: &CVec| x.iter().zip(y.iter()).fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()));
        [
            (self.c - other.c).norm(),
            v(&self.alpha, &other.alpha),
            v(&self.beta, &other.beta),
            max_abs_c(&(&self.a - &other.a)),
            max_abs_c(&(&self.lambda - &other.lambda)),
            max_abs_c(&(&self.b - &other.b)),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl From<&E2Params> for GeneralE2Params {
    fn from(p: &E2Params) -> Self {
        GeneralE2Params {
            c: C64::new(p.c, 0.0),
            alpha: p.mu.clone(),
            beta: p.mu.map(|z| z.conj()),
            a: p.a.clone(),
            lambda: p.lambda.clone(),
            b: p.a.map(|z| z.conj()),
        }
    }
}

/// Mean annihilation vector `m` and real 2n×2n covariance matrix `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceParams {
    pub m: CVec,
    pub s: RMat,
}

impl CovarianceParams {
    /// Checks shapes, symmetry and the uncertainty relation `S + (i/2)J ⪰ 0`.
    pub fn new(m: CVec, s: RMat, tol: f64) -> Result<Self> {
        let n = m.len();
        if s.shape() != (2 * n, 2 * n) {
            return Err(Error::Shape(format!("m has length {n} but S is {:?}", s.shape())));
        }
        let cov = CovarianceParams { m, s: symmetrize_real(&s) };
        if crate::linalg::max_abs(&(&s - s.transpose())) > tol * (1.0 + crate::linalg::max_abs(&s)) {
            return Err(Error::NotSymmetric("S".into()));
        }
        if !is_positive_semidefinite_hermitian(&cov.uncertainty_matrix(), tol)? {
            return Err(Error::InvalidState("S + (i/2)J is not positive semidefinite".into()));
        }
        Ok(cov)
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    /// The hermitian matrix `S + (i/2)J`.
    pub fn uncertainty_matrix(&self) -> CMat {
        let j = j_matrix(self.n());
        to_complex(&self.s) + to_complex(&j) * C64::new(0.0, 0.5)
    }

    /// Smallest eigenvalue of `S + (i/2)J`; nonnegative for physical states.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        crate::linalg::hermitian_eigenvalues(&self.uncertainty_matrix())[0]
    }
}

/// Converts mean/covariance parameters into E₂ parameters.
pub fn cov_to_e2(cov: &CovarianceParams, tol: f64) -> Result<E2Params> {
    let n = cov.n();
    if !is_positive_semidefinite_hermitian(&cov.uncertainty_matrix(), tol)? {
        return Err(Error::InvalidState("S + (i/2)J is not positive semidefinite".into()));
    }
    let half_plus_s = RMat::identity(2 * n, 2 * n) * 0.5 + &cov.s;
    let det = half_plus_s.clone().lu().determinant();
    if !(det > 0.0) {
        return Err(Error::Domain("½I + S is singular".into()));
    }
    let k = symmetrize_real(&inverse_real(&half_plus_s)?);
    let j = j_matrix(n);
    let r = realify_vec(&cov.m);
    let jr = &j * &r;
    let exponent = (r.transpose() * &j * &k * &jr)[(0, 0)];
    let c = det.powf(-0.5) * exponent.exp();
    let kc = to_complex(&k);
    let p = p_matrix(n);
    let pb = p_bar_matrix(n);
    let i = C64::new(0.0, 1.0);
    let mu = (&p * &kc * to_complex(&RMat::from_column_slice(2 * n, 1, jr.as_slice()))).column(0) * i;
    let a = &p * &kc * p.transpose() * C64::new(0.25, 0.0);
    let lambda = CMat::identity(n, n) - &p * &kc * pb.transpose() * C64::new(0.5, 0.0);
    E2Params::new(c, mu.into_owned(), a, lambda)
}

/// Converts E₂ parameters of a state into mean/covariance parameters.
pub fn e2_to_cov(p: &E2Params, tol: f64) -> Result<CovarianceParams> {
    let n = p.n();
    let m_plus = build_m_tol(&p.a, &p.lambda, tol)?;
    if !is_positive_definite(&m_plus, tol)? {
        return Err(Error::InvalidState("M(A,Λ) is not positive definite".into()));
    }
    let m_minus = build_m_tol(&(-&p.a), &p.lambda, tol)?;
    let s = symmetrize_real(&inverse_real(&m_minus)?) - RMat::identity(2 * n, 2 * n) * 0.5;
    let r = solve_real(&m_plus, &realify_vec(&p.mu))?;
    Ok(CovarianceParams { m: complexify_vec(&r), s })
}

/// Smallest eigenvalue of `M(A,Λ)`.
pub fn validity_margin(a: &CMat, lambda: &CMat) -> Result<f64> {
    let m = build_m_tol(a, lambda, DEFAULT_TOL)?;
    Ok(symmetric_eigenvalues(&m)[0])
}

/// True iff `(A, Λ)` are the parameters of a Gaussian state: `Λ ⪰ 0` and
/// `M(A,Λ) ≻ 0`.
pub fn is_valid_state(a: &CMat, lambda: &CMat, tol: f64) -> Result<bool> {
    let m = build_m_tol(a, lambda, tol)?;
    Ok(is_positive_semidefinite_hermitian(lambda, tol)? && is_positive_definite(&m, tol)?)
}

/// `[Re μ; Im μ]ᵀ M(A,Λ)⁻¹ [Re μ; Im μ]`, requiring `M(A,Λ) ≻ 0`.
fn mean_quadratic_form(mu: &CVec, a: &CMat, lambda: &CMat, tol: f64) -> Result<f64> {
    let m = build_m_tol(a, lambda, tol)?;
    if !is_positive_definite(&m, tol)? {
        return Err(Error::NotTraceClass("M(A,Λ) is not positive definite".into()));
    }
    let r = realify_vec(mu);
    Ok(r.dot(&solve_real(&m, &r)?))
}

/// Trace of the positive operator with parameters `p`:
/// `c/c(A,Λ)·exp([Re μ; Im μ]ᵀ M(A,Λ)⁻¹ [Re μ; Im μ])`.
pub fn trace_of_positive(p: &E2Params, tol: f64) -> Result<f64> {
    let q = mean_quadratic_form(&p.mu, &p.a, &p.lambda, tol)?;
    Ok(p.c / c_factor(&p.a, &p.lambda, tol)? * q.exp())
}

/// The value of `c` making `(c, μ, A, Λ)` a unit-trace operator.
pub fn normalization_c(mu: &CVec, a: &CMat, lambda: &CMat, tol: f64) -> Result<f64> {
    let q = mean_quadratic_form(mu, a, lambda, tol)?;
    Ok(c_factor(a, lambda, tol)? * (-q).exp())
}

/// A Gaussian state is pure exactly when `Λ = 0`.
pub fn is_pure(p: &E2Params, tol: f64) -> bool {
    spectral_norm(&p.lambda) <= tol
}

/// Vacuum, one-particle and two-particle amplitudes of an operator `Z`:
/// `vac = ⟨Ω|Z|Ω⟩`, `λ_Z,j = ⟨χ_j|Z|Ω⟩`, `μ_Z,j = ⟨Ω|Z|χ_j⟩`,
/// `Λ_Z,jk = ⟨χ_j|Z|χ_k⟩`, and the symmetric two-particle matrices with
/// `A_Z,jj = ⟨χ_jj|Z|Ω⟩/√2`, `A_Z,jk = ⟨χ_jk|Z|Ω⟩/2` (j ≠ k), and `B_Z`
/// likewise from `⟨Ω|Z|χ_jk⟩`. Here `χ_j = |e_j⟩`, `χ_jj = |2e_j⟩` and
/// `χ_jk = |e_j + e_k⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeData {
    pub vac: C64,
    pub lam_z: CVec,
    pub mu_z: CVec,
    pub a_z: CMat,
    pub b_z: CMat,
    pub lambda_z: CMat,
}

/// Solves the amplitude relations `c = vac`, `cα = λ_Z`, `cβ = μ_Z`,
/// `c(A + ααᵀ/2) = A_Z`, `c(B + ββᵀ/2) = B_Z`, `c(Λ + αβᵀ) = Λ_Z`.
pub fn e2_from_amplitudes(amp: &AmplitudeData) -> Result<GeneralE2Params> {
    if amp.vac.norm() == 0.0 {
        return Err(Error::Degenerate("vacuum amplitude ⟨Ω|Z|Ω⟩ is zero".into()));
    }
    let c = amp.vac;
    let alpha = &amp.lam_z / c;
    let beta = &amp.mu_z / c;
    let half = C64::new(0.5, 0.0);
    let a = &amp.a_z / c - &alpha * alpha.transpose() * half;
    let b = &amp.b_z / c - &beta * beta.transpose() * half;
    let lambda = &amp.lambda_z / c - &alpha * beta.transpose();
    GeneralE2Params::new(c, alpha, beta, symmetrize(&a), lambda, symmetrize(&b))
}

/// The amplitude relations applied forward; inverse of [`e2_from_amplitudes`].
pub fn amplitudes_from_e2(p: &GeneralE2Params) -> AmplitudeData {
    let c = p.c;
    let half = C64::new(0.5, 0.0);
    AmplitudeData {
        vac: c,
        lam_z: &p.alpha * c,
        mu_z: &p.beta * c,
        a_z: (&p.a + &p.alpha * p.alpha.transpose() * half) * c,
        b_z: (&p.b + &p.beta * p.beta.transpose() * half) * c,
        lambda_z: (&p.lambda + &p.alpha * p.beta.transpose()) * c,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(x: f64) -> CMat {
        CMat::from_element(1, 1, C64::new(x, 0.0))
    }

    #[test]
    fn vacuum_round_trip() {
        let cov = CovarianceParams::new(CVec::zeros(2), RMat::identity(4, 4) * 0.5, 1e-10).unwrap();
        let p = cov_to_e2(&cov, 1e-10).unwrap();
        assert!(p.max_diff(&E2Params::vacuum(2)) < 1e-15);
        let back = e2_to_cov(&E2Params::vacuum(2), 1e-10).unwrap();
        assert!(crate::linalg::max_abs(&(back.s - RMat::identity(4, 4) * 0.5)) < 1e-15);
    }

    #[test]
    fn one_mode_thermal_from_covariance() {
        let cov = CovarianceParams::new(CVec::zeros(1), RMat::identity(2, 2), 1e-10).unwrap();
        let p = cov_to_e2(&cov, 1e-10).unwrap();
        assert!((p.c - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.lambda[(0, 0)] - C64::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(p.a[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn one_mode_squeezed_covariance() {
        // S = M(−A,0)⁻¹ − ½I for a real A = α.
        let alpha = 0.2;
        let p = E2Params::mean_zero_state(scalar(alpha), scalar(0.0), 1e-10).unwrap();
        let s = e2_to_cov(&p, 1e-10).unwrap().s;
        assert!((s[(0, 0)] - (1.0 - 2.0 * alpha) / (2.0 * (1.0 + 2.0 * alpha))).abs() < 1e-15);
        assert!((s[(1, 1)] - (1.0 + 2.0 * alpha) / (2.0 * (1.0 - 2.0 * alpha))).abs() < 1e-15);
    }

    #[test]
    fn validity_examples() {
        assert!(!is_valid_state(&CMat::zeros(2, 2), &CMat::identity(2, 2), 1e-10).unwrap());
        assert!(!is_valid_state(&scalar(0.4), &scalar(0.3), 1e-10).unwrap());
        assert!(is_valid_state(&scalar(0.3), &scalar(0.3), 1e-10).unwrap());
    }

    #[test]
    fn trace_examples() {
        let p = E2Params::new(1.0, CVec::zeros(1), scalar(0.0), scalar(0.5)).unwrap();
        assert!((trace_of_positive(&p, 1e-10).unwrap() - 2.0).abs() < 1e-14);
        let z = CVec::from_vec(vec![C64::new(0.3, -0.4), C64::new(1.0, 0.2)]);
        let c = normalization_c(&z, &CMat::zeros(2, 2), &CMat::zeros(2, 2), 1e-10).unwrap();
        assert!((c - (-z.norm_squared()).exp()).abs() < 1e-15);
    }

    #[test]
    fn amplitude_vacuum_projector() {
        let n = 2;
        let amp = AmplitudeData {
            vac: C64::new(1.0, 0.0),
            lam_z: CVec::zeros(n),
            mu_z: CVec::zeros(n),
            a_z: CMat::zeros(n, n),
            b_z: CMat::zeros(n, n),
            lambda_z: CMat::zeros(n, n),
        };
        let p = e2_from_amplitudes(&amp).unwrap();
        let mut expected = GeneralE2Params::identity(n);
        expected.lambda = CMat::zeros(n, n);
        assert!(p.max_diff(&expected) == 0.0);
        let mut zero = amp.clone();
        zero.vac = C64::new(0.0, 0.0);
        assert!(matches!(e2_from_amplitudes(&zero), Err(Error::Degenerate(_))));
    }
}
