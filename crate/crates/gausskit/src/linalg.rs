//! Complex and real linear algebra used throughout the crate.
//!
//! A real-linear map on ℂⁿ is represented by its *realification*: the
//! 2n×2n real matrix acting on `[Re z; Im z]`. A complex-linear `Λ` becomes
//! `[[ReΛ, −ImΛ],[ImΛ, ReΛ]]` and the conjugate-linear map `z ↦ A z̄`
//! becomes `A₀C₀ = [[ReA, ImA],[ImA, −ReA]]`, where `C₀ = diag(I, −I)` is
//! the realification of complex conjugation. The symplectic form is
//! `J = [[0, I],[−I, 0]]`.
//!
//! The central object is `M(A,Λ) = I − Λ₀ − 2A₀C₀`: a Gaussian state with
//! parameters `(A, Λ)` exists exactly when `M(A,Λ)` is positive definite, and
//! `c(A,Λ) = √det M(A,Λ)` is its normalization constant.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{C64, CMat, CVec, Error, RMat, RVec, Result};

/// The symplectic form `J = [[0, I],[−I, 0]]` on ℝ²ⁿ.
pub fn j_matrix(n: usize) -> RMat {
    let mut j = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// Realification `C₀ = diag(I, −I)` of complex conjugation.
pub fn c0(n: usize) -> RMat {
    RMat::from_fn(2 * n, 2 * n, |i, j| {
        if i != j {
            0.0
        } else if i < n {
            1.0
        } else {
            -1.0
        }
    })
}

/// Realification `[[Re, −Im],[Im, Re]]` of a complex-linear map.
pub fn realify(map: &CMat) -> RMat {
    let n = map.nrows();
    assert_eq!(n, map.ncols(), "realify expects a square matrix");
    RMat::from_fn(2 * n, 2 * n, |i, j| {
        let z = map[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Realification `[[Re, Im],[Im, −Re]]` of the conjugate-linear map `z ↦ A z̄`.
pub fn realify_antilinear(a: &CMat) -> RMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "realify_antilinear expects a square matrix");
    RMat::from_fn(2 * n, 2 * n, |i, j| {
        let z = a[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) => z.re,
            (false, false) => -z.re,
            _ => z.im,
        }
    })
}

/// Inverse of [`realify`]: reads the complex matrix off the left block column.
///
/// Only meaningful when `l0` commutes with `J`; no check is made.
pub fn complexify(l0: &RMat) -> CMat {
    let n = l0.nrows() / 2;
    CMat::from_fn(n, n, |i, j| C64::new(l0[(i, j)], l0[(n + i, j)]))
}

/// `[Re z; Im z]`.
pub fn realify_vec(z: &CVec) -> RVec {
    let n = z.len();
    RVec::from_fn(2 * n, |i, _| if i < n { z[i].re } else { z[i - n].im })
}

/// Inverse of [`realify_vec`].
pub fn complexify_vec(r: &RVec) -> CVec {
    let n = r.len() / 2;
    CVec::from_fn(n, |i, _| C64::new(r[i], r[n + i]))
}

/// Embeds a real matrix into the complex field.
pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

/// The realification of a complex-linear map, carrying its matrix `L₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct Realification {
    pub l0: RMat,
}

impl Realification {
    pub fn from_complex_linear(map: &CMat) -> Self {
        Realification { l0: realify(map) }
    }

    pub fn from_antilinear(map: &CMat) -> Self {
        Realification { l0: realify_antilinear(map) }
    }

    /// Whether the map is complex linear, i.e. `L₀` commutes with `J`.
    pub fn is_complex_linear(&self, tol: f64) -> bool {
        let j = j_matrix(self.l0.nrows() / 2);
        max_abs(&(&self.l0 * &j - &j * &self.l0)) <= tol * (1.0 + max_abs(&self.l0))
    }
}

/// A real 2n×2n matrix `L₀` with `L₀ᵀ J L₀ = J`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMap {
    l0: RMat,
}

impl SymplecticMap {
    /// Validates `L₀ᵀJL₀ = J` and `det L₀ = 1` to a relative tolerance.
    pub fn new(l0: RMat, tol: f64) -> Result<Self> {
        if l0.nrows() != l0.ncols() || !l0.nrows().is_multiple_of(2) {
            return Err(Error::Shape(format!("symplectic matrix must be 2n×2n, got {}×{}", l0.nrows(), l0.ncols())));
        }
        let j = j_matrix(l0.nrows() / 2);
        let defect = max_abs(&(l0.transpose() * &j * &l0 - &j));
        let scale = 1.0 + max_abs(&l0).powi(2);
        if defect > tol * scale {
            return Err(Error::NotSymplectic(format!("‖L₀ᵀJL₀ − J‖ = {defect:e}")));
        }
        let det = l0.clone().lu().determinant();
        if (det - 1.0).abs() > tol * scale.powi(l0.nrows() as i32 / 2).max(1.0) {
            return Err(Error::NotSymplectic(format!("det L₀ = {det}")));
        }
        Ok(SymplecticMap { l0 })
    }

    pub fn identity(n: usize) -> Self {
        SymplecticMap { l0: RMat::identity(2 * n, 2 * n) }
    }

    /// The realification of a unitary `U`, which is orthogonal and symplectic.
    pub fn from_unitary(u: &CMat, tol: f64) -> Result<Self> {
        let n = u.nrows();
        let defect = max_abs_c(&(u.adjoint() * u - CMat::identity(n, n)));
        if defect > tol {
            return Err(Error::Domain(format!("matrix is not unitary (defect {defect:e})")));
        }
        Ok(SymplecticMap { l0: realify(u) })
    }

    /// Single-mode squeezes `x_j ↦ e^{r_j} x_j`, `y_j ↦ e^{−r_j} y_j`.
    pub fn squeeze(r: &[f64]) -> Self {
        let n = r.len();
        SymplecticMap {
            l0: RMat::from_fn(2 * n, 2 * n, |i, j| {
                if i != j {
                    0.0
                } else if i < n {
                    r[i].exp()
                } else {
                    (-r[i - n]).exp()
                }
            }),
        }
    }

    /// The product map `self ∘ other`.
    pub fn then_after(&self, other: &SymplecticMap) -> SymplecticMap {
        SymplecticMap { l0: &self.l0 * &other.l0 }
    }

    pub fn inverse(&self) -> SymplecticMap {
        // L⁻¹ = −J Lᵀ J for symplectic L.
        let j = j_matrix(self.n());
        SymplecticMap { l0: -(&j * self.l0.transpose() * &j) }
    }

    pub fn l0(&self) -> &RMat {
        &self.l0
    }

    pub fn n(&self) -> usize {
        self.l0.nrows() / 2
    }
}

/// Largest absolute entry.
pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest entry modulus.
pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Largest singular value of a real matrix.
pub fn spectral_norm_real(m: &RMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

fn check_square(m: &CMat, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!("{what} must be square, got {}×{}", m.nrows(), m.ncols())));
    }
    Ok(())
}

/// Errors unless `m = mᵀ` within `tol` relative to its largest entry.
pub fn check_symmetric(m: &CMat, tol: f64, what: &str) -> Result<()> {
    check_square(m, what)?;
    let defect = max_abs_c(&(m - m.transpose()));
    if defect > tol * (1.0 + max_abs_c(m)) {
        return Err(Error::NotSymmetric(format!("{what}: ‖M − Mᵀ‖ = {defect:e}")));
    }
    Ok(())
}

/// Errors unless `m = m†` within `tol` relative to its largest entry.
pub fn check_hermitian(m: &CMat, tol: f64, what: &str) -> Result<()> {
    check_square(m, what)?;
    let defect = max_abs_c(&(m - m.adjoint()));
    if defect > tol * (1.0 + max_abs_c(m)) {
        return Err(Error::NotHermitian(format!("{what}: ‖M − M†‖ = {defect:e}")));
    }
    Ok(())
}

fn check_real_symmetric(m: &RMat, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!("matrix must be square, got {}×{}", m.nrows(), m.ncols())));
    }
    let defect = max_abs(&(m - m.transpose()));
    if defect > tol * (1.0 + max_abs(m)) {
        return Err(Error::NotSymmetric(format!("‖M − Mᵀ‖ = {defect:e}")));
    }
    Ok(())
}

/// `(m + mᵀ)/2`.
pub fn symmetrize(m: &CMat) -> CMat {
    (m + m.transpose()) * C64::new(0.5, 0.0)
}

/// `(m + m†)/2`.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// `(m + mᵀ)/2` for real matrices.
pub fn symmetrize_real(m: &RMat) -> RMat {
    (m + m.transpose()) * 0.5
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: &RMat) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(symmetrize_real(m)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Ascending eigenvalues of a hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(hermitize(m)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// True iff the smallest eigenvalue exceeds `tol·(1 + ‖M‖₂)`.
pub fn is_positive_definite(m: &RMat, tol: f64) -> Result<bool> {
    check_real_symmetric(m, tol)?;
    let ev = symmetric_eigenvalues(m);
    let norm = ev.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    Ok(ev.first().is_none_or(|&l| l > tol * (1.0 + norm)))
}

/// Hermitian counterpart of [`is_positive_definite`].
pub fn is_positive_definite_hermitian(m: &CMat, tol: f64) -> Result<bool> {
    check_hermitian(m, tol, "matrix")?;
    let ev = hermitian_eigenvalues(m);
    let norm = ev.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    Ok(ev.first().is_none_or(|&l| l > tol * (1.0 + norm)))
}

/// True iff the smallest eigenvalue is at least `−tol·(1 + ‖M‖₂)`.
pub fn is_positive_semidefinite_hermitian(m: &CMat, tol: f64) -> Result<bool> {
    check_hermitian(m, tol, "matrix")?;
    let ev = hermitian_eigenvalues(m);
    let norm = ev.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    Ok(ev.first().is_none_or(|&l| l >= -tol * (1.0 + norm)))
}

/// `M(A,Λ) = I − Λ₀ − 2A₀C₀`, the real symmetric 2n×2n matrix governing
/// validity and normalization of Gaussian parameters.
pub fn build_m(a: &CMat, lambda: &CMat) -> Result<RMat> {
    build_m_tol(a, lambda, crate::DEFAULT_TOL)
}

/// [`build_m`] with an explicit structure tolerance.
pub fn build_m_tol(a: &CMat, lambda: &CMat, tol: f64) -> Result<RMat> {
    if a.shape() != lambda.shape() {
        return Err(Error::Shape(format!("A is {:?} but Λ is {:?}", a.shape(), lambda.shape())));
    }
    check_symmetric(a, tol, "A")?;
    check_hermitian(lambda, tol, "Λ")?;
    let n = a.nrows();
    let m = RMat::identity(2 * n, 2 * n) - realify(&hermitize(lambda)) - realify_antilinear(&symmetrize(a)) * 2.0;
    Ok(symmetrize_real(&m))
}

/// `c(A,Λ) = √det M(A,Λ)`; errors when `M(A,Λ)` is not positive semidefinite.
pub fn c_factor(a: &CMat, lambda: &CMat, tol: f64) -> Result<f64> {
    let m = build_m_tol(a, lambda, tol)?;
    let ev = symmetric_eigenvalues(&m);
    let norm = ev.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if ev.first().is_some_and(|&l| l < -tol * (1.0 + norm)) {
        return Err(Error::Domain(format!("M(A,Λ) is not positive semidefinite (min eigenvalue {:e})", ev[0])));
    }
    Ok(ev.iter().map(|&l| l.max(0.0)).product::<f64>().sqrt())
}

/// Eigenvalues of a general complex matrix, from its complex Schur form.
pub fn complex_eigenvalues(m: &CMat) -> Vec<C64> {
    let (_, t) = m.clone().schur().unpack();
    t.diagonal().iter().copied().collect()
}

/// `det(A)^{−1/2}` on the branch `Π λⱼ^{−1/2}` where every factor has
/// positive real part; requires every eigenvalue to lie in the open right
/// half-plane, which holds whenever `Re A ≻ 0`.
pub fn det_inv_sqrt(a: &CMat) -> Result<C64> {
    check_square(a, "A")?;
    let mut out = C64::new(1.0, 0.0);
    for l in complex_eigenvalues(a) {
        if l.re <= 0.0 {
            return Err(Error::Domain(format!("eigenvalue {l} is not in the right half-plane")));
        }
        out /= l.sqrt();
    }
    Ok(out)
}

/// Symmetric part of `Re A`.
pub fn real_part_symmetric(a: &CMat) -> RMat {
    symmetrize_real(&a.map(|z| z.re))
}

/// `∫_{ℝⁿ} exp(−xᵀAx + mᵀx) dx = √(πⁿ/det A)·exp(¼ mᵀA⁻¹m)` for complex
/// symmetric `A` with `Re A ≻ 0`, using the eigenvalue branch of
/// [`det_inv_sqrt`].
pub fn gaussian_integral(a: &CMat, m: &CVec) -> Result<C64> {
    check_symmetric(a, crate::DEFAULT_TOL, "A")?;
    if a.nrows() != m.len() {
        return Err(Error::Shape(format!("A is {}×{} but m has length {}", a.nrows(), a.ncols(), m.len())));
    }
    if !is_positive_definite(&real_part_symmetric(a), crate::DEFAULT_TOL)? {
        return Err(Error::Domain("Re A is not strictly positive definite".into()));
    }
    let n = a.nrows();
    let inv = a.clone().lu().try_inverse().ok_or_else(|| Error::Domain("A is singular".into()))?;
    let quad = (m.transpose() * inv * m)[(0, 0)];
    Ok(std::f64::consts::PI.powf(n as f64 / 2.0) * det_inv_sqrt(a)? * (quad * 0.25).exp())
}

/// Hermitian square root of a positive semidefinite matrix; eigenvalues
/// within rounding of zero are clamped to zero.
pub fn sqrt_psd(m: &CMat) -> CMat {
    let eig = SymmetricEigen::new(hermitize(m));
    let d = eig.eigenvalues.map(|l| C64::new(l.max(0.0).sqrt(), 0.0));
    &eig.eigenvectors * CMat::from_diagonal(&d) * eig.eigenvectors.adjoint()
}

/// Takagi (Autonne) factorization `A = U·diag(d)·Uᵀ` of a complex symmetric
/// matrix, with `U` unitary and `d` the singular values in descending order.
///
/// The conjugate-linear map `z ↦ A z̄` has realification `A₀C₀`, a real
/// symmetric matrix whose eigenvalues are `±dⱼ`. An eigenvector `w` for
/// `dⱼ > 0` satisfies `A w̄ = dⱼ w`, and such eigenvectors are orthonormal
/// as complex vectors; they are the columns of `U`. Columns for vanishing
/// singular values span the kernel of `z ↦ A z̄` and are obtained by complex
/// Gram–Schmidt completion.
pub fn takagi(a: &CMat) -> Result<(CMat, Vec<f64>)> {
    check_symmetric(a, crate::DEFAULT_TOL, "A")?;
    let n = a.nrows();
    let a = symmetrize(a);
    let eig = SymmetricEigen::new(realify_antilinear(&a));
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let scale = 1.0 + spectral_norm(&a);
    let cutoff = 1e-13 * scale;
    let mut columns: Vec<CVec> = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    for &k in order.iter().take(n) {
        let lambda = eig.eigenvalues[k];
        if lambda <= cutoff {
            break;
        }
        let v = eig.eigenvectors.column(k);
        let w = CVec::from_fn(n, |i, _| C64::new(v[i], v[n + i]));
        columns.push(w);
        d.push(lambda);
    }
    // Complete to an orthonormal basis; the completion spans the kernel.
    for e in 0..n {
        if columns.len() == n {
            break;
        }
        let mut v = CVec::from_fn(n, |i, _| if i == e { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        for _ in 0..2 {
            for c in &columns {
                let proj = c.dotc(&v);
                v -= c * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            columns.push(v / C64::new(norm, 0.0));
            d.push(0.0);
        }
    }
    let u = CMat::from_columns(&columns);
    Ok((u, d))
}

/// Solves `M x = b` for a real square system by LU; errors when singular.
pub fn solve_real(m: &RMat, b: &RVec) -> Result<RVec> {
    m.clone().lu().solve(b).ok_or_else(|| Error::Domain("singular linear system".into()))
}

/// Real matrix inverse by LU; errors when singular.
pub fn inverse_real(m: &RMat) -> Result<RMat> {
    m.clone().lu().try_inverse().ok_or_else(|| Error::Domain("matrix is singular".into()))
}

/// Complex matrix inverse by LU; errors when singular.
pub fn inverse_complex(m: &CMat) -> Result<CMat> {
    m.clone().lu().try_inverse().ok_or_else(|| Error::Domain("matrix is singular".into()))
}

/// The n×2n complex matrix `[I, iI]` (so that `P·[x; y] = x + iy`).
pub fn p_matrix(n: usize) -> CMat {
    CMat::from_fn(n, 2 * n, |i, j| {
        if j == i {
            C64::new(1.0, 0.0)
        } else if j == n + i {
            C64::new(0.0, 1.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// The n×2n complex matrix `[I, −iI]` (so that `P̄·[x; y] = x − iy`).
pub fn p_bar_matrix(n: usize) -> CMat {
    p_matrix(n).map(|z| z.conj())
}

/// Builds a complex matrix from real and imaginary parts.
pub fn complex_from_parts(re: &RMat, im: &RMat) -> CMat {
    DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| C64::new(re[(i, j)], im[(i, j)]))
}
