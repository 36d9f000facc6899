//! High-level Gaussian-state API: construction, characteristic function,
//! photon-number statistics, marginals, entanglement of pure states and
//! normal forms.

use rayon::prelude::*;

use crate::fock::{number_diagonal, Basis, MultiIndex, TailReport};
use crate::linalg::{build_m_tol, hermitian_eigenvalues, inverse_real, max_abs_c, takagi, to_complex};
use crate::params::{cov_to_e2, e2_to_cov, is_pure, is_valid_state, trace_of_positive, CovarianceParams, E2Params};
use crate::semigroup::{conjugate_by_gamma, conjugate_by_weyl, mean_of_state};
use crate::{C64, CMat, CVec, Error, RMat, Result};

/// A Gaussian state: validated E₂ parameters with the derived mean and
/// covariance cached alongside.
#[derive(Clone, Debug)]
pub struct GaussianState {
    params: E2Params,
    cov: CovarianceParams,
}

impl GaussianState {
    /// Validates `Λ ⪰ 0`, `M(A,Λ) ≻ 0` and unit trace.
    pub fn new(params: E2Params, tol: f64) -> Result<Self> {
        if !is_valid_state(&params.a, &params.lambda, tol)? {
            return Err(Error::InvalidState("Λ must be positive and M(A,Λ) positive definite".into()));
        }
        let trace = trace_of_positive(&params, tol)?;
        if (trace - 1.0).abs() > tol.max(1e-10) * 10.0 {
            return Err(Error::InvalidState(format!("trace is {trace}, not 1")));
        }
        let cov = e2_to_cov(&params, tol)?;
        Ok(GaussianState { params, cov })
    }

    /// The state with the given mean and covariance.
    pub fn from_cov(cov: CovarianceParams, tol: f64) -> Result<Self> {
        let params = cov_to_e2(&cov, tol)?;
        Ok(GaussianState { params, cov })
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn params(&self) -> &E2Params {
        &self.params
    }

    pub fn cov(&self) -> &CovarianceParams {
        &self.cov
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        is_pure(&self.params, tol)
    }
}

/// `tr ρW(z) = exp(−2i Im⟨z|m⟩ − [x;y]ᵀS[x;y])` with `z = x + iy`.
pub fn characteristic_function(state: &GaussianState, z: &CVec) -> Result<C64> {
    if z.len() != state.n() {
        return Err(Error::Shape(format!("z has length {}, expected {}", z.len(), state.n())));
    }
    let inner = z.dotc(&state.cov.m);
    let r = crate::linalg::realify_vec(z);
    let quad = r.dot(&(&state.cov.s * &r));
    Ok(C64::new(-quad, -2.0 * inner.im).exp())
}

/// Photon-number probabilities on a window, with a tail report.
#[derive(Clone, Debug)]
pub struct NumberDistribution {
    pub basis: Basis,
    pub probabilities: Vec<f64>,
    pub tail: TailReport,
}

impl NumberDistribution {
    pub fn get(&self, t: &MultiIndex) -> Option<f64> {
        self.basis.index_of(t).map(|i| self.probabilities[i])
    }
}

/// `Pr(t) = ⟨t|ρ|t⟩` for `|t| ≤ cutoff`: the diagonal of the density matrix.
pub fn number_distribution(state: &GaussianState, cutoff: usize) -> NumberDistribution {
    let (basis, probabilities) = number_diagonal(&state.params, cutoff);
    let masses: Vec<f64> =
        (0..=cutoff).map(|m| basis.shell(m).map(|i| probabilities[i]).sum()).collect();
    NumberDistribution { basis, probabilities, tail: TailReport::from_shell_masses(&masses) }
}

/// A basis-aligned split of the modes into `subset` and its complement.
/// Modes are numbered from 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModeBipartition {
    subset: Vec<usize>,
    n: usize,
}

impl ModeBipartition {
    /// A nonempty proper subset of `0..n`, in the given order.
    pub fn new(subset: Vec<usize>, n: usize) -> Result<Self> {
        if subset.is_empty() || subset.len() >= n {
            return Err(Error::Domain(format!("mode subset must be nonempty and proper (n = {n})")));
        }
        let mut seen = vec![false; n];
        for &j in &subset {
            if j >= n || seen[j] {
                return Err(Error::Domain(format!("invalid or repeated mode {j} for n = {n}")));
            }
            seen[j] = true;
        }
        Ok(ModeBipartition { subset, n })
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    /// Modes outside the subset, ascending.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.n).filter(|j| !self.subset.contains(j)).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// All `2ⁿ⁻¹ − 1` splits, each listed once with mode 0 in the subset.
    pub fn all(n: usize) -> Vec<ModeBipartition> {
        if n < 2 {
            return Vec::new();
        }
        (0..(1usize << (n - 1)) - 1)
            .map(|mask| {
                let subset = std::iter::once(0).chain((1..n).filter(|j| mask >> (j - 1) & 1 == 1)).collect();
                ModeBipartition { subset, n }
            })
            .collect()
    }

    /// `"1,2|3"` with 1-based mode numbers.
    pub fn label(&self) -> String {
        let fmt = |v: &[usize]| v.iter().map(|j| (j + 1).to_string()).collect::<Vec<_>>().join(",");
        format!("{}|{}", fmt(&self.subset), fmt(&self.complement()))
    }
}

fn sub_c(m: &CMat, rows: &[usize], cols: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn sub_r(m: &RMat, rows: &[usize], cols: &[usize]) -> RMat {
    RMat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Position/momentum rows `[x_keep; y_keep]` of the realified space.
fn real_indices(modes: &[usize], n: usize) -> Vec<usize> {
    modes.iter().copied().chain(modes.iter().map(|j| j + n)).collect()
}

/// The reduced state on `keep` by restriction of mean and covariance.
pub fn marginal(state: &GaussianState, keep: &ModeBipartition, tol: f64) -> Result<GaussianState> {
    let n = state.n();
    let idx = real_indices(keep.subset(), n);
    let m = CVec::from_iterator(keep.subset().len(), keep.subset().iter().map(|&j| state.cov.m[j]));
    let cov = CovarianceParams { m, s: sub_r(&state.cov.s, &idx, &idx) };
    GaussianState::from_cov(cov, tol)
}

/// Constants in front of the correction terms of the direct E₂ marginal
/// formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarginalPrefactor {
    /// `¼` on both corrections, the constant of the published formula.
    Quarter,
    /// `¼` on the `A` correction and `½` on the `Λ` correction, as obtained
    /// by carrying out the partial-trace integral; reproduces [`marginal`].
    Corrected,
}

impl MarginalPrefactor {
    /// `(κ_A, κ_Λ)`.
    fn values(self) -> (f64, f64) {
        match self {
            MarginalPrefactor::Quarter => (0.25, 0.25),
            MarginalPrefactor::Corrected => (0.25, 0.5),
        }
    }
}

/// The marginal of a mean-zero state computed directly in E₂ parameters:
///
/// ```text
/// c₀ = c(A,Λ)/c(A₁₁,Λ₁₁),
/// A₀ = A₀₀ + κ_A·C₀₁ M(A₁₁,Λ₁₁)⁻¹ C₀₁ᵀ,
/// Λ₀ = Λ₀₀ + κ_Λ·C₀₁ M(A₁₁,Λ₁₁)⁻¹ C₀₁†,
/// C₀₁ = [Λ₀₁ + 2A₀₁,  i(Λ₀₁ − 2A₀₁)],
/// ```
///
/// with `(κ_A, κ_Λ)` chosen by `prefactor`. Only `(¼, ½)` agrees with
/// [`marginal`]; `(¼, ¼)` is kept to exhibit the difference. Returns raw
/// parameters, without validating the result as a state.
pub fn marginal_e2_direct(state: &GaussianState, keep: &ModeBipartition, prefactor: MarginalPrefactor, tol: f64) -> Result<E2Params> {
    let p = &state.params;
    if p.mu.iter().any(|z| z.norm() > tol) {
        return Err(Error::Unsupported("direct E₂ marginal is stated for mean-zero states".into()));
    }
    let k0 = keep.subset().to_vec();
    let k1 = keep.complement();
    let a00 = sub_c(&p.a, &k0, &k0);
    let a01 = sub_c(&p.a, &k0, &k1);
    let a11 = sub_c(&p.a, &k1, &k1);
    let l00 = sub_c(&p.lambda, &k0, &k0);
    let l01 = sub_c(&p.lambda, &k0, &k1);
    let l11 = sub_c(&p.lambda, &k1, &k1);
    let m11 = build_m_tol(&a11, &l11, tol)?;
    let m11_inv = to_complex(&inverse_real(&m11)?);
    let two = C64::new(2.0, 0.0);
    let left = &l01 + &a01 * two;
    let right = (&l01 - &a01 * two) * C64::new(0.0, 1.0);
    let mut c01 = CMat::zeros(k0.len(), 2 * k1.len());
    c01.columns_mut(0, k1.len()).copy_from(&left);
    c01.columns_mut(k1.len(), k1.len()).copy_from(&right);
    let (kappa_a, kappa_l) = prefactor.values();
    let a0 = a00 + &c01 * &m11_inv * c01.transpose() * C64::new(kappa_a, 0.0);
    let l0 = l00 + &c01 * &m11_inv * c01.adjoint() * C64::new(kappa_l, 0.0);
    let c0 = crate::linalg::c_factor(&p.a, &p.lambda, tol)? / crate::linalg::c_factor(&a11, &l11, tol)?;
    E2Params::new(c0, CVec::zeros(k0.len()), a0, l0)
}

fn require_pure(state: &GaussianState, tol: f64) -> Result<()> {
    if state.is_pure(tol) {
        Ok(())
    } else {
        Err(Error::Unsupported("separability criteria are available for pure states only".into()))
    }
}

/// Largest modulus in the block `A₀₁` coupling the split's two sides.
pub fn offdiag_norm(state: &GaussianState, split: &ModeBipartition) -> f64 {
    max_abs_c(&sub_c(&state.params.a, split.subset(), &split.complement()))
}

/// A pure state is a product across the split iff the block `A₀₁` vanishes.
pub fn is_pure_separable(state: &GaussianState, split: &ModeBipartition, tol: f64) -> Result<bool> {
    require_pure(state, tol)?;
    if split.n() != state.n() {
        return Err(Error::Shape("split is for a different number of modes".into()));
    }
    Ok(offdiag_norm(state, split) <= tol)
}

/// Sufficient condition for complete entanglement of a pure state: every
/// off-diagonal entry of `A` is nonzero (and `‖A‖ < ½`, which holds for
/// every pure state).
pub fn complete_entanglement_certificate(state: &GaussianState, tol: f64) -> Result<bool> {
    require_pure(state, tol)?;
    let a = &state.params.a;
    let n = state.n();
    Ok(n >= 2
        && crate::linalg::spectral_norm(a) < 0.5
        && (0..n).all(|i| (0..n).all(|j| i == j || a[(i, j)].norm() > tol)))
}

/// True iff the pure state is entangled across every basis-aligned split.
pub fn is_completely_entangled_pure(state: &GaussianState, tol: f64) -> Result<bool> {
    require_pure(state, tol)?;
    if complete_entanglement_certificate(state, tol)? {
        return Ok(true);
    }
    let splits = ModeBipartition::all(state.n());
    Ok(!splits.is_empty() && splits.par_iter().all(|s| offdiag_norm(state, s) > tol))
}

/// Verdict for one split in an [`EntanglementReport`].
#[derive(Clone, Debug, PartialEq)]
pub struct SplitVerdict {
    pub split: ModeBipartition,
    pub separable: bool,
    pub offdiag_norm: f64,
}

/// Separability of a pure state across the requested splits.
#[derive(Clone, Debug, PartialEq)]
pub struct EntanglementReport {
    pub splits: Vec<SplitVerdict>,
    pub completely_entangled: bool,
}

/// Evaluates the given splits (or all of them when `splits` is empty).
pub fn entanglement_report(state: &GaussianState, splits: &[ModeBipartition], tol: f64) -> Result<EntanglementReport> {
    require_pure(state, tol)?;
    let list = if splits.is_empty() { ModeBipartition::all(state.n()) } else { splits.to_vec() };
    let verdicts = list
        .into_iter()
        .map(|split| {
            let norm = offdiag_norm(state, &split);
            Ok(SplitVerdict { separable: is_pure_separable(state, &split, tol)?, offdiag_norm: norm, split })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntanglementReport { splits: verdicts, completely_entangled: is_completely_entangled_pure(state, tol)? })
}

/// Output of [`normal_form`].
#[derive(Clone, Debug)]
pub struct NormalForm {
    /// The mean `z` removed by the Weyl conjugation `W(−z)·W(z)`.
    pub displacement: CVec,
    /// The unitary `U` of the subsequent conjugation `Γ(U)·Γ(U)†`.
    pub unitary: CMat,
    /// Mean-zero parameters with `Λ` diagonal in descending order, and `A`
    /// diagonal too when the state is pure.
    pub canonical: E2Params,
}

/// Removes the mean by a Weyl conjugation, then diagonalizes `Λ` (or, for a
/// pure state, takes the Takagi form of `A`) by a second-quantized unitary.
pub fn normal_form(state: &GaussianState, tol: f64) -> Result<NormalForm> {
    let p = &state.params;
    let n = p.n();
    let z = mean_of_state(p, tol)?;
    let centred = conjugate_by_weyl(p, &z)?;
    let unitary = if state.is_pure(tol) {
        let (w, _) = takagi(&centred.a)?;
        w.adjoint()
    } else {
        let eig = nalgebra::SymmetricEigen::new(crate::linalg::hermitize(&centred.lambda));
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let v = CMat::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
        v.adjoint()
    };
    let mut canonical = conjugate_by_gamma(&centred, &unitary)?;
    canonical.mu = CVec::zeros(n);
    Ok(NormalForm { displacement: z, unitary, canonical })
}

/// Undoes [`normal_form`]: `W(z)Γ(U)†ρ′Γ(U)W(z)†`.
pub fn from_normal_form(nf: &NormalForm) -> Result<E2Params> {
    let p = conjugate_by_gamma(&nf.canonical, &nf.unitary.adjoint())?;
    conjugate_by_weyl(&p, &(-&nf.displacement))
}

/// Eigenvalues of `S + (i/2)J`, ascending.
pub fn uncertainty_spectrum(state: &GaussianState) -> Vec<f64> {
    hermitian_eigenvalues(&state.cov.uncertainty_matrix())
}
