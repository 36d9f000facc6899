//! Brute-force reference computations for validating `gausskit`.
//!
//! Everything here favours obvious correctness over speed: polynomials are
//! expanded term by term, operator exponentials are summed as finite power
//! series of explicit truncated matrices, and integrals are evaluated on
//! fixed high-order quadrature grids. Nothing in this crate depends on
//! `gausskit`, so agreement between the two is a genuine cross-check.
//!
//! Truncated operators are dense matrices over the particle basis
//! `{t ∈ ℤ₊ⁿ : |t| ≤ cutoff}` in graded order: shells of increasing total
//! number, and inside a shell descending lexicographic order (so for two
//! modes the one-particle shell is `(1,0), (0,1)`).

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

/// A multivariate polynomial stored as exponent vector → coefficient.
type Poly = HashMap<Vec<usize>, C64>;

/// All multi-indices of `n` modes with total number at most `cutoff`, in
/// graded descending-lexicographic order.
pub fn graded_basis(n: usize, cutoff: usize) -> Vec<Vec<usize>> {
    fn shell(n: usize, m: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == n {
            prefix.push(m);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=m).rev() {
            prefix.push(first);
            shell(n, m - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for m in 0..=cutoff {
        shell(n, m, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn multi_factorial(t: &[usize]) -> f64 {
    t.iter().map(|&k| factorial(k)).product()
}

fn poly_mul(p: &Poly, q: &Poly, cap: usize) -> Poly {
    let mut out = Poly::new();
    for (ep, cp) in p {
        for (eq, cq) in q {
            let e: Vec<usize> = ep.iter().zip(eq).map(|(a, b)| a + b).collect();
            if e.iter().sum::<usize>() <= cap {
                *out.entry(e).or_insert(C64::new(0.0, 0.0)) += cp * cq;
            }
        }
    }
    out
}

/// Coefficient of `zᵗ/√(t!)` in `exp(μᵀz + zᵀBz)`.
///
/// The exponent is expanded as an explicit polynomial and the exponential is
/// summed as `Σ_k Pᵏ/k!`, every power truncated at total degree
/// `degree_cap`. Since the exponent has no constant term, `Pᵏ` starts in
/// degree `k`, so the truncated sum is exact for `|t| ≤ degree_cap`.
pub fn series_coefficient(b: &DMatrix<C64>, mu: &[C64], t: &[usize], degree_cap: usize) -> C64 {
    let n = mu.len();
    assert_eq!(t.len(), n);
    assert!(t.iter().sum::<usize>() <= degree_cap, "|t| exceeds the degree cap");
    let unit = |i: usize| {
        let mut e = vec![0; n];
        e[i] += 1;
        e
    };
    let mut exponent = Poly::new();
    for i in 0..n {
        *exponent.entry(unit(i)).or_insert(C64::new(0.0, 0.0)) += mu[i];
        for j in 0..n {
            let mut e = unit(i);
            e[j] += 1;
            *exponent.entry(e).or_insert(C64::new(0.0, 0.0)) += b[(i, j)];
        }
    }
    let mut total = Poly::new();
    total.insert(vec![0; n], C64::new(1.0, 0.0));
    let mut power = total.clone();
    for k in 1..=degree_cap {
        power = poly_mul(&power, &exponent, degree_cap);
        for (e, c) in &power {
            *total.entry(e.clone()).or_insert(C64::new(0.0, 0.0)) += c / factorial(k);
        }
    }
    total.get(t).copied().unwrap_or(C64::new(0.0, 0.0)) * multi_factorial(t).sqrt()
}

/// Nodes and weights of the `k`-point Gauss–Legendre rule on `[-1, 1]`,
/// by Newton iteration on the three-term Legendre recurrence.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..k {
        let mut x = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=k {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            if k == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = k as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre nodes/weights on `[lo, hi]`.
fn composite_rule(lo: f64, hi: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    let h = (hi - lo) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let a = lo + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((a + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
        }
    }
    out
}

/// Numerically evaluates `∫_{ℝⁿ} exp(−xᵀAx + mᵀx) dx` for `n ∈ {1, 2}`.
///
/// The domain is a box centred on the maximiser of the real part of the
/// exponent, wide enough that the integrand has decayed below `e^{-60}`
/// relative to its peak, covered by a composite 10-point Gauss–Legendre rule.
pub fn quadrature_gaussian(a: &DMatrix<C64>, m: &[C64]) -> Result<C64, String> {
    let n = m.len();
    if !(n == 1 || n == 2) || a.nrows() != n || a.ncols() != n {
        return Err("quadrature oracle supports 1×1 and 2×2 inputs only".into());
    }
    let re_a = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)].re + a[(j, i)].re));
    let eig = SymmetricEigen::new(re_a.clone());
    let lmin = eig.eigenvalues.min();
    if lmin <= 0.0 {
        return Err("integrand insufficiently decaying: Re A is not positive definite".into());
    }
    let re_m = nalgebra::DVector::from_fn(n, |i, _| m[i].re);
    let centre = re_a.clone().lu().solve(&(re_m * 0.5)).ok_or("singular Re A")?;
    let half_width = (60.0 / lmin).sqrt() + 1.0;
    let exponent = |x: &[f64]| {
        let mut s = C64::new(0.0, 0.0);
        for i in 0..n {
            s += m[i] * x[i];
            for j in 0..n {
                s -= a[(i, j)] * x[i] * x[j];
            }
        }
        s
    };
    // Panel width small enough to resolve oscillation from Im A and Im m.
    let im_scale = a.iter().map(|z| z.im.abs()).fold(0.0, f64::max) * half_width
        + m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
        + 1.0;
    let panels = ((2.0 * half_width * im_scale).ceil() as usize).clamp(40, 400);
    let rules: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|i| composite_rule(centre[i] - half_width, centre[i] + half_width, panels, 10))
        .collect();
    let mut total = C64::new(0.0, 0.0);
    if n == 1 {
        for &(x, w) in &rules[0] {
            total += exponent(&[x]).exp() * w;
        }
    } else {
        for &(x, wx) in &rules[0] {
            for &(y, wy) in &rules[1] {
                total += exponent(&[x, y]).exp() * (wx * wy);
            }
        }
    }
    Ok(total)
}

/// Truncated annihilation matrices `a_j` on the graded basis:
/// `a_j|t⟩ = √t_j |t − e_j⟩`.
pub fn truncated_annihilators(n: usize, cutoff: usize) -> Vec<DMatrix<C64>> {
    let basis = graded_basis(n, cutoff);
    let index: HashMap<&Vec<usize>, usize> = basis.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let d = basis.len();
    (0..n)
        .map(|j| {
            let mut a = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
            for (col, t) in basis.iter().enumerate() {
                if t[j] > 0 {
                    let mut s = t.clone();
                    s[j] -= 1;
                    a[(index[&s], col)] = C64::new((t[j] as f64).sqrt(), 0.0);
                }
            }
            a
        })
        .collect()
}

/// `exp(Σ B_rs a_r a_s)` on the truncated window.
///
/// `Q = Σ B_rs a_r a_s` lowers total number by two, so it is nilpotent on the
/// window and the exponential series terminates after `cutoff/2` terms.
pub fn truncated_exp_annihilation(b: &DMatrix<C64>, cutoff: usize) -> DMatrix<C64> {
    let n = b.nrows();
    let a = truncated_annihilators(n, cutoff);
    let d = a[0].nrows();
    let mut q = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for r in 0..n {
        for s in 0..n {
            q += &a[r] * &a[s] * b[(r, s)];
        }
    }
    let mut total = DMatrix::identity(d, d);
    let mut term = DMatrix::identity(d, d);
    for k in 1..=cutoff / 2 {
        term = &term * &q / C64::new(k as f64, 0.0);
        total += &term;
    }
    total
}

/// Partial trace of a truncated operator onto the modes in `keep`.
///
/// Entries are summed over all occupations of the discarded modes for which
/// both row and column stay inside the window; the result lives on the
/// kept modes' graded basis with the same cutoff.
pub fn partial_trace(op: &DMatrix<C64>, n: usize, cutoff: usize, keep: &[usize]) -> DMatrix<C64> {
    let basis = graded_basis(n, cutoff);
    let index: HashMap<&Vec<usize>, usize> = basis.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let traced: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let kept_basis = graded_basis(keep.len(), cutoff);
    let env_basis = graded_basis(traced.len(), cutoff);
    let d = kept_basis.len();
    let join = |k: &[usize], e: &[usize]| {
        let mut t = vec![0; n];
        for (pos, &mode) in keep.iter().enumerate() {
            t[mode] = k[pos];
        }
        for (pos, &mode) in traced.iter().enumerate() {
            t[mode] = e[pos];
        }
        t
    };
    DMatrix::from_fn(d, d, |r, c| {
        let mut s = C64::new(0.0, 0.0);
        for e in &env_basis {
            let row = join(&kept_basis[r], e);
            let col = join(&kept_basis[c], e);
            if let (Some(&i), Some(&j)) = (index.get(&row), index.get(&col)) {
                s += op[(i, j)];
            }
        }
        s
    })
}

/// Polar integration grid for single-mode coherent-state integrals.
#[derive(Clone, Debug)]
pub struct PolarGrid {
    pub radius: f64,
    pub radial_panels: usize,
    pub angular_points: usize,
}

impl Default for PolarGrid {
    fn default() -> Self {
        PolarGrid { radius: 12.0, radial_panels: 60, angular_points: 96 }
    }
}

/// `(1/π)∫⟨v|ψ(z)⟩⟨ψ(z)|w⟩ d²z` for truncated single-mode vectors, where
/// `ψ(z) = e^{−|z|²/2} Σ zᵏ/√k! |k⟩` is the normalized coherent state.
pub fn kb_resolution_check(v: &[C64], w: &[C64], grid: &PolarGrid) -> C64 {
    let radial = composite_rule(0.0, grid.radius, grid.radial_panels, 10);
    let sqrt_fact: Vec<f64> = (0..v.len().max(w.len())).map(|k| factorial(k).sqrt()).collect();
    let overlap = |vec: &[C64], z: C64| {
        // ⟨vec|ψ(z)⟩
        let mut s = C64::new(0.0, 0.0);
        let mut zk = C64::new(1.0, 0.0);
        for (k, c) in vec.iter().enumerate() {
            s += c.conj() * zk / sqrt_fact[k];
            zk *= z;
        }
        s * (-0.5 * z.norm_sqr()).exp()
    };
    let dtheta = 2.0 * PI / grid.angular_points as f64;
    let mut total = C64::new(0.0, 0.0);
    for &(r, wr) in &radial {
        for a in 0..grid.angular_points {
            let z = C64::from_polar(r, a as f64 * dtheta);
            total += overlap(v, z) * overlap(w, z).conj() * (wr * r * dtheta);
        }
    }
    total / PI
}

/// Mean annihilation vector `m_j = tr(ρ a_j)` and the covariance matrix `S`
/// in the `(x, y)` ordering, where the characteristic function is
/// `exp(−2i Im⟨z|m⟩ − [x;y]ᵀ S [x;y])` for `z = x + iy`.
///
/// With `q = (a + a†)/√2` and `p = (a − a†)/(i√2)`, this convention gives
/// `S_xx = Cov(p, p)`, `S_yy = Cov(q, q)` and `S_xy = −Cov(p, q)`, all
/// symmetrized. Moments are read off the truncated density matrix, so the
/// state must have negligible weight near the cutoff.
pub fn moments(rho: &DMatrix<C64>, n: usize, cutoff: usize) -> (Vec<C64>, DMatrix<f64>) {
    let a = truncated_annihilators(n, cutoff);
    let sqrt2 = std::f64::consts::SQRT_2;
    let i = C64::new(0.0, 1.0);
    let q: Vec<Sparse> = a.iter().map(|aj| Sparse::from_dense(&((aj + aj.adjoint()) / C64::new(sqrt2, 0.0)))).collect();
    let p: Vec<Sparse> = a.iter().map(|aj| Sparse::from_dense(&((aj - aj.adjoint()) / (i * sqrt2)))).collect();
    let mean: Vec<C64> = a.iter().map(|aj| Sparse::from_dense(aj).right_multiply(rho).trace()).collect();
    // Quadrature products are only reliable away from the window edge; the
    // caller is responsible for choosing a large enough cutoff.
    let sym_cov = |x: &Sparse, y: &Sparse| {
        let xy = y.right_multiply(&x.right_multiply(rho)).trace();
        let yx = x.right_multiply(&y.right_multiply(rho)).trace();
        let ex = x.right_multiply(rho).trace();
        let ey = y.right_multiply(rho).trace();
        0.5 * (xy + yx).re - ex.re * ey.re
    };
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            s[(j, k)] = sym_cov(&p[j], &p[k]);
            s[(n + j, n + k)] = sym_cov(&q[j], &q[k]);
            s[(j, n + k)] = -sym_cov(&p[j], &q[k]);
            s[(n + k, j)] = s[(j, n + k)];
        }
    }
    (mean, s)
}

/// Nonzero entries `(row, col, value)` of a matrix.
struct Sparse(Vec<(usize, usize, C64)>);

impl Sparse {
    fn from_dense(m: &DMatrix<C64>) -> Self {
        let mut entries = Vec::new();
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                if m[(r, c)] != C64::new(0.0, 0.0) {
                    entries.push((r, c, m[(r, c)]));
                }
            }
        }
        Sparse(entries)
    }

    /// `m · self`, column by column.
    fn right_multiply(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::from_element(m.nrows(), m.ncols(), C64::new(0.0, 0.0));
        for &(r, c, v) in &self.0 {
            for i in 0..m.nrows() {
                out[(i, c)] += m[(i, r)] * v;
            }
        }
        out
    }
}

/// Schmidt rank of a truncated pure state across the split `first | rest`:
/// the number of singular values above `rel_tol·σ_max` of its coefficient
/// matrix.
///
/// Only the block in which both sides carry at most `cutoff/2` particles is
/// used. Every such pair lies inside the window, so a product state gives an
/// exactly rank-one block, whereas the full triangular window would cut a
/// product apart and fake a higher rank.
pub fn schmidt_rank(psi: &[C64], n: usize, cutoff: usize, first: &[usize], rel_tol: f64) -> usize {
    let basis = graded_basis(n, cutoff);
    let rest: Vec<usize> = (0..n).filter(|i| !first.contains(i)).collect();
    let half = cutoff / 2;
    let row_basis = graded_basis(first.len(), half);
    let col_basis = graded_basis(rest.len(), half);
    let row_index: HashMap<&Vec<usize>, usize> = row_basis.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let col_index: HashMap<&Vec<usize>, usize> = col_basis.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut m = DMatrix::from_element(row_basis.len(), col_basis.len(), C64::new(0.0, 0.0));
    for (t, c) in basis.iter().zip(psi) {
        let r: Vec<usize> = first.iter().map(|&i| t[i]).collect();
        let s: Vec<usize> = rest.iter().map(|&i| t[i]).collect();
        if let (Some(&i), Some(&j)) = (row_index.get(&r), col_index.get(&s)) {
            m[(i, j)] = *c;
        }
    }
    let sv = m.singular_values();
    let largest = sv.iter().fold(0.0_f64, |a, &b| a.max(b));
    sv.iter().filter(|&&x| x > rel_tol * largest).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((integral - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn basis_counts_and_order() {
        let b = graded_basis(2, 2);
        assert_eq!(b, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(graded_basis(3, 20).len(), 1771);
    }
}
