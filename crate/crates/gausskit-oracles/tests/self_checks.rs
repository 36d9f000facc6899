//! The reference computations checked against closed forms, so that a
//! disagreement with the library points at the library.

use gausskit_oracles::{
    graded_basis, kb_resolution_check, moments, partial_trace, quadrature_gaussian, schmidt_rank,
    series_coefficient, truncated_annihilators, truncated_exp_annihilation, PolarGrid,
};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

#[test]
fn graded_basis_order_and_size() {
    let basis = graded_basis(2, 2);
    assert_eq!(basis, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
    assert_eq!(graded_basis(3, 4).len(), 35);
}

#[test]
fn quadrature_closed_forms() {
    let one = DMatrix::from_element(1, 1, c(1.0, 0.0));
    let v = quadrature_gaussian(&one, &[c(0.0, 0.0)]).unwrap();
    assert!((v - c(std::f64::consts::PI.sqrt(), 0.0)).norm() < 1e-12);

    let a = DMatrix::from_element(1, 1, c(0.3, 0.0));
    let v = quadrature_gaussian(&a, &[c(1.0, 0.0)]).unwrap();
    let expected = (std::f64::consts::PI / 0.3).sqrt() * (1.0 / 1.2f64).exp();
    assert!((v - c(expected, 0.0)).norm() < 1e-10 * expected);

    // Oscillatory: ∫ e^{−x² + ix} dx = √π e^{−1/4}.
    let v = quadrature_gaussian(&one, &[c(0.0, 1.0)]).unwrap();
    assert!((v - c(std::f64::consts::PI.sqrt() * (-0.25f64).exp(), 0.0)).norm() < 1e-12);

    // Two modes: π / √det A.
    let a2 = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.3, 0.0), c(0.3, 0.0), c(2.0, 0.0)]);
    let v = quadrature_gaussian(&a2, &[c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert!((v - c(std::f64::consts::PI / (2.0f64 - 0.09).sqrt(), 0.0)).norm() < 1e-11);

    let bad = DMatrix::from_element(1, 1, c(-1.0, 0.0));
    assert!(quadrature_gaussian(&bad, &[c(0.0, 0.0)]).is_err());
}

#[test]
fn series_closed_forms() {
    // B = 0: coefficients of exp(μz) are μᵗ/√t!.
    let zero = DMatrix::zeros(1, 1);
    let mu = [c(0.4, -0.2)];
    for t in 0..8 {
        let got = series_coefficient(&zero, &mu, &[t], 8);
        let expected = mu[0].powu(t as u32) / factorial(t).sqrt();
        assert!((got - expected).norm() < 1e-14);
    }
    // Single mode, μ = 0: φ(2k) = √(2k)! βᵏ/k!, odd orders vanish.
    let beta = c(0.3, 0.1);
    let b = DMatrix::from_element(1, 1, beta);
    for k in 0..5 {
        let got = series_coefficient(&b, &[c(0.0, 0.0)], &[2 * k], 10);
        let expected = beta.powu(k as u32) * factorial(2 * k).sqrt() / factorial(k);
        assert!((got - expected).norm() < 1e-14);
        assert_eq!(series_coefficient(&b, &[c(0.0, 0.0)], &[2 * k + 1], 11), c(0.0, 0.0));
    }
    // Two-mode pair: B with only B₁₂ = B₂₁ = β/2 gives φ(k,k) = βᵏ.
    let b = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), beta / 2.0, beta / 2.0, c(0.0, 0.0)]);
    for k in 0..5 {
        let got = series_coefficient(&b, &[c(0.0, 0.0), c(0.0, 0.0)], &[k, k], 10);
        assert!((got - beta.powu(k as u32)).norm() < 1e-14);
    }
}

#[test]
fn annihilators_and_their_exponential() {
    let a = truncated_annihilators(1, 4);
    for k in 1..=4 {
        assert!((a[0][(k - 1, k)] - c((k as f64).sqrt(), 0.0)).norm() < 1e-15);
    }
    // Canonical commutator holds away from the top shell.
    let comm = &a[0] * a[0].adjoint() - a[0].adjoint() * &a[0];
    for k in 0..4 {
        assert!((comm[(k, k)] - c(1.0, 0.0)).norm() < 1e-14);
    }
    // exp(β a²) applied to |2⟩ gives |2⟩ + β√2 |0⟩.
    let beta = c(0.2, 0.1);
    let e = truncated_exp_annihilation(&DMatrix::from_element(1, 1, beta), 4);
    assert!((e[(0, 2)] - beta * 2f64.sqrt()).norm() < 1e-15);
    assert_eq!(e[(2, 2)], c(1.0, 0.0));
}

#[test]
fn coherent_resolution_of_identity() {
    let grid = PolarGrid::default();
    let vacuum = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let one = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
    assert!((kb_resolution_check(&vacuum, &vacuum, &grid) - c(1.0, 0.0)).norm() < 1e-6);
    assert!(kb_resolution_check(&vacuum, &one, &grid).norm() < 1e-6);
    let v = [c(0.3, 0.1), c(-0.2, 0.5), c(0.1, -0.4), c(0.6, 0.0)];
    let w = [c(0.1, 0.2), c(0.7, -0.1), c(-0.3, 0.3), c(0.2, 0.2)];
    let inner: C64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
    assert!((kb_resolution_check(&v, &w, &grid) - inner).norm() < 1e-5);
}

/// Two-mode squeezed vacuum amplitudes `√(1 − x²)·xᵏ` on `|k, k⟩`.
fn tmsv(x: f64, cutoff: usize) -> (Vec<Vec<usize>>, Vec<C64>) {
    let basis = graded_basis(2, cutoff);
    let psi = basis
        .iter()
        .map(|t| if t[0] == t[1] { c((1.0 - x * x).sqrt() * x.powi(t[0] as i32), 0.0) } else { c(0.0, 0.0) })
        .collect();
    (basis, psi)
}

#[test]
fn partial_trace_of_a_pair_is_thermal() {
    let cutoff = 12;
    let (_, psi) = tmsv(0.4, cutoff);
    let d = psi.len();
    let rho = DMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj());
    let total: C64 = rho.trace();
    for keep in [[0usize], [1]] {
        let reduced = partial_trace(&rho, 2, cutoff, &keep);
        assert!((reduced.trace() - total).norm() < 1e-14);
        for k in 0..=cutoff / 2 {
            assert!((reduced[(k, k)].re - 0.84 * 0.16f64.powi(k as i32)).abs() < 1e-14);
        }
        assert!(reduced.iter().enumerate().all(|(idx, z)| idx % (cutoff + 2) == 0 || z.norm() == 0.0));
    }
}

#[test]
fn moments_of_simple_states() {
    let cutoff = 30;
    // Vacuum: S = ½·I, m = 0.
    let d = graded_basis(1, cutoff).len();
    let mut vac = DMatrix::zeros(d, d);
    vac[(0, 0)] = c(1.0, 0.0);
    let (m, s) = moments(&vac, 1, cutoff);
    assert!(m[0].norm() < 1e-15);
    assert!((s - DMatrix::identity(2, 2) * 0.5).abs().max() < 1e-14);
    // Thermal with ratio λ: S = ½(1+λ)/(1−λ)·I.
    let lambda: f64 = 0.2;
    let mut thermal = DMatrix::zeros(d, d);
    for k in 0..d {
        thermal[(k, k)] = c((1.0 - lambda) * lambda.powi(k as i32), 0.0);
    }
    let (_, s) = moments(&thermal, 1, cutoff);
    let expected = 0.5 * (1.0 + lambda) / (1.0 - lambda);
    assert!((s[(0, 0)] - expected).abs() < 1e-12 && (s[(1, 1)] - expected).abs() < 1e-12);
    assert!(s[(0, 1)].abs() < 1e-15);
}

#[test]
fn schmidt_rank_of_products_and_pairs() {
    let cutoff = 8;
    let (_, psi) = tmsv(0.3, cutoff);
    assert_eq!(schmidt_rank(&psi, 2, cutoff, &[0], 1e-12), cutoff / 2 + 1);
    let basis = graded_basis(2, cutoff);
    // |1⟩⊗(|0⟩+|1⟩)/√2.
    let product: Vec<C64> = basis
        .iter()
        .map(|t| if t[0] == 1 && t[1] <= 1 { c(std::f64::consts::FRAC_1_SQRT_2, 0.0) } else { c(0.0, 0.0) })
        .collect();
    assert_eq!(schmidt_rank(&product, 2, cutoff, &[0], 1e-12), 1);
}
