//! The finite-outcome tomography scheme: battery structure, exact outcome
//! probabilities, sampling and estimation.

mod common;

use common::{c, mi, TOL};
use gausskit::fock::{density_matrix, matrix_element, pure_state_vector};
use gausskit::params::E2Params;
use gausskit::tomography::{
    estimate, expected_records, extended_battery, outcome_label, outcome_probabilities, polarize, sample, simulate,
    standard_battery, vn_outcomes, window_basis, BasisVector, MeasurementKind, MeasurementRecord, MeasurementSpec,
    WindowState,
};
use gausskit::{C64, CMat, CVec, Error};

fn spec(kind: MeasurementKind, n: usize) -> MeasurementSpec {
    MeasurementSpec::new(kind, n).unwrap()
}

#[test]
fn battery_sizes() {
    for n in 1..=4 {
        let battery = standard_battery(n);
        let yes_no = battery.iter().filter(|s| s.is_yes_no()).count();
        assert_eq!(yes_no, 1 + 2 * n + n * (n + 1));
        let multi: Vec<_> = battery.iter().filter(|s| !s.is_yes_no()).collect();
        assert_eq!(multi.len(), 1);
        assert_eq!(multi[0].outcomes(), (n + 1) * (n + 2) / 2 + 1);
        assert_eq!(vn_outcomes(n), (n + 1) * (n + 2) / 2 + 1);
        assert_eq!(extended_battery(n).len(), battery.len() + n * (n - 1));
    }
}

#[test]
fn von_neumann_labels_are_a_bijection() {
    for n in 1..=4 {
        let mut labels = vec![outcome_label(BasisVector::Vacuum, n).unwrap()];
        for r in 1..=n {
            labels.push(outcome_label(BasisVector::One(r), n).unwrap());
        }
        for j in 1..=n {
            for k in j..=n {
                labels.push(outcome_label(BasisVector::Two(j, k), n).unwrap());
            }
        }
        labels.sort_unstable();
        let expected: Vec<usize> = (0..vn_outcomes(n) - 1).collect();
        assert_eq!(labels, expected, "n={n}");
    }
    assert_eq!(outcome_label(BasisVector::Two(1, 1), 2).unwrap(), 3);
    assert_eq!(outcome_label(BasisVector::Two(1, 2), 2).unwrap(), 4);
    assert_eq!(outcome_label(BasisVector::Two(2, 2), 2).unwrap(), 5);
    assert!(outcome_label(BasisVector::Two(2, 1), 2).is_err());
    assert!(outcome_label(BasisVector::One(3), 2).is_err());
}

#[test]
fn von_neumann_projectors_are_orthonormal() {
    for n in 1..=3 {
        let vn = spec(MeasurementKind::VonNeumann, n);
        let d = vn.vectors.len();
        let gram = CMat::from_fn(d, d, |i, j| vn.vectors[i].dotc(&vn.vectors[j]));
        assert_eq!(gram, CMat::identity(d, d));
        // Label order coincides with the window order.
        let basis = window_basis(n);
        assert_eq!(basis.len(), d);
        assert_eq!(basis[0], mi(&vec![0; n]));
    }
}

#[test]
fn vacuum_overlap_is_c() {
    let mut rng = common::rng(51);
    for n in 1..=3 {
        let p = common::state(&mut rng, n, true);
        let window = WindowState::new(&p);
        let probs = outcome_probabilities(&window, &spec(MeasurementKind::M0, n), TOL).unwrap();
        assert!((probs[0] - p.c).abs() < 1e-15);
        assert!((probs[0] + probs[1] - 1.0).abs() < 1e-15);
    }
    let vac = WindowState::new(&E2Params::vacuum(2));
    let probs = outcome_probabilities(&vac, &spec(MeasurementKind::VonNeumann, 2), TOL).unwrap();
    assert_eq!(probs[0], 1.0);
    assert!(probs[1..].iter().all(|&x| x == 0.0));
}

#[test]
fn squeezed_vacuum_von_neumann_statistics() {
    let alpha = 0.3;
    let a = CMat::from_element(1, 1, c(alpha, 0.0));
    let p = E2Params::mean_zero_state(a.clone(), CMat::zeros(1, 1), TOL).unwrap();
    let probs = outcome_probabilities(&WindowState::new(&p), &spec(MeasurementKind::VonNeumann, 1), TOL).unwrap();
    let psi = pure_state_vector(&a, 4, TOL).unwrap();
    let root = (1.0 - 4.0 * alpha * alpha).sqrt();
    assert!((probs[0] - root).abs() < 1e-15);
    assert_eq!(probs[1], 0.0);
    assert!((probs[2] - psi.entry(&mi(&[2])).unwrap().norm_sqr()).abs() < 1e-15);
    assert!((probs[2] - root * 2.0 * alpha * alpha).abs() < 1e-15);
    let element = matrix_element(&a, &CMat::zeros(1, 1), &mi(&[2]), &mi(&[2]), TOL).unwrap();
    assert!((probs[2] - element.re).abs() < 1e-15);
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-15);
}

/// Polarization recovers every window matrix element from four diagonal
/// expectations.
#[test]
fn polarization_recovers_window_elements() {
    let mut rng = common::rng(52);
    let p = common::state(&mut rng, 2, true);
    let window = WindowState::new(&p);
    let rho = density_matrix(&p, 2);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let basis = window_basis(2);
    let e = |i: usize| {
        let mut v = CVec::zeros(basis.len());
        v[i] = c(1.0, 0.0);
        v
    };
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            if i == j {
                continue;
            }
            let (u, v) = (e(i), e(j));
            let plus = window.element(&((&u + &v) * c(s, 0.0)), &((&u + &v) * c(s, 0.0))).re;
            let plus_i = window.element(&((&u + &v * c(0.0, 1.0)) * c(s, 0.0)), &((&u + &v * c(0.0, 1.0)) * c(s, 0.0))).re;
            let du = window.element(&u, &u).re;
            let dv = window.element(&v, &v).re;
            let recovered = polarize(plus, plus_i, du, dv);
            assert!((recovered - rho.entries[(i, j)]).norm() < 1e-12, "({i},{j})");
        }
    }
}

#[test]
fn exact_frequencies_give_exact_parameters() {
    let mut rng = common::rng(53);
    for n in 1..=3 {
        let p = common::state(&mut rng, n, true);
        // Large counts make the rounded frequencies agree to ~1e-15.
        let records = expected_records(&p, &extended_battery(n), 1u64 << 52, TOL).unwrap();
        let report = estimate(&records).unwrap();
        assert!(report.unidentified.is_empty());
        let got = report.state_params().unwrap();
        assert!(got.max_diff(&p) < 1e-9, "n={n}: {:e}", got.max_diff(&p));
    }
}

#[test]
fn standard_battery_flags_off_diagonal_lambda() {
    let mut rng = common::rng(54);
    let p = common::state(&mut rng, 2, true);
    let records = expected_records(&p, &standard_battery(2), 1u64 << 52, TOL).unwrap();
    let report = estimate(&records).unwrap();
    assert_eq!(report.unidentified, vec!["Lambda[1,2].re".to_string(), "Lambda[1,2].im".to_string()]);
    let got = report.state_params().unwrap();
    assert_eq!(got.lambda[(0, 1)], c(0.0, 0.0));
    assert!((got.a - &p.a).norm() < 1e-9);
    assert!((got.mu - &p.mu).norm() < 1e-9);
    assert!((got.lambda[(0, 0)] - p.lambda[(0, 0)]).norm() < 1e-9);
}

#[test]
fn sampling_is_deterministic_and_consistent() {
    let probs = [0.5, 0.25, 0.125, 0.125];
    let a = sample(&probs, 100_000, 7, 3).unwrap();
    assert_eq!(a, sample(&probs, 100_000, 7, 3).unwrap());
    assert_ne!(a, sample(&probs, 100_000, 7, 4).unwrap());
    assert_eq!(a.iter().sum::<u64>(), 100_000);
    for (count, p) in a.iter().zip(probs) {
        let freq = *count as f64 / 1e5;
        let se = (p * (1.0 - p) / 1e5).sqrt();
        assert!((freq - p).abs() < 5.0 * se);
    }
    assert_eq!(sample(&[1.0, 0.0, 0.0], 1000, 1, 0).unwrap(), vec![1000, 0, 0]);
    assert!(sample(&[0.5, 0.2], 10, 0, 0).is_err());
    assert!(sample(&[1.2, -0.2], 10, 0, 0).is_err());
}

#[test]
fn simulation_is_reproducible() {
    let p = E2Params::state(
        CVec::from_vec(vec![c(0.1, 0.0)]),
        CMat::from_element(1, 1, c(0.1, 0.05)),
        CMat::from_element(1, 1, c(0.2, 0.0)),
        TOL,
    )
    .unwrap();
    let battery = standard_battery(1);
    let first = simulate(&p, &battery, 10_000, 99, TOL).unwrap();
    let second = simulate(&p, &battery, 10_000, 99, TOL).unwrap();
    assert_eq!(
        first.iter().map(|r| r.counts.clone()).collect::<Vec<_>>(),
        second.iter().map(|r| r.counts.clone()).collect::<Vec<_>>()
    );
    assert!(first.iter().all(|r| r.shots() == 10_000));
}

#[test]
fn estimates_lie_within_a_few_standard_errors() {
    let p = E2Params::state(
        CVec::from_vec(vec![c(0.1, 0.05), c(-0.05, 0.1)]),
        CMat::from_row_slice(2, 2, &[c(0.05, 0.0), c(0.1, 0.02), c(0.1, 0.02), c(-0.03, 0.04)]),
        CMat::from_row_slice(2, 2, &[c(0.15, 0.0), c(0.03, -0.02), c(0.03, 0.02), c(0.1, 0.0)]),
        TOL,
    )
    .unwrap();
    let records = simulate(&p, &extended_battery(2), 200_000, 5, TOL).unwrap();
    let report = estimate(&records).unwrap();
    let truth = gausskit::tomography::parameter_scalars(p.c, &p.mu, &p.a, &p.lambda);
    for (name, value) in truth {
        let est = report.get(&name).unwrap();
        assert!(est.stderr > 0.0);
        assert!((est.value - value).abs() <= 5.0 * est.stderr, "{name}: {} ± {} vs {value}", est.value, est.stderr);
    }
}

#[test]
fn missing_measurements_are_reported() {
    let p = E2Params::vacuum(1);
    let mut records = expected_records(&p, &standard_battery(1), 1000, TOL).unwrap();
    records.retain(|r| r.spec.kind != MeasurementKind::M0);
    assert!(estimate(&records).is_err());
}

#[test]
fn tiny_vacuum_overlap_is_ill_conditioned() {
    // A thermal state with c = 1 − λ far below its sampling noise.
    let p = E2Params::thermal(&[0.99999]).unwrap();
    let records = simulate(&p, &standard_battery(1), 100, 0, TOL).unwrap();
    let err = estimate(&records).unwrap_err();
    assert!(matches!(err, Error::IllConditioned(_) | Error::Degenerate(_)), "{err:?}");
}

#[test]
fn kind_names_round_trip() {
    for spec in extended_battery(3) {
        let name = spec.kind.name();
        assert_eq!(MeasurementKind::parse(&name).unwrap(), spec.kind, "{name}");
    }
    assert!(MeasurementKind::parse("M9,x").is_err());
    let _: &[MeasurementRecord] = &[];
    let _ = C64::new(0.0, 0.0);
}
