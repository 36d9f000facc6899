//! Simulated tomography of a Gaussian state from finitely many
//! finite-outcome measurements.
//!
//! The parameters `(c, μ, A, Λ)` are functions of the matrix elements
//! `⟨u|ρ|v⟩` for `u, v` among the vacuum `Ω`, the one-particle vectors `χ_j`
//! and the two-particle vectors `χ_jk` (`j ≤ k`):
//!
//! ```text
//! ⟨Ω|ρ|Ω⟩ = c,           ⟨χ_j|ρ|Ω⟩ = cμ_j,           ⟨χ_j|ρ|χ_k⟩ = c(μ_j μ̄_k + λ_jk),
//! ⟨χ_jj|ρ|Ω⟩ = √2 c(μ_j²/2 + a_jj),    ⟨χ_jk|ρ|Ω⟩ = 2c(μ_jμ_k/2 + a_jk)  (j ≠ k).
//! ```
//!
//! Off-diagonal matrix elements follow from diagonal ones by polarization,
//!
//! ```text
//! ⟨u|ρ|v⟩ = P((u+v)/√2) − i·P((u+iv)/√2) − (1−i)/2·(⟨u|ρ|u⟩ + ⟨v|ρ|v⟩),
//! ```
//!
//! where `P(ζ) = ⟨ζ|ρ|ζ⟩` is the "yes" probability of the two-outcome
//! measurement `{|ζ⟩⟨ζ|, I − |ζ⟩⟨ζ|}`. The diagonal elements come from one
//! von Neumann measurement with the projections onto `Ω`, `χ_r`, `χ_jk` and
//! the complement of their span.
//!
//! The standard battery does not contain the cross terms `⟨χ_j|ρ|χ_k⟩`
//! (`j ≠ k`), so it leaves the off-diagonal entries of `Λ` undetermined.
//! The extended battery adds the two exchange measurements
//! `(χ_j + χ_k)/√2`, `(χ_j + iχ_k)/√2` for each pair `j < k`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::fock::{density_matrix, Basis, MultiIndex};
use crate::params::{e2_from_amplitudes, AmplitudeData, E2Params, GeneralE2Params};
use crate::{C64, CMat, CVec, Error, Result};

/// Which projector family a measurement belongs to. Mode numbers are 1-based,
/// as in the outcome labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasurementKind {
    /// `{|Ω⟩⟨Ω|, I − |Ω⟩⟨Ω|}`.
    M0,
    /// `{|χ_j⟩⟨χ_j|, …}`.
    Mj(usize),
    /// `(χ_j + Ω)/√2`.
    Mj0(usize),
    /// `(χ_j + iΩ)/√2`.
    Mj0Prime(usize),
    /// `(χ_jk + Ω)/√2`, `j ≤ k`.
    Mjk0(usize, usize),
    /// `(χ_jk + iΩ)/√2`, `j ≤ k`.
    Mjk0Prime(usize, usize),
    /// `(χ_j + χ_k)/√2`, `j < k`.
    Exchange(usize, usize),
    /// `(χ_j + iχ_k)/√2`, `j < k`.
    ExchangePrime(usize, usize),
    /// The von Neumann measurement with `(n+1)(n+2)/2 + 1` outcomes.
    VonNeumann,
}

impl MeasurementKind {
    /// Short name, e.g. `M0`, `M'1,0`, `M1,2,0`, `X1,2`, `VN`.
    pub fn name(&self) -> String {
        match *self {
            MeasurementKind::M0 => "M0".into(),
            MeasurementKind::Mj(j) => format!("M{j}"),
            MeasurementKind::Mj0(j) => format!("M{j},0"),
            MeasurementKind::Mj0Prime(j) => format!("M'{j},0"),
            MeasurementKind::Mjk0(j, k) => format!("M{j},{k},0"),
            MeasurementKind::Mjk0Prime(j, k) => format!("M'{j},{k},0"),
            MeasurementKind::Exchange(j, k) => format!("X{j},{k}"),
            MeasurementKind::ExchangePrime(j, k) => format!("X'{j},{k}"),
            MeasurementKind::VonNeumann => "VN".into(),
        }
    }

    /// Inverse of [`MeasurementKind::name`].
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse { field: "spec".into(), message: format!("unknown measurement `{s}`") };
        if s == "M0" {
            return Ok(MeasurementKind::M0);
        }
        if s == "VN" {
            return Ok(MeasurementKind::VonNeumann);
        }
        let (head, rest) = if let Some(r) = s.strip_prefix("M'") {
            ("M'", r)
        } else if let Some(r) = s.strip_prefix("X'") {
            ("X'", r)
        } else if let Some(r) = s.strip_prefix('M') {
            ("M", r)
        } else if let Some(r) = s.strip_prefix('X') {
            ("X", r)
        } else {
            return Err(bad());
        };
        let nums: Vec<usize> = rest.split(',').map(|x| x.parse().map_err(|_| bad())).collect::<Result<_>>()?;
        Ok(match (head, nums.as_slice()) {
            ("M", [j]) => MeasurementKind::Mj(*j),
            ("M", [j, 0]) => MeasurementKind::Mj0(*j),
            ("M'", [j, 0]) => MeasurementKind::Mj0Prime(*j),
            ("M", [j, k, 0]) => MeasurementKind::Mjk0(*j, *k),
            ("M'", [j, k, 0]) => MeasurementKind::Mjk0Prime(*j, *k),
            ("X", [j, k]) => MeasurementKind::Exchange(*j, *k),
            ("X'", [j, k]) => MeasurementKind::ExchangePrime(*j, *k),
            _ => return Err(bad()),
        })
    }
}

/// `1 + n + n(n+1)/2`, the number of vectors `Ω, χ_r, χ_jk`.
fn window_dim(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// Number of outcomes `N = (n+1)(n+2)/2 + 1` of the von Neumann measurement.
pub fn vn_outcomes(n: usize) -> usize {
    window_dim(n) + 1
}

/// Label of a basis vector in the von Neumann measurement: `Ω ↦ 0`,
/// `χ_r ↦ r` and `χ_jk ↦ n + (2n − j)(j − 1)/2 + k` for `1 ≤ j ≤ k ≤ n`.
/// The complement of their span has label `N − 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisVector {
    Vacuum,
    One(usize),
    Two(usize, usize),
}

pub fn outcome_label(v: BasisVector, n: usize) -> Result<usize> {
    match v {
        BasisVector::Vacuum => Ok(0),
        BasisVector::One(r) if (1..=n).contains(&r) => Ok(r),
        BasisVector::Two(j, k) if 1 <= j && j <= k && k <= n => Ok(n + (2 * n - j) * (j - 1) / 2 + k),
        _ => Err(Error::Domain(format!("{v:?} is out of range for n = {n}"))),
    }
}

/// The vector `χ_r`, `χ_jk` or `Ω` in the window of total number ≤ 2, whose
/// index coincides with the outcome label.
fn basis_vector(v: BasisVector, n: usize) -> Result<CVec> {
    let mut e = CVec::zeros(window_dim(n));
    e[outcome_label(v, n)?] = C64::new(1.0, 0.0);
    Ok(e)
}

/// A finite-outcome measurement given by explicit projector vectors on the
/// two-particle window; the last outcome is always the complement.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSpec {
    pub kind: MeasurementKind,
    pub n: usize,
    /// Orthonormal vectors; outcome `i < len` projects onto `vectors[i]`.
    pub vectors: Vec<CVec>,
}

impl MeasurementSpec {
    pub fn new(kind: MeasurementKind, n: usize) -> Result<Self> {
        use BasisVector::*;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let i = C64::new(0.0, 1.0);
        let check_pair = |j: usize, k: usize, strict: bool| {
            if j == 0 || k > n || j > k || (strict && j == k) {
                Err(Error::Domain(format!("pair ({j},{k}) out of range for n = {n}")))
            } else {
                Ok(())
            }
        };
        let combo = |u: CVec, v: CVec, phase: C64| (u + v * phase) * C64::new(s, 0.0);
        let one = C64::new(1.0, 0.0);
        let vectors = match kind {
            MeasurementKind::M0 => vec![basis_vector(Vacuum, n)?],
            MeasurementKind::Mj(j) => vec![basis_vector(One(j), n)?],
            MeasurementKind::Mj0(j) => vec![combo(basis_vector(One(j), n)?, basis_vector(Vacuum, n)?, one)],
            MeasurementKind::Mj0Prime(j) => vec![combo(basis_vector(One(j), n)?, basis_vector(Vacuum, n)?, i)],
            MeasurementKind::Mjk0(j, k) => {
                check_pair(j, k, false)?;
                vec![combo(basis_vector(Two(j, k), n)?, basis_vector(Vacuum, n)?, one)]
            }
            MeasurementKind::Mjk0Prime(j, k) => {
                check_pair(j, k, false)?;
                vec![combo(basis_vector(Two(j, k), n)?, basis_vector(Vacuum, n)?, i)]
            }
            MeasurementKind::Exchange(j, k) => {
                check_pair(j, k, true)?;
                vec![combo(basis_vector(One(j), n)?, basis_vector(One(k), n)?, one)]
            }
            MeasurementKind::ExchangePrime(j, k) => {
                check_pair(j, k, true)?;
                vec![combo(basis_vector(One(j), n)?, basis_vector(One(k), n)?, i)]
            }
            MeasurementKind::VonNeumann => (0..window_dim(n))
                .map(|l| {
                    let mut e = CVec::zeros(window_dim(n));
                    e[l] = one;
                    e
                })
                .collect(),
        };
        Ok(MeasurementSpec { kind, n, vectors })
    }

    pub fn outcomes(&self) -> usize {
        self.vectors.len() + 1
    }

    pub fn is_yes_no(&self) -> bool {
        self.outcomes() == 2
    }
}

/// `M0`, `M_j0`, `M′_j0` (`j = 1..n`), `M_jk0`, `M′_jk0` (`j ≤ k`) and the
/// von Neumann measurement: `1 + 2n + n(n+1)` two-outcome measurements plus
/// one with `N` outcomes. The role of `M_j` is played by the von Neumann
/// measurement, which yields every `⟨χ_j|ρ|χ_j⟩` at once.
pub fn standard_battery(n: usize) -> Vec<MeasurementSpec> {
    let mut kinds = vec![MeasurementKind::M0];
    for j in 1..=n {
        kinds.push(MeasurementKind::Mj0(j));
        kinds.push(MeasurementKind::Mj0Prime(j));
    }
    for j in 1..=n {
        for k in j..=n {
            kinds.push(MeasurementKind::Mjk0(j, k));
            kinds.push(MeasurementKind::Mjk0Prime(j, k));
        }
    }
    kinds.push(MeasurementKind::VonNeumann);
    kinds.into_iter().map(|k| MeasurementSpec::new(k, n).expect("indices in range")).collect()
}

/// [`standard_battery`] plus the exchange measurements that identify the
/// off-diagonal entries of `Λ`.
pub fn extended_battery(n: usize) -> Vec<MeasurementSpec> {
    let mut specs = standard_battery(n);
    let vn = specs.pop().expect("battery ends with the von Neumann measurement");
    for j in 1..=n {
        for k in j + 1..=n {
            specs.push(MeasurementSpec::new(MeasurementKind::Exchange(j, k), n).expect("in range"));
            specs.push(MeasurementSpec::new(MeasurementKind::ExchangePrime(j, k), n).expect("in range"));
        }
    }
    specs.push(vn);
    specs
}

/// The density matrix restricted to `span{Ω, χ_r, χ_jk}`; exact, since
/// entries with total number ≤ 2 do not depend on the rest of the space.
#[derive(Clone, Debug)]
pub struct WindowState {
    pub n: usize,
    pub rho: CMat,
}

impl WindowState {
    pub fn new(p: &E2Params) -> Self {
        WindowState { n: p.n(), rho: density_matrix(p, 2).entries }
    }

    /// `⟨u|ρ|v⟩` for two window vectors.
    pub fn element(&self, u: &CVec, v: &CVec) -> C64 {
        u.dotc(&(&self.rho * v))
    }
}

/// Outcome probabilities `⟨ζ|ρ|ζ⟩`, with the complement receiving the rest.
/// Values within `tol` outside `[0, 1]` are clamped; larger excursions are
/// an internal-consistency error.
pub fn outcome_probabilities(state: &WindowState, spec: &MeasurementSpec, tol: f64) -> Result<Vec<f64>> {
    if spec.n != state.n {
        return Err(Error::Shape("measurement and state have different numbers of modes".into()));
    }
    let mut probs: Vec<f64> = spec.vectors.iter().map(|z| state.element(z, z).re).collect();
    probs.push(1.0 - probs.iter().sum::<f64>());
    for p in probs.iter_mut() {
        if *p < -tol || *p > 1.0 + tol {
            return Err(Error::InternalConsistency(format!("probability {p} outside [0, 1] for {}", spec.kind.name())));
        }
        *p = p.clamp(0.0, 1.0);
    }
    Ok(probs)
}

/// Draws `k` i.i.d. outcomes by inverse CDF with a ChaCha20 generator keyed
/// by `seed` on substream `stream`, and returns the count per outcome.
pub fn sample(probabilities: &[f64], k: u64, seed: u64, stream: u64) -> Result<Vec<u64>> {
    if probabilities.is_empty() || probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidDistribution("probabilities must be finite and nonnegative".into()));
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
    }
    let mut cdf: Vec<f64> = probabilities
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let last = cdf.len() - 1;
    // Outcomes past the last one with positive mass must never be drawn.
    let top = probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    cdf[top..].iter_mut().for_each(|c| *c = f64::INFINITY);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut counts = vec![0u64; last + 1];
    for _ in 0..k {
        let u: f64 = rng.random();
        let i = cdf.partition_point(|&c| c <= u);
        counts[i.min(last)] += 1;
    }
    Ok(counts)
}

/// Counts observed for one measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub spec: MeasurementSpec,
    pub counts: Vec<u64>,
}

impl MeasurementRecord {
    pub fn shots(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let k = self.shots().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / k).collect()
    }
}

/// Simulates `shots` repetitions of each measurement; measurement `i` uses
/// substream `i` of the generator keyed by `seed`.
pub fn simulate(p: &E2Params, specs: &[MeasurementSpec], shots: u64, seed: u64, tol: f64) -> Result<Vec<MeasurementRecord>> {
    let window = WindowState::new(p);
    specs
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let probs = outcome_probabilities(&window, spec, tol)?;
            let counts = sample(&probs, shots, seed, i as u64)?;
            Ok(MeasurementRecord { spec: spec.clone(), counts })
        })
        .collect()
}

/// The polarization identity on measured diagonal values.
pub fn polarize(p_plus: f64, p_plus_i: f64, d_u: f64, d_v: f64) -> C64 {
    C64::new(p_plus, 0.0) - C64::new(0.0, p_plus_i) - C64::new(0.5, -0.5) * (d_u + d_v)
}

/// One estimated real scalar with its standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarEstimate {
    pub name: String,
    pub value: f64,
    pub stderr: f64,
}

/// Result of [`estimate`].
#[derive(Clone, Debug)]
pub struct EstimationReport {
    /// Estimated `(c, α, β, A, Λ, B)`; for a state `β = ᾱ`, `B = Ā`.
    pub estimates: GeneralE2Params,
    pub records: Vec<MeasurementRecord>,
    /// Real scalars of `(c, μ, A, Λ)` with delta-method standard errors.
    pub table: Vec<ScalarEstimate>,
    /// Scalars the battery cannot determine; they are reported as zero.
    pub unidentified: Vec<String>,
}

impl EstimationReport {
    /// Point estimate as state parameters `(c, μ, A, Λ)`.
    pub fn state_params(&self) -> Result<E2Params> {
        let p = &self.estimates;
        E2Params::new(p.c.re, p.alpha.clone(), p.a.clone(), crate::linalg::hermitize(&p.lambda))
    }

    pub fn get(&self, name: &str) -> Option<&ScalarEstimate> {
        self.table.iter().find(|s| s.name == name)
    }
}

/// Real scalars of `(c, μ, A, Λ)` in the order used by [`EstimationReport`]:
/// `c`, `mu[j]` (re, im), `A[j,k]` (re, im, `j ≤ k`), `Lambda[j,j]`,
/// `Lambda[j,k]` (re, im, `j < k`). Indices are 1-based.
pub fn parameter_scalars(c: f64, mu: &CVec, a: &CMat, lambda: &CMat) -> Vec<(String, f64)> {
    let n = mu.len();
    let mut out = vec![("c".to_string(), c)];
    for j in 0..n {
        out.push((format!("mu[{}].re", j + 1), mu[j].re));
        out.push((format!("mu[{}].im", j + 1), mu[j].im));
    }
    for j in 0..n {
        for k in j..n {
            out.push((format!("A[{},{}].re", j + 1, k + 1), a[(j, k)].re));
            out.push((format!("A[{},{}].im", j + 1, k + 1), a[(j, k)].im));
        }
    }
    for j in 0..n {
        out.push((format!("Lambda[{},{}]", j + 1, j + 1), lambda[(j, j)].re));
    }
    for j in 0..n {
        for k in j + 1..n {
            out.push((format!("Lambda[{},{}].re", j + 1, k + 1), lambda[(j, k)].re));
            out.push((format!("Lambda[{},{}].im", j + 1, k + 1), lambda[(j, k)].im));
        }
    }
    out
}

/// Where each measured frequency lives in the flat input vector of the
/// estimator.
struct Layout {
    n: usize,
    m0: usize,
    vn: usize,
    mj0: Vec<(usize, usize)>,
    mjk0: Vec<Vec<Option<(usize, usize)>>>,
    exchange: Vec<Vec<Option<(usize, usize)>>>,
}

/// Flattens the records: one entry (the "yes" frequency) per two-outcome
/// measurement, all `N` frequencies of the von Neumann one. Returns the
/// vector, its covariance blocks and the layout.
fn flatten(records: &[MeasurementRecord]) -> Result<(Vec<f64>, Vec<(usize, Vec<f64>, u64)>, Layout)> {
    let n = records.first().map(|r| r.spec.n).ok_or_else(|| Error::Domain("no measurements".into()))?;
    let mut x = Vec::new();
    let mut blocks = Vec::new();
    let mut positions: std::collections::HashMap<MeasurementKind, usize> = Default::default();
    for r in records {
        if r.spec.n != n {
            return Err(Error::Shape("measurements for different numbers of modes".into()));
        }
        if r.counts.len() != r.spec.outcomes() {
            return Err(Error::Shape(format!("{}: expected {} counts", r.spec.kind.name(), r.spec.outcomes())));
        }
        if r.shots() == 0 {
            return Err(Error::Domain(format!("{}: no shots", r.spec.kind.name())));
        }
        if positions.contains_key(&r.spec.kind) {
            return Err(Error::Domain(format!("{} appears twice", r.spec.kind.name())));
        }
        let f = r.frequencies();
        positions.insert(r.spec.kind, x.len());
        if r.spec.is_yes_no() {
            blocks.push((x.len(), vec![f[0]], r.shots()));
            x.push(f[0]);
        } else {
            blocks.push((x.len(), f.clone(), r.shots()));
            x.extend(f);
        }
    }
    let need = |k: MeasurementKind| {
        positions.get(&k).copied().ok_or_else(|| Error::Domain(format!("missing measurement {}", k.name())))
    };
    let m0 = need(MeasurementKind::M0)?;
    let vn = need(MeasurementKind::VonNeumann)?;
    let mj0 = (1..=n)
        .map(|j| Ok((need(MeasurementKind::Mj0(j))?, need(MeasurementKind::Mj0Prime(j))?)))
        .collect::<Result<Vec<_>>>()?;
    let mut mjk0 = vec![vec![None; n + 1]; n + 1];
    let mut exchange = vec![vec![None; n + 1]; n + 1];
    for j in 1..=n {
        for k in j..=n {
            mjk0[j][k] = Some((need(MeasurementKind::Mjk0(j, k))?, need(MeasurementKind::Mjk0Prime(j, k))?));
            if j < k {
                if let (Some(&a), Some(&b)) = (
                    positions.get(&MeasurementKind::Exchange(j, k)),
                    positions.get(&MeasurementKind::ExchangePrime(j, k)),
                ) {
                    exchange[j][k] = Some((a, b));
                }
            }
        }
    }
    Ok((x, blocks, Layout { n, m0, vn, mj0, mjk0, exchange }))
}

/// The estimator as a function of the flat frequency vector.
fn estimate_from(x: &[f64], layout: &Layout) -> Result<GeneralE2Params> {
    let n = layout.n;
    let c = x[layout.m0];
    let diag = |label: usize| x[layout.vn + label];
    let one = |j: usize| diag(j);
    let two = |j: usize, k: usize| diag(n + (2 * n - j) * (j - 1) / 2 + k);
    let mut lam_z = CVec::zeros(n);
    for j in 1..=n {
        let (p, q) = layout.mj0[j - 1];
        lam_z[j - 1] = polarize(x[p], x[q], one(j), c);
    }
    let mut a_z = CMat::zeros(n, n);
    let mut lambda_z = CMat::zeros(n, n);
    for j in 1..=n {
        lambda_z[(j - 1, j - 1)] = C64::new(one(j), 0.0);
        for k in j..=n {
            let (p, q) = layout.mjk0[j][k].expect("checked in flatten");
            let el = polarize(x[p], x[q], two(j, k), c);
            let v = if j == k { el / 2f64.sqrt() } else { el / 2.0 };
            a_z[(j - 1, k - 1)] = v;
            a_z[(k - 1, j - 1)] = v;
            if let Some((p, q)) = layout.exchange[j][k] {
                let el = polarize(x[p], x[q], one(j), one(k));
                lambda_z[(j - 1, k - 1)] = el;
                lambda_z[(k - 1, j - 1)] = el.conj();
            }
        }
    }
    let mut est = e2_from_amplitudes(&AmplitudeData {
        vac: C64::new(c, 0.0),
        mu_z: lam_z.map(|z| z.conj()),
        lam_z,
        b_z: a_z.map(|z| z.conj()),
        a_z,
        lambda_z,
    })?;
    // Unmeasured cross terms stay zero rather than inheriting −μ_jμ̄_k.
    for j in 1..=n {
        for k in j + 1..=n {
            if layout.exchange[j][k].is_none() {
                est.lambda[(j - 1, k - 1)] = C64::new(0.0, 0.0);
                est.lambda[(k - 1, j - 1)] = C64::new(0.0, 0.0);
            }
        }
    }
    Ok(est)
}

fn scalars_of(p: &GeneralE2Params) -> Vec<f64> {
    parameter_scalars(p.c.re, &p.alpha, &p.a, &p.lambda).into_iter().map(|(_, v)| v).collect()
}

/// Estimates `(c, μ, A, Λ)` from a battery of records (see
/// [`standard_battery`], [`extended_battery`]) by back-substitution
/// `c → μ → (A, Λ)`, with standard errors by the delta method on the
/// binomial/multinomial sampling covariance of the frequencies.
///
/// Fails as ill-conditioned when `ĉ ≤ 10·se(ĉ)`.
pub fn estimate(records: &[MeasurementRecord]) -> Result<EstimationReport> {
    let (x, blocks, layout) = flatten(records)?;
    let n = layout.n;
    let k0 = records.iter().find(|r| r.spec.kind == MeasurementKind::M0).map(|r| r.shots()).unwrap_or(1);
    let c = x[layout.m0];
    let se_c = (c * (1.0 - c) / k0 as f64).sqrt();
    if c <= 10.0 * se_c || c <= 0.0 {
        return Err(Error::IllConditioned(format!("vacuum probability {c} is within 10 standard errors ({se_c}) of zero")));
    }
    let estimates = estimate_from(&x, &layout)?;
    let center = scalars_of(&estimates);
    // Jacobian by central differences.
    let mut jac = vec![vec![0.0; x.len()]; center.len()];
    let mut xp = x.clone();
    for i in 0..x.len() {
        let h = 1e-6 * (1.0 + x[i].abs());
        xp[i] = x[i] + h;
        let up = scalars_of(&estimate_from(&xp, &layout)?);
        xp[i] = x[i] - h;
        let down = scalars_of(&estimate_from(&xp, &layout)?);
        xp[i] = x[i];
        for (r, row) in jac.iter_mut().enumerate() {
            row[i] = (up[r] - down[r]) / (2.0 * h);
        }
    }
    let variance: Vec<f64> = jac
        .iter()
        .map(|row| {
            blocks
                .iter()
                .map(|(start, f, k)| {
                    let k = *k as f64;
                    let mut v = 0.0;
                    for (a, &fa) in f.iter().enumerate() {
                        for (b, &fb) in f.iter().enumerate() {
                            let cov = if f.len() == 1 || a == b {
                                fa * (1.0 - fa) / k
                            } else {
                                -fa * fb / k
                            };
                            v += row[start + a] * cov * row[start + b];
                        }
                    }
                    v
                })
                .sum()
        })
        .collect();
    let names = parameter_scalars(estimates.c.re, &estimates.alpha, &estimates.a, &estimates.lambda);
    let mut unidentified = Vec::new();
    for j in 1..=n {
        for k in j + 1..=n {
            if layout.exchange[j][k].is_none() {
                unidentified.push(format!("Lambda[{j},{k}].re"));
                unidentified.push(format!("Lambda[{j},{k}].im"));
            }
        }
    }
    let table = names
        .into_iter()
        .zip(variance)
        .map(|((name, value), var)| {
            let stderr = if unidentified.contains(&name) { f64::NAN } else { var.max(0.0).sqrt() };
            ScalarEstimate { name, value, stderr }
        })
        .collect();
    Ok(EstimationReport { estimates, records: records.to_vec(), table, unidentified })
}

/// Records whose counts are the exact outcome probabilities times `shots`,
/// rounded; with a large `shots` the frequencies equal the probabilities to
/// within `1/shots`.
pub fn expected_records(p: &E2Params, specs: &[MeasurementSpec], shots: u64, tol: f64) -> Result<Vec<MeasurementRecord>> {
    let window = WindowState::new(p);
    specs
        .iter()
        .map(|s| {
            let probs = outcome_probabilities(&window, s, tol)?;
            let counts = probs.iter().map(|q| (q * shots as f64).round() as u64).collect();
            Ok(MeasurementRecord { spec: s.clone(), counts })
        })
        .collect()
}

/// Window basis of the von Neumann measurement: index `l` holds the
/// multi-index whose outcome label is `l`.
pub fn window_basis(n: usize) -> Vec<MultiIndex> {
    Basis::new(n, 2).indices().to_vec()
}
