//! Bosonic Gaussian states through their E₂ generating-function parameters.
//!
//! An operator `Z` on the Fock space of `n` modes belongs to the semigroup
//! E₂ when its generating function `G_Z(u,v) = ⟨e(ū)|Z|e(v)⟩` is the
//! exponential of a polynomial of degree two,
//!
//! ```text
//! G_Z(u, v) = c · exp(uᵀα + βᵀv + uᵀAu + uᵀΛv + vᵀBv).
//! ```
//!
//! Gaussian states are exactly the positive trace-one members of E₂, with
//! `β = ᾱ` and `B = Ā`. This crate converts between these parameters and the
//! customary mean/covariance description, composes E₂ operators in closed
//! form, builds particle-basis matrices on a truncated window, analyses
//! entanglement of pure states and simulates finite-outcome tomography.
//!
//! Module map:
//!
//! * [`linalg`] — realification, `M(A,Λ)`, Gaussian integrals, positivity, Takagi.
//! * [`params`] — the parameter types and the conversions between them.
//! * [`semigroup`] — Weyl, second-quantization and `Γ₀(L)` parameters, adjoints,
//!   composition and conjugation.
//! * [`fock`] — multi-indices, `Δ(t)`, `φ_B`, `E_A`, `Γ(Λ)` and truncated matrices.
//! * [`states`] — the [`states::GaussianState`] API.
//! * [`tomography`] — measurement battery, sampling and estimation.
//! * [`io`] — JSON and CSV formats.

pub mod error;
pub mod fock;
pub mod io;
pub mod linalg;
pub mod params;
pub mod semigroup;
pub mod states;
pub mod tomography;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense real matrix.
pub type RMat = nalgebra::DMatrix<f64>;
/// Dense complex column vector.
pub type CVec = nalgebra::DVector<C64>;
/// Dense real column vector.
pub type RVec = nalgebra::DVector<f64>;

/// Default relative tolerance used by positivity and structure checks.
pub const DEFAULT_TOL: f64 = 1e-10;
