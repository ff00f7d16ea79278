//! Core numerics for a one-dimensional stochastic chemotaxis (Keller–Segel
//! type) system driven by multiplicative Q-Wiener noise on the unit interval:
//!
//! ```text
//! du = (r_u Δu − χ ∂x(u ∂x v) + γ u) dt + u dW₁
//! dv = (r_v Δv − α v + β u) dt + v dW₂
//! ```
//!
//! where `γ` is the Itô correction induced by reading the multiplicative
//! noise in the Stratonovich sense, and `W₁, W₂` are trace-class Wiener
//! processes diagonal in the trigonometric basis with spectral weights
//! `λ_k = (1 + (2πk)²)^{−δ/2}`.
//!
//! The crate is organized around coefficient-space fields on a fixed spectral
//! band `|k| ≤ k_max`:
//!
//! * [`spectral`] — orthonormal bases, nodal grids, exact-quadrature
//!   transforms, derivative/Laplacian maps, Sobolev norms, dealiased products;
//! * [`noise`] — Q-Wiener spectra, the Itô-correction constant, and
//!   counter-keyed (replayable, order-independent) increment streams;
//! * [`solver`] — the exponential Euler–Maruyama step in mild form, the
//!   positivity guard, and the path simulator;
//! * [`functionals`] — mass, entropy and Gajewski functionals, Besov block
//!   norms, interpolation checks, and the per-step diagnostics record;
//! * [`init`] — validated initial-data builders.

pub mod error;
pub mod functionals;
pub mod init;
pub mod noise;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use functionals::DiagnosticsRecord;
pub use init::InitKind;
pub use noise::{make_common_path, NoiseChannel, NoisePathHandle, NoiseSpec};
pub use solver::{
    ito_drift, positivity_guard, simulate, HandlePair, IncrementSource, ModelParams, Positivity,
    PrecomputedIncrements, SimError, SolverConfig, StepInfo, Stepper, SystemState, Trajectory,
    ZeroNoise,
};
pub use spectral::{BasisKind, Grid, GridSpec, SpectralField};

/// Tolerance below zero that nodal values of nominally nonnegative fields are
/// allowed to reach before domain errors fire (band-limited projections of
/// nonnegative data can undershoot by rounding).
pub const EPS_CLIP: f64 = 1e-12;
