//! Exact operator algebra and steady-state solvers for diagnosing 't Hooft
//! anomalies of strong/weak symmetries in open quantum systems.
//!
//! The crate is organized around three layers:
//!
//! * exact algebra: [`pauli`] (weighted Pauli words over Gaussian rationals)
//!   and [`phasepoly`] (X-flip layers times diagonal exponentials of phase
//!   polynomials), which together cover every symmetry operator, Hamiltonian,
//!   jump operator and steady state handled here;
//! * the anomaly engine: [`anomaly`] restricts symmetry superoperators to a
//!   region, extracts the obstruction cocycle, and decides coboundary
//!   triviality by exact linear algebra mod 2^m;
//! * dynamics: [`lindblad`] assembles Lindbladian models, checks their
//!   symmetries, solves for steady states numerically per symmetry sector and
//!   verifies closed-form steady states symbolically; [`observables`] and
//!   [`models`] provide the diagnostics and the lattice-model catalog.
//!
//! The [`claims`] module names every reproducible check; the `mixanom` binary
//! exposes the same checks on the command line.

pub mod anomaly;
pub mod claims;
pub mod lattice;
pub mod linalg;
pub mod lindblad;
pub mod models;
pub mod observables;
pub mod pauli;
pub mod phasepoly;
pub mod scalar;

use thiserror::Error;

/// Hard cap on addressable sites: Pauli words and flip layers are stored as
/// 64-bit masks.
pub const MAX_SITES: usize = 64;

/// Default cap (in sites) for dense 2^N x 2^N expansion.
pub const DEFAULT_DENSE_CAP: usize = 12;

/// Dense-expansion cap, overridable through `MIXANOM_DENSE_CAP`.
pub fn dense_cap() -> usize {
    std::env::var("MIXANOM_DENSE_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("operators act on different site contexts ({0} vs {1} sites)")]
    SiteContextMismatch(usize, usize),
    #[error("phase moduli differ (2^{0} vs 2^{1})")]
    ModulusMismatch(u32, u32),
    #[error("site index {0} out of range for {1} sites")]
    SiteOutOfRange(usize, usize),
    #[error("{0} sites exceed the cap of {1}")]
    CapExceeded(usize, usize),
    #[error("diagonal phase {0}/8 of a full turn is outside the Gaussian-rational ring")]
    NonGaussianPhase(u8),
    #[error("region error: {0}")]
    Region(String),
    #[error("monomial {0:?} straddles boundary components")]
    StraddlingMonomial(Vec<usize>),
    #[error("obstruction support leaks outside the declared boundary (sites {0:?})")]
    SupportLeak(Vec<usize>),
    #[error("non-scalar residue for triple ({0}, {1}, {2})")]
    NonScalarResidue(String, String, String),
    #[error("cocycle condition violated at ({0}, {1}, {2}, {3})")]
    CocycleViolation(String, String, String, String),
    #[error("group table error: {0}")]
    Group(String),
    #[error("invalid sector: {0}")]
    InvalidSector(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("degeneracy ambiguous: largest kept |lambda| {kept:.3e}, smallest dropped {dropped:.3e}")]
    DegeneracyAmbiguous { kept: f64, dropped: f64 },
    #[error("no steady state found within tolerance")]
    NoSteadyState,
    #[error("positivity failure after basis rotation (min eigenvalue {0:.3e})")]
    PositivityFailure(f64),
    #[error("zero trace")]
    ZeroTrace,
    #[error("numerical solver failed: {0}")]
    Numerics(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
