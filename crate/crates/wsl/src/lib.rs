//! Waveguide spectral laboratory.
//!
//! Numerical study of the Dirichlet Laplacian in three-dimensional tubes of
//! uniform cross-section built by sweeping a planar domain along a space
//! curve with a rotating moving frame. The library provides
//!
//! * curve/frame geometry and the induced metric of the straightened tube
//!   ([`geometry`]),
//! * triangulated cross-sections and their Dirichlet eigenproblems
//!   ([`mesh`], [`cross_section`]),
//! * tensor-product finite-element assembly of the tube quadratic forms
//!   ([`assembly`]),
//! * a deterministic sparse symmetric generalized eigensolver ([`spectral`]),
//! * the thin-tube effective 1D operator ([`effective`]),
//! * high-level experiments: bending certificates, twist thresholds, Hardy
//!   weight scans and the mild-bending stability study ([`analysis`]),
//! * a config-driven experiment runner behind the `wsl` binary ([`runner`]).
//!
//! The spectral conventions: `E1` is the first Dirichlet eigenvalue of the
//! cross-section, the essential-spectrum threshold of the straight tube.
//! Bending (curvature of the reference curve) pushes spectrum below `E1`;
//! twisting (a non-circular cross-section rotating at rate `tau - theta_dot`)
//! pushes it up and produces Hardy-type lower bounds.

pub mod analysis;
pub mod assembly;
pub mod config;
pub mod cross_section;
pub mod effective;
pub mod fem2d;
pub mod geometry;
pub mod interp;
pub mod mesh;
pub mod report;
pub mod runner;
pub mod shape;
pub mod sparse;
pub mod spectral;

use thiserror::Error;

/// Crate-wide error type. Variants mirror the failure modes of the
/// individual subsystems so callers can match on the physics-level cause.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("curvature must be non-negative where the Frenet frame is used: {0}")]
    NonPositiveCurvature(String),
    #[error("frame integration grid too coarse: orthonormality drift {drift:.3e} per step exceeds {limit:.1e}")]
    GridTooCoarse { drift: f64, limit: f64 },
    #[error("parameter point outside the tube domain: {0}")]
    OutOfDomain(String),
    #[error("degenerate Jacobian: h = {h:.6} <= 0 at (s, t2, t3) = ({s:.4}, {t2:.4}, {t3:.4})")]
    DegenerateJacobian { h: f64, s: f64, t2: f64, t3: f64 },
    #[error("tube hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("mesh generation failed: {0}")]
    MeshFailure(String),
    #[error("eigensolver did not converge: {0}")]
    SolverNoConvergence(String),
    #[error("factorization failed: {0}")]
    FactorizationFailure(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("weight function must be non-negative (found {0:.6e})")]
    NegativeWeight(f64),
    #[error("Rayleigh quotient of the zero vector")]
    ZeroVector,
    #[error("Richardson extrapolation unstable: {0}")]
    ExtrapolationUnstable(String),
    #[error("partition intervals overlap: [{0:.4}, {1:.4}] and [{2:.4}, {3:.4}]")]
    OverlappingPartition(f64, f64, f64, f64),
    #[error("no negative-energy certificate found up to cutoff scale n = {0}")]
    NoCertificateFound(usize),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
