use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("root iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("alpha = {alpha} is degenerate: {reason}")]
    DegenerateAlpha { alpha: Complex64, reason: String },

    #[error("numerator and denominator share a root (distance {distance:.3e})")]
    NotCoprime { distance: f64 },

    #[error("deg p = {deg_p} < deg q = {deg_q}; pass 1/r instead")]
    DegreeMismatch { deg_p: usize, deg_q: usize },

    #[error("denominator is the zero polynomial")]
    ZeroDenominator,

    #[error("numerator must be nonconstant")]
    ConstantNumerator,

    #[error("r has a pole at the realization center {center}")]
    PoleAtOrigin { center: Complex64 },

    #[error("{z} is a pole of r")]
    PoleOfR { z: Complex64 },

    #[error("r is not real: |r(z) - conj(r(conj z))| = {defect:.3e}")]
    NotRealRational { defect: f64 },

    #[error("not a signature matrix: {0}")]
    NotSignature(String),

    #[error("matrix is numerically singular (smallest singular value {sigma_min:.3e})")]
    SingularX { sigma_min: f64 },

    #[error("polynomial has a repeated root (separation {separation:.3e})")]
    MultipleRoots { separation: f64 },

    #[error("Blaschke zeros are not pairwise distinct")]
    ZerosNotDistinct,

    #[error("Blaschke zero {zero} is not inside the unit disk")]
    ZeroOutsideDisk { zero: Complex64 },

    #[error("disk cover construction failed: |r({point})| = {value:.3e} < rho = {rho:.3e} outside every disk")]
    CoverConstructionFailed { point: Complex64, value: f64, rho: f64 },

    #[error("quadrature with {nodes} nodes disagrees with the half rule by {discrepancy:.3e}")]
    QuadratureDivergence { nodes: usize, discrepancy: f64 },

    #[error("|w| = {modulus:.3e} is outside the Taylor disk of radius {rho:.3e}")]
    EvalOutsideRho { modulus: f64, rho: f64 },

    #[error("the functional c = sum c_n Z_r(w_n) vanishes")]
    ZeroFunctional,

    #[error("degree {degree} exceeds the cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },

    #[error("pencil A - wB is singular at w = {w}")]
    SingularPencil { w: Complex64 },

    #[error("Stein operator is singular (smallest singular value {sigma_min:.3e})")]
    SingularSteinOperator { sigma_min: f64 },

    #[error("kernel denominator {denominator:.3e} is below tolerance")]
    DiagonalSingularity { denominator: f64 },

    #[error("K({alpha}, {alpha}) or its reflection is not invertible")]
    RankDeficientAtAlpha { alpha: Complex64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("function evaluation failed at {z}: {reason}")]
    Evaluation { z: Complex64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
