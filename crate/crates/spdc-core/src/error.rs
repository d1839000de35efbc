//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by the physics modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A wavelength or temperature fell outside the dispersion fit's trusted box.
    #[error("{quantity} = {value} is outside the {material} validity range [{min}, {max}]")]
    OutOfValidityRange {
        material: String,
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// The collinear wave-vector mismatch is non-positive; no poling period exists.
    #[error("no phase match: collinear mismatch {delta_k} rad/um is not positive")]
    NoPhaseMatch { delta_k: f64 },

    /// The chirp is strong enough that the poling phase is non-monotonic over the
    /// structure, making "layer" ill-defined.
    #[error("chirp too strong: |zeta| = {zeta} exceeds the layer limit {max_zeta} for n_layers = {n_layers}")]
    ChirpTooStrong {
        zeta: f64,
        max_zeta: f64,
        n_layers: usize,
    },

    /// The sampling grid does not resolve the structure it is asked to integrate.
    #[error("grid too coarse: {detail}")]
    GridTooCoarse { detail: String },

    /// A curve never crosses the half-extremum level inside the sampled window.
    #[error("no half crossing: {detail}")]
    NoHalfCrossing { detail: String },

    /// Schmidt coefficients do not satisfy the sum rule.
    #[error("eigenvalues not normalized: sum of squares = {sum_sq}, expected 1")]
    NotNormalized { sum_sq: f64 },

    /// An all-zero amplitude matrix cannot be decomposed.
    #[error("degenerate input: amplitude matrix is identically zero")]
    DegenerateInput,

    /// Transverse phase matching has no real solution for the idler direction.
    #[error("no transverse match: required |sin(theta_i)| = {required_sin} > 1")]
    NoTransverseMatch { required_sin: f64 },

    /// A material data file failed to parse.
    #[error("material data format error at line {line}: {detail}")]
    DataFormat { line: usize, detail: String },

    /// A constructor argument violates a documented invariant.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
