//! Schmidt decomposition of the quasi-cw two-photon amplitude and the
//! entanglement quantifiers derived from it.
//!
//! The amplitude is discretized with square-root quadrature weights so the
//! matrix 2-norm structure matches the continuum inner product; a singular
//! value factorization of that matrix then solves the dual eigenproblems of
//! the reduced kernels (eigenvalues λ_n²) without ever materializing them.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::biphoton::Jsa2d;
use crate::error::{Error, Result};

/// Result of a Schmidt decomposition.
#[derive(Debug, Clone)]
pub struct SchmidtResult {
    /// Schmidt coefficients λ_n, descending, normalized to Σλ² = 1. Only
    /// coefficients with λ² > 1e−12 are kept.
    pub coefficients: Vec<f64>,
    /// Entropy of entanglement E = −Σ λ² log₂ λ², bits.
    pub entropy: f64,
    /// Cooperativity (Schmidt number) K = 1/Σ λ⁴.
    pub cooperativity: f64,
    /// Signal mode functions ψ_n sampled on the ω_s grid (row-major, one row
    /// per kept mode), quadrature weights divided out.
    pub signal_modes: Vec<Vec<Complex64>>,
    /// Idler mode functions φ_n on the ω_i grid.
    pub idler_modes: Vec<Vec<Complex64>>,
}

/// Discretize a quasi-cw amplitude into the weighted matrix
/// M[j,k] = a(ω_s,j, ω_i,k) √(Δω_s Δω_i).
///
/// Raises `GridTooCoarse` when fewer than 8 grid steps span the pump line's
/// intensity FWHM (2√(2 ln 2) σ_p along the anti-diagonal).
pub fn discretize_jsa(jsa: &Jsa2d) -> Result<DMatrix<Complex64>> {
    let ns = jsa.omega_s.len();
    let ni = jsa.omega_i.len();
    if ns < 2 || ni < 2 {
        return Err(Error::InvalidArgument("2D amplitude needs a 2x2 grid".into()));
    }
    let dws = (jsa.omega_s[ns - 1] - jsa.omega_s[0]) / (ns as f64 - 1.0);
    let dwi = (jsa.omega_i[ni - 1] - jsa.omega_i[0]) / (ni as f64 - 1.0);
    let ridge_fwhm = 2.0 * (2.0 * std::f64::consts::LN_2).sqrt() * jsa.sigma_p;
    let points_across = ridge_fwhm / dws.max(dwi);
    if points_across < 8.0 {
        return Err(Error::GridTooCoarse {
            detail: format!(
                "pump line FWHM {ridge_fwhm:.3} rad/ps is sampled by {points_across:.1} steps; need at least 8"
            ),
        });
    }
    let w = (dws * dwi).sqrt();
    Ok(DMatrix::from_fn(ns, ni, |j, k| {
        jsa.amplitude[j * ni + k] * w
    }))
}

/// Singular-value factorization of the weighted amplitude matrix.
///
/// Singular values are normalized to Σλ² = 1; mode functions are recovered by
/// dividing the quadrature weights back out of the singular vectors.
pub fn schmidt_decompose(matrix: &DMatrix<Complex64>) -> Result<SchmidtResult> {
    schmidt_decompose_impl(matrix, true)
}

/// Like [`schmidt_decompose`] but skips the mode functions (faster when only
/// λ, E, K are needed).
pub fn schmidt_coefficients(matrix: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    Ok(schmidt_decompose_impl(matrix, false)?.coefficients)
}

fn schmidt_decompose_impl(
    matrix: &DMatrix<Complex64>,
    with_modes: bool,
) -> Result<SchmidtResult> {
    let norm = matrix.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if !(norm > 0.0) {
        return Err(Error::DegenerateInput);
    }
    let svd = matrix.clone().svd(with_modes, with_modes);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let total: f64 = svd.singular_values.iter().map(|s| s * s).sum();
    let mut coefficients = Vec::new();
    let mut kept = Vec::new();
    for &idx in &order {
        let lam2 = svd.singular_values[idx] * svd.singular_values[idx] / total;
        if lam2 > 1e-12 {
            coefficients.push(lam2.sqrt());
            kept.push(idx);
        }
    }
    let entropy = entropy(&coefficients)?;
    let cooperativity = cooperativity(&coefficients)?;

    let (signal_modes, idler_modes) = if with_modes {
        let u = svd.u.as_ref().expect("requested");
        let vt = svd.v_t.as_ref().expect("requested");
        let ns = u.nrows();
        let ni = vt.ncols();
        // the discretization folded √Δω into the matrix; modes on the grid
        // carry 1/√Δω so they are orthonormal under the quadrature weight
        let mut sig = Vec::with_capacity(kept.len());
        let mut idl = Vec::with_capacity(kept.len());
        for &idx in &kept {
            sig.push((0..ns).map(|j| u[(j, idx)]).collect());
            idl.push((0..ni).map(|k| vt[(idx, k)].conj()).collect());
        }
        (sig, idl)
    } else {
        (Vec::new(), Vec::new())
    };

    Ok(SchmidtResult {
        coefficients,
        entropy,
        cooperativity,
        signal_modes,
        idler_modes,
    })
}

fn check_normalized(coefficients: &[f64]) -> Result<f64> {
    let sum_sq: f64 = coefficients.iter().map(|l| l * l).sum();
    if (sum_sq - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized { sum_sq });
    }
    Ok(sum_sq)
}

/// Entropy of entanglement E = −Σ λ_n² log₂ λ_n² (0·log 0 := 0), bits.
pub fn entropy(coefficients: &[f64]) -> Result<f64> {
    check_normalized(coefficients)?;
    Ok(coefficients
        .iter()
        .map(|l| {
            let p = l * l;
            if p > 0.0 {
                -p * p.log2()
            } else {
                0.0
            }
        })
        .sum())
}

/// Cooperativity K = 1 / Σ λ_n⁴.
pub fn cooperativity(coefficients: &[f64]) -> Result<f64> {
    check_normalized(coefficients)?;
    let sum4: f64 = coefficients.iter().map(|l| l.powi(4)).sum();
    Ok(1.0 / sum4)
}
