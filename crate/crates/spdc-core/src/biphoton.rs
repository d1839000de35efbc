//! Two-photon spectral amplitudes for poled structures.
//!
//! The general path integrates the exponential exactly over each sign domain
//! and sums the contributions ([`jsa_layer_sum`]). For uniform poling the
//! interference of the N_L layer waves has a closed form
//! ([`jsa_closed_form_uniform`]) used both as an independent oracle and as a
//! fast path. Under cw pumping the energy-conservation delta is consumed
//! analytically, so a slice is one-dimensional in the signal detuning Ω with
//! ω_i = ω_p0 − ω_s identically; a quasi-cw two-dimensional amplitude with a
//! Gaussian pump line exists for the Schmidt machinery ([`jsa_quasi_cw`]).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::materials::{
    extraordinary_index_at_angle, wavevector_magnitude, Branch, MaterialModel,
};
use crate::numerics::{cis, sinc};
use crate::poling::DomainStructure;
use crate::units::{lambda_um_from_omega, C_UM_PER_PS};

/// Propagation geometry of the signal and idler waves.
///
/// The optic axis is along the laboratory y axis and the pump propagates
/// along z, so a wave with radial emission angle ϑ and azimuth ψ makes
/// cos θ_oa = sin ϑ sin ψ with the optic axis. Collinear waves are purely
/// extraordinary (θ_oa = π/2).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Geometry {
    Collinear,
    Angles {
        theta_s: f64,
        psi_s: f64,
        theta_i: f64,
        psi_i: f64,
    },
}

/// Direction-dependent extraordinary-wave index for emission angles (ϑ, ψ).
pub fn index_for_direction(
    material: &MaterialModel,
    temperature_c: f64,
    omega: f64,
    theta: f64,
    psi: f64,
) -> Result<f64> {
    let lambda = lambda_um_from_omega(omega);
    let n_o = material.refractive_index(Branch::Ordinary, lambda, temperature_c)?;
    let n_e = material.refractive_index(Branch::Extraordinary, lambda, temperature_c)?;
    let cos_oa = (theta.sin() * psi.sin()).clamp(-1.0, 1.0);
    Ok(extraordinary_index_at_angle(n_o, n_e, cos_oa.acos()))
}

/// z-component mismatch Δk_z = k_{p,z} − k_{s,z} − k_{i,z} in rad/μm.
///
/// The pump always propagates along z; signal and idler tilt according to
/// `geometry`, with direction-dependent extraordinary indices.
pub fn phase_mismatch(
    material: &MaterialModel,
    temperature_c: f64,
    omega_s: f64,
    omega_i: f64,
    geometry: Geometry,
) -> Result<f64> {
    let omega_p = omega_s + omega_i;
    let n_p = index_for_direction(material, temperature_c, omega_p, 0.0, 0.0)?;
    let k_p = wavevector_magnitude(omega_p, n_p);
    match geometry {
        Geometry::Collinear => {
            let n_s = index_for_direction(material, temperature_c, omega_s, 0.0, 0.0)?;
            let n_i = index_for_direction(material, temperature_c, omega_i, 0.0, 0.0)?;
            Ok(k_p - wavevector_magnitude(omega_s, n_s) - wavevector_magnitude(omega_i, n_i))
        }
        Geometry::Angles {
            theta_s,
            psi_s,
            theta_i,
            psi_i,
        } => {
            let n_s = index_for_direction(material, temperature_c, omega_s, theta_s, psi_s)?;
            let n_i = index_for_direction(material, temperature_c, omega_i, theta_i, psi_i)?;
            Ok(k_p
                - wavevector_magnitude(omega_s, n_s) * theta_s.cos()
                - wavevector_magnitude(omega_i, n_i) * theta_i.cos())
        }
    }
}

/// Normalization function C^ψ = π √(ω_s ω_i) / (i c √(n_s n_i)).
pub fn normalization_c(omega_s: f64, omega_i: f64, n_s: f64, n_i: f64) -> Complex64 {
    let magnitude =
        std::f64::consts::PI * (omega_s * omega_i).sqrt() / (C_UM_PER_PS * (n_s * n_i).sqrt());
    // 1/i = -i
    Complex64::new(0.0, -magnitude)
}

/// Exact integral of χ⁽²⁾(z) e^{iΔk z} over the domain structure:
/// Σ_m sign_m (e^{iΔk z_{m+1}} − e^{iΔk z_m}) / (iΔk), with the Δk = 0 limit
/// Σ_m sign_m (z_{m+1} − z_m). Summation is sequential in m by contract so
/// results do not depend on caller parallelism.
pub fn domain_integral(domains: &DomainStructure, delta_k: f64) -> Complex64 {
    let b = &domains.boundaries;
    if delta_k == 0.0 {
        let mut acc = 0.0;
        let mut sign = domains.first_sign;
        for w in b.windows(2) {
            acc += sign * (w[1] - w[0]);
            sign = -sign;
        }
        return Complex64::new(acc, 0.0) * domains.chi2_magnitude;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut prev = cis(delta_k * b[0]);
    let mut sign = domains.first_sign;
    for &z in &b[1..] {
        let cur = cis(delta_k * z);
        acc += sign * (cur - prev);
        prev = cur;
        sign = -sign;
    }
    acc * domains.chi2_magnitude / Complex64::new(0.0, delta_k)
}

/// Closed-form structure factor of a uniform structure with N_L layers of
/// length l0 and entrance sign −1:
/// l0 sinc(Δk l0/2) · sin[(Δk l0 − π) N/2]/sin[(Δk l0 − π)/2] ·
/// exp[−i(Δk l0 + π)N/2 − iπ/2].
///
/// The sin ratio is reduced to sin(N d)/sin(d) around the nearest multiple of
/// π, which is stable arbitrarily close to the quasi-phase-matching points and
/// limits to ±N_L exactly on them.
pub fn structure_factor_uniform(delta_k: f64, l0: f64, n_layers: usize) -> Complex64 {
    let n = n_layers as f64;
    let q = delta_k * l0;
    let x = 0.5 * (q - std::f64::consts::PI);
    let m = (x / std::f64::consts::PI).round();
    let d = x - m * std::f64::consts::PI;
    let parity = if ((m as i64) * (n_layers as i64 - 1)) % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    let ratio = if d == 0.0 {
        parity * n
    } else {
        parity * (n * d).sin() / d.sin()
    };
    let envelope = l0 * sinc(0.5 * q);
    let phase = cis(-0.5 * (q + std::f64::consts::PI) * n - std::f64::consts::FRAC_PI_2);
    envelope * ratio * phase
}

/// Frequency grid for a cw slice: signal detunings Ω_j symmetric about 0 with
/// ω_s = ω_s_center + Ω and ω_i = ω_i_center − Ω.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FrequencyGrid {
    pub omega_s_center: f64,
    pub omega_i_center: f64,
    pub half_span: f64,
    pub n_points: usize,
}

impl FrequencyGrid {
    pub fn new(
        omega_s_center: f64,
        omega_i_center: f64,
        half_span: f64,
        n_points: usize,
    ) -> Result<FrequencyGrid> {
        if n_points < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
        }
        if !(half_span > 0.0) {
            return Err(Error::InvalidArgument("half_span must be positive".into()));
        }
        if !(omega_s_center > half_span && omega_i_center > half_span) {
            return Err(Error::InvalidArgument(
                "grid extends to non-positive frequencies".into(),
            ));
        }
        Ok(FrequencyGrid {
            omega_s_center,
            omega_i_center,
            half_span,
            n_points,
        })
    }

    /// Pump frequency ω_p0 = ω_s0 + ω_i0 consumed by the cw delta.
    pub fn pump_center(&self) -> f64 {
        self.omega_s_center + self.omega_i_center
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_span / (self.n_points as f64 - 1.0)
    }

    /// Detunings Ω_j = (j − (n−1)/2) Δω; exactly antisymmetric under index
    /// reversal.
    pub fn detunings(&self) -> Vec<f64> {
        let c = (self.n_points as f64 - 1.0) / 2.0;
        let d = self.spacing();
        (0..self.n_points).map(|j| (j as f64 - c) * d).collect()
    }
}

/// Complex two-photon amplitude along the cw anti-diagonal.
#[derive(Debug, Clone)]
pub struct JsaSlice {
    /// Signal detunings Ω from ω_s_center, rad/ps.
    pub detunings: Vec<f64>,
    /// a(Ω) = C^ψ Ẽ_p ∫ χ⁽²⁾ e^{iΔk z} dz.
    pub amplitude: Vec<Complex64>,
    pub meta: SliceMeta,
}

/// Configuration snapshot carried by every slice.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SliceMeta {
    pub material: String,
    pub temperature_c: f64,
    pub geometry: Geometry,
    pub omega_s_center: f64,
    pub omega_i_center: f64,
    pub n_layers: usize,
    pub total_length_um: f64,
}

impl JsaSlice {
    /// |a(Ω)|² pointwise.
    pub fn intensity(&self) -> Vec<f64> {
        self.amplitude.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Difference of the center frequencies ω_i0 − ω_s0 (zero when the slice
    /// is centered on the degeneracy point).
    pub fn center_detuning(&self) -> f64 {
        self.meta.omega_i_center - self.meta.omega_s_center
    }
}

fn slice_meta(
    material: &MaterialModel,
    temperature_c: f64,
    geometry: Geometry,
    grid: &FrequencyGrid,
    domains: &DomainStructure,
) -> SliceMeta {
    SliceMeta {
        material: material.name.clone(),
        temperature_c,
        geometry,
        omega_s_center: grid.omega_s_center,
        omega_i_center: grid.omega_i_center,
        n_layers: domains.n_domains(),
        total_length_um: domains.total_length(),
    }
}

fn amplitude_at(
    material: &MaterialModel,
    temperature_c: f64,
    geometry: Geometry,
    domains: &DomainStructure,
    omega_s: f64,
    omega_i: f64,
) -> Result<Complex64> {
    let dk = phase_mismatch(material, temperature_c, omega_s, omega_i, geometry)?;
    let (n_s, n_i) = match geometry {
        Geometry::Collinear => (
            index_for_direction(material, temperature_c, omega_s, 0.0, 0.0)?,
            index_for_direction(material, temperature_c, omega_i, 0.0, 0.0)?,
        ),
        Geometry::Angles {
            theta_s,
            psi_s,
            theta_i,
            psi_i,
        } => (
            index_for_direction(material, temperature_c, omega_s, theta_s, psi_s)?,
            index_for_direction(material, temperature_c, omega_i, theta_i, psi_i)?,
        ),
    };
    Ok(normalization_c(omega_s, omega_i, n_s, n_i) * domain_integral(domains, dk))
}

/// Evaluate the layer-sum amplitude on a cw slice. Grid points are evaluated
/// in parallel; the per-point domain sum keeps its fixed order, so the result
/// is identical for any worker count.
pub fn jsa_layer_sum(
    domains: &DomainStructure,
    grid: &FrequencyGrid,
    geometry: Geometry,
    material: &MaterialModel,
    temperature_c: f64,
) -> Result<JsaSlice> {
    let detunings = grid.detunings();
    let amplitude: Result<Vec<Complex64>> = detunings
        .par_iter()
        .map(|&om| {
            amplitude_at(
                material,
                temperature_c,
                geometry,
                domains,
                grid.omega_s_center + om,
                grid.omega_i_center - om,
            )
        })
        .collect();
    Ok(JsaSlice {
        detunings,
        amplitude: amplitude?,
        meta: slice_meta(material, temperature_c, geometry, grid, domains),
    })
}

/// Closed-form uniform-poling amplitude at a single frequency pair
/// (collinear), including C^ψ and the unit pump constant.
pub fn jsa_closed_form_uniform(
    material: &MaterialModel,
    temperature_c: f64,
    omega_s: f64,
    omega_i: f64,
    l0: f64,
    n_layers: usize,
) -> Result<Complex64> {
    let dk = phase_mismatch(material, temperature_c, omega_s, omega_i, Geometry::Collinear)?;
    let n_s = index_for_direction(material, temperature_c, omega_s, 0.0, 0.0)?;
    let n_i = index_for_direction(material, temperature_c, omega_i, 0.0, 0.0)?;
    Ok(normalization_c(omega_s, omega_i, n_s, n_i) * structure_factor_uniform(dk, l0, n_layers))
}

/// Quasi-cw two-dimensional amplitude with a Gaussian pump spectral line
/// Ẽ_p(ν) = exp(−ν²/4σ_p²), ν = ω_s + ω_i − ω_p0, sampled on the square grid
/// (ω_s grid) × (ω_i grid) built from `grid`. Row-major storage.
#[derive(Debug, Clone)]
pub struct Jsa2d {
    pub omega_s: Vec<f64>,
    pub omega_i: Vec<f64>,
    /// amplitude[j * omega_i.len() + k] = a(ω_s[j], ω_i[k]).
    pub amplitude: Vec<Complex64>,
    pub sigma_p: f64,
}

/// Evaluate the quasi-cw 2D amplitude (collinear geometry). Rows are
/// evaluated in parallel with a deterministic layout.
pub fn jsa_quasi_cw(
    domains: &DomainStructure,
    grid: &FrequencyGrid,
    material: &MaterialModel,
    temperature_c: f64,
    sigma_p: f64,
) -> Result<Jsa2d> {
    if !(sigma_p > 0.0) {
        return Err(Error::InvalidArgument("sigma_p must be positive".into()));
    }
    let omega_p0 = grid.pump_center();
    let det = grid.detunings();
    let omega_s: Vec<f64> = det.iter().map(|d| grid.omega_s_center + d).collect();
    let omega_i: Vec<f64> = det.iter().map(|d| grid.omega_i_center + d).collect();

    let rows: Result<Vec<Vec<Complex64>>> = omega_s
        .par_iter()
        .map(|&ws| {
            omega_i
                .iter()
                .map(|&wi| {
                    let nu = ws + wi - omega_p0;
                    let pump = (-nu * nu / (4.0 * sigma_p * sigma_p)).exp();
                    if pump < 1e-300 {
                        return Ok(Complex64::new(0.0, 0.0));
                    }
                    Ok(amplitude_at(
                        material,
                        temperature_c,
                        Geometry::Collinear,
                        domains,
                        ws,
                        wi,
                    )? * pump)
                })
                .collect()
        })
        .collect();
    Ok(Jsa2d {
        omega_s,
        omega_i,
        amplitude: rows?.into_iter().flatten().collect(),
        sigma_p,
    })
}
