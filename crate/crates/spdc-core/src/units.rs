//! Unit conventions and fixed physical constants.
//!
//! The whole crate works in one unit system, chosen so that the quantities
//! that enter phase arguments are O(1):
//!
//! * lengths in micrometres (μm),
//! * angular frequencies in rad/ps (numerically equal to rad·THz),
//! * wave vectors in rad/μm,
//! * delays in ps,
//! * temperatures in °C,
//! * angles in rad.
//!
//! Filter bandwidths are accepted in THz (ordinary frequency) at the CLI
//! boundary and converted with [`thz_to_rad_per_ps`].

/// Speed of light in μm/ps.
pub const C_UM_PER_PS: f64 = 299.792458;

/// Vacuum angular frequency (rad/ps) of a given vacuum wavelength (μm).
pub fn omega_from_lambda_um(lambda_um: f64) -> f64 {
    2.0 * std::f64::consts::PI * C_UM_PER_PS / lambda_um
}

/// Vacuum wavelength (μm) of a given angular frequency (rad/ps).
pub fn lambda_um_from_omega(omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * C_UM_PER_PS / omega
}

/// Ordinary frequency in THz to angular frequency in rad/ps.
pub fn thz_to_rad_per_ps(f_thz: f64) -> f64 {
    2.0 * std::f64::consts::PI * f_thz
}

/// Degrees to radians.
pub fn deg_to_rad(deg: f64) -> f64 {
    deg * std::f64::consts::PI / 180.0
}

/// Fixed constants entering overall prefactors.
///
/// The simulator reports relative rates: the dimensional prefactor of the
/// interaction (pump transverse area `S`, `eps0`, the pump spectral constant)
/// is collapsed into `rate_prefactor`, kept at 1 by default and never used to
/// claim absolute pair numbers. `hbar` only weights energy spectra by ω and is
/// likewise kept at 1 in these relative units.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalConstants {
    /// Speed of light, μm/ps.
    pub c: f64,
    /// Reduced Planck constant in relative units (spectral weight only).
    pub hbar: f64,
    /// Vacuum permittivity in relative units.
    pub eps0: f64,
    /// Pump transverse area in relative units.
    pub pump_area: f64,
    /// Collapsed overall prefactor for relative rates.
    pub rate_prefactor: f64,
}

impl Default for OpticalConstants {
    fn default() -> Self {
        OpticalConstants {
            c: C_UM_PER_PS,
            hbar: 1.0,
            eps0: 1.0,
            pump_area: 1.0,
            rate_prefactor: 1.0,
        }
    }
}
