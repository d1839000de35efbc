//! CSV and JSON-metadata serialization of the result types.
//!
//! Data sections are plain CSV with a header row naming columns and units;
//! floats are written with Rust's shortest round-trip formatting, so a given
//! result always serializes to identical bytes. Metadata goes to a separate
//! JSON document carrying the configuration hash, format version, and
//! tolerances; only the optional timestamp field may differ between reruns
//! and it is excluded from the hash upstream.

use crate::angular::AngularMap;
use crate::biphoton::JsaSlice;
use crate::observables::{HomProfile, Spectrum, SpectrumLabel};
use crate::schmidt::SchmidtResult;

/// Version tag stamped into every metadata document.
pub const FORMAT_VERSION: &str = "1";

pub fn jsa_slice_csv(s: &JsaSlice) -> String {
    let mut out = String::from("detuning_rad_per_ps,re_amplitude,im_amplitude\n");
    for (om, a) in s.detunings.iter().zip(&s.amplitude) {
        out.push_str(&format!("{},{},{}\n", om, a.re, a.im));
    }
    out
}

pub fn spectrum_csv(s: &Spectrum) -> String {
    let name = match s.label {
        SpectrumLabel::Signal => "signal",
        SpectrumLabel::Idler => "idler",
    };
    let mut out = format!("omega_rad_per_ps,{}_energy_density\n", name);
    for (w, v) in s.abscissa.iter().zip(&s.values) {
        out.push_str(&format!("{},{}\n", w, v));
    }
    out
}

pub fn hom_csv(h: &HomProfile) -> String {
    let mut out = String::from("delay_ps,normalized_coincidence_rate\n");
    for (t, r) in h.delays.iter().zip(&h.rate) {
        out.push_str(&format!("{},{}\n", t, r));
    }
    out
}

pub fn schmidt_csv(r: &SchmidtResult) -> String {
    let mut out = String::from("mode_index,lambda_squared\n");
    for (n, l) in r.coefficients.iter().enumerate() {
        out.push_str(&format!("{},{}\n", n + 1, l * l));
    }
    out
}

/// Per-mode dump: grid abscissa plus Re/Im of the first `max_modes` mode
/// functions, one column pair per mode.
pub fn schmidt_modes_csv(abscissa: &[f64], modes: &[Vec<num_complex::Complex64>], max_modes: usize) -> String {
    let n_modes = modes.len().min(max_modes);
    let mut out = String::from("omega_rad_per_ps");
    for m in 1..=n_modes {
        out.push_str(&format!(",re_mode_{m},im_mode_{m}"));
    }
    out.push('\n');
    for (j, w) in abscissa.iter().enumerate() {
        out.push_str(&format!("{}", w));
        for mode in modes.iter().take(n_modes) {
            out.push_str(&format!(",{},{}", mode[j].re, mode[j].im));
        }
        out.push('\n');
    }
    out
}

/// Long-format angular map: one row per cell.
pub fn angular_map_csv(m: &AngularMap, axis_a_name: &str, axis_b_name: &str) -> String {
    angular_map_csv_named(m, axis_a_name, axis_b_name, "value_relative")
}

/// Long-format angular map with an explicit value-column name.
pub fn angular_map_csv_named(
    m: &AngularMap,
    axis_a_name: &str,
    axis_b_name: &str,
    value_name: &str,
) -> String {
    let mut out = format!("{},{},{},flagged\n", axis_a_name, axis_b_name, value_name);
    for (i, a) in m.axis_a.iter().enumerate() {
        for (j, b) in m.axis_b.iter().enumerate() {
            let idx = i * m.axis_b.len() + j;
            out.push_str(&format!(
                "{},{},{},{}\n",
                a, b, m.values[idx], m.flagged[idx] as u8
            ));
        }
    }
    out
}

/// Matrix-layout angular map: first row is the second axis, first column the
/// first axis.
pub fn angular_map_matrix_csv(m: &AngularMap, axis_a_name: &str) -> String {
    let mut out = String::from(axis_a_name);
    for b in &m.axis_b {
        out.push_str(&format!(",{}", b));
    }
    out.push('\n');
    for (i, a) in m.axis_a.iter().enumerate() {
        out.push_str(&format!("{}", a));
        for j in 0..m.axis_b.len() {
            out.push_str(&format!(",{}", m.values[i * m.axis_b.len() + j]));
        }
        out.push('\n');
    }
    out
}
