//! Temperature-dependent refractive indices of uniaxial nonlinear crystals.
//!
//! Dispersion is modelled by generalized temperature-dependent Sellmeier fits
//! of the form
//!
//! ```text
//! n²(λ, T) = (A0 + A1 f) + Σ_r (B0r + B1r f) / (λ² − (C0r + C1r f)²) + (D0 + D1 f) λ²,
//! f(T) = (T − t0)(T + t1),      λ in μm, T in °C
//! ```
//!
//! which covers the published fits shipped with the crate:
//!
//! * congruent LiNbO₃, ordinary and extraordinary branches:
//!   G. J. Edwards and M. Lawrence, Opt. Quantum Electron. 16, 373 (1984);
//! * stoichiometric LiTaO₃, extraordinary branch:
//!   A. Bruner et al., Opt. Lett. 28, 194 (2003) (temperature entering in
//!   kelvin squared, encoded by t0 = −273.15, t1 = 273.15).
//!
//! Coefficients live in versioned plain-text data files under `data/` (column
//! format documented in `docs/materials.md`) so alternative fits can be
//! substituted without recompiling; see [`MaterialModel::from_data_str`].

use crate::error::{Error, Result};
use crate::units::C_UM_PER_PS;

pub use crate::units::OpticalConstants;

/// Polarization branch of a uniaxial crystal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Ordinary,
    Extraordinary,
}

/// Crystals with shipped dispersion data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum MaterialName {
    LiNbO3,
    LiTaO3,
}

impl std::fmt::Display for MaterialName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MaterialName::LiNbO3 => write!(f, "LiNbO3"),
            MaterialName::LiTaO3 => write!(f, "LiTaO3"),
        }
    }
}

/// One resonance term (B0 + B1 f) / (λ² − (C0 + C1 f)²).
#[derive(Debug, Clone, PartialEq)]
struct Resonance {
    b0: f64,
    b1: f64,
    c0: f64,
    c1: f64,
}

/// Sellmeier fit for a single polarization branch.
#[derive(Debug, Clone, PartialEq)]
pub struct SellmeierBranch {
    /// f(T) = (T − t0)(T + t1).
    t0: f64,
    t1: f64,
    a0: f64,
    a1: f64,
    resonances: Vec<Resonance>,
    d0: f64,
    d1: f64,
}

impl SellmeierBranch {
    fn n_squared(&self, lambda_um: f64, temperature_c: f64) -> f64 {
        let f = (temperature_c - self.t0) * (temperature_c + self.t1);
        let l2 = lambda_um * lambda_um;
        let mut n2 = self.a0 + self.a1 * f + (self.d0 + self.d1 * f) * l2;
        for r in &self.resonances {
            let c = r.c0 + r.c1 * f;
            n2 += (r.b0 + r.b1 * f) / (l2 - c * c);
        }
        n2
    }
}

/// Temperature-dependent dispersion model of one uniaxial crystal.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialModel {
    pub name: String,
    ordinary: SellmeierBranch,
    extraordinary: SellmeierBranch,
    /// Trusted wavelength interval, μm.
    pub wavelength_validity: (f64, f64),
    /// Trusted temperature interval, °C.
    pub temperature_validity: (f64, f64),
    /// Linear thermal-expansion coefficient of the poling direction, 1/°C.
    pub thermal_expansion: f64,
}

impl MaterialModel {
    /// Shipped congruent LiNbO₃ model (Edwards & Lawrence 1984).
    pub fn linbo3() -> MaterialModel {
        MaterialModel::from_data_str(include_str!("../data/linbo3.txt"))
            .expect("shipped LiNbO3 data must parse")
    }

    /// Shipped stoichiometric LiTaO₃ model (Bruner et al. 2003 e-branch).
    pub fn litao3() -> MaterialModel {
        MaterialModel::from_data_str(include_str!("../data/litao3.txt"))
            .expect("shipped LiTaO3 data must parse")
    }

    pub fn preset(name: MaterialName) -> MaterialModel {
        match name {
            MaterialName::LiNbO3 => MaterialModel::linbo3(),
            MaterialName::LiTaO3 => MaterialModel::litao3(),
        }
    }

    /// Parse a material data file (see `docs/materials.md` for the format).
    pub fn from_data_str(text: &str) -> Result<MaterialModel> {
        let mut name = None;
        let mut thermal_expansion = None;
        let mut wavelength_validity = None;
        let mut temperature_validity = None;
        let mut branches: Vec<(String, SellmeierBranch)> = Vec::new();
        let mut current: Option<(String, SellmeierBranch)> = None;

        let err = |line: usize, detail: &str| Error::DataFormat {
            line,
            detail: detail.to_string(),
        };
        let parse_f64 = |tok: &str, line: usize| -> Result<f64> {
            tok.parse::<f64>()
                .map_err(|_| err(line, &format!("expected a number, found `{tok}`")))
        };

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tok = line.split_whitespace();
            let key = tok.next().unwrap();
            let rest: Vec<&str> = tok.collect();
            match key {
                "format" => {
                    if rest != ["spdc-material", "v1"] {
                        return Err(err(lineno, "unsupported format tag"));
                    }
                }
                "material" => {
                    name = Some(
                        rest.first()
                            .ok_or_else(|| err(lineno, "material needs a name"))?
                            .to_string(),
                    );
                }
                "thermal-expansion-per-c" => {
                    thermal_expansion = Some(parse_f64(
                        rest.first().ok_or_else(|| err(lineno, "missing value"))?,
                        lineno,
                    )?);
                }
                "wavelength-range-um" | "temperature-range-c" => {
                    if rest.len() != 2 {
                        return Err(err(lineno, "range needs exactly two numbers"));
                    }
                    let lo = parse_f64(rest[0], lineno)?;
                    let hi = parse_f64(rest[1], lineno)?;
                    if lo >= hi {
                        return Err(err(lineno, "range must be increasing"));
                    }
                    if key == "wavelength-range-um" {
                        wavelength_validity = Some((lo, hi));
                    } else {
                        temperature_validity = Some((lo, hi));
                    }
                }
                "branch" => {
                    if let Some(done) = current.take() {
                        branches.push(done);
                    }
                    let b = rest
                        .first()
                        .ok_or_else(|| err(lineno, "branch needs `ordinary` or `extraordinary`"))?;
                    current = Some((
                        b.to_string(),
                        SellmeierBranch {
                            t0: 0.0,
                            t1: 0.0,
                            a0: 0.0,
                            a1: 0.0,
                            resonances: Vec::new(),
                            d0: 0.0,
                            d1: 0.0,
                        },
                    ));
                }
                "temperature-function" | "constant" | "lambda-squared" => {
                    let cur = current
                        .as_mut()
                        .ok_or_else(|| err(lineno, "coefficient line before any `branch`"))?;
                    if rest.len() != 2 {
                        return Err(err(lineno, "expected exactly two numbers"));
                    }
                    let x = parse_f64(rest[0], lineno)?;
                    let y = parse_f64(rest[1], lineno)?;
                    match key {
                        "temperature-function" => {
                            cur.1.t0 = x;
                            cur.1.t1 = y;
                        }
                        "constant" => {
                            cur.1.a0 = x;
                            cur.1.a1 = y;
                        }
                        _ => {
                            cur.1.d0 = x;
                            cur.1.d1 = y;
                        }
                    }
                }
                "resonance" => {
                    let cur = current
                        .as_mut()
                        .ok_or_else(|| err(lineno, "coefficient line before any `branch`"))?;
                    if rest.len() != 4 {
                        return Err(err(lineno, "resonance expects four numbers"));
                    }
                    cur.1.resonances.push(Resonance {
                        b0: parse_f64(rest[0], lineno)?,
                        b1: parse_f64(rest[1], lineno)?,
                        c0: parse_f64(rest[2], lineno)?,
                        c1: parse_f64(rest[3], lineno)?,
                    });
                }
                other => {
                    return Err(err(lineno, &format!("unknown key `{other}`")));
                }
            }
        }
        if let Some(done) = current.take() {
            branches.push(done);
        }

        let take = |tag: &str| -> Result<SellmeierBranch> {
            branches
                .iter()
                .find(|(b, _)| b == tag)
                .map(|(_, s)| s.clone())
                .ok_or_else(|| err(0, &format!("missing `branch {tag}`")))
        };
        Ok(MaterialModel {
            name: name.ok_or_else(|| err(0, "missing `material` line"))?,
            ordinary: take("ordinary")?,
            extraordinary: take("extraordinary")?,
            wavelength_validity: wavelength_validity
                .ok_or_else(|| err(0, "missing `wavelength-range-um`"))?,
            temperature_validity: temperature_validity
                .ok_or_else(|| err(0, "missing `temperature-range-c`"))?,
            thermal_expansion: thermal_expansion
                .ok_or_else(|| err(0, "missing `thermal-expansion-per-c`"))?,
        })
    }

    /// Load a material data file from disk.
    pub fn from_data_file(path: &std::path::Path) -> Result<MaterialModel> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::DataFormat {
            line: 0,
            detail: format!("{}: {e}", path.display()),
        })?;
        MaterialModel::from_data_str(&text)
    }

    fn check_validity(&self, lambda_um: f64, temperature_c: f64) -> Result<()> {
        let (wlo, whi) = self.wavelength_validity;
        if !(lambda_um >= wlo && lambda_um <= whi) {
            return Err(Error::OutOfValidityRange {
                material: self.name.clone(),
                quantity: "wavelength (um)",
                value: lambda_um,
                min: wlo,
                max: whi,
            });
        }
        let (tlo, thi) = self.temperature_validity;
        if !(temperature_c >= tlo && temperature_c <= thi) {
            return Err(Error::OutOfValidityRange {
                material: self.name.clone(),
                quantity: "temperature (C)",
                value: temperature_c,
                min: tlo,
                max: thi,
            });
        }
        Ok(())
    }

    /// Refractive index of one principal branch.
    pub fn refractive_index(
        &self,
        branch: Branch,
        lambda_um: f64,
        temperature_c: f64,
    ) -> Result<f64> {
        self.check_validity(lambda_um, temperature_c)?;
        let b = match branch {
            Branch::Ordinary => &self.ordinary,
            Branch::Extraordinary => &self.extraordinary,
        };
        let n2 = b.n_squared(lambda_um, temperature_c);
        debug_assert!(n2 > 1.0, "Sellmeier fit left the physical regime");
        Ok(n2.sqrt())
    }
}

/// Index-ellipsoid value seen by an extraordinary wave whose wave vector makes
/// angle `theta` with the optic axis: 1/n²(θ) = cos²θ/n_o² + sin²θ/n_e².
pub fn extraordinary_index_at_angle(n_o: f64, n_e: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    1.0 / ((c * c) / (n_o * n_o) + (s * s) / (n_e * n_e)).sqrt()
}

/// Wave-vector magnitude k = n ω / c in rad/μm.
pub fn wavevector_magnitude(omega_rad_per_ps: f64, n: f64) -> f64 {
    n * omega_rad_per_ps / C_UM_PER_PS
}
