//! Run configuration: TOML file with sections, validated into a resolved
//! physical setup. Every field has a default reproducing the reference
//! fixture (752.5 nm pump, degenerate 1505 nm pair in congruent LiNbO₃ at
//! 25 °C, N_L = 1000, ζ = 1e−6 μm⁻²), so a bare run needs no file at all.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use spdc_core::biphoton::FrequencyGrid;
use spdc_core::materials::MaterialModel;
use spdc_core::poling::{build_domains, design_basic_layer, DomainStructure, PolingSpec};
use spdc_core::units::{omega_from_lambda_um, thz_to_rad_per_ps};

/// A number or the literal string `"auto"` / `"design"`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum AutoOrValue {
    Keyword(String),
    Value(f64),
}

impl AutoOrValue {
    fn resolve(&self, keyword: &str, auto: impl FnOnce() -> Result<f64, ConfigError>) -> Result<f64, ConfigError> {
        match self {
            AutoOrValue::Value(v) => Ok(*v),
            AutoOrValue::Keyword(k) if k == keyword => auto(),
            AutoOrValue::Keyword(k) => Err(ConfigError {
                field: "keyword".into(),
                message: format!("expected a number or \"{keyword}\", found \"{k}\""),
            }),
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("config error in `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

fn cfg_err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CrystalSection {
    /// "LiNbO3" or "LiTaO3" (ignored when `material-file` is set).
    #[serde(default = "default_material")]
    pub material: String,
    /// Optional path to a substitute Sellmeier data file.
    #[serde(default)]
    pub material_file: Option<String>,
    #[serde(default = "default_temperature")]
    pub temperature_c: f64,
}

fn default_material() -> String {
    "LiNbO3".into()
}
fn default_temperature() -> f64 {
    25.0
}

impl Default for CrystalSection {
    fn default() -> Self {
        CrystalSection {
            material: default_material(),
            material_file: None,
            temperature_c: default_temperature(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PumpSection {
    #[serde(default = "default_lambda_p")]
    pub lambda_um: f64,
    /// Quasi-cw pump linewidth for Schmidt computations, rad/ps.
    #[serde(default = "default_sigma_p")]
    pub sigma_p_rad_per_ps: f64,
    /// Transverse waist for correlation areas, μm.
    #[serde(default = "default_waist")]
    pub waist_um: f64,
}

fn default_lambda_p() -> f64 {
    0.7525
}
fn default_sigma_p() -> f64 {
    20.0
}
fn default_waist() -> f64 {
    1000.0
}

impl Default for PumpSection {
    fn default() -> Self {
        PumpSection {
            lambda_um: default_lambda_p(),
            sigma_p_rad_per_ps: default_sigma_p(),
            waist_um: default_waist(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PairSection {
    #[serde(default = "default_lambda_s")]
    pub lambda_s_um: f64,
    /// Idler wavelength or "auto" (derived from energy conservation).
    #[serde(default = "default_lambda_i")]
    pub lambda_i_um: AutoOrValue,
}

fn default_lambda_s() -> f64 {
    1.5050
}
fn default_lambda_i() -> AutoOrValue {
    AutoOrValue::Keyword("auto".into())
}

impl Default for PairSection {
    fn default() -> Self {
        PairSection {
            lambda_s_um: default_lambda_s(),
            lambda_i_um: default_lambda_i(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PolingSection {
    /// Basic layer length, μm, or "design" for the first-order QPM value.
    #[serde(default = "default_l0")]
    pub l0_um: AutoOrValue,
    #[serde(default = "default_zeta")]
    pub zeta_per_um2: f64,
    #[serde(default = "default_n_layers")]
    pub n_layers: usize,
    /// Flip the chirp orientation (longer layers at the entrance).
    #[serde(default)]
    pub flip_chirp: bool,
}

fn default_l0() -> AutoOrValue {
    AutoOrValue::Keyword("design".into())
}
fn default_zeta() -> f64 {
    1e-6
}
fn default_n_layers() -> usize {
    1000
}

impl Default for PolingSection {
    fn default() -> Self {
        PolingSection {
            l0_um: default_l0(),
            zeta_per_um2: default_zeta(),
            n_layers: default_n_layers(),
            flip_chirp: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GridSection {
    #[serde(default = "default_half_span")]
    pub half_span_rad_per_ps: f64,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    /// Slice centering: "signal" (Ω from ω_s0) or "midpoint" (Ω from ω_p0/2).
    #[serde(default = "default_center")]
    pub center: String,
}

fn default_half_span() -> f64 {
    400.0
}
fn default_n_points() -> usize {
    2001
}
fn default_center() -> String {
    "signal".into()
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            half_span_rad_per_ps: default_half_span(),
            n_points: default_n_points(),
            center: default_center(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DelaySection {
    #[serde(default = "default_tau_max")]
    pub max_ps: f64,
    #[serde(default = "default_n_tau")]
    pub n_points: usize,
}

fn default_tau_max() -> f64 {
    0.6
}
fn default_n_tau() -> usize {
    4801
}

impl Default for DelaySection {
    fn default() -> Self {
        DelaySection {
            max_ps: default_tau_max(),
            n_points: default_n_tau(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct AngularSection {
    #[serde(default = "default_theta_max")]
    pub theta_max_deg: f64,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    #[serde(default = "default_n_psi")]
    pub n_psi: usize,
    /// Reference signal angle for angle-resolved outputs, deg.
    #[serde(default = "default_theta_s")]
    pub theta_s_deg: f64,
}

fn default_theta_max() -> f64 {
    6.0
}
fn default_n_theta() -> usize {
    31
}
fn default_n_psi() -> usize {
    13
}
fn default_theta_s() -> f64 {
    0.0
}

impl Default for AngularSection {
    fn default() -> Self {
        AngularSection {
            theta_max_deg: default_theta_max(),
            n_theta: default_n_theta(),
            n_psi: default_n_psi(),
            theta_s_deg: default_theta_s(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FilterSection {
    /// Flat-top filter bandwidth, THz (0 = no filter). Centered on the
    /// degenerate frequency ω_p0/2.
    #[serde(default)]
    pub bandwidth_thz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct OutputSection {
    #[serde(default = "default_out_dir")]
    pub directory: String,
    /// Moving-average window for spectra, rad/ps (0 = raw).
    #[serde(default)]
    pub smoothing_window_rad_per_ps: f64,
    /// Also emit matrix-layout CSVs for maps.
    #[serde(default)]
    pub matrix_layout: bool,
}

fn default_out_dir() -> String {
    "out".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: default_out_dir(),
            smoothing_window_rad_per_ps: 0.0,
            matrix_layout: false,
        }
    }
}

/// Complete run configuration (one TOML document).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    #[serde(default)]
    pub crystal: CrystalSection,
    #[serde(default)]
    pub pump: PumpSection,
    #[serde(default)]
    pub pair: PairSection,
    #[serde(default)]
    pub poling: PolingSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub delays: DelaySection,
    #[serde(default)]
    pub angular: AngularSection,
    #[serde(default)]
    pub filter: FilterSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<RunConfig, ConfigError> {
        toml::from_str(text).map_err(|e| cfg_err("<toml>", e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| cfg_err("<file>", format!("{}: {e}", path.display())))?;
        RunConfig::from_toml_str(&text)
    }

    /// SHA-256 of the canonical JSON serialization (no timestamps involved).
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut h = Sha256::new();
        h.update(canonical.as_bytes());
        format!("{:x}", h.finalize())
    }
}

/// Fully validated physical setup derived from a [`RunConfig`].
pub struct Resolved {
    pub config: RunConfig,
    pub material: MaterialModel,
    pub temperature_c: f64,
    pub omega_p0: f64,
    pub omega_s0: f64,
    pub omega_i0: f64,
    pub lambda_i_um: f64,
    pub l0_um: f64,
    pub poling_spec: PolingSpec,
    pub domains: DomainStructure,
    pub sigma_p: f64,
    pub waist_um: f64,
    /// Filter full width in rad/ps (0 = none).
    pub filter_width: f64,
}

impl Resolved {
    pub fn new(config: RunConfig) -> Result<Resolved, ResolveError> {
        let material = if let Some(path) = &config.crystal.material_file {
            MaterialModel::from_data_file(std::path::Path::new(path))
                .map_err(ResolveError::Domain)?
        } else {
            match config.crystal.material.as_str() {
                "LiNbO3" => MaterialModel::linbo3(),
                "LiTaO3" => MaterialModel::litao3(),
                other => {
                    return Err(ResolveError::Config(cfg_err(
                        "crystal.material",
                        format!("unknown material `{other}` (use LiNbO3, LiTaO3, or material-file)"),
                    )))
                }
            }
        };
        let t = config.crystal.temperature_c;

        let lp = config.pump.lambda_um;
        let ls = config.pair.lambda_s_um;
        if !(lp > 0.0 && ls > 0.0) {
            return Err(ResolveError::Config(cfg_err(
                "pump.lambda-um",
                "wavelengths must be positive",
            )));
        }
        if 1.0 / lp <= 1.0 / ls {
            return Err(ResolveError::Config(cfg_err(
                "pair.lambda-s-um",
                "signal must be redder than the pump",
            )));
        }
        let li = config
            .pair
            .lambda_i_um
            .resolve("auto", || Ok(1.0 / (1.0 / lp - 1.0 / ls)))
            .map_err(ResolveError::Config)?;
        // energy conservation of the center wavelengths
        let conservation = (1.0 / lp - 1.0 / ls - 1.0 / li).abs() * lp;
        if conservation > 1e-9 {
            return Err(ResolveError::Config(cfg_err(
                "pair.lambda-i-um",
                format!(
                    "center wavelengths must satisfy 1/λp = 1/λs + 1/λi to 1e-9 relative \
                     (violation: {conservation:.3e}); use \"auto\" to derive the idler"
                ),
            )));
        }

        // a failing QPM design is a physics error, not a config error
        let l0 = match &config.poling.l0_um {
            AutoOrValue::Value(v) => *v,
            AutoOrValue::Keyword(k) if k == "design" => {
                design_basic_layer(&material, lp, ls, li, t).map_err(ResolveError::Domain)?
            }
            AutoOrValue::Keyword(k) => {
                return Err(ResolveError::Config(cfg_err(
                    "poling.l0-um",
                    format!("expected a number or \"design\", found \"{k}\""),
                )))
            }
        };

        let zeta = if config.poling.flip_chirp {
            -config.poling.zeta_per_um2
        } else {
            config.poling.zeta_per_um2
        };
        let poling_spec = PolingSpec::new(l0, zeta, config.poling.n_layers)
            .map_err(ResolveError::Domain)?;
        let domains = build_domains(&poling_spec).map_err(ResolveError::Domain)?;

        if config.grid.n_points < 2 {
            return Err(ResolveError::Config(cfg_err(
                "grid.n-points",
                "need at least 2 points",
            )));
        }
        match config.grid.center.as_str() {
            "signal" | "midpoint" => {}
            other => {
                return Err(ResolveError::Config(cfg_err(
                    "grid.center",
                    format!("unknown centering `{other}` (use signal or midpoint)"),
                )))
            }
        }
        if !(config.pump.sigma_p_rad_per_ps > 0.0) {
            return Err(ResolveError::Config(cfg_err(
                "pump.sigma-p-rad-per-ps",
                "pump linewidth must be positive",
            )));
        }

        Ok(Resolved {
            material,
            temperature_c: t,
            omega_p0: omega_from_lambda_um(lp),
            omega_s0: omega_from_lambda_um(ls),
            omega_i0: omega_from_lambda_um(lp) - omega_from_lambda_um(ls),
            lambda_i_um: li,
            l0_um: l0,
            poling_spec,
            domains,
            sigma_p: config.pump.sigma_p_rad_per_ps,
            waist_um: config.pump.waist_um,
            filter_width: thz_to_rad_per_ps(config.filter.bandwidth_thz),
            config,
        })
    }

    /// Frequency grid of the configured slice.
    pub fn frequency_grid(&self) -> Result<FrequencyGrid, ResolveError> {
        let (cs, ci) = if self.config.grid.center == "midpoint" {
            (self.omega_p0 / 2.0, self.omega_p0 / 2.0)
        } else {
            (self.omega_s0, self.omega_i0)
        };
        FrequencyGrid::new(
            cs,
            ci,
            self.config.grid.half_span_rad_per_ps,
            self.config.grid.n_points,
        )
        .map_err(ResolveError::Domain)
    }

    /// Symmetric delay grid, ps.
    pub fn delay_grid(&self) -> Vec<f64> {
        let n = self.config.delays.n_points.max(2);
        let c = (n as f64 - 1.0) / 2.0;
        let step = 2.0 * self.config.delays.max_ps / (n as f64 - 1.0);
        (0..n).map(|j| (j as f64 - c) * step).collect()
    }
}

/// Resolution failures keep their class so the CLI can map exit codes.
#[derive(Debug, thiserror::Error)]
pub enum ResolveError {
    #[error(transparent)]
    Config(ConfigError),
    #[error(transparent)]
    Domain(spdc_core::Error),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_reproduce_reference_fixture() {
        let r = Resolved::new(RunConfig::default()).unwrap();
        assert_eq!(r.config.poling.n_layers, 1000);
        assert!((r.config.poling.zeta_per_um2 - 1e-6).abs() < 1e-18);
        assert!((r.l0_um - 8.9).abs() < 0.05);
        assert!((r.lambda_i_um - 1.5050).abs() < 1e-12);
    }

    #[test]
    fn non_conserving_idler_is_a_config_error() {
        let cfg = RunConfig::from_toml_str(
            "[pair]\nlambda-s-um = 1.3921\nlambda-i-um = 1.6378\n",
        )
        .unwrap();
        match Resolved::new(cfg) {
            Err(ResolveError::Config(e)) => {
                assert!(e.to_string().contains("1/λp = 1/λs + 1/λi"));
            }
            other => panic!("expected config error, got {other:?}", other = other.err()),
        }
    }

    #[test]
    fn hash_is_stable_and_config_sensitive() {
        let a = RunConfig::default().hash();
        let b = RunConfig::default().hash();
        assert_eq!(a, b);
        let mut cfg = RunConfig::default();
        cfg.poling.n_layers = 500;
        assert_ne!(a, cfg.hash());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml_str("[poling]\nn-domains = 5\n").is_err());
    }
}
