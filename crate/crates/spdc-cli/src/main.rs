//! Command-line front end: parameter sweeps and CSV/JSON export for the
//! photon-pair simulator.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 physics /
//! validity error, 4 grid-resolution error. The `SPDC_WORKERS` environment
//! variable caps the worker count; results are byte-identical for any value.

mod config;
mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use spdc_core::angular::{
    angular_spectrum, correlation_area, correlation_width_vs_chirp, count_spectral_peaks,
    photon_number_map, temperature_scan, EmissionSetup, SpectralFilter,
};
use spdc_core::biphoton::{jsa_layer_sum, jsa_quasi_cw, FrequencyGrid, Geometry};
use spdc_core::export;
use spdc_core::schmidt::{discretize_jsa, schmidt_decompose};
use spdc_core::observables::{
    energy_spectrum, fwhm_dip, fwhm_spectrum, hom_dip, pair_rate, smooth_spectrum, SpectrumLabel,
};
use spdc_core::units::{deg_to_rad, thz_to_rad_per_ps};

use config::{AutoOrValue, ConfigError, Resolved, ResolveError, RunConfig};

#[derive(Parser)]
#[command(
    name = "spdc",
    version,
    about = "Photon-pair emission from uniformly and chirp-poled nonlinear crystals"
)]
struct Cli {
    /// Configuration file (TOML). Defaults reproduce the reference fixture.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override: crystal material (LiNbO3 | LiTaO3).
    #[arg(long, global = true)]
    material: Option<String>,
    /// Override: path to a substitute Sellmeier data file.
    #[arg(long, global = true)]
    material_file: Option<String>,
    /// Override: crystal temperature, °C.
    #[arg(long, global = true)]
    temperature_c: Option<f64>,
    /// Override: signal center wavelength, μm.
    #[arg(long, global = true)]
    lambda_s_um: Option<f64>,
    /// Override: idler center wavelength, μm, or "auto".
    #[arg(long, global = true)]
    lambda_i_um: Option<String>,
    /// Override: chirp parameter ζ, μm⁻².
    #[arg(long, global = true)]
    zeta: Option<f64>,
    /// Override: number of poling layers N_L.
    #[arg(long, global = true)]
    n_layers: Option<usize>,
    /// Flip the chirp orientation (longer layers at the entrance).
    #[arg(long, global = true)]
    flip_chirp: bool,
    /// Override: slice half span, rad/ps.
    #[arg(long, global = true)]
    half_span: Option<f64>,
    /// Override: slice point count.
    #[arg(long, global = true)]
    n_points: Option<usize>,
    /// Override: slice centering (signal | midpoint).
    #[arg(long, global = true)]
    center: Option<String>,
    /// Override: output directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Also write matrix-layout CSVs for maps.
    #[arg(long, global = true)]
    matrix_layout: bool,
    /// Override: moving-average window for spectra, rad/ps (0 = raw).
    #[arg(long, global = true)]
    smooth_window: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Signal and idler energy spectra of the configured slice.
    Spectrum,
    /// Relative photon-pair rate of the configured slice.
    Pairs,
    /// Hong–Ou–Mandel coincidence profile.
    Hom {
        /// Maximum delay, ps.
        #[arg(long)]
        tau_max_ps: Option<f64>,
        /// Number of delay points.
        #[arg(long)]
        n_tau: Option<usize>,
    },
    /// Schmidt decomposition of the quasi-cw amplitude: λ_n², E, K.
    Schmidt {
        /// Pump linewidth σ_p, rad/ps.
        #[arg(long)]
        sigma_p: Option<f64>,
        /// Grid points per axis for the 2D amplitude.
        #[arg(long, default_value_t = 515)]
        schmidt_points: usize,
        /// Half span of the 2D grid, rad/ps.
        #[arg(long, default_value_t = 420.0)]
        schmidt_half_span: f64,
        /// Also dump the first N signal/idler mode functions to CSV.
        #[arg(long, default_value_t = 0)]
        dump_modes: usize,
    },
    /// Signal photon-number map over emission angles.
    AngularMap,
    /// Angle-resolved signal spectrum at a fixed radial angle.
    AngularSpectrum {
        /// Signal radial emission angle, deg.
        #[arg(long)]
        theta_s_deg: Option<f64>,
    },
    /// Conditional idler distribution around the optimum direction.
    CorrelationArea {
        /// Signal radial emission angle, deg.
        #[arg(long)]
        theta_s_deg: Option<f64>,
        /// Half span in δϑ_i, rad.
        #[arg(long, default_value_t = 0.01)]
        dtheta_max: f64,
        #[arg(long, default_value_t = 121)]
        n_dtheta: usize,
        /// Half span in δψ_i, rad.
        #[arg(long, default_value_t = 0.06)]
        dpsi_max: f64,
        #[arg(long, default_value_t = 41)]
        n_dpsi: usize,
        /// Frequency points for the conditional integral.
        #[arg(long, default_value_t = 151)]
        n_omega: usize,
    },
    /// Radial correlation width Δϑ_i as a function of the chirp parameter.
    ChirpSweep {
        /// Chirp values, μm⁻² (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        zetas: Vec<f64>,
        #[arg(long)]
        theta_s_deg: Option<f64>,
        #[arg(long, default_value_t = 0.012)]
        dtheta_max: f64,
        #[arg(long, default_value_t = 241)]
        n_dtheta: usize,
        #[arg(long, default_value_t = 201)]
        n_omega: usize,
    },
    /// Signal photon number over (ϑ_s, T) with a flat-top spectral filter.
    TemperatureScan {
        /// Temperatures, °C (comma separated). Defaults to a scan around and
        /// below the design temperature where the emission ring develops.
        #[arg(long, value_delimiter = ',')]
        temps: Vec<f64>,
        /// Flat-top filter bandwidth, THz.
        #[arg(long, default_value_t = 14.0)]
        filter_thz: f64,
        /// Frequency samples across the filter band.
        #[arg(long, default_value_t = 45)]
        n_omega: usize,
    },
    /// Two-column fabrication blueprint of the domain structure.
    Blueprint,
    /// Run an inner computation along one parameter axis.
    Sweep {
        /// Axis: n-layers | zeta | temperature | waist.
        #[arg(long)]
        axis: String,
        /// Axis values (comma separated).
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        /// Inner computation: pairs | spectrum | hom.
        #[arg(long)]
        inner: String,
        /// Hold the first/last layer lengths fixed: ζ is derived from N_L as
        /// ζ_ref·N_ref/N_L (axis must be n-layers).
        #[arg(long)]
        fixed_endpoints: bool,
    },
}

/// Error wrapper carrying the process exit code.
enum AppError {
    Io(std::io::Error),
    Config(ConfigError),
    Domain(spdc_core::Error),
}

impl AppError {
    fn code(&self) -> i32 {
        match self {
            AppError::Io(_) => 1,
            AppError::Config(_) => 2,
            AppError::Domain(spdc_core::Error::GridTooCoarse { .. }) => 4,
            AppError::Domain(_) => 3,
        }
    }
    fn message(&self) -> String {
        match self {
            AppError::Io(e) => format!("i/o error: {e}"),
            AppError::Config(e) => e.to_string(),
            AppError::Domain(e) => e.to_string(),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}
impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Config(e)
    }
}
impl From<spdc_core::Error> for AppError {
    fn from(e: spdc_core::Error) -> Self {
        AppError::Domain(e)
    }
}
impl From<ResolveError> for AppError {
    fn from(e: ResolveError) -> Self {
        match e {
            ResolveError::Config(c) => AppError::Config(c),
            ResolveError::Domain(d) => AppError::Domain(d),
        }
    }
}

fn main() {
    if let Ok(v) = std::env::var("SPDC_WORKERS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("spdc: {}", e.message());
            std::process::exit(e.code());
        }
    }
}

fn effective_config(cli: &Cli) -> Result<RunConfig, AppError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(m) = &cli.material {
        cfg.crystal.material = m.clone();
    }
    if let Some(f) = &cli.material_file {
        cfg.crystal.material_file = Some(f.clone());
    }
    if let Some(t) = cli.temperature_c {
        cfg.crystal.temperature_c = t;
    }
    if let Some(l) = cli.lambda_s_um {
        cfg.pair.lambda_s_um = l;
    }
    if let Some(l) = &cli.lambda_i_um {
        cfg.pair.lambda_i_um = match l.parse::<f64>() {
            Ok(v) => AutoOrValue::Value(v),
            Err(_) => AutoOrValue::Keyword(l.clone()),
        };
    }
    if let Some(z) = cli.zeta {
        cfg.poling.zeta_per_um2 = z;
    }
    if let Some(n) = cli.n_layers {
        cfg.poling.n_layers = n;
    }
    if cli.flip_chirp {
        cfg.poling.flip_chirp = true;
    }
    if let Some(h) = cli.half_span {
        cfg.grid.half_span_rad_per_ps = h;
    }
    if let Some(n) = cli.n_points {
        cfg.grid.n_points = n;
    }
    if let Some(c) = &cli.center {
        cfg.grid.center = c.clone();
    }
    if let Some(d) = &cli.out_dir {
        cfg.output.directory = d.display().to_string();
    }
    if cli.matrix_layout {
        cfg.output.matrix_layout = true;
    }
    if let Some(w) = cli.smooth_window {
        cfg.output.smoothing_window_rad_per_ps = w;
    }
    Ok(cfg)
}

fn emission_setup(r: &Resolved) -> EmissionSetup {
    EmissionSetup {
        material: r.material.clone(),
        temperature_c: r.temperature_c,
        omega_p0: r.omega_p0,
        domains: r.domains.clone(),
    }
}

/// Midpoint-centered frequency samples for angular integrals.
fn angular_omega_grid(r: &Resolved, n: usize) -> Vec<f64> {
    let half = r.config.grid.half_span_rad_per_ps;
    let center = r.omega_p0 / 2.0;
    (0..n)
        .map(|j| center - half + 2.0 * half * j as f64 / (n as f64 - 1.0))
        .collect()
}

fn run(cli: Cli) -> Result<(), AppError> {
    let cfg = effective_config(&cli)?;
    let resolved = Resolved::new(cfg)?;
    let out_dir = PathBuf::from(&resolved.config.output.directory);

    match &cli.command {
        Command::Spectrum => cmd_spectrum(&resolved, &out_dir),
        Command::Pairs => cmd_pairs(&resolved, &out_dir),
        Command::Hom { tau_max_ps, n_tau } => cmd_hom(&resolved, &out_dir, *tau_max_ps, *n_tau),
        Command::Schmidt {
            sigma_p,
            schmidt_points,
            schmidt_half_span,
            dump_modes,
        } => cmd_schmidt(
            &resolved,
            &out_dir,
            *sigma_p,
            *schmidt_points,
            *schmidt_half_span,
            *dump_modes,
        ),
        Command::AngularMap => cmd_angular_map(&resolved, &out_dir),
        Command::AngularSpectrum { theta_s_deg } => {
            cmd_angular_spectrum(&resolved, &out_dir, *theta_s_deg)
        }
        Command::CorrelationArea {
            theta_s_deg,
            dtheta_max,
            n_dtheta,
            dpsi_max,
            n_dpsi,
            n_omega,
        } => cmd_correlation_area(
            &resolved,
            &out_dir,
            *theta_s_deg,
            *dtheta_max,
            *n_dtheta,
            *dpsi_max,
            *n_dpsi,
            *n_omega,
        ),
        Command::ChirpSweep {
            zetas,
            theta_s_deg,
            dtheta_max,
            n_dtheta,
            n_omega,
        } => cmd_chirp_sweep(
            &resolved,
            &out_dir,
            zetas,
            *theta_s_deg,
            *dtheta_max,
            *n_dtheta,
            *n_omega,
        ),
        Command::TemperatureScan {
            temps,
            filter_thz,
            n_omega,
        } => cmd_temperature_scan(&resolved, &out_dir, temps, *filter_thz, *n_omega),
        Command::Blueprint => cmd_blueprint(&resolved, &out_dir),
        Command::Sweep {
            axis,
            values,
            inner,
            fixed_endpoints,
        } => cmd_sweep(&resolved, &out_dir, axis, values, inner, *fixed_endpoints),
    }
}

fn configured_slice(r: &Resolved) -> Result<spdc_core::biphoton::JsaSlice, AppError> {
    let grid = r.frequency_grid()?;
    Ok(jsa_layer_sum(
        &r.domains,
        &grid,
        Geometry::Collinear,
        &r.material,
        r.temperature_c,
    )?)
}

fn cmd_spectrum(r: &Resolved, out: &Path) -> Result<(), AppError> {
    let slice = configured_slice(r)?;
    let window = r.config.output.smoothing_window_rad_per_ps;
    let mut summaries = Vec::new();
    for label in [SpectrumLabel::Signal, SpectrumLabel::Idler] {
        let raw = energy_spectrum(&slice, label);
        let spectrum = if window > 0.0 {
            smooth_spectrum(&raw, window)?
        } else {
            raw
        };
        let fwhm = fwhm_spectrum(&spectrum).ok();
        let stem = match label {
            SpectrumLabel::Signal => "spectrum_signal",
            SpectrumLabel::Idler => "spectrum_idler",
        };
        output::write_artifact(
            out,
            stem,
            &export::spectrum_csv(&spectrum),
            &r.config,
            serde_json::json!({
                "fwhm-rad-per-ps": fwhm,
                "smoothing-window-rad-per-ps": window,
            }),
        )?;
        match fwhm {
            Some(w) => summaries.push(format!("{stem}: fwhm {w:.3} rad/ps")),
            None => summaries.push(format!("{stem}: fwhm undefined on this span")),
        }
    }
    println!(
        "spectrum: wrote 2 files to {} ({})",
        out.display(),
        summaries.join("; ")
    );
    Ok(())
}

fn cmd_pairs(r: &Resolved, out: &Path) -> Result<(), AppError> {
    let slice = configured_slice(r)?;
    let rate = pair_rate(&slice)?;
    let csv = format!("pair_rate_relative\n{}\n", rate);
    output::write_artifact(
        out,
        "pairs",
        &csv,
        &r.config,
        serde_json::json!({ "pair-rate-relative": rate }),
    )?;
    println!("pairs: relative rate {rate:.6e}");
    Ok(())
}

fn cmd_hom(
    r: &Resolved,
    out: &Path,
    tau_max: Option<f64>,
    n_tau: Option<usize>,
) -> Result<(), AppError> {
    let slice = configured_slice(r)?;
    let taus = {
        let max = tau_max.unwrap_or(r.config.delays.max_ps);
        let n = n_tau.unwrap_or(r.config.delays.n_points).max(2);
        let c = (n as f64 - 1.0) / 2.0;
        let step = 2.0 * max / (n as f64 - 1.0);
        (0..n).map(|j| (j as f64 - c) * step).collect::<Vec<_>>()
    };
    let profile = hom_dip(&slice, &taus)?;
    let width = fwhm_dip(&profile).ok();
    output::write_artifact(
        out,
        "hom",
        &export::hom_csv(&profile),
        &r.config,
        serde_json::json!({
            "visibility": profile.visibility,
            "dip-position-ps": profile.dip_position,
            "dip-fwhm-ps": width,
            "normalization-r0": profile.baseline_r0,
            "edge-deviation": profile.edge_deviation,
        }),
    )?;
    println!(
        "hom: visibility {:.4}, dip at {:.5} ps, fwhm {} ps, baseline deviation {:.2e}",
        profile.visibility,
        profile.dip_position,
        width.map_or("n/a".to_string(), |w| format!("{w:.5}")),
        profile.edge_deviation
    );
    Ok(())
}

fn cmd_schmidt(
    r: &Resolved,
    out: &Path,
    sigma_p: Option<f64>,
    n_points: usize,
    half_span: f64,
    dump_modes: usize,
) -> Result<(), AppError> {
    let sigma = sigma_p.unwrap_or(r.sigma_p);
    // midpoint-centered square grid covers both QPM stripes
    let grid = FrequencyGrid::new(r.omega_p0 / 2.0, r.omega_p0 / 2.0, half_span, n_points)?;
    let jsa2 = jsa_quasi_cw(&r.domains, &grid, &r.material, r.temperature_c, sigma)?;
    let matrix = discretize_jsa(&jsa2)?;
    let result = schmidt_decompose(&matrix)?;
    if dump_modes > 0 {
        output::write_artifact(
            out,
            "schmidt_signal_modes",
            &export::schmidt_modes_csv(&jsa2.omega_s, &result.signal_modes, dump_modes),
            &r.config,
            serde_json::json!({ "modes": dump_modes.min(result.signal_modes.len()) }),
        )?;
        output::write_artifact(
            out,
            "schmidt_idler_modes",
            &export::schmidt_modes_csv(&jsa2.omega_i, &result.idler_modes, dump_modes),
            &r.config,
            serde_json::json!({ "modes": dump_modes.min(result.idler_modes.len()) }),
        )?;
    }
    output::write_artifact(
        out,
        "schmidt",
        &export::schmidt_csv(&result),
        &r.config,
        serde_json::json!({
            "entropy-bits": result.entropy,
            "cooperativity": result.cooperativity,
            "sigma-p-rad-per-ps": sigma,
            "grid-points": n_points,
            "grid-half-span-rad-per-ps": half_span,
            "modes-kept": result.coefficients.len(),
        }),
    )?;
    println!(
        "schmidt: E = {:.4} bits, K = {:.3}, {} modes above threshold (sigma_p = {} rad/ps)",
        result.entropy,
        result.cooperativity,
        result.coefficients.len(),
        sigma
    );
    Ok(())
}

fn cmd_angular_map(r: &Resolved, out: &Path) -> Result<(), AppError> {
    let setup = emission_setup(r);
    let a = &r.config.angular;
    let thetas: Vec<f64> = (0..a.n_theta)
        .map(|j| deg_to_rad(a.theta_max_deg) * j as f64 / (a.n_theta as f64 - 1.0))
        .collect();
    let psis: Vec<f64> = (0..a.n_psi)
        .map(|j| 2.0 * std::f64::consts::PI * j as f64 / a.n_psi as f64)
        .collect();
    let omega = angular_omega_grid(r, r.config.grid.n_points.min(401));
    let filter = (r.filter_width > 0.0).then_some(SpectralFilter {
        center: r.omega_p0 / 2.0,
        full_width: r.filter_width,
    });
    let map = photon_number_map(&setup, &thetas, &psis, &omega, filter)?;
    output::write_artifact(
        out,
        "angular_map",
        &export::angular_map_csv_named(&map, "theta_s_rad", "psi_s_rad", "photon_number_relative"),
        &r.config,
        serde_json::json!({ "filter-width-rad-per-ps": r.filter_width }),
    )?;
    if r.config.output.matrix_layout {
        output::write_artifact(
            out,
            "angular_map_matrix",
            &export::angular_map_matrix_csv(&map, "theta_s_rad"),
            &r.config,
            serde_json::json!({}),
        )?;
    }
    let (imax, vmax) = map
        .values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .unwrap();
    println!(
        "angular-map: {}x{} cells, max {:.4e} at theta = {:.3} deg",
        thetas.len(),
        psis.len(),
        vmax,
        map.axis_a[imax / psis.len()].to_degrees()
    );
    Ok(())
}

fn cmd_angular_spectrum(
    r: &Resolved,
    out: &Path,
    theta_s_deg: Option<f64>,
) -> Result<(), AppError> {
    let setup = emission_setup(r);
    let theta = deg_to_rad(theta_s_deg.unwrap_or(r.config.angular.theta_s_deg));
    let omega = angular_omega_grid(r, r.config.grid.n_points);
    let raw = angular_spectrum(&setup, theta, &omega)?;
    let window = r.config.output.smoothing_window_rad_per_ps;
    let spectrum = if window > 0.0 {
        smooth_spectrum(&raw, window)?
    } else {
        raw
    };
    let peaks = count_spectral_peaks(&spectrum.values, 0.25);
    output::write_artifact(
        out,
        "angular_spectrum",
        &export::spectrum_csv(&spectrum),
        &r.config,
        serde_json::json!({
            "theta-s-deg": theta.to_degrees(),
            "peaks-above-quarter-max": peaks,
        }),
    )?;
    println!(
        "angular-spectrum: theta_s = {:.2} deg, {} peak(s) above quarter maximum",
        theta.to_degrees(),
        peaks
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_correlation_area(
    r: &Resolved,
    out: &Path,
    theta_s_deg: Option<f64>,
    dtheta_max: f64,
    n_dtheta: usize,
    dpsi_max: f64,
    n_dpsi: usize,
    n_omega: usize,
) -> Result<(), AppError> {
    let setup = emission_setup(r);
    let theta_s = deg_to_rad(theta_s_deg.unwrap_or(r.config.angular.theta_s_deg));
    let sym = |n: usize, max: f64| -> Vec<f64> {
        let c = (n as f64 - 1.0) / 2.0;
        (0..n)
            .map(|j| (j as f64 - c) * 2.0 * max / (n as f64 - 1.0))
            .collect()
    };
    let dth = sym(n_dtheta, dtheta_max);
    let dps = sym(n_dpsi, dpsi_max);
    let omega = angular_omega_grid(r, n_omega);
    let area = correlation_area(
        &setup,
        theta_s,
        0.0,
        r.omega_s0,
        r.waist_um,
        &dth,
        &dps,
        &omega,
    )?;
    output::write_artifact(
        out,
        "correlation_area",
        &export::angular_map_csv_named(&area.map, "dtheta_i_rad", "dpsi_i_rad", "conditional_density_relative"),
        &r.config,
        serde_json::json!({
            "theta-s-deg": theta_s.to_degrees(),
            "theta-i-opt-rad": area.theta_i_opt,
            "psi-i-opt-rad": area.psi_i_opt,
            "width-theta": area.width_theta,
            "width-psi": area.width_psi,
            "pump-waist-um": r.waist_um,
        }),
    )?;
    let fmt = |w: &Option<spdc_core::angular::WidthReport>| {
        w.as_ref().map_or("n/a".to_string(), |w| {
            format!("{:.5} rad ({} lobe(s))", w.envelope, w.lobes.len())
        })
    };
    println!(
        "correlation-area: width_theta {} | width_psi {}",
        fmt(&area.width_theta),
        fmt(&area.width_psi)
    );
    Ok(())
}

fn cmd_chirp_sweep(
    r: &Resolved,
    out: &Path,
    zetas: &[f64],
    theta_s_deg: Option<f64>,
    dtheta_max: f64,
    n_dtheta: usize,
    n_omega: usize,
) -> Result<(), AppError> {
    if zetas.is_empty() {
        return Err(ConfigError {
            field: "zetas".into(),
            message: "chirp sweep needs at least one value".into(),
        }
        .into());
    }
    let theta_s = deg_to_rad(theta_s_deg.unwrap_or(1.0));
    let c = (n_dtheta as f64 - 1.0) / 2.0;
    let dth: Vec<f64> = (0..n_dtheta)
        .map(|j| (j as f64 - c) * 2.0 * dtheta_max / (n_dtheta as f64 - 1.0))
        .collect();
    let half = r.config.grid.half_span_rad_per_ps;
    let omega: Vec<f64> = (0..n_omega)
        .map(|j| r.omega_s0 - half + 2.0 * half * j as f64 / (n_omega as f64 - 1.0))
        .collect();
    let curve = correlation_width_vs_chirp(
        &r.material,
        r.temperature_c,
        r.omega_p0,
        r.omega_s0,
        r.l0_um,
        r.poling_spec.n_layers,
        zetas,
        theta_s,
        r.waist_um,
        &dth,
        &omega,
    )?;
    let monotone = curve.windows(2).all(|w| w[1].1 > w[0].1);
    let mut csv = String::from("zeta_per_um2,correlation_width_theta_rad\n");
    for (z, w) in &curve {
        csv.push_str(&format!("{},{}\n", z, w));
    }
    output::write_artifact(
        out,
        "chirp_sweep",
        &csv,
        &r.config,
        serde_json::json!({
            "monotone-increasing": monotone,
            "theta-s-deg": theta_s.to_degrees(),
        }),
    )?;
    println!(
        "chirp-sweep: {} points, width monotone increasing: {}",
        curve.len(),
        monotone
    );
    Ok(())
}

fn cmd_temperature_scan(
    r: &Resolved,
    out: &Path,
    temps: &[f64],
    filter_thz: f64,
    n_omega: usize,
) -> Result<(), AppError> {
    if filter_thz <= 0.0 {
        return Err(ConfigError {
            field: "filter-thz".into(),
            message: "temperature scan needs a positive filter bandwidth".into(),
        }
        .into());
    }
    let temps: Vec<f64> = if temps.is_empty() {
        (0..9)
            .map(|j| r.temperature_c + 5.0 - 2.5 * j as f64)
            .collect()
    } else {
        temps.to_vec()
    };
    let a = &r.config.angular;
    let thetas: Vec<f64> = (0..a.n_theta)
        .map(|j| deg_to_rad(a.theta_max_deg) * j as f64 / (a.n_theta as f64 - 1.0))
        .collect();
    let map = temperature_scan(
        &r.material,
        &r.domains,
        r.temperature_c,
        r.omega_p0,
        &temps,
        &thetas,
        thz_to_rad_per_ps(filter_thz),
        n_omega,
    )?;
    output::write_artifact(
        out,
        "temperature_scan",
        &export::angular_map_csv_named(&map, "theta_s_rad", "temperature_c", "photon_number_relative"),
        &r.config,
        serde_json::json!({ "filter-bandwidth-thz": filter_thz }),
    )?;
    if r.config.output.matrix_layout {
        output::write_artifact(
            out,
            "temperature_scan_matrix",
            &export::angular_map_matrix_csv(&map, "theta_s_rad"),
            &r.config,
            serde_json::json!({}),
        )?;
    }
    println!(
        "temperature-scan: {} temperatures x {} angles, filter {} THz",
        temps.len(),
        thetas.len(),
        filter_thz
    );
    Ok(())
}

fn cmd_blueprint(r: &Resolved, out: &Path) -> Result<(), AppError> {
    let csv = r.domains.blueprint();
    output::write_artifact(
        out,
        "blueprint",
        &csv,
        &r.config,
        serde_json::json!({
            "n-layers": r.domains.n_domains(),
            "total-length-um": r.domains.total_length(),
            "l0-um": r.l0_um,
            "lambda-i-um": r.lambda_i_um,
        }),
    )?;
    println!(
        "blueprint: {} domains, total length {:.4} um, basic layer {:.4} um",
        r.domains.n_domains(),
        r.domains.total_length(),
        r.l0_um
    );
    Ok(())
}

fn cmd_sweep(
    r: &Resolved,
    out: &Path,
    axis: &str,
    values: &[f64],
    inner: &str,
    fixed_endpoints: bool,
) -> Result<(), AppError> {
    if values.is_empty() {
        return Err(ConfigError {
            field: "values".into(),
            message: "sweep needs a non-empty value list".into(),
        }
        .into());
    }
    if !matches!(axis, "n-layers" | "zeta" | "temperature" | "waist") {
        return Err(ConfigError {
            field: "axis".into(),
            message: format!("unknown axis `{axis}` (n-layers | zeta | temperature | waist)"),
        }
        .into());
    }
    if fixed_endpoints && axis != "n-layers" {
        return Err(ConfigError {
            field: "fixed-endpoints".into(),
            message: "fixed-endpoint mode applies to the n-layers axis only".into(),
        }
        .into());
    }
    let columns = match inner {
        "pairs" => "pair_rate_relative",
        "spectrum" => "pair_rate_relative,signal_fwhm_rad_per_ps",
        "hom" => "visibility,dip_position_ps,dip_fwhm_ps",
        other => {
            return Err(ConfigError {
                field: "inner".into(),
                message: format!("unknown inner computation `{other}` (pairs | spectrum | hom)"),
            }
            .into())
        }
    };
    let mut csv = format!("{axis},zeta_per_um2,{columns},status\n");
    let n_cols = columns.split(',').count();
    let ref_zeta = r.poling_spec.zeta;
    let ref_n = r.poling_spec.n_layers as f64;

    for &v in values {
        let mut cfg = r.config.clone();
        match axis {
            "n-layers" => {
                cfg.poling.n_layers = v as usize;
                if fixed_endpoints {
                    cfg.poling.zeta_per_um2 = ref_zeta.abs() * ref_n / v;
                    cfg.poling.flip_chirp = ref_zeta < 0.0;
                }
            }
            "zeta" => {
                cfg.poling.zeta_per_um2 = v;
                cfg.poling.flip_chirp = false;
            }
            "temperature" => cfg.crystal.temperature_c = v,
            "waist" => cfg.pump.waist_um = v,
            _ => unreachable!(),
        }
        match sweep_point(&cfg, inner) {
            Ok((zeta, cells)) => {
                csv.push_str(&format!("{},{},{},ok\n", v, zeta, cells.join(",")));
            }
            Err(e) => {
                let class = match &e {
                    AppError::Config(_) => "config-error",
                    AppError::Domain(spdc_core::Error::GridTooCoarse { .. }) => "grid-too-coarse",
                    AppError::Domain(_) => "domain-error",
                    AppError::Io(_) => "io-error",
                };
                csv.push_str(&format!("{},,{},{}\n", v, vec![""; n_cols].join(","), class));
            }
        }
    }
    output::write_artifact(
        out,
        "sweep",
        &csv,
        &r.config,
        serde_json::json!({
            "axis": axis,
            "inner": inner,
            "fixed-endpoints": fixed_endpoints,
            "n-values": values.len(),
        }),
    )?;
    println!("sweep: {} {axis} points through `{inner}`", values.len());
    Ok(())
}

fn sweep_point(cfg: &RunConfig, inner: &str) -> Result<(f64, Vec<String>), AppError> {
    let r = Resolved::new(cfg.clone())?;
    let slice = configured_slice(&r)?;
    let cells = match inner {
        "pairs" => vec![format!("{}", pair_rate(&slice)?)],
        "spectrum" => {
            let rate = pair_rate(&slice)?;
            let spectrum = energy_spectrum(&slice, SpectrumLabel::Signal);
            let f = fwhm_spectrum(&spectrum)?;
            vec![format!("{}", rate), format!("{}", f)]
        }
        "hom" => {
            let taus = r.delay_grid();
            let h = hom_dip(&slice, &taus)?;
            let w = fwhm_dip(&h)?;
            vec![
                format!("{}", h.visibility),
                format!("{}", h.dip_position),
                format!("{}", w),
            ]
        }
        _ => unreachable!("validated earlier"),
    };
    Ok((r.poling_spec.zeta, cells))
}
