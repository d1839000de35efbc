//! Pair rates, energy spectra, spectral smoothing, widths, and Hong–Ou–Mandel
//! coincidence profiles, all reduced to one-dimensional integrals over the cw
//! slice.

use rayon::prelude::*;

use crate::biphoton::JsaSlice;
use crate::error::{Error, Result};
use crate::numerics::{cis, trapezoid};

/// Energy spectrum of one output field.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Strictly increasing angular frequencies, rad/ps.
    pub abscissa: Vec<f64>,
    /// Non-negative spectral densities (relative units).
    pub values: Vec<f64>,
    pub label: SpectrumLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SpectrumLabel {
    Signal,
    Idler,
}

/// Normalized Hong–Ou–Mandel coincidence profile R_n(τ) = 1 − ρ(τ).
#[derive(Debug, Clone)]
pub struct HomProfile {
    /// Relative delays, ps.
    pub delays: Vec<f64>,
    /// Normalized coincidence rate per delay.
    pub rate: Vec<f64>,
    /// Normalization R₀ = ∫ |a|² dΩ (the large-delay baseline maps to 1).
    pub baseline_r0: f64,
    /// Delay of the global rate minimum, ps.
    pub dip_position: f64,
    /// 1 − min R_n, clamped to [0, 1].
    pub visibility: f64,
    /// |R_n − 1| at the window edges; records how well the window reaches the
    /// baseline.
    pub edge_deviation: f64,
}

/// Raise GridTooCoarse when |a|² jumps by more than 20% between neighbours of
/// the global peak, the signature of unresolved interference fringes.
fn check_resolution(jsa: &JsaSlice) -> Result<()> {
    let v = jsa.intensity();
    let (p, &peak) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("slice is non-empty");
    if peak == 0.0 {
        return Ok(());
    }
    for q in [p.wrapping_sub(1), p + 1] {
        if let Some(&w) = v.get(q) {
            if peak - w > 0.2 * peak {
                return Err(Error::GridTooCoarse {
                    detail: format!(
                        "|a|^2 drops {:.0}% between adjacent points at the peak (index {p})",
                        100.0 * (peak - w) / peak
                    ),
                });
            }
        }
    }
    Ok(())
}

/// Relative pair rate ∫ dΩ |a(Ω)|² by composite trapezoid.
pub fn pair_rate(jsa: &JsaSlice) -> Result<f64> {
    check_resolution(jsa)?;
    Ok(trapezoid(&jsa.detunings, &jsa.intensity()))
}

/// Energy spectrum S(ω) = ħω |a(Ω(ω))|² (cw reduction, ħ = 1 in relative
/// units). The idler abscissa is mapped through energy conservation and
/// re-ordered to be increasing.
pub fn energy_spectrum(jsa: &JsaSlice, which: SpectrumLabel) -> Spectrum {
    let intensity = jsa.intensity();
    match which {
        SpectrumLabel::Signal => {
            let abscissa: Vec<f64> = jsa
                .detunings
                .iter()
                .map(|om| jsa.meta.omega_s_center + om)
                .collect();
            let values = abscissa
                .iter()
                .zip(&intensity)
                .map(|(w, v)| w * v)
                .collect();
            Spectrum {
                abscissa,
                values,
                label: which,
            }
        }
        SpectrumLabel::Idler => {
            let mut abscissa: Vec<f64> = jsa
                .detunings
                .iter()
                .map(|om| jsa.meta.omega_i_center - om)
                .collect();
            abscissa.reverse();
            let mut values: Vec<f64> = intensity.clone();
            values.reverse();
            for (w, v) in abscissa.iter().zip(values.iter_mut()) {
                *v *= w;
            }
            Spectrum {
                abscissa,
                values,
                label: which,
            }
        }
    }
}

/// Moving average with a flat window of the given spectral width. Partial
/// windows at the edges are renormalized; for spectra that have decayed at the
/// grid edges the integral is preserved to better than 1e−9 relative.
pub fn smooth_spectrum(s: &Spectrum, window_width: f64) -> Result<Spectrum> {
    let n = s.abscissa.len();
    let spacing = if n > 1 {
        (s.abscissa[n - 1] - s.abscissa[0]) / (n as f64 - 1.0)
    } else {
        return Ok(s.clone());
    };
    if window_width < spacing * (1.0 - 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "window width {window_width} is below the grid spacing {spacing}"
        )));
    }
    let half = ((0.5 * window_width) / spacing + 1e-9).floor() as usize;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(n - 1);
        let sum: f64 = s.values[lo..=hi].iter().sum();
        out.push(sum / (hi - lo + 1) as f64);
    }
    Ok(Spectrum {
        abscissa: s.abscissa.clone(),
        values: out,
        label: s.label,
    })
}

/// Outermost crossings of `level`, scanning inward from both ends.
/// `above_at_extremum` selects whether the curve sits above the level around
/// its extremum (spectra) or below it (dips).
fn outermost_crossings(
    x: &[f64],
    y: &[f64],
    level: f64,
    above_at_extremum: bool,
) -> Result<(f64, f64)> {
    let crossed = |v: f64| {
        if above_at_extremum {
            v >= level
        } else {
            v <= level
        }
    };
    let n = x.len();
    let left = (0..n).find(|&i| crossed(y[i]));
    let right = (0..n).rev().find(|&i| crossed(y[i]));
    let (li, ri) = match (left, right) {
        (Some(l), Some(r)) if l > 0 && r < n - 1 => (l, r),
        _ => {
            return Err(Error::NoHalfCrossing {
                detail: "half-extremum level is not crossed inside the window; widen the span"
                    .to_string(),
            })
        }
    };
    let interp = |i0: usize, i1: usize| {
        let (y0, y1) = (y[i0], y[i1]);
        if y1 == y0 {
            x[i1]
        } else {
            x[i0] + (level - y0) / (y1 - y0) * (x[i1] - x[i0])
        }
    };
    Ok((interp(li - 1, li), interp(ri + 1, ri)))
}

/// Full width at half maximum of a spectrum, between the outermost crossings
/// of half the peak value (sidelobes below half maximum are ignored;
/// multi-lobe spectra measure the full envelope).
pub fn fwhm_spectrum(s: &Spectrum) -> Result<f64> {
    let peak = s.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(peak > 0.0) {
        return Err(Error::NoHalfCrossing {
            detail: "spectrum has no positive extremum".to_string(),
        });
    }
    let (l, r) = outermost_crossings(&s.abscissa, &s.values, 0.5 * peak, true)?;
    Ok(r - l)
}

/// Full width at half depth of a coincidence dip, between the outermost
/// crossings of the level halfway between the unit baseline and the minimum.
pub fn fwhm_dip(h: &HomProfile) -> Result<f64> {
    let min = h.rate.iter().cloned().fold(f64::INFINITY, f64::min);
    if min >= 1.0 {
        return Err(Error::NoHalfCrossing {
            detail: "profile has no dip below the baseline".to_string(),
        });
    }
    let level = 0.5 * (1.0 + min);
    let (l, r) = outermost_crossings(&h.delays, &h.rate, level, false)?;
    Ok(r - l)
}

/// Hong–Ou–Mandel profile of a cw slice:
/// ρ(τ) = (1/R₀) ∫ dΩ Re[a(Ω) a*(−Ω) e^{−2iΩτ}] with R₀ = ∫ dΩ |a|², and
/// R_n(τ) = 1 − ρ(τ). Requires the detuning grid to be symmetric about zero
/// (the con­struction of [`crate::biphoton::FrequencyGrid`] guarantees this).
/// Delays are evaluated in parallel; the Ω quadrature keeps a fixed order.
pub fn hom_dip(jsa: &JsaSlice, tau_grid: &[f64]) -> Result<HomProfile> {
    check_resolution(jsa)?;
    if tau_grid.is_empty() {
        return Err(Error::InvalidArgument("empty delay grid".into()));
    }
    let n = jsa.detunings.len();
    for j in 0..n / 2 {
        if (jsa.detunings[j] + jsa.detunings[n - 1 - j]).abs() > 1e-10 {
            return Err(Error::InvalidArgument(
                "HOM reduction needs a detuning grid symmetric about zero".into(),
            ));
        }
    }
    let spacing0 = (jsa.detunings[n - 1] - jsa.detunings[0]) / (n as f64 - 1.0);
    for w in jsa.detunings.windows(2) {
        if ((w[1] - w[0]) - spacing0).abs() > 1e-9 * spacing0.abs().max(1e-30) {
            return Err(Error::InvalidArgument(
                "HOM reduction needs a uniform detuning grid".into(),
            ));
        }
    }
    let r0 = trapezoid(&jsa.detunings, &jsa.intensity());
    if !(r0 > 0.0) {
        return Err(Error::InvalidArgument("slice carries no amplitude".into()));
    }
    // a(Ω) a*(−Ω) is τ-independent; precompute it once.
    let cross: Vec<num_complex::Complex64> = (0..n)
        .map(|j| jsa.amplitude[j] * jsa.amplitude[n - 1 - j].conj())
        .collect();
    let spacing = if n > 1 {
        (jsa.detunings[n - 1] - jsa.detunings[0]) / (n as f64 - 1.0)
    } else {
        0.0
    };
    let rate: Vec<f64> = tau_grid
        .par_iter()
        .map(|&tau| {
            // e^{−2iΩ_j τ} by rotation recurrence on the uniform grid; the
            // fixed left-to-right order keeps results thread-count
            // independent.
            let step = cis(-2.0 * spacing * tau);
            let mut phase = cis(-2.0 * jsa.detunings[0] * tau);
            let mut integrand = Vec::with_capacity(n);
            for c in &cross {
                integrand.push((c * phase).re);
                phase *= step;
            }
            1.0 - trapezoid(&jsa.detunings, &integrand) / r0
        })
        .collect();

    let (imin, &min) = rate
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let edge_deviation = (rate[0] - 1.0).abs().max((rate[rate.len() - 1] - 1.0).abs());
    Ok(HomProfile {
        delays: tau_grid.to_vec(),
        rate,
        baseline_r0: r0,
        dip_position: tau_grid[imin],
        visibility: (1.0 - min).clamp(0.0, 1.0),
        edge_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biphoton::{jsa_layer_sum, FrequencyGrid, Geometry, JsaSlice, SliceMeta};
    use crate::materials::MaterialModel;
    use crate::poling::{build_domains, design_basic_layer, PolingSpec};
    use crate::units::omega_from_lambda_um;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn synthetic_slice(
        detunings: Vec<f64>,
        amplitude: Vec<Complex64>,
        centers: (f64, f64),
    ) -> JsaSlice {
        JsaSlice {
            detunings,
            amplitude,
            meta: SliceMeta {
                material: "synthetic".into(),
                temperature_c: 25.0,
                geometry: Geometry::Collinear,
                omega_s_center: centers.0,
                omega_i_center: centers.1,
                n_layers: 0,
                total_length_um: 0.0,
            },
        }
    }

    fn gaussian_slice(n: usize, width: f64, span: f64) -> JsaSlice {
        let grid = FrequencyGrid::new(1000.0, 1000.0, span, n).unwrap();
        let det = grid.detunings();
        let amp = det
            .iter()
            .map(|om| Complex64::new((-om * om / (2.0 * width * width)).exp(), 0.0))
            .collect();
        synthetic_slice(det, amp, (1000.0, 1000.0))
    }

    #[test]
    fn zero_amplitude_gives_zero_rate() {
        let grid = FrequencyGrid::new(1000.0, 1000.0, 10.0, 33).unwrap();
        let det = grid.detunings();
        let amp = vec![Complex64::new(0.0, 0.0); det.len()];
        let s = synthetic_slice(det, amp, (1000.0, 1000.0));
        assert_eq!(pair_rate(&s).unwrap(), 0.0);
    }

    #[test]
    fn pair_rate_is_phase_invariant() {
        let s = gaussian_slice(401, 20.0, 100.0);
        let r = pair_rate(&s).unwrap();
        let mut t = s.clone();
        for (a, om) in t.amplitude.iter_mut().zip(&t.detunings) {
            *a *= crate::numerics::cis(0.3 * om + 0.01 * om * om);
        }
        assert_relative_eq!(pair_rate(&t).unwrap(), r, max_relative = 1e-12);
    }

    #[test]
    fn unresolved_peak_raises_grid_too_coarse() {
        // two points straddling a narrow peak
        let det = vec![-1.0, 0.0, 1.0];
        let amp = vec![
            Complex64::new(0.1, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.1, 0.0),
        ];
        let s = synthetic_slice(det, amp, (1000.0, 1000.0));
        assert!(matches!(
            pair_rate(&s),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn doubling_layers_doubles_the_rate_non_degenerate() {
        // GVM-dominated fixture: peak ×4, width ×½, integral ×2 (oracle:
        // brute-force integral of the closed-form profile at the two sizes).
        let m = MaterialModel::linbo3();
        let li = 1.0 / (1.0 / 0.7525 - 1.0 / 1.3921);
        let l0 = design_basic_layer(&m, 0.7525, 1.3921, li, 25.0).unwrap();
        let ws0 = omega_from_lambda_um(1.3921);
        let wi0 = omega_from_lambda_um(li);
        let grid = FrequencyGrid::new(ws0, wi0, 60.0, 2049).unwrap();
        let mut rates = Vec::new();
        for n in [500usize, 1000] {
            let d = build_domains(&PolingSpec::new(l0, 0.0, n).unwrap()).unwrap();
            let s = jsa_layer_sum(&d, &grid, Geometry::Collinear, &m, 25.0).unwrap();
            rates.push(pair_rate(&s).unwrap());
        }
        assert_relative_eq!(rates[1] / rates[0], 2.0, max_relative = 0.02);
    }

    #[test]
    fn idler_spectrum_mirrors_signal() {
        let s = gaussian_slice(201, 15.0, 60.0);
        let sig = energy_spectrum(&s, SpectrumLabel::Signal);
        let idl = energy_spectrum(&s, SpectrumLabel::Idler);
        assert!(idl.abscissa.windows(2).all(|w| w[1] > w[0]));
        // symmetric Gaussian: same total energy up to the ω weight symmetry
        let es = trapezoid(&sig.abscissa, &sig.values);
        let ei = trapezoid(&idl.abscissa, &idl.values);
        assert_relative_eq!(es, ei, max_relative = 1e-10);
    }

    #[test]
    fn smoothing_identity_and_constant() {
        let s = gaussian_slice(201, 15.0, 60.0);
        let spec = energy_spectrum(&s, SpectrumLabel::Signal);
        let spacing = spec.abscissa[1] - spec.abscissa[0];
        let same = smooth_spectrum(&spec, spacing).unwrap();
        for (a, b) in spec.values.iter().zip(&same.values) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
        let flat = Spectrum {
            abscissa: spec.abscissa.clone(),
            values: vec![3.5; spec.values.len()],
            label: SpectrumLabel::Signal,
        };
        let sm = smooth_spectrum(&flat, 10.0 * spacing).unwrap();
        for v in sm.values {
            assert_relative_eq!(v, 3.5, max_relative = 1e-14);
        }
    }

    #[test]
    fn smoothing_kills_matched_fringe() {
        // fringe of period p averaged with window = p: amplitude / (K+1)
        let n = 3001usize;
        let abscissa: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let k = 150usize;
        let values: Vec<f64> = abscissa
            .iter()
            .map(|x| 1.0 + (2.0 * std::f64::consts::PI * x / k as f64).sin())
            .collect();
        let s = Spectrum {
            abscissa,
            values,
            label: SpectrumLabel::Signal,
        };
        let sm = smooth_spectrum(&s, k as f64).unwrap();
        let residual = sm.values[500..2500]
            .iter()
            .map(|v| (v - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(residual < 1.0 / 100.0, "fringe residual {residual}");
    }

    #[test]
    fn smoothing_preserves_integral_of_decayed_spectrum() {
        let s = gaussian_slice(801, 10.0, 100.0);
        let spec = energy_spectrum(&s, SpectrumLabel::Signal);
        let before = trapezoid(&spec.abscissa, &spec.values);
        let sm = smooth_spectrum(&spec, 5.0).unwrap();
        let after = trapezoid(&sm.abscissa, &sm.values);
        assert_relative_eq!(before, after, max_relative = 1e-9);
    }

    #[test]
    fn fwhm_of_triangle() {
        let abscissa: Vec<f64> = (0..201).map(|i| -1.0 + i as f64 * 0.01).collect();
        let values: Vec<f64> = abscissa.iter().map(|x| (1.0 - x.abs()).max(0.0)).collect();
        let s = Spectrum {
            abscissa,
            values,
            label: SpectrumLabel::Signal,
        };
        // triangle of base 2w with w = 1: FWHM = w
        assert_relative_eq!(fwhm_spectrum(&s).unwrap(), 1.0, max_relative = 1e-10);
    }

    #[test]
    fn fwhm_matches_closed_form_root_finding() {
        // sinc²-shaped uniform spectrum vs bisection on the closed form
        let m = MaterialModel::linbo3();
        let li = 1.0 / (1.0 / 0.7525 - 1.0 / 1.3921);
        let l0 = design_basic_layer(&m, 0.7525, 1.3921, li, 25.0).unwrap();
        let ws0 = omega_from_lambda_um(1.3921);
        let wi0 = omega_from_lambda_um(li);
        let grid = FrequencyGrid::new(ws0, wi0, 60.0, 4097).unwrap();
        let d = build_domains(&PolingSpec::new(l0, 0.0, 1000).unwrap()).unwrap();
        let slice = jsa_layer_sum(&d, &grid, Geometry::Collinear, &m, 25.0).unwrap();
        let spec = energy_spectrum(&slice, SpectrumLabel::Signal);
        let measured = fwhm_spectrum(&spec).unwrap();

        // oracle: bisection for ω·|closed-form|² = half of its grid peak
        let profile = |om: f64| -> f64 {
            let a = crate::biphoton::jsa_closed_form_uniform(
                &m,
                25.0,
                ws0 + om,
                wi0 - om,
                l0,
                1000,
            )
            .unwrap();
            (ws0 + om) * a.norm_sqr()
        };
        let peak = profile(0.0);
        let half = 0.5 * peak;
        // outermost right crossing: march outward, then bisect
        let mut x = 0.0;
        while profile(x) > half && x < 60.0 {
            x += 0.05;
        }
        let (mut lo, mut hi) = (x - 0.05, x);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if profile(mid) > half {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let right = 0.5 * (lo + hi);
        // left crossing (the non-degenerate peak is slightly asymmetric)
        let mut x = 0.0;
        while profile(x) > half && x > -60.0 {
            x -= 0.05;
        }
        let (mut lo, mut hi) = (x, x + 0.05);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if profile(mid) < half {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let left = 0.5 * (lo + hi);
        let oracle = right - left;
        assert_relative_eq!(measured, oracle, max_relative = 0.02);
    }

    #[test]
    fn fwhm_needs_a_crossing() {
        let s = Spectrum {
            abscissa: vec![0.0, 1.0, 2.0],
            values: vec![0.9, 1.0, 0.9],
            label: SpectrumLabel::Signal,
        };
        assert!(matches!(
            fwhm_spectrum(&s),
            Err(Error::NoHalfCrossing { .. })
        ));
    }

    #[test]
    fn hom_dip_of_symmetric_real_slice_is_perfect() {
        let s = gaussian_slice(801, 25.0, 120.0);
        let taus: Vec<f64> = (0..801).map(|i| (i as f64 - 400.0) * 0.001).collect();
        let h = hom_dip(&s, &taus).unwrap();
        assert!(h.rate[400] <= 1e-12, "R_n(0) = {}", h.rate[400]);
        assert!((h.visibility - 1.0).abs() <= 1e-12);
        assert_eq!(h.dip_position, 0.0);
        assert!(h.edge_deviation < 1e-3);
        // parity: even integrand ⇒ R_n(τ) = R_n(−τ)
        for j in 0..h.rate.len() {
            let k = h.rate.len() - 1 - j;
            assert!((h.rate[j] - h.rate[k]).abs() < 1e-12);
        }
        // bounds
        for r in &h.rate {
            assert!(*r >= -1e-12 && *r <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn hom_bounds_hold_for_phase_distorted_slices() {
        let mut s = gaussian_slice(801, 25.0, 120.0);
        for (a, om) in s.amplitude.iter_mut().zip(&s.detunings) {
            *a *= crate::numerics::cis(0.02 * om * om + 1.3 * om);
        }
        let taus: Vec<f64> = (0..401).map(|i| -0.5 + i as f64 * 0.0025).collect();
        let h = hom_dip(&s, &taus).unwrap();
        for r in &h.rate {
            assert!(*r >= -1e-9 && *r <= 2.0 + 1e-9, "R_n out of bounds: {r}");
        }
        // quadratic spectral phase delays photons alike: dip shifts by the
        // linear-phase-induced group delay
        assert!(h.visibility <= 1.0);
    }
}
