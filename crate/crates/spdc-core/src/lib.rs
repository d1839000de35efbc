//! Simulation of entangled photon pairs from spontaneous parametric
//! down-conversion in uniformly and chirp-poled nonlinear crystals.
//!
//! The crate is organized along the physics pipeline:
//!
//! * [`materials`] — temperature-dependent Sellmeier dispersion and
//!   wave-vector helpers for uniaxial crystals (LiNbO₃, LiTaO₃);
//! * [`poling`] — quasi-phase-matching design and sign-domain structures for
//!   uniform and chirped poling;
//! * [`biphoton`] — two-photon spectral amplitudes: exact per-domain layer
//!   sums, the closed-form uniform-poling oracle, and quasi-cw 2D amplitudes;
//! * [`observables`] — pair rates, energy spectra, smoothing, widths, and
//!   Hong–Ou–Mandel coincidence profiles;
//! * [`schmidt`] — Schmidt decomposition, entanglement entropy, and
//!   cooperativity;
//! * [`angular`] — emission maps in the transverse plane, correlation areas,
//!   and temperature tuning;
//! * [`export`] — deterministic CSV/JSON serialization of the result types.
//!
//! Units: lengths in μm, angular frequencies in rad/ps, temperatures in °C
//! (see [`units`]). All reported rates are relative; the overall
//! dimensional prefactors are collapsed into one documented constant.

pub mod angular;
pub mod biphoton;
pub mod error;
pub mod export;
pub mod materials;
pub mod numerics;
pub mod observables;
pub mod poling;
pub mod schmidt;
pub mod units;

pub use error::{Error, Result};
