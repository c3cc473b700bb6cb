//! Recovery of band-limited signals from one-sided halves of oversampled,
//! equidistant sample series.
//!
//! The pipeline runs continuous signal → samples on a grid `t_k = t_0 + k tau`
//! with `tau < pi / Omega` → a discrete sequence band-limited to
//! `|nu| <= W = tau Omega` → recovery of the unknown samples (a one-sided
//! future, or finite interior gaps) → Whittaker-Shannon synthesis.

pub mod error;
pub mod experiments;
pub mod numeric;
pub mod reconstruct;
pub mod recovery;
pub mod signal;
pub mod spectrum;
pub mod window;

#[doc(hidden)]
pub mod cli;

pub use error::{Error, Result};
pub use reconstruct::{discrete_to_continuous_spectrum, sinc, sinc_reconstruct, SpectrumMap, Taper};
pub use recovery::{
    gap_recover, pg_extrapolate, tsvd_extrapolate, uniqueness_certificate, Certificate, Method,
    PgParams, RecoveryProblem, RecoveryReport,
};
pub use signal::{Atom, BandLimitedSignal, SamplingGrid};
pub use spectrum::{band_energy_ratio, bandlimit_project, z_forward, z_inverse, DiscreteSpectrum};
pub use window::SampleWindow;

pub use num_complex::Complex64;

/// Tool version recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
