//! Continuous-time side of the pipeline: the map between a window's
//! discrete spectrum and the continuous spectrum, and Whittaker-Shannon
//! synthesis from a two-sided window.
//!
//! Sampling `f` at `t_k = k tau` gives `x(k) = (1/2pi) int G(e^{i nu}) e^{i nu k} d nu`
//! with `nu = w tau` and `G(e^{i nu}) = F(i nu / tau) / tau`; hence
//! `F(iw) = tau G(e^{i w tau})` on `|w| <= Omega`. `G` is the (non-unitary)
//! Z-transform, so a unitary bin converts as `G(e^{i nu_j}) = sqrt(N) X_j`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectrum::{DiscreteSpectrum, Transform};
use crate::window::SampleWindow;

pub const DEFAULT_REFINEMENT: usize = 4;

/// `nu = w tau` correspondence for a grid step and band limit with
/// `tau * Omega < pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumMap {
    step: f64,
    band_limit: f64,
}

impl SpectrumMap {
    pub fn new(step: f64, band_limit: f64) -> Result<Self> {
        if !(step > 0.0 && band_limit > 0.0 && step * band_limit < PI) {
            return Err(Error::InvalidArgument(format!(
                "spectrum map needs tau > 0, Omega > 0 and tau*Omega < pi (got tau={step}, Omega={band_limit})"
            )));
        }
        Ok(Self { step, band_limit })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn band_limit(&self) -> f64 {
        self.band_limit
    }

    pub fn band_fraction(&self) -> f64 {
        self.step * self.band_limit
    }

    /// Continuous spectrum estimate backed by a zero-padded transform of
    /// `refinement * N` points.
    pub fn continuous(&self, spectrum: &DiscreteSpectrum, refinement: usize) -> Result<ContinuousSpectrum> {
        if spectrum.band_fraction() + 1e-12 < self.band_fraction() {
            return Err(Error::InvalidArgument(format!(
                "spectrum band fraction {} is narrower than tau*Omega = {}",
                spectrum.band_fraction(),
                self.band_fraction()
            )));
        }
        if refinement == 0 {
            return Err(Error::InvalidArgument("refinement factor must be at least 1".into()));
        }
        let n = spectrum.len();
        let mut samples = spectrum.bins().to_vec();
        Transform::new(n)?.inverse_inplace(&mut samples);

        let m = n * refinement;
        let origin = spectrum.index_origin();
        let mut refined = vec![Complex64::new(0.0, 0.0); m];
        for (p, v) in refined[..n].iter_mut().enumerate() {
            *v = samples[(origin + p as i64).rem_euclid(n as i64) as usize];
        }
        let mut planner = rustfft::FftPlanner::new();
        planner.plan_fft_forward(m).process(&mut refined);
        // Position p holds x(origin + p); restore the phase of the true
        // indices.
        for (i, v) in refined.iter_mut().enumerate() {
            let r = ((i as i128 * origin as i128).rem_euclid(m as i128)) as f64;
            *v *= Complex64::from_polar(1.0, -2.0 * PI * r / m as f64);
        }
        Ok(ContinuousSpectrum {
            map: *self,
            coarse: spectrum.bins().to_vec(),
            refined,
            refinement,
        })
    }
}

/// Evaluates `F(iw) ~ tau * G(e^{i w tau})` for a fixed window spectrum.
#[derive(Debug, Clone)]
pub struct ContinuousSpectrum {
    map: SpectrumMap,
    coarse: Vec<Complex64>,
    /// Non-unitary Z-transform on the refined grid `2 pi m / (r N)`.
    refined: Vec<Complex64>,
    refinement: usize,
}

impl ContinuousSpectrum {
    /// Zero for `|w| > Omega`. At bin frequencies the value is exactly
    /// `tau * sqrt(N) * X_j`; elsewhere the nearest refined bin is used.
    pub fn at(&self, omega: f64) -> Complex64 {
        if omega.abs() > self.map.band_limit {
            return Complex64::new(0.0, 0.0);
        }
        let n = self.coarse.len();
        let m = self.refined.len();
        let nu = omega * self.map.step;
        let position = nu * m as f64 / (2.0 * PI);
        let nearest = position.round();
        let idx = (nearest as i64).rem_euclid(m as i64) as usize;
        let tau = self.map.step;
        if idx % self.refinement == 0 && (position - nearest).abs() < 1e-9 {
            tau * (n as f64).sqrt() * self.coarse[idx / self.refinement]
        } else {
            tau * self.refined[idx]
        }
    }
}

/// Single-point form of [`SpectrumMap::continuous`] with the default refinement.
pub fn discrete_to_continuous_spectrum(
    spectrum: &DiscreteSpectrum,
    map: &SpectrumMap,
    omega: f64,
) -> Result<Complex64> {
    Ok(map.continuous(spectrum, DEFAULT_REFINEMENT)?.at(omega))
}

/// Normalised sinc `sin(pi u) / (pi u)`.
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-9 {
        1.0
    } else {
        (PI * u).sin() / (PI * u)
    }
}

/// Weighting of the truncated synthesis series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Taper {
    /// Plain truncation of the series.
    #[default]
    None,
    /// Hann taper over the window. Not part of the classical series; the
    /// result is no longer exact at grid points near the window edges.
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SincEstimate {
    pub value: Complex64,
    /// `sqrt(sum_{k outside window} sinc^2((t - t_k)/tau))`. The truncation
    /// error is at most this times the square root of the tail energy
    /// `sum_{k outside window} |x(k)|^2`.
    pub tail_kernel_norm: f64,
}

impl SincEstimate {
    pub fn error_bound(&self, tail_energy: f64) -> f64 {
        self.tail_kernel_norm * tail_energy.max(0.0).sqrt()
    }
}

/// Whittaker-Shannon synthesis `sum_k x(k) sinc((t - t_k) / tau)` over the
/// window, with `t_k = origin + k tau`.
pub fn sinc_reconstruct(window: &SampleWindow, step: f64, origin: f64, t: f64) -> Result<Complex64> {
    Ok(sinc_reconstruct_with(window, step, origin, t, Taper::None)?.value)
}

pub fn sinc_reconstruct_with(
    window: &SampleWindow,
    step: f64,
    origin: f64,
    t: f64,
    taper: Taper,
) -> Result<SincEstimate> {
    let unknown = window.unknown_count();
    if unknown > 0 {
        return Err(Error::UnknownSamples(unknown));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let u0 = (t - origin) / step;
    let len = window.len();
    let mut value = Complex64::new(0.0, 0.0);
    let mut kernel_sq = 0.0;
    for (i, (k, x)) in window.iter().enumerate() {
        let s = sinc(u0 - k as f64);
        kernel_sq += s * s;
        let weight = match taper {
            Taper::None => 1.0,
            Taper::Hann if len > 1 => {
                0.5 - 0.5 * (2.0 * PI * (i as f64 + 0.5) / len as f64).cos()
            }
            Taper::Hann => 1.0,
        };
        value += x * (s * weight);
    }
    Ok(SincEstimate {
        value,
        tail_kernel_norm: (1.0 - kernel_sq).max(0.0).sqrt(),
    })
}
