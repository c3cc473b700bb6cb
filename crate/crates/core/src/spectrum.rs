//! Length-N discrete spectra of finite windows and the band-limiting
//! projection.
//!
//! Conventions used throughout the crate:
//!
//! * unitary transform, `X_j = N^{-1/2} sum_k x(k) exp(-i nu_j k)` and
//!   `x(k) = N^{-1/2} sum_j X_j exp(i nu_j k)`, so Parseval is exact;
//! * a window is embedded at its native indices modulo `N`;
//! * bin `j` represents `nu_j = 2 pi j / N` for `j <= N/2` and
//!   `2 pi (j - N) / N` otherwise;
//! * the band edge is inclusive: bins with `|nu_j| <= W` are kept.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::window::SampleWindow;

/// Absolute slack (radians) when comparing a bin frequency with the band edge.
const EDGE_SLACK: f64 = 1e-12;

/// Frequency `nu_j` of bin `j` in `(-pi, pi]`.
pub fn bin_frequency(j: usize, n: usize) -> f64 {
    if j <= n / 2 {
        2.0 * PI * j as f64 / n as f64
    } else {
        2.0 * PI * (j as f64 - n as f64) / n as f64
    }
}

pub fn bin_in_band(j: usize, n: usize, band: f64) -> bool {
    bin_frequency(j, n).abs() <= band + EDGE_SLACK
}

/// Bins kept by the projection onto band `W`, in ascending `j`.
pub fn in_band_bins(n: usize, band: f64) -> Vec<usize> {
    (0..n).filter(|&j| bin_in_band(j, n, band)).collect()
}

pub(crate) fn check_band(band: f64) -> Result<()> {
    if band > 0.0 && band <= PI {
        Ok(())
    } else {
        Err(Error::InvalidBand(band))
    }
}

fn check_size(n: usize, len: usize) -> Result<()> {
    if n >= 2 && n % 2 == 0 && n >= len {
        Ok(())
    } else {
        Err(Error::TransformSize { n, len })
    }
}

/// Spectrum `X(e^{i nu_j})` sampled on `N` bins.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSpectrum {
    bins: Vec<Complex64>,
    band_fraction: f64,
    /// Index of the sample stored at position 0 of the periodic buffer's
    /// representative range `[index_origin, index_origin + N)`.
    index_origin: i64,
}

impl DiscreteSpectrum {
    pub fn new(bins: Vec<Complex64>, band_fraction: f64, index_origin: i64) -> Result<Self> {
        check_size(bins.len(), 0)?;
        check_band(band_fraction)?;
        Ok(Self {
            bins,
            band_fraction,
            index_origin,
        })
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn band_fraction(&self) -> f64 {
        self.band_fraction
    }

    pub fn index_origin(&self) -> i64 {
        self.index_origin
    }

    pub fn frequency(&self, j: usize) -> f64 {
        bin_frequency(j, self.len())
    }

    /// Declares the spectrum's band fraction without touching the bins.
    pub fn with_band_fraction(mut self, band: f64) -> Result<Self> {
        check_band(band)?;
        self.band_fraction = band;
        Ok(self)
    }

    /// Membership in the band-`W` space: every out-of-band bin is exactly zero.
    pub fn is_band_limited(&self) -> bool {
        let n = self.len();
        self.bins
            .iter()
            .enumerate()
            .all(|(j, b)| bin_in_band(j, n, self.band_fraction) || *b == Complex64::new(0.0, 0.0))
    }

    pub fn energy(&self) -> f64 {
        self.bins.iter().map(|b| b.norm_sqr()).sum()
    }
}

/// Planned forward/inverse transforms of one size. Not shared across threads
/// by the free functions below; solvers build one per call.
pub struct Transform {
    n: usize,
    scale: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Transform {
    pub fn new(n: usize) -> Result<Self> {
        check_size(n, 0)?;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Ok(Self {
            n,
            scale: 1.0 / (n as f64).sqrt(),
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn forward_inplace(&mut self, buf: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, &mut self.scratch);
        buf.iter_mut().for_each(|v| *v *= self.scale);
    }

    pub fn inverse_inplace(&mut self, buf: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, &mut self.scratch);
        buf.iter_mut().for_each(|v| *v *= self.scale);
    }

    /// Orthogonal projection of a length-N periodic buffer onto band `W`.
    pub fn project_inplace(&mut self, buf: &mut [Complex64], band: f64) {
        self.forward_inplace(buf);
        for (j, v) in buf.iter_mut().enumerate() {
            if !bin_in_band(j, self.n, band) {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        self.inverse_inplace(buf);
    }
}

fn position(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Length-N unitary transform of `window`, embedded at its native indices
/// modulo `N`. The result carries band fraction `pi`.
pub fn z_forward(window: &SampleWindow, n: usize) -> Result<DiscreteSpectrum> {
    check_size(n, window.len())?;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (k, v) in window.iter() {
        buf[position(k, n)] = v;
    }
    Transform::new(n)?.forward_inplace(&mut buf);
    Ok(DiscreteSpectrum {
        bins: buf,
        band_fraction: PI,
        index_origin: window.k_min(),
    })
}

/// Inverse of [`z_forward`], read back on `[k_min, k_max]` (all known).
pub fn z_inverse(spectrum: &DiscreteSpectrum, k_min: i64, k_max: i64) -> Result<SampleWindow> {
    let n = spectrum.len();
    if k_max < k_min || (k_max - k_min) as u64 >= n as u64 {
        return Err(Error::InvalidArgument(format!(
            "index range [{k_min}, {k_max}] must be non-empty and narrower than N = {n}"
        )));
    }
    let mut buf = spectrum.bins.clone();
    Transform::new(n)?.inverse_inplace(&mut buf);
    let values = (k_min..=k_max).map(|k| buf[position(k, n)]).collect();
    SampleWindow::from_values(k_min, values)
}

/// Zeroes every bin outside `|nu| <= W` and transforms back onto the
/// window's index range. The mask and grid of `window` are preserved.
///
/// With `N` equal to the window length this is the orthogonal projection
/// onto band-limited N-periodic sequences. With `N` larger it is that
/// projection applied to the zero-padded window and then restricted.
pub fn bandlimit_project(window: &SampleWindow, band: f64, n: usize) -> Result<SampleWindow> {
    check_band(band)?;
    let mut spectrum = z_forward(window, n)?;
    for (j, v) in spectrum.bins.iter_mut().enumerate() {
        if !bin_in_band(j, n, band) {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    let projected = z_inverse(&spectrum, window.k_min(), window.k_max())?;
    let mut out = window.clone();
    out.values_mut().copy_from_slice(projected.values());
    Ok(out)
}

/// Fraction of spectral energy in `|nu| <= W`.
pub fn band_energy_ratio(window: &SampleWindow, band: f64, n: usize) -> Result<f64> {
    check_band(band)?;
    let spectrum = z_forward(window, n)?;
    let total = spectrum.energy();
    if total == 0.0 {
        return Err(Error::ZeroWindow);
    }
    let inside: f64 = spectrum
        .bins
        .iter()
        .enumerate()
        .filter(|(j, _)| bin_in_band(*j, n, band))
        .map(|(_, b)| b.norm_sqr())
        .sum();
    Ok((inside / total).clamp(0.0, 1.0))
}
