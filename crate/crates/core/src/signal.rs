//! Continuous-time band-limited test signals.
//!
//! A signal is a finite sum of shifted, modulated sinc atoms
//!
//! ```text
//! f(t) = sum_m A_m * exp(i w_m t) * sin(b_m (t - a_m)) / (pi (t - a_m))
//! ```
//!
//! whose Fourier transform `F(iw) = int exp(-iwt) f(t) dt` is the piecewise
//! constant sum of `A_m * exp(-i (w - w_m) a_m)` over `|w - w_m| <= b_m`.
//! Each atom's spectrum must fit inside `[-Omega, Omega]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::de_real;
use crate::window::SampleWindow;

/// Relative slack allowed on `|carrier| + bandwidth <= band_limit`.
const BAND_SLACK: f64 = 1e-12;

/// One modulated sinc atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub amplitude: Complex64,
    /// Centre `a_m` in seconds.
    pub shift: f64,
    /// Modulation frequency `w_m` in rad/s.
    pub carrier: f64,
    /// Half-width `b_m` of the atom's spectrum in rad/s.
    pub bandwidth: f64,
}

impl Atom {
    pub fn new(amplitude: Complex64, shift: f64, carrier: f64, bandwidth: f64) -> Self {
        Self {
            amplitude,
            shift,
            carrier,
            bandwidth,
        }
    }

    /// Unmodulated sinc atom with real amplitude.
    pub fn sinc(amplitude: f64, shift: f64, bandwidth: f64) -> Self {
        Self::new(Complex64::new(amplitude, 0.0), shift, 0.0, bandwidth)
    }

    pub fn evaluate(&self, t: f64) -> Complex64 {
        let u = t - self.shift;
        let carrier = Complex64::from_polar(1.0, self.carrier * t);
        let envelope = if u.abs() < 1e-9 * self.shift.abs().max(1.0) {
            self.bandwidth / PI
        } else {
            (self.bandwidth * u).sin() / (PI * u)
        };
        self.amplitude * carrier * envelope
    }

    pub fn fourier(&self, omega: f64) -> Complex64 {
        let offset = omega - self.carrier;
        if offset.abs() <= self.bandwidth {
            self.amplitude * Complex64::from_polar(1.0, -offset * self.shift)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct AtomRecord {
    #[serde(deserialize_with = "de_real")]
    re: f64,
    #[serde(deserialize_with = "de_real")]
    im: f64,
    #[serde(deserialize_with = "de_real")]
    shift: f64,
    #[serde(deserialize_with = "de_real")]
    carrier: f64,
    #[serde(deserialize_with = "de_real")]
    bandwidth: f64,
}

/// Unvalidated signal description, exactly as it appears in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    #[serde(deserialize_with = "de_real")]
    pub band_limit: f64,
    #[serde(default)]
    atoms: Vec<AtomRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest_hash: Option<String>,
}

/// A validated band-limited signal.
#[derive(Debug, Clone, PartialEq)]
pub struct BandLimitedSignal {
    band_limit: f64,
    atoms: Vec<Atom>,
}

impl BandLimitedSignal {
    pub fn new(band_limit: f64, atoms: Vec<Atom>) -> Result<Self> {
        if !(band_limit.is_finite() && band_limit > 0.0) {
            return Err(Error::InvalidSignal(format!(
                "band_limit must be positive and finite, got {band_limit}"
            )));
        }
        for (index, atom) in atoms.iter().enumerate() {
            let finite = atom.amplitude.re.is_finite()
                && atom.amplitude.im.is_finite()
                && atom.shift.is_finite()
                && atom.carrier.is_finite();
            if !finite {
                return Err(Error::InvalidSignal(format!(
                    "atom {index} has non-finite parameters"
                )));
            }
            if !(atom.bandwidth > 0.0 && atom.bandwidth <= band_limit * (1.0 + BAND_SLACK)) {
                return Err(Error::InvalidSignal(format!(
                    "atom {index}: bandwidth must satisfy 0 < bandwidth <= band_limit = {band_limit}, got {}",
                    atom.bandwidth
                )));
            }
            let lhs = atom.carrier.abs() + atom.bandwidth;
            if lhs > band_limit * (1.0 + BAND_SLACK) {
                return Err(Error::OutOfBand {
                    index,
                    lhs,
                    band_limit,
                });
            }
        }
        Ok(Self { band_limit, atoms })
    }

    /// The zero signal.
    pub fn zero(band_limit: f64) -> Result<Self> {
        Self::new(band_limit, Vec::new())
    }

    /// Real-valued signal built from conjugate-symmetric atom pairs.
    ///
    /// Each `(amplitude, shift, carrier, bandwidth)` tuple contributes
    /// `2 Re(amplitude * exp(i carrier t)) * sin(bandwidth (t - shift)) / (pi (t - shift))`.
    /// A zero carrier yields a single real atom with amplitude `2 Re(amplitude)`.
    pub fn real(band_limit: f64, pairs: &[(Complex64, f64, f64, f64)]) -> Result<Self> {
        let mut atoms = Vec::with_capacity(pairs.len() * 2);
        for &(amplitude, shift, carrier, bandwidth) in pairs {
            if carrier == 0.0 {
                atoms.push(Atom::new(
                    Complex64::new(2.0 * amplitude.re, 0.0),
                    shift,
                    0.0,
                    bandwidth,
                ));
            } else {
                atoms.push(Atom::new(amplitude, shift, carrier, bandwidth));
                atoms.push(Atom::new(amplitude.conj(), shift, -carrier, bandwidth));
            }
        }
        Self::new(band_limit, atoms)
    }

    pub fn band_limit(&self) -> f64 {
        self.band_limit
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn evaluate(&self, t: f64) -> Complex64 {
        self.atoms.iter().map(|a| a.evaluate(t)).sum()
    }

    /// Closed-form Fourier transform; exactly zero outside `[-Omega, Omega]`.
    pub fn fourier(&self, omega: f64) -> Complex64 {
        if omega.abs() > self.band_limit {
            return Complex64::new(0.0, 0.0);
        }
        self.atoms.iter().map(|a| a.fourier(omega)).sum()
    }

    /// `||f||^2 = (1/2pi) int |F(iw)|^2 dw`, computed exactly from the
    /// piecewise-constant spectrum.
    pub fn energy(&self) -> f64 {
        // Breakpoints of the piecewise-constant spectrum.
        let mut edges: Vec<f64> = self
            .atoms
            .iter()
            .flat_map(|a| [a.carrier - a.bandwidth, a.carrier + a.bandwidth])
            .collect();
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let mut total = 0.0;
        for pair in edges.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            if hi <= lo {
                continue;
            }
            // |F|^2 is a trigonometric polynomial on each piece; integrate by
            // expanding the cross terms analytically.
            let active: Vec<&Atom> = self
                .atoms
                .iter()
                .filter(|a| a.carrier - a.bandwidth <= lo && hi <= a.carrier + a.bandwidth)
                .collect();
            for p in &active {
                for q in &active {
                    // A_p conj(A_q) exp(-i(w - w_p) a_p + i(w - w_q) a_q)
                    let slope = q.shift - p.shift;
                    let phase0 = p.carrier * p.shift - q.carrier * q.shift;
                    let coeff = p.amplitude * q.amplitude.conj();
                    let integral = if slope.abs() < 1e-15 {
                        Complex64::from_polar(hi - lo, phase0)
                    } else {
                        let i = Complex64::new(0.0, 1.0);
                        (Complex64::from_polar(1.0, phase0 + slope * hi)
                            - Complex64::from_polar(1.0, phase0 + slope * lo))
                            / (i * slope)
                    };
                    total += (coeff * integral).re;
                }
            }
        }
        total / (2.0 * PI)
    }

    /// Largest `|f(t)|` over a set of sample times.
    pub fn peak_on(&self, times: impl IntoIterator<Item = f64>) -> f64 {
        times
            .into_iter()
            .map(|t| self.evaluate(t).norm())
            .fold(0.0, f64::max)
    }

    /// Samples `f(t_k)` for `k` in `[k_min, k_max]`, all marked known.
    pub fn sample(&self, grid: &SamplingGrid, k_min: i64, k_max: i64) -> Result<SampleWindow> {
        if k_min > k_max {
            return Err(Error::InvalidArgument(format!(
                "k_min ({k_min}) must not exceed k_max ({k_max})"
            )));
        }
        let values = (k_min..=k_max).map(|k| self.evaluate(grid.point(k))).collect();
        let mut window = SampleWindow::from_values(k_min, values)?;
        window.set_grid(grid.step, grid.origin);
        Ok(window)
    }

    pub fn to_spec(&self) -> SignalSpec {
        SignalSpec {
            schema_version: Some(1),
            band_limit: self.band_limit,
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomRecord {
                    re: a.amplitude.re,
                    im: a.amplitude.im,
                    shift: a.shift,
                    carrier: a.carrier,
                    bandwidth: a.bandwidth,
                })
                .collect(),
            manifest_hash: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_spec())?)
    }

    /// Parses and validates. Malformed JSON surfaces as [`Error::Json`],
    /// band violations as [`Error::OutOfBand`] / [`Error::InvalidSignal`].
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SignalSpec = serde_json::from_str(text)?;
        Self::try_from(spec)
    }
}

impl TryFrom<SignalSpec> for BandLimitedSignal {
    type Error = Error;

    fn try_from(spec: SignalSpec) -> Result<Self> {
        let atoms = spec
            .atoms
            .iter()
            .map(|r| Atom::new(Complex64::new(r.re, r.im), r.shift, r.carrier, r.bandwidth))
            .collect();
        Self::new(spec.band_limit, atoms)
    }
}

/// Equidistant grid `t_k = origin + k * step` with a cutoff index `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingGrid {
    pub step: f64,
    pub origin: f64,
    pub cutoff: i64,
}

impl SamplingGrid {
    pub fn new(step: f64, origin: f64, cutoff: i64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sampling step must be positive, got {step}"
            )));
        }
        if !origin.is_finite() {
            return Err(Error::InvalidArgument("grid origin must be finite".into()));
        }
        Ok(Self {
            step,
            origin,
            cutoff,
        })
    }

    pub fn point(&self, k: i64) -> f64 {
        self.origin + k as f64 * self.step
    }

    /// Discrete band fraction `W = tau * Omega`.
    pub fn band_fraction(&self, band_limit: f64) -> f64 {
        self.step * band_limit
    }

    /// `tau < pi / Omega`.
    pub fn oversamples(&self, band_limit: f64) -> bool {
        self.band_fraction(band_limit) < PI
    }
}
