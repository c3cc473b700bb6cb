//! Scripted studies: certificate sweep toward critical sampling, the
//! even-decimation aliasing pair, sampling-time jitter, and PG/TSVD
//! convergence and conditioning.
//!
//! Every study is deterministic for a fixed configuration and seed. Trials
//! draw from independent ChaCha8 streams keyed by `(seed, trial)` and may run
//! in parallel; tables are assembled in trial order.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{de_real, de_real_vec};
use crate::recovery::{
    pg_extrapolate, tsvd_extrapolate, uniqueness_certificate, Certificate, PgParams,
    RecoveryProblem, DEFAULT_MAX_ITER, DEFAULT_SV_CUTOFF, DEFAULT_TOL,
};
use crate::signal::{Atom, BandLimitedSignal, SamplingGrid, SignalSpec};
use crate::window::SampleWindow;

pub const SCHEMA_VERSION: u32 = 1;

/// Name of the jitter model, written into jitter tables.
pub const JITTER_MODEL: &str = "uniform[-sigma,sigma] iid per sample";

// ── tables ───────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
}

impl Cell {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Cell::Int(v) => v as f64,
            Cell::Real(v) => v,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Real(v) if v.is_nan() => f.write_str("nan"),
            Cell::Real(v) if v.is_infinite() => f.write_str(if *v > 0.0 { "inf" } else { "-inf" }),
            Cell::Real(v) => write!(f, "{v:e}"),
        }
    }
}

/// A plot-ready table with a `# key=value` metadata block.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl fmt::Display) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx].as_f64()).collect())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for (key, value) in &self.metadata {
            writeln!(out, "# {key}={value}")?;
        }
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::to_string).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("table output is ASCII")
    }
}

// ── fixtures ─────────────────────────────────────────────────────────

/// Random sum of modulated sinc atoms whose spectrum lies inside
/// `[-support * Omega, support * Omega]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixtureSpec {
    #[serde(default = "default_atoms")]
    pub atoms: usize,
    /// Spectral support as a fraction of the band limit.
    #[serde(default = "default_support")]
    pub support: f64,
    /// Range of atom centres in seconds.
    #[serde(default = "default_shift_range")]
    pub shift_range: (f64, f64),
}

fn default_atoms() -> usize {
    3
}
fn default_support() -> f64 {
    0.75
}
fn default_shift_range() -> (f64, f64) {
    (-20.0, 5.0)
}

impl Default for FixtureSpec {
    fn default() -> Self {
        Self {
            atoms: default_atoms(),
            support: default_support(),
            shift_range: default_shift_range(),
        }
    }
}

impl FixtureSpec {
    pub fn generate(&self, band_limit: f64, seed: u64) -> Result<BandLimitedSignal> {
        if !(self.support > 0.0 && self.support <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "fixture support must lie in (0, 1], got {}",
                self.support
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reach = self.support * band_limit;
        let (lo, hi) = self.shift_range;
        let atoms = (0..self.atoms)
            .map(|_| {
                let bandwidth = rng.random_range(0.3..0.9) * reach;
                let carrier = rng.random_range(-1.0..1.0) * (reach - bandwidth);
                let amplitude = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let shift = if hi > lo { rng.random_range(lo..hi) } else { lo };
                Atom::new(amplitude, shift, carrier, bandwidth)
            })
            .collect();
        BandLimitedSignal::new(band_limit, atoms)
    }
}

/// Window `[-(known - 1), n - known]` sampled on `t_k = k tau`, with
/// `k <= 0` known.
pub fn onesided_window(
    signal: &BandLimitedSignal,
    step: f64,
    n: usize,
    known: usize,
) -> Result<(SampleWindow, SampleWindow)> {
    if known == 0 || known > n {
        return Err(Error::InvalidArgument(format!(
            "known count {known} must lie in [1, {n}]"
        )));
    }
    let grid = SamplingGrid::new(step, 0.0, 0)?;
    let k_min = -(known as i64 - 1);
    let truth = signal.sample(&grid, k_min, k_min + n as i64 - 1)?;
    let mut window = truth.clone();
    window.mark_onesided(0);
    Ok((window, truth))
}

fn known_count(n: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "known fraction must lie in (0, 1], got {fraction}"
        )));
    }
    Ok(((fraction * n as f64).round() as usize).clamp(1, n))
}

// ── configuration ────────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    #[serde(flatten)]
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Output table file name, relative to the output directory.
    pub output: String,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}
fn default_trials() -> usize {
    1
}
fn default_half() -> f64 {
    0.5
}
fn default_step() -> f64 {
    1.0
}
fn default_n() -> usize {
    256
}
fn default_horizon() -> usize {
    4
}
fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_cutoff() -> f64 {
    DEFAULT_SV_CUTOFF
}
fn default_dense() -> usize {
    16
}
fn default_span() -> i64 {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentKind {
    CertificateSweep {
        transform_size: usize,
        #[serde(deserialize_with = "de_real_vec")]
        bands: Vec<f64>,
        #[serde(default = "default_half")]
        known_fraction: f64,
    },
    AliasingDemo {
        #[serde(deserialize_with = "de_real")]
        step: f64,
        #[serde(deserialize_with = "de_real")]
        band_limit: f64,
        #[serde(deserialize_with = "de_real")]
        carrier: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        envelope: Option<f64>,
        /// Dense-grid points per sampling step.
        #[serde(default = "default_dense")]
        oversample: usize,
        /// Even-grid half-span in samples.
        #[serde(default = "default_span")]
        span: i64,
        /// Transform size of the even-mask certificate.
        #[serde(default = "default_n_small")]
        transform_size: usize,
    },
    Jitter {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        signal: Option<SignalSpec>,
        #[serde(default)]
        fixture: FixtureSpec,
        #[serde(default = "default_step", deserialize_with = "de_real")]
        step: f64,
        /// Band limit used when no explicit signal is given.
        #[serde(default = "default_jitter_band", deserialize_with = "de_real")]
        band_limit: f64,
        #[serde(default = "default_n")]
        transform_size: usize,
        #[serde(default = "default_half")]
        known_fraction: f64,
        /// Jitter half-widths in seconds.
        #[serde(deserialize_with = "de_real_vec")]
        sigmas: Vec<f64>,
        #[serde(default = "default_cutoff")]
        sv_cutoff: f64,
        #[serde(default = "default_horizon")]
        horizon: usize,
    },
    Convergence {
        #[serde(default = "default_n")]
        transform_size: usize,
        #[serde(deserialize_with = "de_real_vec")]
        bands: Vec<f64>,
        known_fractions: Vec<f64>,
        #[serde(default)]
        fixture: FixtureSpec,
        #[serde(default = "default_max_iter")]
        max_iter: usize,
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(default = "default_cutoff")]
        sv_cutoff: f64,
    },
}

fn default_n_small() -> usize {
    64
}
fn default_jitter_band() -> f64 {
    0.4 * PI
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::CertificateSweep { .. } => "certificate_sweep",
            ExperimentKind::AliasingDemo { .. } => "aliasing_demo",
            ExperimentKind::Jitter { .. } => "jitter",
            ExperimentKind::Convergence { .. } => "convergence",
        }
    }
}

fn check_bands(bands: &[f64]) -> Result<()> {
    if bands.is_empty() {
        return Err(Error::InvalidArgument("band list must not be empty".into()));
    }
    for &w in bands {
        if !(w > 0.0 && w <= PI) {
            return Err(Error::InvalidBand(w));
        }
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.output.trim().is_empty() {
            return Err(Error::InvalidArgument("output file name is empty".into()));
        }
        match &self.kind {
            ExperimentKind::CertificateSweep { bands, .. } => check_bands(bands),
            ExperimentKind::Convergence { bands, .. } => check_bands(bands),
            ExperimentKind::Jitter { sigmas, .. } => {
                if sigmas.is_empty() || sigmas.iter().any(|s| !(*s >= 0.0)) {
                    return Err(Error::InvalidArgument(
                        "jitter sigmas must be a non-empty list of values >= 0".into(),
                    ));
                }
                Ok(())
            }
            ExperimentKind::AliasingDemo { .. } => Ok(()),
        }
    }

    /// SHA-256 of the canonical (key-sorted) JSON of this configuration.
    pub fn hash(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        Ok(sha256_hex(serde_json::to_string(&value)?.as_bytes()))
    }

    pub fn run(&self) -> Result<Table> {
        self.validate()?;
        let mut table = match &self.kind {
            ExperimentKind::CertificateSweep {
                transform_size,
                bands,
                known_fraction,
            } => certificate_sweep(*transform_size, bands, *known_fraction)?,
            ExperimentKind::AliasingDemo {
                step,
                band_limit,
                carrier,
                envelope,
                oversample,
                span,
                transform_size,
            } => {
                let demo = aliasing_demo(&AliasingParams {
                    step: *step,
                    band_limit: *band_limit,
                    carrier: *carrier,
                    envelope: *envelope,
                    oversample: *oversample,
                    span: *span,
                })?;
                demo.table(*transform_size)?
            }
            ExperimentKind::Jitter {
                signal,
                fixture,
                step,
                band_limit,
                transform_size,
                known_fraction,
                sigmas,
                sv_cutoff,
                horizon,
            } => {
                let signal = match signal {
                    Some(spec) => BandLimitedSignal::try_from(spec.clone())?,
                    None => fixture.generate(*band_limit, self.seed)?,
                };
                let study = JitterStudy {
                    step: *step,
                    transform_size: *transform_size,
                    known: known_count(*transform_size, *known_fraction)?,
                    sv_cutoff: *sv_cutoff,
                    horizon: *horizon,
                    trials: self.trials,
                    seed: self.seed,
                };
                study.run(&signal, sigmas)?
            }
            ExperimentKind::Convergence {
                transform_size,
                bands,
                known_fractions,
                fixture,
                max_iter,
                tol,
                sv_cutoff,
            } => convergence_study(&ConvergenceParams {
                transform_size: *transform_size,
                bands: bands.clone(),
                known_fractions: known_fractions.clone(),
                fixture: *fixture,
                pg: PgParams {
                    max_iter: *max_iter,
                    tol: *tol,
                    relaxation: 1.0,
                },
                sv_cutoff: *sv_cutoff,
                seed: self.seed,
            })?,
        };
        let mut meta = vec![
            ("experiment".to_string(), self.kind.name().to_string()),
            ("seed".to_string(), self.seed.to_string()),
            ("version".to_string(), crate::VERSION.to_string()),
            ("config_hash".to_string(), self.hash()?),
            ("trials".to_string(), self.trials.to_string()),
        ];
        meta.append(&mut table.metadata);
        table.metadata = meta;
        Ok(table)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

// ── certificate sweep ────────────────────────────────────────────────

/// Certificate of a mask whose first `round(known_fraction * N)` positions
/// are known, for each band fraction. Columns `N, W, sigma_min, sigma_max,
/// condition`.
pub fn certificate_sweep(n: usize, bands: &[f64], known_fraction: f64) -> Result<Table> {
    check_bands(bands)?;
    let known = known_count(n, known_fraction)?;
    let mut mask = vec![false; n];
    mask[..known].iter_mut().for_each(|b| *b = true);
    let certs: Vec<Certificate> = bands
        .par_iter()
        .map(|&w| uniqueness_certificate(&mask, w, n))
        .collect::<Result<_>>()?;
    let mut table = Table::new(&["N", "W", "known", "in_band", "sigma_min", "sigma_max", "condition"]);
    table.meta("known_fraction", known_fraction);
    for (w, c) in bands.iter().zip(certs) {
        table.rows.push(vec![
            Cell::Int(n as i64),
            Cell::Real(*w),
            Cell::Int(c.known as i64),
            Cell::Int(c.in_band as i64),
            Cell::Real(c.sigma_min),
            Cell::Real(c.sigma_max),
            Cell::Real(c.condition),
        ]);
    }
    Ok(table)
}

// ── aliasing pair ────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliasingParams {
    pub step: f64,
    pub band_limit: f64,
    /// Carrier `w1` of the first signal; the second uses `w1 - pi / tau`.
    pub carrier: f64,
    /// Envelope half-bandwidth; defaults to half the room left by the carriers.
    pub envelope: Option<f64>,
    /// Dense-grid points per sampling step.
    pub oversample: usize,
    /// Even-grid half-span in samples.
    pub span: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AliasingOutcome {
    pub first: BandLimitedSignal,
    pub second: BandLimitedSignal,
    pub params: AliasingParams,
    pub envelope: f64,
    /// `max |f1(t_{2k}) - f2(t_{2k})|` over the even grid.
    pub max_even_grid_diff: f64,
    /// `max |f1(t) - f2(t)|` over the dense grid.
    pub sup_diff: f64,
    /// `max |f1(t)|` over the dense grid.
    pub peak: f64,
}

/// Largest differences of two signals on the even grid `t = 2k tau` and on
/// a dense grid of `oversample` points per step, both over `|k| <= span`.
/// Returns `(even_diff, dense_diff, dense_peak_of_first)`.
pub fn grid_differences(
    first: &BandLimitedSignal,
    second: &BandLimitedSignal,
    step: f64,
    oversample: usize,
    span: i64,
) -> (f64, f64, f64) {
    let even = (-span..=span)
        .map(|k| {
            let t = 2.0 * k as f64 * step;
            (first.evaluate(t) - second.evaluate(t)).norm()
        })
        .fold(0.0, f64::max);
    let m = oversample.max(1) as i64;
    let (mut dense, mut peak) = (0.0f64, 0.0f64);
    for i in -span * m..=span * m {
        let t = i as f64 * step / m as f64;
        let a = first.evaluate(t);
        dense = dense.max((a - second.evaluate(t)).norm());
        peak = peak.max(a.norm());
    }
    (even, dense, peak)
}

/// Two distinct band-limited signals `g(t) e^{i w1 t}` and `g(t) e^{i w2 t}`,
/// `w2 = w1 - pi / tau`, sharing a sinc envelope `g`. They coincide on the
/// decimated grid `t_{2k} = 2k tau`, which samples below the Nyquist rate
/// whenever `2 tau Omega >= pi`.
pub fn aliasing_demo(params: &AliasingParams) -> Result<AliasingOutcome> {
    let AliasingParams {
        step,
        band_limit,
        carrier,
        ..
    } = *params;
    if !(step > 0.0 && band_limit > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step and band limit must be positive (tau={step}, Omega={band_limit})"
        )));
    }
    if 2.0 * step * band_limit < PI {
        return Err(Error::AliasingBand(format!(
            "2*tau*Omega = {} < pi; the decimated grid still meets the Nyquist rate",
            2.0 * step * band_limit
        )));
    }
    let second_carrier = carrier - PI / step;
    let room = band_limit - carrier.abs().max(second_carrier.abs());
    if room <= 0.0 {
        return Err(Error::AliasingBand(format!(
            "carriers w1 = {carrier}, w2 = w1 - pi/tau = {second_carrier} need max(|w1|, |w2|) < Omega = {band_limit}"
        )));
    }
    let envelope = params.envelope.unwrap_or(0.5 * room);
    if !(envelope > 0.0 && envelope <= room * (1.0 + 1e-12)) {
        return Err(Error::AliasingBand(format!(
            "envelope bandwidth {envelope} must lie in (0, Omega - max(|w1|, |w2|)] = (0, {room}]"
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let first = BandLimitedSignal::new(band_limit, vec![Atom::new(one, 0.0, carrier, envelope)])?;
    let second = BandLimitedSignal::new(band_limit, vec![Atom::new(one, 0.0, second_carrier, envelope)])?;
    let (max_even_grid_diff, sup_diff, peak) =
        grid_differences(&first, &second, step, params.oversample, params.span);
    Ok(AliasingOutcome {
        first,
        second,
        params: *params,
        envelope,
        max_even_grid_diff,
        sup_diff,
        peak,
    })
}

impl AliasingOutcome {
    /// Certificate of the even-known mask on `N` positions at
    /// `W = min(tau Omega, pi)`.
    pub fn even_mask_certificate(&self, n: usize) -> Result<Certificate> {
        let band = (self.params.step * self.params.band_limit).min(PI);
        let mask: Vec<bool> = (0..n).map(|p| p % 2 == 0).collect();
        uniqueness_certificate(&mask, band, n)
    }

    fn table(&self, n: usize) -> Result<Table> {
        let cert = self.even_mask_certificate(n)?;
        let mut table = Table::new(&[
            "tau",
            "Omega",
            "two_tau_omega_over_pi",
            "carrier1",
            "carrier2",
            "envelope",
            "max_even_grid_diff",
            "sup_diff",
            "peak",
            "N",
            "even_mask_sigma_min",
            "even_mask_sigma_max",
        ]);
        table.meta("condition", "2*tau*Omega >= pi");
        let p = &self.params;
        table.rows.push(vec![
            Cell::Real(p.step),
            Cell::Real(p.band_limit),
            Cell::Real(2.0 * p.step * p.band_limit / PI),
            Cell::Real(p.carrier),
            Cell::Real(p.carrier - PI / p.step),
            Cell::Real(self.envelope),
            Cell::Real(self.max_even_grid_diff),
            Cell::Real(self.sup_diff),
            Cell::Real(self.peak),
            Cell::Int(n as i64),
            Cell::Real(cert.sigma_min),
            Cell::Real(cert.sigma_max),
        ]);
        Ok(table)
    }
}

// ── jitter ───────────────────────────────────────────────────────────

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Relative l2 error of `recovered` against `truth` over `k in [1, horizon]`.
pub fn horizon_error(recovered: &SampleWindow, truth: &SampleWindow, horizon: usize) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for k in 1..=horizon as i64 {
        if let (Some(r), Some(t)) = (recovered.get(k), truth.get(k)) {
            num += (r - t).norm_sqr();
            den += t.norm_sqr();
        }
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// Sampling-time jitter study: each `t_k` is perturbed by independent
/// uniform noise on `[-sigma, sigma]` before sampling, recovery assumes the
/// nominal grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterStudy {
    pub step: f64,
    pub transform_size: usize,
    pub known: usize,
    pub sv_cutoff: f64,
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
}

impl JitterStudy {
    fn unknown_error(&self, signal: &BandLimitedSignal, truth: &SampleWindow, offsets: &[f64]) -> Result<f64> {
        let mut window = truth.clone();
        for (i, (k, _)) in truth.iter().enumerate() {
            let t = k as f64 * self.step + offsets[i];
            window.values_mut()[i] = signal.evaluate(t);
        }
        window.mark_onesided(0);
        let band = (self.step * signal.band_limit()).min(PI);
        let problem = RecoveryProblem::new(window, band, self.transform_size)?;
        let report = tsvd_extrapolate(&problem, self.sv_cutoff)?;
        Ok(horizon_error(&report.recovered, truth, self.horizon))
    }

    /// Unit-amplitude offsets for one trial, one per window sample.
    fn trial_noise(&self, trial: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        (0..self.transform_size).map(|_| rng.random_range(-1.0..=1.0)).collect()
    }

    /// Error of the noiseless pipeline.
    pub fn baseline(&self, signal: &BandLimitedSignal) -> Result<f64> {
        let (_, truth) = onesided_window(signal, self.step, self.transform_size, self.known)?;
        self.unknown_error(signal, &truth, &vec![0.0; self.transform_size])
    }

    /// Columns `sigma, sigma_over_step, median_error, min_error, max_error`.
    pub fn run(&self, signal: &BandLimitedSignal, sigmas: &[f64]) -> Result<Table> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        let (_, truth) = onesided_window(signal, self.step, self.transform_size, self.known)?;
        let noise: Vec<Vec<f64>> = (0..self.trials).map(|t| self.trial_noise(t)).collect();
        let mut table = Table::new(&["sigma", "sigma_over_step", "median_error", "min_error", "max_error"]);
        table.meta("jitter_model", JITTER_MODEL);
        table.meta("horizon", self.horizon);
        table.meta("transform_size", self.transform_size);
        table.meta("known", self.known);
        table.meta("sv_cutoff", format!("{:e}", self.sv_cutoff));
        for &sigma in sigmas {
            if !(sigma >= 0.0) {
                return Err(Error::InvalidArgument(format!("jitter sigma must be >= 0, got {sigma}")));
            }
            let mut errors: Vec<f64> = noise
                .par_iter()
                .map(|unit| {
                    let offsets: Vec<f64> = unit.iter().map(|u| sigma * u).collect();
                    self.unknown_error(signal, &truth, &offsets)
                })
                .collect::<Result<_>>()?;
            let min = errors.iter().copied().fold(f64::INFINITY, f64::min);
            let max = errors.iter().copied().fold(0.0, f64::max);
            let med = median(&mut errors);
            table.rows.push(vec![
                Cell::Real(sigma),
                Cell::Real(sigma / self.step),
                Cell::Real(med),
                Cell::Real(min),
                Cell::Real(max),
            ]);
        }
        Ok(table)
    }
}

// ── convergence / conditioning ───────────────────────────────────────

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceParams {
    pub transform_size: usize,
    pub bands: Vec<f64>,
    pub known_fractions: Vec<f64>,
    pub fixture: FixtureSpec,
    pub pg: PgParams,
    pub sv_cutoff: f64,
    pub seed: u64,
}

pub const HORIZONS: [i64; 4] = [1, 2, 4, 8];

/// One row per `(W, known_fraction)`: PG sweeps to tolerance, TSVD
/// condition and the TSVD error at horizons 1, 2, 4, 8 (absolute error
/// divided by the window's peak magnitude; `nan` where the horizon is not
/// an unknown sample). Sampling step is 1, so `Omega = W`.
pub fn convergence_study(params: &ConvergenceParams) -> Result<Table> {
    check_bands(&params.bands)?;
    let n = params.transform_size;
    let mut cases = Vec::new();
    for &w in &params.bands {
        for &f in &params.known_fractions {
            cases.push((w, f, known_count(n, f)?));
        }
    }
    let rows: Vec<Vec<Cell>> = cases
        .par_iter()
        .map(|&(w, fraction, known)| -> Result<Vec<Cell>> {
            let signal = params.fixture.generate(w, params.seed)?;
            let (window, truth) = onesided_window(&signal, 1.0, n, known)?;
            let onesided = window.unknown_count() > 0;
            if onesided && w >= PI {
                return Err(Error::OversamplingRequired(w));
            }
            let problem = RecoveryProblem::new(window, w, n)?;
            let pg = pg_extrapolate(&problem, &params.pg)?;
            let (condition, errors) = match tsvd_extrapolate(&problem, params.sv_cutoff) {
                Ok(report) => {
                    let peak = truth.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
                    let errors: Vec<f64> = HORIZONS
                        .iter()
                        .map(|&k| match (report.recovered.get(k), truth.get(k)) {
                            (Some(r), Some(t)) if !problem.window().is_known(k) => {
                                (r - t).norm() / peak.max(f64::MIN_POSITIVE)
                            }
                            _ => f64::NAN,
                        })
                        .collect();
                    (report.condition_estimate, errors)
                }
                Err(Error::Underdetermined { .. }) => (f64::INFINITY, vec![f64::NAN; HORIZONS.len()]),
                Err(e) => return Err(e),
            };
            let mut row = vec![
                Cell::Real(w),
                Cell::Real(fraction),
                Cell::Int(pg.iterations_used as i64),
                Cell::Int(i64::from(pg.converged)),
                Cell::Real(condition),
            ];
            row.extend(errors.into_iter().map(Cell::Real));
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&[
        "W",
        "known_fraction",
        "pg_iterations",
        "pg_converged",
        "tsvd_condition",
        "err_k1",
        "err_k2",
        "err_k4",
        "err_k8",
    ]);
    table.meta("transform_size", n);
    table.meta("pg_tol", format!("{:e}", params.pg.tol));
    table.meta("pg_max_iter", params.pg.max_iter);
    table.meta("sv_cutoff", format!("{:e}", params.sv_cutoff));
    table.rows = rows;
    Ok(table)
}
