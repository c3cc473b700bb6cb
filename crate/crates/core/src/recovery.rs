//! Recovery of unknown samples of a band-limited sequence from the known
//! ones: one-sided extrapolation of a trace `{x(k)}_{k <= s}`, and filling of
//! finite interior gaps.
//!
//! At window scale the sequence is modelled as an N-periodic sequence whose
//! spectrum vanishes outside `|nu| <= W`. Window positions beyond the window
//! length (when `N` exceeds it) are free, exactly like the unknown samples.
//! Both solvers work in window-relative coordinates `p = k - k_min`, so the
//! result does not depend on where the window sits on the index axis.
//!
//! Uniqueness does not imply stability: the recovery matrix of a one-sided
//! trace is severely ill-conditioned, and the extrapolation error grows with
//! the distance from the last known sample. Every report therefore carries a
//! condition estimate.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{check_band, in_band_bins, Transform};
use crate::window::SampleWindow;

pub const DEFAULT_SV_CUTOFF: f64 = 1e-14;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 10_000;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A window with unknowns marked, the band fraction `W = tau * Omega`, and
/// the transform size `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryProblem {
    window: SampleWindow,
    band: f64,
    transform_size: usize,
}

impl RecoveryProblem {
    pub fn new(window: SampleWindow, band: f64, transform_size: usize) -> Result<Self> {
        check_band(band)?;
        let n = transform_size;
        if n < 2 || n % 2 != 0 || n < window.len() {
            return Err(Error::TransformSize {
                n,
                len: window.len(),
            });
        }
        if window.known_count() == 0 {
            return Err(Error::NoKnownSamples);
        }
        if window.is_onesided() && band >= PI {
            return Err(Error::OversamplingRequired(band));
        }
        Ok(Self {
            window,
            band,
            transform_size,
        })
    }

    pub fn window(&self) -> &SampleWindow {
        &self.window
    }

    pub fn band(&self) -> f64 {
        self.band
    }

    pub fn transform_size(&self) -> usize {
        self.transform_size
    }

    /// Known mask padded with `false` up to length `N`.
    fn padded_mask(&self) -> Vec<bool> {
        let mut mask = self.window.known_mask().to_vec();
        mask.resize(self.transform_size, false);
        mask
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pg,
    Tsvd,
    Gap,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pg" => Ok(Method::Pg),
            "tsvd" => Ok(Method::Tsvd),
            "gap" => Ok(Method::Gap),
            other => Err(Error::InvalidArgument(format!(
                "unknown method `{other}` (expected pg, tsvd or gap)"
            ))),
        }
    }
}

/// Parameters of the alternating-projection iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgParams {
    pub max_iter: usize,
    pub tol: f64,
    /// Blend factor in `(0, 2]`; 1 is the plain iteration.
    pub relaxation: f64,
}

impl Default for PgParams {
    fn default() -> Self {
        Self {
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            relaxation: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport {
    pub method: Method,
    /// Recovered window, every sample marked known.
    pub recovered: SampleWindow,
    /// Mask of the input window.
    pub was_known: Vec<bool>,
    /// PG: `||y_{n+1} - y_n||` per iteration. TSVD: the single data residual
    /// `||A c - x_known||`.
    pub residual_history: Vec<f64>,
    /// Singular values of the recovery matrix, descending (TSVD only).
    pub singular_values: Vec<f64>,
    /// `sigma_max / sigma_min` of the recovery matrix before truncation.
    pub condition_estimate: f64,
    pub iterations_used: usize,
    pub converged: bool,
}

impl RecoveryReport {
    pub fn diagnostics(&self, problem: &RecoveryProblem) -> ReportDiagnostics {
        ReportDiagnostics {
            schema_version: 1,
            method: self.method,
            band_fraction: problem.band,
            transform_size: problem.transform_size,
            k_min: self.recovered.k_min(),
            k_max: self.recovered.k_max(),
            known_count: self.was_known.iter().filter(|&&b| b).count(),
            unknown_count: self.was_known.iter().filter(|&&b| !b).count(),
            iterations_used: self.iterations_used,
            converged: self.converged,
            condition_estimate: self.condition_estimate.is_finite().then_some(self.condition_estimate),
            residual_history: self.residual_history.clone(),
            singular_values: self.singular_values.clone(),
            manifest_hash: None,
        }
    }

    /// Writes `k,re,im,known,was_known` rows (every `known` is 1), preceded
    /// by the window's grid comments, so the file also reads back as a
    /// [`SampleWindow`].
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        if let Some(step) = self.recovered.step() {
            writeln!(out, "# step={step}")?;
        }
        if let Some(origin) = self.recovered.origin() {
            writeln!(out, "# origin={origin}")?;
        }
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["k", "re", "im", "known", "was_known"])?;
        for (i, (k, v)) in self.recovered.iter().enumerate() {
            writer.write_record([
                k.to_string(),
                v.re.to_string(),
                v.im.to_string(),
                "1".to_string(),
                u8::from(self.was_known[i]).to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// JSON-serializable diagnostics of a [`RecoveryReport`]. A non-finite
/// condition estimate (rank-deficient matrix) is written as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDiagnostics {
    pub schema_version: u32,
    pub method: Method,
    pub band_fraction: f64,
    pub transform_size: usize,
    pub k_min: i64,
    pub k_max: i64,
    pub known_count: usize,
    pub unknown_count: usize,
    pub iterations_used: usize,
    pub converged: bool,
    pub condition_estimate: Option<f64>,
    pub residual_history: Vec<f64>,
    pub singular_values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest_hash: Option<String>,
}

/// Extreme singular values of the recovery matrix for a given mask.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    /// Smallest singular value counted over the in-band columns; zero when
    /// there are fewer known samples than in-band bins.
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// `sigma_max / sigma_min`, infinite when `sigma_min` is zero.
    pub condition: f64,
    pub known: usize,
    pub in_band: usize,
}

impl Certificate {
    pub fn ratio(&self) -> f64 {
        if self.sigma_max == 0.0 {
            0.0
        } else {
            self.sigma_min / self.sigma_max
        }
    }
}

/// Entry `exp(i nu_j p) / sqrt(N)` evaluated with the phase reduced mod N.
fn kernel(j: usize, p: usize, n: usize) -> Complex64 {
    let r = ((j as u128 * p as u128) % n as u128) as f64;
    Complex64::from_polar(1.0 / (n as f64).sqrt(), 2.0 * PI * r / n as f64)
}

/// Matrix mapping in-band coefficients to the samples at the known
/// positions: rows are known positions `p` (window-relative), columns the
/// in-band bins `j`, entries `exp(i nu_j p) / sqrt(N)`.
pub fn recovery_matrix(known: &[bool], band: f64, n: usize) -> Result<Mat<Complex64>> {
    check_band(band)?;
    if known.len() > n {
        return Err(Error::TransformSize { n, len: known.len() });
    }
    let rows: Vec<usize> = (0..known.len()).filter(|&p| known[p]).collect();
    let cols = in_band_bins(n, band);
    Ok(Mat::from_fn(rows.len(), cols.len(), |r, c| kernel(cols[c], rows[r], n)))
}

fn svd(a: &Mat<Complex64>) -> Result<faer::linalg::solvers::Svd<Complex64>> {
    a.thin_svd()
        .map_err(|e| Error::InvalidArgument(format!("SVD did not converge: {e:?}")))
}

/// Singular values in descending order.
fn singular_values(a: &Mat<Complex64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    a.singular_values()
        .map_err(|e| Error::InvalidArgument(format!("SVD did not converge: {e:?}")))
}

/// Smallest and largest singular values of the recovery matrix; a positive
/// `sigma_min` certifies that the known samples determine every in-band
/// degree of freedom.
pub fn uniqueness_certificate(known: &[bool], band: f64, n: usize) -> Result<Certificate> {
    let a = recovery_matrix(known, band, n)?;
    let (m, k) = (a.nrows(), a.ncols());
    let sv = singular_values(&a)?;
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let sigma_min = if m < k { 0.0 } else { sv.last().copied().unwrap_or(0.0) };
    let condition = if sigma_min > 0.0 {
        sigma_max / sigma_min
    } else {
        f64::INFINITY
    };
    Ok(Certificate {
        sigma_min,
        sigma_max,
        condition,
        known: m,
        in_band: k,
    })
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

struct PgOutcome {
    values: Vec<Complex64>,
    history: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Alternates between the affine set of sequences matching the known samples
/// and the band-limited subspace on the length-N periodic buffer.
fn alternate(problem: &RecoveryProblem, params: &PgParams) -> Result<PgOutcome> {
    let n = problem.transform_size;
    let mask = problem.padded_mask();
    let mut data = problem.window.values().to_vec();
    data.resize(n, ZERO);
    let mut y: Vec<Complex64> = data
        .iter()
        .zip(&mask)
        .map(|(&d, &known)| if known { d } else { ZERO })
        .collect();

    let mut transform = Transform::new(n)?;
    let mut z = vec![ZERO; n];
    let mut history = Vec::new();
    let mut converged = false;
    let lambda = params.relaxation;

    for _ in 0..params.max_iter {
        for p in 0..n {
            z[p] = if mask[p] { data[p] } else { y[p] };
        }
        transform.project_inplace(&mut z, problem.band);
        let mut step_sq = 0.0;
        for p in 0..n {
            let delta = (z[p] - y[p]) * lambda;
            step_sq += delta.norm_sqr();
            y[p] += delta;
        }
        let step = step_sq.sqrt();
        history.push(step);
        if step <= params.tol * norm(&y) {
            converged = true;
            break;
        }
    }

    for p in 0..n {
        if mask[p] {
            y[p] = data[p];
        }
    }
    y.truncate(problem.window.len());
    Ok(PgOutcome {
        values: y,
        iterations: history.len(),
        history,
        converged,
    })
}

fn validate_pg(params: &PgParams) -> Result<()> {
    if !(params.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {}", params.tol)));
    }
    if !(params.relaxation > 0.0 && params.relaxation <= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "relaxation must lie in (0, 2], got {}",
            params.relaxation
        )));
    }
    Ok(())
}

fn finish(
    problem: &RecoveryProblem,
    method: Method,
    values: Vec<Complex64>,
    residual_history: Vec<f64>,
    singular_values: Vec<f64>,
    condition_estimate: f64,
    iterations_used: usize,
    converged: bool,
) -> Result<RecoveryReport> {
    let mut recovered = problem.window.clone();
    recovered.values_mut().copy_from_slice(&values);
    recovered.mark_all_known();
    Ok(RecoveryReport {
        method,
        recovered,
        was_known: problem.window.known_mask().to_vec(),
        residual_history,
        singular_values,
        condition_estimate,
        iterations_used,
        converged,
    })
}

fn condition_of(problem: &RecoveryProblem) -> Result<f64> {
    Ok(uniqueness_certificate(problem.window.known_mask(), problem.band, problem.transform_size)?.condition)
}

/// Alternating-projection (Papoulis-Gerchberg) extrapolation.
///
/// Each sweep overwrites the known samples, projects onto the band and
/// blends with the previous iterate using `relaxation`. Stops once
/// `||y_{n+1} - y_n|| <= tol ||y_{n+1}||`. Running out of iterations is
/// reported through `converged = false`, not as an error. For a consistent
/// problem the limit is the band-limited sequence through the data; for an
/// inconsistent one it is the least-squares fit, the same point the SVD
/// solver returns.
pub fn pg_extrapolate(problem: &RecoveryProblem, params: &PgParams) -> Result<RecoveryReport> {
    validate_pg(params)?;
    let condition = condition_of(problem)?;
    if problem.window.unknown_count() == 0 {
        return finish(
            problem,
            Method::Pg,
            problem.window.values().to_vec(),
            Vec::new(),
            Vec::new(),
            condition,
            0,
            true,
        );
    }
    let out = alternate(problem, params)?;
    finish(
        problem,
        Method::Pg,
        out.values,
        out.history,
        Vec::new(),
        condition,
        out.iterations,
        out.converged,
    )
}

/// Missing-sample recovery for a finite interior gap set.
///
/// The iteration is the plain (`relaxation = 1`) alternating projection;
/// only the gap samples (and any padding beyond the window) change between
/// sweeps. Both window endpoints must be known.
pub fn gap_recover(problem: &RecoveryProblem, max_iter: usize, tol: f64) -> Result<RecoveryReport> {
    let params = PgParams {
        max_iter,
        tol,
        relaxation: 1.0,
    };
    validate_pg(&params)?;
    let mask = problem.window.known_mask();
    if problem.window.unknown_count() > 0 && !(mask[0] && mask[mask.len() - 1]) {
        return Err(Error::GapNotInterior);
    }
    let mut report = pg_extrapolate(problem, &params)?;
    report.method = Method::Gap;
    Ok(report)
}

/// Truncated-SVD least-squares fit of the in-band coefficients to the known
/// samples, followed by synthesis of the whole window.
///
/// Singular values below `sv_cutoff * sigma_max` are discarded; a value
/// exactly at the cutoff is kept.
pub fn tsvd_extrapolate(problem: &RecoveryProblem, sv_cutoff: f64) -> Result<RecoveryReport> {
    if !(0.0..1.0).contains(&sv_cutoff) {
        return Err(Error::InvalidArgument(format!(
            "sv_cutoff must lie in [0, 1), got {sv_cutoff}"
        )));
    }
    let n = problem.transform_size;
    let window = &problem.window;
    let mask = window.known_mask();
    let cols = in_band_bins(n, problem.band);
    let known_pos: Vec<usize> = (0..window.len()).filter(|&p| mask[p]).collect();
    if cols.len() > known_pos.len() {
        return Err(Error::Underdetermined {
            known: known_pos.len(),
            in_band: cols.len(),
        });
    }

    let a = recovery_matrix(mask, problem.band, n)?;
    let b: Vec<Complex64> = known_pos.iter().map(|&p| window.values()[p]).collect();
    let svd = svd(&a)?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let sv: Vec<f64> = (0..s.nrows()).map(|i| s[i].re).collect();
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let sigma_min = sv.last().copied().unwrap_or(0.0);
    let threshold = sv_cutoff * sigma_max;

    let mut coeffs = vec![ZERO; cols.len()];
    for (i, &sigma) in sv.iter().enumerate() {
        if sigma >= threshold && sigma > 0.0 {
            let proj: Complex64 = (0..b.len()).map(|r| u[(r, i)].conj() * b[r]).sum::<Complex64>() / sigma;
            for (c, coeff) in coeffs.iter_mut().enumerate() {
                *coeff += v[(c, i)] * proj;
            }
        }
    }

    let mut buf = vec![ZERO; n];
    for (c, &j) in cols.iter().enumerate() {
        buf[j] = coeffs[c];
    }
    Transform::new(n)?.inverse_inplace(&mut buf);
    buf.truncate(window.len());

    let residual = known_pos
        .iter()
        .map(|&p| (buf[p] - window.values()[p]).norm_sqr())
        .sum::<f64>()
        .sqrt();
    for &p in &known_pos {
        buf[p] = window.values()[p];
    }

    let condition = if sigma_min > 0.0 {
        sigma_max / sigma_min
    } else {
        f64::INFINITY
    };
    finish(problem, Method::Tsvd, buf, vec![residual], sv, condition, 0, true)
}

/// Dispatches on `method` with the given parameters.
pub fn recover(
    problem: &RecoveryProblem,
    method: Method,
    pg: &PgParams,
    sv_cutoff: f64,
) -> Result<RecoveryReport> {
    match method {
        Method::Pg => pg_extrapolate(problem, pg),
        Method::Tsvd => tsvd_extrapolate(problem, sv_cutoff),
        Method::Gap => gap_recover(problem, pg.max_iter, pg.tol),
    }
}
