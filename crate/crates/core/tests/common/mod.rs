//! Independent reference computations shared by the integration tests.
//! Nothing here calls the library's transform or solver code.

#![allow(dead_code)]

use std::f64::consts::PI;

use bandex::{BandLimitedSignal, Complex64, SampleWindow};
use nalgebra::DMatrix;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Bin frequency in (-pi, pi], written out independently.
pub fn nu(j: usize, n: usize) -> f64 {
    let j = j as f64;
    let n = n as f64;
    if 2.0 * j <= n {
        2.0 * PI * j / n
    } else {
        2.0 * PI * (j - n) / n
    }
}

pub fn in_band(j: usize, n: usize, w: f64) -> bool {
    nu(j, n).abs() <= w + 1e-12
}

/// Direct O(N^2) unitary transform of a window embedded at `k mod N`.
pub fn naive_dft(window: &SampleWindow, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| {
            window
                .iter()
                .map(|(k, x)| x * Complex64::from_polar(1.0, -nu(j, n) * k as f64))
                .sum::<Complex64>()
                / (n as f64).sqrt()
        })
        .collect()
}

/// Direct inverse, read back on `[k_min, k_max]`.
pub fn naive_idft(bins: &[Complex64], k_min: i64, k_max: i64) -> Vec<Complex64> {
    let n = bins.len();
    (k_min..=k_max)
        .map(|k| {
            bins.iter()
                .enumerate()
                .map(|(j, b)| b * Complex64::from_polar(1.0, nu(j, n) * k as f64))
                .sum::<Complex64>()
                / (n as f64).sqrt()
        })
        .collect()
}

/// Explicit N x N band projection on the periodic buffer:
/// `P[a][b] = (1/N) sum_{j in band} exp(i nu_j (a - b))`.
pub fn projection_matrix(n: usize, w: f64) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |a, b| {
        (0..n)
            .filter(|&j| in_band(j, n, w))
            .map(|j| Complex64::from_polar(1.0, nu(j, n) * (a as f64 - b as f64)))
            .sum::<Complex64>()
            / n as f64
    })
}

/// Recovery matrix written from the definition: rows are known indices
/// `k`, columns in-band bins, entries `exp(i nu_j k) / sqrt(N)`.
pub fn recovery_matrix_oracle(indices: &[i64], n: usize, w: f64) -> DMatrix<Complex64> {
    let cols: Vec<usize> = (0..n).filter(|&j| in_band(j, n, w)).collect();
    DMatrix::from_fn(indices.len(), cols.len(), |r, c| {
        Complex64::from_polar(1.0 / (n as f64).sqrt(), nu(cols[c], n) * indices[r] as f64)
    })
}

/// Singular values from the eigenvalues of `A^H A`, ascending.
pub fn singular_values_via_gram(a: &DMatrix<Complex64>) -> Vec<f64> {
    let g = a.adjoint() * a;
    let mut s: Vec<f64> = g
        .symmetric_eigenvalues()
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Smooth cutoff equal to 1 on `|t| <= r/2`, 0 for `|t| >= r`, C-infinity
/// in between.
fn taper(t: f64, r: f64) -> f64 {
    let x = (t.abs() - 0.5 * r) / (0.5 * r);
    if x <= 0.0 {
        return 1.0;
    }
    if x >= 1.0 {
        return 0.0;
    }
    let f = |y: f64| if y > 0.0 { (-1.0 / y).exp() } else { 0.0 };
    f(1.0 - x) / (f(1.0 - x) + f(x))
}

/// `int exp(-i w t) f(t) dt` by the trapezoid rule on `[-r, r]` with a smooth
/// taper beyond `r/2`. The taper smears the spectrum over a width of order
/// `1/r`, so the result is accurate at frequencies farther than a few `1/r`
/// from any jump of `F`; the smooth integrand makes the trapezoid rule
/// spectrally accurate for `h` well below `pi / (Omega + |w|)`.
pub fn fourier_quadrature(signal: &BandLimitedSignal, omega: f64, r: f64, h: f64) -> Complex64 {
    let m = (r / h).ceil() as i64;
    (-m..=m)
        .map(|i| {
            let t = i as f64 * h;
            signal.evaluate(t) * Complex64::from_polar(taper(t, r), -omega * t)
        })
        .sum::<Complex64>()
        * h
}

/// Energy `(1/2pi) int |F|^2 dw` by midpoint quadrature of the closed-form
/// spectrum over `[-Omega, Omega]`.
pub fn spectral_energy(signal: &BandLimitedSignal, points: usize) -> f64 {
    let omega = signal.band_limit();
    let h = 2.0 * omega / points as f64;
    (0..points)
        .map(|i| signal.fourier(-omega + (i as f64 + 0.5) * h).norm_sqr())
        .sum::<f64>()
        * h
        / (2.0 * PI)
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn l2_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Exactly band-limited length-N sequence on `[k_min, k_min + N)` with
/// random in-band coefficients.
pub fn in_band_window(n: usize, w: f64, k_min: i64, rng: &mut impl rand::Rng) -> SampleWindow {
    let bins: Vec<Complex64> = (0..n)
        .map(|j| {
            if in_band(j, n, w) {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            } else {
                c(0.0, 0.0)
            }
        })
        .collect();
    SampleWindow::from_values(k_min, naive_idft(&bins, k_min, k_min + n as i64 - 1)).unwrap()
}

/// Dense solve of the gap equations `x_S = (P x)_S` for the unknown samples
/// of a window whose length equals `N`.
pub fn gap_solve(window: &SampleWindow, w: f64) -> Vec<Complex64> {
    let n = window.len();
    let p = projection_matrix(n, w);
    let unknown: Vec<usize> = (0..n).filter(|&i| !window.known_mask()[i]).collect();
    let known: Vec<usize> = (0..n).filter(|&i| window.known_mask()[i]).collect();
    // Positions are window-relative; the projection is shift invariant.
    let s = unknown.len();
    let lhs = DMatrix::from_fn(s, s, |r, q| {
        let id = if r == q { c(1.0, 0.0) } else { c(0.0, 0.0) };
        id - p[(unknown[r], unknown[q])]
    });
    let rhs = nalgebra::DVector::from_fn(s, |r, _| {
        known
            .iter()
            .map(|&q| p[(unknown[r], q)] * window.values()[q])
            .sum::<Complex64>()
    });
    let sol = lhs.lu().solve(&rhs).expect("gap system is regular");
    sol.iter().copied().collect()
}
