//! Matrix-function action `u = w(H) e_n0` for the chain matrix through a
//! Chebyshev expansion, avoiding a dense eigendecomposition.

use std::sync::Arc;

use rustfft::{num_complex::Complex, Fft, FftPlanner};

use super::{Boundary, DisorderedChain};
use crate::error::{Error, Result};

const MAX_DEGREE: usize = 1 << 22;

/// Chebyshev coefficients of `f` on `[-1, 1]` from `m` first-kind nodes.
pub(crate) fn coefficients<F: Fn(f64) -> f64>(f: F, m: usize) -> Vec<f64> {
    let samples: Vec<f64> = (0..m)
        .map(|j| f((std::f64::consts::PI * (j as f64 + 0.5) / m as f64).cos()))
        .collect();
    let mut c = dct2(&samples);
    for v in c.iter_mut() {
        *v *= 2.0 / m as f64;
    }
    c[0] *= 0.5;
    c
}

/// Unnormalized DCT-II, `X_k = sum_j x_j cos(pi k (j + 1/2) / m)`, by an
/// FFT of the even-odd reordered sequence.
fn dct2(x: &[f64]) -> Vec<f64> {
    let m = x.len();
    let mut v: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); m];
    for i in 0..m.div_ceil(2) {
        v[i] = Complex::new(x[2 * i], 0.0);
    }
    for i in 0..m / 2 {
        v[m - 1 - i] = Complex::new(x[2 * i + 1], 0.0);
    }
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_forward(m);
    fft.process(&mut v);
    (0..m)
        .map(|k| {
            let theta = -std::f64::consts::PI * k as f64 / (2.0 * m as f64);
            (v[k] * Complex::new(theta.cos(), theta.sin())).re
        })
        .collect()
}

/// Gershgorin bounds of the chain spectrum (eigenvalues of the matrix, i.e.
/// squared frequencies).
pub(crate) fn spectral_bounds(chain: &DisorderedChain) -> (f64, f64) {
    let n = chain.len();
    let g = chain.coupling();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let d = chain.diagonal(i);
        let neighbours = match chain.boundary() {
            Boundary::Periodic => 2.0,
            Boundary::Fixed => {
                if i == 0 || i + 1 == n {
                    1.0
                } else {
                    2.0
                }
            }
        };
        lo = lo.min(d - neighbours * g);
        hi = hi.max(d + neighbours * g);
    }
    (lo, hi)
}

/// `u = w(H) e_source` where `w` acts on eigenvalues of the chain matrix.
/// `oscillation` bounds the phase rate of `w` in the scaled variable on
/// `[-1, 1]` and sets the initial degree.
pub(crate) fn apply<F: Fn(f64) -> f64>(
    chain: &DisorderedChain,
    w: F,
    oscillation: f64,
    source: usize,
) -> Result<Vec<f64>> {
    let n = chain.len();
    let (lo, hi) = spectral_bounds(chain);
    let (lo, hi) = (lo - 1e-9 * hi.abs(), hi + 1e-9 * hi.abs());
    let (centre, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let f = |y: f64| w(centre + half * y);

    let mut degree = (1.2 * oscillation).ceil() as usize + 64;
    let coeffs = loop {
        let c = coefficients(&f, 2 * degree);
        let scale = c.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let tail = c[degree - 16..degree].iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        if tail <= 1e-13 * scale {
            let mut c = c;
            c.truncate(degree);
            break c;
        }
        degree *= 2;
        if degree > MAX_DEGREE {
            return Err(Error::Numeric(format!(
                "Chebyshev expansion did not converge (tail {tail:e} at degree {degree})"
            )));
        }
    };

    let g = chain.coupling();
    let diag: Vec<f64> = (0..n).map(|i| (chain.diagonal(i) - centre) / half).collect();
    let off = -g / half;
    let periodic = chain.boundary() == Boundary::Periodic;
    // scaled matrix-vector product restricted to the active index range
    let matvec = |x: &[f64], y: &mut [f64], lo: usize, hi: usize| {
        for i in lo..hi {
            let mut s = diag[i] * x[i];
            if i > 0 {
                s += off * x[i - 1];
            } else if periodic {
                s += off * x[n - 1];
            }
            if i + 1 < n {
                s += off * x[i + 1];
            } else if periodic {
                s += off * x[0];
            }
            y[i] = s;
        }
    };

    let mut prev = vec![0.0; n];
    prev[source] = 1.0;
    let mut u: Vec<f64> = prev.iter().map(|v| coeffs[0] * v).collect();
    if coeffs.len() == 1 {
        return Ok(u);
    }
    let mut cur = vec![0.0; n];
    let (mut lo_i, mut hi_i) = if periodic { (0, n) } else { (source.saturating_sub(1), (source + 2).min(n)) };
    matvec(&prev, &mut cur, lo_i, hi_i);
    for i in lo_i..hi_i {
        u[i] += coeffs[1] * cur[i];
    }
    let mut next = vec![0.0; n];
    for &c in &coeffs[2..] {
        if !periodic {
            lo_i = lo_i.saturating_sub(1);
            hi_i = (hi_i + 1).min(n);
        }
        matvec(&cur, &mut next, lo_i, hi_i);
        for i in lo_i..hi_i {
            next[i] = 2.0 * next[i] - prev[i];
            u[i] += c * next[i];
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dct_matches_direct_sum() {
        let x: Vec<f64> = (0..13).map(|i| (i as f64 * 0.7).sin() + 0.1 * i as f64).collect();
        let fast = dct2(&x);
        for (k, v) in fast.iter().enumerate() {
            let direct: f64 = x
                .iter()
                .enumerate()
                .map(|(j, &xj)| xj * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / 13.0).cos())
                .sum();
            assert_relative_eq!(*v, direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn expansion_reproduces_function() {
        let c = coefficients(|y| (3.0 * y).exp(), 64);
        for y in [-0.9, -0.2, 0.4, 1.0] {
            // T_m(y) = cos(m acos y)
            let s: f64 = c.iter().enumerate().map(|(m, cm)| cm * (m as f64 * f64::acos(y)).cos()).sum();
            assert_relative_eq!(s, (3.0 * y).exp(), max_relative = 1e-13);
        }
    }
}
