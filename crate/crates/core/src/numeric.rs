//! Small numerical building blocks shared by the quadrature modules:
//! compensated summation, a thread-count independent parallel reduction,
//! bracketed root finding and the time kernels of the master equation.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = Compensated::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Chunk length used by [`deterministic_reduce`]. It depends only on the
/// problem size, never on the number of worker threads, which is what makes
/// the reduction bit-reproducible.
fn chunk_len(n_items: usize) -> usize {
    const MIN_CHUNK: usize = 256;
    const MAX_CHUNKS: usize = 2048;
    MIN_CHUNK.max(n_items.div_ceil(MAX_CHUNKS))
}

/// Parallel reduction of `width` accumulators over `0..n_items`.
///
/// `body` receives a contiguous index range and must add its contributions
/// into the provided accumulators. Partial results of the fixed-size chunks are
/// combined sequentially in index order, so the output does not depend on the
/// rayon pool size.
pub fn deterministic_reduce<F>(n_items: usize, width: usize, body: F) -> Vec<f64>
where
    F: Fn(std::ops::Range<usize>, &mut [Compensated]) + Sync,
{
    let chunk = chunk_len(n_items);
    let n_chunks = n_items.div_ceil(chunk);
    let partials: Vec<Vec<Compensated>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![Compensated::default(); width];
            let lo = c * chunk;
            let hi = (lo + chunk).min(n_items);
            body(lo..hi, &mut acc);
            acc
        })
        .collect();
    let mut total = vec![Compensated::default(); width];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            t.add(p.sum);
            t.add(p.carry);
        }
    }
    total.iter().map(Compensated::value).collect()
}

/// Brent's method on a bracketing interval. Returns the abscissa once the
/// bracket is narrower than `xtol` or `|f| <= ftol`.
pub fn brent<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64, ftol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Numeric(format!(
            "root not bracketed on [{a}, {b}] (f = {fa}, {fb})"
        )));
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut bisected = true;
    for _ in 0..200 {
        if fb.abs() <= ftol || (b - a).abs() <= xtol {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            // inverse quadratic interpolation
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let out_of_range = !((s > lo.min(b)) && (s < lo.max(b)));
        let slow = if bisected {
            (s - b).abs() >= (b - c).abs() / 2.0 || (b - c).abs() < xtol
        } else {
            (s - b).abs() >= (c - d).abs() / 2.0 || (c - d).abs() < xtol
        };
        if out_of_range || slow {
            s = (a + b) / 2.0;
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa.signum() != fs.signum() {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Err(Error::Numeric("brent iteration did not converge".into()))
}

/// `sin(t d) / d`, with its removable singularity at `d = 0` (value `t`).
#[inline]
pub fn sinc_kernel(detuning: f64, t: f64) -> f64 {
    let x = t * detuning;
    if x.abs() < 1e-4 {
        t * (1.0 - x * x / 6.0)
    } else {
        x.sin() / detuning
    }
}

/// `(1 - cos(t d)) / d`, written as `2 sin^2(t d / 2) / d` to avoid
/// cancellation; vanishes at `d = 0`.
#[inline]
pub fn lamb_kernel(detuning: f64, t: f64) -> f64 {
    let x = t * detuning;
    if x.abs() < 1e-4 {
        t * x / 2.0
    } else {
        let s = (x / 2.0).sin();
        2.0 * s * s / detuning
    }
}

/// Bose-Einstein occupation `1 / (exp(w/T) - 1)`; zero at `T = 0`.
#[inline]
pub fn bose_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        0.0
    } else {
        1.0 / (omega / temperature).exp_m1()
    }
}

/// `(coth(w / 2T) + 1) / 2 = n(w) + 1`.
#[inline]
pub fn emission_factor(omega: f64, temperature: f64) -> f64 {
    bose_occupation(omega, temperature) + 1.0
}

/// Sample quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut values = vec![1.0e16, 1.0, -1.0e16];
        values.extend(std::iter::repeat(1.0).take(9));
        assert_eq!(compensated_sum(values), 10.0);
    }

    #[test]
    fn reduction_is_independent_of_pool_size() {
        let body = |r: std::ops::Range<usize>, acc: &mut [Compensated]| {
            for i in r {
                let x = (i as f64 * 0.37).sin();
                acc[0].add(x);
                acc[1].add(x * x);
            }
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| deterministic_reduce(1_000_003, 2, body))
        };
        let a = run(1);
        let b = run(3);
        assert_eq!(a[0].to_bits(), b[0].to_bits());
        assert_eq!(a[1].to_bits(), b[1].to_bits());
    }

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15, 0.0).unwrap();
        assert_relative_eq!(r, 2f64.cbrt(), epsilon = 1e-14);
    }

    #[test]
    fn brent_rejects_unbracketed() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 0.0).is_err());
    }

    #[test]
    fn kernels_are_continuous_at_resonance() {
        let t = 37.0;
        for d in [1e-9, 1e-7, 2e-6, 5e-6] {
            assert_relative_eq!(sinc_kernel(d, t), (t * d).sin() / d, max_relative = 1e-9);
            let half = (t * d / 2.0).sin();
            assert_relative_eq!(lamb_kernel(d, t), 2.0 * half * half / d, max_relative = 1e-6);
        }
        assert_eq!(sinc_kernel(0.0, t), t);
        assert_eq!(lamb_kernel(0.0, t), 0.0);
        assert_eq!(sinc_kernel(0.3, 0.0), 0.0);
    }

    #[test]
    fn detailed_balance_of_occupation() {
        let (w, temp) = (1.3, 0.7);
        let n = bose_occupation(w, temp);
        assert_relative_eq!(n / (n + 1.0), (-w / temp).exp(), max_relative = 1e-12);
        let coth = 1.0 / (w / (2.0 * temp)).tanh();
        assert_relative_eq!(emission_factor(w, temp), (coth + 1.0) / 2.0, max_relative = 1e-12);
        assert_eq!(bose_occupation(w, 0.0), 0.0);
    }

    #[test]
    fn quantile_interpolates() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&s, 0.0), 1.0);
        assert_eq!(quantile(&s, 1.0), 4.0);
        assert_relative_eq!(quantile(&s, 0.5), 2.5);
        assert_eq!(quantile(&[7.0], 0.9), 7.0);
    }
}
