//! Finite harmonic chains with static on-site disorder: construction,
//! eigenmodes, position-resolved cross-talk and ensemble statistics.

mod chebyshev;

use faer::{Mat, Side};
use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{LatticeSpec, WaveVector};
use crate::numeric::{quantile, sinc_kernel, Compensated};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Fixed,
    Periodic,
}

/// Distribution of the on-site offsets `w_n` for amplitude `Delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisorderLaw {
    /// Uniform on `[0, Delta]`.
    #[default]
    OneSided,
    /// Uniform on `[-Delta/2, Delta/2]`.
    Symmetric,
}

/// Chain of `N` oscillators with squared on-site frequencies `w0^2 + w_n`
/// and nearest-neighbour springs `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderedChain {
    omega0: f64,
    coupling: f64,
    amplitude: f64,
    seed: u64,
    boundary: Boundary,
    law: DisorderLaw,
    onsite: Vec<f64>,
}

pub fn build_chain(
    n: usize,
    omega0: f64,
    coupling: f64,
    amplitude: f64,
    seed: u64,
    boundary: Boundary,
    law: DisorderLaw,
) -> Result<DisorderedChain> {
    if n < 2 || (boundary == Boundary::Periodic && n < 3) {
        return invalid(format!("chain too short ({n} sites) for {boundary:?} boundaries"));
    }
    if !(omega0 > 0.0 && coupling >= 0.0 && amplitude >= 0.0) {
        return invalid("need omega0 > 0, g >= 0 and a non-negative disorder amplitude");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let onsite: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            match law {
                DisorderLaw::OneSided => amplitude * u,
                DisorderLaw::Symmetric => amplitude * (u - 0.5),
            }
        })
        .collect();
    if let Some(w) = onsite.iter().find(|&&w| omega0 * omega0 + w <= 0.0) {
        return invalid(format!("on-site frequency squared {} is not positive", omega0 * omega0 + w));
    }
    Ok(DisorderedChain {
        omega0,
        coupling,
        amplitude,
        seed,
        boundary,
        law,
        onsite,
    })
}

impl DisorderedChain {
    pub fn len(&self) -> usize {
        self.onsite.len()
    }

    pub fn is_empty(&self) -> bool {
        self.onsite.is_empty()
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn law(&self) -> DisorderLaw {
        self.law
    }

    /// Realized offsets `w_n`.
    pub fn onsite(&self) -> &[f64] {
        &self.onsite
    }

    /// Diagonal entry `w0^2 + w_n + 2g`.
    pub fn diagonal(&self, i: usize) -> f64 {
        self.omega0 * self.omega0 + self.onsite[i] + 2.0 * self.coupling
    }

    /// Dense symmetric chain matrix, row-major.
    pub fn matrix(&self) -> Vec<f64> {
        let n = self.len();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = self.diagonal(i);
            if i + 1 < n {
                m[i * n + i + 1] = -self.coupling;
                m[(i + 1) * n + i] = -self.coupling;
            }
        }
        if self.boundary == Boundary::Periodic {
            m[n - 1] = -self.coupling;
            m[(n - 1) * n] = -self.coupling;
        }
        m
    }
}

/// Eigenfrequencies in ascending order and real orthonormal mode profiles.
#[derive(Debug, Clone)]
pub struct EigenmodeBasis {
    frequencies: Vec<f64>,
    /// `profiles[n * N + k] = f_{n,k}`.
    profiles: Vec<f64>,
}

pub fn diagonalize(chain: &DisorderedChain) -> Result<EigenmodeBasis> {
    let n = chain.len();
    let dense = chain.matrix();
    let m = Mat::<f64>::from_fn(n, n, |i, j| dense[i * n + j]);
    let evd = m.as_ref().self_adjoint_eigen(Side::Lower).map_err(|e| {
        Error::Numeric(format!(
            "eigensolver failed on the {n}x{n} chain matrix (diagonal in [{:.4}, {:.4}], coupling {}): {e:?}",
            (0..n).map(|i| chain.diagonal(i)).fold(f64::INFINITY, f64::min),
            (0..n).map(|i| chain.diagonal(i)).fold(f64::NEG_INFINITY, f64::max),
            chain.coupling()
        ))
    })?;
    let values = evd.S().column_vector();
    let vectors = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut frequencies = Vec::with_capacity(n);
    for &k in &order {
        let lambda = values[k];
        if lambda <= 0.0 {
            return Err(Error::Numeric(format!("non-positive eigenvalue {lambda}")));
        }
        frequencies.push(lambda.sqrt());
    }
    let mut profiles = vec![0.0; n * n];
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            profiles[row * n + col] = vectors[(row, k)];
        }
    }
    Ok(EigenmodeBasis {
        frequencies,
        profiles,
    })
}

impl EigenmodeBasis {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    #[inline]
    pub fn profile(&self, site: usize, mode: usize) -> f64 {
        self.profiles[site * self.len() + mode]
    }

    /// Row of mode amplitudes at `site`.
    pub fn site_row(&self, site: usize) -> &[f64] {
        let n = self.len();
        &self.profiles[site * n..(site + 1) * n]
    }

    /// `max |sum_n f_{n,k} f_{n,k'} - delta_{kk'}|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a..n {
                let mut s = Compensated::default();
                for site in 0..n {
                    s.add(self.profile(site, a) * self.profile(site, b));
                }
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s.value() - target).abs());
            }
        }
        worst
    }

    /// `max |sum_k f_{n,k} f_{n',k} - delta_{nn'}|`.
    pub fn completeness_residual(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        for a in 0..n {
            let ra = self.site_row(a);
            for b in a..n {
                let rb = self.site_row(b);
                let mut s = Compensated::default();
                for (x, y) in ra.iter().zip(rb) {
                    s.add(x * y);
                }
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s.value() - target).abs());
            }
        }
        worst
    }

    /// `sum_k f_{n,k} f_{n',k} h(omega_k)`, the cross-talk of any exchange
    /// bath characterized by the spectral weight `h`.
    pub fn weighted_overlap<H: Fn(f64) -> f64>(&self, site: usize, other: usize, h: H) -> f64 {
        let mut s = Compensated::default();
        for ((a, b), &w) in self.site_row(site).iter().zip(self.site_row(other)).zip(&self.frequencies) {
            s.add(a * b * h(w));
        }
        s.value()
    }
}

/// Chain cross-talk between sites `n0` and `n0 + x` at time `t`, per unit
/// `lambda^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainCrossTalk {
    pub x: usize,
    pub gamma13: f64,
    pub gamma11: f64,
    pub normalized: f64,
    /// The probe frequency lies outside the realized spectrum, so the
    /// self-damping is tiny and the normalization unreliable.
    pub ill_conditioned: bool,
}

fn chain_kernel(omega: f64, t: f64) -> impl Fn(f64) -> f64 {
    move |w: f64| sinc_kernel(omega - w, t) / w / (2.0 * omega)
}

fn check_sites(len: usize, n0: usize, xs: &[usize]) -> Result<()> {
    if let Some(x) = xs.iter().find(|&&x| n0 + x >= len) {
        return invalid(format!("site {} lies outside the chain of {len} sites", n0 + x));
    }
    Ok(())
}

fn finish(n0_value: f64, values: &[f64], xs: &[usize], outside: bool, omega: f64) -> Vec<ChainCrossTalk> {
    if outside {
        warn!("Omega = {omega} lies outside the realized chain spectrum; normalized cross-talk is ill-conditioned");
    }
    xs.iter()
        .zip(values)
        .map(|(&x, &v)| ChainCrossTalk {
            x,
            gamma13: v,
            gamma11: n0_value,
            normalized: if n0_value == 0.0 { 0.0 } else { v / n0_value },
            ill_conditioned: outside,
        })
        .collect()
}

/// `Gamma13(n0, n0 + x, t) = (1/2 Omega) sum_k f_{n0,k} f_{n0+x,k}
/// sin[t(omega_k - Omega)]/(omega_k - Omega) / omega_k` from the eigenbasis.
pub fn cross_talk_disordered(
    basis: &EigenmodeBasis,
    omega: f64,
    n0: usize,
    x: usize,
    t: f64,
) -> Result<ChainCrossTalk> {
    Ok(cross_talk_profile(basis, omega, n0, &[x], t)?[0])
}

pub fn cross_talk_profile(
    basis: &EigenmodeBasis,
    omega: f64,
    n0: usize,
    xs: &[usize],
    t: f64,
) -> Result<Vec<ChainCrossTalk>> {
    check_sites(basis.len(), n0, xs)?;
    if !(t > 0.0) {
        return invalid(format!("time must be positive (got {t})"));
    }
    let h = chain_kernel(omega, t);
    let weights: Vec<f64> = basis.frequencies().iter().map(|&w| h(w)).collect();
    let source = basis.site_row(n0);
    let values: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let mut s = Compensated::default();
            for ((a, b), w) in source.iter().zip(basis.site_row(n0 + x)).zip(&weights) {
                s.add(a * b * w);
            }
            s.value()
        })
        .collect();
    let own = basis.weighted_overlap(n0, n0, &h);
    let f = basis.frequencies();
    let outside = omega < f[0] || omega > f[f.len() - 1];
    Ok(finish(own, &values, xs, outside, omega))
}

/// Same quantity as [`cross_talk_profile`], evaluated without diagonalizing:
/// `u = w(H) e_n0` by a Chebyshev expansion of `w(lambda) = kernel(sqrt lambda)`.
pub fn cross_talk_chebyshev(
    chain: &DisorderedChain,
    omega: f64,
    n0: usize,
    xs: &[usize],
    t: f64,
) -> Result<Vec<ChainCrossTalk>> {
    check_sites(chain.len(), n0, xs)?;
    if !(t > 0.0) {
        return invalid(format!("time must be positive (got {t})"));
    }
    let h = chain_kernel(omega, t);
    let (lo, hi) = chebyshev::spectral_bounds(chain);
    // phase t*sqrt(lambda) varies fastest at the bottom of the spectrum
    let oscillation = t * 0.5 * (hi - lo) / (2.0 * lo.max(1e-12).sqrt());
    let u = chebyshev::apply(chain, |lambda| h(lambda.max(0.0).sqrt()), oscillation, n0)?;
    let values: Vec<f64> = xs.iter().map(|&x| u[n0 + x]).collect();
    let outside = omega * omega < lo || omega * omega > hi;
    Ok(finish(u[n0], &values, xs, outside, omega))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Dense eigendecomposition per realization.
    Eigen,
    /// Chebyshev matrix-function action per realization.
    Chebyshev,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub n_sites: usize,
    pub omega0: f64,
    pub coupling: f64,
    pub amplitude: f64,
    pub law: DisorderLaw,
    pub boundary: Boundary,
    pub omega: f64,
    pub time: f64,
    pub base_seed: u64,
    pub route: Route,
}

/// Per-separation statistics of `|Gamma_n0(x)|` over realizations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleEnvelope {
    pub xs: Vec<usize>,
    pub mean: Vec<f64>,
    pub median: Vec<f64>,
    pub q10: Vec<f64>,
    pub q90: Vec<f64>,
    /// `samples[r][i]`: realization `r`, separation `xs[i]`.
    pub samples: Vec<Vec<f64>>,
    /// Signed normalized cross-talk, same layout as `samples`.
    pub signed: Vec<Vec<f64>>,
    pub n0: Vec<usize>,
    pub ill_conditioned: usize,
}

/// Sites kept clear of each end: a tenth of the chain, extended for fixed
/// ends so that resonant excitations reflected at the boundary cannot return
/// to `n0` within time `t`.
pub fn boundary_margin(params: &EnsembleParams) -> usize {
    let base = params.n_sites / 10;
    if params.boundary == Boundary::Periodic {
        return base;
    }
    let v = LatticeSpec::cubic(1, params.omega0, params.coupling)
        .ok()
        .and_then(|s| {
            let band = (s.band_min(), s.band_max());
            (params.omega > band.0 && params.omega < band.1).then(|| {
                let f = |k: f64| s.frequency(&WaveVector::new(&[k])) - params.omega;
                crate::numeric::brent(f, 0.0, std::f64::consts::PI, 1e-14, 0.0)
                    .map(|k| s.gradient(&WaveVector::new(&[k]))[0])
                    .unwrap_or(0.0)
            })
        })
        .unwrap_or(0.0);
    base.max((0.5 * v * params.time).ceil() as usize)
}

/// Draw `n0` for realization `seed`, leaving `margin` sites at both ends and
/// room for the largest separation.
fn draw_n0(seed: u64, n: usize, margin: usize, reach: usize) -> Result<usize> {
    let (lo, hi) = (margin, n.saturating_sub(margin + reach));
    if hi <= lo {
        return invalid(format!(
            "chain of {n} sites cannot fit margin {margin} and separations up to {reach}"
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    Ok(rng.random_range(lo..hi))
}

pub fn ensemble_envelope(params: &EnsembleParams, n_realizations: usize, xs: &[usize]) -> Result<EnsembleEnvelope> {
    if n_realizations == 0 {
        return invalid("need at least one realization");
    }
    let reach = xs.iter().copied().max().unwrap_or(0);
    let mut margin = boundary_margin(params);
    if params.n_sites <= 2 * margin + reach {
        let fallback = params.n_sites / 10;
        warn!("chain too short for a reflection-free margin of {margin}; using {fallback}");
        margin = fallback;
    }
    let runs: Vec<Result<(usize, Vec<ChainCrossTalk>)>> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let seed = params.base_seed.wrapping_add(i);
            let chain = build_chain(
                params.n_sites,
                params.omega0,
                params.coupling,
                params.amplitude,
                seed,
                params.boundary,
                params.law,
            )?;
            let n0 = draw_n0(seed, params.n_sites, margin, reach)?;
            let prof = match params.route {
                Route::Eigen => cross_talk_profile(&diagonalize(&chain)?, params.omega, n0, xs, params.time)?,
                Route::Chebyshev => cross_talk_chebyshev(&chain, params.omega, n0, xs, params.time)?,
            };
            Ok((n0, prof))
        })
        .collect();
    let mut samples = Vec::with_capacity(n_realizations);
    let mut signed = Vec::with_capacity(n_realizations);
    let mut n0s = Vec::with_capacity(n_realizations);
    let mut ill = 0;
    for run in runs {
        let (n0, prof) = run?;
        if prof.iter().any(|p| p.ill_conditioned) {
            ill += 1;
        }
        n0s.push(n0);
        samples.push(prof.iter().map(|p| p.normalized.abs()).collect::<Vec<f64>>());
        signed.push(prof.iter().map(|p| p.normalized).collect::<Vec<f64>>());
    }
    let mut env = EnsembleEnvelope {
        xs: xs.to_vec(),
        mean: Vec::new(),
        median: Vec::new(),
        q10: Vec::new(),
        q90: Vec::new(),
        samples,
        signed,
        n0: n0s,
        ill_conditioned: ill,
    };
    for i in 0..xs.len() {
        let mut col: Vec<f64> = env.samples.iter().map(|s| s[i]).collect();
        env.mean.push(col.iter().sum::<f64>() / col.len() as f64);
        col.sort_by(f64::total_cmp);
        env.median.push(quantile(&col, 0.5));
        env.q10.push(quantile(&col, 0.1));
        env.q90.push(quantile(&col, 0.9));
    }
    Ok(env)
}

/// Percentile bootstrap interval for `mean(b) - mean(a)`.
pub fn bootstrap_mean_difference(a: &[f64], b: &[f64], resamples: usize, confidence: f64, seed: u64) -> (f64, f64) {
    assert!(!a.is_empty() && !b.is_empty(), "bootstrap of an empty sample");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean_of = |s: &[f64], rng: &mut ChaCha8Rng| {
        let mut acc = 0.0;
        for _ in 0..s.len() {
            acc += s[rng.random_range(0..s.len())];
        }
        acc / s.len() as f64
    };
    let mut diffs: Vec<f64> = (0..resamples)
        .map(|_| {
            let ma = mean_of(a, &mut rng);
            mean_of(b, &mut rng) - ma
        })
        .collect();
    diffs.sort_by(f64::total_cmp);
    let tail = 0.5 * (1.0 - confidence);
    (quantile(&diffs, tail), quantile(&diffs, 1.0 - tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn clean(n: usize, boundary: Boundary) -> DisorderedChain {
        build_chain(n, 1.0, 0.75, 0.0, 1, boundary, DisorderLaw::OneSided).unwrap()
    }

    #[test]
    fn construction_of_a_clean_chain() {
        let c = clean(4, Boundary::Fixed);
        let m = c.matrix();
        for i in 0..4 {
            assert_eq!(m[i * 4 + i], 1.0 + 1.5);
            for j in 0..4 {
                let expected = if i == j {
                    2.5
                } else if i.abs_diff(j) == 1 {
                    -0.75
                } else {
                    0.0
                };
                assert_eq!(m[i * 4 + j], expected);
            }
        }
        assert!(c.onsite().iter().all(|&w| w == 0.0));
    }

    #[test]
    fn sampling_is_reproducible_and_scales_with_amplitude() {
        let a = build_chain(2500, 1.0, 0.75, 0.1, 1, Boundary::Fixed, DisorderLaw::OneSided).unwrap();
        let b = build_chain(2500, 1.0, 0.75, 0.1, 1, Boundary::Fixed, DisorderLaw::OneSided).unwrap();
        assert!(a.onsite().iter().zip(b.onsite()).all(|(x, y)| x.to_bits() == y.to_bits()));
        let c = build_chain(2500, 1.0, 0.75, 0.2, 1, Boundary::Fixed, DisorderLaw::OneSided).unwrap();
        for (x, y) in a.onsite().iter().zip(c.onsite()) {
            let d = y - x;
            assert!((0.0..=0.1).contains(&d));
        }
        assert!(a.onsite().iter().all(|&w| (0.0..=0.1).contains(&w)));
        let s = build_chain(1000, 1.0, 0.75, 0.1, 1, Boundary::Fixed, DisorderLaw::Symmetric).unwrap();
        assert!(s.onsite().iter().all(|&w| (-0.05..=0.05).contains(&w)));
        assert!(s.onsite().iter().any(|&w| w < 0.0));
    }

    #[test]
    fn rejects_bad_chains() {
        assert!(build_chain(1, 1.0, 0.75, 0.0, 1, Boundary::Fixed, DisorderLaw::OneSided).is_err());
        assert!(build_chain(2, 1.0, 0.75, 0.0, 1, Boundary::Periodic, DisorderLaw::OneSided).is_err());
        assert!(build_chain(10, 1.0, 0.75, 5.0, 1, Boundary::Fixed, DisorderLaw::Symmetric).is_err());
    }

    #[test]
    fn three_site_sine_spectrum() {
        let b = diagonalize(&clean(3, Boundary::Fixed)).unwrap();
        for (m, w) in b.frequencies().iter().enumerate() {
            let expected = 1.0 + 1.5 - 1.5 * ((m + 1) as f64 * PI / 4.0).cos();
            assert_relative_eq!(w * w, expected, epsilon = 1e-13);
        }
    }

    #[test]
    fn periodic_chain_has_plane_wave_spectrum() {
        let n = 16;
        let b = diagonalize(&clean(n, Boundary::Periodic)).unwrap();
        let spec = LatticeSpec::cubic(1, 1.0, 0.75).unwrap();
        let mut expected: Vec<f64> = (0..n)
            .map(|m| spec.frequency(&WaveVector::new(&[2.0 * PI * m as f64 / n as f64])))
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, e) in b.frequencies().iter().zip(&expected) {
            assert_relative_eq!(*a, *e, epsilon = 1e-12);
        }
        // interior levels come in degenerate pairs
        assert_relative_eq!(b.frequencies()[1], b.frequencies()[2], epsilon = 1e-12);
    }

    #[test]
    fn basis_is_orthonormal_and_complete() {
        let c = build_chain(300, 1.0, 0.75, 0.1, 7, Boundary::Fixed, DisorderLaw::OneSided).unwrap();
        let b = diagonalize(&c).unwrap();
        assert!(b.orthonormality_residual() < 1e-10);
        assert!(b.completeness_residual() < 1e-10);
        let top = (1.0f64 + 3.0 + 0.1).sqrt();
        assert!(b.frequencies().iter().all(|&w| w >= 1.0 - 1e-12 && w <= top + 1e-12));
    }

    #[test]
    fn cross_talk_is_symmetric_and_normalized() {
        let c = build_chain(200, 1.0, 0.75, 0.1, 3, Boundary::Fixed, DisorderLaw::OneSided).unwrap();
        let b = diagonalize(&c).unwrap();
        let (t, omega) = (50.0, 1.2);
        let a = cross_talk_disordered(&b, omega, 80, 13, t).unwrap();
        let h = chain_kernel(omega, t);
        assert_eq!(b.weighted_overlap(80, 93, &h), b.weighted_overlap(93, 80, &h));
        assert_relative_eq!(a.gamma13, b.weighted_overlap(93, 80, &h), max_relative = 1e-14);
        assert_eq!(cross_talk_disordered(&b, omega, 80, 0, t).unwrap().normalized, 1.0);
        assert!(cross_talk_disordered(&b, omega, 190, 20, t).is_err());
    }

    #[test]
    fn chebyshev_route_matches_eigenbasis() {
        for boundary in [Boundary::Fixed, Boundary::Periodic] {
            let c = build_chain(400, 1.0, 0.75, 0.1, 11, boundary, DisorderLaw::OneSided).unwrap();
            let b = diagonalize(&c).unwrap();
            let xs: Vec<usize> = (0..=150).step_by(5).collect();
            let omega = 1.05;
            let e = cross_talk_profile(&b, omega, 120, &xs, 300.0).unwrap();
            let ch = cross_talk_chebyshev(&c, omega, 120, &xs, 300.0).unwrap();
            let scale = e[0].gamma13.abs();
            for (p, q) in e.iter().zip(&ch) {
                assert!((p.gamma13 - q.gamma13).abs() < 1e-9 * scale, "x = {}", p.x);
            }
        }
    }

    #[test]
    fn clean_ensemble_has_no_spread() {
        let params = EnsembleParams {
            n_sites: 400,
            omega0: 1.0,
            coupling: 0.75,
            amplitude: 0.0,
            law: DisorderLaw::OneSided,
            boundary: Boundary::Periodic,
            omega: 1.05,
            time: 200.0,
            base_seed: 5,
            route: Route::Chebyshev,
        };
        let xs = [0, 10, 40];
        let env = ensemble_envelope(&params, 4, &xs).unwrap();
        for i in 0..xs.len() {
            let first = env.samples[0][i];
            assert!(env.samples.iter().all(|s| (s[i] - first).abs() < 1e-10));
            assert!((env.q90[i] - env.q10[i]).abs() < 1e-10);
        }
        let single = ensemble_envelope(&params, 1, &xs).unwrap();
        assert_eq!(single.mean, single.median);
        assert_eq!(single.q10, single.q90);
    }

    #[test]
    fn bootstrap_detects_shift_only_when_present() {
        let a: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        let b: Vec<f64> = a.iter().map(|v| v + 1.0).collect();
        let (lo, _) = bootstrap_mean_difference(&a, &b, 2000, 0.95, 1);
        assert!(lo > 0.8, "{lo}");
        let (lo, hi) = bootstrap_mean_difference(&a, &a, 2000, 0.95, 1);
        assert!(lo < 0.0 && hi > 0.0);
    }
}
