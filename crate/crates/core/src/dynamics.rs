//! Gaussian two-probe dynamics under the quadratic master equation.
//!
//! Quadratures are ordered `(x1, p1, x2, p2)` with `a_i = (x_i + i p_i)/sqrt 2`
//! and `[x, p] = i`, so the vacuum covariance is `I/2`. The covariance is
//! `sigma_ab = <{dv_a, dv_b}>/2`.

use nalgebra::{Complex, DMatrix, DVector, Matrix2, Matrix4, SMatrix, Vector4};
use rayon::prelude::*;
use serde::Serialize;

use crate::damping::{gamma_long_time_profile, lamb_shift_long_time, DampingMatrix, LongTimeMethod, ProbeConfig};
use crate::error::{invalid, Error, Result};
use crate::lattice::{LatticeSpec, Vec3};

const STABILITY_LIMIT: f64 = 0.1;

type C4 = SMatrix<Complex<f64>, 4, 4>;

/// Symplectic form with `[v_a, v_b] = i J_ab`.
fn symplectic() -> Matrix4<f64> {
    let mut j = Matrix4::zeros();
    for m in 0..2 {
        j[(2 * m, 2 * m + 1)] = 1.0;
        j[(2 * m + 1, 2 * m)] = -1.0;
    }
    j
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianState {
    pub mean: Vector4<f64>,
    pub covariance: Matrix4<f64>,
}

impl GaussianState {
    pub fn vacuum() -> Self {
        GaussianState {
            mean: Vector4::zeros(),
            covariance: Matrix4::identity() * 0.5,
        }
    }

    pub fn thermal(n: f64) -> Self {
        GaussianState {
            mean: Vector4::zeros(),
            covariance: Matrix4::identity() * (n + 0.5),
        }
    }

    /// Two-mode squeezed vacuum with squeezing parameter `r`.
    pub fn two_mode_squeezed(r: f64) -> Self {
        let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
        let mut cov = Matrix4::identity() * c;
        cov[(0, 2)] = s;
        cov[(2, 0)] = s;
        cov[(1, 3)] = -s;
        cov[(3, 1)] = -s;
        GaussianState {
            mean: Vector4::zeros(),
            covariance: cov,
        }
    }

    pub fn with_mean(mut self, mean: [f64; 4]) -> Self {
        self.mean = Vector4::from(mean);
        self
    }

    /// Symplectic eigenvalues `(nu_-, nu_+)`.
    pub fn symplectic_eigenvalues(&self) -> (f64, f64) {
        symplectic_pair(&self.covariance, false)
    }

    /// Covariance of `((x1 - x2)/sqrt 2, (p1 - p2)/sqrt 2)`.
    pub fn antisymmetric_block(&self) -> Matrix2<f64> {
        mode_block(&self.covariance, -1.0)
    }

    /// Covariance of `((x1 + x2)/sqrt 2, (p1 + p2)/sqrt 2)`.
    pub fn symmetric_block(&self) -> Matrix2<f64> {
        mode_block(&self.covariance, 1.0)
    }

    fn check(&self) -> Result<()> {
        let sym = (self.covariance - self.covariance.transpose()).abs().max();
        if !self.covariance.iter().all(|v| v.is_finite()) || sym > 1e-12 * self.covariance.abs().max() {
            return invalid("covariance must be finite and symmetric");
        }
        let (nu, _) = self.symplectic_eigenvalues();
        if !(nu >= 0.5 - 1e-8) {
            return invalid(format!("covariance violates the uncertainty relation (nu = {nu})"));
        }
        Ok(())
    }
}

fn mode_block(cov: &Matrix4<f64>, sign: f64) -> Matrix2<f64> {
    let mut out = Matrix2::zeros();
    for a in 0..2 {
        for b in 0..2 {
            out[(a, b)] = 0.5
                * (cov[(a, b)] + sign * cov[(a, b + 2)] + sign * cov[(a + 2, b)] + cov[(a + 2, b + 2)]);
        }
    }
    out
}

/// Symplectic eigenvalues of a two-mode covariance, optionally after partial
/// transposition of the second mode: the singular values of
/// `sigma^1/2 J sigma^1/2`, which come in equal pairs.
fn symplectic_pair(cov: &Matrix4<f64>, transpose_second: bool) -> (f64, f64) {
    let mut c = *cov;
    if transpose_second {
        for i in 0..4 {
            c[(3, i)] = -c[(3, i)];
            c[(i, 3)] = -c[(i, 3)];
        }
    }
    let eig = c.symmetric_eigen();
    let root = eig.eigenvectors
        * Matrix4::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).sqrt()))
        * eig.eigenvectors.transpose();
    let sv = (root * symplectic() * root).singular_values();
    (sv.min(), sv.max())
}

/// `E_N = max(0, -ln(2 nu))` with `nu` the smaller symplectic eigenvalue of
/// the partially transposed covariance.
pub fn log_negativity(state: &GaussianState) -> f64 {
    let (nu, _) = symplectic_pair(&state.covariance, true);
    (-(2.0 * nu).ln()).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionGenerators {
    pub drift: Matrix4<f64>,
    pub diffusion: Matrix4<f64>,
    /// Largest rate in the problem; sets the default step.
    pub rate_scale: f64,
}

/// Drift and diffusion of the first two moments for the coefficients in
/// `damping`, with bare probe frequency `omega`.
///
/// The Hamiltonian is `(omega + dOmega) sum a_i^dag a_i + gamma (a_1^dag a_2 + h.c.)`
/// and the dissipator carries the lowering block `[[G11, G13], [G13, G11]]`
/// and the raising block `[[G22, G24], [G24, G22]]`.
pub fn build_generators(damping: &DampingMatrix, omega: f64) -> Result<EvolutionGenerators> {
    let (g11, g22, g13, g24) = (damping.gamma11(), damping.gamma22(), damping.gamma13(), damping.gamma24());
    if ![g11, g22, g13, g24, omega].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidCoefficients("non-finite coefficient".into()));
    }
    let tol = 1e-12 * g11.abs().max(g22.abs());
    if g11 < 0.0 || g22 < 0.0 || g11 + tol < g13.abs() || g22 + tol < g24.abs() {
        return Err(Error::InvalidCoefficients(format!(
            "damping matrix is not positive semidefinite (G11={g11}, G13={g13}, G22={g22}, G24={g24})"
        )));
    }

    // F = (a1, a1^dag, a2, a2^dag) = T v
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut t = C4::zeros();
    for m in 0..2 {
        t[(2 * m, 2 * m)] = Complex::new(h, 0.0);
        t[(2 * m, 2 * m + 1)] = Complex::new(0.0, h);
        t[(2 * m + 1, 2 * m)] = Complex::new(h, 0.0);
        t[(2 * m + 1, 2 * m + 1)] = Complex::new(0.0, -h);
    }
    let mut gamma = C4::zeros();
    for a in 0..4 {
        for b in 0..4 {
            gamma[(a, b)] = Complex::new(damping.gamma[a][b], 0.0);
        }
    }
    let k = t.adjoint() * gamma * t;
    let re_k = k.map(|z| z.re);
    let im_k = k.map(|z| z.im);

    let w = omega + damping.lamb.delta_omega;
    let mut hm = Matrix4::identity() * w;
    for q in 0..2 {
        hm[(q, q + 2)] = damping.lamb.gamma_coh;
        hm[(q + 2, q)] = damping.lamb.gamma_coh;
    }
    let j = symplectic();
    let drift = j * (hm + im_k);
    let diffusion = j * re_k * j.transpose();

    let eig = diffusion.symmetric_eigenvalues();
    if eig.min() < -1e-12 * eig.abs().max().max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidCoefficients(format!(
            "diffusion matrix is not positive semidefinite (min eigenvalue {})",
            eig.min()
        )));
    }
    Ok(EvolutionGenerators {
        drift,
        diffusion,
        rate_scale: omega.abs().max(g11),
    })
}

impl EvolutionGenerators {
    /// The same generators in a frame rotating at `omega` on both probes.
    /// The dissipator is phase-covariant, so only the drift changes.
    pub fn rotating(&self, omega: f64) -> Self {
        let mut out = self.clone();
        out.drift -= symplectic() * omega;
        out
    }

    /// Step used by the integrators: `0.01 / max(Omega, G11)`.
    pub fn default_step(&self) -> f64 {
        0.01 / self.rate_scale
    }

    /// Right-hand side of the covariance equation.
    pub fn covariance_rate(&self, cov: &Matrix4<f64>) -> Matrix4<f64> {
        self.drift * cov + cov * self.drift.transpose() + self.diffusion
    }

    /// Stationary covariance from `A s + s A^T + D = 0`.
    pub fn steady_state(&self) -> Result<Matrix4<f64>> {
        let a = &self.drift;
        let mut lhs = DMatrix::<f64>::zeros(16, 16);
        // column-major vec: (I (x) A + A (x) I) vec(s)
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    lhs[(i + 4 * j, k + 4 * j)] += a[(i, k)];
                    lhs[(i + 4 * j, i + 4 * k)] += a[(j, k)];
                }
            }
        }
        let rhs = DVector::from_iterator(16, self.diffusion.iter().map(|v| -v));
        let sol = lhs
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numeric("drift has no stable steady state".into()))?;
        let s = Matrix4::from_iterator(sol.iter().copied());
        Ok((s + s.transpose()) * 0.5)
    }
}

fn check_step(drift: &Matrix4<f64>, dt: f64) -> Result<()> {
    let norm = drift.norm();
    if !(dt > 0.0 && dt.is_finite()) || dt * norm >= STABILITY_LIMIT {
        return Err(Error::StepSize {
            dt,
            norm,
            limit: STABILITY_LIMIT,
        });
    }
    Ok(())
}

fn rk4_step(
    state: &GaussianState,
    dt: f64,
    g0: &EvolutionGenerators,
    gh: &EvolutionGenerators,
    g1: &EvolutionGenerators,
) -> GaussianState {
    let f = |g: &EvolutionGenerators, m: &Vector4<f64>, c: &Matrix4<f64>| (g.drift * m, g.covariance_rate(c));
    let (m, c) = (&state.mean, &state.covariance);
    let (k1m, k1c) = f(g0, m, c);
    let (k2m, k2c) = f(gh, &(m + k1m * (dt / 2.0)), &(c + k1c * (dt / 2.0)));
    let (k3m, k3c) = f(gh, &(m + k2m * (dt / 2.0)), &(c + k2c * (dt / 2.0)));
    let (k4m, k4c) = f(g1, &(m + k3m * dt), &(c + k3c * dt));
    let cov = c + (k1c + k2c * 2.0 + k3c * 2.0 + k4c) * (dt / 6.0);
    GaussianState {
        mean: m + (k1m + k2m * 2.0 + k3m * 2.0 + k4m) * (dt / 6.0),
        covariance: (cov + cov.transpose()) * 0.5,
    }
}

/// Integrate to time `t` with fixed RK4 steps of at most `dt`; `observer` is
/// called with `(time, state)` at the start and after every step.
pub fn evolve_observed<F: FnMut(f64, &GaussianState)>(
    state: &GaussianState,
    generators: &EvolutionGenerators,
    t: f64,
    dt: f64,
    mut observer: F,
) -> Result<GaussianState> {
    state.check()?;
    if !(t >= 0.0 && t.is_finite()) {
        return invalid(format!("evolution time must be non-negative (got {t})"));
    }
    check_step(&generators.drift, dt)?;
    let steps = (t / dt).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { t / steps as f64 };
    let mut s = state.clone();
    observer(0.0, &s);
    for i in 0..steps {
        s = rk4_step(&s, h, generators, generators, generators);
        observer((i + 1) as f64 * h, &s);
    }
    Ok(s)
}

pub fn evolve(state: &GaussianState, generators: &EvolutionGenerators, t: f64, dt: f64) -> Result<GaussianState> {
    evolve_observed(state, generators, t, dt, |_, _| {})
}

/// RK4 with generators rebuilt from `generators_at(time)` at every stage,
/// for time-dependent coefficients.
pub fn evolve_time_dependent<G>(state: &GaussianState, generators_at: G, t: f64, dt: f64) -> Result<GaussianState>
where
    G: Fn(f64) -> Result<EvolutionGenerators>,
{
    state.check()?;
    if !(t >= 0.0 && t.is_finite()) {
        return invalid(format!("evolution time must be non-negative (got {t})"));
    }
    let steps = (t / dt).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { t / steps as f64 };
    let mut s = state.clone();
    let mut g0 = generators_at(0.0)?;
    for i in 0..steps {
        let t0 = i as f64 * h;
        let gh = generators_at(t0 + h / 2.0)?;
        let g1 = generators_at(t0 + h)?;
        for g in [&g0, &gh, &g1] {
            check_step(&g.drift, h)?;
        }
        s = rk4_step(&s, h, &g0, &gh, &g1);
        g0 = g1;
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalRow {
    pub separation: Vec3,
    pub normalized_cross_damping: f64,
    pub log_negativity: f64,
    pub min_symplectic_eigenvalue: f64,
}

/// Log-negativity at `t_final` of a two-mode squeezed state (squeezing
/// `squeezing`) for each probe separation, using long-time coefficients.
/// Evolution runs in the frame rotating at the probe frequency.
pub fn survival_scan(
    spec: &LatticeSpec,
    probes: &ProbeConfig,
    method: LongTimeMethod,
    lamb_grid: usize,
    separations: &[Vec3],
    t_final: f64,
    squeezing: f64,
) -> Result<Vec<SurvivalRow>> {
    let mut rates = gamma_long_time_profile(spec, probes, method, separations)?;
    let lamb = lamb_shift_long_time(spec, probes, lamb_grid, separations)?;
    for (d, l) in rates.iter_mut().zip(lamb) {
        d.lamb = l;
    }
    let start = GaussianState::two_mode_squeezed(squeezing);
    rates
        .par_iter()
        .map(|d| {
            let g = build_generators(d, probes.omega)?.rotating(probes.omega);
            let mut min_nu = f64::INFINITY;
            let end = evolve_observed(&start, &g, t_final, g.default_step(), |_, s| {
                min_nu = min_nu.min(s.symplectic_eigenvalues().0);
            })?;
            Ok(SurvivalRow {
                separation: d.separation,
                normalized_cross_damping: d.normalized(),
                log_negativity: log_negativity(&end),
                min_symplectic_eigenvalue: min_nu,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::damping::{Estimator, LambShift};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn rates(g11: f64, g22: f64, g13: f64, g24: f64, lamb: LambShift) -> DampingMatrix {
        DampingMatrix::from_rates(
            g11,
            g22,
            g13,
            g24,
            lamb,
            [0.0; 3],
            None,
            Estimator::Manifold { resolution: 0 },
        )
    }

    #[test]
    fn squeezed_state_negativity() {
        for r in [0.0, 0.3, 1.0] {
            let s = GaussianState::two_mode_squeezed(r);
            let (nu, _) = symplectic_pair(&s.covariance, true);
            assert_relative_eq!(nu, (-2.0 * r).exp() / 2.0, max_relative = 1e-12);
            assert_relative_eq!(log_negativity(&s), 2.0 * r, epsilon = 1e-12);
            assert_relative_eq!(s.symplectic_eigenvalues().0, 0.5, epsilon = 1e-12);
        }
        assert_eq!(log_negativity(&GaussianState::vacuum()), 0.0);
    }

    #[test]
    fn drift_matches_heisenberg_equations() {
        // d<a>/dt = (-i h - (M - N)/2) <a>
        let lamb = LambShift {
            delta_omega: 0.03,
            gamma_coh: -0.02,
        };
        let d = rates(0.2, 0.05, 0.1, 0.04, lamb);
        let g = build_generators(&d, 1.3).unwrap();
        let w = 1.33;
        let gm = [[-0.5 * 0.15, -0.5 * 0.06], [-0.5 * 0.06, -0.5 * 0.15]];
        let hm = [[w, -0.02], [-0.02, w]];
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(g.drift[(2 * i, 2 * j)], gm[i][j], epsilon = 1e-14);
                assert_relative_eq!(g.drift[(2 * i + 1, 2 * j + 1)], gm[i][j], epsilon = 1e-14);
                assert_relative_eq!(g.drift[(2 * i, 2 * j + 1)], hm[i][j], epsilon = 1e-14);
                assert_relative_eq!(g.drift[(2 * i + 1, 2 * j)], -hm[i][j], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn independent_baths_damp_each_mean_at_half_rate() {
        let g = build_generators(&rates(0.1, 0.0, 0.0, 0.0, LambShift::default()), 1.0).unwrap();
        let start = GaussianState::vacuum().with_mean([1.0, 0.0, 0.0, 0.0]);
        let end = evolve(&start, &g, 10.0, g.default_step()).unwrap();
        let amp = (end.mean[0].powi(2) + end.mean[1].powi(2)).sqrt();
        assert_relative_eq!(amp, (-0.05f64 * 10.0).exp(), max_relative = 1e-9);
        assert!(end.mean[2].abs() < 1e-14);
    }

    #[test]
    fn detailed_balance_fixed_point() {
        let n = 0.7;
        let g11 = 0.1;
        let g = build_generators(&rates(g11, g11 * n / (n + 1.0), 0.0, 0.0, LambShift::default()), 1.0).unwrap();
        let s = g.steady_state().unwrap();
        assert_relative_eq!(s, Matrix4::identity() * (n + 0.5), epsilon = 1e-12);
        let end = evolve(&GaussianState::vacuum(), &g, 600.0, g.default_step()).unwrap();
        assert_relative_eq!(end.covariance, Matrix4::identity() * (n + 0.5), epsilon = 1e-8);
    }

    #[test]
    fn common_bath_protects_antisymmetric_mode() {
        let lamb = LambShift {
            delta_omega: -0.01,
            gamma_coh: -0.01,
        };
        let g = build_generators(&rates(0.05, 0.0, 0.05, 0.0, lamb), 1.0)
            .unwrap()
            .rotating(1.0);
        let start = GaussianState::two_mode_squeezed(1.0);
        let before = start.antisymmetric_block();
        let mut worst: f64 = 0.0;
        let end = evolve_observed(&start, &g, 100.0, 0.01, |_, s| {
            worst = worst.max(mode_block(&g.covariance_rate(&s.covariance), -1.0).abs().max());
        })
        .unwrap();
        assert!(worst < 1e-12, "{worst}");
        assert_relative_eq!(end.antisymmetric_block(), before, epsilon = 1e-10);
        // the symmetric mode relaxes to vacuum at rate 2 G11
        let trace = end.symmetric_block().trace();
        let expected = 1.0 + (2.0f64.cosh() - 1.0) * (-2.0 * 0.05 * 100.0f64).exp();
        assert_relative_eq!(trace, expected, epsilon = 1e-8);
    }

    #[test]
    fn invalid_coefficients_are_rejected() {
        assert!(matches!(
            build_generators(&rates(0.1, 0.0, 0.2, 0.0, LambShift::default()), 1.0),
            Err(Error::InvalidCoefficients(_))
        ));
        assert!(matches!(
            build_generators(&rates(0.1, 0.05, 0.0, -0.06, LambShift::default()), 1.0),
            Err(Error::InvalidCoefficients(_))
        ));
    }

    #[test]
    fn step_size_and_zero_time() {
        let g = build_generators(&rates(0.1, 0.0, 0.0, 0.0, LambShift::default()), 1.0).unwrap();
        let s = GaussianState::two_mode_squeezed(0.5).with_mean([0.3, 0.1, 0.0, -0.2]);
        assert_eq!(evolve(&s, &g, 0.0, 0.01).unwrap(), s);
        assert!(matches!(evolve(&s, &g, 1.0, 1.0), Err(Error::StepSize { .. })));
    }

    #[test]
    fn time_dependent_matches_constant() {
        let g = build_generators(&rates(0.1, 0.02, 0.05, 0.01, LambShift::default()), 1.0).unwrap();
        let s = GaussianState::two_mode_squeezed(0.5);
        let a = evolve(&s, &g, 5.0, 0.01).unwrap();
        let b = evolve_time_dependent(&s, |_| Ok(g.clone()), 5.0, 0.01).unwrap();
        assert_relative_eq!(a.covariance, b.covariance, epsilon = 1e-14);
    }

    #[test]
    fn thermal_separate_baths_kill_entanglement() {
        let n = 1.0;
        let g = build_generators(&rates(0.1, 0.1 * n / (n + 1.0), 0.0, 0.0, LambShift::default()), 1.0).unwrap();
        let end = evolve(&GaussianState::two_mode_squeezed(1.0), &g, 100.0, 0.01).unwrap();
        assert_eq!(log_negativity(&end), 0.0);
    }

    #[test]
    fn chain_survival_is_periodic_in_distance() {
        let spec = LatticeSpec::cubic(1, 1.0, 0.75).unwrap();
        let k = 0.8f64;
        let omega = spec.frequency(&crate::lattice::WaveVector::new(&[k]));
        let probes = ProbeConfig::new(omega, 0.05);
        let period = 2.0 * std::f64::consts::PI / k;
        let xs: Vec<Vec3> = [0.0, period, 2.0 * period, 0.25 * period]
            .iter()
            .map(|x| [*x, 0.0, 0.0])
            .collect();
        let g11 = gamma_long_time_profile(&spec, &probes, LongTimeMethod::Manifold { resolution: 64 }, &xs[..1])
            .unwrap()[0]
            .gamma11();
        let rows = survival_scan(
            &spec,
            &probes,
            LongTimeMethod::Manifold { resolution: 64 },
            1 << 12,
            &xs,
            3.0 / g11,
            1.0,
        )
        .unwrap();
        let e0 = rows[0].log_negativity;
        assert!(e0 > 0.5, "{rows:?}");
        for r in &rows[1..3] {
            assert!((r.log_negativity - e0).abs() < 0.05 * e0, "{rows:?}");
        }
        assert!(rows[3].log_negativity < 0.2 * e0, "{rows:?}");
        assert!(rows.iter().all(|r| r.min_symplectic_eigenvalue >= 0.5 - 1e-8));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn evolution_is_physical_and_relaxes(
            g11 in 0.02f64..0.2,
            c13 in -0.95f64..0.95,
            n in prop_oneof![Just(0.0), 0.0f64..2.0],
            r in 0.0f64..1.5,
        ) {
            let g22 = g11 * n / (n + 1.0);
            let d = rates(g11, g22, c13 * g11, c13 * g22, LambShift { delta_omega: 0.01, gamma_coh: 0.005 });
            let g = build_generators(&d, 1.0).unwrap().rotating(1.0);
            prop_assert!(g.diffusion.symmetric_eigenvalues().min() > -1e-12);
            // covariance relaxes at twice the slowest mean rate; at T = 0 this is G11 - |G13|
            let slowest = g.drift.complex_eigenvalues().iter().map(|z| -z.re).fold(f64::INFINITY, f64::min);
            let t = 10.0 / slowest;
            if n == 0.0 {
                prop_assert!((2.0 * slowest - (g11 - (c13 * g11).abs())).abs() < 1e-12);
            }
            let mut min_nu = f64::INFINITY;
            let end = evolve_observed(&GaussianState::two_mode_squeezed(r), &g, t, 0.05, |_, s| {
                min_nu = min_nu.min(s.symplectic_eigenvalues().0);
            }).unwrap();
            prop_assert!(min_nu >= 0.5 - 1e-8, "{}", min_nu);
            let fixed = g.steady_state().unwrap();
            let residual = g.covariance_rate(&end.covariance).abs().max();
            prop_assert!(residual < 1e-6, "{}", residual);
            prop_assert!((end.covariance - fixed).abs().max() < 1e-4 * fixed.abs().max().max(1.0));
        }

        #[test]
        fn means_evolve_linearly(a in prop::array::uniform4(-1.0f64..1.0), b in prop::array::uniform4(-1.0f64..1.0)) {
            let g = build_generators(&rates(0.1, 0.03, 0.06, 0.02, LambShift::default()), 1.0).unwrap();
            let ev = |m: [f64; 4]| evolve(&GaussianState::vacuum().with_mean(m), &g, 3.0, 0.01).unwrap().mean;
            let sum = ev([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]);
            prop_assert!((sum - ev(a) - ev(b)).abs().max() < 1e-13);
        }
    }
}
