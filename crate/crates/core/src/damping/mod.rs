//! Master-equation coefficients of two identical probes coupled to the same
//! crystal: self- and cross-damping rates at finite time and in the long-time
//! limit, Lamb-shift terms, contact form factors and closed-form limits.
//!
//! Jump operators are ordered `F = (a1, a1^dag, a2, a2^dag)`, so `gamma[0][0]`
//! is the emission rate of probe 1, `gamma[1][1]` its absorption rate and
//! `gamma[0][2]` the emission cross term.

mod analytic;
mod form_factor;
pub(crate) mod projection;

use std::f64::consts::PI;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{bz_domain, norm, resonant_manifold, BzGrid, LatticeSpec, Symmetry, Vec3, WaveVector};
use crate::numeric::{bose_occupation, lamb_kernel, sinc_kernel, Compensated};

pub use analytic::{analytic_isotropic, analytic_special_2d, Special2d};
pub use form_factor::{Contact, FormFactor};

/// Two identical probes at frequency `omega`, separated by `separation`
/// (lattice units), coupled with strength `lambda` to a bath at `temperature`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub omega: f64,
    pub lambda: f64,
    pub separation: Vec3,
    pub temperature: f64,
    pub contact: Contact,
}

impl ProbeConfig {
    pub fn new(omega: f64, lambda: f64) -> Self {
        ProbeConfig {
            omega,
            lambda,
            separation: [0.0; 3],
            temperature: 0.0,
            contact: Contact::Point,
        }
    }

    pub fn with_separation(mut self, r: Vec3) -> Self {
        self.separation = r;
        self
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn with_contact(mut self, contact: Contact) -> Self {
        self.contact = contact;
        self
    }

    pub fn validate(&self, spec: &LatticeSpec) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return invalid(format!("probe frequency must be positive (got {})", self.omega));
        }
        if !self.lambda.is_finite() {
            return invalid("coupling lambda must be finite");
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return invalid(format!("temperature must be non-negative (got {})", self.temperature));
        }
        if self.separation.iter().any(|x| !x.is_finite()) {
            return invalid("separation must be finite");
        }
        if self.separation[spec.dimension()..].iter().any(|&x| x != 0.0) {
            return invalid(format!(
                "separation {:?} has components beyond dimension {}",
                self.separation,
                spec.dimension()
            ));
        }
        if self.lambda * self.lambda > 0.1 * self.omega * spec.omega0() {
            warn!(
                "lambda^2 = {} is not small against Omega*omega0 = {}; the weak-coupling \
                 master equation may be inaccurate",
                self.lambda * self.lambda,
                self.omega * spec.omega0()
            );
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Estimator {
    /// Grid quadrature with the finite-time sinc kernel.
    FiniteTimeGrid { n_per_axis: usize },
    /// Explicit integration over the resonant manifold.
    Manifold { resolution: usize },
    /// Grid quadrature with a Gaussian-broadened delta function.
    BroadenedGrid { n_per_axis: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LongTimeMethod {
    Manifold { resolution: usize },
    BroadenedGrid { n_per_axis: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LambShift {
    pub delta_omega: f64,
    pub gamma_coh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DampingMatrix {
    pub gamma: [[f64; 4]; 4],
    pub lamb: LambShift,
    pub separation: Vec3,
    /// Evaluation time, `None` in the long-time limit.
    pub time: Option<f64>,
    pub estimator: Estimator,
}

impl DampingMatrix {
    pub fn from_rates(
        g11: f64,
        g22: f64,
        g13: f64,
        g24: f64,
        lamb: LambShift,
        separation: Vec3,
        time: Option<f64>,
        estimator: Estimator,
    ) -> Self {
        let mut gamma = [[0.0; 4]; 4];
        gamma[0][0] = g11;
        gamma[2][2] = g11;
        gamma[1][1] = g22;
        gamma[3][3] = g22;
        gamma[0][2] = g13;
        gamma[2][0] = g13;
        gamma[1][3] = g24;
        gamma[3][1] = g24;
        DampingMatrix {
            gamma,
            lamb,
            separation,
            time,
            estimator,
        }
    }

    pub fn gamma11(&self) -> f64 {
        self.gamma[0][0]
    }

    pub fn gamma22(&self) -> f64 {
        self.gamma[1][1]
    }

    pub fn gamma13(&self) -> f64 {
        self.gamma[0][2]
    }

    pub fn gamma24(&self) -> f64 {
        self.gamma[1][3]
    }

    /// `Gamma13 / Gamma11`; zero when there is no self-damping.
    pub fn normalized(&self) -> f64 {
        if self.gamma11() == 0.0 {
            0.0
        } else {
            self.gamma13() / self.gamma11()
        }
    }
}

fn validate_separations(spec: &LatticeSpec, rs: &[Vec3]) -> Result<()> {
    for r in rs {
        if r.iter().any(|x| !x.is_finite()) || r[spec.dimension()..].iter().any(|&x| x != 0.0) {
            return invalid(format!("invalid separation {r:?} for a {}D lattice", spec.dimension()));
        }
    }
    Ok(())
}

/// Grid points per axis needed to resolve the resonance at time `t`:
/// `v * dk * t <= pi/2` with `v` the largest group speed on the resonant
/// manifold (or over the whole band when `omega` lies outside it).
pub fn suggested_grid(spec: &LatticeSpec, omega: f64, t: f64) -> usize {
    let v = resonance_speed(spec, omega);
    let cell = match spec.symmetry() {
        Symmetry::Cubic => 2.0 * PI,
        Symmetry::Triangular => 4.0 * PI / 3f64.sqrt(),
    };
    let n = (2.0 * v * cell * t / PI).ceil() as usize;
    (n.max(16) + 1) & !1
}

fn resonance_speed(spec: &LatticeSpec, omega: f64) -> f64 {
    let inside = omega > spec.band_min() && omega < spec.band_max();
    let res = if spec.dimension() == 3 { 32 } else { 256 };
    match inside.then(|| resonant_manifold(spec, omega, res)) {
        Some(Ok(m)) => m.max_grad_norm(),
        _ => spec.max_group_velocity(),
    }
}

/// Rejects grids whose node spacing cannot resolve the sinc kernel at `t`.
pub fn check_resolution(spec: &LatticeSpec, omega: f64, t: f64, n_per_axis: usize) -> Result<()> {
    let grid = bz_domain(spec, n_per_axis)?;
    let v = resonance_speed(spec, omega);
    let phase = v * grid.spacing() * t;
    if phase > PI / 2.0 {
        return Err(Error::Resolution {
            reason: format!(
                "frequency spacing near resonance times t is {phase:.3} > pi/2 at t = {t}"
            ),
            suggested: suggested_grid(spec, omega, t),
        });
    }
    Ok(())
}

/// Sums `S_c(r) = sum_k K_c(k) Phi(k) cos(k.r)` for `rs` with `r = 0`
/// prepended, using the separable path where the lattice and contact allow.
fn project<const NK: usize, F>(
    grid: &BzGrid,
    form: &FormFactor,
    kernel: F,
    rs: &[Vec3],
) -> Vec<[f64; NK]>
where
    F: Fn(&WaveVector) -> [f64; NK] + Sync,
{
    let mut all = Vec::with_capacity(rs.len() + 1);
    all.push([0.0; 3]);
    all.extend_from_slice(rs);
    let spec = grid.spec();
    if spec.symmetry() == Symmetry::Cubic && form.is_separable() && grid.n_per_axis() % 2 == 0 {
        let axis = |k: f64| form.axis_factor(k);
        projection::separable_even(grid, &axis, kernel, &all)
    } else if form.is_point() {
        projection::direct(grid, kernel, &all)
    } else {
        projection::direct(
            grid,
            |k: &WaveVector| {
                let phi = form.eval(k);
                kernel(k).map(|v| v * phi)
            },
            &all,
        )
    }
}

fn warn_light_cone(spec: &LatticeSpec, t: f64, n_per_axis: usize, rs: &[Vec3]) {
    if t <= 0.0 {
        return;
    }
    let reach = rs.iter().map(norm).fold(0.0, f64::max) + spec.max_group_velocity() * t;
    if (n_per_axis as f64) < reach {
        warn!(
            "grid of {n_per_axis} points per axis is shorter than the light cone \
             |r| + v_max t = {reach:.1}; periodic images may contaminate the result"
        );
    }
}

/// Finite-time coefficients at the probe separation.
pub fn gamma_finite_time(
    spec: &LatticeSpec,
    probes: &ProbeConfig,
    t: f64,
    n_per_axis: usize,
) -> Result<DampingMatrix> {
    let mut out = gamma_finite_time_profile(spec, probes, t, n_per_axis, &[probes.separation])?;
    Ok(out.remove(0))
}

/// Finite-time coefficients for every separation in `rs` (the separation in
/// `probes` is ignored). Self-terms are shared by all entries.
pub fn gamma_finite_time_profile(
    spec: &LatticeSpec,
    probes: &ProbeConfig,
    t: f64,
    n_per_axis: usize,
    rs: &[Vec3],
) -> Result<Vec<DampingMatrix>> {
    probes.validate(spec)?;
    validate_separations(spec, rs)?;
    if !(t >= 0.0 && t.is_finite()) {
        return invalid(format!("time must be non-negative (got {t})"));
    }
    let grid = bz_domain(spec, n_per_axis)?;
    let form = FormFactor::new(spec, &probes.contact)?;
    let estimator = Estimator::FiniteTimeGrid { n_per_axis };
    if t == 0.0 {
        return Ok(rs
            .iter()
            .map(|&r| DampingMatrix::from_rates(0.0, 0.0, 0.0, 0.0, LambShift::default(), r, Some(0.0), estimator))
            .collect());
    }
    check_resolution(spec, probes.omega, t, n_per_axis)?;
    warn_light_cone(spec, t, n_per_axis, rs);

    let (omega, temp) = (probes.omega, probes.temperature);
    let kernel = |k: &WaveVector| {
        let w = spec.frequency(k);
        let detuning = omega - w;
        let s = sinc_kernel(detuning, t) / w;
        let n = bose_occupation(w, temp);
        [(n + 1.0) * s, n * s, lamb_kernel(detuning, t) / w]
    };
    let sums = project(&grid, &form, kernel, rs);
    let lam2 = probes.lambda * probes.lambda;
    let rate = lam2 / (2.0 * omega * grid.len() as f64);
    let shift = -lam2 / (4.0 * omega * grid.len() as f64);
    let own = sums[0];
    Ok(rs
        .iter()
        .zip(&sums[1..])
        .map(|(&r, s)| {
            DampingMatrix::from_rates(
                rate * own[0],
                rate * own[1],
                rate * s[0],
                rate * s[1],
                LambShift {
                    delta_omega: shift * own[2],
                    gamma_coh: shift * s[2],
                },
                r,
                Some(t),
                estimator,
            )
        })
        .collect())
}

/// Finite-time Lamb shift `(Delta Omega, gamma)` at the probe separation.
pub fn lamb_shift(spec: &LatticeSpec, probes: &ProbeConfig, t: f64, n_per_axis: usize) -> Result<LambShift> {
    Ok(gamma_finite_time(spec, probes, t, n_per_axis)?.lamb)
}

/// Long-time coefficients at the probe separation.
pub fn gamma_long_time(spec: &LatticeSpec, probes: &ProbeConfig, method: LongTimeMethod) -> Result<DampingMatrix> {
    let mut out = gamma_long_time_profile(spec, probes, method, &[probes.separation])?;
    Ok(out.remove(0))
}

/// Grid used for the principal-value Lamb shift in the long-time limit.
pub fn default_lamb_grid(spec: &LatticeSpec) -> usize {
    match spec.dimension() {
        1 => 1 << 14,
        2 => 512,
        _ => 64,
    }
}

/// Per-node width of the broadened delta function: three times the local
/// frequency spacing, with a curvature term that keeps it finite at
/// stationary points of the dispersion.
struct Broadening {
    dk: f64,
    curvature: f64,
}

impl Broadening {
    fn new(spec: &LatticeSpec, grid: &BzGrid) -> Self {
        let p = match spec.symmetry() {
            Symmetry::Cubic => spec.dimension() as f64 * spec.coupling(),
            Symmetry::Triangular => 6.0 * spec.coupling(),
        };
        let v = spec.max_group_velocity();
        Broadening {
            dk: grid.spacing(),
            curvature: (p + v * v) / spec.omega0(),
        }
    }

    #[inline]
    fn width(&self, grad: f64) -> f64 {
        3.0 * (grad * self.dk + 0.5 * self.curvature * self.dk * self.dk)
    }
}

/// Principal-value estimate of the long-time Lamb shift.
pub fn lamb_shift_long_time(
    spec: &LatticeSpec,
    probes: &ProbeConfig,
    n_per_axis: usize,
    rs: &[Vec3],
) -> Result<Vec<LambShift>> {
    probes.validate(spec)?;
    validate_separations(spec, rs)?;
    let grid = bz_domain(spec, n_per_axis)?;
    let form = FormFactor::new(spec, &probes.contact)?;
    let broad = Broadening::new(spec, &grid);
    let omega = probes.omega;
    let kernel = |k: &WaveVector| {
        let w = spec.frequency(k);
        let eta = broad.width(norm(&spec.gradient(k)));
        let d = omega - w;
        [d / (d * d + eta * eta) / w]
    };
    let sums = project(&grid, &form, kernel, rs);
    let shift = -probes.lambda * probes.lambda / (4.0 * omega * grid.len() as f64);
    Ok(sums[1..]
        .iter()
        .map(|s| LambShift {
            delta_omega: shift * sums[0][0],
            gamma_coh: shift * s[0],
        })
        .collect())
}

/// Long-time coefficients for every separation in `rs`.
///
/// The delta-constrained integral is evaluated at zero temperature and the
/// thermal factor `n(Omega) + 1` (emission) or `n(Omega)` (absorption) is
/// applied afterwards; it does not depend on the separation.
pub fn gamma_long_time_profile(
    spec: &LatticeSpec,
    probes: &ProbeConfig,
    method: LongTimeMethod,
    rs: &[Vec3],
) -> Result<Vec<DampingMatrix>> {
    probes.validate(spec)?;
    validate_separations(spec, rs)?;
    let omega = probes.omega;
    let (lo, hi) = (spec.band_min(), spec.band_max());
    if omega < lo * (1.0 - 1e-12) || omega > hi * (1.0 + 1e-12) {
        return Err(Error::OutOfBand {
            omega,
            band_min: lo,
            band_max: hi,
        });
    }
    let form = FormFactor::new(spec, &probes.contact)?;
    let lam2 = probes.lambda * probes.lambda;
    let volume = spec.cell_volume();

    let (own, cross, estimator) = match method {
        LongTimeMethod::Manifold { resolution } => {
            let m = resonant_manifold(spec, omega, resolution)?;
            let phis: Vec<(WaveVector, f64)> = m
                .iter_full()
                .map(|e| (e.k, e.weight() * form.eval(&e.k)))
                .collect();
            let integral = |r: &Vec3| {
                let mut acc = Compensated::default();
                for (k, w) in &phis {
                    acc.add(w * k.dot(r).cos());
                }
                acc.value()
            };
            let pre = PI * lam2 / (2.0 * omega * omega * volume);
            let own = pre * integral(&[0.0; 3]);
            let cross: Vec<f64> = rs.iter().map(|r| pre * integral(r)).collect();
            (own, cross, Estimator::Manifold { resolution })
        }
        LongTimeMethod::BroadenedGrid { n_per_axis } => {
            let grid = bz_domain(spec, n_per_axis)?;
            let broad = Broadening::new(spec, &grid);
            let kernel = |k: &WaveVector| {
                let w = spec.frequency(k);
                let eta = broad.width(norm(&spec.gradient(k)));
                let d = (omega - w) / eta;
                if d.abs() > 9.0 {
                    return [0.0];
                }
                [PI * (-0.5 * d * d).exp() / ((2.0 * PI).sqrt() * eta * w)]
            };
            let sums = project(&grid, &form, kernel, rs);
            let pre = lam2 / (2.0 * omega * grid.len() as f64);
            let cross = sums[1..].iter().map(|s| pre * s[0]).collect();
            (pre * sums[0][0], cross, Estimator::BroadenedGrid { n_per_axis })
        }
    };

    let lamb = lamb_shift_long_time(spec, probes, default_lamb_grid(spec), rs)?;
    let n = bose_occupation(omega, probes.temperature);
    Ok(rs
        .iter()
        .zip(cross)
        .zip(lamb)
        .map(|((&r, c), l)| {
            DampingMatrix::from_rates((n + 1.0) * own, n * own, (n + 1.0) * c, n * c, l, r, None, estimator)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn chain() -> LatticeSpec {
        LatticeSpec::cubic(1, 1.0, 0.75).unwrap()
    }

    fn chain_omega() -> f64 {
        chain().frequency(&WaveVector::new(&[0.164]))
    }

    fn square() -> LatticeSpec {
        LatticeSpec::cubic(2, 1.0, 3.0 / 16.0).unwrap()
    }

    #[test]
    fn zero_time_gives_zero_coefficients() {
        let p = ProbeConfig::new(1.5, 0.01).with_separation([2.0, 1.0, 0.0]);
        let m = gamma_finite_time(&square(), &p, 0.0, 32).unwrap();
        assert!(m.gamma.iter().flatten().all(|&g| g == 0.0));
        assert_eq!(m.lamb, LambShift::default());
    }

    #[test]
    fn matrix_symmetries_and_zero_temperature() {
        let p = ProbeConfig::new(1.5, 0.01).with_separation([2.0, 1.0, 0.0]);
        let m = gamma_finite_time(&square(), &p, 20.0, 128).unwrap();
        assert_eq!(m.gamma[0][0], m.gamma[2][2]);
        assert_eq!(m.gamma[0][2], m.gamma[2][0]);
        assert_eq!(m.gamma[1][3], m.gamma[3][1]);
        assert_eq!(m.gamma22(), 0.0);
        assert_eq!(m.gamma24(), 0.0);
    }

    #[test]
    fn zero_separation_lamb_terms_coincide() {
        let p = ProbeConfig::new(chain_omega(), 0.01);
        let l = lamb_shift(&chain(), &p, 100.0, 4096).unwrap();
        assert_eq!(l.delta_omega, l.gamma_coh);
        assert!(l.delta_omega != 0.0);
    }

    #[test]
    fn coarse_grid_is_a_resolution_error() {
        let p = ProbeConfig::new(chain_omega(), 0.01);
        match gamma_finite_time(&chain(), &p, 1e4, 256) {
            Err(Error::Resolution { suggested, .. }) => {
                assert!(suggested >= 4800 && suggested % 2 == 0, "suggested {suggested}");
                assert!(gamma_finite_time(&chain(), &p, 1e4, suggested).is_ok());
            }
            other => panic!("expected resolution error, got {other:?}"),
        }
    }

    #[test]
    fn chain_finite_time_approaches_cosine() {
        // the band-bottom edge term decays only as t^(-1/2)
        let p = ProbeConfig::new(chain_omega(), 0.01);
        let rs: Vec<Vec3> = (0..=100).map(|x| [x as f64, 0.0, 0.0]).collect();
        let err = |t: f64, n: usize| {
            gamma_finite_time_profile(&chain(), &p, t, n, &rs)
                .unwrap()
                .iter()
                .map(|m| (m.normalized() - (0.164 * m.separation[0]).cos()).abs())
                .fold(0.0, f64::max)
        };
        let (e3, e4, e5) = (err(1e3, 1 << 13), err(1e4, 1 << 14), err(1e5, 1 << 17));
        assert!(e3 > e4 && e4 > e5, "{e3} {e4} {e5}");
        assert!(e5 < 0.04, "{e5}");
    }

    #[test]
    fn chain_manifold_is_exact_cosine() {
        let p = ProbeConfig::new(chain_omega(), 0.01);
        let rs: Vec<Vec3> = (0..50).map(|x| [7.3 * x as f64, 0.0, 0.0]).collect();
        let prof = gamma_long_time_profile(&chain(), &p, LongTimeMethod::Manifold { resolution: 8 }, &rs).unwrap();
        for m in &prof {
            assert_relative_eq!(m.normalized(), (0.164 * m.separation[0]).cos(), epsilon = 1e-10);
        }
        let m0 = &prof[0];
        // closed form: pi lambda^2 / (2 Omega^2 2 pi) * 2 / |omega'|
        let v = chain().gradient(&WaveVector::new(&[0.164]))[0];
        let expected = PI * 1e-4 / (2.0 * p.omega * p.omega * 2.0 * PI) * 2.0 / v;
        assert_relative_eq!(m0.gamma11(), expected, max_relative = 1e-10);
    }

    #[test]
    fn long_time_limit_of_finite_time_rate() {
        // the sinc kernel tends to pi delta, so Gamma11(t) approaches the
        // manifold value
        let p = ProbeConfig::new(chain_omega(), 0.01);
        let lt = gamma_long_time(&chain(), &p, LongTimeMethod::Manifold { resolution: 8 }).unwrap();
        let ft = gamma_finite_time(&chain(), &p, 1e5, 1 << 17).unwrap();
        assert_relative_eq!(ft.gamma11(), lt.gamma11(), max_relative = 0.03);
    }

    #[test]
    fn detailed_balance_at_long_times() {
        let temp = 0.8;
        let p = ProbeConfig::new(1.5, 0.01).with_temperature(temp).with_separation([3.0, 1.0, 0.0]);
        let m = gamma_long_time(&square(), &p, LongTimeMethod::Manifold { resolution: 256 }).unwrap();
        let n = bose_occupation(1.5, temp);
        assert_relative_eq!(m.gamma22() / m.gamma11(), n / (n + 1.0), max_relative = 1e-12);
        assert_relative_eq!(m.gamma24() / m.gamma13(), n / (n + 1.0), max_relative = 1e-12);
    }

    #[test]
    fn out_of_band_long_time_is_an_error() {
        let p = ProbeConfig::new(2.5, 0.01);
        for method in [
            LongTimeMethod::Manifold { resolution: 64 },
            LongTimeMethod::BroadenedGrid { n_per_axis: 64 },
        ] {
            assert!(matches!(gamma_long_time(&square(), &p, method), Err(Error::OutOfBand { .. })));
        }
    }

    #[test]
    fn vanishing_contact_width_matches_point() {
        let p = ProbeConfig::new(1.95, 0.01).with_separation([3.0, 2.0, 0.0]);
        let method = LongTimeMethod::Manifold { resolution: 256 };
        let a = gamma_long_time(&square(), &p, method).unwrap();
        let q = p.clone().with_contact(Contact::Gaussian { sigma: 1e-6 });
        let b = gamma_long_time(&square(), &q, method).unwrap();
        assert_relative_eq!(a.gamma13(), b.gamma13(), max_relative = 1e-6);
    }

    #[test]
    fn triangular_profile_is_hexagonal() {
        let t = LatticeSpec::triangular(1.0, 0.165).unwrap();
        let p = ProbeConfig::new(1.6, 0.01);
        let r = [2.0, 1.0, 0.0];
        let rs: Vec<Vec3> = t
            .point_group()
            .iter()
            .map(|m| [m[0][0] * r[0] + m[0][1] * r[1], m[1][0] * r[0] + m[1][1] * r[1], 0.0])
            .collect();
        let prof = gamma_long_time_profile(&t, &p, LongTimeMethod::Manifold { resolution: 512 }, &rs).unwrap();
        for m in &prof {
            assert_relative_eq!(m.normalized(), prof[0].normalized(), epsilon = 2e-3);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn long_time_cross_term_is_bounded(frac in 0.05f64..0.95, rx in -20.0f64..20.0, ry in -20.0f64..20.0, temp in 0.0f64..3.0) {
            let s = square();
            let omega = 1.0 + frac;
            let p = ProbeConfig::new(omega, 0.01).with_separation([rx, ry, 0.0]).with_temperature(temp);
            let m = gamma_long_time(&s, &p, LongTimeMethod::Manifold { resolution: 256 }).unwrap();
            prop_assert!(m.gamma13().abs() <= m.gamma11() * (1.0 + 1e-12));
            prop_assert!(m.gamma24().abs() <= m.gamma22() * (1.0 + 1e-12) + 1e-300);
            prop_assert!(m.gamma11() > 0.0);
        }

        #[test]
        fn temperature_factors_out(frac in 0.05f64..0.95, rx in 0.0f64..10.0, temp in 0.01f64..100.0) {
            let s = square();
            let omega = 1.0 + frac;
            let method = LongTimeMethod::Manifold { resolution: 128 };
            let cold = gamma_long_time(&s, &ProbeConfig::new(omega, 0.01).with_separation([rx, 1.0, 0.0]), method).unwrap();
            let hot = gamma_long_time(&s, &ProbeConfig::new(omega, 0.01).with_separation([rx, 1.0, 0.0]).with_temperature(temp), method).unwrap();
            prop_assert!((cold.normalized() - hot.normalized()).abs() <= 1e-12 * cold.normalized().abs().max(1e-3));
        }
    }
}
