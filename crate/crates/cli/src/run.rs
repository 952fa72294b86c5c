use rayon::prelude::*;

use crosstalk_core::correlation::{correlation_length, correlation_map, correlation_profile};
use crosstalk_core::damping::{
    analytic_isotropic, analytic_special_2d, default_lamb_grid, gamma_finite_time_profile,
    gamma_long_time_profile, lamb_shift_long_time, suggested_grid, DampingMatrix, Special2d,
};
use crosstalk_core::disorder::{ensemble_envelope, EnsembleParams};
use crosstalk_core::dynamics::{build_generators, evolve_observed, log_negativity, GaussianState};
use crosstalk_core::lattice::{bz_domain, resonant_manifold, LatticeSpec, Symmetry, Vec3, WaveVector};
use crosstalk_core::numeric::brent;

use crate::config::{DisorderSettings, Overlay, ProbeSettings, RunConfig, Separations, Task};
use crate::output::Dataset;
use crate::CliError;

pub fn execute(config: &RunConfig) -> Result<Vec<Dataset>, CliError> {
    let spec = config.lattice.spec()?;
    match &config.task {
        Task::Dispersion {
            n_per_axis,
            omegas,
            resolution,
        } => dispersion(&spec, *n_per_axis, omegas, *resolution),
        Task::Crosstalk {
            probe,
            separations,
            times,
            n_per_axis,
            method,
            overlay,
            disorder,
        } => match disorder {
            Some(d) => crosstalk_disordered(&spec, probe, separations, times, d, *overlay),
            None => crosstalk(&spec, probe, separations, times, *n_per_axis, *method, *overlay),
        },
        Task::Correlation {
            temperatures,
            separations,
            n_per_axis,
            level,
        } => correlation(&spec, temperatures, separations, *n_per_axis, *level),
        Task::Dynamics {
            probe,
            separations,
            t_final,
            squeezing,
            method,
            lamb_grid,
            trace_samples,
            initial_mean,
        } => dynamics(
            &spec,
            probe,
            separations,
            *t_final,
            *squeezing,
            *method,
            lamb_grid.unwrap_or_else(|| default_lamb_grid(&spec)),
            *trace_samples,
            *initial_mean,
        ),
    }
}

fn xyz(r: &Vec3) -> [f64; 3] {
    [r[0], r[1], r[2]]
}

fn dispersion(spec: &LatticeSpec, n: usize, omegas: &[f64], resolution: usize) -> Result<Vec<Dataset>, CliError> {
    let grid = bz_domain(spec, n)?;
    let mut band = Dataset::new("band", &["kx", "ky", "kz", "omega"]);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (k, _) in grid.iter() {
        let w = spec.frequency(&k);
        lo = lo.min(w);
        hi = hi.max(w);
        band.push(vec![k.0[0], k.0[1], k.0[2], w]);
    }
    let mut range = Dataset::new("range", &["band_min", "band_max", "grid_min", "grid_max"]);
    range.push(vec![spec.band_min(), spec.band_max(), lo, hi]);
    let mut contour = Dataset::new("contour", &["omega", "kx", "ky", "kz", "measure"]);
    for &omega in omegas {
        let m = resonant_manifold(spec, omega, resolution)?;
        for e in m.iter_full() {
            contour.push(vec![omega, e.k.0[0], e.k.0[1], e.k.0[2], e.measure]);
        }
    }
    Ok(vec![range, band, contour])
}

/// Resonant wavenumber along the first lattice direction.
/// Resolves the resonance at `t` and keeps the light cone inside one period.
fn default_grid(spec: &LatticeSpec, omega: f64, t: f64, rs: &[Vec3]) -> usize {
    let reach = rs.iter().map(|r| r.iter().map(|c| c * c).sum::<f64>().sqrt()).fold(0.0, f64::max)
        + spec.max_group_velocity() * t;
    let cone = ((reach.ceil() as usize + 2) + 1) & !1;
    suggested_grid(spec, omega, t).max(cone)
}

fn axis_wavenumber(spec: &LatticeSpec, omega: f64) -> Result<f64, CliError> {
    let top = match spec.symmetry() {
        Symmetry::Cubic => std::f64::consts::PI,
        Symmetry::Triangular => 4.0 * std::f64::consts::PI / 3.0,
    };
    let along = |k: f64| {
        let mut v = [0.0; 3];
        v[0] = k;
        spec.frequency(&WaveVector(v)) - omega
    };
    Ok(brent(along, 0.0, top, 1e-15, 0.0)?)
}

fn overlay_value(spec: &LatticeSpec, overlay: Overlay, k: f64, r: &Vec3) -> Result<f64, CliError> {
    match overlay {
        Overlay::Isotropic => {
            let dist = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
            Ok(analytic_isotropic(spec.dimension(), k, dist)?)
        }
        Overlay::Diagonal | Overlay::Eggcrate => {
            if spec.dimension() != 2 || spec.symmetry() != Symmetry::Cubic {
                return Err(CliError::Config("diagonal and egg-crate overlays need the square lattice".into()));
            }
            let case = if overlay == Overlay::Diagonal {
                Special2d::Diagonal
            } else {
                Special2d::Eggcrate
            };
            Ok(analytic_special_2d(case, [r[0], r[1]]))
        }
    }
}

pub const CROSSTALK_COLUMNS: [&str; 12] = [
    "t",
    "x",
    "y",
    "z",
    "gamma11",
    "gamma22",
    "gamma13",
    "gamma24",
    "normalized",
    "delta_omega",
    "gamma_coh",
    "overlay",
];

fn crosstalk(
    spec: &LatticeSpec,
    probe: &ProbeSettings,
    separations: &Separations,
    times: &[f64],
    n_per_axis: Option<usize>,
    method: crosstalk_core::damping::LongTimeMethod,
    overlay: Option<Overlay>,
) -> Result<Vec<Dataset>, CliError> {
    let rs = separations.points(spec)?;
    let probes = probe.probe();
    let columns = if overlay.is_some() {
        &CROSSTALK_COLUMNS[..]
    } else {
        &CROSSTALK_COLUMNS[..11]
    };
    let mut out = Dataset::new("crosstalk", columns);
    let k = match overlay {
        Some(Overlay::Isotropic) => axis_wavenumber(spec, probe.omega)?,
        _ => 0.0,
    };
    let mut emit = |t: f64, rows: Vec<DampingMatrix>| -> Result<(), CliError> {
        for (d, r) in rows.iter().zip(&rs) {
            let [x, y, z] = xyz(r);
            let mut row = vec![
                t,
                x,
                y,
                z,
                d.gamma11(),
                d.gamma22(),
                d.gamma13(),
                d.gamma24(),
                d.normalized(),
                d.lamb.delta_omega,
                d.lamb.gamma_coh,
            ];
            if let Some(o) = overlay {
                row.push(overlay_value(spec, o, k, r)?);
            }
            out.push(row);
        }
        Ok(())
    };
    if times.is_empty() {
        let mut rows = gamma_long_time_profile(spec, &probes, method, &rs)?;
        let lamb = lamb_shift_long_time(spec, &probes, default_lamb_grid(spec), &rs)?;
        for (d, l) in rows.iter_mut().zip(lamb) {
            d.lamb = l;
        }
        emit(f64::INFINITY, rows)?;
    }
    for &t in times {
        let n = n_per_axis.unwrap_or_else(|| default_grid(spec, probe.omega, t, &rs));
        emit(t, gamma_finite_time_profile(spec, &probes, t, n, &rs)?)?;
    }
    Ok(vec![out])
}

fn chain_sites(separations: &Separations, spec: &LatticeSpec) -> Result<Vec<usize>, CliError> {
    let mut xs = Vec::new();
    for r in separations.points(spec)? {
        if r[0] < 0.0 || r[0].fract() != 0.0 || r[1] != 0.0 || r[2] != 0.0 {
            return Err(CliError::Config(format!(
                "disordered chains need non-negative integer separations (got {r:?})"
            )));
        }
        xs.push(r[0] as usize);
    }
    Ok(xs)
}

fn crosstalk_disordered(
    spec: &LatticeSpec,
    probe: &ProbeSettings,
    separations: &Separations,
    times: &[f64],
    settings: &DisorderSettings,
    overlay: Option<Overlay>,
) -> Result<Vec<Dataset>, CliError> {
    if spec.dimension() != 1 || spec.symmetry() != Symmetry::Cubic {
        return Err(CliError::Config("disorder is only available for the 1D chain".into()));
    }
    if times.is_empty() {
        return Err(CliError::Config("disordered chains need at least one finite time".into()));
    }
    let xs = chain_sites(separations, spec)?;
    let k = match overlay {
        Some(Overlay::Isotropic) => Some(axis_wavenumber(spec, probe.omega)?),
        Some(_) => return Err(CliError::Config("only the isotropic overlay applies to chains".into())),
        None => None,
    };
    let mut samples = Dataset::new(
        "realizations",
        &["t", "amplitude", "realization", "seed", "n0", "x", "normalized"],
    );
    let mut envelope = Dataset::new(
        "envelope",
        if k.is_some() {
            &["t", "amplitude", "x", "mean_abs", "median_abs", "q10_abs", "q90_abs", "overlay"]
        } else {
            &["t", "amplitude", "x", "mean_abs", "median_abs", "q10_abs", "q90_abs"]
        },
    );
    for &t in times {
        for &amplitude in &settings.amplitudes {
            let params = EnsembleParams {
                n_sites: settings.n_sites,
                omega0: spec.omega0(),
                coupling: spec.coupling(),
                amplitude,
                law: settings.law,
                boundary: settings.boundary,
                omega: probe.omega,
                time: t,
                base_seed: settings.base_seed,
                route: settings.route,
            };
            let env = ensemble_envelope(&params, settings.realizations, &xs)?;
            for (i, row) in env.signed.iter().enumerate() {
                let seed = settings.base_seed.wrapping_add(i as u64);
                for (x, v) in xs.iter().zip(row) {
                    samples.push(vec![t, amplitude, i as f64, seed as f64, env.n0[i] as f64, *x as f64, *v]);
                }
            }
            for (j, x) in xs.iter().enumerate() {
                let mut row = vec![t, amplitude, *x as f64, env.mean[j], env.median[j], env.q10[j], env.q90[j]];
                if let Some(k) = k {
                    row.push((k * *x as f64).cos());
                }
                envelope.push(row);
            }
        }
    }
    Ok(vec![samples, envelope])
}

fn correlation(
    spec: &LatticeSpec,
    temperatures: &[f64],
    separations: &Separations,
    n: usize,
    level: f64,
) -> Result<Vec<Dataset>, CliError> {
    let mut values = Dataset::new("correlation", &["temperature", "x", "y", "z", "normalized", "raw"]);
    let mut contour = Dataset::new("contour", &["temperature", "x1", "y1", "x2", "y2"]);
    let mut length = Dataset::new("length", &["temperature", "xi_c", "c0"]);
    for &temp in temperatures {
        let prof = match separations {
            Separations::Window { extent, quadrant } => {
                let mut m = correlation_map(spec, *extent, temp, n, level)?;
                if *quadrant {
                    let keep: Vec<bool> = m.separations.iter().map(|r| r[0] >= -1e-9 && r[1] >= -1e-9).collect();
                    let mut it = keep.iter();
                    m.separations.retain(|_| *it.next().unwrap());
                    let mut it = keep.iter();
                    m.values.retain(|_| *it.next().unwrap());
                }
                m
            }
            _ => correlation_profile(spec, &separations.points(spec)?, temp, n, true)?,
        };
        for (r, v) in prof.separations.iter().zip(&prof.values) {
            values.push(vec![temp, r[0], r[1], r[2], *v, v * prof.zero_value]);
        }
        for (p, q) in &prof.contour {
            contour.push(vec![temp, p[0], p[1], q[0], q[1]]);
        }
        length.push(vec![temp, correlation_length(spec, temp, n)?, prof.zero_value]);
    }
    let mut out = vec![values, length];
    if matches!(separations, Separations::Window { .. }) {
        out.push(contour);
    }
    Ok(out)
}

pub const TRACE_COLUMNS: [&str; 15] = [
    "x",
    "y",
    "z",
    "t",
    "log_negativity",
    "min_symplectic",
    "antisym_xx",
    "antisym_pp",
    "sym_xx",
    "sym_pp",
    "mean_x1",
    "mean_p1",
    "mean_x2",
    "mean_p2",
    "normalized_cross_damping",
];

#[allow(clippy::too_many_arguments)]
fn dynamics(
    spec: &LatticeSpec,
    probe: &ProbeSettings,
    separations: &Separations,
    t_final: f64,
    squeezing: f64,
    method: crosstalk_core::damping::LongTimeMethod,
    lamb_grid: usize,
    trace_samples: usize,
    initial_mean: [f64; 4],
) -> Result<Vec<Dataset>, CliError> {
    let rs = separations.points(spec)?;
    let probes = probe.probe();
    let mut rates = gamma_long_time_profile(spec, &probes, method, &rs)?;
    let lamb = lamb_shift_long_time(spec, &probes, lamb_grid, &rs)?;
    for (d, l) in rates.iter_mut().zip(lamb) {
        d.lamb = l;
    }
    let start = GaussianState::two_mode_squeezed(squeezing).with_mean(initial_mean);
    type Run = (Vec<f64>, Vec<Vec<f64>>);
    let runs: Vec<Result<Run, CliError>> = rates
        .par_iter()
        .map(|d| {
            let gen = build_generators(d, probe.omega)?.rotating(probe.omega);
            let [x, y, z] = xyz(&d.separation);
            let mut min_nu = f64::INFINITY;
            let mut trace = Vec::new();
            let mut next = 0usize;
            let dt = gen.default_step();
            let end = evolve_observed(&start, &gen, t_final, dt, |t, s| {
                let nu = s.symplectic_eigenvalues().0;
                min_nu = min_nu.min(nu);
                if trace_samples > 0 && next <= trace_samples {
                    let due = t_final * next as f64 / trace_samples as f64;
                    if t >= due - 0.5 * dt {
                        let (a, b) = (s.antisymmetric_block(), s.symmetric_block());
                        trace.push(vec![
                            x,
                            y,
                            z,
                            t,
                            log_negativity(s),
                            nu,
                            a[(0, 0)],
                            a[(1, 1)],
                            b[(0, 0)],
                            b[(1, 1)],
                            s.mean[0],
                            s.mean[1],
                            s.mean[2],
                            s.mean[3],
                            d.normalized(),
                        ]);
                        next += 1;
                    }
                }
            })?;
            let row = vec![
                x,
                y,
                z,
                d.normalized(),
                d.gamma11(),
                d.gamma13(),
                d.lamb.delta_omega,
                d.lamb.gamma_coh,
                log_negativity(&end),
                min_nu,
            ];
            Ok((row, trace))
        })
        .collect();
    let mut survival = Dataset::new(
        "survival",
        &[
            "x",
            "y",
            "z",
            "normalized_cross_damping",
            "gamma11",
            "gamma13",
            "delta_omega",
            "gamma_coh",
            "log_negativity",
            "min_symplectic",
        ],
    );
    let mut traces = Dataset::new("trace", &TRACE_COLUMNS);
    for run in runs {
        let (row, trace) = run?;
        survival.push(row);
        for t in trace {
            traces.push(t);
        }
    }
    let mut out = vec![survival];
    if trace_samples > 0 {
        out.push(traces);
    }
    Ok(out)
}
