//! Column documentation printed by `--schema`.

const DISPERSION: &str = "\
dataset range (main file)
  band_min, band_max    analytic band edges
  grid_min, grid_max    extremes over the sampled zone grid
dataset band (<stem>_band.csv)
  kx, ky, kz            grid momentum (unused components are 0)
  omega                 mode frequency
dataset contour (<stem>_contour.csv)
  omega                 requested iso-frequency
  kx, ky, kz            point on the resonant manifold
  measure               line/surface element carried by the point
";

const CROSSTALK: &str = "\
dataset crosstalk (main file, clean lattice)
  t                     evaluation time; inf for the long-time limit
  x, y, z               probe separation in lattice units
  gamma11, gamma22      self-damping (emission, absorption)
  gamma13, gamma24      cross-damping (emission, absorption)
  normalized            gamma13 / gamma11
  delta_omega           Lamb shift of each probe
  gamma_coh             coherent exchange coupling
  overlay               closed-form comparison curve (only with --overlay)
dataset realizations (main file, disordered chains)
  t, amplitude          evaluation time and disorder amplitude
  realization, seed     realization index and its RNG seed
  n0                    site of the first probe
  x                     distance to the second probe
  normalized            signed gamma13(n0, n0 + x) / gamma13(n0, n0)
dataset envelope (<stem>_envelope.csv, disordered chains)
  t, amplitude, x
  mean_abs, median_abs, q10_abs, q90_abs   statistics of |normalized|
  overlay               |clean long-time cosine| (only with --overlay isotropic)
";

const CORRELATION: &str = "\
dataset correlation (main file)
  temperature
  x, y, z               separation
  normalized            C(R) / C(0)
  raw                   C(R)
dataset length (<stem>_length.csv)
  temperature
  xi_c                  first 1/e crossing of |C| along the first lattice vector
  c0                    C(0)
dataset contour (<stem>_contour.csv, window separations only)
  temperature
  x1, y1, x2, y2        iso-line segment of the normalized map at --level
";

const DYNAMICS: &str = "\
All quantities are in the frame rotating at the probe frequency; quadratures
are ordered (x1, p1, x2, p2) with vacuum variance 1/2.
dataset survival (main file)
  x, y, z               separation
  normalized_cross_damping, gamma11, gamma13, delta_omega, gamma_coh
  log_negativity        at t_final
  min_symplectic        smallest symplectic eigenvalue seen during the run
dataset trace (<stem>_trace.csv, with --trace-samples > 0)
  x, y, z, t
  log_negativity, min_symplectic
  antisym_xx, antisym_pp, sym_xx, sym_pp   variances of (x1 -+ x2)/sqrt2, (p1 -+ p2)/sqrt2
  mean_x1, mean_p1, mean_x2, mean_p2
  normalized_cross_damping
";

pub fn describe(command: &str) -> &'static str {
    match command {
        "dispersion" => DISPERSION,
        "crosstalk" => CROSSTALK,
        "correlation" => CORRELATION,
        _ => DYNAMICS,
    }
}
