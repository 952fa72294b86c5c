//! Equal-time spatial correlations of the bath displacement field,
//! `C(R) = V^-1 int d^Dk cos(k.R) coth(omega_k / 2T) / (2 omega_k)`.

use serde::Serialize;

use crate::contour::{marching_squares, Field2};
use crate::damping::projection;
use crate::error::{invalid, Error, Result};
use crate::lattice::{bz_domain, BzGrid, LatticeSpec, Symmetry, Vec3, WaveVector};

/// Allowed change under grid doubling, relative to `C(0)`.
const REFINEMENT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationProfile {
    pub separations: Vec<Vec3>,
    /// `C(R) / C(0)` when `normalized`, raw otherwise.
    pub values: Vec<f64>,
    /// Unnormalized `C(0)`.
    pub zero_value: f64,
    pub temperature: f64,
    pub normalized: bool,
    /// Iso-line segments of the normalized map in real-space coordinates
    /// (empty for line profiles).
    pub contour: Vec<([f64; 2], [f64; 2])>,
    pub contour_level: Option<f64>,
}

#[inline]
fn occupation_weight(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        0.5 / omega
    } else {
        0.5 / (omega / (2.0 * temperature)).tanh() / omega
    }
}

fn raw_sums(grid: &BzGrid, temperature: f64, rs: &[Vec3]) -> Vec<f64> {
    let spec = *grid.spec();
    let kernel = move |k: &WaveVector| [occupation_weight(spec.frequency(k), temperature)];
    let sums = if spec.symmetry() == Symmetry::Cubic && grid.n_per_axis() % 2 == 0 {
        projection::separable_even(grid, &|_| 1.0, kernel, rs)
    } else {
        projection::direct(grid, kernel, rs)
    };
    sums.iter().map(|s| s[0] / grid.len() as f64).collect()
}

/// Raw correlations at `rs` (with `R = 0` appended), refined once by grid
/// doubling; fails when the two grids disagree by more than 0.1% of `C(0)`.
fn refined(spec: &LatticeSpec, temperature: f64, rs: &[Vec3], n_per_axis: usize) -> Result<(Vec<f64>, f64)> {
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return invalid(format!("temperature must be non-negative (got {temperature})"));
    }
    for r in rs {
        if r[spec.dimension()..].iter().any(|&x| x != 0.0) || r.iter().any(|x| !x.is_finite()) {
            return invalid(format!("invalid separation {r:?}"));
        }
    }
    let mut all = rs.to_vec();
    all.push([0.0; 3]);
    let coarse = raw_sums(&bz_domain(spec, n_per_axis)?, temperature, &all);
    let fine = raw_sums(&bz_domain(spec, 2 * n_per_axis)?, temperature, &all);
    let c0 = *fine.last().expect("origin appended");
    let worst = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if worst > REFINEMENT_TOL * c0.abs() {
        return Err(Error::Resolution {
            reason: format!(
                "correlation changed by {:.2e} of C(0) under grid doubling",
                worst / c0.abs()
            ),
            suggested: 4 * n_per_axis,
        });
    }
    let values = fine[..rs.len()].to_vec();
    Ok((values, c0))
}

/// Raw `C(R)` at temperature `temperature`.
pub fn correlation(spec: &LatticeSpec, r: Vec3, temperature: f64, n_per_axis: usize) -> Result<f64> {
    Ok(refined(spec, temperature, &[r], n_per_axis)?.0[0])
}

/// `C` along a list of separations.
pub fn correlation_profile(
    spec: &LatticeSpec,
    rs: &[Vec3],
    temperature: f64,
    n_per_axis: usize,
    normalize: bool,
) -> Result<CorrelationProfile> {
    let (values, c0) = refined(spec, temperature, rs, n_per_axis)?;
    let values = if normalize {
        values.iter().map(|v| v / c0).collect()
    } else {
        values
    };
    Ok(CorrelationProfile {
        separations: rs.to_vec(),
        values,
        zero_value: c0,
        temperature,
        normalized: normalize,
        contour: Vec::new(),
        contour_level: None,
    })
}

/// Normalized map over all lattice sites with `|x|, |y| <= extent`, plus the
/// `level` iso-line of the map interpolated between sites.
pub fn correlation_map(
    spec: &LatticeSpec,
    extent: usize,
    temperature: f64,
    n_per_axis: usize,
    level: f64,
) -> Result<CorrelationProfile> {
    if spec.dimension() != 2 {
        return invalid("correlation maps need a two-dimensional lattice");
    }
    let a = spec.lattice_vectors();
    let e = extent as i64;
    // site index window: wide enough in the skew direction of the triangular lattice
    let reach = match spec.symmetry() {
        Symmetry::Cubic => e,
        Symmetry::Triangular => 2 * e + 1,
    };
    let span = (2 * reach + 1) as usize;
    let site = |i: i64, j: i64| -> Vec3 {
        [
            i as f64 * a[0][0] + j as f64 * a[1][0],
            i as f64 * a[0][1] + j as f64 * a[1][1],
            0.0,
        ]
    };
    let mut window = Vec::with_capacity(span * span);
    for i in -reach..=reach {
        for j in -reach..=reach {
            window.push(site(i, j));
        }
    }
    let (raw, c0) = refined(spec, temperature, &window, n_per_axis)?;
    let normalized: Vec<f64> = raw.iter().map(|v| v / c0).collect();

    let field = Field2 {
        n_i: span - 1,
        n_j: span - 1,
        values: normalized.clone(),
    };
    let to_r = |p: [f64; 2]| {
        let (u, v) = (p[0] - reach as f64, p[1] - reach as f64);
        [u * a[0][0] + v * a[1][0], u * a[0][1] + v * a[1][1]]
    };
    let inside = |p: &[f64; 2]| p[0].abs() <= extent as f64 + 1e-9 && p[1].abs() <= extent as f64 + 1e-9;
    let contour = marching_squares(&field, level)
        .into_iter()
        .map(|(p, q)| (to_r(p), to_r(q)))
        .filter(|(p, q)| inside(p) && inside(q))
        .collect();

    let mut separations = Vec::new();
    let mut values = Vec::new();
    for (r, v) in window.iter().zip(&normalized) {
        if inside(&[r[0], r[1]]) {
            separations.push(*r);
            values.push(*v);
        }
    }
    Ok(CorrelationProfile {
        separations,
        values,
        zero_value: c0,
        temperature,
        normalized: true,
        contour,
        contour_level: Some(level),
    })
}

/// Distance along the first lattice vector at which normalized `|C|` first
/// drops below `1/e`, interpolated linearly between lattice sites.
pub fn correlation_length(spec: &LatticeSpec, temperature: f64, n_per_axis: usize) -> Result<f64> {
    let a = spec.lattice_vectors()[0];
    let threshold = (-1.0f64).exp();
    let mut prev = 1.0;
    for chunk in 0..8 {
        let xs: Vec<Vec3> = (chunk * 16 + 1..=(chunk + 1) * 16)
            .map(|m| a.map(|c| c * m as f64))
            .collect();
        let prof = correlation_profile(spec, &xs, temperature, n_per_axis, true)?;
        for (i, v) in prof.values.iter().enumerate() {
            let m = (chunk * 16 + 1 + i) as f64;
            let v = v.abs();
            if v < threshold {
                return Ok(m - 1.0 + (prev - threshold) / (prev - v));
            }
            prev = v;
        }
    }
    Err(Error::Numeric("correlation did not fall below 1/e within 128 sites".into()))
}
