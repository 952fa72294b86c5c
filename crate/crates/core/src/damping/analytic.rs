use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Normalized long-time cross-talk for an isotropic resonant shell of radius
/// `k_mag`: `cos(k x)` in 1D, `J0(k r)` in 2D, `sin(k r)/(k r)` in 3D.
pub fn analytic_isotropic(dimension: usize, k_mag: f64, r_mag: f64) -> Result<f64> {
    if k_mag < 0.0 || r_mag < 0.0 {
        return invalid("wavenumber and distance must be non-negative");
    }
    let x = k_mag * r_mag;
    match dimension {
        1 => Ok(x.cos()),
        2 => Ok(libm::j0(x)),
        3 => Ok(if x.abs() < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x }),
        _ => invalid(format!("dimension must be 1, 2 or 3 (got {dimension})")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Special2d {
    /// Square lattice at the saddle frequency: a diamond-shaped manifold.
    Diagonal,
    /// Square lattice near the band top: a shrinking shell around the corner.
    Eggcrate,
}

/// Closed forms for the square lattice, normalized to 1 at the origin.
///
/// `Diagonal` evaluates `(x sin(pi x) - y sin(pi y)) / (pi (x^2 - y^2))`,
/// the uniform line integral of `cos(k.r)` over `|k_x| + |k_y| = pi`. On
/// `|x| = |y|` it returns the limit `(sin(pi x) + pi x cos(pi x)) / (2 pi x)`.
pub fn analytic_special_2d(case: Special2d, r: [f64; 2]) -> f64 {
    let (x, y) = (r[0].abs(), r[1].abs());
    match case {
        Special2d::Eggcrate => (PI * x).cos() * (PI * y).cos(),
        Special2d::Diagonal => {
            let f = |u: f64| u * (PI * u).sin();
            let scale = x.max(y).max(1.0);
            if (x - y).abs() > 1e-6 * scale {
                (f(x) - f(y)) / (PI * (x * x - y * y))
            } else {
                let u = 0.5 * (x + y);
                if u < 1e-8 {
                    1.0
                } else {
                    ((PI * u).sin() + PI * u * (PI * u).cos()) / (2.0 * PI * u)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn isotropic_forms() {
        assert_eq!(analytic_isotropic(3, 0.7, 0.0).unwrap(), 1.0);
        assert!(analytic_isotropic(2, 1.0, 2.404826).unwrap().abs() < 1e-5);
        let x = 2.0 * PI / 0.164;
        assert_relative_eq!(analytic_isotropic(1, 0.164, x).unwrap(), 1.0, epsilon = 1e-12);
        assert!(analytic_isotropic(4, 1.0, 1.0).is_err());
        assert!(analytic_isotropic(2, -1.0, 1.0).is_err());
    }

    #[test]
    fn bessel_zero_by_series() {
        // power series of J0, independent of libm
        let j0 = |x: f64| {
            let mut term = 1.0;
            let mut sum = 1.0;
            for m in 1..60 {
                term *= -(x * x) / (4.0 * (m * m) as f64);
                sum += term;
            }
            sum
        };
        assert!(j0(2.404826).abs() < 1e-5);
        for x in [0.3, 1.7, 5.2, 9.9] {
            assert_relative_eq!(analytic_isotropic(2, 1.0, x).unwrap(), j0(x), epsilon = 1e-12);
        }
    }

    #[test]
    fn eggcrate_on_lattice_sites() {
        assert_relative_eq!(analytic_special_2d(Special2d::Eggcrate, [1.0, 1.0]), 1.0);
        assert_relative_eq!(analytic_special_2d(Special2d::Eggcrate, [1.0, 2.0]), -1.0);
    }

    #[test]
    fn diagonal_limits() {
        assert_eq!(analytic_special_2d(Special2d::Diagonal, [0.0, 0.0]), 1.0);
        assert_relative_eq!(analytic_special_2d(Special2d::Diagonal, [1e-5, 1e-5]), 1.0, epsilon = 1e-9);
        let on = analytic_special_2d(Special2d::Diagonal, [5.0, 5.0]);
        assert_relative_eq!(on, -0.5, epsilon = 1e-12);
        for eps in [1e-3, -1e-3] {
            let off = analytic_special_2d(Special2d::Diagonal, [5.0 + eps, 5.0]);
            assert!((off - on).abs() < 5e-3, "offset {eps}: {off} vs {on}");
        }
        // anti-diagonal by evenness
        assert_relative_eq!(analytic_special_2d(Special2d::Diagonal, [5.0, -5.0]), on);
        // generic point against the raw expression
        let (x, y) = (3.3f64, 1.2f64);
        let raw = (x * (PI * x).sin() - y * (PI * y).sin()) / (PI * (x * x - y * y));
        assert_relative_eq!(analytic_special_2d(Special2d::Diagonal, [x, y]), raw, epsilon = 1e-14);
    }
}
