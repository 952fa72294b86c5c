use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lattice::{LatticeSpec, Symmetry, Vec3, WaveVector};

/// Profiles narrower than this are indistinguishable from a point contact in
/// double precision: the nearest-neighbour weight `exp(-1/(2 sigma^2))`
/// underflows relative to 1.
const POINT_LIKE_SIGMA: f64 = 0.05;

/// Gaussian weights are truncated where they drop below `exp(-CUTOFF^2/2)`.
const CUTOFF: f64 = 8.9;

/// Spatial profile `g(R)` of the probe-bath contact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Contact {
    Point,
    Gaussian { sigma: f64 },
    /// Arbitrary weights on lattice displacements `R`.
    Sites { sites: Vec<(Vec3, f64)> },
}

/// Momentum filter `Phi(k) = |sum_R g(R) exp(i k.R)|^2` of a contact profile
/// normalized to `sum_R g(R)^2 = 1`.
#[derive(Debug, Clone)]
pub struct FormFactor {
    repr: Repr,
}

#[derive(Debug, Clone)]
enum Repr {
    /// Product of identical even per-axis profiles, stored one-sided
    /// (`p[0]` at the origin, `p[m]` at distance `m`).
    Separable { dimension: usize, profile: Vec<f64> },
    /// Explicit site list.
    Sites(Vec<(Vec3, f64)>),
}

impl FormFactor {
    pub fn new(spec: &LatticeSpec, contact: &Contact) -> Result<Self> {
        let d = spec.dimension();
        let point = FormFactor {
            repr: Repr::Separable {
                dimension: d,
                profile: vec![1.0],
            },
        };
        match contact {
            Contact::Point => Ok(point),
            Contact::Gaussian { sigma } => {
                if !(*sigma >= 0.0 && sigma.is_finite()) {
                    return invalid(format!("contact width must be non-negative (got {sigma})"));
                }
                if *sigma < POINT_LIKE_SIGMA {
                    return Ok(point);
                }
                let reach = (CUTOFF * sigma).ceil() as i64;
                let g = |r2: f64| (-r2 / (2.0 * sigma * sigma)).exp();
                match spec.symmetry() {
                    Symmetry::Cubic => {
                        let mut profile: Vec<f64> = (0..=reach).map(|m| g((m * m) as f64)).collect();
                        let norm2 = profile[0] * profile[0]
                            + 2.0 * profile[1..].iter().map(|p| p * p).sum::<f64>();
                        let s = norm2.sqrt();
                        profile.iter_mut().for_each(|p| *p /= s);
                        Ok(FormFactor {
                            repr: Repr::Separable {
                                dimension: d,
                                profile,
                            },
                        })
                    }
                    Symmetry::Triangular => {
                        let a = spec.lattice_vectors();
                        let mut sites = Vec::new();
                        for i in -2 * reach..=2 * reach {
                            for j in -2 * reach..=2 * reach {
                                let r = [
                                    i as f64 * a[0][0] + j as f64 * a[1][0],
                                    i as f64 * a[0][1] + j as f64 * a[1][1],
                                    0.0,
                                ];
                                let r2 = r[0] * r[0] + r[1] * r[1];
                                if r2.sqrt() <= CUTOFF * sigma {
                                    sites.push((r, g(r2)));
                                }
                            }
                        }
                        Self::from_sites(sites)
                    }
                }
            }
            Contact::Sites { sites } => {
                if sites.is_empty() {
                    return invalid("contact site list is empty");
                }
                Self::from_sites(sites.clone())
            }
        }
    }

    fn from_sites(mut sites: Vec<(Vec3, f64)>) -> Result<Self> {
        let norm2: f64 = sites.iter().map(|(_, g)| g * g).sum();
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return invalid("contact weights must not all vanish");
        }
        let s = norm2.sqrt();
        sites.iter_mut().for_each(|(_, g)| *g /= s);
        Ok(FormFactor {
            repr: Repr::Sites(sites),
        })
    }

    /// True for a point contact, where `Phi == 1` identically.
    pub fn is_point(&self) -> bool {
        matches!(&self.repr, Repr::Separable { profile, .. } if profile.len() == 1)
    }

    /// True when `Phi(k)` factorizes into identical even per-axis factors.
    pub fn is_separable(&self) -> bool {
        matches!(self.repr, Repr::Separable { .. })
    }

    /// Per-axis factor of a separable form factor.
    pub fn axis_factor(&self, k: f64) -> f64 {
        match &self.repr {
            Repr::Separable { profile, .. } => {
                let mut s = profile[0];
                for (m, p) in profile.iter().enumerate().skip(1) {
                    s += 2.0 * p * (m as f64 * k).cos();
                }
                s * s
            }
            Repr::Sites(_) => panic!("axis_factor called on a non-separable form factor"),
        }
    }

    pub fn eval(&self, k: &WaveVector) -> f64 {
        match &self.repr {
            Repr::Separable { dimension, profile } => {
                if profile.len() == 1 {
                    return 1.0;
                }
                k.0[..*dimension].iter().map(|&x| self.axis_factor(x)).product()
            }
            Repr::Sites(sites) => {
                let (mut re, mut im) = (0.0, 0.0);
                for (r, g) in sites {
                    let (s, c) = k.dot(r).sin_cos();
                    re += g * c;
                    im += g * s;
                }
                re * re + im * im
            }
        }
    }
}
