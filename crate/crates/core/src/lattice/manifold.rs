use std::f64::consts::PI;

use log::warn;

use super::{norm, LatticeSpec, Symmetry, Vec3, WaveVector};
use crate::contour::{marching_squares, marching_tetrahedra, Field2, Field3};
use crate::error::{Error, Result};
use crate::numeric::{brent, Compensated};

/// Below this group speed a manifold element is treated as a band-edge point.
pub const GRADIENT_FLOOR: f64 = 1e-6;

const MAX_NEWTON_STEPS: usize = 6;

/// One piece of the resonant manifold: a representative wave vector, the
/// measure it stands for (`1` for a 1D root, arc length in 2D, area in 3D)
/// and the group speed there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldElement {
    pub k: WaveVector,
    pub measure: f64,
    pub grad_norm: f64,
    pub degenerate: bool,
}

impl ManifoldElement {
    /// `measure / |grad omega|` with the band-edge clamp applied.
    #[inline]
    pub fn weight(&self) -> f64 {
        self.measure / self.grad_norm.max(GRADIENT_FLOOR)
    }
}

/// Solutions of `omega(k) = Omega`, stored on an irreducible wedge together
/// with the sign-flip operations that regenerate the full manifold.
#[derive(Debug, Clone)]
pub struct IsoFrequencyManifold {
    omega: f64,
    dimension: usize,
    elements: Vec<ManifoldElement>,
    orbit: Vec<Vec3>,
}

impl IsoFrequencyManifold {
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Elements of the irreducible wedge.
    pub fn elements(&self) -> &[ManifoldElement] {
        &self.elements
    }

    /// Component-wise sign patterns mapping the wedge onto the full manifold.
    pub fn orbit(&self) -> &[Vec3] {
        &self.orbit
    }

    pub fn is_degenerate(&self) -> bool {
        self.elements.iter().any(|e| e.degenerate)
    }

    pub fn len_full(&self) -> usize {
        self.elements.len() * self.orbit.len()
    }

    /// All elements of the full manifold.
    pub fn iter_full(&self) -> impl Iterator<Item = ManifoldElement> + '_ {
        self.elements.iter().flat_map(move |e| {
            self.orbit.iter().map(move |s| ManifoldElement {
                k: WaveVector([s[0] * e.k.0[0], s[1] * e.k.0[1], s[2] * e.k.0[2]]),
                ..*e
            })
        })
    }

    /// `sum f(k) measure / |grad omega|` over the full manifold, i.e. the
    /// integral of `f(k) delta(omega(k) - Omega)`.
    pub fn integrate<F: Fn(&WaveVector) -> f64>(&self, f: F) -> f64 {
        let mut acc = Compensated::default();
        for e in self.iter_full() {
            acc.add(e.weight() * f(&e.k));
        }
        acc.value()
    }

    /// Largest group speed on the manifold.
    pub fn max_grad_norm(&self) -> f64 {
        self.elements.iter().map(|e| e.grad_norm).fold(0.0, f64::max)
    }

    /// Total length (2D) or area (3D) of the full manifold; root count in 1D.
    pub fn total_measure(&self) -> f64 {
        self.orbit.len() as f64 * self.elements.iter().map(|e| e.measure).sum::<f64>()
    }
}

/// Extract the manifold `omega(k) = Omega`.
///
/// `resolution` is the number of extraction cells per axis of the wedge (the
/// quadrant or octant for cubic lattices, the primitive reciprocal cell for the
/// triangular one); it is ignored in 1D, where roots are bracketed exactly.
pub fn resonant_manifold(
    spec: &LatticeSpec,
    omega: f64,
    resolution: usize,
) -> Result<IsoFrequencyManifold> {
    let (lo, hi) = (spec.band_min(), spec.band_max());
    let tol = 1e-12 * lo;
    if !(omega >= lo - tol && omega <= hi + tol) {
        return Err(Error::OutOfBand {
            omega,
            band_min: lo,
            band_max: hi,
        });
    }
    if resolution < 2 {
        return Err(Error::InvalidInput(format!(
            "manifold resolution must be at least 2 (got {resolution})"
        )));
    }
    let d = spec.dimension();
    if omega - lo <= tol || hi - omega <= tol || spec.coupling() == 0.0 {
        return Ok(band_edge(spec, omega));
    }
    let (elements, orbit) = match (spec.symmetry(), d) {
        (_, 1) => chain_roots(spec, omega)?,
        (Symmetry::Cubic, 2) => square_contour(spec, omega, resolution),
        (Symmetry::Cubic, _) => cubic_surface(spec, omega, resolution),
        (Symmetry::Triangular, _) => triangular_contour(spec, omega, resolution),
    };
    let m = IsoFrequencyManifold {
        omega,
        dimension: d,
        elements,
        orbit,
    };
    if m.is_degenerate() {
        warn!(
            "resonant manifold at Omega = {omega} touches a stationary point of the dispersion; \
             1/|grad omega| clamped at {GRADIENT_FLOOR}"
        );
    }
    Ok(m)
}

fn identity_orbit() -> Vec<Vec3> {
    vec![[1.0, 1.0, 1.0]]
}

fn sign_orbit(d: usize) -> Vec<Vec3> {
    (0..1usize << d)
        .map(|bits| {
            let mut s = [1.0; 3];
            for (i, x) in s.iter_mut().take(d).enumerate() {
                if bits >> i & 1 == 1 {
                    *x = -1.0;
                }
            }
            s
        })
        .collect()
}

fn band_edge(spec: &LatticeSpec, omega: f64) -> IsoFrequencyManifold {
    let d = spec.dimension();
    let points = if omega - spec.band_min() <= spec.band_max() - omega {
        vec![WaveVector::default()]
    } else {
        spec.band_max_points()
    };
    warn!("Omega = {omega} sits on a band edge; the resonant manifold degenerates to isolated points");
    let elements = points
        .into_iter()
        .map(|k| ManifoldElement {
            k,
            measure: if d == 1 { 1.0 } else { 0.0 },
            grad_norm: norm(&spec.gradient(&k)),
            degenerate: true,
        })
        .collect();
    IsoFrequencyManifold {
        omega,
        dimension: d,
        elements,
        orbit: identity_orbit(),
    }
}

fn element(spec: &LatticeSpec, k: WaveVector, measure: f64) -> ManifoldElement {
    let grad_norm = norm(&spec.gradient(&k));
    ManifoldElement {
        k,
        measure,
        grad_norm,
        degenerate: grad_norm < GRADIENT_FLOOR,
    }
}

fn chain_roots(spec: &LatticeSpec, omega: f64) -> Result<(Vec<ManifoldElement>, Vec<Vec3>)> {
    let f = |k: f64| spec.frequency(&WaveVector([k, 0.0, 0.0])) - omega;
    let k = brent(f, 0.0, PI, 1e-15, 0.0)?;
    Ok((vec![element(spec, WaveVector([k, 0.0, 0.0]), 1.0)], sign_orbit(1)))
}

/// Newton iterations along the gradient towards `omega(k) = Omega`. Steps are
/// capped at `max_step` so that points near stationary points cannot jump to a
/// different branch.
fn polish(spec: &LatticeSpec, mut k: WaveVector, omega: f64, max_step: f64) -> WaveVector {
    let tol = 1e-10 * spec.omega0();
    for _ in 0..MAX_NEWTON_STEPS {
        let r = spec.frequency(&k) - omega;
        if r.abs() < tol {
            break;
        }
        let g = spec.gradient(&k);
        let g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
        if g2 == 0.0 {
            break;
        }
        let mut scale = r / g2;
        let step = scale.abs() * g2.sqrt();
        if step > max_step {
            scale *= max_step / step;
        }
        for (x, gi) in k.0.iter_mut().zip(g) {
            *x -= scale * gi;
        }
    }
    k
}

fn lerp(a: &Vec3, b: &Vec3, s: f64) -> Vec3 {
    [
        a[0] + s * (b[0] - a[0]),
        a[1] + s * (b[1] - a[1]),
        a[2] + s * (b[2] - a[2]),
    ]
}

fn dist(a: &Vec3, b: &Vec3) -> f64 {
    norm(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

fn square_contour(spec: &LatticeSpec, omega: f64, n: usize) -> (Vec<ManifoldElement>, Vec<Vec3>) {
    let h = PI / n as f64;
    let field = Field2::sample(n, n, |i, j| {
        spec.frequency(&WaveVector([i as f64 * h, j as f64 * h, 0.0]))
    });
    let to_k = |p: [f64; 2]| WaveVector([p[0] * h, p[1] * h, 0.0]);
    let elements = marching_squares(&field, omega)
        .into_iter()
        .filter_map(|(a, b)| {
            let pa = polish(spec, to_k(a), omega, h).0;
            let pb = polish(spec, to_k(b), omega, h).0;
            let len = dist(&pa, &pb);
            (len > 0.0).then(|| {
                let mid = polish(spec, WaveVector(lerp(&pa, &pb, 0.5)), omega, h);
                element(spec, mid, len)
            })
        })
        .collect();
    (elements, sign_orbit(2))
}

fn cubic_surface(spec: &LatticeSpec, omega: f64, n: usize) -> (Vec<ManifoldElement>, Vec<Vec3>) {
    let h = PI / n as f64;
    let field = Field3::sample(n, |i, j, l| {
        spec.frequency(&WaveVector([i as f64 * h, j as f64 * h, l as f64 * h]))
    });
    let to_k = |p: [f64; 3]| WaveVector([p[0] * h, p[1] * h, p[2] * h]);
    let elements = marching_tetrahedra(&field, omega)
        .into_iter()
        .filter_map(|tri| {
            let p = tri.map(|v| polish(spec, to_k(v), omega, h).0);
            let u = [p[1][0] - p[0][0], p[1][1] - p[0][1], p[1][2] - p[0][2]];
            let v = [p[2][0] - p[0][0], p[2][1] - p[0][1], p[2][2] - p[0][2]];
            let cross = [
                u[1] * v[2] - u[2] * v[1],
                u[2] * v[0] - u[0] * v[2],
                u[0] * v[1] - u[1] * v[0],
            ];
            let area = 0.5 * norm(&cross);
            (area > 0.0).then(|| {
                let c = [
                    (p[0][0] + p[1][0] + p[2][0]) / 3.0,
                    (p[0][1] + p[1][1] + p[2][1]) / 3.0,
                    (p[0][2] + p[1][2] + p[2][2]) / 3.0,
                ];
                element(spec, polish(spec, WaveVector(c), omega, h), area)
            })
        })
        .collect();
    (elements, sign_orbit(3))
}

fn triangular_contour(spec: &LatticeSpec, omega: f64, n: usize) -> (Vec<ManifoldElement>, Vec<Vec3>) {
    let b = spec.reciprocal_vectors();
    let h = 1.0 / n as f64;
    let to_k = |p: [f64; 2]| {
        let (u, v) = (p[0] * h - 0.5, p[1] * h - 0.5);
        WaveVector([u * b[0][0] + v * b[1][0], u * b[0][1] + v * b[1][1], 0.0])
    };
    let field = Field2::sample(n, n, |i, j| spec.frequency(&to_k([i as f64, j as f64])));
    let step = norm(&b[0]) * h;
    let elements = marching_squares(&field, omega)
        .into_iter()
        .filter_map(|(a, c)| {
            let pa = polish(spec, to_k(a), omega, step).0;
            let pc = polish(spec, to_k(c), omega, step).0;
            let len = dist(&pa, &pc);
            (len > 0.0).then(|| {
                let mid = polish(spec, WaveVector(lerp(&pa, &pc, 0.5)), omega, step);
                element(spec, spec.fold(&mid), len)
            })
        })
        .collect();
    (elements, identity_orbit())
}
