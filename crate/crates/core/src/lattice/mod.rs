//! Crystal geometry: dispersion relations, Brillouin-zone quadrature grids and
//! resonant iso-frequency manifolds for cubic (1D/2D/3D) and triangular (2D)
//! lattices with nearest-neighbour harmonic coupling. Units: hbar = m = a = 1.

mod manifold;

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use manifold::{resonant_manifold, IsoFrequencyManifold, ManifoldElement};

pub type Vec3 = [f64; 3];

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Domain tolerance used when checking whether a wave vector lies in the
/// integration cell.
const DOMAIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    Cubic,
    Triangular,
}

/// Crystal geometry plus on-site frequency `omega0` and spring coupling `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeSpec {
    dimension: usize,
    symmetry: Symmetry,
    omega0: f64,
    coupling: f64,
}

/// A crystal momentum, zero-padded to three components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WaveVector(pub Vec3);

impl WaveVector {
    pub fn new(components: &[f64]) -> Self {
        assert!(components.len() <= 3, "at most three components");
        let mut k = [0.0; 3];
        k[..components.len()].copy_from_slice(components);
        WaveVector(k)
    }

    #[inline]
    pub fn dot(&self, r: &Vec3) -> f64 {
        self.0[0] * r[0] + self.0[1] * r[1] + self.0[2] * r[2]
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(&self.0)
    }
}

#[inline]
pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
fn sin_half_sq(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    s * s
}

/// Bond directions entering the triangular dispersion: `l_j = k . d_j`.
const TRIANGULAR_BONDS: [Vec3; 3] = [
    [1.0, 0.0, 0.0],
    [0.5, SQRT3 / 2.0, 0.0],
    [0.5, -SQRT3 / 2.0, 0.0],
];

impl LatticeSpec {
    pub fn cubic(dimension: usize, omega0: f64, coupling: f64) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return invalid(format!("cubic lattice dimension must be 1, 2 or 3 (got {dimension})"));
        }
        Self::checked(dimension, Symmetry::Cubic, omega0, coupling)
    }

    pub fn triangular(omega0: f64, coupling: f64) -> Result<Self> {
        Self::checked(2, Symmetry::Triangular, omega0, coupling)
    }

    pub fn new(dimension: usize, symmetry: Symmetry, omega0: f64, coupling: f64) -> Result<Self> {
        match symmetry {
            Symmetry::Cubic => Self::cubic(dimension, omega0, coupling),
            Symmetry::Triangular if dimension == 2 => Self::triangular(omega0, coupling),
            Symmetry::Triangular => invalid("triangular lattices are two-dimensional"),
        }
    }

    fn checked(dimension: usize, symmetry: Symmetry, omega0: f64, coupling: f64) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return invalid(format!("omega0 must be positive (got {omega0})"));
        }
        if !(coupling >= 0.0 && coupling.is_finite()) {
            return invalid(format!("coupling g must be non-negative (got {coupling})"));
        }
        Ok(LatticeSpec {
            dimension,
            symmetry,
            omega0,
            coupling,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// Squared dispersion, evaluated for any `k` (periodic extension).
    #[inline]
    pub fn frequency_sq(&self, k: &WaveVector) -> f64 {
        let w0 = self.omega0 * self.omega0;
        match self.symmetry {
            Symmetry::Cubic => {
                let d = self.dimension;
                let s: f64 = k.0[..d].iter().map(|&x| sin_half_sq(x)).sum();
                w0 + 4.0 * d as f64 * self.coupling * s
            }
            Symmetry::Triangular => {
                let s: f64 = TRIANGULAR_BONDS
                    .iter()
                    .map(|b| sin_half_sq(k.dot(b)))
                    .sum();
                w0 + 8.0 * self.coupling * s
            }
        }
    }

    /// Dispersion without the domain check.
    #[inline]
    pub fn frequency(&self, k: &WaveVector) -> f64 {
        self.frequency_sq(k).sqrt()
    }

    /// Gradient of the dispersion, without the domain check.
    #[inline]
    pub fn gradient(&self, k: &WaveVector) -> Vec3 {
        let w = self.frequency(k);
        let mut out = [0.0; 3];
        match self.symmetry {
            Symmetry::Cubic => {
                let pre = self.dimension as f64 * self.coupling / w;
                for (o, &x) in out.iter_mut().zip(&k.0[..self.dimension]) {
                    *o = pre * x.sin();
                }
            }
            Symmetry::Triangular => {
                let pre = 2.0 * self.coupling / w;
                for b in &TRIANGULAR_BONDS {
                    let s = k.dot(b).sin();
                    out[0] += pre * s * b[0];
                    out[1] += pre * s * b[1];
                }
            }
        }
        out
    }

    /// `omega(k)`; rejects wave vectors outside the integration cell.
    pub fn dispersion(&self, k: &WaveVector) -> Result<f64> {
        self.check_domain(k)?;
        Ok(self.frequency(k))
    }

    /// Analytic group velocity `grad_k omega`.
    pub fn group_velocity(&self, k: &WaveVector) -> Result<Vec3> {
        self.check_domain(k)?;
        Ok(self.gradient(k))
    }

    fn check_domain(&self, k: &WaveVector) -> Result<()> {
        if k.0[self.dimension..].iter().any(|&x| x != 0.0) {
            return invalid(format!(
                "wave vector {:?} has components beyond dimension {}",
                k.0, self.dimension
            ));
        }
        if !self.contains(k) {
            return invalid(format!("wave vector {:?} lies outside the Brillouin zone", k.0));
        }
        Ok(())
    }

    /// True when `k` lies in the integration cell: `[-pi, pi]^D` for cubic
    /// lattices, the hexagonal Wigner-Seitz cell for the triangular one.
    pub fn contains(&self, k: &WaveVector) -> bool {
        match self.symmetry {
            Symmetry::Cubic => k.0[..self.dimension]
                .iter()
                .all(|&x| x.abs() <= PI * (1.0 + DOMAIN_TOL)),
            Symmetry::Triangular => hexagon_neighbours()
                .iter()
                .all(|g| k.dot(g) <= 0.5 * dot(g, g) * (1.0 + DOMAIN_TOL)),
        }
    }

    /// Translate `k` by reciprocal lattice vectors into the integration cell.
    pub fn fold(&self, k: &WaveVector) -> WaveVector {
        let mut out = *k;
        match self.symmetry {
            Symmetry::Cubic => {
                for x in &mut out.0[..self.dimension] {
                    *x -= TAU * (*x / TAU).round();
                }
            }
            Symmetry::Triangular => {
                // coarse reduction in the primitive basis, then walk to the
                // closest lattice point
                let b = reciprocal_triangular();
                let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
                let u = (out.0[0] * b[1][1] - out.0[1] * b[1][0]) / det;
                let v = (b[0][0] * out.0[1] - b[0][1] * out.0[0]) / det;
                let (u, v) = (u.round(), v.round());
                out.0[0] -= u * b[0][0] + v * b[1][0];
                out.0[1] -= u * b[0][1] + v * b[1][1];
                for _ in 0..4 {
                    let mut moved = false;
                    for g in hexagon_neighbours() {
                        if out.dot(&g) > 0.5 * dot(&g, &g) {
                            out.0[0] -= g[0];
                            out.0[1] -= g[1];
                            moved = true;
                        }
                    }
                    if !moved {
                        break;
                    }
                }
            }
        }
        out
    }

    pub fn band_min(&self) -> f64 {
        self.omega0
    }

    /// Top of the band: `sqrt(w0^2 + 4 D^2 g)` at the cubic zone corner,
    /// `sqrt(w0^2 + 18 g)` at the triangular K points.
    pub fn band_max(&self) -> f64 {
        let w0 = self.omega0 * self.omega0;
        match self.symmetry {
            Symmetry::Cubic => {
                let d = self.dimension as f64;
                (w0 + 4.0 * d * d * self.coupling).sqrt()
            }
            Symmetry::Triangular => (w0 + 18.0 * self.coupling).sqrt(),
        }
    }

    /// Wave vectors where the band maximum is attained (one per inequivalent
    /// point).
    pub fn band_max_points(&self) -> Vec<WaveVector> {
        match self.symmetry {
            Symmetry::Cubic => vec![WaveVector::new(&vec![PI; self.dimension])],
            Symmetry::Triangular => vec![
                WaveVector::new(&[4.0 * PI / 3.0, 0.0]),
                WaveVector::new(&[-4.0 * PI / 3.0, 0.0]),
            ],
        }
    }

    /// Measure of the integration cell: `(2 pi)^D` or `8 pi^2 / sqrt 3`.
    pub fn cell_volume(&self) -> f64 {
        match self.symmetry {
            Symmetry::Cubic => TAU.powi(self.dimension as i32),
            Symmetry::Triangular => 8.0 * PI * PI / SQRT3,
        }
    }

    /// Primitive vectors of the direct lattice.
    pub fn lattice_vectors(&self) -> Vec<Vec3> {
        match self.symmetry {
            Symmetry::Cubic => (0..self.dimension)
                .map(|i| {
                    let mut v = [0.0; 3];
                    v[i] = 1.0;
                    v
                })
                .collect(),
            Symmetry::Triangular => vec![[1.0, 0.0, 0.0], [0.5, SQRT3 / 2.0, 0.0]],
        }
    }

    /// Primitive vectors of the reciprocal lattice.
    pub fn reciprocal_vectors(&self) -> Vec<Vec3> {
        match self.symmetry {
            Symmetry::Cubic => self
                .lattice_vectors()
                .into_iter()
                .map(|v| v.map(|x| TAU * x))
                .collect(),
            Symmetry::Triangular => {
                let b = reciprocal_triangular();
                vec![[b[0][0], b[0][1], 0.0], [b[1][0], b[1][1], 0.0]]
            }
        }
    }

    /// Point-group operations (orthogonal matrices acting on `k` or `r`).
    pub fn point_group(&self) -> Vec<[[f64; 3]; 3]> {
        match self.symmetry {
            Symmetry::Cubic => {
                let d = self.dimension;
                let mut ops = Vec::new();
                for perm in permutations(d) {
                    for signs in 0..(1usize << d) {
                        let mut m = [[0.0; 3]; 3];
                        for (row, &col) in perm.iter().enumerate() {
                            m[row][col] = if signs >> row & 1 == 1 { -1.0 } else { 1.0 };
                        }
                        ops.push(m);
                    }
                }
                ops
            }
            Symmetry::Triangular => {
                let mut ops = Vec::with_capacity(12);
                for n in 0..6 {
                    let a = n as f64 * PI / 3.0;
                    let (s, c) = a.sin_cos();
                    ops.push([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]);
                    // rotation composed with the mirror y -> -y
                    ops.push([[c, s, 0.0], [s, -c, 0.0], [0.0, 0.0, 1.0]]);
                }
                ops
            }
        }
    }

    /// Largest group speed over the Brillouin zone, by a grid scan refined
    /// with a shrinking pattern search.
    pub fn max_group_velocity(&self) -> f64 {
        let n = match self.dimension {
            1 => 4096,
            2 => 256,
            _ => 48,
        };
        let grid = BzGrid { spec: *self, n };
        let speed = |k: &WaveVector| norm(&self.gradient(k));
        let (mut best_k, mut best) = (WaveVector::default(), 0.0);
        for i in 0..grid.len() {
            let (k, _) = grid.node(i);
            let v = speed(&k);
            if v > best {
                best = v;
                best_k = k;
            }
        }
        let mut step = grid.spacing();
        while step > 1e-10 {
            let mut improved = false;
            for axis in 0..self.dimension {
                for dir in [-1.0, 1.0] {
                    let mut k = best_k;
                    k.0[axis] += dir * step;
                    let v = speed(&k);
                    if v > best {
                        best = v;
                        best_k = k;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Reciprocal basis of the triangular lattice with direct vectors
/// `(1, 0)` and `(1/2, sqrt3/2)`.
fn reciprocal_triangular() -> [[f64; 2]; 2] {
    [[TAU, -TAU / SQRT3], [0.0, 2.0 * TAU / SQRT3]]
}

/// The six shortest reciprocal vectors; their bisectors bound the hexagonal
/// Wigner-Seitz cell.
fn hexagon_neighbours() -> [Vec3; 6] {
    let b = reciprocal_triangular();
    let b1 = [b[0][0], b[0][1], 0.0];
    let b2 = [b[1][0], b[1][1], 0.0];
    let b12 = [b1[0] + b2[0], b1[1] + b2[1], 0.0];
    let neg = |v: Vec3| [-v[0], -v[1], 0.0];
    [b1, neg(b1), b2, neg(b2), b12, neg(b12)]
}

/// Uniform quadrature over the integration cell.
///
/// Cubic lattices use the midpoint rule on `[-pi, pi]^D`. The triangular
/// lattice uses the midpoint rule on the reciprocal primitive cell with every
/// node translated into the hexagonal Wigner-Seitz cell. For periodic
/// integrands both are spectrally accurate.
#[derive(Debug, Clone, Copy)]
pub struct BzGrid {
    spec: LatticeSpec,
    n: usize,
}

pub fn bz_domain(spec: &LatticeSpec, n_per_axis: usize) -> Result<BzGrid> {
    if n_per_axis < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 grid points per axis (got {n_per_axis})"
        )));
    }
    Ok(BzGrid {
        spec: *spec,
        n: n_per_axis,
    })
}

impl BzGrid {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn n_per_axis(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.spec.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of every node.
    pub fn weight(&self) -> f64 {
        self.spec.cell_volume() / self.len() as f64
    }

    /// Node spacing along a primitive reciprocal direction.
    pub fn spacing(&self) -> f64 {
        match self.spec.symmetry {
            Symmetry::Cubic => TAU / self.n as f64,
            Symmetry::Triangular => 4.0 * PI / SQRT3 / self.n as f64,
        }
    }

    /// Node coordinates along one axis (cubic grids are tensor products).
    pub fn axis_nodes(&self) -> Option<Vec<f64>> {
        match self.spec.symmetry {
            Symmetry::Cubic => {
                let h = TAU / self.n as f64;
                Some((0..self.n).map(|j| -PI + (j as f64 + 0.5) * h).collect())
            }
            Symmetry::Triangular => None,
        }
    }

    pub fn node(&self, index: usize) -> (WaveVector, f64) {
        let n = self.n;
        let h = 1.0 / n as f64;
        let w = self.weight();
        match self.spec.symmetry {
            Symmetry::Cubic => {
                let mut k = [0.0; 3];
                let mut rest = index;
                for axis in (0..self.spec.dimension).rev() {
                    let j = rest % n;
                    rest /= n;
                    k[axis] = -PI + (j as f64 + 0.5) * h * TAU;
                }
                (WaveVector(k), w)
            }
            Symmetry::Triangular => {
                let (i, j) = (index / n, index % n);
                let u = (i as f64 + 0.5) * h - 0.5;
                let v = (j as f64 + 0.5) * h - 0.5;
                let b = reciprocal_triangular();
                let k = WaveVector([
                    u * b[0][0] + v * b[1][0],
                    u * b[0][1] + v * b[1][1],
                    0.0,
                ]);
                (self.spec.fold(&k), w)
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (WaveVector, f64)> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::compensated_sum;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn square() -> LatticeSpec {
        LatticeSpec::cubic(2, 1.0, 3.0 / 16.0).unwrap()
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(LatticeSpec::cubic(4, 1.0, 0.1).is_err());
        assert!(LatticeSpec::cubic(1, 0.0, 0.1).is_err());
        assert!(LatticeSpec::cubic(1, 1.0, -0.1).is_err());
        assert!(LatticeSpec::new(3, Symmetry::Triangular, 1.0, 0.1).is_err());
    }

    #[test]
    fn square_band_edges() {
        let s = square();
        assert_eq!(s.dispersion(&WaveVector::new(&[0.0, 0.0])).unwrap(), 1.0);
        assert_relative_eq!(
            s.dispersion(&WaveVector::new(&[PI, PI])).unwrap(),
            2.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(s.band_max(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn chain_band_top_matches_zone_edge() {
        let s = LatticeSpec::cubic(1, 1.0, 0.75).unwrap();
        assert_relative_eq!(s.band_max(), s.frequency(&WaveVector::new(&[PI])), epsilon = 1e-15);
        assert_relative_eq!(s.band_max(), 2.0, epsilon = 1e-15);
        let s3 = LatticeSpec::cubic(3, 1.0, 0.05).unwrap();
        assert_relative_eq!(
            s3.band_max(),
            s3.frequency(&WaveVector::new(&[PI, PI, PI])),
            epsilon = 1e-15
        );
    }

    #[test]
    fn triangular_band_maximum_by_grid_search() {
        let s = LatticeSpec::triangular(1.0, 0.165).unwrap();
        let grid = bz_domain(&s, 600).unwrap();
        let max = grid.iter().map(|(k, _)| s.frequency(&k)).fold(0.0, f64::max);
        assert!((max - 1.992).abs() < 1e-3, "grid max {max}");
        assert!(max <= s.band_max() + 1e-12);
        assert_relative_eq!(s.band_max(), 3.97f64.sqrt(), epsilon = 1e-15);
        for k in s.band_max_points() {
            assert_relative_eq!(s.frequency(&k), s.band_max(), epsilon = 1e-12);
        }
    }

    #[test]
    fn out_of_zone_is_an_input_error() {
        let s = square();
        assert!(s.dispersion(&WaveVector::new(&[3.2, 0.0])).is_err());
        assert!(s.dispersion(&WaveVector::new(&[0.0, 0.0, 0.1])).is_err());
        let t = LatticeSpec::triangular(1.0, 0.165).unwrap();
        // the hexagon corner lies at 4 pi / 3 along k_x
        assert!(t.dispersion(&WaveVector::new(&[4.0 * PI / 3.0 - 1e-6, 0.0])).is_ok());
        assert!(t.dispersion(&WaveVector::new(&[4.3, 0.0])).is_err());
        assert!(t.dispersion(&WaveVector::new(&[0.0, 3.7])).is_err());
    }

    #[test]
    fn group_velocity_examples() {
        let s = LatticeSpec::cubic(1, 1.0, 0.75).unwrap();
        assert_eq!(s.group_velocity(&WaveVector::new(&[0.0])).unwrap()[0], 0.0);
        let k = 0.164f64;
        // central difference, independent of the analytic gradient
        let h = 1e-5;
        let fd = (s.frequency(&WaveVector::new(&[k + h])) - s.frequency(&WaveVector::new(&[k - h])))
            / (2.0 * h);
        let v = s.group_velocity(&WaveVector::new(&[k])).unwrap()[0];
        assert_relative_eq!(v, fd, max_relative = 1e-9);
        assert!((v - 0.1213).abs() < 1e-4, "v = {v}");
    }

    #[test]
    fn max_group_velocity_by_scan() {
        let s = LatticeSpec::cubic(1, 1.0, 0.75).unwrap();
        let scan = (0..200_001)
            .map(|i| {
                let k = PI * i as f64 / 200_000.0;
                let w = (1.0 + 3.0 * (k / 2.0).sin().powi(2)).sqrt();
                0.75 * k.sin() / w
            })
            .fold(0.0, f64::max);
        assert_relative_eq!(s.max_group_velocity(), scan, max_relative = 1e-9);
    }

    #[test]
    fn grid_weights_sum_to_cell_measure() {
        let g1 = bz_domain(&LatticeSpec::cubic(1, 1.0, 0.5).unwrap(), 4).unwrap();
        assert_eq!(g1.len(), 4);
        assert_relative_eq!(compensated_sum(g1.iter().map(|(_, w)| w)), TAU, max_relative = 1e-12);

        let g2 = bz_domain(&square(), 100).unwrap();
        assert_eq!(g2.len(), 10_000);
        assert_relative_eq!(
            compensated_sum(g2.iter().map(|(_, w)| w)),
            TAU * TAU,
            max_relative = 1e-12
        );

        let t = LatticeSpec::triangular(1.0, 0.165).unwrap();
        let g3 = bz_domain(&t, 200).unwrap();
        let hex_area = 8.0 * PI * PI / 3f64.sqrt();
        assert_relative_eq!(compensated_sum(g3.iter().map(|(_, w)| w)), hex_area, max_relative = 1e-12);
        assert!(g3.iter().all(|(k, _)| t.contains(&k)));
        assert!(bz_domain(&t, 1).is_err());
    }

    #[test]
    fn hexagon_area_by_point_counting() {
        // Monte-Carlo style counting on a fine lattice of points in the
        // bounding box, independent of the folded quadrature grid.
        let t = LatticeSpec::triangular(1.0, 0.1).unwrap();
        let (xmax, ymax) = (4.0 * PI / 3.0, 2.0 * PI / 3f64.sqrt());
        let m = 1500;
        let mut inside = 0usize;
        for i in 0..m {
            for j in 0..m {
                let x = -xmax + (i as f64 + 0.5) * 2.0 * xmax / m as f64;
                let y = -ymax + (j as f64 + 0.5) * 2.0 * ymax / m as f64;
                if t.contains(&WaveVector::new(&[x, y])) {
                    inside += 1;
                }
            }
        }
        let area = inside as f64 / (m * m) as f64 * 4.0 * xmax * ymax;
        assert_relative_eq!(area, t.cell_volume(), max_relative = 2e-3);
    }

    #[test]
    fn point_groups_have_expected_order() {
        assert_eq!(LatticeSpec::cubic(1, 1.0, 0.1).unwrap().point_group().len(), 2);
        assert_eq!(square().point_group().len(), 8);
        assert_eq!(LatticeSpec::cubic(3, 1.0, 0.1).unwrap().point_group().len(), 48);
        assert_eq!(LatticeSpec::triangular(1.0, 0.1).unwrap().point_group().len(), 12);
    }

    fn apply(m: &[[f64; 3]; 3], k: &WaveVector) -> WaveVector {
        let mut out = [0.0; 3];
        for (o, row) in out.iter_mut().zip(m) {
            *o = dot(row, &k.0);
        }
        WaveVector(out)
    }

    fn spec_strategy() -> impl Strategy<Value = LatticeSpec> {
        prop_oneof![
            (1usize..=3, 0.5f64..2.0, 0.0f64..1.0)
                .prop_map(|(d, w, g)| LatticeSpec::cubic(d, w, g).unwrap()),
            (0.5f64..2.0, 0.0f64..1.0).prop_map(|(w, g)| LatticeSpec::triangular(w, g).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn dispersion_is_point_group_invariant(spec in spec_strategy(), a in -PI..PI, b in -PI..PI, c in -PI..PI) {
            let mut k = WaveVector::new(&[a, b, c]);
            for x in &mut k.0[spec.dimension()..] { *x = 0.0; }
            let w = spec.frequency(&k);
            let minus = WaveVector(k.0.map(|x| -x));
            prop_assert!((spec.frequency(&minus) - w).abs() < 1e-12);
            for op in spec.point_group() {
                prop_assert!((spec.frequency(&apply(&op, &k)) - w).abs() < 1e-12);
            }
            prop_assert!(w >= spec.band_min() - 1e-12 && w <= spec.band_max() + 1e-12);
        }

        #[test]
        fn gradient_matches_central_differences(spec in spec_strategy(), a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
            let mut k = WaveVector::new(&[a, b, c]);
            for x in &mut k.0[spec.dimension()..] { *x = 0.0; }
            let grad = spec.gradient(&k);
            let h = 1e-4;
            for axis in 0..spec.dimension() {
                let (mut kp, mut km) = (k, k);
                kp.0[axis] += h;
                km.0[axis] -= h;
                let fd = (spec.frequency(&kp) - spec.frequency(&km)) / (2.0 * h);
                let scale = grad[axis].abs().max(1e-3);
                prop_assert!((fd - grad[axis]).abs() / scale < 1e-6,
                    "axis {} fd {} analytic {}", axis, fd, grad[axis]);
            }
        }

        #[test]
        fn folding_preserves_frequency(spec in spec_strategy(), a in -12.0f64..12.0, b in -12.0f64..12.0) {
            let mut k = WaveVector::new(&[a, b, 0.3]);
            for x in &mut k.0[spec.dimension()..] { *x = 0.0; }
            let f = spec.fold(&k);
            prop_assert!(spec.contains(&f));
            prop_assert!((spec.frequency(&f) - spec.frequency(&k)).abs() < 1e-12);
        }
    }
}
