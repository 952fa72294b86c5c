//! Level-set extraction on sampled scalar fields: marching squares on a
//! rectangular grid of samples and marching tetrahedra on a cubic one.
//!
//! Both routines work in fractional grid-index coordinates; callers map the
//! results to physical coordinates.

/// A line segment in grid-index coordinates `(i, j)`.
pub type Segment = ([f64; 2], [f64; 2]);

/// A triangle in grid-index coordinates `(i, j, l)`.
pub type Triangle = [[f64; 3]; 3];

/// Row-major samples of a 2D field on `(n_i + 1) x (n_j + 1)` vertices.
#[derive(Debug, Clone)]
pub struct Field2 {
    pub n_i: usize,
    pub n_j: usize,
    pub values: Vec<f64>,
}

impl Field2 {
    pub fn sample<F: Fn(usize, usize) -> f64>(n_i: usize, n_j: usize, f: F) -> Self {
        let mut values = Vec::with_capacity((n_i + 1) * (n_j + 1));
        for i in 0..=n_i {
            for j in 0..=n_j {
                values.push(f(i, j));
            }
        }
        Field2 { n_i, n_j, values }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * (self.n_j + 1) + j]
    }
}

#[inline]
fn crossing(a: f64, b: f64, level: f64) -> f64 {
    let d = b - a;
    if d == 0.0 {
        0.5
    } else {
        ((level - a) / d).clamp(0.0, 1.0)
    }
}

/// Marching squares. A vertex counts as inside when its value is `>= level`.
/// Ambiguous saddle cells are resolved with the cell-centre average.
pub fn marching_squares(field: &Field2, level: f64) -> Vec<Segment> {
    let mut out = Vec::new();
    for i in 0..field.n_i {
        for j in 0..field.n_j {
            // corners counter-clockwise: (i,j) (i+1,j) (i+1,j+1) (i,j+1)
            let v = [
                field.at(i, j),
                field.at(i + 1, j),
                field.at(i + 1, j + 1),
                field.at(i, j + 1),
            ];
            let mut case = 0u8;
            for (bit, &x) in v.iter().enumerate() {
                if x >= level {
                    case |= 1 << bit;
                }
            }
            if case == 0 || case == 15 {
                continue;
            }
            let (fi, fj) = (i as f64, j as f64);
            // edge e runs from corner e to corner e+1
            let edge_point = |e: usize| -> [f64; 2] {
                let s = crossing(v[e], v[(e + 1) % 4], level);
                match e {
                    0 => [fi + s, fj],
                    1 => [fi + 1.0, fj + s],
                    2 => [fi + 1.0 - s, fj + 1.0],
                    _ => [fi, fj + 1.0 - s],
                }
            };
            let mut push = |a: usize, b: usize| out.push((edge_point(a), edge_point(b)));
            match case {
                1 | 14 => push(3, 0),
                2 | 13 => push(0, 1),
                3 | 12 => push(3, 1),
                4 | 11 => push(1, 2),
                6 | 9 => push(0, 2),
                7 | 8 => push(2, 3),
                5 | 10 => {
                    let centre = v.iter().sum::<f64>() / 4.0;
                    let centre_in = centre >= level;
                    // case 5: corners 0 and 2 inside
                    if (case == 5) == centre_in {
                        push(0, 1);
                        push(2, 3);
                    } else {
                        push(3, 0);
                        push(1, 2);
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    out
}

/// Row-major samples of a 3D field on `(n + 1)^3` vertices.
#[derive(Debug, Clone)]
pub struct Field3 {
    pub n: usize,
    pub values: Vec<f64>,
}

impl Field3 {
    pub fn sample<F: Fn(usize, usize, usize) -> f64>(n: usize, f: F) -> Self {
        let mut values = Vec::with_capacity((n + 1).pow(3));
        for i in 0..=n {
            for j in 0..=n {
                for l in 0..=n {
                    values.push(f(i, j, l));
                }
            }
        }
        Field3 { n, values }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, l: usize) -> f64 {
        let m = self.n + 1;
        self.values[(i * m + j) * m + l]
    }
}

// Freudenthal split of the unit cube into six tetrahedra sharing the main
// diagonal; neighbouring cubes get matching face triangulations.
const CUBE_CORNERS: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [1, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [0, 1, 1],
    [1, 1, 1],
];
const TETRAHEDRA: [[usize; 4]; 6] = [
    [0, 1, 3, 7],
    [0, 3, 2, 7],
    [0, 2, 6, 7],
    [0, 6, 4, 7],
    [0, 4, 5, 7],
    [0, 5, 1, 7],
];

/// Marching tetrahedra; same inside convention as [`marching_squares`].
pub fn marching_tetrahedra(field: &Field3, level: f64) -> Vec<Triangle> {
    let mut out = Vec::new();
    for i in 0..field.n {
        for j in 0..field.n {
            for l in 0..field.n {
                let mut pos = [[0.0; 3]; 8];
                let mut val = [0.0; 8];
                for (c, off) in CUBE_CORNERS.iter().enumerate() {
                    let (a, b, d) = (i + off[0], j + off[1], l + off[2]);
                    pos[c] = [a as f64, b as f64, d as f64];
                    val[c] = field.at(a, b, d);
                }
                let all_in = val.iter().all(|&x| x >= level);
                let all_out = val.iter().all(|&x| x < level);
                if all_in || all_out {
                    continue;
                }
                for tet in &TETRAHEDRA {
                    tetrahedron(&pos, &val, tet, level, &mut out);
                }
            }
        }
    }
    out
}

fn tetrahedron(
    pos: &[[f64; 3]; 8],
    val: &[f64; 8],
    tet: &[usize; 4],
    level: f64,
    out: &mut Vec<Triangle>,
) {
    let (inside, outside): (Vec<usize>, Vec<usize>) =
        tet.iter().copied().partition(|&c| val[c] >= level);
    let cut = |a: usize, b: usize| -> [f64; 3] {
        let s = crossing(val[a], val[b], level);
        [
            pos[a][0] + s * (pos[b][0] - pos[a][0]),
            pos[a][1] + s * (pos[b][1] - pos[a][1]),
            pos[a][2] + s * (pos[b][2] - pos[a][2]),
        ]
    };
    match (inside.len(), outside.len()) {
        (1, 3) => {
            let a = inside[0];
            out.push([cut(a, outside[0]), cut(a, outside[1]), cut(a, outside[2])]);
        }
        (3, 1) => {
            let a = outside[0];
            out.push([cut(a, inside[0]), cut(a, inside[1]), cut(a, inside[2])]);
        }
        (2, 2) => {
            let (a, b) = (inside[0], inside[1]);
            let (c, d) = (outside[0], outside[1]);
            // quadrilateral a-c, a-d, b-d, b-c
            let p = [cut(a, c), cut(a, d), cut(b, d), cut(b, c)];
            out.push([p[0], p[1], p[2]]);
            out.push([p[0], p[2], p[3]]);
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg_len(s: &Segment) -> f64 {
        ((s.0[0] - s.1[0]).powi(2) + (s.0[1] - s.1[1]).powi(2)).sqrt()
    }

    #[test]
    fn circle_perimeter_converges() {
        let n = 400;
        let c = n as f64 / 2.0;
        let r = n as f64 / 3.0;
        let field = Field2::sample(n, n, |i, j| {
            let (x, y) = (i as f64 - c, j as f64 - c);
            (x * x + y * y).sqrt()
        });
        let segs = marching_squares(&field, r);
        let perim: f64 = segs.iter().map(seg_len).sum();
        assert!((perim / (2.0 * std::f64::consts::PI * r) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn no_contour_when_field_is_constant() {
        let field = Field2::sample(4, 4, |_, _| 1.0);
        assert!(marching_squares(&field, 2.0).is_empty());
    }

    #[test]
    fn sphere_area_converges() {
        let n = 60;
        let c = n as f64 / 2.0;
        let r = n as f64 / 3.0;
        let field = Field3::sample(n, |i, j, l| {
            let (x, y, z) = (i as f64 - c, j as f64 - c, l as f64 - c);
            (x * x + y * y + z * z).sqrt()
        });
        let tris = marching_tetrahedra(&field, r);
        let area: f64 = tris
            .iter()
            .map(|t| {
                let u = [t[1][0] - t[0][0], t[1][1] - t[0][1], t[1][2] - t[0][2]];
                let v = [t[2][0] - t[0][0], t[2][1] - t[0][1], t[2][2] - t[0][2]];
                let cx = u[1] * v[2] - u[2] * v[1];
                let cy = u[2] * v[0] - u[0] * v[2];
                let cz = u[0] * v[1] - u[1] * v[0];
                0.5 * (cx * cx + cy * cy + cz * cz).sqrt()
            })
            .sum();
        let exact = 4.0 * std::f64::consts::PI * r * r;
        assert!((area / exact - 1.0).abs() < 5e-3, "area ratio {}", area / exact);
    }
}
