//! Fourier projections `S_c(r) = sum_k K_c(k) cos(k.r)` of Brillouin-zone
//! kernels onto a list of separations.

use std::f64::consts::PI;

use crate::lattice::{BzGrid, Symmetry, Vec3, WaveVector};
use crate::numeric::{deterministic_reduce, Compensated};

/// Direct projection over every grid node, for any lattice and any kernel.
/// The returned sums carry no quadrature weight.
pub(crate) fn direct<const NK: usize, F>(grid: &BzGrid, kernel: F, rs: &[Vec3]) -> Vec<[f64; NK]>
where
    F: Fn(&WaveVector) -> [f64; NK] + Sync,
{
    let nr = rs.len();
    let flat = deterministic_reduce(grid.len(), NK * nr, |range, acc: &mut [Compensated]| {
        for idx in range {
            let (k, _) = grid.node(idx);
            let kv = kernel(&k);
            if kv.iter().all(|&v| v == 0.0) {
                continue;
            }
            for (ri, r) in rs.iter().enumerate() {
                let c = k.dot(r).cos();
                for (j, v) in kv.iter().enumerate() {
                    acc[ri * NK + j].add(v * c);
                }
            }
        }
    });
    unflatten(&flat, nr)
}

/// Projection for cubic grids whose kernel is even in every component of `k`.
///
/// Only the positive half of each axis is visited and the sum over the
/// remaining sign images is folded into `prod_d cos(k_d r_d)`. The last axis
/// is contracted against cosine tables for each distinct last component of
/// the separations, so the cost is `(n/2)^D` kernel evaluations plus
/// `(n/2)^D` multiply-adds per distinct last component.
pub(crate) fn separable_even<const NK: usize, F>(
    grid: &BzGrid,
    axis_factor: &(dyn Fn(f64) -> f64 + Sync),
    kernel: F,
    rs: &[Vec3],
) -> Vec<[f64; NK]>
where
    F: Fn(&WaveVector) -> [f64; NK] + Sync,
{
    assert_eq!(grid.spec().symmetry(), Symmetry::Cubic);
    let n = grid.n_per_axis();
    assert!(n % 2 == 0, "separable projection needs an even grid");
    let d = grid.spec().dimension();
    let m = n / 2;
    let h = 2.0 * PI / n as f64;
    let nodes: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) * h).collect();
    let phi: Vec<f64> = nodes.iter().map(|&k| axis_factor(k)).collect();
    let nr = rs.len();

    // distinct last components and their cosine rows
    let mut last: Vec<f64> = Vec::new();
    let last_of: Vec<usize> = rs
        .iter()
        .map(|r| {
            let v = r[d - 1];
            match last.iter().position(|&u| u.to_bits() == v.to_bits()) {
                Some(p) => p,
                None => {
                    last.push(v);
                    last.len() - 1
                }
            }
        })
        .collect();
    let last_cos: Vec<Vec<f64>> = last
        .iter()
        .map(|&u| nodes.iter().zip(&phi).map(|(&k, &p)| p * (k * u).cos()).collect())
        .collect();
    // outer-axis tables, indexed [axis][separation][node]
    let outer_cos: Vec<Vec<Vec<f64>>> = (0..d - 1)
        .map(|axis| {
            rs.iter()
                .map(|r| nodes.iter().map(|&k| (k * r[axis]).cos()).collect())
                .collect()
        })
        .collect();

    let n_outer = m.pow((d - 1) as u32);
    let flat = deterministic_reduce(n_outer, NK * nr, |range, acc: &mut [Compensated]| {
        let mut row = vec![[0.0; NK]; m];
        let mut partial = vec![[0.0; NK]; last.len()];
        let mut idx = [0usize; 3];
        for outer in range {
            let mut rest = outer;
            for axis in (0..d - 1).rev() {
                idx[axis] = rest % m;
                rest /= m;
            }
            let mut k = [0.0; 3];
            let mut outer_phi = 1.0;
            for axis in 0..d - 1 {
                k[axis] = nodes[idx[axis]];
                outer_phi *= phi[idx[axis]];
            }
            for (slot, &kl) in row.iter_mut().zip(&nodes) {
                k[d - 1] = kl;
                *slot = kernel(&WaveVector(k));
            }
            for (p, cos_row) in partial.iter_mut().zip(&last_cos) {
                let mut s = [0.0; NK];
                for (kv, &c) in row.iter().zip(cos_row) {
                    for j in 0..NK {
                        s[j] += kv[j] * c;
                    }
                }
                *p = s;
            }
            for ri in 0..nr {
                let mut f = outer_phi;
                for (axis, table) in outer_cos.iter().enumerate() {
                    f *= table[ri][idx[axis]];
                }
                let s = &partial[last_of[ri]];
                for j in 0..NK {
                    acc[ri * NK + j].add(f * s[j]);
                }
            }
        }
    });
    let images = (1u64 << d) as f64;
    let mut out = unflatten::<NK>(&flat, nr);
    for v in out.iter_mut().flatten() {
        *v *= images;
    }
    out
}

fn unflatten<const NK: usize>(flat: &[f64], nr: usize) -> Vec<[f64; NK]> {
    (0..nr)
        .map(|ri| {
            let mut v = [0.0; NK];
            v.copy_from_slice(&flat[ri * NK..(ri + 1) * NK]);
            v
        })
        .collect()
}
