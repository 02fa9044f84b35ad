//! Deterministic low-discrepancy sampling of base points, normal directions
//! and ambient points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fermi::patch::SubmanifoldPatch;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % b) as f64 * inv;
        i /= b;
        inv /= base as f64;
    }
    out
}

/// Halton points in `[0,1)^dim` with a seeded Cranley–Patterson rotation.
#[derive(Clone, Debug)]
pub struct Halton {
    dim: usize,
    shift: Vec<f64>,
    index: u64,
}

impl Halton {
    /// `stream` separates independent uses of the same seed.
    pub fn new(dim: usize, seed: u64, stream: u64) -> Self {
        assert!(dim <= PRIMES.len(), "Halton dimension {dim} too large");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let shift = (0..dim).map(|_| rng.random::<f64>()).collect();
        // skip the origin of the unshifted sequence
        Halton { dim, shift, index: 1 }
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let i = self.index;
        self.index += 1;
        (0..self.dim)
            .map(|d| (radical_inverse(i, PRIMES[d]) + self.shift[d]).fract())
            .collect()
    }

    pub fn take_points(&mut self, n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|_| self.next_point()).collect()
    }
}

/// Standard normals from pairs of uniforms (Box–Muller), `n` of them.
fn gaussians(u: &[f64], n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    for pair in u.chunks(2) {
        let r = (-2.0 * (1.0 - pair[0]).max(1e-300).ln()).sqrt();
        let a = std::f64::consts::TAU * pair.get(1).copied().unwrap_or(0.25);
        out.push(r * a.cos());
        out.push(r * a.sin());
    }
    out.truncate(n);
    out
}

/// A point of the unit sphere `S^{k−1}` from `2⌈k/2⌉` uniforms.
pub fn sphere_point(u: &[f64], k: usize) -> Vec<f64> {
    let g = gaussians(u, k);
    let r = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    if r < 1e-12 {
        let mut e = vec![0.0; k];
        e[0] = 1.0;
        return e;
    }
    g.into_iter().map(|x| x / r).collect()
}

/// `count` unit vectors of `R^k`: alternating `±1` for `k = 1`, equispaced
/// rotated angles for `k = 2`, normalized Gaussian Halton points otherwise.
pub fn normal_directions(k: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    match k {
        0 => Vec::new(),
        1 => (0..count).map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 }]).collect(),
        2 => {
            let offset = Halton::new(1, seed, 2).next_point()[0];
            (0..count)
                .map(|i| {
                    let a = std::f64::consts::TAU * (i as f64 + offset) / count as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect()
        }
        _ => {
            let d = 2 * k.div_ceil(2);
            let mut h = Halton::new(d, seed, 3);
            (0..count).map(|_| sphere_point(&h.next_point(), k)).collect()
        }
    }
}

/// `count` parameters of the patch (a single empty one for points).
pub fn base_parameters(patch: &SubmanifoldPatch, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let m = patch.dim();
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut h = Halton::new(m, seed, 1);
    (0..count).map(|_| patch.param_from_unit(&h.next_point())).collect()
}

/// Every (base parameter, normal coefficients) pair, base-major.
pub fn ray_samples(patch: &SubmanifoldPatch, n_base: usize, n_dirs: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let bases = base_parameters(patch, n_base, seed);
    let dirs = normal_directions(patch.codim(), n_dirs, seed);
    bases
        .iter()
        .flat_map(|u| dirs.iter().map(move |v| (u.clone(), v.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_is_deterministic_and_in_range() {
        let a = Halton::new(3, 7, 0).take_points(50);
        let b = Halton::new(3, 7, 0).take_points(50);
        assert_eq!(a, b);
        assert!(a.iter().flatten().all(|x| (0.0..1.0).contains(x)));
        assert_ne!(a, Halton::new(3, 8, 0).take_points(50));
    }

    #[test]
    fn directions_are_unit() {
        for k in 1..6 {
            for v in normal_directions(k, 17, 3) {
                let n: f64 = v.iter().map(|x| x * x).sum();
                assert!((n - 1.0).abs() < 1e-14);
            }
        }
    }
}
