//! Small dense helpers over generic scalars (row-major `n×n` slices) and a few
//! nalgebra conveniences for the f64 pipeline.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::scalar::Scalar;

/// Gauss–Jordan inverse with partial pivoting on the real part.
pub fn inverse<S: Scalar>(a: &[S], n: usize) -> Option<Vec<S>> {
    let mut m = a.to_vec();
    let mut inv = vec![S::zero(); n * n];
    for i in 0..n {
        inv[i * n + i] = S::one();
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &s| {
            m[r * n + col]
                .re()
                .abs()
                .total_cmp(&m[s * n + col].re().abs())
        })?;
        if m[pivot * n + col].re().abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
        }
        let d = m[col * n + col].recip();
        for k in 0..n {
            m[col * n + k] *= d;
            inv[col * n + k] *= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r * n + col];
            if f.re() == 0.0 {
                continue;
            }
            for k in 0..n {
                let (mc, ic) = (m[col * n + k], inv[col * n + k]);
                m[r * n + k] -= f * mc;
                inv[r * n + k] -= f * ic;
            }
        }
    }
    Some(inv)
}

/// Bilinear form `uᵀ G w` with `G` row-major.
pub fn bilinear<S: Scalar>(g: &[S], u: &[S], w: &[S]) -> S {
    let n = u.len();
    let mut acc = S::zero();
    for i in 0..n {
        if u[i].re() == 0.0 && u[i].is_zero() {
            continue;
        }
        let mut row = S::zero();
        for j in 0..n {
            row += g[i * n + j] * w[j];
        }
        acc += u[i] * row;
    }
    acc
}

/// Gram–Schmidt in the inner product `g`, in order. Returns `None` when a
/// vector is (numerically) dependent on its predecessors.
pub fn gram_schmidt<S: Scalar>(g: &[S], vectors: &[Vec<S>], floor: f64) -> Option<Vec<Vec<S>>> {
    let mut out: Vec<Vec<S>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for e in &out {
            let c = bilinear(g, e, &w);
            for (wi, ei) in w.iter_mut().zip(e) {
                *wi -= c * *ei;
            }
        }
        let nrm = bilinear(g, &w, &w);
        if nrm.re() <= floor {
            return None;
        }
        let s = nrm.sqrt().recip();
        out.push(w.into_iter().map(|x| x * s).collect());
    }
    Some(out)
}

/// Symmetric eigen-decomposition with eigenvalues sorted descending.
pub fn sorted_symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let sym = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Principal square root and inverse square root of an SPD matrix.
pub fn spd_sqrt_pair(g: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = g.nrows();
    if n == 0 {
        return (DMatrix::zeros(0, 0), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new((g + g.transpose()) * 0.5);
    let q = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let di = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt()));
    (q * d * q.transpose(), q * di * q.transpose())
}

/// Max-abs entry, zero for empty matrices.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, &x| a.max(x.abs()))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for &(x, y) in points {
        let dx = x.ln() - mx;
        num += dx * (y.ln() - my);
        den += dx * dx;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let a = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
        let inv = inverse(&a, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| a[i * 3 + k] * inv[k * 3 + j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn singular_has_no_inverse() {
        assert!(inverse(&[1.0, 2.0, 2.0, 4.0], 2).is_none());
    }

    #[test]
    fn gram_schmidt_orthonormalizes_in_metric() {
        let g = [2.0f64, 0.3, 0.3, 1.0];
        let e = gram_schmidt(&g, &[vec![1.0, 0.0], vec![1.0, 1.0]], 1e-14).unwrap();
        assert!((bilinear(&g, &e[0], &e[0]) - 1.0).abs() < 1e-14);
        assert!(bilinear(&g, &e[0], &e[1]).abs() < 1e-14);
        assert!((bilinear(&g, &e[1], &e[1]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.02, 0.01]
            .iter()
            .map(|&t| (t, 3.0 * t * t * t))
            .collect();
        assert!((loglog_slope(&pts) - 3.0).abs() < 1e-12);
    }
}
