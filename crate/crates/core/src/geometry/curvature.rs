//! Pointwise Riemannian data from a metric chart.
//!
//! Storage convention: `riemann(a, b, c, d)` is the `d`-th component of
//! `R_{∂a ∂b} ∂c` where `R_{XY} = ∇_{[X,Y]} − [∇_X, ∇_Y]`, i.e. minus the usual
//! `R(X,Y)`. With this sign `⟨R_{XY}X, Y⟩ = K(X,Y)` for orthonormal `X, Y`,
//! and `U ↦ R_{NU}N` is the Jacobi operator entering `S' = S² + R`.
//! In index form `riemann(a,b,c,d) = −R^d_{cab}` with the textbook
//! `R^d_{cab} = ∂_a Γ^d_{bc} − ∂_b Γ^d_{ac} + Γ^d_{ae}Γ^e_{bc} − Γ^d_{be}Γ^e_{ac}`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::dual::{jet1, jet2};
use crate::error::{Error, Result};
use crate::geometry::manifold::{ChartId, MetricChart};
use crate::linalg::{bilinear, inverse};
use crate::scalar::{lift, Real};

const DEGENERACY_FLOOR: f64 = 1e-12;

/// `Γ^k_{ij}` stored at `k·n² + i·n + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel<F> {
    pub n: usize,
    pub data: Vec<F>,
}

impl<F: Real> Christoffel<F> {
    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> F {
        self.data[(k * self.n + i) * self.n + j]
    }

    /// The vector `Γ(u, w)^k = Γ^k_{ij} u^i w^j`.
    pub fn contract(&self, u: &[F], w: &[F]) -> Vec<F> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let mut acc = F::zero();
                for i in 0..n {
                    if u[i] == F::zero() {
                        continue;
                    }
                    for j in 0..n {
                        acc += self.get(k, i, j) * u[i] * w[j];
                    }
                }
                acc
            })
            .collect()
    }
}

/// Full curvature data at one chart point.
#[derive(Clone, Debug)]
pub struct CurvaturePacket<F> {
    pub point: Vec<F>,
    pub metric: Vec<F>,
    pub inverse_metric: Vec<F>,
    pub christoffel: Christoffel<F>,
    /// `riemann[((a·n + b)·n + c)·n + d]`, see module docs.
    pub riemann: Vec<F>,
    /// `⟨R_{∂a ∂b} ∂c, ∂d⟩`.
    pub riemann_lower: Vec<F>,
    pub ricci: Vec<F>,
    pub scalar: F,
}

impl<F: Real> CurvaturePacket<F> {
    pub fn dim(&self) -> usize {
        self.christoffel.n
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        let n = self.dim();
        ((a * n + b) * n + c) * n + d
    }

    pub fn riemann_component(&self, a: usize, b: usize, c: usize, d: usize) -> F {
        self.riemann[self.idx(a, b, c, d)]
    }

    pub fn inner(&self, u: &[F], w: &[F]) -> F {
        bilinear(&self.metric, u, w)
    }

    /// `⟨R_{XY}Z, W⟩`.
    pub fn curvature_form(&self, x: &[F], y: &[F], z: &[F], w: &[F]) -> F {
        let n = self.dim();
        let mut acc = F::zero();
        for a in 0..n {
            if x[a] == F::zero() {
                continue;
            }
            for b in 0..n {
                if y[b] == F::zero() {
                    continue;
                }
                for c in 0..n {
                    if z[c] == F::zero() {
                        continue;
                    }
                    let s = x[a] * y[b] * z[c];
                    for d in 0..n {
                        acc += s * self.riemann_lower[self.idx(a, b, c, d)] * w[d];
                    }
                }
            }
        }
        acc
    }

    /// Matrix `M_{bd} = ⟨R_{N ∂b} N, ∂d⟩` of the Jacobi operator in coordinates.
    pub fn jacobi_form(&self, normal: &[F]) -> Vec<F> {
        let n = self.dim();
        let mut m = vec![F::zero(); n * n];
        for a in 0..n {
            if normal[a] == F::zero() {
                continue;
            }
            for c in 0..n {
                let s = normal[a] * normal[c];
                if s == F::zero() {
                    continue;
                }
                for b in 0..n {
                    for d in 0..n {
                        m[b * n + d] += s * self.riemann_lower[self.idx(a, b, c, d)];
                    }
                }
            }
        }
        m
    }

    /// Sectional curvature of the plane spanned by `x, y`.
    pub fn sectional(&self, x: &[F], y: &[F]) -> F {
        let area = self.inner(x, x) * self.inner(y, y) - self.inner(x, y) * self.inner(x, y);
        self.curvature_form(x, y, x, y) / area
    }

    /// `ρ(u, w)`.
    pub fn ricci_form(&self, u: &[F], w: &[F]) -> F {
        bilinear(&self.ricci, u, w)
    }
}

fn check_metric<F: Real>(x: &[F], g: &[F], n: usize) -> Result<()> {
    let m = DMatrix::from_fn(n, n, |i, j| g[i * n + j].re());
    if m.clone().cholesky().is_some() {
        let min_pivot = m
            .clone()
            .cholesky()
            .map(|c| {
                c.l()
                    .diagonal()
                    .iter()
                    .fold(f64::INFINITY, |a, &d| a.min(d * d))
            })
            .unwrap_or(0.0);
        if min_pivot > DEGENERACY_FLOOR {
            return Ok(());
        }
    }
    let min_eigenvalue = SymmetricEigen::new((&m + m.transpose()) * 0.5)
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, &e| a.min(e));
    if min_eigenvalue > DEGENERACY_FLOOR {
        return Ok(());
    }
    Err(Error::DegenerateMetric {
        point: x.iter().map(|v| v.re()).collect(),
        min_eigenvalue,
    })
}

fn domain<M: MetricChart, F: Real>(m: &M, chart: ChartId, x: &[F]) -> Result<()> {
    let xf: Vec<f64> = x.iter().map(|v| v.re()).collect();
    if m.in_domain(chart, &xf) {
        Ok(())
    } else {
        Err(Error::Domain { chart, point: xf })
    }
}

/// `g_{ij}(x)`, checked for domain and positive definiteness.
pub fn metric_at<M: MetricChart, F: Real>(m: &M, chart: ChartId, x: &[F]) -> Result<Vec<F>> {
    domain(m, chart, x)?;
    let g = m.metric(chart, x);
    check_metric(x, &g, m.dim())?;
    Ok(g)
}

fn christoffel_from_jet<F: Real>(n: usize, ginv: &[F], dg: &[Vec<F>]) -> (Vec<F>, Christoffel<F>) {
    // lower[l][i][j] = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    let half = F::from_f64(0.5);
    let mut lower = vec![F::zero(); n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                lower[(l * n + i) * n + j] =
                    half * (dg[i][j * n + l] + dg[j][i * n + l] - dg[l][i * n + j]);
            }
        }
    }
    let mut data = vec![F::zero(); n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = F::zero();
                for l in 0..n {
                    acc += ginv[k * n + l] * lower[(l * n + i) * n + j];
                }
                data[(k * n + i) * n + j] = acc;
            }
        }
    }
    (lower, Christoffel { n, data })
}

/// Levi-Civita connection coefficients from first derivatives of the metric.
pub fn christoffel_at<M: MetricChart, F: Real>(
    m: &M,
    chart: ChartId,
    x: &[F],
) -> Result<Christoffel<F>> {
    domain(m, chart, x)?;
    let n = m.dim();
    let jet = jet1(x, |y| m.metric(chart, y));
    check_metric(x, &jet.value, n)?;
    let ginv = inverse(&jet.value, n)
        .ok_or_else(|| Error::DifferentiationFailure("metric not invertible".into()))?;
    Ok(christoffel_from_jet(n, &ginv, &jet.d1).1)
}

/// Central-difference Christoffel symbols, the cross-check oracle for the
/// dual-number engine. Step `h = ε^{1/3}·max(1, |x_k|)`.
pub fn christoffel_fd<M: MetricChart>(m: &M, chart: ChartId, x: &[f64]) -> Result<Christoffel<f64>> {
    domain(m, chart, x)?;
    let n = m.dim();
    let g = m.metric(chart, x);
    check_metric(x, &g, n)?;
    let ginv = inverse(&g, n)
        .ok_or_else(|| Error::DifferentiationFailure("metric not invertible".into()))?;
    let base = f64::EPSILON.cbrt();
    let mut dg = Vec::with_capacity(n);
    for k in 0..n {
        let h = base * x[k].abs().max(1.0);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += h;
        xm[k] -= h;
        let (xp, xm): (Vec<f64>, Vec<f64>) = (xp, xm);
        let gp = m.metric(chart, &xp);
        let gm = m.metric(chart, &xm);
        dg.push(
            gp.iter()
                .zip(&gm)
                .map(|(a, b)| (a - b) / (xp[k] - xm[k]))
                .collect::<Vec<f64>>(),
        );
    }
    Ok(christoffel_from_jet(n, &ginv, &dg).1)
}

/// Full curvature packet from a second-order jet of the metric.
pub fn riemann_at<M: MetricChart, F: Real>(
    m: &M,
    chart: ChartId,
    x: &[F],
) -> Result<CurvaturePacket<F>> {
    domain(m, chart, x)?;
    let n = m.dim();
    let jet = jet2(x, |y| m.metric(chart, y));
    check_metric(x, &jet.value, n)?;
    let g = jet.value;
    let ginv = inverse(&g, n)
        .ok_or_else(|| Error::DifferentiationFailure("metric not invertible".into()))?;
    let (_, gamma) = christoffel_from_jet(n, &ginv, &jet.d1);
    let half = F::from_f64(0.5);

    // dgamma[m][k][i][j] = ∂_m Γ^k_ij = g^{kl}(∂_m Γ_{lij} − ∂_m g_{lb} Γ^b_ij)
    let mut dgamma = vec![F::zero(); n * n * n * n];
    let mut tmp = vec![F::zero(); n];
    for mm in 0..n {
        for i in 0..n {
            for j in 0..n {
                for (l, t) in tmp.iter_mut().enumerate() {
                    let d2 = &jet.d2[mm];
                    let mut v = half * (d2[i][j * n + l] + d2[j][i * n + l] - d2[l][i * n + j]);
                    for b in 0..n {
                        v -= jet.d1[mm][l * n + b] * gamma.get(b, i, j);
                    }
                    *t = v;
                }
                for k in 0..n {
                    let mut acc = F::zero();
                    for (l, &t) in tmp.iter().enumerate() {
                        acc += ginv[k * n + l] * t;
                    }
                    dgamma[((mm * n + k) * n + i) * n + j] = acc;
                }
            }
        }
    }
    let dg = |mm: usize, k: usize, i: usize, j: usize| dgamma[((mm * n + k) * n + i) * n + j];

    let mut riemann = vec![F::zero(); n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            for c in 0..n {
                for d in 0..n {
                    let mut r = dg(a, d, b, c) - dg(b, d, a, c);
                    for e in 0..n {
                        r += gamma.get(d, a, e) * gamma.get(e, b, c)
                            - gamma.get(d, b, e) * gamma.get(e, a, c);
                    }
                    riemann[((a * n + b) * n + c) * n + d] = -r;
                }
            }
        }
    }

    let mut riemann_lower = vec![F::zero(); n * n * n * n];
    for abc in 0..n * n * n {
        for d in 0..n {
            let mut acc = F::zero();
            for e in 0..n {
                acc += riemann[abc * n + e] * g[e * n + d];
            }
            riemann_lower[abc * n + d] = acc;
        }
    }

    let mut ricci = vec![F::zero(); n * n];
    for b in 0..n {
        for c in 0..n {
            let mut acc = F::zero();
            for a in 0..n {
                acc += riemann[((b * n + a) * n + c) * n + a];
            }
            ricci[b * n + c] = acc;
        }
    }
    let mut scalar = F::zero();
    for b in 0..n {
        for c in 0..n {
            scalar += ginv[b * n + c] * ricci[b * n + c];
        }
    }

    Ok(CurvaturePacket {
        point: x.to_vec(),
        metric: g,
        inverse_metric: ginv,
        christoffel: gamma,
        riemann,
        riemann_lower,
        ricci,
        scalar,
    })
}

/// Curvature scalars along a unit direction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureScalars {
    /// `ρ(v, v)`.
    pub ricci_vv: f64,
    /// `K(v, e_a)` for each frame vector.
    pub sectional: Vec<f64>,
    pub scalar: f64,
}

/// `ρ(v,v)`, the sectional curvatures `K(v, e_a)` and the scalar curvature.
pub fn curvature_scalars_at<M: MetricChart>(
    m: &M,
    chart: ChartId,
    x: &[f64],
    v: &[f64],
    frame: &[Vec<f64>],
) -> Result<CurvatureScalars> {
    let packet = riemann_at::<M, f64>(m, chart, x)?;
    let vv = packet.inner(v, v);
    if (vv - 1.0).abs() > 1e-8 {
        return Err(Error::NotUnitVector { norm_sq: vv });
    }
    Ok(CurvatureScalars {
        ricci_vv: packet.ricci_form(v, v),
        sectional: frame.iter().map(|e| packet.sectional(v, e)).collect(),
        scalar: packet.scalar,
    })
}

/// Convenience: curvature packet at an `f64` point in any real type.
pub fn riemann_at_f64<M: MetricChart, F: Real>(
    m: &M,
    chart: ChartId,
    x: &[f64],
) -> Result<CurvaturePacket<F>> {
    riemann_at(m, chart, &lift::<F>(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::manifold::ChartedManifold;
    use crate::scalar::Scalar;

    const SPHERE2: ChartedManifold = ChartedManifold::Sphere { n: 2 };

    #[test]
    fn metric_examples() {
        let e = ChartedManifold::Euclidean { n: 3 };
        let g = metric_at::<_, f64>(&e, 0, &[0.2, -1.0, 5.0]).unwrap();
        assert_eq!(g, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(metric_at::<_, f64>(&SPHERE2, 0, &[0.0, 0.0]).unwrap(), vec![4.0, 0.0, 0.0, 4.0]);
        assert_eq!(metric_at::<_, f64>(&SPHERE2, 0, &[1.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn metric_outside_chart_is_domain_error() {
        let err = metric_at::<_, f64>(&SPHERE2, 0, &[20.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::Domain { chart: 0, .. }));
    }

    struct Collapsing;
    impl MetricChart for Collapsing {
        fn dim(&self) -> usize {
            2
        }
        fn metric<S: Scalar>(&self, _: ChartId, x: &[S]) -> Vec<S> {
            vec![S::one(), S::zero(), S::zero(), x[0] * x[0]]
        }
        fn in_domain(&self, _: ChartId, _: &[f64]) -> bool {
            true
        }
    }

    #[test]
    fn degenerate_metric_is_reported_not_regularized() {
        let err = metric_at::<_, f64>(&Collapsing, 0, &[0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::DegenerateMetric { .. }));
        assert!(riemann_at::<_, f64>(&Collapsing, 0, &[1e-9, 1.0]).is_err());
        assert!(metric_at::<_, f64>(&Collapsing, 0, &[0.5, 1.0]).is_ok());
    }

    #[test]
    fn christoffel_examples_on_sphere_chart() {
        let g0 = christoffel_at::<_, f64>(&SPHERE2, 0, &[0.0, 0.0]).unwrap();
        assert!(g0.data.iter().all(|v: &f64| v.abs() < 1e-15));
        // conformal factor e^{2φ}, φ = ln 2 − ln(1+|u|²): ∂_1φ = −1 at (1, 0)
        let g1 = christoffel_at::<_, f64>(&SPHERE2, 0, &[1.0, 0.0]).unwrap();
        assert!((g1.get(0, 0, 0) + 1.0).abs() < 1e-14);
        assert!((g1.get(0, 1, 1) - 1.0).abs() < 1e-14);
        assert!((g1.get(1, 0, 1) + 1.0).abs() < 1e-14);
        assert!((g1.get(1, 1, 0) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn euclidean_is_flat() {
        let e = ChartedManifold::Euclidean { n: 3 };
        let p = riemann_at::<_, f64>(&e, 0, &[0.3, 1.0, -2.0]).unwrap();
        assert!(p.riemann.iter().all(|v| *v == 0.0));
        assert!(p.ricci.iter().all(|v| *v == 0.0));
        assert_eq!(p.scalar, 0.0);
    }

    #[test]
    fn sphere_sectional_and_scalar() {
        let p = riemann_at::<_, f64>(&SPHERE2, 0, &[0.4, -0.9]).unwrap();
        let lam = p.metric[0];
        let e1 = [1.0 / lam.sqrt(), 0.0];
        let e2 = [0.0, 1.0 / lam.sqrt()];
        assert!((p.curvature_form(&e1, &e2, &e1, &e2) - 1.0).abs() < 1e-6);
        assert!((p.scalar - 2.0).abs() < 1e-10);
    }

    #[test]
    fn s4_ricci_is_three_g() {
        let s4 = ChartedManifold::Sphere { n: 4 };
        let p = riemann_at::<_, f64>(&s4, 1, &[0.3, 0.1, -0.5, 0.7]).unwrap();
        for (r, g) in p.ricci.iter().zip(&p.metric) {
            assert!((r - 3.0 * g).abs() < 1e-10);
        }
        assert!((p.scalar - 12.0).abs() < 1e-9);
    }

    #[test]
    fn curvature_scalars_unit_s4() {
        let s4 = ChartedManifold::Sphere { n: 4 };
        let x = [0.2, 0.0, 0.1, -0.3];
        let lam = s4.metric(0, &x)[0];
        let s = 1.0 / lam.sqrt();
        let e = |i: usize| {
            let mut v = vec![0.0; 4];
            v[i] = s;
            v
        };
        let out = curvature_scalars_at(&s4, 0, &x, &e(0), &[e(1), e(2), e(3)]).unwrap();
        assert!((out.ricci_vv - 3.0).abs() < 1e-10);
        assert!(out.sectional.iter().all(|k| (k - 1.0).abs() < 1e-10));
        assert!((out.scalar - 12.0).abs() < 1e-9);
    }

    #[test]
    fn product_curvature_along_line_factor() {
        // Block-diagonal oracle: S²(1)×R has K = 1 on sphere planes and 0 on
        // any plane containing the line direction; scalar curvature 2.
        let m = ChartedManifold::SphereTimesLine;
        let x = [0.5, -0.2, 1.0];
        let lam = m.metric(0, &x)[0];
        let s = 1.0 / lam.sqrt();
        let v = [0.0, 0.0, 1.0];
        let frame = vec![vec![s, 0.0, 0.0], vec![0.0, s, 0.0]];
        let out = curvature_scalars_at(&m, 0, &x, &v, &frame).unwrap();
        assert!(out.ricci_vv.abs() < 1e-12);
        assert!(out.sectional.iter().all(|k| k.abs() < 1e-12));
        assert!((out.scalar - 2.0).abs() < 1e-10);
    }

    #[test]
    fn non_unit_direction_is_rejected() {
        let e = ChartedManifold::Euclidean { n: 2 };
        let err = curvature_scalars_at(&e, 0, &[0.0, 0.0], &[1.1, 0.0], &[]).unwrap_err();
        assert!(matches!(err, Error::NotUnitVector { .. }));
    }

    #[test]
    fn f32_engine_runs() {
        let p = riemann_at_f64::<_, f32>(&SPHERE2, 0, &[0.3, 0.2]).unwrap();
        assert!((p.scalar - 2.0).abs() < 1e-3);
    }
}
