//! Convergence-order checks of the small-`t` expansions: the metric in Fermi
//! coordinates and the tube shape operator.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::dual::Dual;
use crate::error::{Error, Result};
use crate::fermi::ray::{normal_exponential, FermiRay};
use crate::geometry::curvature::christoffel_at;
use crate::geometry::manifold::MetricChart;
use crate::linalg::{bilinear, loglog_slope, max_abs};
use crate::tube::riccati::{coordinate_frame_shape, jacobi_fields};
use crate::tube::series::{shape_of_submanifold, SeriesCoefficients};

/// Remainder values against `t`, with the fitted log-log slope.
#[derive(Clone, Debug, Serialize)]
pub struct SlopeFit {
    pub points: Vec<(f64, f64)>,
    pub slope: Option<f64>,
    /// Every remainder sits below `exact_floor`: the expansion is exact here.
    pub exact: bool,
    pub exact_floor: f64,
    pub min_slope: f64,
    pub pass: bool,
}

/// Fit `ln r ~ slope·ln t` over the points with a positive remainder.
pub fn fit_remainder(points: Vec<(f64, f64)>, exact_floor: f64, min_slope: f64) -> Result<SlopeFit> {
    if points.iter().all(|&(_, r)| r.is_finite() && r < exact_floor) {
        return Ok(SlopeFit {
            points,
            slope: None,
            exact: true,
            exact_floor,
            min_slope,
            pass: true,
        });
    }
    let usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(t, r)| t > 0.0 && r > 0.0 && r.is_finite())
        .collect();
    if usable.len() < 4 {
        return Err(Error::FitFailure { usable: usable.len() });
    }
    let slope = loglog_slope(&usable);
    Ok(SlopeFit {
        points,
        slope: Some(slope),
        exact: false,
        exact_floor,
        min_slope,
        pass: slope >= min_slope,
    })
}

/// `n` log-spaced values between `a` and `b`.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

const STENCIL_EPS: f64 = 5e-4;

fn stencil<F>(f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let e = STENCIL_EPS;
    let (p2, p1, m1, m2) = (f(2.0 * e)?, f(e)?, f(-e)?, f(-2.0 * e)?);
    Ok((0..p1.len())
        .map(|i| (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * e))
        .collect())
}

/// Fermi-coordinate metric `g_{αβ}(t)` along the ray, from derivatives of the
/// endpoint map `(u, y) ↦ exp_{param(u)}(Σ y_j E_j(u))`. Tangential fields vary
/// `u` along the orthonormal tangent directions while keeping the normal
/// vector parallel for the normal connection to first order. Ordering:
/// tangential, then the normals orthogonal to `v`.
pub fn fermi_metric(ray: &FermiRay, t: f64) -> Result<DMatrix<f64>> {
    let patch = &ray.patch;
    let amb = &patch.ambient;
    let m = ray.m();
    let n = ray.n();
    let k = n - 1;
    let u0 = &ray.base_u;
    let c0 = &ray.v_coeffs;
    let ctl = ray.path.control;
    let chart0 = ray.base.chart;
    let q = ray.state_at(t)?;

    // Normal-connection coefficients ω_jk(w) = ⟨∇_w E_j, E_k⟩ at the base.
    let normals0 = patch.normal_frame(chart0, u0)?;
    let g0 = amb.metric(chart0, &ray.base.x);
    let gamma0 = christoffel_at::<_, f64>(amb, chart0, &ray.base.x)?;
    let mut tangent_dirs = Vec::with_capacity(m);
    for coeff in &ray.tangent_coeffs {
        let ud: Vec<Dual<f64>> = u0.iter().zip(coeff).map(|(&a, &b)| Dual::new(a, b)).collect();
        let frame_d = patch.normal_frame(chart0, &ud)?;
        let x_d = patch.param(chart0, &ud);
        let dx: Vec<f64> = x_d.iter().map(|d| d.eps).collect();
        let cov: Vec<Vec<f64>> = frame_d
            .iter()
            .map(|e| {
                let ev: Vec<f64> = e.iter().map(|d| d.re).collect();
                let de: Vec<f64> = e.iter().map(|d| d.eps).collect();
                let corr = gamma0.contract(&dx, &ev);
                de.iter().zip(&corr).map(|(a, b)| a + b).collect()
            })
            .collect();
        // c'_k = −Σ_j c_j ω_jk
        let cdot: Vec<f64> = (0..normals0.len())
            .map(|kk| -(0..normals0.len()).map(|j| c0[j] * bilinear(&g0, &cov[j], &normals0[kk])).sum::<f64>())
            .collect();
        tangent_dirs.push((coeff.clone(), cdot));
    }
    // Coefficients of the fiber frame (normals ⟂ v) in the catalog normal frame.
    let fiber0 = &ray.path.nodes[0].state[2 * n..];
    let fiber_dirs: Vec<Vec<f64>> = fiber0
        .chunks(n)
        .skip(m)
        .map(|f| normals0.iter().map(|e| bilinear(&g0, f, e)).collect())
        .collect();

    let endpoint = |u: &[f64], y: &[f64]| normal_exponential(patch, u, y, q.chart, ctl);
    let mut fields: Vec<Vec<f64>> = Vec::with_capacity(k);
    for (w, cdot) in &tangent_dirs {
        fields.push(stencil(|s| {
            let u: Vec<f64> = u0.iter().zip(w).map(|(a, b)| a + s * b).collect();
            let y: Vec<f64> = c0.iter().zip(cdot).map(|(a, b)| t * (a + s * b)).collect();
            endpoint(&u, &y)
        })?);
    }
    for d in &fiber_dirs {
        fields.push(stencil(|s| {
            let y: Vec<f64> = c0.iter().zip(d).map(|(a, b)| t * a + s * b).collect();
            endpoint(u0, &y)
        })?);
    }
    let g = amb.metric(q.chart, &q.x);
    Ok(DMatrix::from_fn(k, k, |a, b| bilinear(&g, &fields[a], &fields[b])))
}

/// The quadratic model of the Fermi metric:
/// `g_ab = δ − 2tT + t²(T² − R_TT)`, `g_ak = −(2/3)t²R_TN`, `g_kl = δ − (t²/3)R_NN`.
pub fn metric_model(t_v: &DMatrix<f64>, jacobi0: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let m = t_v.nrows();
    let k = jacobi0.nrows();
    let t2 = t * t;
    DMatrix::from_fn(k, k, |a, b| {
        let delta = if a == b { 1.0 } else { 0.0 };
        let r = jacobi0[(a, b)];
        match (a < m, b < m) {
            (true, true) => {
                let tt: f64 = (0..m).map(|c| t_v[(a, c)] * t_v[(c, b)]).sum();
                delta - 2.0 * t * t_v[(a, b)] + t2 * (tt - r)
            }
            (false, false) => delta - t2 * r / 3.0,
            _ => -2.0 / 3.0 * t2 * r,
        }
    })
}

/// Compare the numerical Fermi metric with its quadratic model at each `t`
/// and fit the remainder order (≥ 2.7 expected, or exactness below 1e−9).
pub fn validate_metric_expansion(ray: &FermiRay, t_list: &[f64]) -> Result<SlopeFit> {
    if t_list.iter().any(|&t| !(t > 0.0 && t <= 0.2 + 1e-12)) {
        return Err(Error::InvalidInput("metric expansion needs t in (0, 0.2]".into()));
    }
    let t_v = shape_of_submanifold(&ray.patch, &ray.base_u, &ray.v_coeffs)?;
    let r0 = ray.jacobi_operator_at(0.0)?;
    let points = t_list
        .iter()
        .map(|&t| {
            let g = fermi_metric(ray, t)?;
            Ok((t, max_abs(&(g - metric_model(&t_v, &r0, t)))))
        })
        .collect::<Result<Vec<_>>>()?;
    fit_remainder(points, 1e-9, 2.7)
}

/// Deviation of the numerical shape operator (Jacobi route, converted to
/// coordinate fields) from the first-order block expansion; slope ≥ 1.9.
pub fn validate_series(ray: &FermiRay, t_list: &[f64]) -> Result<SlopeFit> {
    let coeffs = SeriesCoefficients::from_ray(ray)?;
    let m = ray.m();
    let points = jacobi_fields(ray, t_list)?
        .iter()
        .map(|js| {
            let s = coordinate_frame_shape(js, m)?;
            Ok((js.t, max_abs(&(s - coeffs.coordinate_matrix(js.t)))))
        })
        .collect::<Result<Vec<_>>>()?;
    fit_remainder(points, 1e-10, 1.9)
}
