//! Normal geodesics leaving a submanifold, with their Fermi frames.

use std::collections::HashMap;
use std::sync::Mutex;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fermi::geodesic::{integrate_with_frame, GeodesicPath, PathState};
use crate::fermi::ode::StepControl;
use crate::fermi::patch::SubmanifoldPatch;
use crate::geometry::curvature::riemann_at;
use crate::geometry::manifold::{ChartId, ChartPoint, MetricChart};
use crate::linalg::{bilinear, gram_schmidt, inverse};

/// One normal geodesic `η_v(t) = exp_p(t v)` with its transported frame.
///
/// The frame has `n − 1` vectors: the orthonormalized tangent directions of
/// `P` first, then the remaining normals; the ray direction `η′` plays the
/// role of the last coordinate field and is not part of the frame.
#[derive(Debug)]
pub struct FermiRay {
    pub patch: SubmanifoldPatch,
    pub base_u: Vec<f64>,
    pub base: ChartPoint,
    pub v_coeffs: Vec<f64>,
    /// `v` as a chart vector at the base point.
    pub direction: Vec<f64>,
    /// `e_α = Σ_a c_α[a] ∂x_a`, the orthonormal tangent frame at the base.
    pub tangent_coeffs: Vec<Vec<f64>>,
    pub path: GeodesicPath,
    /// Requested length; the path runs slightly past it so that stencils
    /// centred at `length` stay on the integrated segment.
    pub length: f64,
    cache: Mutex<HashMap<u64, DMatrix<f64>>>,
}

/// Orthonormal normal frame with `v` removed: drop the catalog normal most
/// aligned with `v` (lowest index on ties), Gram–Schmidt the rest after `v`.
pub fn complete_normal_frame(g: &[f64], normals: &[Vec<f64>], v_coeffs: &[f64], v: &[f64]) -> Result<Vec<Vec<f64>>> {
    let drop = v_coeffs
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |best, (j, c)| {
            if c.abs() > best.1 + 1e-12 {
                (j, c.abs())
            } else {
                best
            }
        })
        .0;
    let mut seeds = vec![v.to_vec()];
    seeds.extend(
        normals
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != drop)
            .map(|(_, e)| e.clone()),
    );
    let on = gram_schmidt(g, &seeds, 1e-20)
        .ok_or_else(|| Error::InvalidInput("normal frame completion degenerated".into()))?;
    Ok(on[1..].to_vec())
}

/// Build the ray from `param(u)` in the normal direction `Σ v_j E_j(u)`.
pub fn normal_frame_ray(
    patch: &SubmanifoldPatch,
    u: &[f64],
    v_coeffs: &[f64],
    t_max: f64,
    step: f64,
) -> Result<FermiRay> {
    normal_frame_ray_with(patch, u, v_coeffs, t_max, StepControl::with_step(step))
}

pub fn normal_frame_ray_with(
    patch: &SubmanifoldPatch,
    u: &[f64],
    v_coeffs: &[f64],
    t_max: f64,
    control: StepControl,
) -> Result<FermiRay> {
    if v_coeffs.len() != patch.codim() {
        return Err(Error::InvalidInput(format!(
            "expected {} normal coefficients, got {}",
            patch.codim(),
            v_coeffs.len()
        )));
    }
    let nv: f64 = v_coeffs.iter().map(|c| c * c).sum();
    if (nv - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnitVector { norm_sq: nv });
    }
    if !patch.param_in_domain(u) {
        return Err(Error::InvalidInput(format!("parameter {u:?} outside the patch domain")));
    }
    let m = &patch.ambient;
    let n = m.dim();
    let chart = patch.chart_for(u);
    let x = patch.param(chart, u);
    let g = crate::geometry::curvature::metric_at(m, chart, &x)?;
    let normals = patch.normal_frame(chart, u)?;
    let tangents = patch.tangent_frame(chart, u);
    let coeffs = patch.orthonormal_tangent_coefficients(chart, u)?;
    let mut v = vec![0.0; n];
    for (c, e) in v_coeffs.iter().zip(&normals) {
        for i in 0..n {
            v[i] += c * e[i];
        }
    }
    let mut frame: Vec<Vec<f64>> = coeffs
        .iter()
        .map(|c| {
            let mut e = vec![0.0; n];
            for (ca, t) in c.iter().zip(&tangents) {
                for i in 0..n {
                    e[i] += ca * t[i];
                }
            }
            e
        })
        .collect();
    frame.extend(complete_normal_frame(&g, &normals, v_coeffs, &v)?);
    let base = ChartPoint { chart, x };
    let margin = if t_max > 0.0 { 3.0 * control.step } else { 0.0 };
    let path = integrate_with_frame(m, &base, &v, &frame, t_max + margin, control)?;
    Ok(FermiRay {
        patch: patch.clone(),
        base_u: u.to_vec(),
        base,
        v_coeffs: v_coeffs.to_vec(),
        direction: v,
        tangent_coeffs: coeffs,
        path,
        length: t_max,
        cache: Mutex::new(HashMap::new()),
    })
}

impl FermiRay {
    pub fn m(&self) -> usize {
        self.patch.dim()
    }

    pub fn n(&self) -> usize {
        self.patch.ambient.dim()
    }

    pub fn t_max(&self) -> f64 {
        self.length
    }

    pub fn state_at(&self, t: f64) -> Result<PathState> {
        self.path.state_at(t)
    }

    /// `R̄_{αβ} = ⟨R_{N E_α} N, E_β⟩` in the transported frame; memoized by `t`.
    pub fn jacobi_operator_at(&self, t: f64) -> Result<DMatrix<f64>> {
        let key = t.to_bits();
        if let Some(r) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(r.clone());
        }
        let s = self.state_at(t)?;
        let packet = riemann_at::<_, f64>(&self.patch.ambient, s.chart, &s.x)?;
        let jf = packet.jacobi_form(&s.velocity);
        let k = s.frame.len();
        let r = DMatrix::from_fn(k, k, |a, b| bilinear(&jf, &s.frame[a], &s.frame[b]));
        self.cache.lock().expect("cache lock").insert(key, r.clone());
        Ok(r)
    }

    /// `ρ(N, N)`: the trace of the Jacobi operator over an orthonormal complement.
    pub fn ricci_nn_at(&self, t: f64) -> Result<f64> {
        Ok(self.jacobi_operator_at(t)?.trace())
    }

    /// Gram matrix of the transported frame (identity up to integration error).
    pub fn frame_gram_at(&self, t: f64) -> Result<DMatrix<f64>> {
        let s = self.state_at(t)?;
        let g = self.patch.ambient.metric(s.chart, &s.x);
        let k = s.frame.len();
        Ok(DMatrix::from_fn(k, k, |a, b| bilinear(&g, &s.frame[a], &s.frame[b])))
    }
}

/// `exp_{param(u)}(Σ c_j E_j(u))`, expressed in `chart`.
pub fn normal_exponential(
    patch: &SubmanifoldPatch,
    u: &[f64],
    c: &[f64],
    chart: ChartId,
    control: StepControl,
) -> Result<Vec<f64>> {
    let m = &patch.ambient;
    let n = m.dim();
    let base_chart = patch.chart_for(u);
    let x = patch.param(base_chart, u);
    let len = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    if len == 0.0 {
        return Ok(m.transition(base_chart, chart, &x));
    }
    let normals = patch.normal_frame(base_chart, u)?;
    let mut w = vec![0.0; n];
    for (cj, e) in c.iter().zip(&normals) {
        for i in 0..n {
            w[i] += cj / len * e[i];
        }
    }
    let path = integrate_with_frame(m, &ChartPoint { chart: base_chart, x }, &w, &[], len, control)?;
    let end = path.end_state();
    Ok(m.transition(end.chart, chart, &end.x))
}

/// Solution of `exp_{param(u)}(Σ c_j E_j) = q`; `σ = |c|` is the distance
/// from `q` to the patch when `q` is inside the tubular neighbourhood.
#[derive(Clone, Debug)]
pub struct FootPoint {
    pub u: Vec<f64>,
    pub c: Vec<f64>,
    pub sigma: f64,
}

/// Newton inversion of the normal exponential map (finite-difference Jacobian).
pub fn distance_to_patch(
    patch: &SubmanifoldPatch,
    q: &ChartPoint,
    guess_u: &[f64],
    guess_c: &[f64],
    control: StepControl,
) -> Result<FootPoint> {
    let m = patch.dim();
    let n = patch.ambient.dim();
    let mut z: Vec<f64> = guess_u.iter().chain(guess_c).copied().collect();
    let eval = |z: &[f64]| -> Result<Vec<f64>> {
        let e = normal_exponential(patch, &z[..m], &z[m..], q.chart, control)?;
        Ok(e.iter().zip(&q.x).map(|(a, b)| a - b).collect())
    };
    let h = 1e-6;
    for _ in 0..30 {
        let r = eval(&z)?;
        let res = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if res < 1e-13 {
            break;
        }
        let mut jac = vec![0.0; n * n];
        for j in 0..n {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[j] += h;
            zm[j] -= h;
            let (fp, fm) = (eval(&zp)?, eval(&zm)?);
            for i in 0..n {
                jac[i * n + j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let inv = inverse(&jac, n).ok_or(Error::SingularJacobian { t: 0.0 })?;
        for i in 0..n {
            let dz: f64 = (0..n).map(|j| inv[i * n + j] * r[j]).sum();
            z[i] -= dz;
        }
    }
    let c = z[m..].to_vec();
    Ok(FootPoint {
        u: z[..m].to_vec(),
        sigma: c.iter().map(|v| v * v).sum::<f64>().sqrt(),
        c,
    })
}

/// `|grad σ − η′(t)|_g` at `η(t)`, with `grad σ` from central differences of
/// the distance oracle.
pub fn gauss_lemma_residual(ray: &FermiRay, t: f64, delta: f64) -> Result<f64> {
    let s = ray.state_at(t)?;
    let n = ray.n();
    let control = StepControl {
        step: 5e-3,
        ..StepControl::default()
    };
    let guess_c: Vec<f64> = ray.v_coeffs.iter().map(|c| c * t).collect();
    let mut dsigma = vec![0.0; n];
    for i in 0..n {
        let mut xp = s.x.clone();
        let mut xm = s.x.clone();
        xp[i] += delta;
        xm[i] -= delta;
        let sp = distance_to_patch(&ray.patch, &ChartPoint { chart: s.chart, x: xp }, &ray.base_u, &guess_c, control)?;
        let sm = distance_to_patch(&ray.patch, &ChartPoint { chart: s.chart, x: xm }, &ray.base_u, &guess_c, control)?;
        dsigma[i] = (sp.sigma - sm.sigma) / (2.0 * delta);
    }
    let g = ray.patch.ambient.metric(s.chart, &s.x);
    let ginv = inverse(&g, n).ok_or_else(|| Error::DifferentiationFailure("metric not invertible".into()))?;
    let grad: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| ginv[i * n + j] * dsigma[j]).sum())
        .collect();
    let diff: Vec<f64> = grad.iter().zip(&s.velocity).map(|(a, b)| a - b).collect();
    Ok(bilinear(&g, &diff, &diff).sqrt())
}
