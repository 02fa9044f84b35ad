//! Tube shape operators along a ray: Riccati integration and the Jacobi-field
//! oracle.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fermi::ode::{controlled_step, rk4, StepControl};
use crate::fermi::ray::FermiRay;
use crate::linalg::max_abs;
use crate::tube::sample::{ShapeMethod, ShapeSample};
use crate::tube::series::{riccati_seed, shape_of_submanifold};

/// `‖S̄‖∞` beyond which a focal point is declared.
pub const BLOW_UP: f64 = 1e6;
/// Default seeding time for the Riccati integration.
pub const DEFAULT_T0: f64 = 1e-6;

/// Riccati output; `focal_t` is set when integration stopped at a blow-up.
#[derive(Clone, Debug)]
pub struct RiccatiRun {
    pub samples: Vec<ShapeSample>,
    pub focal_t: Option<f64>,
}

fn check_grid(ray: &FermiRay, t_start: f64, grid: &[f64]) -> Result<()> {
    let mut prev = t_start;
    for &t in grid {
        if !(t > prev) {
            return Err(Error::InvalidInput(format!(
                "t-grid must increase and start after {t_start}; got {t} after {prev}"
            )));
        }
        prev = t;
    }
    if prev > ray.t_max() * (1.0 + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "t-grid reaches {prev} beyond the ray length {}",
            ray.t_max()
        )));
    }
    Ok(())
}

/// Integrate `S̄′ = S̄² + R̄` from a seed at `t0` through `t_grid`.
///
/// The pole of the fiber block is removed by integrating `U = S̄ + I_F/t`,
/// which satisfies `U′ = U² − (I_F U + U I_F)/t + R̄`; steps are graded as
/// `min(step, t/4, 1/(4‖U‖))`.
pub fn integrate_riccati(ray: &FermiRay, seed: &ShapeSample, t_grid: &[f64]) -> Result<RiccatiRun> {
    let m = ray.m();
    let k = ray.n() - 1;
    check_grid(ray, seed.t, t_grid)?;
    if seed.s_bar.nrows() != k {
        return Err(Error::InvalidInput(format!(
            "seed is {}×{}, ray needs {k}×{k}",
            seed.s_bar.nrows(),
            seed.s_bar.ncols()
        )));
    }
    let fib = |i: usize| if i >= m { 1.0 } else { 0.0 };
    let to_u = |t: f64, s: &DMatrix<f64>| -> Vec<f64> {
        let mut u = s.clone();
        for i in m..k {
            u[(i, i)] += 1.0 / t;
        }
        u.as_slice().to_vec()
    };
    let to_s = |t: f64, u: &[f64]| -> DMatrix<f64> {
        let mut s = DMatrix::from_column_slice(k, k, u);
        for i in m..k {
            s[(i, i)] -= 1.0 / t;
        }
        s
    };
    let rhs = |t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let u = DMatrix::from_column_slice(k, k, y);
        let r = ray.jacobi_operator_at(t)?;
        let uu = &u * &u;
        let out = DMatrix::from_fn(k, k, |i, j| uu[(i, j)] - (fib(i) + fib(j)) / t * u[(i, j)] + r[(i, j)]);
        Ok(out.as_slice().to_vec())
    };
    let ctl: StepControl = ray.path.control;
    let mut t = seed.t;
    let mut y = to_u(t, &seed.s_bar);
    let mut samples = Vec::with_capacity(t_grid.len());
    for &tg in t_grid {
        while t < tg {
            // the Riccati time scale is 1/‖U‖; resolving it lets blow-ups reach BLOW_UP
            let mut h = ctl.step.min(0.25 * t).min(0.25 / max_abs(&DMatrix::from_column_slice(k, k, &y)).max(1e-300));
            let last = tg - t <= h * (1.0 + 1e-9);
            if last {
                h = tg - t;
            }
            let nodes = match controlled_step(&rhs, t, &y, h, &ctl) {
                Ok(nodes) => nodes,
                Err(Error::StepFailure { .. }) if max_abs(&DMatrix::from_column_slice(k, k, &y)) > 1e3 => {
                    return Ok(RiccatiRun {
                        samples,
                        focal_t: Some(t),
                    });
                }
                Err(e) => return Err(e),
            };
            for (tn, yn) in nodes {
                // tested on U so the fiber pole 1/t near the seed does not count
                if !yn.iter().all(|x| x.is_finite()) || yn.iter().fold(0.0f64, |m, x| m.max(x.abs())) > BLOW_UP {
                    return Ok(RiccatiRun {
                        samples,
                        focal_t: Some(tn),
                    });
                }
                t = tn;
                y = yn;
            }
            if last {
                t = tg;
            }
        }
        let s = to_s(t, &y);
        // five-point stencil for S̄′ (relative truncation error ≈ (δ/t)⁴)
        let delta = (1e-3 * t).min(ctl.step);
        let at = |d: f64| -> Result<DMatrix<f64>> { Ok(to_s(t + d, &rk4(&rhs, t, &y, d)?)) };
        let deriv = (at(-2.0 * delta)? - at(2.0 * delta)? + (at(delta)? - at(-delta)?) * 8.0) / (12.0 * delta);
        let r = ray.jacobi_operator_at(t)?;
        let resid = max_abs(&(&deriv - &s * &s - &r)) / (1.0 + max_abs(&deriv));
        let gram = ray.frame_gram_at(t)?;
        let mut sample = ShapeSample::new(t, s, ShapeMethod::Riccati).with_gram(&gram);
        sample.riccati_residual = Some(resid);
        sample.derivative = Some(deriv);
        sample.ricci_nn = Some(r.trace());
        samples.push(sample);
    }
    Ok(RiccatiRun {
        samples,
        focal_t: None,
    })
}

/// Riccati integration with the series seed at `t0`.
pub fn riccati_from_series(ray: &FermiRay, t0: f64, t_grid: &[f64]) -> Result<RiccatiRun> {
    let seed = riccati_seed(ray, t0)?;
    integrate_riccati(ray, &seed, t_grid)
}

/// Jacobi matrix and its derivative in the transported frame.
#[derive(Clone, Debug)]
pub struct JacobiState {
    pub t: f64,
    pub j: DMatrix<f64>,
    pub jp: DMatrix<f64>,
}

/// Solve `J″ = −R̄ J` with `J(0) = diag(I_m, 0)`, `J′(0) = diag(−T_v, I)`:
/// columns are the Jacobi fields of the tube variation.
pub fn jacobi_fields(ray: &FermiRay, t_grid: &[f64]) -> Result<Vec<JacobiState>> {
    let m = ray.m();
    let k = ray.n() - 1;
    check_grid(ray, 0.0, t_grid)?;
    let t_v = shape_of_submanifold(&ray.patch, &ray.base_u, &ray.v_coeffs)?;
    let mut j0 = DMatrix::<f64>::zeros(k, k);
    let mut jp0 = DMatrix::<f64>::zeros(k, k);
    for i in 0..m {
        j0[(i, i)] = 1.0;
    }
    jp0.view_mut((0, 0), (m, m)).copy_from(&(-&t_v));
    for i in m..k {
        jp0[(i, i)] = 1.0;
    }
    let kk = k * k;
    let rhs = |t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let j = DMatrix::from_column_slice(k, k, &y[..kk]);
        let r = ray.jacobi_operator_at(t)?;
        let mut out = y[kk..].to_vec();
        out.extend_from_slice((-(r * j)).as_slice());
        Ok(out)
    };
    let ctl: StepControl = ray.path.control;
    let mut y: Vec<f64> = j0.as_slice().iter().chain(jp0.as_slice()).copied().collect();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(t_grid.len());
    for &tg in t_grid {
        while t < tg {
            let last = tg - t <= ctl.step * (1.0 + 1e-9);
            let h = if last { tg - t } else { ctl.step };
            for (tn, yn) in controlled_step(&rhs, t, &y, h, &ctl)? {
                t = tn;
                y = yn;
            }
            if last {
                t = tg;
            }
        }
        out.push(JacobiState {
            t,
            j: DMatrix::from_column_slice(k, k, &y[..kk]),
            jp: DMatrix::from_column_slice(k, k, &y[kk..]),
        });
    }
    Ok(out)
}

/// Tube shape operator `S̄ = −J′J⁻¹` from the Jacobi-field oracle.
pub fn shape_via_jacobi(ray: &FermiRay, t_grid: &[f64]) -> Result<Vec<ShapeSample>> {
    jacobi_fields(ray, t_grid)?
        .into_iter()
        .map(|js| {
            let inv = js.j.clone().try_inverse().ok_or(Error::SingularJacobian { t: js.t })?;
            let s = -(&js.jp * inv);
            if !s.iter().all(|x| x.is_finite()) || max_abs(&s) > BLOW_UP {
                return Err(Error::SingularJacobian { t: js.t });
            }
            let gram = ray.frame_gram_at(js.t)?;
            let mut sample = ShapeSample::new(js.t, s, ShapeMethod::Jacobi).with_gram(&gram);
            sample.ricci_nn = Some(ray.ricci_nn_at(js.t)?);
            Ok(sample)
        })
        .collect()
}

/// `S̄` converted to the Fermi coordinate-field frame (`∂x_a = J_a`,
/// `∂x_k = J_k/t`), in the row convention of the series block matrix.
pub fn coordinate_frame_shape(js: &JacobiState, m: usize) -> Result<DMatrix<f64>> {
    let k = js.j.nrows();
    let scale = DMatrix::from_fn(k, k, |i, j| {
        if i != j {
            0.0
        } else if i < m {
            1.0
        } else {
            1.0 / js.t
        }
    });
    let x = &js.j * &scale;
    let inv = x.clone().try_inverse().ok_or(Error::SingularJacobian { t: js.t })?;
    Ok((-(inv * &js.jp * scale)).transpose())
}

/// Drift at `t_probe` between Riccati runs seeded at `t0` and `t0/2`.
pub fn seed_sensitivity(ray: &FermiRay, t0: f64, t_probe: f64) -> Result<f64> {
    let a = riccati_from_series(ray, t0, &[t_probe])?;
    let b = riccati_from_series(ray, 0.5 * t0, &[t_probe])?;
    match (a.samples.first(), b.samples.first()) {
        (Some(x), Some(y)) => Ok(max_abs(&(&x.s_bar - &y.s_bar))),
        _ => Err(Error::SingularJacobian { t: t_probe }),
    }
}
