//! Classical RK4 with a step-halving error estimate.

use crate::error::{Error, Result};

/// Step policy shared by every integrator in the crate.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct StepControl {
    /// Nominal step.
    pub step: f64,
    /// Per-step tolerance on `|y_full − y_halves| / (1 + |y|)`.
    pub tol: f64,
    /// How many times a step may be halved before giving up.
    pub max_depth: u32,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            step: 1e-3,
            tol: 1e-11,
            max_depth: 14,
        }
    }
}

impl StepControl {
    pub fn with_step(step: f64) -> Self {
        StepControl {
            step,
            ..Self::default()
        }
    }
}

/// One RK4 step of `y' = f(t, y)`.
pub fn rk4<F>(f: &F, t: f64, y: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let axpy = |a: f64, k: &[f64]| -> Vec<f64> { y.iter().zip(k).map(|(yi, ki)| yi + a * ki).collect() };
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &axpy(0.5 * h, &k1))?;
    let k3 = f(t + 0.5 * h, &axpy(0.5 * h, &k2))?;
    let k4 = f(t + h, &axpy(h, &k3))?;
    Ok((0..y.len())
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

fn halving_error(full: &[f64], fine: &[f64]) -> f64 {
    full.iter()
        .zip(fine)
        .map(|(a, b)| (a - b).abs() / (1.0 + b.abs()))
        .fold(0.0, f64::max)
}

/// Advance from `t` to `t + h`, halving recursively until the full-step and
/// two-half-step results agree. The two-half-step result is kept. Returns the
/// accepted `(t, y)` nodes in order, ending at `t + h`.
pub fn controlled_step<F>(f: &F, t: f64, y: &[f64], h: f64, ctl: &StepControl) -> Result<Vec<(f64, Vec<f64>)>>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let mut out = Vec::new();
    advance(f, t, y, h, ctl, 0, &mut out)?;
    Ok(out)
}

fn advance<F>(
    f: &F,
    t: f64,
    y: &[f64],
    h: f64,
    ctl: &StepControl,
    depth: u32,
    out: &mut Vec<(f64, Vec<f64>)>,
) -> Result<()>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let full = rk4(f, t, y, h)?;
    let mid = rk4(f, t, y, 0.5 * h)?;
    let fine = rk4(f, t + 0.5 * h, &mid, 0.5 * h)?;
    let err = halving_error(&full, &fine);
    if err.is_finite() && err <= ctl.tol {
        out.push((t + h, fine));
        return Ok(());
    }
    if depth >= ctl.max_depth || !err.is_finite() {
        return Err(Error::StepFailure { t, estimate: err });
    }
    advance(f, t, y, 0.5 * h, ctl, depth + 1, out)?;
    let y_mid = out.last().map(|(_, y)| y.clone()).unwrap_or_default();
    advance(f, t + 0.5 * h, &y_mid, 0.5 * h, ctl, depth + 1, out)
}
