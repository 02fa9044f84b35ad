//! Eigenvalue branches of the tube shape operator and the mean-curvature
//! profile along a ray.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tube::sample::ShapeSample;

/// Two branches closer than this are reported as a possible crossing.
pub const AMBIGUITY_GAP: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchKind {
    /// Finite limit as `t → 0⁺`: a principal curvature of the base.
    Submanifold,
    /// Behaves like `−1/t`.
    Fiber,
}

#[derive(Clone, Debug, Serialize)]
pub struct Branch {
    pub values: Vec<f64>,
    pub kind: BranchKind,
    /// Extrapolated value at `t = 0`, for submanifold branches.
    pub limit: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchRecord {
    pub t: Vec<f64>,
    pub branches: Vec<Branch>,
    pub ambiguous: bool,
    /// First `t` where two branches came within [`AMBIGUITY_GAP`].
    pub ambiguity_t: Option<f64>,
}

impl BranchRecord {
    /// Limits of the submanifold branches, descending.
    pub fn limits(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.branches.iter().filter_map(|b| b.limit).collect();
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    pub fn count(&self, kind: BranchKind) -> usize {
        self.branches.iter().filter(|b| b.kind == kind).count()
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    // identity first so that ties keep sorted order
    out.sort();
    out
}

/// Assignment of `next` values to branches minimising the squared distance to
/// `predicted`; exhaustive for small sizes, greedy otherwise.
fn assign(predicted: &[f64], next: &[f64], perms: &[Vec<usize>]) -> Vec<usize> {
    let k = predicted.len();
    if !perms.is_empty() {
        let cost = |p: &Vec<usize>| -> f64 { (0..k).map(|b| (predicted[b] - next[p[b]]).powi(2)).sum() };
        let mut best = &perms[0];
        let mut best_cost = cost(best);
        for p in &perms[1..] {
            let c = cost(p);
            if c < best_cost * (1.0 - 1e-12) {
                best = p;
                best_cost = c;
            }
        }
        return best.clone();
    }
    let mut used = vec![false; k];
    (0..k)
        .map(|b| {
            let j = (0..k)
                .filter(|&j| !used[j])
                .min_by(|&i, &j| (predicted[b] - next[i]).abs().total_cmp(&(predicted[b] - next[j]).abs()))
                .unwrap_or(0);
            used[j] = true;
            j
        })
        .collect()
}

/// Polynomial extrapolation to `t = 0` through the given points (Neville).
pub fn extrapolate_to_zero(points: &[(f64, f64)]) -> f64 {
    let mut p: Vec<f64> = points.iter().map(|q| q.1).collect();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (ti, tj) = (points[i].0, points[i + level].0);
            p[i] = (tj * p[i] - ti * p[i + 1]) / (tj - ti);
        }
    }
    p.first().copied().unwrap_or(f64::NAN)
}

/// Follow the eigenvalues of consecutive samples as continuous branches.
///
/// Matching uses a linear prediction from the previous two values. A branch
/// is fiber-type when `t·λ ≈ −1` at the first sample; submanifold branches get
/// a limit from the first four samples.
pub fn track_eigen_branches(samples: &[ShapeSample]) -> Result<BranchRecord> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("no samples to track".into()));
    }
    if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(Error::InvalidInput("samples must be on an increasing t-grid".into()));
    }
    let k = samples[0].eigenvalues.len();
    let perms = if k <= 7 { permutations(k) } else { Vec::new() };
    let mut values: Vec<Vec<f64>> = samples[0].eigenvalues.iter().map(|&x| vec![x]).collect();
    let mut ambiguity_t = None;
    for (i, s) in samples.iter().enumerate() {
        if s.eigenvalues.windows(2).any(|w| (w[0] - w[1]).abs() < AMBIGUITY_GAP) {
            // equal eigenvalues are a genuine crossing only if the branches differ nearby
            let crossing = i > 0
                && samples[i - 1]
                    .eigenvalues
                    .windows(2)
                    .any(|w| (w[0] - w[1]).abs() >= AMBIGUITY_GAP);
            if crossing && ambiguity_t.is_none() {
                ambiguity_t = Some(s.t);
            }
        }
        if i == 0 {
            continue;
        }
        let predicted: Vec<f64> = values
            .iter()
            .map(|b| {
                let n = b.len();
                if n >= 2 {
                    let (t0, t1, t2) = (samples[i - 2].t, samples[i - 1].t, s.t);
                    b[n - 1] + (b[n - 1] - b[n - 2]) * (t2 - t1) / (t1 - t0)
                } else {
                    b[n - 1]
                }
            })
            .collect();
        let p = assign(&predicted, &s.eigenvalues, &perms);
        for (b, &j) in values.iter_mut().zip(&p) {
            b.push(s.eigenvalues[j]);
        }
    }
    let t1 = samples[0].t;
    let branches = values
        .into_iter()
        .map(|v| {
            let kind = if (t1 * v[0] + 1.0).abs() < 0.25 {
                BranchKind::Fiber
            } else {
                BranchKind::Submanifold
            };
            let limit = (kind == BranchKind::Submanifold).then(|| {
                let pts: Vec<(f64, f64)> = samples.iter().map(|s| s.t).zip(v.iter().copied()).take(4).collect();
                extrapolate_to_zero(&pts)
            });
            Branch { values: v, kind, limit }
        })
        .collect();
    Ok(BranchRecord {
        t: samples.iter().map(|s| s.t).collect(),
        branches,
        ambiguous: ambiguity_t.is_some(),
        ambiguity_t,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileRow {
    pub t: f64,
    pub mean_curvature: f64,
    /// `H′(t)`.
    pub derivative: f64,
    /// `‖S̄‖² + ρ(N, N)`.
    pub rhs: f64,
    /// `|H′ − rhs| / (1 + |H′|)`.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Profile {
    pub rows: Vec<ProfileRow>,
    pub max_residual: f64,
    /// Smallest discrete slope `ΔH/Δt` over the grid.
    pub min_slope: f64,
}

impl Profile {
    pub fn strictly_increasing(&self) -> bool {
        self.min_slope > 0.0
    }
}

/// `H′` against `‖S̄‖² + ρ(N, N)` at every sample. `H′` comes from the
/// sample's stencil derivative when present, else from a three-point
/// difference on the (possibly non-uniform) grid.
pub fn mean_curvature_profile(samples: &[ShapeSample]) -> Result<Profile> {
    let n = samples.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!("profile needs at least 3 samples, got {n}")));
    }
    let t: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let h: Vec<f64> = samples.iter().map(|s| s.mean_curvature).collect();
    let grid_derivative = |i: usize| -> f64 {
        let (a, b, c) = match i {
            0 => (0, 1, 2),
            i if i == n - 1 => (n - 3, n - 2, n - 1),
            i => (i - 1, i, i + 1),
        };
        // derivative at t[i] of the quadratic through three points
        let (x0, x1, x2) = (t[a], t[b], t[c]);
        let x = t[i];
        h[a] * (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2))
            + h[b] * (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2))
            + h[c] * (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1))
    };
    let mut rows = Vec::with_capacity(n);
    for (i, s) in samples.iter().enumerate() {
        let derivative = s.derivative.as_ref().map(|d| d.trace()).unwrap_or_else(|| grid_derivative(i));
        let ricci = s
            .ricci_nn
            .ok_or_else(|| Error::InvalidInput(format!("sample at t = {} lacks ρ(N, N)", s.t)))?;
        let rhs = (&s.s_bar * &s.s_bar).trace() + ricci;
        rows.push(ProfileRow {
            t: s.t,
            mean_curvature: s.mean_curvature,
            derivative,
            rhs,
            residual: (derivative - rhs).abs() / (1.0 + derivative.abs()),
        });
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let min_slope = (1..n)
        .map(|i| (h[i] - h[i - 1]) / (t[i] - t[i - 1]))
        .fold(f64::INFINITY, f64::min);
    Ok(Profile {
        rows,
        max_residual,
        min_slope,
    })
}
