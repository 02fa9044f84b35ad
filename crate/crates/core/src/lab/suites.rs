//! Verification suites over catalog cases: minimal and austere focal
//! varieties, curvature identities, the unique minimal level set, tube
//! profiles and the small-`t` expansions.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fermi::ode::StepControl;
use crate::fermi::patch::{InducedMetric, SubmanifoldPatch};
use crate::fermi::ray::{normal_frame_ray_with, FermiRay};
use crate::geometry::curvature::{curvature_scalars_at, riemann_at};
use crate::lab::catalog::{IsoparametricCandidate, Side};
use crate::lab::functions::{check_isoparametric, check_transnormal, verify_cartan_munzner};
use crate::lab::report::{CheckResult, Provenance, VerificationReport};
use crate::lab::sampling::ray_samples;
use crate::linalg::{max_abs, sorted_symmetric_eigenvalues};
use crate::tube::{
    integrate_riccati, log_grid, mean_curvature_profile, riccati_from_series, seed_sensitivity, shape_of_submanifold,
    shape_via_jacobi, track_eigen_branches, validate_metric_expansion, validate_series, BranchKind, ShapeSample, SlopeFit,
    DEFAULT_T0,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Transnormal,
    Isoparametric,
    CartanMunzner,
    MinimalFocal,
    Austere,
    CurvatureIdentities,
    UniqueMinimal,
    TubeProfile,
    MetricExpansion,
    All,
}

impl Suite {
    pub const EACH: [Suite; 9] = [
        Suite::Transnormal,
        Suite::Isoparametric,
        Suite::CartanMunzner,
        Suite::MinimalFocal,
        Suite::Austere,
        Suite::CurvatureIdentities,
        Suite::UniqueMinimal,
        Suite::TubeProfile,
        Suite::MetricExpansion,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Transnormal => "transnormal",
            Suite::Isoparametric => "isoparametric",
            Suite::CartanMunzner => "cartan-munzner",
            Suite::MinimalFocal => "minimal-focal",
            Suite::Austere => "austere",
            Suite::CurvatureIdentities => "curvature-identities",
            Suite::UniqueMinimal => "unique-minimal",
            Suite::TubeProfile => "tube-profile",
            Suite::MetricExpansion => "metric-expansion",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::EACH.into_iter().chain([Suite::All]).find(|x| x.name() == s)
    }
}

/// Sampling sizes and integrator settings shared by every suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub n_base: usize,
    pub n_dirs: usize,
    /// Ambient points for the function-profile checks.
    pub ambient_samples: usize,
    /// Rays per focal variety for the tube-profile suite.
    pub rays: usize,
    /// Rays per submanifold for the expansion and curvature-along-tube checks.
    pub expansion_rays: usize,
    /// Rays per case for the unique-minimal suite.
    pub minimal_rays: usize,
    pub seed: u64,
    pub t0: f64,
    pub step: f64,
    pub tol: f64,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub steps: usize,
    /// Tolerance overrides keyed by check-name prefix.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            n_base: 32,
            n_dirs: 16,
            ambient_samples: 2000,
            rays: 50,
            expansion_rays: 10,
            minimal_rays: 8,
            seed: 0,
            t0: DEFAULT_T0,
            step: 1e-3,
            tol: 1e-11,
            t_min: None,
            t_max: None,
            steps: 30,
            tolerances: BTreeMap::new(),
        }
    }
}

impl SuiteOptions {
    pub fn control(&self) -> StepControl {
        StepControl {
            step: self.step,
            tol: self.tol,
            ..StepControl::default()
        }
    }

    pub fn provenance(&self, c: &IsoparametricCandidate) -> Provenance {
        Provenance {
            seed: self.seed,
            t0: self.t0,
            step: self.step,
            integrator_tol: self.tol,
            gates: c.gates.clone(),
            library_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// Profile grid for a case: explicit bounds or 5%–95% of the ray extent.
    pub fn profile_grid(&self, extent: f64) -> Result<Vec<f64>> {
        let a = self.t_min.unwrap_or(0.05 * extent);
        let b = self.t_max.unwrap_or(0.95 * extent);
        if !(a > 0.0 && b > a && self.steps >= 2) {
            return Err(Error::InvalidInput(format!(
                "need 0 < t-min < t-max and at least 2 steps (got {a}, {b}, {})",
                self.steps
            )));
        }
        if !(self.t0 < a) {
            return Err(Error::InvalidInput(format!("t0 = {} must lie below t-min = {a}", self.t0)));
        }
        Ok(profile_grid(a, b, self.steps))
    }
}

/// `steps` equispaced points on `[a, b]`. A grid point within a third of a
/// spacing of π/4 is moved onto it, so profiles carry that landmark row
/// without changing their length.
pub fn profile_grid(a: f64, b: f64, steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    // convex combinations keep round endpoints exact at round fractions
    let mut g: Vec<f64> = (0..steps).map(|i| (a * (last - i as f64) + b * i as f64) / last).collect();
    if steps >= 3 {
        let spacing = (b - a) / last;
        if let Some(i) = (1..steps - 1).find(|&i| (g[i] - FRAC_PI_4).abs() < spacing / 3.0) {
            g[i] = FRAC_PI_4;
        }
    }
    g
}

fn spread(values: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > hi {
        0.0
    } else {
        hi - lo
    }
}

/// Evenly strided subset of `k` items (all of them if fewer).
fn strided<T: Clone>(items: &[T], k: usize) -> Vec<T> {
    if items.len() <= k {
        return items.to_vec();
    }
    (0..k).map(|i| items[i * items.len() / k].clone()).collect()
}

fn ray(patch: &SubmanifoldPatch, u: &[f64], v: &[f64], length: f64, opts: &SuiteOptions) -> Result<FermiRay> {
    normal_frame_ray_with(patch, u, v, length, opts.control())
}

fn side_key(side: Side) -> &'static str {
    side.as_str()
}

/// `Γ_P = (ρ(v,v) + 2 Σ_a K(v, e_a) + 3‖T_v‖²) / 3` at `param(u)`.
pub fn gamma_p(patch: &SubmanifoldPatch, u: &[f64], v_coeffs: &[f64]) -> Result<f64> {
    Ok(normal_curvature_data(patch, u, v_coeffs)?.gamma)
}

/// Curvature quantities attached to one unit normal of the patch.
#[derive(Clone, Debug)]
pub struct NormalCurvature {
    pub ricci_vv: f64,
    /// `Σ_a K(v, e_a)` over an orthonormal tangent frame.
    pub tangent_sectional_sum: f64,
    pub shape_norm_sq: f64,
    pub gamma: f64,
    /// Eigenvalues of `T_v`, descending.
    pub principal: Vec<f64>,
    pub trace: f64,
}

pub fn normal_curvature_data(patch: &SubmanifoldPatch, u: &[f64], v_coeffs: &[f64]) -> Result<NormalCurvature> {
    let amb = &patch.ambient;
    let n = amb.dim();
    let chart = patch.chart_for(u);
    let x = patch.param(chart, u);
    let normals = patch.normal_frame(chart, u)?;
    let mut v = vec![0.0; n];
    for (c, e) in v_coeffs.iter().zip(&normals) {
        for i in 0..n {
            v[i] += c * e[i];
        }
    }
    let tangents = orthonormal_tangents(patch, chart, u)?;
    let cs = curvature_scalars_at(amb, chart, &x, &v, &tangents)?;
    let t = shape_of_submanifold(patch, u, v_coeffs)?;
    let shape_norm_sq: f64 = t.iter().map(|a| a * a).sum();
    let ksum: f64 = cs.sectional.iter().sum();
    Ok(NormalCurvature {
        ricci_vv: cs.ricci_vv,
        tangent_sectional_sum: ksum,
        shape_norm_sq,
        gamma: (cs.ricci_vv + 2.0 * ksum + 3.0 * shape_norm_sq) / 3.0,
        principal: sorted_symmetric_eigenvalues(&t),
        trace: t.trace(),
    })
}

fn orthonormal_tangents(patch: &SubmanifoldPatch, chart: usize, u: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = patch.ambient.dim();
    let coeffs = patch.orthonormal_tangent_coefficients(chart, u)?;
    let frame = patch.tangent_frame(chart, u);
    Ok(coeffs
        .iter()
        .map(|c| {
            let mut e = vec![0.0; n];
            for (ca, t) in c.iter().zip(&frame) {
                for i in 0..n {
                    e[i] += ca * t[i];
                }
            }
            e
        })
        .collect())
}

fn normal_samples(patch: &SubmanifoldPatch, opts: &SuiteOptions) -> Vec<(Vec<f64>, Vec<f64>)> {
    ray_samples(patch, opts.n_base, opts.n_dirs, opts.seed)
}

/// At least `k` samples (when the normal sphere has room), adding directions
/// where the patch has few base points.
fn at_least(patch: &SubmanifoldPatch, opts: &SuiteOptions, k: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let bases = if patch.dim() == 0 { 1 } else { opts.n_base.max(1) };
    let dirs = if patch.codim() == 1 { opts.n_dirs } else { opts.n_dirs.max(k.div_ceil(bases)) };
    ray_samples(patch, opts.n_base, dirs, opts.seed)
}

/// Focal varieties are minimal: `Trace T_v = 0` for every unit normal, and
/// the tube mean curvature at a fixed small `t` does not depend on `(p, v)`.
pub fn verify_minimal_focal(c: &IsoparametricCandidate, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(&c.label, "minimal-focal", "focal varieties are minimal", opts.provenance(c));
    r.samples.base_points = opts.n_base;
    r.samples.normal_directions = opts.n_dirs;
    r.samples.t_values = 1;
    let t_h = (0.05f64).min(c.ray_extent() / 4.0);
    for (side, patch) in c.focal_sides() {
        let key = side_key(side);
        let samples = normal_samples(patch, opts);
        if patch.dim() == 0 {
            r.note(format!("{key}: m = 0, trace condition is vacuous"));
        } else {
            let traces = samples
                .par_iter()
                .map(|(u, v)| Ok(shape_of_submanifold(patch, u, v)?.trace()))
                .collect::<Result<Vec<f64>>>()?;
            let worst = traces.iter().fold(0.0f64, |m, t| m.max(t.abs()));
            r.check(CheckResult::below(format!("max |trace T_v| ({key})"), worst, 1e-6));
        }
        let hs = samples
            .par_iter()
            .map(|(u, v)| {
                let ray = ray(patch, u, v, t_h, opts)?;
                let run = riccati_from_series(&ray, opts.t0, &[t_h])?;
                run.samples
                    .first()
                    .map(|s| s.mean_curvature)
                    .ok_or(Error::SingularJacobian { t: t_h })
            })
            .collect::<Result<Vec<f64>>>()?;
        r.check(CheckResult::below(
            format!("spread of H(t = {t_h}) over (p, v) ({key})"),
            spread(hs.iter().copied()),
            1e-5,
        ));
        r.value(format!("mean_curvature_at_{key}"), vec![t_h, hs[0]]);
    }
    r.samples.t_values = 1;
    Ok(r)
}

/// Eigenvalue multisets of `T_v` over sampled `(p, v)`: constant per sorted
/// position and symmetric under negation. With `branches`, the limits of the
/// tube eigenvalue branches are compared with those multisets as well.
pub fn austere_on_patch(
    patch: &SubmanifoldPatch,
    key: &str,
    extent: f64,
    opts: &SuiteOptions,
    branches: bool,
    r: &mut VerificationReport,
) -> Result<()> {
    let m = patch.dim();
    if m == 0 {
        r.note(format!("{key}: m = 0, no principal curvatures"));
        return Ok(());
    }
    let samples = normal_samples(patch, opts);
    let multisets = samples
        .par_iter()
        .map(|(u, v)| Ok(sorted_symmetric_eigenvalues(&shape_of_submanifold(patch, u, v)?)))
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let position_spread = (0..m)
        .map(|i| spread(multisets.iter().map(|ev| ev[i])))
        .fold(0.0, f64::max);
    let pairing = multisets
        .iter()
        .map(|ev| (0..m).map(|i| (ev[i] + ev[m - 1 - i]).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    r.check(CheckResult::below(format!("eigenvalue spread per position ({key})"), position_spread, 1e-6));
    r.check(CheckResult::below(format!("pairing residual ({key})"), pairing, 1e-6));
    r.value(format!("principal_curvatures_{key}"), multisets[0].clone());
    if branches {
        let grid = log_grid(0.01, (0.3f64).min(extent / 2.0), 24);
        let picks = strided(&samples, 4);
        let diffs = picks
            .par_iter()
            .map(|(u, v)| {
                let ray = ray(patch, u, v, grid[grid.len() - 1], opts)?;
                let run = riccati_from_series(&ray, opts.t0, &grid)?;
                let rec = track_eigen_branches(&run.samples)?;
                let limits = rec.limits();
                let want = sorted_symmetric_eigenvalues(&shape_of_submanifold(patch, u, v)?);
                let fiber_ok = rec.count(BranchKind::Fiber) == patch.codim() - 1;
                if limits.len() != want.len() || !fiber_ok {
                    return Ok(f64::INFINITY);
                }
                Ok(limits.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            })
            .collect::<Result<Vec<f64>>>()?;
        r.check(CheckResult::below(
            format!("branch limits vs T_v eigenvalues ({key})"),
            diffs.iter().copied().fold(0.0, f64::max),
            1e-5,
        ));
    }
    Ok(())
}

/// Focal varieties have common constant principal curvatures in pairs of
/// opposite signs.
pub fn verify_austere(c: &IsoparametricCandidate, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(
        &c.label,
        "austere",
        "focal varieties have constant principal curvatures in opposite pairs",
        opts.provenance(c),
    );
    r.samples.base_points = opts.n_base;
    r.samples.normal_directions = opts.n_dirs;
    if !c.constant_principal {
        r.note("case is not flagged as having constant principal curvatures; suite not applicable");
        return Ok(r);
    }
    for (side, patch) in c.focal_sides() {
        austere_on_patch(patch, side_key(side), c.ray_extent(), opts, true, &mut r)?;
    }
    Ok(r)
}

fn intrinsic_scalar(patch: &SubmanifoldPatch, u: &[f64]) -> Result<f64> {
    if patch.dim() < 2 {
        return Ok(0.0);
    }
    let chart = patch.chart_for(u);
    let im = InducedMetric { patch, chart };
    Ok(riemann_at::<_, f64>(&im, chart, u)?.scalar)
}

/// Left side of the traced identity: `(1/3)Σ_{i≠j} K_ij + Σ_{a≠b} K_ab +
/// Σ_{i,a} K_ia − R^P` over orthonormal normal (`i`) and tangent (`a`) frames.
fn traced_identity_lhs(patch: &SubmanifoldPatch, u: &[f64]) -> Result<(f64, f64, f64)> {
    let amb = &patch.ambient;
    let chart = patch.chart_for(u);
    let x = patch.param(chart, u);
    let packet = riemann_at::<_, f64>(amb, chart, &x)?;
    let tangents = orthonormal_tangents(patch, chart, u)?;
    let normals = patch.normal_frame(chart, u)?;
    let pair_sum = |a: &[Vec<f64>], b: &[Vec<f64>], same: bool| -> f64 {
        let mut s = 0.0;
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if !(same && i == j) {
                    s += packet.sectional(x, y);
                }
            }
        }
        s
    };
    let rp = intrinsic_scalar(patch, u)?;
    let lhs = pair_sum(&normals, &normals, true) / 3.0 + pair_sum(&tangents, &tangents, true)
        + pair_sum(&normals, &tangents, false)
        - rp;
    Ok((lhs, rp, packet.scalar))
}

/// The curvature identities satisfied on focal varieties: constancy of
/// `Γ_P`, its traced form, the codimension-one reduction, constancy of
/// `Σ_a K(v, e_a)` and of `ρ(ν, ν)` on tubes and focal normals.
pub fn verify_curvature_identities(c: &IsoparametricCandidate, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(
        &c.label,
        "curvature-identities",
        "curvature identities on focal varieties and tubes",
        opts.provenance(c),
    );
    r.samples.base_points = opts.n_base;
    r.samples.normal_directions = opts.n_dirs;
    let n = c.n();
    let tube_fracs = [0.25, 0.5, 0.75];
    r.samples.t_values = tube_fracs.len();
    for (side, patch) in c.focal_sides() {
        let key = side_key(side);
        let m = patch.dim();
        let samples = normal_samples(patch, opts);
        let data = samples
            .par_iter()
            .map(|(u, v)| normal_curvature_data(patch, u, v))
            .collect::<Result<Vec<_>>>()?;
        let gammas: Vec<f64> = data.iter().map(|d| d.gamma).collect();
        r.check(CheckResult::below(
            format!("gamma_p spread ({key})"),
            spread(gammas.iter().copied()),
            1e-6,
        ));
        r.value(format!("gamma_p_{key}"), vec![gammas[0]]);
        r.check(CheckResult::below(
            format!("sum of K(v, e_a) spread ({key})"),
            spread(data.iter().map(|d| d.tangent_sectional_sum)),
            1e-6,
        ));
        r.check(CheckResult::below(
            format!("ricci(v, v) spread over focal normals ({key})"),
            spread(data.iter().map(|d| d.ricci_vv)),
            1e-6,
        ));

        // traced identity, one value per base point
        let per_base = opts.n_dirs.max(1);
        let bases: Vec<(usize, Vec<f64>)> = samples
            .iter()
            .enumerate()
            .step_by(per_base)
            .map(|(i, (u, _))| (i, u.clone()))
            .collect();
        let traced = bases
            .par_iter()
            .map(|(i, u)| {
                let (lhs, rp, rn) = traced_identity_lhs(patch, u)?;
                Ok((lhs - (n - m) as f64 * gammas[*i], lhs, rp, rn))
            })
            .collect::<Result<Vec<_>>>()?;
        r.check(CheckResult::below(
            format!("traced identity residual spread ({key})"),
            spread(traced.iter().map(|t| t.0)),
            1e-5,
        ));
        r.value(
            format!("traced_identity_{key}"),
            vec![traced[0].1, (n - m) as f64 * gammas[0]],
        );

        if patch.codim() == 1 {
            // both orientations of the unit normal
            let mut worst = 0.0f64;
            for (_, u) in &bases {
                for sign in [1.0, -1.0] {
                    let d = normal_curvature_data(patch, u, &[sign])?;
                    let rp = intrinsic_scalar(patch, u)?;
                    let (_, _, rn) = traced_identity_lhs(patch, u)?;
                    worst = worst.max((rn - d.ricci_vv - rp - d.gamma).abs());
                }
            }
            r.check(CheckResult::below(format!("codimension-one identity ({key})"), worst, 1e-5));
            r.check(CheckResult::below(
                format!("intrinsic scalar curvature spread ({key})"),
                spread(traced.iter().map(|t| t.2)),
                1e-6,
            ));
        }

        // ρ(ν, ν) along tubes at fixed distances
        let extent = c.ray_extent();
        let times: Vec<f64> = tube_fracs.iter().map(|f| f * extent).collect();
        let picks = strided(&samples, opts.expansion_rays.max(1) * 4);
        let ricci = picks
            .par_iter()
            .map(|(u, v)| {
                let ray = ray(patch, u, v, times[times.len() - 1], opts)?;
                times.iter().map(|&t| ray.ricci_nn_at(t)).collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let tube_spread = (0..times.len())
            .map(|k| spread(ricci.iter().map(|row| row[k])))
            .fold(0.0, f64::max);
        r.check(CheckResult::below(format!("ricci(nu, nu) spread per tube ({key})"), tube_spread, 1e-6));
    }
    Ok(r)
}

/// Outcome of the search for a minimal level set along one ray.
#[derive(Clone, Debug, Serialize)]
pub struct MinimalSearch {
    pub t_star: Option<f64>,
    pub h_at_t_star: Option<f64>,
    pub zero_count: usize,
    pub h_monotone: bool,
    pub min_slope: f64,
}

/// Locate the zero of `H` along a ray on `grid` (sign changes of the sampled
/// profile, refined by safeguarded Newton steps restarted from the nearest
/// sample).
pub fn find_minimal_hypersurface(ray: &FermiRay, grid: &[f64], t0: f64) -> Result<MinimalSearch> {
    let run = riccati_from_series(ray, t0, grid)?;
    let samples = &run.samples;
    let prof = mean_curvature_profile(samples)?;
    let h: Vec<f64> = samples.iter().map(|s| s.mean_curvature).collect();
    let mut brackets = Vec::new();
    for i in 0..h.len().saturating_sub(1) {
        if h[i] == 0.0 || (h[i] < 0.0) != (h[i + 1] < 0.0) {
            brackets.push(i);
        }
    }
    let mut out = MinimalSearch {
        t_star: None,
        h_at_t_star: None,
        zero_count: brackets.len(),
        h_monotone: prof.strictly_increasing() && run.focal_t.is_none(),
        min_slope: prof.min_slope,
    };
    if let [i] = brackets[..] {
        let (t, hv) = refine_zero(ray, &samples[i], samples[i + 1].t)?;
        out.t_star = Some(t);
        out.h_at_t_star = Some(hv);
    }
    Ok(out)
}

fn refine_zero(ray: &FermiRay, left: &ShapeSample, right_t: f64) -> Result<(f64, f64)> {
    let (mut a, mut b) = (left.t, right_t);
    let eval = |t: f64| -> Result<(f64, f64)> {
        if t == left.t {
            let d = left.derivative.as_ref().map_or(f64::NAN, DMatrix::trace);
            return Ok((left.mean_curvature, d));
        }
        let run = integrate_riccati(ray, left, &[t])?;
        let s = run.samples.first().ok_or(Error::SingularJacobian { t })?;
        Ok((s.mean_curvature, s.derivative.as_ref().map_or(f64::NAN, DMatrix::trace)))
    };
    let (ha, _) = eval(a)?;
    let mut t = 0.5 * (a + b);
    let mut best = (t, f64::INFINITY);
    for _ in 0..80 {
        let (ht, dh) = eval(t)?;
        if ht.abs() < best.1.abs() {
            best = (t, ht);
        }
        if ht.abs() < 1e-12 || b - a < 1e-15 {
            break;
        }
        if (ht < 0.0) == (ha < 0.0) {
            a = t;
        } else {
            b = t;
        }
        let newton = t - ht / dh;
        t = if newton.is_finite() && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
    }
    Ok(best)
}

/// Exactly one level set is minimal when the ambient Ricci curvature is
/// positive: `H` increases strictly along a focal-to-focal ray and vanishes
/// once.
pub fn verify_unique_minimal(c: &IsoparametricCandidate, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(
        &c.label,
        "unique-minimal",
        "unique minimal level set under positive Ricci curvature",
        opts.provenance(c),
    );
    let Some(patch) = c.focal(Side::Minus) else {
        r.note("no focal variety to start rays from");
        r.check(CheckResult::holds("rays available", false));
        return Ok(r);
    };
    let extent = c.ray_extent();
    let grid = profile_grid(0.02 * extent, 0.98 * extent, opts.steps.max(30));
    r.samples.t_values = grid.len();
    if !c.ambient.positive_ricci() {
        r.note("ambient Ricci curvature is not positive; uniqueness is not predicted here");
    }
    let picks = strided(&normal_samples(patch, opts), opts.minimal_rays.max(1));
    r.samples.base_points = picks.len();
    let found = picks
        .par_iter()
        .map(|(u, v)| {
            let ray = ray(patch, u, v, grid[grid.len() - 1], opts)?;
            find_minimal_hypersurface(&ray, &grid, opts.t0)
        })
        .collect::<Result<Vec<_>>>()?;
    let all_monotone = found.iter().all(|f| f.h_monotone);
    let zero_counts: Vec<f64> = found.iter().map(|f| f.zero_count as f64).collect();
    r.check(CheckResult::holds("H strictly increasing on every ray", all_monotone));
    if patch.codim() == 1 {
        // the codimension-one focal variety is itself the minimal level set
        r.note("minus focal variety has codimension one; its own mean curvature is the zero at t = 0");
        r.check(CheckResult::holds(
            "no zero of H inside the ray range",
            found.iter().all(|f| f.zero_count == 0),
        ));
        let worst = picks
            .iter()
            .map(|(u, v)| Ok(shape_of_submanifold(patch, u, v)?.trace().abs()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        r.check(CheckResult::below("|H| of the focal variety", worst, 1e-8));
        r.value("zero_count", zero_counts);
        r.value("min_slope", found.iter().map(|f| f.min_slope).collect());
        return Ok(r);
    }
    r.check(CheckResult::holds(
        "exactly one zero of H on every ray",
        found.iter().all(|f| f.zero_count == 1),
    ));
    if found.iter().any(|f| f.zero_count == 0) {
        r.note(format!("NoZero: H keeps a constant sign on [{}, {}]", grid[0], grid[grid.len() - 1]));
    }
    let stars: Vec<f64> = found.iter().filter_map(|f| f.t_star).collect();
    if stars.len() == found.len() && !stars.is_empty() {
        let worst_h = found.iter().filter_map(|f| f.h_at_t_star).fold(0.0, |m: f64, h| m.max(h.abs()));
        r.check(CheckResult::below("|H(t*)|", worst_h, 1e-8));
        r.check(CheckResult::below("spread of t* over rays", spread(stars.iter().copied()), 1e-6));
    }
    r.value("t_star", stars);
    r.value("zero_count", zero_counts);
    r.value("min_slope", found.iter().map(|f| f.min_slope).collect());
    Ok(r)
}

/// One CSV-ready profile: `t, H, λ_1.., riccati_residual`.
#[derive(Clone, Debug, Serialize)]
pub struct ProfileTable {
    pub case: String,
    pub rows: Vec<(f64, f64, Vec<f64>, f64)>,
    pub focal_t: Option<f64>,
}

/// The Riccati profile along the first sampled ray from the minus side.
pub fn tube_profile_table(c: &IsoparametricCandidate, opts: &SuiteOptions) -> Result<ProfileTable> {
    c.require_admitted()?;
    let patch = c
        .focal(Side::Minus)
        .ok_or_else(|| Error::InvalidInput(format!("{} has no focal variety", c.label)))?;
    let grid = opts.profile_grid(c.ray_extent())?;
    let (u, v) = normal_samples(patch, opts)
        .into_iter()
        .next()
        .ok_or_else(|| Error::InvalidInput("no ray samples".into()))?;
    let ray = ray(patch, &u, &v, grid[grid.len() - 1], opts)?;
    let run = riccati_from_series(&ray, opts.t0, &grid)?;
    Ok(ProfileTable {
        case: c.label.clone(),
        rows: run
            .samples
            .iter()
            .map(|s| (s.t, s.mean_curvature, s.eigenvalues.clone(), s.riccati_residual.unwrap_or(f64::NAN)))
            .collect(),
        focal_t: run.focal_t,
    })
}

/// Riccati against the Jacobi-field oracle on many rays, with the trace
/// identity, operator symmetry and seed sensitivity.
pub fn verify_tube_profile(c: &IsoparametricCandidate, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(
        &c.label,
        "tube-profile",
        "tube shape operators: Riccati flow against Jacobi fields",
        opts.provenance(c),
    );
    let grid = opts.profile_grid(c.ray_extent())?;
    r.samples.t_values = grid.len();
    r.samples.normal_directions = opts.n_dirs;
    let mut rays_used = 0;
    for (side, patch) in c.focal_sides() {
        let key = side_key(side);
        let picks = strided(&at_least(patch, opts, opts.rays), opts.rays);
        rays_used += picks.len();
        let stats = picks
            .par_iter()
            .map(|(u, v)| {
                let ray = ray(patch, u, v, grid[grid.len() - 1], opts)?;
                let run = riccati_from_series(&ray, opts.t0, &grid)?;
                if let Some(t) = run.focal_t {
                    return Err(Error::StepFailure { t, estimate: f64::INFINITY });
                }
                let jac = shape_via_jacobi(&ray, &grid)?;
                let diff = run
                    .samples
                    .iter()
                    .zip(&jac)
                    .map(|(a, b)| max_abs(&(&a.s_bar - &b.s_bar)))
                    .fold(0.0, f64::max);
                let prof = mean_curvature_profile(&run.samples)?;
                let mut asym = 0.0f64;
                for s in &run.samples {
                    asym = asym.max(s.asymmetry(&ray.frame_gram_at(s.t)?));
                }
                let rec = track_eigen_branches(&run.samples)?;
                Ok((diff, prof.max_residual, asym, rec.ambiguous))
            })
            .collect::<Result<Vec<_>>>()?;
        let worst = |f: fn(&(f64, f64, f64, bool)) -> f64| stats.iter().map(f).fold(0.0, f64::max);
        r.check(CheckResult::below(format!("riccati vs jacobi ({key})"), worst(|s| s.0), 1e-5));
        r.check(CheckResult::below(format!("trace identity residual ({key})"), worst(|s| s.1), 1e-4));
        r.check(CheckResult::below(format!("operator asymmetry ({key})"), worst(|s| s.2), 1e-6));
        let ambiguous = stats.iter().filter(|s| s.3).count();
        if ambiguous > 0 {
            r.note(format!("{key}: {ambiguous} rays had eigenvalues closer than 1e-10 (repeated or crossing branches)"));
        }
        if side == Side::Minus && grid[grid.len() - 1] >= 0.5 {
            let (u, v) = &picks[0];
            let ray = ray(patch, u, v, 0.5, opts)?;
            let drift = seed_sensitivity(&ray, opts.t0, 0.5)?;
            r.check(CheckResult::below("seed sensitivity at t = 0.5", drift, 1e-6));
        }
    }
    r.samples.base_points = rays_used;
    let table = tube_profile_table(c, opts)?;
    r.value("profile_t", table.rows.iter().map(|x| x.0).collect());
    r.value("profile_h", table.rows.iter().map(|x| x.1).collect());
    Ok(r)
}

/// Remainder fits of the metric and shape-operator expansions along one ray.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionFit {
    /// `minus`, `plus` or `probe <i>`.
    pub patch: String,
    pub ray: usize,
    pub metric: SlopeFit,
    pub series: SlopeFit,
}

/// Expansion fits on the focal varieties and probe submanifolds, with metric
/// remainders on `[0.01, 0.2]` and series remainders on `[1e-3, 1e-1]`.
pub fn expansion_fits(c: &IsoparametricCandidate, opts: &SuiteOptions) -> Result<Vec<ExpansionFit>> {
    c.require_admitted()?;
    let metric_t = log_grid(0.01, 0.2, 6);
    let series_t = log_grid(1e-3, 1e-1, 8);
    let mut patches: Vec<(String, &SubmanifoldPatch)> =
        c.focal_sides().into_iter().map(|(s, p)| (s.as_str().to_string(), p)).collect();
    for (i, p) in c.probes.iter().enumerate() {
        patches.push((format!("probe {i}"), p));
    }
    let n_rays = opts.expansion_rays.max(10);
    let mut out = Vec::new();
    for (key, patch) in patches {
        let picks = strided(&normal_samples(patch, opts), n_rays);
        let fits = picks
            .par_iter()
            .enumerate()
            .map(|(i, (u, v))| {
                let ray = ray(patch, u, v, 0.2, opts)?;
                Ok(ExpansionFit {
                    patch: key.clone(),
                    ray: i,
                    metric: validate_metric_expansion(&ray, &metric_t)?,
                    series: validate_series(&ray, &series_t)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.extend(fits);
    }
    Ok(out)
}

/// Remainder orders of the metric and shape-operator expansions on the focal
/// varieties and probe submanifolds.
pub fn verify_metric_expansion(c: &IsoparametricCandidate, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(
        &c.label,
        "metric-expansion",
        "small-t expansions of the Fermi metric and the tube shape operator",
        opts.provenance(c),
    );
    let fits = expansion_fits(c, opts)?;
    r.samples.base_points = fits.len();
    r.samples.t_values = fits.first().map_or(0, |f| f.metric.points.len() + f.series.points.len());
    let mut keys: Vec<String> = fits.iter().map(|f| f.patch.clone()).collect();
    keys.dedup();
    for key in keys {
        let group: Vec<&ExpansionFit> = fits.iter().filter(|f| f.patch == key).collect();
        for what in ["metric", "series"] {
            let all: Vec<&SlopeFit> = group
                .iter()
                .map(|f| if what == "metric" { &f.metric } else { &f.series })
                .collect();
            let floor = all[0].exact_floor;
            let min_slope = all[0].min_slope;
            if all.iter().all(|f| f.exact) {
                let worst = all
                    .iter()
                    .flat_map(|f| f.points.iter().map(|p| p.1))
                    .fold(0.0, f64::max);
                r.check(CheckResult::below(format!("{what} remainder, exact case ({key})"), worst, floor));
            } else {
                let slopes: Vec<f64> = all.iter().map(|f| f.slope.unwrap_or(f64::INFINITY)).collect();
                let worst = slopes.iter().copied().fold(f64::INFINITY, f64::min);
                // passes iff worst >= min_slope; stored as a deficit so that `below` applies
                r.check(CheckResult::below(
                    format!("{what} remainder slope deficit below {min_slope} ({key})"),
                    (min_slope - worst).max(0.0),
                    f64::MIN_POSITIVE,
                ));
                r.value(format!("{what}_slopes_{key}"), slopes);
            }
        }
    }
    Ok(r)
}

/// Run one suite (or every suite) on a case. Refuses cases whose admission
/// gates failed.
pub fn run_suite(c: &IsoparametricCandidate, suite: Suite, opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    c.require_admitted()?;
    let one = |s: Suite| -> Result<VerificationReport> {
        match s {
            Suite::Transnormal => check_transnormal(c, opts),
            Suite::Isoparametric => check_isoparametric(c, opts),
            Suite::CartanMunzner => verify_cartan_munzner(c, opts),
            Suite::MinimalFocal => verify_minimal_focal(c, opts),
            Suite::Austere => verify_austere(c, opts),
            Suite::CurvatureIdentities => verify_curvature_identities(c, opts),
            Suite::UniqueMinimal => verify_unique_minimal(c, opts),
            Suite::TubeProfile => verify_tube_profile(c, opts),
            Suite::MetricExpansion => verify_metric_expansion(c, opts),
            Suite::All => unreachable!(),
        }
    };
    let mut reports = match suite {
        Suite::All => Suite::EACH.into_iter().map(one).collect::<Result<Vec<_>>>()?,
        s => vec![one(s)?],
    };
    if !opts.tolerances.is_empty() {
        for r in &mut reports {
            r.override_tolerances(&opts.tolerances);
        }
    }
    Ok(reports)
}
