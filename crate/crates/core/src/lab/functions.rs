//! Checks on the catalog functions themselves: transnormality `|∇f|² = b(f)`,
//! isoparametricity `Δf = a(f)` and the Cartan–Münzner identities.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

use crate::dual::jet2;
use crate::error::Result;
use crate::geometry::curvature::{christoffel_at, metric_at};
use crate::geometry::manifold::ChartedManifold;
use crate::lab::catalog::IsoparametricCandidate;
use crate::lab::report::{CheckResult, GateResult, VerificationReport};
use crate::lab::sampling::{base_parameters, sphere_point, Halton};
use crate::lab::suites::SuiteOptions;
use crate::linalg::inverse;
use crate::poly::{Polynomial, Surd3};

/// Number of `f`-bins for the profile checks.
pub const PROFILE_BINS: usize = 64;
/// Within-bin relative spread allowed for `b(f)` and `a(f)`.
pub const PROFILE_SPREAD_TOL: f64 = 1e-6;

/// `f`, `|∇f|²_g` and `Δ_g f` at a model-space point.
#[derive(Clone, Copy, Debug)]
pub struct FunctionSample {
    pub value: f64,
    pub grad_norm_sq: f64,
    pub laplacian: f64,
}

pub fn sample_function(c: &IsoparametricCandidate, y: &[f64]) -> Result<FunctionSample> {
    let amb = &c.ambient;
    let chart = amb.preferred_chart(y);
    let x = amb.model_to_chart(chart, y);
    let n = amb.dim();
    let jet = jet2(&x, |z| vec![c.f_at(chart, z)]);
    let g = metric_at::<_, f64>(amb, chart, &x)?;
    let gi = inverse(&g, n).ok_or_else(|| crate::Error::DifferentiationFailure("metric not invertible".into()))?;
    let gamma = christoffel_at::<_, f64>(amb, chart, &x)?;
    let mut grad = 0.0;
    let mut lap = 0.0;
    for i in 0..n {
        for j in 0..n {
            grad += gi[i * n + j] * jet.d1[i][0] * jet.d1[j][0];
            let corr: f64 = (0..n).map(|k| gamma.get(k, i, j) * jet.d1[k][0]).sum();
            lap += gi[i * n + j] * (jet.d2[i][j][0] - corr);
        }
    }
    Ok(FunctionSample {
        value: jet.value[0],
        grad_norm_sq: grad,
        laplacian: lap,
    })
}

/// Ambient model points spread over the chart domains: the whole sphere,
/// the cube `[−2, 2]^n`, or `S² × [−2, 2]`.
pub fn ambient_points(amb: &ChartedManifold, count: usize, seed: u64) -> Vec<Vec<f64>> {
    match *amb {
        ChartedManifold::Euclidean { n } => Halton::new(n, seed, 4)
            .take_points(count)
            .into_iter()
            .map(|p| p.into_iter().map(|s| 4.0 * s - 2.0).collect())
            .collect(),
        ChartedManifold::Sphere { n } => {
            let d = 2 * (n + 1).div_ceil(2);
            Halton::new(d, seed, 4)
                .take_points(count)
                .into_iter()
                .map(|p| sphere_point(&p, n + 1))
                .collect()
        }
        ChartedManifold::SphereTimesLine => Halton::new(5, seed, 4)
            .take_points(count)
            .into_iter()
            .map(|p| {
                let mut y = sphere_point(&p[..4], 3);
                y.push(4.0 * p[4] - 2.0);
                y
            })
            .collect(),
    }
}

fn away_from_focal(c: &IsoparametricCandidate, s: f64) -> bool {
    let (lo, hi) = c.range;
    let margin = if hi.is_finite() { 1e-3 * (hi - lo) } else { 1e-3 };
    s - lo > margin && (!hi.is_finite() || hi - s > margin)
}

fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Option<(Vec<f64>, f64)> {
    let rows = xs.len();
    let a = DMatrix::from_fn(rows, degree + 1, |i, j| xs[i].powi(j as i32));
    let b = DVector::from_column_slice(ys);
    let coef = a.clone().svd(true, true).solve(&b, 1e-14).ok()?;
    let resid = (a * &coef - b).amax();
    Some((coef.as_slice().to_vec(), resid))
}

/// Binned profile of `values` as a function of `f`.
#[derive(Clone, Debug)]
pub struct BinnedProfile {
    pub centers: Vec<f64>,
    pub fitted: Vec<f64>,
    /// Worst within-bin residual after a local quadratic fit, relative to
    /// `1 + max|value|` in the bin.
    pub max_spread: f64,
    pub worst_bin: Option<usize>,
    pub populated_bins: usize,
    /// Global polynomial fit (degree ≤ 4) and its worst residual.
    pub global_fit: Vec<f64>,
    pub global_residual: f64,
}

/// Bin `(f, value)` pairs into [`PROFILE_BINS`] equal `f`-bins; each bin with
/// at least four points is fitted by a quadratic in `f` so that only the
/// failure of `value` to be a function of `f` registers as spread.
pub fn binned_profile(points: &[(f64, f64)]) -> BinnedProfile {
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let width = ((hi - lo) / PROFILE_BINS as f64).max(1e-300);
    let mut bins: Vec<Vec<(f64, f64)>> = vec![Vec::new(); PROFILE_BINS];
    for &(s, v) in points {
        let i = (((s - lo) / width) as usize).min(PROFILE_BINS - 1);
        bins[i].push((s, v));
    }
    let mut out = BinnedProfile {
        centers: Vec::new(),
        fitted: Vec::new(),
        max_spread: 0.0,
        worst_bin: None,
        populated_bins: 0,
        global_fit: Vec::new(),
        global_residual: 0.0,
    };
    for (i, bin) in bins.iter().enumerate() {
        if bin.len() < 4 {
            continue;
        }
        out.populated_bins += 1;
        let center = lo + (i as f64 + 0.5) * width;
        let xs: Vec<f64> = bin.iter().map(|p| (p.0 - center) / width).collect();
        let ys: Vec<f64> = bin.iter().map(|p| p.1).collect();
        let scale = 1.0 + ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
        let (coef, resid) = polyfit(&xs, &ys, 2).unwrap_or((vec![f64::NAN], f64::NAN));
        let spread = resid / scale;
        if !(spread <= out.max_spread) {
            out.max_spread = spread;
            out.worst_bin = Some(i);
        }
        out.centers.push(center);
        out.fitted.push(coef[0]);
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    if let Some((coef, resid)) = polyfit(&xs, &ys, 4) {
        out.global_fit = coef;
        out.global_residual = resid;
    }
    out
}

fn function_samples(c: &IsoparametricCandidate, n_samples: usize, seed: u64) -> Result<Vec<FunctionSample>> {
    let mut out = Vec::with_capacity(n_samples);
    let mut tried = 0;
    let pool = ambient_points(&c.ambient, 4 * n_samples, seed);
    for y in pool {
        tried += 1;
        let s = sample_function(c, &y)?;
        if away_from_focal(c, s.value) {
            out.push(s);
        }
        if out.len() == n_samples || tried > 4 * n_samples {
            break;
        }
    }
    Ok(out)
}

fn profile_report(
    c: &IsoparametricCandidate,
    opts: &SuiteOptions,
    suite: &str,
    theorem: &str,
    key: &str,
    pick: fn(&FunctionSample) -> f64,
) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(&c.label, suite, theorem, opts.provenance(c));
    let samples = function_samples(c, opts.ambient_samples.max(100), opts.seed)?;
    r.samples.ambient_points = samples.len();
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.value, pick(s))).collect();
    let prof = binned_profile(&pts);
    r.check(CheckResult::below(
        format!("{key}-profile within-bin spread"),
        prof.max_spread,
        PROFILE_SPREAD_TOL,
    ));
    if let Some(b) = prof.worst_bin {
        r.note(format!("worst bin {b} of {PROFILE_BINS} ({} populated)", prof.populated_bins));
    }
    r.note(format!(
        "global degree-4 fit residual {:.3e} (reported, not asserted)",
        prof.global_residual
    ));
    r.value(format!("{key}_profile_f"), prof.centers);
    r.value(format!("{key}_profile_value"), prof.fitted);
    r.value(format!("{key}_global_fit"), prof.global_fit);
    Ok(r)
}

/// `|∇f|²` is a function of `f`.
pub fn check_transnormal(c: &IsoparametricCandidate, opts: &SuiteOptions) -> Result<VerificationReport> {
    profile_report(c, opts, "transnormal", "|grad f|^2 = b(f)", "b", |s| s.grad_norm_sq)
}

/// `Δf` is a function of `f`.
pub fn check_isoparametric(c: &IsoparametricCandidate, opts: &SuiteOptions) -> Result<VerificationReport> {
    profile_report(c, opts, "isoparametric", "laplacian f = a(f)", "a", |s| s.laplacian)
}

fn sum_sq_power(nvars: usize, k: u32) -> Polynomial<Surd3> {
    Polynomial::<Surd3>::sum_of_squares(nvars, 0..nvars).pow(k)
}

/// Exact and sampled checks of `|∇F|² = g²|x|^{2g−2}` and `ΔF = c|x|^{g−2}`
/// for the homogeneous polynomial behind a sphere case. `c` is fitted.
pub fn cartan_munzner_identities(c: &IsoparametricCandidate, points: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let Some(cm) = &c.cm else {
        return Ok(Vec::new());
    };
    let f = &cm.exact;
    let g = cm.degree;
    let nv = f.nvars();
    let mut checks = Vec::new();

    let g2 = Surd3::from_ratios((g * g) as i64, 1, 0, 1);
    let grad_exact = f.gradient_norm_sq() - sum_sq_power(nv, g - 1).scale(&g2);
    checks.push(CheckResult::holds("gradient identity (exact)", grad_exact.is_zero()));
    let lap = f.laplacian();
    let lap_exact = if g % 2 == 1 {
        lap.is_zero()
    } else {
        let mut key = vec![0u32; nv];
        key[0] = g - 2;
        let lead = lap
            .terms()
            .find(|(e, _)| **e == key)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(Surd3::zero);
        (lap.clone() - sum_sq_power(nv, (g - 2) / 2).scale(&lead)).is_zero()
    };
    checks.push(CheckResult::holds("laplacian identity (exact)", lap_exact));

    let ff = f.to_f64();
    let grad_f: Vec<Polynomial<f64>> = ff.gradient();
    let lap_f = ff.laplacian();
    let xs: Vec<Vec<f64>> = Halton::new(nv, seed, 5)
        .take_points(points)
        .into_iter()
        .map(|p| p.into_iter().map(|s| 2.0 * s - 1.0).collect())
        .collect();
    let mut grad_res = 0.0f64;
    let mut lap_vals = Vec::with_capacity(points);
    for x in &xs {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let gn: f64 = grad_f.iter().map(|p| p.eval(x).powi(2)).sum();
        grad_res = grad_res.max((gn - (g * g) as f64 * r2.powi(g as i32 - 1)).abs());
        lap_vals.push((lap_f.eval(x), r2.sqrt().powi(g as i32 - 2)));
    }
    let num: f64 = lap_vals.iter().map(|(l, r)| l * r).sum();
    let den: f64 = lap_vals.iter().map(|(_, r)| r * r).sum();
    let cfit = if den > 0.0 { num / den } else { 0.0 };
    let lap_res = lap_vals.iter().map(|(l, r)| (l - cfit * r).abs()).fold(0.0, f64::max);
    checks.push(CheckResult::below("gradient identity residual", grad_res, 1e-10));
    checks.push(CheckResult::below("laplacian identity residual", lap_res, 1e-10));
    Ok(checks)
}

/// The Cartan–Münzner suite as a report.
pub fn verify_cartan_munzner(c: &IsoparametricCandidate, opts: &SuiteOptions) -> Result<VerificationReport> {
    let mut r = VerificationReport::new(&c.label, "cartan-munzner", "Cartan-Munzner identities", opts.provenance(c));
    match &c.cm {
        None => r.note("no homogeneous polynomial behind this case; suite not applicable"),
        Some(cm) => {
            r.samples.ambient_points = 1000;
            r.value("degree", vec![cm.degree as f64]);
            for k in cartan_munzner_identities(c, 1000, opts.seed)? {
                r.check(k);
            }
        }
    }
    Ok(r)
}

/// `f` takes its extreme values on the focal varieties and `∇f` vanishes
/// there.
pub fn focal_value_gate(c: &IsoparametricCandidate, count: usize, seed: u64) -> Result<GateResult> {
    let mut worst_value = 0.0f64;
    let mut worst_grad = 0.0f64;
    for (side, patch) in c.focal_sides() {
        let target = match side {
            crate::lab::catalog::Side::Minus => c.range.0,
            crate::lab::catalog::Side::Plus => c.range.1,
        };
        for u in base_parameters(patch, count, seed) {
            let y = patch.model_point(&u);
            let s = sample_function(c, &y)?;
            worst_value = worst_value.max((s.value - target).abs());
            worst_grad = worst_grad.max(s.grad_norm_sq.max(0.0).sqrt());
        }
    }
    Ok(GateResult {
        gate: "focal-values".into(),
        passed: worst_value < 1e-10 && worst_grad < 1e-8,
        statistic: worst_value.max(worst_grad),
    })
}
