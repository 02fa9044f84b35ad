//! Acceptance criteria AC1–AC11, one line each. Runs without the libtest
//! harness so the lines are always printed; exits non-zero if any fails.

use std::f64::consts::FRAC_PI_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use tubegeo::{
    build_candidate, catalog, expansion_fits, profile_grid, ray_samples, riccati_from_series, run_suite,
    shape_via_jacobi, normal_frame_ray, CaseSpec, CatalogOptions, ChartedManifold, Error, IsoparametricCandidate,
    Side, Suite, SuiteOptions, VerificationReport,
};

type Outcome = Result<String, String>;

fn cases() -> Vec<IsoparametricCandidate> {
    catalog(&CatalogOptions::default()).expect("catalog builds")
}

fn case(spec: CaseSpec) -> IsoparametricCandidate {
    build_candidate(spec, &CatalogOptions::default()).expect("case builds")
}

fn one(c: &IsoparametricCandidate, suite: Suite, opts: &SuiteOptions) -> Result<VerificationReport, String> {
    run_suite(c, suite, opts)
        .map(|mut v| v.remove(0))
        .map_err(|e| format!("{}: {e}", c.label))
}

/// Largest statistic over checks whose name starts with `prefix`, and whether all pass.
fn checks(r: &VerificationReport, prefix: &str) -> (f64, bool, usize) {
    let hits: Vec<_> = r.checks.iter().filter(|c| c.name.starts_with(prefix)).collect();
    (
        hits.iter().map(|c| c.statistic).fold(0.0, f64::max),
        hits.iter().all(|c| c.pass),
        hits.len(),
    )
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac1_space_forms() -> Outcome {
    let grid = profile_grid(0.1, 3.0, 30);
    let mut worst_sphere = 0.0f64;
    let c = case(CaseSpec::S2Point);
    let patch = c.focal(Side::Minus).unwrap();
    for (u, v) in ray_samples(patch, 1, 8, 0) {
        let ray = normal_frame_ray(patch, &u, &v, 3.0, 1e-3).map_err(|e| e.to_string())?;
        let ric = riccati_from_series(&ray, 1e-6, &grid).map_err(|e| e.to_string())?;
        let jac = shape_via_jacobi(&ray, &grid).map_err(|e| e.to_string())?;
        if ric.samples.len() != grid.len() {
            return Err(format!("riccati stopped at {:?}", ric.focal_t));
        }
        for (a, b) in ric.samples.iter().zip(&jac) {
            let want = -1.0 / a.t.tan();
            worst_sphere = worst_sphere.max((a.eigenvalues[0] - want).abs()).max((b.eigenvalues[0] - want).abs());
        }
    }
    let mut worst_flat = 0.0f64;
    let c = case(CaseSpec::EuclideanPoint { n: 3 });
    let patch = c.focal(Side::Minus).unwrap();
    for (u, v) in ray_samples(patch, 1, 8, 0) {
        let ray = normal_frame_ray(patch, &u, &v, 3.0, 1e-3).map_err(|e| e.to_string())?;
        let ric = riccati_from_series(&ray, 1e-6, &grid).map_err(|e| e.to_string())?;
        let jac = shape_via_jacobi(&ray, &grid).map_err(|e| e.to_string())?;
        for (a, b) in ric.samples.iter().zip(&jac) {
            for l in a.eigenvalues.iter().chain(&b.eigenvalues) {
                worst_flat = worst_flat.max((l + 1.0 / a.t).abs());
            }
        }
    }
    verdict(
        worst_sphere < 1e-6 && worst_flat < 1e-7,
        format!("S2 |λ + cot t| = {worst_sphere:.2e} (< 1e-6), R3 |λ + 1/t| = {worst_flat:.2e} (< 1e-7)"),
    )
}

/// Tube-profile reports for every case with 50 rays per case in total.
fn tube_profiles() -> Result<Vec<VerificationReport>, String> {
    cases()
        .iter()
        .map(|c| {
            let sides = c.focal_sides().len().max(1);
            let opts = SuiteOptions {
                rays: 50usize.div_ceil(sides),
                ..SuiteOptions::default()
            };
            one(c, Suite::TubeProfile, &opts)
        })
        .collect()
}

fn ac2_and_ac5() -> (Outcome, Outcome) {
    let reports = match tube_profiles() {
        Ok(r) => r,
        Err(e) => return (Err(e.clone()), Err(e)),
    };
    let mut worst2 = (0.0f64, true, String::new());
    let mut worst5 = (0.0f64, true, String::new());
    for r in &reports {
        let (s, ok, _) = checks(r, "riccati vs jacobi");
        if s >= worst2.0 {
            worst2.0 = s;
            worst2.2 = r.case.clone();
        }
        worst2.1 &= ok;
        let (s, ok, _) = checks(r, "trace identity residual");
        if s >= worst5.0 {
            worst5.0 = s;
            worst5.2 = r.case.clone();
        }
        worst5.1 &= ok;
    }
    let rays: usize = reports.iter().map(|r| r.samples.base_points).sum();
    (
        verdict(
            worst2.1,
            format!("max |S_riccati − S_jacobi| = {:.2e} (< 1e-5) at {}, {rays} rays over {} cases", worst2.0, worst2.2, reports.len()),
        ),
        verdict(
            worst5.1,
            format!("max normalized |H' − |S|² − ρ(N,N)| = {:.2e} (< 1e-4) at {}", worst5.0, worst5.2),
        ),
    )
}

fn ac3_and_ac4() -> (Outcome, Outcome) {
    let opts = SuiteOptions::default();
    let mut series_min = f64::INFINITY;
    let mut series_ok = true;
    let mut metric_min = f64::INFINITY;
    let mut metric_ok = true;
    let mut flat_worst = 0.0f64;
    let mut exact_curved = 0;
    let mut rays_min = usize::MAX;
    for c in cases() {
        let fits = match expansion_fits(&c, &opts) {
            Ok(f) => f,
            Err(e) => return (Err(e.to_string()), Err(e.to_string())),
        };
        let mut by_patch = std::collections::BTreeMap::<String, usize>::new();
        for f in &fits {
            *by_patch.entry(f.patch.clone()).or_default() += 1;
            if !f.series.exact {
                let s = f.series.slope.unwrap_or(f64::NAN);
                series_min = series_min.min(s);
                series_ok &= s >= 1.9;
            }
            let flat = matches!(c.ambient, ChartedManifold::Euclidean { .. });
            if flat {
                let worst = f.metric.points.iter().map(|p| p.1).fold(0.0, f64::max);
                flat_worst = flat_worst.max(worst);
            } else if f.metric.exact {
                exact_curved += 1;
            } else {
                let s = f.metric.slope.unwrap_or(f64::NAN);
                metric_min = metric_min.min(s);
                metric_ok &= s >= 2.7;
            }
        }
        rays_min = rays_min.min(by_patch.values().copied().min().unwrap_or(0));
    }
    (
        verdict(
            series_ok && rays_min >= 10,
            format!("min series slope = {series_min:.3} (>= 1.9), >= {rays_min} rays per submanifold"),
        ),
        verdict(
            metric_ok && flat_worst < 1e-9,
            format!(
                "min metric slope on curved cases = {metric_min:.3} (>= 2.7), flat max remainder = {flat_worst:.2e} (< 1e-9), {exact_curved} curved fits exact"
            ),
        ),
    )
}

fn ac6_minimal() -> Outcome {
    let opts = SuiteOptions::default();
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut covered = Vec::new();
    for c in cases() {
        let r = one(&c, Suite::MinimalFocal, &opts)?;
        let (s, pass, n) = checks(&r, "max |trace T_v|");
        worst = worst.max(s);
        ok &= pass && r.pass;
        if n > 0 {
            covered.push(r.case.clone());
        }
    }
    let needed = ["s4-cartan", "sn-height-squared(3)"];
    let has = needed.iter().all(|n| covered.iter().any(|c| c == n));
    verdict(
        ok && has && opts.n_base * opts.n_dirs >= 512,
        format!(
            "max |trace T_v| = {worst:.2e} (< 1e-6) over {} samples per variety on {}",
            opts.n_base * opts.n_dirs,
            covered.join(", ")
        ),
    )
}

fn ac7_austere() -> Outcome {
    let opts = SuiteOptions::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for spec in [
        CaseSpec::SnClifford { p: 1, q: 2 },
        CaseSpec::SnClifford { p: 2, q: 2 },
        CaseSpec::S4Cartan,
    ] {
        let r = one(&case(spec), Suite::Austere, &opts)?;
        let (sp, a, _) = checks(&r, "eigenvalue spread");
        let (pa, b, _) = checks(&r, "pairing");
        let (li, d, n) = checks(&r, "branch limits");
        ok &= a && b && d && n > 0 && r.pass;
        parts.push(format!("{}: spread {sp:.1e} pairing {pa:.1e} limits {li:.1e}", r.case));
    }
    verdict(ok, parts.join("; "))
}

fn ac8_identities() -> Outcome {
    let opts = SuiteOptions::default();
    let mut ok = true;
    let mut gamma = 0.0f64;
    let mut traced = 0.0f64;
    let mut codim1 = 0.0f64;
    let mut tangent = 0.0f64;
    let mut tube = 0.0f64;
    let mut saw_nonproper = false;
    for c in cases() {
        let r = one(&c, Suite::CurvatureIdentities, &opts)?;
        ok &= r.pass;
        gamma = gamma.max(checks(&r, "gamma_p spread").0);
        traced = traced.max(checks(&r, "traced identity").0);
        tangent = tangent.max(checks(&r, "sum of K").0);
        tube = tube.max(checks(&r, "ricci(nu, nu) spread per tube").0);
        let (s, _, n) = checks(&r, "codimension-one identity");
        if n > 0 && r.case.starts_with("sn-height-squared") {
            saw_nonproper = true;
        }
        codim1 = codim1.max(s);
    }
    verdict(
        ok && saw_nonproper,
        format!(
            "Γ spread {gamma:.1e}, traced {traced:.1e}, codim-1 {codim1:.1e}, ΣK spread {tangent:.1e}, ρ(ν,ν) per tube {tube:.1e}"
        ),
    )
}

fn ac9_unique() -> Outcome {
    let opts = SuiteOptions::default();
    let mut ok = true;
    let mut worst = 0.0f64;
    for (spec, want) in [
        (CaseSpec::SnHeight { n: 4 }, FRAC_PI_2),
        (CaseSpec::SnClifford { p: 1, q: 2 }, 2f64.sqrt().atan()),
        (CaseSpec::SnClifford { p: 3, q: 1 }, (1.0f64 / 3.0).sqrt().atan()),
    ] {
        let r = one(&case(spec), Suite::UniqueMinimal, &opts)?;
        ok &= r.pass;
        let stars = r.values.get("t_star").cloned().unwrap_or_default();
        ok &= !stars.is_empty();
        for t in stars {
            worst = worst.max((t - want).abs());
        }
    }
    let flat = one(&case(CaseSpec::EuclideanPoint { n: 3 }), Suite::UniqueMinimal, &opts)?;
    let no_zero = !flat.pass && flat.notes.iter().any(|n| n.starts_with("NoZero"));
    verdict(
        ok && worst < 1e-6 && no_zero,
        format!("max |t* − closed form| = {worst:.2e} (< 1e-6); flat control NoZero = {no_zero}"),
    )
}

fn ac10_gate() -> Outcome {
    let opts = SuiteOptions::default();
    let r = one(&case(CaseSpec::S4Cartan), Suite::CartanMunzner, &opts)?;
    let worst = r
        .checks
        .iter()
        .filter(|c| c.name.contains("residual"))
        .map(|c| c.statistic)
        .fold(0.0, f64::max);
    let exact = r.checks.iter().filter(|c| c.name.contains("exact")).all(|c| c.pass && c.statistic == 0.0);
    let perturbed = build_candidate(
        CaseSpec::S4Cartan,
        &CatalogOptions {
            perturb_cartan: 1e-4,
            ..CatalogOptions::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let refused = matches!(run_suite(&perturbed, Suite::Austere, &opts), Err(Error::GateFailed { .. }));
    verdict(
        r.pass && exact && r.samples.ambient_points >= 1000 && refused,
        format!(
            "numeric residual {worst:.2e} (< 1e-10) at {} points, exact identities hold = {exact}, perturbed case refused = {refused}",
            r.samples.ambient_points
        ),
    )
}

fn ac11_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str, threads: Option<&str>| -> Result<Vec<u8>, String> {
        let out = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_tubegeo"));
        cmd.args(["verify", "--case", "s2-point", "--suite", "all", "--seed", "7", "--out"])
            .arg(&out);
        match threads {
            Some(t) => cmd.env("TUBEGEO_THREADS", t),
            None => cmd.env_remove("TUBEGEO_THREADS"),
        };
        let status = cmd.output().map_err(|e| e.to_string())?.status;
        if !matches!(status.code(), Some(0 | 1)) {
            return Err(format!("verify exited with {status}"));
        }
        std::fs::read(&out).map_err(|e| e.to_string())
    };
    let a = run("a.json", Some("1"))?;
    let b = run("b.json", None)?;
    verdict(
        a == b && !a.is_empty(),
        format!("two `verify --suite all` runs ({} bytes) identical = {}", a.len(), a == b),
    )
}

fn main() {
    let mut results: Vec<(&str, &str, Outcome, f64)> = Vec::new();
    let mut timed = |id: &'static str, what: &'static str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        report(id, what, &out, t.elapsed().as_secs_f64());
        results.push((id, what, out, t.elapsed().as_secs_f64()));
    };
    timed("AC1", "space-form tube oracle", &ac1_space_forms);
    let t = Instant::now();
    let (ac2, ac5) = catch_unwind(ac2_and_ac5).unwrap_or_else(|_| (Err("panicked".into()), Err("panicked".into())));
    let shared = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let (ac3, ac4) = catch_unwind(ac3_and_ac4).unwrap_or_else(|_| (Err("panicked".into()), Err("panicked".into())));
    let shared34 = t.elapsed().as_secs_f64();
    report("AC2", "Riccati vs Jacobi oracle", &ac2, shared);
    report("AC3", "shape-operator series order", &ac3, shared34);
    report("AC4", "metric expansion order", &ac4, shared34);
    report("AC5", "Riccati trace identity", &ac5, shared);
    results.push(("AC2", "", ac2, shared));
    results.push(("AC3", "", ac3, shared34));
    results.push(("AC4", "", ac4, shared34));
    results.push(("AC5", "", ac5, shared));
    let mut timed = |id: &'static str, what: &'static str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        report(id, what, &out, t.elapsed().as_secs_f64());
        results.push((id, what, out, t.elapsed().as_secs_f64()));
    };
    timed("AC6", "focal varieties are minimal", &ac6_minimal);
    timed("AC7", "constant principal curvatures in pairs", &ac7_austere);
    timed("AC8", "curvature identities", &ac8_identities);
    timed("AC9", "unique minimal level set", &ac9_unique);
    timed("AC10", "Cartan-Munzner gate", &ac10_gate);
    timed("AC11", "byte-identical reports", &ac11_determinism);
    let failed: Vec<&str> = results.iter().filter(|r| r.2.is_err()).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}

fn report(id: &str, what: &str, out: &Outcome, secs: f64) {
    match out {
        Ok(d) => println!("{id:<5} PASS  {what}: {d} [{secs:.1}s]"),
        Err(d) => println!("{id:<5} FAIL  {what}: {d} [{secs:.1}s]"),
    }
}
