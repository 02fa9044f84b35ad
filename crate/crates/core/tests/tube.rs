use std::f64::consts::{FRAC_PI_2, PI};

use tubegeo::*;

fn sphere_point() -> SubmanifoldPatch {
    SubmanifoldPatch::new(
        ChartedManifold::Sphere { n: 2 },
        PatchKind::Point { y: vec![0.0, 0.0, -1.0] },
        "s2-point",
    )
}

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn sphere_point_is_minus_cot() {
    let p = sphere_point();
    let ray = normal_frame_ray(&p, &[], &[0.6, 0.8], 3.0, 1e-3).unwrap();
    let ts = grid(0.1, 3.0, 30);
    let ric = riccati_from_series(&ray, DEFAULT_T0, &ts).unwrap();
    assert!(ric.focal_t.is_none());
    let jac = shape_via_jacobi(&ray, &ts).unwrap();
    for (r, j) in ric.samples.iter().zip(&jac) {
        let want = -1.0 / r.t.tan();
        assert!((r.eigenvalues[0] - want).abs() < 1e-6, "riccati t={} {}", r.t, r.eigenvalues[0] - want);
        assert!((j.eigenvalues[0] - want).abs() < 1e-6, "jacobi t={}", j.t);
        assert!(r.riccati_residual.unwrap() < 1e-6, "t={} {:?}", r.t, r.riccati_residual);
    }
    let prof = mean_curvature_profile(&ric.samples).unwrap();
    assert!(prof.max_residual < 1e-6, "{}", prof.max_residual);
    assert!(prof.strictly_increasing());
}

#[test]
fn euclidean_point_is_minus_inverse() {
    let p = SubmanifoldPatch::new(
        ChartedManifold::Euclidean { n: 3 },
        PatchKind::Point { y: vec![0.0; 3] },
        "euclidean-point",
    );
    let s = 1.0 / 3f64.sqrt();
    let ray = normal_frame_ray(&p, &[], &[s, s, s], 2.0, 1e-3).unwrap();
    let ts = grid(0.1, 2.0, 20);
    let ric = riccati_from_series(&ray, DEFAULT_T0, &ts).unwrap();
    for r in &ric.samples {
        for l in &r.eigenvalues {
            assert!((l + 1.0 / r.t).abs() < 1e-7, "t={} {}", r.t, l + 1.0 / r.t);
        }
    }
    let prof = mean_curvature_profile(&ric.samples).unwrap();
    assert!(prof.max_residual < 1e-6);
    let rec = track_eigen_branches(&ric.samples).unwrap();
    assert_eq!(rec.count(BranchKind::Fiber), 2);
    let fit = validate_metric_expansion(&ray, &log_grid(0.01, 0.2, 6)).unwrap();
    assert!(fit.exact, "{:?}", fit.points);
}

#[test]
fn clifford_eigenvalues() {
    // S^1 ⊂ S^3 focal variety: the tube eigenvalues are tan t and −cot t
    let p = SubmanifoldPatch::new(
        ChartedManifold::Sphere { n: 3 },
        PatchKind::GreatSphere { k: 1, offset: 0 },
        "clifford",
    );
    let ray = normal_frame_ray(&p, &[0.3], &[0.6, 0.8], 1.4, 1e-3).unwrap();
    let ts = log_grid(0.01, 1.4, 40);
    let ric = riccati_from_series(&ray, DEFAULT_T0, &ts).unwrap();
    for r in &ric.samples {
        let mut want = vec![r.t.tan(), -1.0 / r.t.tan()];
        want.sort_by(|a, b| b.total_cmp(a));
        for (l, w) in r.eigenvalues.iter().zip(&want) {
            assert!((l - w).abs() < 1e-6, "t={} {l} {w}", r.t);
        }
    }
    let rec = track_eigen_branches(&ric.samples).unwrap();
    assert_eq!(rec.count(BranchKind::Submanifold), 1);
    assert!(rec.limits()[0].abs() < 1e-5, "{rec:?}");
    let series = validate_series(&ray, &log_grid(1e-3, 1e-1, 8)).unwrap();
    assert!(series.pass, "{series:?}");
    let metric = validate_metric_expansion(&ray, &log_grid(0.01, 0.2, 6)).unwrap();
    assert!(metric.pass, "{metric:?}");
}

#[test]
fn veronese_branch_limits() {
    let p = SubmanifoldPatch::new(ChartedManifold::Sphere { n: 4 }, PatchKind::Veronese { sign: 1.0 }, "veronese");
    let ray = normal_frame_ray(&p, &[0.2, -0.4], &[0.6, -0.8], 0.8, 1e-3).unwrap();
    let t_v = shape_of_submanifold(&p, &[0.2, -0.4], &[0.6, -0.8]).unwrap();
    let ev = tubegeo::linalg::sorted_symmetric_eigenvalues(&t_v);
    let r3 = 1.0 / 3f64.sqrt();
    assert!((ev[0] - r3).abs() < 1e-9 && (ev[1] + r3).abs() < 1e-9, "{ev:?}");
    let ts = log_grid(0.01, 0.8, 30);
    let ric = riccati_from_series(&ray, DEFAULT_T0, &ts).unwrap();
    let rec = track_eigen_branches(&ric.samples).unwrap();
    let lim = rec.limits();
    assert_eq!(lim.len(), 2);
    assert!((lim[0] - r3).abs() < 1e-5 && (lim[1] + r3).abs() < 1e-5, "{lim:?}");
    // closed form branches cot(π/3 − t), cot(2π/3 − t), and −cot t
    for r in &ric.samples {
        let t = r.t;
        let mut want = vec![1.0 / (PI / 3.0 - t).tan(), 1.0 / (2.0 * PI / 3.0 - t).tan(), -1.0 / t.tan()];
        want.sort_by(|a, b| b.total_cmp(a));
        for (l, w) in r.eigenvalues.iter().zip(&want) {
            assert!((l - w).abs() < 1e-6, "t={t} {l} {w}");
        }
    }
}

#[test]
fn circle_shape_and_focal_blow_up() {
    let p = SubmanifoldPatch::new(ChartedManifold::Euclidean { n: 2 }, PatchKind::Circle { radius: 2.0 }, "circle");
    // inward normal: focal point at the centre, t = 2
    let t_v = shape_of_submanifold(&p, &[0.4], &[-1.0]).unwrap();
    assert!((t_v[(0, 0)] - 0.5).abs() < 1e-12, "{}", t_v[(0, 0)]);
    let ray = normal_frame_ray(&p, &[0.4], &[-1.0], 2.5, 1e-3).unwrap();
    let ric = riccati_from_series(&ray, DEFAULT_T0, &grid(0.1, 2.5, 25)).unwrap();
    let focal = ric.focal_t.expect("focal point");
    assert!((focal - 2.0).abs() < 1e-3, "{focal}");
    for s in &ric.samples {
        assert!((s.eigenvalues[0] - 1.0 / (2.0 - s.t)).abs() < 1e-7, "t={} {:?}", s.t, s.eigenvalues);
    }
}

#[test]
fn sphere_metric_expansion_slope() {
    let ray = normal_frame_ray(&sphere_point(), &[], &[1.0, 0.0], 0.3, 1e-3).unwrap();
    let fit = validate_metric_expansion(&ray, &log_grid(0.01, 0.2, 6)).unwrap();
    assert!(fit.pass && fit.slope.unwrap() > 3.5, "{fit:?}");
    let _ = FRAC_PI_2;
}

#[test]
fn tilted_geodesic_mixed_blocks() {
    // the only catalog probe with a nonzero tangent-fiber curvature block
    let p = SubmanifoldPatch::new(
        ChartedManifold::SphereTimesLine,
        PatchKind::TiltedGeodesic { alpha: 0.7 },
        "tilted",
    );
    let ray = normal_frame_ray(&p, &[0.2], &[0.6, 0.8], 1.0, 1e-3).unwrap();
    let co = SeriesCoefficients::from_ray(&ray).unwrap();
    assert!(co.b.abs().max() > 1e-2, "{}", co.b);
    let series = validate_series(&ray, &log_grid(1e-3, 1e-1, 8)).unwrap();
    assert!(series.pass, "{series:?}");
    let metric = validate_metric_expansion(&ray, &log_grid(0.01, 0.2, 6)).unwrap();
    assert!(metric.pass, "{metric:?}");
    let ts = log_grid(0.01, 1.0, 20);
    let ric = riccati_from_series(&ray, DEFAULT_T0, &ts).unwrap();
    let jac = shape_via_jacobi(&ray, &ts).unwrap();
    for (r, j) in ric.samples.iter().zip(&jac) {
        let d = (&r.s_bar - &j.s_bar).abs().max();
        assert!(d < 1e-7, "t={} {d}", r.t);
        assert!(r.asymmetry(&ray.frame_gram_at(r.t).unwrap()) < 1e-6);
    }
    let prof = mean_curvature_profile(&ric.samples).unwrap();
    assert!(prof.max_residual < 1e-6, "{}", prof.max_residual);
}
