//! Randomized invariants of the geometry and transport layers.

use std::f64::consts::TAU;

use proptest::prelude::*;
use tubegeo::{
    christoffel_at, christoffel_fd, distance_to_patch, gauss_lemma_residual, integrate_geodesic, integrate_with_frame,
    normal_frame_ray, riemann_at, shape_of_submanifold, transport_along_curve, ChartPoint, ChartedManifold,
    MetricChart, PatchKind, StepControl, SubmanifoldPatch,
};

const MANIFOLDS: [ChartedManifold; 4] = [
    ChartedManifold::Euclidean { n: 3 },
    ChartedManifold::Sphere { n: 2 },
    ChartedManifold::Sphere { n: 4 },
    ChartedManifold::SphereTimesLine,
];

fn chart_point() -> impl Strategy<Value = (ChartedManifold, usize, Vec<f64>)> {
    (0..MANIFOLDS.len(), 0usize..2, prop::collection::vec(-1.5f64..1.5, 5)).prop_map(|(i, c, raw)| {
        let m = MANIFOLDS[i];
        let chart = c % m.num_charts();
        (m, chart, raw[..m.dim()].to_vec())
    })
}

fn vectors(k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 5), k)
}

fn ip(g: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| g[i * n + j] * a[i] * b[j]).sum::<f64>()).sum()
}

fn unit(g: &[f64], v: &[f64]) -> Vec<f64> {
    let s = ip(g, v, v).sqrt();
    v.iter().map(|x| x / s).collect()
}

fn non_degenerate(g: &[f64], a: &[f64], b: &[f64]) -> bool {
    let area = ip(g, a, a) * ip(g, b, b) - ip(g, a, b).powi(2);
    area > 1e-3 * ip(g, a, a) * ip(g, b, b)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn metric_is_symmetric((m, chart, x) in chart_point()) {
        let n = m.dim();
        let g = m.metric(chart, &x);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((g[i * n + j] - g[j * n + i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn connection_is_metric_compatible((m, chart, x) in chart_point()) {
        // ∂_k g_ij = Γ^l_ki g_lj + Γ^l_kj g_il, with ∂g from central differences
        let n = m.dim();
        let gamma = christoffel_at::<_, f64>(&m, chart, &x).unwrap();
        let g = m.metric(chart, &x);
        let h = 1e-5;
        for k in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let (gp, gm) = (m.metric(chart, &xp), m.metric(chart, &xm));
            for i in 0..n {
                for j in 0..n {
                    let dg = (gp[i * n + j] - gm[i * n + j]) / (2.0 * h);
                    let conn: f64 = (0..n)
                        .map(|l| gamma.get(l, k, i) * g[l * n + j] + gamma.get(l, k, j) * g[i * n + l])
                        .sum();
                    prop_assert!((dg - conn).abs() < 1e-6, "k={k} i={i} j={j}: {dg} vs {conn}");
                }
            }
        }
    }

    #[test]
    fn dual_and_difference_christoffels_agree((m, chart, x) in chart_point()) {
        let a = christoffel_at::<_, f64>(&m, chart, &x).unwrap();
        let b = christoffel_fd(&m, chart, &x).unwrap();
        for (p, q) in a.data.iter().zip(&b.data) {
            prop_assert!((p - q).abs() < 1e-6, "{p} vs {q}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn first_bianchi_identity((m, chart, x) in chart_point(), vs in vectors(4)) {
        let n = m.dim();
        let r = riemann_at::<_, f64>(&m, chart, &x).unwrap();
        let [a, b, c, d] = [0, 1, 2, 3].map(|i| vs[i][..n].to_vec());
        let cyc = r.curvature_form(&a, &b, &c, &d) + r.curvature_form(&b, &c, &a, &d) + r.curvature_form(&c, &a, &b, &d);
        prop_assert!(cyc.abs() < 1e-8, "cyclic sum {cyc}");
        // pair symmetries of the lowered tensor
        let s1 = r.curvature_form(&a, &b, &c, &d) + r.curvature_form(&b, &a, &c, &d);
        let s2 = r.curvature_form(&a, &b, &c, &d) - r.curvature_form(&c, &d, &a, &b);
        prop_assert!(s1.abs() < 1e-8 && s2.abs() < 1e-8);
    }

    #[test]
    fn unit_sphere_curvature_anchor(chart in 0usize..2, raw in prop::collection::vec(-1.5f64..1.5, 2), vs in vectors(2)) {
        let m = ChartedManifold::Sphere { n: 2 };
        let r = riemann_at::<_, f64>(&m, chart, &raw).unwrap();
        let g = m.metric(chart, &raw);
        let (v, w) = (vs[0][..2].to_vec(), vs[1][..2].to_vec());
        prop_assume!(non_degenerate(&g, &v, &w));
        // orthonormalize in g
        let v = unit(&g, &v);
        let p = ip(&g, &w, &v);
        let u = unit(&g, &w.iter().zip(&v).map(|(a, b)| a - p * b).collect::<Vec<_>>());
        let k = r.curvature_form(&v, &u, &v, &u);
        prop_assert!((k - 1.0).abs() < 1e-6, "⟨R(v,u)v,u⟩ = {k}");
    }

    #[test]
    fn shape_operator_is_linear_in_the_normal(a in -1.0f64..1.0, b in -1.0f64..1.0, s in prop::collection::vec(0.05f64..0.95, 2)) {
        let patch = SubmanifoldPatch::new(ChartedManifold::Sphere { n: 4 }, PatchKind::Veronese { sign: 1.0 }, "veronese");
        let u = patch.param_from_unit(&s);
        let t1 = shape_of_submanifold(&patch, &u, &[1.0, 0.0]).unwrap();
        let t2 = shape_of_submanifold(&patch, &u, &[0.0, 1.0]).unwrap();
        let t = shape_of_submanifold(&patch, &u, &[a, b]).unwrap();
        let diff = (&t - (&t1 * a + &t2 * b)).abs().max();
        prop_assert!(diff < 1e-10, "{diff}");
        prop_assert!((&t - t.transpose()).abs().max() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, ..ProptestConfig::default() })]

    #[test]
    fn geodesics_keep_speed_and_reverse((m, chart, x) in chart_point(), vs in vectors(1), len in 0.3f64..2.0) {
        let n = m.dim();
        let x: Vec<f64> = x.iter().map(|v| v * 0.6).collect();
        let g = m.metric(chart, &x);
        let w = unit(&g, &vs[0][..n]);
        let start = ChartPoint { chart, x: x.clone() };
        let path = integrate_geodesic(&m, &start, &w, len, 1e-3).unwrap();
        prop_assert!(path.speed_drift() < 1e-8, "speed drift {}", path.speed_drift());
        let end = path.end_state();
        let back: Vec<f64> = end.velocity.iter().map(|v| -v).collect();
        let ret = integrate_geodesic(&m, &ChartPoint { chart: end.chart, x: end.x.clone() }, &back, len, 1e-3).unwrap();
        let fin = ret.end_state();
        let home = m.transition(fin.chart, chart, &fin.x);
        let err = home.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-6, "return error {err}");
    }

    #[test]
    fn transport_preserves_inner_products((m, chart, x) in chart_point(), vs in vectors(3), len in 0.3f64..2.0) {
        let n = m.dim();
        let x: Vec<f64> = x.iter().map(|v| v * 0.6).collect();
        let g = m.metric(chart, &x);
        let w = unit(&g, &vs[0][..n]);
        let frame: Vec<Vec<f64>> = vs[1..].iter().map(|v| v[..n].to_vec()).collect();
        let path = integrate_with_frame(&m, &ChartPoint { chart, x }, &w, &frame, len, StepControl::default()).unwrap();
        prop_assert!(path.frame_gram_drift() < 1e-7, "gram drift {}", path.frame_gram_drift());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn distance_gradient_is_the_ray_velocity(s in prop::collection::vec(0.1f64..0.9, 2), angle in 0.0f64..TAU, t in 0.2f64..0.6) {
        let patch = SubmanifoldPatch::new(ChartedManifold::Sphere { n: 4 }, PatchKind::Veronese { sign: 1.0 }, "veronese");
        let u = patch.param_from_unit(&s);
        let ray = normal_frame_ray(&patch, &u, &[angle.cos(), angle.sin()], t, 1e-3).unwrap();
        let r = gauss_lemma_residual(&ray, t, 1e-4).unwrap();
        prop_assert!(r < 1e-5, "Gauss lemma residual {r}");
    }
}

#[test]
fn distance_oracle_recovers_the_ray_parameter() {
    let patch = SubmanifoldPatch::new(ChartedManifold::Sphere { n: 4 }, PatchKind::Veronese { sign: 1.0 }, "veronese");
    let u = patch.param_from_unit(&[0.3, 0.7]);
    let v = [0.6, 0.8];
    let ray = normal_frame_ray(&patch, &u, &v, 0.5, 1e-3).unwrap();
    let s = ray.state_at(0.5).unwrap();
    let guess: Vec<f64> = v.iter().map(|c| c * 0.45).collect();
    let foot = distance_to_patch(
        &patch,
        &ChartPoint { chart: s.chart, x: s.x },
        &u.iter().map(|x| x + 0.01).collect::<Vec<_>>(),
        &guess,
        StepControl::default(),
    )
    .unwrap();
    assert!((foot.sigma - 0.5).abs() < 1e-8, "sigma {}", foot.sigma);
}

/// Transport around a latitude circle of the unit 2-sphere rotates vectors by
/// the enclosed area (Gauss–Bonnet with `K = 1`).
#[test]
fn holonomy_of_latitude_circles() {
    let m = ChartedManifold::Sphere { n: 2 };
    for polar in [0.3f64, 0.8, 1.2] {
        // chart 0 is centred at the south pole; polar angle θ ↦ radius tan(θ/2)
        let r = (polar / 2.0).tan();
        let curve = |s: f64| (vec![r * s.cos(), r * s.sin()], vec![-r * s.sin(), r * s.cos()]);
        let x0 = vec![r, 0.0];
        let g = m.metric(0, &x0);
        let e1 = unit(&g, &[1.0, 0.0]);
        let e2 = unit(&g, &[0.0, 1.0]);
        let out = transport_along_curve(&m, 0, curve, &[e1.clone()], 0.0, TAU, StepControl::with_step(1e-3)).unwrap();
        let (c, s) = (ip(&g, &out[0], &e1), ip(&g, &out[0], &e2));
        let area = TAU * (1.0 - polar.cos());
        // counterclockwise about the outward normal at the south pole is clockwise seen from outside
        let angle = s.atan2(c);
        let expected = [area, -area];
        let err = expected
            .iter()
            .map(|a| {
                let d = (angle - a).rem_euclid(TAU);
                d.min(TAU - d)
            })
            .fold(f64::INFINITY, f64::min);
        assert!(err < 1e-7, "polar {polar}: rotation {angle} vs ±{area}");
        assert!((c * c + s * s - 1.0).abs() < 1e-9);
    }
}
