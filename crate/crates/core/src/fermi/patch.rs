//! Parametrized submanifolds of the catalog ambients.

use serde::Serialize;

use crate::dual::{jet1, jet2};
use crate::error::{Error, Result};
use crate::geometry::curvature::christoffel_at;
use crate::geometry::manifold::{ChartId, ChartedManifold, MetricChart};
use crate::linalg::{bilinear, gram_schmidt};
use crate::scalar::{lift, norm_sq, Scalar};

const FRAME_FLOOR: f64 = 1e-20;

/// Closed-form submanifold families.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum PatchKind {
    /// A single model point (`m = 0`).
    Point { y: Vec<f64> },
    /// `{x_n = 0}` in Euclidean space.
    Hyperplane,
    /// Round circle of the given radius centred at the origin of `R²`.
    Circle { radius: f64 },
    /// Great `k`-sphere spanned by model coordinates `offset..offset+k+1`,
    /// parametrized stereographically.
    GreatSphere { k: usize, offset: usize },
    /// Veronese surface `±(3wwᵀ − I)/√6` of `S⁴`, `w ∈ S²` stereographic.
    Veronese { sign: f64 },
    /// `S² × {0}` inside `S² × R`.
    SphereSlice,
    /// Geodesic of `S² × R` rising at angle `alpha` against the sphere factor.
    TiltedGeodesic { alpha: f64 },
    /// The line `{y} × R` of `S² × R`, `y ∈ S²`.
    VerticalLine { y: Vec<f64> },
}

/// Where parameters are sampled from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ParamDomain {
    None,
    Ball { radius: f64 },
    Cube { half_width: f64 },
    Angle,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubmanifoldPatch {
    pub ambient: ChartedManifold,
    pub kind: PatchKind,
    pub label: String,
}

/// Orthonormal basis of symmetric traceless 3×3 matrices, as rows of `E_i`.
fn veronese_basis<S: Scalar>() -> [[S; 9]; 5] {
    let a = S::from_f64(std::f64::consts::FRAC_1_SQRT_2);
    let b = S::from_f64(1.0 / 6f64.sqrt());
    let z = S::zero();
    [
        [z, a, z, a, z, z, z, z, z],
        [z, z, a, z, z, z, a, z, z],
        [z, z, z, z, z, a, z, a, z],
        [a, z, z, z, -a, z, z, z, z],
        [b, z, z, z, b, z, z, z, S::from_f64(-2.0) * b],
    ]
}

fn sym_coords<S: Scalar>(m: &[S; 9]) -> Vec<S> {
    veronese_basis::<S>()
        .iter()
        .map(|e| e.iter().zip(m).fold(S::zero(), |acc, (x, y)| acc + *x * *y))
        .collect()
}

fn outer<S: Scalar>(a: &[S], b: &[S]) -> [S; 9] {
    let mut m = [S::zero(); 9];
    for i in 0..3 {
        for j in 0..3 {
            m[i * 3 + j] = a[i] * b[j];
        }
    }
    m
}

fn stereo<S: Scalar>(u: &[S]) -> Vec<S> {
    // chart 0 of S^k: origin ↦ (0, …, 0, −1)
    let r2 = norm_sq(u);
    let d = (S::one() + r2).recip();
    let mut y: Vec<S> = u.iter().map(|&x| S::from_f64(2.0) * x * d).collect();
    y.push((r2 - S::one()) * d);
    y
}

/// `a, b`: the normalized stereographic coordinate directions at `w(u)`.
fn stereo_tangents<S: Scalar>(u: &[S]) -> (Vec<S>, Vec<S>) {
    let r2 = norm_sq(u);
    let d = (S::one() + r2).recip();
    let two = S::from_f64(2.0);
    // ∂w/∂u_i has length 2/(1+r²); scaled by (1+r²)/2
    let col = |i: usize| -> Vec<S> {
        let mut v: Vec<S> = (0..2)
            .map(|j| {
                let delta = if i == j { S::one() } else { S::zero() };
                delta - two * u[i] * u[j] * d
            })
            .collect();
        v.push(two * u[i] * d);
        v
    };
    (col(0), col(1))
}

impl SubmanifoldPatch {
    pub fn new(ambient: ChartedManifold, kind: PatchKind, label: impl Into<String>) -> Self {
        SubmanifoldPatch {
            ambient,
            kind,
            label: label.into(),
        }
    }

    /// Intrinsic dimension `m`.
    pub fn dim(&self) -> usize {
        match &self.kind {
            PatchKind::Point { .. } => 0,
            PatchKind::Hyperplane => self.ambient.dim() - 1,
            PatchKind::Circle { .. } | PatchKind::TiltedGeodesic { .. } | PatchKind::VerticalLine { .. } => 1,
            PatchKind::GreatSphere { k, .. } => *k,
            PatchKind::Veronese { .. } | PatchKind::SphereSlice => 2,
        }
    }

    pub fn codim(&self) -> usize {
        self.ambient.dim() - self.dim()
    }

    pub fn param_domain(&self) -> ParamDomain {
        match &self.kind {
            PatchKind::Point { .. } => ParamDomain::None,
            PatchKind::Hyperplane => ParamDomain::Cube { half_width: 1.0 },
            PatchKind::TiltedGeodesic { .. } | PatchKind::VerticalLine { .. } => ParamDomain::Cube { half_width: 1.0 },
            PatchKind::Circle { .. } => ParamDomain::Angle,
            PatchKind::GreatSphere { .. } | PatchKind::Veronese { .. } | PatchKind::SphereSlice => {
                ParamDomain::Ball { radius: 1.5 }
            }
        }
    }

    /// Map a point of the unit cube `[0,1)^m` onto the parameter domain.
    pub fn param_from_unit(&self, s: &[f64]) -> Vec<f64> {
        let m = self.dim();
        match self.param_domain() {
            ParamDomain::None => Vec::new(),
            ParamDomain::Angle => vec![std::f64::consts::TAU * s[0]],
            ParamDomain::Cube { half_width } => s.iter().map(|x| half_width * (2.0 * x - 1.0)).collect(),
            ParamDomain::Ball { radius } if m == 1 => vec![radius * (2.0 * s[0] - 1.0)],
            ParamDomain::Ball { radius } if m == 2 => {
                let r = radius * s[0].sqrt();
                let a = std::f64::consts::TAU * s[1];
                vec![r * a.cos(), r * a.sin()]
            }
            ParamDomain::Ball { radius } => {
                let c = radius / (m as f64).sqrt();
                s.iter().map(|x| c * (2.0 * x - 1.0)).collect()
            }
        }
    }

    /// The embedding into the ambient model space.
    pub fn model_point<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let nm = self.ambient.model_dim();
        match &self.kind {
            PatchKind::Point { y } => lift(y),
            PatchKind::Hyperplane => {
                let mut y = u.to_vec();
                y.push(S::zero());
                y
            }
            PatchKind::Circle { radius } => {
                let r = S::from_f64(*radius);
                vec![r * u[0].cos(), r * u[0].sin()]
            }
            PatchKind::GreatSphere { offset, .. } => {
                let mut y = vec![S::zero(); nm];
                for (i, z) in stereo(u).into_iter().enumerate() {
                    y[offset + i] = z;
                }
                y
            }
            PatchKind::Veronese { sign } => {
                let w = stereo(u);
                let mut x = outer(&w, &w);
                let c = S::from_f64(sign / 6f64.sqrt());
                for (i, e) in x.iter_mut().enumerate() {
                    let delta = if i % 4 == 0 { S::one() } else { S::zero() };
                    *e = c * (S::from_f64(3.0) * *e - delta);
                }
                sym_coords(&x)
            }
            PatchKind::SphereSlice => {
                let mut y = stereo(u);
                y.push(S::zero());
                y
            }
            PatchKind::TiltedGeodesic { alpha } => {
                let th = u[0] * S::from_f64(alpha.cos());
                vec![th.cos(), th.sin(), S::zero(), u[0] * S::from_f64(alpha.sin())]
            }
            PatchKind::VerticalLine { y } => vec![S::from_f64(y[0]), S::from_f64(y[1]), S::from_f64(y[2]), u[0]],
        }
    }

    /// Model-space vectors spanning the normal space, tangent to the ambient.
    pub fn model_normals<S: Scalar>(&self, u: &[S]) -> Vec<Vec<S>> {
        let nm = self.ambient.model_dim();
        let unit = |i: usize| {
            let mut e = vec![S::zero(); nm];
            e[i] = S::one();
            e
        };
        match &self.kind {
            PatchKind::Point { y } => self.ambient_tangent_basis(y).into_iter().map(|v| lift(&v)).collect(),
            PatchKind::Hyperplane => vec![unit(nm - 1)],
            PatchKind::Circle { .. } => vec![vec![u[0].cos(), u[0].sin()]],
            PatchKind::GreatSphere { k, offset } => (0..nm)
                .filter(|i| *i < *offset || *i > offset + k)
                .map(unit)
                .collect(),
            PatchKind::Veronese { .. } => {
                let (a, b) = stereo_tangents(u);
                let (na, nb) = (norm_sq(&a).sqrt().recip(), norm_sq(&b).sqrt().recip());
                let a: Vec<S> = a.into_iter().map(|x| x * na).collect();
                let b: Vec<S> = b.into_iter().map(|x| x * nb).collect();
                let s = S::from_f64(std::f64::consts::FRAC_1_SQRT_2);
                let (aa, bb, ab, ba) = (outer(&a, &a), outer(&b, &b), outer(&a, &b), outer(&b, &a));
                let mut n1 = [S::zero(); 9];
                let mut n2 = [S::zero(); 9];
                for i in 0..9 {
                    n1[i] = s * (aa[i] - bb[i]);
                    n2[i] = s * (ab[i] + ba[i]);
                }
                vec![sym_coords(&n1), sym_coords(&n2)]
            }
            PatchKind::SphereSlice => vec![unit(3)],
            PatchKind::TiltedGeodesic { alpha } => {
                let th = u[0] * S::from_f64(alpha.cos());
                let (sa, ca) = (S::from_f64(alpha.sin()), S::from_f64(alpha.cos()));
                vec![unit(2), vec![-th.sin() * sa, th.cos() * sa, S::zero(), -ca]]
            }
            PatchKind::VerticalLine { y } => {
                let mut full = y.clone();
                full.push(0.0);
                // the sphere-factor part of the ambient tangent basis
                self.ambient_tangent_basis(&full)
                    .into_iter()
                    .filter(|w| w[3].abs() < 0.5)
                    .map(|w| lift(&w))
                    .collect()
            }
        }
    }

    /// Orthonormal model-space basis of the ambient tangent space at `y`,
    /// obtained from the coordinate axes; the most degenerate axes are dropped
    /// (lowest index wins ties).
    pub fn ambient_tangent_basis(&self, y: &[f64]) -> Vec<Vec<f64>> {
        let nm = self.ambient.model_dim();
        let n = self.ambient.dim();
        let project = |w: Vec<f64>| -> Vec<f64> {
            match self.ambient {
                ChartedManifold::Euclidean { .. } => w,
                ChartedManifold::Sphere { .. } => {
                    let c: f64 = w.iter().zip(y).map(|(a, b)| a * b).sum();
                    w.iter().zip(y).map(|(a, b)| a - c * b).collect()
                }
                ChartedManifold::SphereTimesLine => {
                    let c: f64 = (0..3).map(|i| w[i] * y[i]).sum();
                    let mut out = w.clone();
                    for i in 0..3 {
                        out[i] -= c * y[i];
                    }
                    out
                }
            }
        };
        let projected: Vec<Vec<f64>> = (0..nm)
            .map(|i| {
                let mut e = vec![0.0; nm];
                e[i] = 1.0;
                project(e)
            })
            .collect();
        let mut order: Vec<usize> = (0..nm).collect();
        order.sort_by(|&a, &b| norm_sq(&projected[b]).total_cmp(&norm_sq(&projected[a])).then(a.cmp(&b)));
        let mut keep: Vec<usize> = order[..n].to_vec();
        keep.sort_unstable();
        let eye: Vec<f64> = (0..nm * nm).map(|i| if i % (nm + 1) == 0 { 1.0 } else { 0.0 }).collect();
        let chosen: Vec<Vec<f64>> = keep.into_iter().map(|i| projected[i].clone()).collect();
        gram_schmidt(&eye, &chosen, 1e-24).unwrap_or_default()
    }

    /// Chart used for everything local to the parameter `u`.
    pub fn chart_for(&self, u: &[f64]) -> ChartId {
        self.ambient.preferred_chart(&self.model_point(u))
    }

    /// The embedding in chart coordinates.
    pub fn param<S: Scalar>(&self, chart: ChartId, u: &[S]) -> Vec<S> {
        self.ambient.model_to_chart(chart, &self.model_point(u))
    }

    pub fn param_in_domain(&self, u: &[f64]) -> bool {
        u.len() == self.dim() && u.iter().all(|x| x.is_finite()) && norm_sq(u) < 64.0
    }

    /// Columns of the Jacobian of `param`: `∂x_a` as chart vectors.
    pub fn tangent_frame<S: Scalar>(&self, chart: ChartId, u: &[S]) -> Vec<Vec<S>> {
        jet1(u, |z| self.param(chart, z)).d1
    }

    /// `g`-orthonormal normal frame `E_{m+1}, …, E_n` from the catalog normals,
    /// orthogonalized against the tangent space.
    pub fn normal_frame<S: Scalar>(&self, chart: ChartId, u: &[S]) -> Result<Vec<Vec<S>>> {
        let tangents = self.tangent_frame(chart, u);
        let x = self.param(chart, u);
        let g = self.ambient.metric(chart, &x);
        let y = self.model_point(u);
        let mut vecs = tangents;
        for w in self.model_normals(u) {
            vecs.push(self.ambient.model_vector_to_chart(chart, &y, &w));
        }
        let on = gram_schmidt(&g, &vecs, FRAME_FLOOR).ok_or_else(|| Error::ImmersionFailure {
            u: u.iter().map(|v| v.re()).collect(),
        })?;
        Ok(on[self.dim()..].to_vec())
    }

    /// Induced metric `h_ab = ⟨∂x_a, ∂x_b⟩`.
    pub fn induced_metric<S: Scalar>(&self, chart: ChartId, u: &[S]) -> Vec<S> {
        let m = self.dim();
        let t = self.tangent_frame(chart, u);
        let x = self.param(chart, u);
        let g = self.ambient.metric(chart, &x);
        let mut h = vec![S::zero(); m * m];
        for a in 0..m {
            for b in 0..m {
                h[a * m + b] = bilinear(&g, &t[a], &t[b]);
            }
        }
        h
    }

    /// Coefficients `c_α` with `e_α = Σ_a c_α[a] ∂x_a` orthonormal (Gram–Schmidt
    /// of the coordinate directions in the induced metric).
    pub fn orthonormal_tangent_coefficients(&self, chart: ChartId, u: &[f64]) -> Result<Vec<Vec<f64>>> {
        let m = self.dim();
        let h = self.induced_metric(chart, u);
        let axes: Vec<Vec<f64>> = (0..m)
            .map(|a| (0..m).map(|b| if a == b { 1.0 } else { 0.0 }).collect())
            .collect();
        gram_schmidt(&h, &axes, 1e-24).ok_or_else(|| Error::ImmersionFailure { u: u.to_vec() })
    }

    /// `II_ab = ⟨∇_{∂a} ∂b, v⟩` for a chart vector `v` at `param(u)`.
    pub fn second_fundamental_form(&self, chart: ChartId, u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let m = self.dim();
        let jet = jet2(u, |z| self.param(chart, z));
        let x = jet.value.clone();
        let g = metric_checked(&self.ambient, chart, &x)?;
        let gamma = christoffel_at::<_, f64>(&self.ambient, chart, &x)?;
        let mut ii = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                let corr = gamma.contract(&jet.d1[a], &jet.d1[b]);
                let acc: Vec<f64> = jet.d2[a][b].iter().zip(&corr).map(|(p, q)| p + q).collect();
                ii[a * m + b] = bilinear(&g, &acc, v);
            }
        }
        Ok(ii)
    }
}

fn metric_checked(m: &ChartedManifold, chart: ChartId, x: &[f64]) -> Result<Vec<f64>> {
    crate::geometry::curvature::metric_at(m, chart, x)
}

/// The patch's induced metric as a chart of its own (intrinsic geometry of `P`).
#[derive(Clone, Copy, Debug)]
pub struct InducedMetric<'a> {
    pub patch: &'a SubmanifoldPatch,
    pub chart: ChartId,
}

impl MetricChart for InducedMetric<'_> {
    fn dim(&self) -> usize {
        self.patch.dim()
    }

    fn metric<S: Scalar>(&self, _chart: ChartId, u: &[S]) -> Vec<S> {
        self.patch.induced_metric(self.chart, u)
    }

    fn in_domain(&self, _chart: ChartId, u: &[f64]) -> bool {
        self.patch.param_in_domain(u)
            && self
                .patch
                .ambient
                .in_domain(self.chart, &self.patch.param(self.chart, u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn veronese() -> SubmanifoldPatch {
        SubmanifoldPatch::new(ChartedManifold::Sphere { n: 4 }, PatchKind::Veronese { sign: 1.0 }, "veronese")
    }

    #[test]
    fn veronese_lies_on_unit_sphere_with_orthonormal_normals() {
        let p = veronese();
        let u = [0.3f64, -0.6];
        let y = p.model_point(&u);
        assert!((norm_sq(&y) - 1.0).abs() < 1e-14);
        let ns = p.model_normals(&u);
        let jac = jet1(&u, |z| p.model_point(z)).d1;
        for a in &ns {
            let dy: f64 = a.iter().zip(&y).map(|(p, q)| p * q).sum();
            assert!(dy.abs() < 1e-14);
            for t in &jac {
                let d: f64 = a.iter().zip(t).map(|(p, q)| p * q).sum();
                assert!(d.abs() < 1e-13);
            }
            assert!((norm_sq(a) - 1.0).abs() < 1e-13);
        }
        let d: f64 = ns[0].iter().zip(&ns[1]).map(|(p, q)| p * q).sum();
        assert!(d.abs() < 1e-14);
    }

    #[test]
    fn normal_frame_is_orthonormal_and_normal() {
        let p = veronese();
        let u = [0.2f64, 0.9];
        let c = p.chart_for(&u);
        let x = p.param(c, &u);
        let g = p.ambient.metric(c, &x);
        let ns = p.normal_frame(c, &u).unwrap();
        let ts = p.tangent_frame(c, &u);
        assert_eq!(ns.len(), 2);
        for (i, a) in ns.iter().enumerate() {
            for t in &ts {
                assert!(bilinear(&g, a, t).abs() < 1e-12);
            }
            for (j, b) in ns.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((bilinear(&g, a, b) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn point_patch_normals_span_ambient() {
        let p = SubmanifoldPatch::new(
            ChartedManifold::Sphere { n: 3 },
            PatchKind::Point { y: vec![0.0, 0.0, 0.0, 1.0] },
            "north",
        );
        let ns = p.normal_frame(p.chart_for(&[]), &[] as &[f64]).unwrap();
        assert_eq!(ns.len(), 3);
    }

    #[test]
    fn induced_metric_of_great_sphere_is_round() {
        let s4 = ChartedManifold::Sphere { n: 4 };
        let p = SubmanifoldPatch::new(s4, PatchKind::GreatSphere { k: 2, offset: 0 }, "great S2");
        let u = [0.4f64, 0.1];
        let h = p.induced_metric(p.chart_for(&u), &u);
        let lam = 4.0 / (1.0 + norm_sq(&u)).powi(2);
        assert!((h[0] - lam).abs() < 1e-13 && h[1].abs() < 1e-13 && (h[3] - lam).abs() < 1e-13);
    }
}
