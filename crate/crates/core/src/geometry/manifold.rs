use serde::Serialize;

use crate::dual::{directional, Dual};
use crate::error::{Error, Result};
use crate::scalar::{lift, norm_sq, Scalar};

/// Index of a coordinate chart within a [`ChartedManifold`].
pub type ChartId = usize;

/// Anything that presents a Riemannian metric on numbered coordinate charts.
///
/// `metric` is generic so the differentiation engine can evaluate it on dual
/// numbers; it returns the row-major `n×n` matrix `g_{ij}(x)`.
pub trait MetricChart: Sync {
    fn dim(&self) -> usize;
    fn metric<S: Scalar>(&self, chart: ChartId, x: &[S]) -> Vec<S>;
    fn in_domain(&self, chart: ChartId, x: &[f64]) -> bool;
}

/// Chart radius beyond which a stereographic chart is abandoned mid-integration.
pub const CHART_SWITCH_RADIUS: f64 = 2.0;
const CHART_DOMAIN_RADIUS: f64 = 8.0;

/// The ambient manifolds of the catalog.
///
/// Points are also representable in a *model space* (the defining embedding:
/// `R^n` itself, `S^n ⊂ R^{n+1}`, `S² × R ⊂ R³ × R`) which is where catalog
/// submanifolds and functions are written down.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChartedManifold {
    /// Flat `R^n`, one identity chart.
    Euclidean { n: usize },
    /// Unit round `S^n` with stereographic charts from the north (0) and
    /// south (1) poles; chart 0's origin is the south pole.
    Sphere { n: usize },
    /// Riemannian product `S²(1) × R`; the sphere factor carries the two
    /// stereographic charts, the last coordinate is the line.
    SphereTimesLine,
}

/// A point together with the chart its coordinates refer to.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChartPoint {
    pub chart: ChartId,
    pub x: Vec<f64>,
}

fn stereo_to_model<S: Scalar>(chart: ChartId, u: &[S]) -> Vec<S> {
    let r2 = norm_sq(u);
    let one = S::one();
    let denom = (one + r2).recip();
    let mut y: Vec<S> = u.iter().map(|&ui| S::from_f64(2.0) * ui * denom).collect();
    let last = if chart == 0 {
        (r2 - one) * denom
    } else {
        (one - r2) * denom
    };
    y.push(last);
    y
}

fn model_to_stereo<S: Scalar>(chart: ChartId, y: &[S]) -> Vec<S> {
    let k = y.len() - 1;
    let d = if chart == 0 {
        S::one() - y[k]
    } else {
        S::one() + y[k]
    };
    let inv = d.recip();
    y[..k].iter().map(|&yi| yi * inv).collect()
}

fn conformal_factor<S: Scalar>(u: &[S]) -> S {
    let s = S::one() + norm_sq(u);
    S::from_f64(4.0) / (s * s)
}

impl ChartedManifold {
    pub fn dim(&self) -> usize {
        match *self {
            ChartedManifold::Euclidean { n } | ChartedManifold::Sphere { n } => n,
            ChartedManifold::SphereTimesLine => 3,
        }
    }

    pub fn model_dim(&self) -> usize {
        match *self {
            ChartedManifold::Euclidean { n } => n,
            ChartedManifold::Sphere { n } => n + 1,
            ChartedManifold::SphereTimesLine => 4,
        }
    }

    pub fn num_charts(&self) -> usize {
        match self {
            ChartedManifold::Euclidean { .. } => 1,
            _ => 2,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            ChartedManifold::Euclidean { n } => format!("R^{n}"),
            ChartedManifold::Sphere { n } => format!("S^{n}"),
            ChartedManifold::SphereTimesLine => "S^2xR".to_string(),
        }
    }

    /// Positive Ricci curvature everywhere.
    pub fn positive_ricci(&self) -> bool {
        matches!(self, ChartedManifold::Sphere { n } if *n >= 2)
    }

    pub fn chart_to_model<S: Scalar>(&self, chart: ChartId, x: &[S]) -> Vec<S> {
        match self {
            ChartedManifold::Euclidean { .. } => x.to_vec(),
            ChartedManifold::Sphere { .. } => stereo_to_model(chart, x),
            ChartedManifold::SphereTimesLine => {
                let mut y = stereo_to_model(chart, &x[..2]);
                y.push(x[2]);
                y
            }
        }
    }

    pub fn model_to_chart<S: Scalar>(&self, chart: ChartId, y: &[S]) -> Vec<S> {
        match self {
            ChartedManifold::Euclidean { .. } => y.to_vec(),
            ChartedManifold::Sphere { .. } => model_to_stereo(chart, y),
            ChartedManifold::SphereTimesLine => {
                let mut x = model_to_stereo(chart, &y[..3]);
                x.push(y[3]);
                x
            }
        }
    }

    /// Coordinate change between charts (the stereographic inversion `u/|u|²`).
    pub fn transition<S: Scalar>(&self, from: ChartId, to: ChartId, x: &[S]) -> Vec<S> {
        if from == to {
            return x.to_vec();
        }
        let invert = |u: &[S]| {
            let inv = norm_sq(u).recip();
            u.iter().map(|&ui| ui * inv).collect::<Vec<S>>()
        };
        match self {
            ChartedManifold::Euclidean { .. } => x.to_vec(),
            ChartedManifold::Sphere { .. } => invert(x),
            ChartedManifold::SphereTimesLine => {
                let mut w = invert(&x[..2]);
                w.push(x[2]);
                w
            }
        }
    }

    /// Chart that represents a model point best (its coordinates have `|u| ≤ 1`).
    pub fn preferred_chart(&self, y: &[f64]) -> ChartId {
        match self {
            ChartedManifold::Euclidean { .. } => 0,
            ChartedManifold::Sphere { n } => usize::from(y[*n] > 0.0),
            ChartedManifold::SphereTimesLine => usize::from(y[2] > 0.0),
        }
    }

    /// The chart to switch to when `x` has drifted past the switching radius.
    pub fn switch_target(&self, chart: ChartId, x: &[f64]) -> Option<ChartId> {
        let r2 = match self {
            ChartedManifold::Euclidean { .. } => return None,
            ChartedManifold::Sphere { .. } => norm_sq(x),
            ChartedManifold::SphereTimesLine => norm_sq(&x[..2]),
        };
        (r2 > CHART_SWITCH_RADIUS * CHART_SWITCH_RADIUS).then_some(1 - chart)
    }

    /// Chart coordinates of a model point in its preferred chart.
    pub fn locate(&self, y: &[f64]) -> ChartPoint {
        let chart = self.preferred_chart(y);
        ChartPoint {
            chart,
            x: self.model_to_chart(chart, y),
        }
    }

    /// Push a chart vector through the transition map.
    pub fn transfer_vector(&self, from: ChartId, to: ChartId, x: &[f64], v: &[f64]) -> Vec<f64> {
        if from == to {
            return v.to_vec();
        }
        directional(x, v, |z: &[Dual<f64>]| self.transition(from, to, z)).1
    }

    /// Push a model-space tangent vector into chart coordinates.
    pub fn model_vector_to_chart<S: Scalar>(&self, chart: ChartId, y: &[S], w: &[S]) -> Vec<S> {
        directional(y, w, |z: &[Dual<S>]| self.model_to_chart(chart, z)).1
    }

    /// Push a chart vector into model space.
    pub fn chart_vector_to_model(&self, chart: ChartId, x: &[f64], v: &[f64]) -> Vec<f64> {
        directional(x, v, |z: &[Dual<f64>]| self.chart_to_model(chart, z)).1
    }

    pub fn check_domain(&self, chart: ChartId, x: &[f64]) -> Result<()> {
        if self.in_domain(chart, x) {
            Ok(())
        } else {
            Err(Error::Domain {
                chart,
                point: x.to_vec(),
            })
        }
    }

    /// Re-express a point in another chart.
    pub fn convert_point(&self, p: &ChartPoint, to: ChartId) -> ChartPoint {
        ChartPoint {
            chart: to,
            x: self.transition(p.chart, to, &p.x),
        }
    }

    pub fn model_point(&self, p: &ChartPoint) -> Vec<f64> {
        self.chart_to_model(p.chart, &p.x)
    }

    /// Origin of the chart as a model point; a convenience for tests.
    pub fn chart_origin(&self, chart: ChartId) -> Vec<f64> {
        self.chart_to_model(chart, &lift::<f64>(&vec![0.0; self.dim()]))
    }
}

impl MetricChart for ChartedManifold {
    fn dim(&self) -> usize {
        ChartedManifold::dim(self)
    }

    fn metric<S: Scalar>(&self, _chart: ChartId, x: &[S]) -> Vec<S> {
        let n = ChartedManifold::dim(self);
        let mut g = vec![S::zero(); n * n];
        match self {
            ChartedManifold::Euclidean { .. } => {
                for i in 0..n {
                    g[i * n + i] = S::one();
                }
            }
            ChartedManifold::Sphere { .. } => {
                let lam = conformal_factor(x);
                for i in 0..n {
                    g[i * n + i] = lam;
                }
            }
            ChartedManifold::SphereTimesLine => {
                let lam = conformal_factor(&x[..2]);
                g[0] = lam;
                g[4] = lam;
                g[8] = S::one();
            }
        }
        g
    }

    fn in_domain(&self, chart: ChartId, x: &[f64]) -> bool {
        if chart >= self.num_charts() || x.len() != ChartedManifold::dim(self) {
            return false;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let lim = CHART_DOMAIN_RADIUS * CHART_DOMAIN_RADIUS;
        match self {
            ChartedManifold::Euclidean { .. } => true,
            ChartedManifold::Sphere { .. } => norm_sq(x) < lim,
            ChartedManifold::SphereTimesLine => norm_sq(&x[..2]) < lim,
        }
    }
}
