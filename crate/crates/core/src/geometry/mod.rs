//! Charted manifolds and pointwise curvature.

pub mod curvature;
pub mod manifold;

pub use curvature::{
    christoffel_at, christoffel_fd, curvature_scalars_at, metric_at, riemann_at, riemann_at_f64,
    Christoffel, CurvaturePacket, CurvatureScalars,
};
pub use manifold::{ChartId, ChartPoint, ChartedManifold, MetricChart, CHART_SWITCH_RADIUS};
