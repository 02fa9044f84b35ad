//! Geodesics, parallel transport and normal rays from submanifolds.

pub mod geodesic;
pub mod ode;
pub mod patch;
pub mod ray;

pub use geodesic::{
    integrate_geodesic, integrate_with_frame, parallel_transport_frame, transport_along_curve,
    GeodesicPath, PathNode, PathState,
};
pub use ode::StepControl;
pub use patch::{InducedMetric, ParamDomain, PatchKind, SubmanifoldPatch};
pub use ray::{
    distance_to_patch, gauss_lemma_residual, normal_exponential, normal_frame_ray,
    normal_frame_ray_with, FermiRay, FootPoint,
};
