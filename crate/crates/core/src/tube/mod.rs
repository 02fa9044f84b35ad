//! Shape operators of the tubes around a submanifold: Riccati integration,
//! the Jacobi-field oracle, small-`t` expansions and branch tracking.

pub mod branches;
pub mod expansion;
pub mod riccati;
pub mod sample;
pub mod series;

pub use branches::{
    extrapolate_to_zero, mean_curvature_profile, track_eigen_branches, Branch, BranchKind, BranchRecord, Profile,
    ProfileRow, AMBIGUITY_GAP,
};
pub use expansion::{
    fermi_metric, fit_remainder, log_grid, metric_model, validate_metric_expansion, validate_series, SlopeFit,
};
pub use riccati::{
    coordinate_frame_shape, integrate_riccati, jacobi_fields, riccati_from_series, seed_sensitivity,
    shape_via_jacobi, JacobiState, RiccatiRun, BLOW_UP, DEFAULT_T0,
};
pub use sample::{ShapeMethod, ShapeSample};
pub use series::{riccati_seed, series_seed, shape_of_submanifold, SeriesCoefficients};
