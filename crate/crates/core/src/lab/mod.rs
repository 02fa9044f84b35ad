//! The isoparametric catalog and the verification suites run against it.

pub mod catalog;
pub mod functions;
pub mod report;
pub mod sampling;
pub mod suites;

pub use catalog::{
    build_candidate, cartan_cubic, catalog, circle_control, CaseSpec, CatalogOptions, CmPolynomial,
    IsoparametricCandidate, Side, CASE_NAMES,
};
pub use functions::{
    ambient_points, cartan_munzner_identities, check_isoparametric, check_transnormal, focal_value_gate,
    sample_function, verify_cartan_munzner, FunctionSample,
};
pub use report::{CheckResult, GateResult, Provenance, SampleCounts, VerificationReport};
pub use sampling::{base_parameters, normal_directions, ray_samples, sphere_point, Halton};
pub use suites::{
    austere_on_patch, expansion_fits, find_minimal_hypersurface, gamma_p, normal_curvature_data, profile_grid, run_suite,
    tube_profile_table, verify_austere, verify_curvature_identities, verify_metric_expansion, verify_minimal_focal,
    verify_tube_profile, verify_unique_minimal, ExpansionFit, MinimalSearch, NormalCurvature, ProfileTable, Suite, SuiteOptions,
};
