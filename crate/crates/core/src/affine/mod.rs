//! The noncommutative affine layer: Menelaos fixed points, the inversion of
//! h_ε by g_ε, ratio points, collinear triples and barycentric analysis.

mod barycentric;
mod collinear;
mod counterexample;
mod inversion;
mod menelaos;

pub use barycentric::{
    barycentric_defect, collinearity_defect, distance_estimates_check, dyadic_barycentric_defect, DistanceEstimates,
};
pub use collinear::{
    asymmetry_search, check_collinear, geometric_affinity_check, probe_set, sample_collinear_triples, AsymmetrySearch,
    CollinearTriple,
};
pub use counterexample::{counterexample_check, dilatation_search, translation_defect};
pub use inversion::{g_map, h_map, heisenberg_ratio_closed_form, ratio_point, Truncated};
pub use menelaos::{banach_oracle, menelaos_iterate, MenelaosResult, DEFAULT_MAX_ITER};
