//! Structure that emerges in the limit ε → 0: tangent spaces and their
//! operations, induced structures, the nonlinearity measure Lin and
//! differentiability of maps between dilatation structures.

mod differentiability;
mod induced;
mod linearity;
mod tangent;

pub use differentiability::{check_affine_map, pansu_derivative, AffineMapSamples};
pub use induced::{induced_structure, InducedStructure};
pub use linearity::{inflin_scan, lin_defect, metric_tangent_scan, plin1_scan, translation_commutation_defect};
pub use tangent::{tangent_dilate, tangent_limit, GroupLawDefects, TangentOp, TangentSpace};
