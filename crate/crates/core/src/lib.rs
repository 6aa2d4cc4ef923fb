//! Dilatation structures on metric spaces.
//!
//! The crate is organised in layers:
//! - [`scale`], [`structure`] and [`harness`]: scale groups, the
//!   dilatation-structure interface with its operator calculus, and numeric
//!   verification of the axioms over ε grids;
//! - [`models`]: Euclidean space, Heisenberg and Carnot groups, the dyadic
//!   tree boundary, the ℂ × ℝ group and chart pullbacks;
//! - [`emergent`]: tangent spaces, induced structures, the nonlinearity
//!   measure Lin and differentiability;
//! - [`affine`]: Menelaos fixed points, ratio functions, collinear triples
//!   and barycentric checks.

pub mod affine;
pub mod dd;
pub mod emergent;
pub mod error;
pub mod harness;
pub mod models;
pub mod qd;
pub mod report;
pub mod scale;
pub mod structure;

pub use dd::Dd;
pub use error::{LabError, Result};
pub use harness::{verify_axiom, Axiom, Region, SweepConfig};
pub use report::{ConvergenceReport, Verdict};
pub use scale::{ComplexScale, DyadicPower, EpsGrid, PositiveReal, Scale};
pub use structure::{
    approx_difference, approx_inverse, approx_sum, estimate_dx, rescaled_distance, DilatationStructure, DomainConstants,
};
