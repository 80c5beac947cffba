//! Generalized Gaussian measures of convex polytopes and the discrete
//! log-Minkowski solver.
//!
//! The library evaluates the density family g_{b,m}, builds Wulff shapes from
//! support numbers, computes the generalized Gaussian volume, surface and
//! cone measures of polytopes, and solves the inverse problem: given a
//! discrete measure on the sphere, find a polytope whose normalized cone
//! measure matches it.

// `!(x > 0.0)` style guards are used on purpose: they reject NaN along with
// the out-of-range sign, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod linalg;
pub mod measures;
pub mod quad;
pub mod roots;
pub mod solver;
pub mod special;

pub use density::{normalization_constant, unit_ball_volume, unit_sphere_area, GGParams};
pub use error::{Error, Result};
pub use geometry::{
    combine_lp, hausdorff_distance, hemisphere_check, radial_function, radii, ray_normal,
    wulff_shape, DirectionSet, DiscreteMeasure, PolytopeGeometry, SupportVector,
};
pub use measures::{
    ball_radius_for_volume, gg_cone_measure, gg_surface_measure, gg_volume, lp_surface_measure,
    mc_surface_oracle, mc_volume_oracle, volume_gradient, McSpec, MeasureVector, VolumeEvaluator,
};
pub use quad::QuadratureSpec;
pub use solver::{
    body_entropy, entropy, entropy_bound_check, euler_lagrange_residual, rescale_to_constraint,
    solve, solve_observed, EntropyBoundAudit, SolveConfig, SolveReport, SolveStatus, TraceRow,
};
