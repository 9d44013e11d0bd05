//! Logarithmic double layer potentials on Král curves: curve geometry,
//! argument branches, densities, potentials and bound functionals for the
//! modulus of continuity of their boundary extensions.

// negated comparisons are the NaN-rejecting form of the argument checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arg_branch;
pub mod densities;
pub mod error;
pub mod geometry;
pub mod moduli_bounds;
mod parse;
pub mod potentials;
pub mod quadrature;

pub use arg_branch::{
    arg_branch, arg_variation, kral_variation_sup, stieltjes_arg_integral, stieltjes_limit, ArgBranch,
};
pub use densities::{parse_density_spec, Density, Majorant};
pub use error::{Error, Result};
pub use geometry::{build_curve, JordanCurve};
pub use moduli_bounds::{BoundReport, ClosureGrid};
pub use potentials::{DomainSide, PotentialField};
