//! Discontinuous Galerkin boundary elements for the combined-field equations.

mod assembly;
mod condition;
mod mesh;
mod solve;
pub(crate) mod space;

pub use assembly::{assemble, assemble_many, default_quad_order, AssemblyOptions, GalerkinSystem, MAX_HK};
pub use condition::{estimate_qo_condition_norm, ConditionEstimate, ConditionOptions, Projector};
pub use mesh::Mesh;
pub use solve::{solve_galerkin, SolveReport, PIVOT_GROWTH_LIMIT};
pub use space::{BoundarySpace, DensityVector, Target};
