//! Modeling and reformulation toolkit for disjunctive optimization.
//!
//! The crate models disjunctions over convex additively separable constraints
//! and builds four mixed-integer formulations of them: big-M, extended and
//! non-extended split formulations, and the extended convex hull for affine
//! disjuncts. A built-in bounded-variable simplex with outer-approximation
//! cuts and branch-and-bound solves the results, so relaxation tightness and
//! node counts can be compared across formulations without an external
//! solver.

pub mod bounds;
pub mod compare;
pub mod flatmip;
mod jsonio;
pub mod model;
pub mod mps;
pub mod partition;
pub mod problems;
pub mod reformulate;
pub mod simplex;
pub mod solver;
pub mod validate;

pub use bounds::{
    alpha_bounds, bigm_from_alpha, check_independent_bounds, propagate_intervals, term_range,
    AlphaBounds, BoundTable, Interval, LayerWeights,
};
pub use flatmip::{formulation_stats, FlatMip, FormulationStats, VarKind, VarTag};
pub use model::{
    BoxDomain, Disjunct, Disjunction, DisjunctiveModel, LambdaCoupling, LinearObjective,
    LinearRow, ModelError, SeparableConstraint, Sense, UnivariateTerm, VarRef,
};
pub use partition::{even_index_partition, Partition, PartitionError};
pub use reformulate::{
    build_bigm, build_hull_extended, build_psplit_extended, build_psplit_nonextended,
    even_partitions, singleton_partitions, NonExtendedOptions, ReformulateError,
};
pub use solver::{branch_and_bound, solve_lp, solve_relaxation, LpResult, LpStatus, SolveOptions, SolveReport, SolveStatus};
