//! Mild solutions by Picard iteration on the Duhamel formula, with the
//! constants that certify the contraction.

pub mod constants;
pub mod duhamel;
pub mod forms;
pub mod oracle;
pub mod picard;
pub mod pipeline;

pub use constants::{
    ball_predicates, compute_K1, compute_K2, estimate_adequacy_constants, smallness_ball, smallness_ball_system,
    weight_integral, weight_integral_quadrature, AdequacyConstants, BallPredicates, ConstantsBundle, SystemConstants,
};
pub use duhamel::DuhamelOperator;
pub use forms::{eval_form, eval_form_diagonal, FormKind, NonlinearForm};
pub use oracle::exponential_integrator;
pub use picard::{
    continuous_dependence_probe, fixed_point_residual, linear_states, picard_solve, picard_solve_system,
    trajectory_norms, weighted_semigroup_sup, ConvergenceReport, SolutionTrajectory, SolveOptions,
};
pub use pipeline::{certified_solve, CertifiedRun};
