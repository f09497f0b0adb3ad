//! Metrizability of path systems as exact linear feasibility.

pub mod farkas;
pub mod linsys;
pub mod simplex;
pub mod solver;
pub mod systems;

pub use linsys::{int, verify_certificate, LinearSystem, Rational, Row, Verdict};
pub use solver::{
    solve_feasibility, solve_with_stats, solver, solver_names, FeasibilitySolver, SolveStats,
    DEFAULT_SOLVER,
};
pub use systems::{
    build_metrizability_system, build_reduced_system, build_symmetrized_system, edge_variable,
    is_metrizable, strong_lemma_verdict, two_step_witness, GeneralSystem, Inequality,
    LemmaVerdict, ReducedSystem, TwoStep,
};
