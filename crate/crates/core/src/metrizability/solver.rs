//! Named feasibility solvers behind one interface.

use crate::{Error, Result};

use super::linsys::{LinearSystem, Verdict};
use super::{farkas, simplex};

/// Statistics from one solver run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub rows_in: usize,
    pub rows_used: usize,
    pub pivots: u64,
}

/// An exact decision procedure for `Σ c x ≥ d` systems over free rational
/// variables.
pub trait FeasibilitySolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, sys: &LinearSystem) -> (Verdict, SolveStats);
}

/// Phase one on the Farkas alternative, with row generation.
#[derive(Debug, Default, Clone, Copy)]
pub struct FarkasDual;

impl FeasibilitySolver for FarkasDual {
    fn name(&self) -> &'static str {
        "farkas-dual"
    }

    fn solve(&self, sys: &LinearSystem) -> (Verdict, SolveStats) {
        farkas::solve(sys)
    }
}

/// Bounded-variable primal simplex with Bland's rule.
#[derive(Debug, Default, Clone, Copy)]
pub struct BoundedPrimal;

impl FeasibilitySolver for BoundedPrimal {
    fn name(&self) -> &'static str {
        "bounded-primal"
    }

    fn solve(&self, sys: &LinearSystem) -> (Verdict, SolveStats) {
        simplex::solve(sys)
    }
}

pub const DEFAULT_SOLVER: &str = "farkas-dual";

pub fn solver_names() -> Vec<&'static str> {
    registry().iter().map(|s| s.name()).collect()
}

fn registry() -> [&'static dyn FeasibilitySolver; 2] {
    [&FarkasDual, &BoundedPrimal]
}

pub fn solver(name: &str) -> Result<&'static dyn FeasibilitySolver> {
    registry()
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| Error::UnknownStrategy {
            kind: "solver",
            name: name.into(),
        })
}

/// Decides feasibility exactly with the default solver. Never uses
/// floating point.
pub fn solve_feasibility(sys: &LinearSystem) -> Verdict {
    solve_with_stats(sys).0
}

pub fn solve_with_stats(sys: &LinearSystem) -> (Verdict, SolveStats) {
    FarkasDual.solve(sys)
}
