//! Named checks, run in registry order. Each command has its own input
//! type and registry; heavy checks run only when requested.

use std::fmt::Write as _;

use pathsys_core::graph::Graph;
use pathsys_core::metrizability::{
    build_metrizability_system, build_reduced_system, build_symmetrized_system,
    strong_lemma_verdict, verify_certificate, FeasibilitySolver, LinearSystem, Verdict,
};
use pathsys_core::numtheory::PrimeField;
use pathsys_core::pathsys::PathSystem;
use pathsys_core::reducibility::{
    translates_are_reductions, verify_reduction, ReductionSearch, SearchOptions, SearchOutcome,
};
use pathsys_core::Error;

use crate::report::sha256_hex;

/// Result of one check.
pub enum Finding {
    Done { verdict: String, artifact: String },
    /// The check ran out of budget before deciding.
    Exhausted { artifact: String },
}

fn done(verdict: impl Into<String>, artifact: impl Into<String>) -> Finding {
    Finding::Done {
        verdict: verdict.into(),
        artifact: artifact.into(),
    }
}

pub trait Check<Input>: Sync {
    fn name(&self) -> &'static str;
    /// Heavy checks only run when explicitly enabled.
    fn heavy(&self) -> bool {
        false
    }
    fn run(&self, input: &Input) -> Result<Finding, Error>;
}

/// Shared settings for checks that solve or search.
pub struct Engines {
    pub solver: &'static dyn FeasibilitySolver,
    pub search: &'static dyn ReductionSearch,
    pub budget: u64,
}

pub struct PaleyInput {
    pub pf: PrimeField,
    pub ps: PathSystem,
    pub engines: Engines,
}

pub struct SystemInput {
    pub ps: PathSystem,
    pub engines: Engines,
    /// Filled by the metrizability check for certificate dumps.
    pub lp: std::sync::Mutex<Option<(LinearSystem, Verdict)>>,
}

/// Solves, re-verifies, and summarizes the verdict with a digest of its
/// text form so the dump can be matched to the report.
fn solve_and_summarize(
    solver: &dyn FeasibilitySolver,
    sys: &LinearSystem,
    yes: &str,
    no: &str,
) -> Result<(Finding, Verdict), Error> {
    let (verdict, stats) = solver.solve(sys);
    let verified = verify_certificate(sys, &verdict)?;
    let digest = &sha256_hex(verdict.to_text(sys).as_bytes())[..16];
    let mut artifact = match &verdict {
        Verdict::Feasible { witness } => {
            let ones = witness.iter().all(|w| *w == pathsys_core::metrizability::int(1));
            format!(
                "{}witness over {} variables",
                if ones { "all-ones " } else { "" },
                witness.len()
            )
        }
        Verdict::Infeasible { certificate } => {
            format!("certificate with {} multipliers", certificate.len())
        }
    };
    let _ = write!(
        artifact,
        ", {} rows, {} pivots by {}, verified={}, sha256:{digest}",
        stats.rows_in,
        stats.pivots,
        solver.name(),
        if verified { "yes" } else { "no" },
    );
    let label = if verdict.is_feasible() { yes } else { no };
    Ok((done(label, artifact), verdict))
}

fn search(ps: &PathSystem, engines: &Engines) -> Result<Result<SearchOutcome, u64>, Error> {
    let options = SearchOptions {
        budget: engines.budget,
        ..Default::default()
    };
    match engines.search.search(ps, &options) {
        Ok(outcome) => Ok(Ok(outcome)),
        Err(Error::BudgetExhausted { budget }) => Ok(Err(budget)),
        Err(e) => Err(e),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

struct Consistent;

impl Check<PaleyInput> for Consistent {
    fn name(&self) -> &'static str {
        "consistent"
    }

    fn run(&self, input: &PaleyInput) -> Result<Finding, Error> {
        Ok(consistency(&input.ps))
    }
}

impl Check<SystemInput> for Consistent {
    fn name(&self) -> &'static str {
        "consistent"
    }

    fn run(&self, input: &SystemInput) -> Result<Finding, Error> {
        Ok(consistency(&input.ps))
    }
}

fn consistency(ps: &PathSystem) -> Finding {
    match ps.find_inconsistency() {
        None => done("yes", format!("all {} pairs", ps.pair_count())),
        Some(v) => done("no", v.to_string()),
    }
}

struct Symmetric;

impl Check<PaleyInput> for Symmetric {
    fn name(&self) -> &'static str {
        "symmetric"
    }

    fn run(&self, input: &PaleyInput) -> Result<Finding, Error> {
        let ok = input.ps.check_cyclic_symmetry()?;
        Ok(done(yes_no(ok), format!("all {} translations", input.pf.p())))
    }
}

struct Symmetrized;

impl Check<PaleyInput> for Symmetrized {
    fn name(&self) -> &'static str {
        "symmetrized"
    }

    fn run(&self, input: &PaleyInput) -> Result<Finding, Error> {
        let sys = build_symmetrized_system(&input.pf)?;
        Ok(solve_and_summarize(input.engines.solver, &sys, "FEASIBLE", "INFEASIBLE")?.0)
    }
}

struct Direct;

impl Check<PaleyInput> for Direct {
    fn name(&self) -> &'static str {
        "direct"
    }

    fn heavy(&self) -> bool {
        true
    }

    fn run(&self, input: &PaleyInput) -> Result<Finding, Error> {
        let sys = build_metrizability_system(input.ps.graph(), &input.ps)?;
        Ok(solve_and_summarize(input.engines.solver, &sys, "FEASIBLE", "INFEASIBLE")?.0)
    }
}

struct ReducedDigraph;

impl Check<PaleyInput> for ReducedDigraph {
    fn name(&self) -> &'static str {
        "reduced-digraph"
    }

    fn run(&self, input: &PaleyInput) -> Result<Finding, Error> {
        let (gs, d) = build_reduced_system(&input.pf)?;
        let scc = d.strongly_connected();
        let verdict = format!(
            "strongly-connected={} lemma={:?}",
            yes_no(scc.strongly_connected),
            strong_lemma_verdict(&gs)
        );
        let artifact = format!(
            "{} vertices, {} arcs, {} inequalities, {} components",
            d.n(),
            d.arc_count(),
            gs.inequalities().len(),
            scc.components.len()
        );
        Ok(done(verdict, artifact))
    }
}

struct Reduction;

impl Check<PaleyInput> for Reduction {
    fn name(&self) -> &'static str {
        "reduction"
    }

    fn heavy(&self) -> bool {
        true
    }

    fn run(&self, input: &PaleyInput) -> Result<Finding, Error> {
        Ok(match search(&input.ps, &input.engines)? {
            Err(budget) => Finding::Exhausted {
                artifact: format!("{budget} branches by {}", input.engines.search.name()),
            },
            Ok(SearchOutcome::CertifiedNone { branches }) => done(
                "NONE",
                format!("exhausted after {branches} branches by {}", input.engines.search.name()),
            ),
            Ok(SearchOutcome::Found { reduction, branches }) => {
                let translates = translates_are_reductions(&input.ps, &reduction)?;
                done(
                    "FOUND",
                    format!(
                        "reduction {reduction} after {branches} branches by {}, translates valid={}",
                        input.engines.search.name(),
                        yes_no(translates)
                    ),
                )
            }
        })
    }
}

struct Metrizable;

impl Check<SystemInput> for Metrizable {
    fn name(&self) -> &'static str {
        "metrizable"
    }

    fn run(&self, input: &SystemInput) -> Result<Finding, Error> {
        if !input.ps.is_consistent() {
            return Ok(done("SKIPPED", "the system is inconsistent"));
        }
        let g: &Graph = input.ps.graph();
        let sys = build_metrizability_system(g, &input.ps)?;
        let (finding, verdict) = solve_and_summarize(input.engines.solver, &sys, "YES", "NO")?;
        *input.lp.lock().expect("not poisoned") = Some((sys, verdict));
        Ok(finding)
    }
}

struct Reducible;

impl Check<SystemInput> for Reducible {
    fn name(&self) -> &'static str {
        "reducible"
    }

    fn run(&self, input: &SystemInput) -> Result<Finding, Error> {
        if input.ps.n() < 2 {
            return Ok(done("NO", "fewer than two vertices"));
        }
        Ok(match search(&input.ps, &input.engines)? {
            Err(budget) => Finding::Exhausted {
                artifact: format!("{budget} branches by {}", input.engines.search.name()),
            },
            Ok(SearchOutcome::CertifiedNone { branches }) => done(
                "NO",
                format!("exhausted after {branches} branches by {}", input.engines.search.name()),
            ),
            Ok(SearchOutcome::Found { reduction, branches }) => {
                let valid = verify_reduction(&input.ps, &reduction.a, &reduction.b).is_valid();
                done(
                    "YES",
                    format!(
                        "reduction {reduction} after {branches} branches by {}, verified={}",
                        input.engines.search.name(),
                        yes_no(valid)
                    ),
                )
            }
        })
    }
}

pub fn paley_checks() -> Vec<&'static dyn Check<PaleyInput>> {
    vec![&Consistent, &Symmetric, &Symmetrized, &Direct, &ReducedDigraph, &Reduction]
}

pub fn system_checks() -> Vec<&'static dyn Check<SystemInput>> {
    vec![&Consistent, &Metrizable, &Reducible]
}
