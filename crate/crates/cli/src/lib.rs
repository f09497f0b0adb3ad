//! Verification runs behind the `pathsys` binary.

pub mod checks;
pub mod report;

use std::path::Path;
use std::time::Instant;

use pathsys_core::audit::{self, AuditOptions};
use pathsys_core::metrizability::{self, LinearSystem, Verdict};
use pathsys_core::numtheory::{admissibility_failure, PrimeField};
use pathsys_core::pathsys::{build_paley_system, PathSystem};
use pathsys_core::reducibility;

use checks::{Check, Engines, Finding, PaleyInput, SystemInput};
use report::{CheckRecord, Report, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Invalid input; the message is shown to the user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError(pub String);

impl From<pathsys_core::Error> for InputError {
    fn from(e: pathsys_core::Error) -> Self {
        InputError(e.to_string())
    }
}

pub fn exit_code(report: &Report) -> i32 {
    match report.status {
        Status::Complete => EXIT_OK,
        Status::BudgetExhausted => EXIT_BUDGET,
    }
}

pub fn engines(solver: &str, search: &str, budget: u64) -> Result<Engines, InputError> {
    Ok(Engines {
        solver: metrizability::solver(solver)?,
        search: reducibility::search_strategy(search)?,
        budget,
    })
}

fn run_checks<I>(report: &mut Report, registry: Vec<&'static dyn Check<I>>, input: &I, heavy: &[&str]) -> Result<(), InputError> {
    for check in registry {
        if check.heavy() && !heavy.contains(&check.name()) {
            continue;
        }
        let start = Instant::now();
        let finding = check.run(input)?;
        let wall = start.elapsed();
        report.checks.push(match finding {
            Finding::Done { verdict, artifact } => CheckRecord::new(check.name(), verdict, artifact, wall),
            Finding::Exhausted { artifact } => {
                report.status = Status::BudgetExhausted;
                CheckRecord::new(check.name(), "BUDGET-EXHAUSTED", artifact, wall)
            }
        });
    }
    Ok(())
}

pub struct PaleyOptions {
    pub direct_lp: bool,
    pub search_reduction: bool,
}

pub fn paley_verify(command: String, p: u64, options: &PaleyOptions, engines: Engines) -> Result<Report, InputError> {
    let start = Instant::now();
    if let Some(reason) = admissibility_failure(p) {
        return Err(InputError(reason));
    }
    let pf = PrimeField::new(p)?;
    let ps = build_paley_system(&pf)?;
    let mut report = Report::new(command, ps.to_text().as_bytes());
    let mut heavy = Vec::new();
    if options.direct_lp {
        heavy.push("direct");
    }
    if options.search_reduction {
        heavy.push("reduction");
    }
    let input = PaleyInput { pf, ps, engines };
    run_checks(&mut report, checks::paley_checks(), &input, &heavy)?;
    report.wall_us = start.elapsed().as_micros() as u64;
    Ok(report)
}

pub fn check(command: String, input: &Path, dump: Option<&Path>, engines: Engines) -> Result<Report, InputError> {
    let start = Instant::now();
    let bytes = std::fs::read(input).map_err(|e| InputError(format!("{}: {e}", input.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| InputError(format!("{}: not UTF-8", input.display())))?;
    let ps = PathSystem::from_text(&text)?;
    let mut report = Report::new(command, &bytes);
    let system = SystemInput {
        ps,
        engines,
        lp: Default::default(),
    };
    run_checks(&mut report, checks::system_checks(), &system, &[])?;
    if let Some(path) = dump {
        let lp = system.lp.lock().expect("not poisoned");
        let Some((sys, verdict)) = lp.as_ref() else {
            return Err(InputError("no linear system to dump: the path system is inconsistent".into()));
        };
        std::fs::write(path, write_dump(sys, verdict))
            .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    }
    report.wall_us = start.elapsed().as_micros() as u64;
    Ok(report)
}

/// The system in `linsys v1` form followed by its `witness` or `cert` lines.
pub fn write_dump(sys: &LinearSystem, verdict: &Verdict) -> String {
    sys.to_text() + &verdict.to_text(sys)
}

pub fn read_dump(text: &str) -> Result<(LinearSystem, Verdict), InputError> {
    let is_verdict = |l: &&str| l.starts_with("witness ") || l.starts_with("cert ");
    let system: Vec<&str> = text.lines().filter(|l| !is_verdict(l)).collect();
    let verdict: Vec<&str> = text.lines().filter(is_verdict).collect();
    let sys = LinearSystem::from_text(&system.join("\n"))?;
    let verdict = Verdict::from_text(&verdict.join("\n"), &sys)?;
    Ok((sys, verdict))
}

pub fn audit(command: String, max: u64, seed: u64, csv: Option<&Path>) -> Result<Report, InputError> {
    let start = Instant::now();
    if max < 3 {
        return Err(InputError(format!("no odd primes up to {max}")));
    }
    let options = AuditOptions {
        seed,
        ..Default::default()
    };
    let mut report = Report::new(command, format!("audit max={max} seed={seed}").as_bytes());
    let t = Instant::now();
    let rows = audit::audit(max, &options)?;
    let wall = t.elapsed();

    let sampled: Vec<_> = rows.iter().filter_map(|r| r.burgess.map(|b| (r.p, b))).collect();
    let violations: usize = sampled.iter().map(|(_, b)| b.violations).sum();
    let tuples: usize = sampled.iter().map(|(_, b)| b.tuples).sum();
    let worst = sampled.iter().map(|(_, b)| b.max_ratio).fold(0.0, f64::max);
    report.checks.push(CheckRecord::new(
        "burgess",
        format!("{violations} violations"),
        format!(
            "{tuples} tuples over {} primes up to {}, k <= {}, max ratio {worst:.4}, seed {seed}",
            sampled.len(),
            options.burgess_limit.min(max),
            options.max_k
        ),
        wall,
    ));

    let cn: Vec<_> = rows.iter().filter(|r| r.cn_max_deviation.is_some()).collect();
    let lemma_fail: Vec<u64> = cn.iter().filter(|r| r.cn_within_lemma() == Some(false)).map(|r| r.p).collect();
    let improved_fail: Vec<u64> = cn.iter().filter(|r| r.cn_within_improved() == Some(false)).map(|r| r.p).collect();
    report.checks.push(CheckRecord::new(
        "common-neighbors",
        format!("{} above 5sqrt(p)+1, {} above 2sqrt(p)+2", lemma_fail.len(), improved_fail.len()),
        format!(
            "{} primes p = 1 mod 4 up to {}, above lemma bound {lemma_fail:?}, above improved bound {improved_fail:?}",
            cn.len(),
            options.common_neighbor_limit.min(max)
        ),
        wall,
    ));

    let exceptions: Vec<u64> = rows.iter().filter(|r| !r.run_bound_holds).map(|r| r.p).collect();
    report.checks.push(CheckRecord::new(
        "nonresidue-runs",
        format!("exceptions {exceptions:?}"),
        format!("L_p <= sqrt(p) checked for {} primes up to {max}", rows.len()),
        wall,
    ));

    let mismatches: Vec<u64> = rows.iter().filter(|r| !r.congruence_agrees).map(|r| r.p).collect();
    let admissible = rows.iter().filter(|r| r.admissible).count();
    report.checks.push(CheckRecord::new(
        "admissibility",
        format!("{} disagreements with p = 5 mod 24", mismatches.len()),
        format!("{admissible} admissible primes, disagreements {mismatches:?}"),
        wall,
    ));

    if let Some(path) = csv {
        std::fs::write(path, audit::to_csv(&rows)).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    }
    report.wall_us = start.elapsed().as_micros() as u64;
    Ok(report)
}
