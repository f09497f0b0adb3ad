//! End-to-end acceptance checks. Run with `--nocapture` to see one line per
//! criterion; the test fails if any criterion does.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use pathsys_core::audit::{
    burgess_check, common_neighbor_deviation, improved_bound, lemma_bound, within_run_bound,
};
use pathsys_core::graph::{paley_graph, Graph};
use pathsys_core::metrizability::{
    build_metrizability_system, build_reduced_system, build_symmetrized_system, int,
    is_metrizable, solve_feasibility, strong_lemma_verdict, verify_certificate, GeneralSystem,
    Inequality, LemmaVerdict, Rational, Verdict,
};
use pathsys_core::numtheory::{admissible_primes, primes_up_to, PrimeField};
use pathsys_core::pathsys::{build_paley_system, petersen_fixture, PathSystem};
use pathsys_core::reducibility::{
    verify_reduction, Propagate, ReductionSearch, SearchOptions, SearchOutcome,
};
use pathsys_core::Vertex;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn field(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let value = f();
    (value, start.elapsed())
}

fn consistency() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for p in [29, 53, 101, 149] {
        let (ok, t) = timed(|| build_paley_system(&field(p)).unwrap().is_consistent());
        pass &= ok && t < Duration::from_secs(30);
        notes.push(format!("p={p} {ok} {t:.2?}"));
    }
    outcome(pass, notes.join(", "))
}

fn symmetrized() -> Outcome {
    let primes = admissible_primes(461);
    let mut pass = primes.len() == 11;
    let mut slowest = (0, Duration::ZERO);
    for &p in &primes {
        let ((infeasible, verified), t) = timed(|| {
            let sys = build_symmetrized_system(&field(p)).unwrap();
            let v = solve_feasibility(&sys);
            (v.is_infeasible(), verify_certificate(&sys, &v).unwrap())
        });
        pass &= infeasible && verified && t < Duration::from_secs(10);
        if t > slowest.1 {
            slowest = (p, t);
        }
    }
    outcome(
        pass,
        format!(
            "{} primes infeasible with verified certificates, slowest p={} {:.2?}",
            primes.len(),
            slowest.0,
            slowest.1
        ),
    )
}

fn infeasible_and_verified(g: &Graph, ps: &PathSystem) -> bool {
    let sys = build_metrizability_system(g, ps).unwrap();
    let v = solve_feasibility(&sys);
    v.is_infeasible() && verify_certificate(&sys, &v).unwrap()
}

fn direct() -> Outcome {
    let (petersen, tp) = timed(|| {
        let (g, ps) = petersen_fixture();
        infeasible_and_verified(&g, &ps)
    });
    let (paley, t29) = timed(|| {
        let pf = field(29);
        infeasible_and_verified(&paley_graph(&pf).unwrap(), &build_paley_system(&pf).unwrap())
    });
    outcome(
        petersen && tp < Duration::from_secs(5) && paley && t29 < Duration::from_secs(300),
        format!("Petersen {petersen} {tp:.2?}, p=29 {paley} {t29:.2?}"),
    )
}

fn irreducibility() -> Outcome {
    let options = SearchOptions {
        budget: 100_000_000,
        ..Default::default()
    };
    let ps = build_paley_system(&field(29)).unwrap();
    let (paley, t) = timed(|| Propagate.search(&ps, &options));
    let (paley_ok, branches) = match paley {
        Ok(SearchOutcome::CertifiedNone { branches }) => (true, branches),
        _ => (false, 0),
    };
    let (_, petersen) = petersen_fixture();
    let found = Propagate
        .search(&petersen, &options)
        .unwrap()
        .reduction()
        .is_some_and(|r| verify_reduction(&petersen, &r.a, &r.b).is_valid());
    let figure = verify_reduction(
        &petersen,
        &(1..=5).collect::<BTreeSet<Vertex>>(),
        &(6..=10).collect::<BTreeSet<Vertex>>(),
    )
    .is_valid();
    outcome(
        paley_ok && found && figure,
        format!(
            "p=29 none after {branches} branches {t:.2?}, Petersen reduction {found}, outer/inner split {figure}"
        ),
    )
}

/// A random system on `n` variables whose digraph contains the cycle
/// `0 → 1 → … → n−1 → 0`, hence is strongly connected.
fn cyclic_system(rng: &mut StdRng, all_two: bool) -> GeneralSystem {
    let n = rng.gen_range(1..=7);
    let coefficient = |rng: &mut StdRng| -> Rational {
        if all_two {
            int(2)
        } else {
            BigRational::new(rng.gen_range(4..=7).into(), 2.into())
        }
    };
    let mut ineqs: Vec<Inequality> = (0..n)
        .map(|i| Inequality {
            coefficient: coefficient(rng),
            lhs: i,
            rhs: ((i + 1) % n, rng.gen_range(0..n)),
        })
        .collect();
    for _ in 0..rng.gen_range(0..=(14 - n)) {
        ineqs.push(Inequality {
            coefficient: coefficient(rng),
            lhs: rng.gen_range(0..n),
            rhs: (rng.gen_range(0..n), rng.gen_range(0..n)),
        });
    }
    if !all_two && ineqs.iter().all(|i| i.coefficient == int(2)) {
        ineqs[0].coefficient = int(3);
    }
    GeneralSystem::new((1..=n as Vertex).collect(), ineqs).unwrap()
}

fn lemma_agreement() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2024);
    let (mut checked, mut disagreements) = (0, 0);
    for round in 0..240 {
        let gs = cyclic_system(&mut rng, round % 2 == 0);
        if !gs.digraph().strongly_connected().strongly_connected {
            continue;
        }
        checked += 1;
        let sys = gs.to_linear_system();
        let v = solve_feasibility(&sys);
        let agrees = verify_certificate(&sys, &v).unwrap()
            && match strong_lemma_verdict(&gs) {
                LemmaVerdict::FeasibleAllEqual => {
                    let equal = Verdict::Feasible {
                        witness: vec![int(1); gs.labels().len()],
                    };
                    v.is_feasible() && verify_certificate(&sys, &equal).unwrap()
                }
                LemmaVerdict::InfeasibleByLemma => v.is_infeasible(),
                LemmaVerdict::Inconclusive => false,
            };
        if !agrees {
            disagreements += 1;
        }
    }
    outcome(
        checked >= 200 && disagreements == 0,
        format!("{checked} strongly connected systems, {disagreements} disagreements"),
    )
}

fn fixture_graphs() -> Vec<Graph> {
    let cycle = |n: Vertex| (1..=n).map(move |i| (i, i % n + 1));
    let raw: Vec<(Vertex, Vec<(Vertex, Vertex)>)> = vec![
        (3, cycle(3).collect()),
        (5, vec![(1, 2), (2, 3), (3, 4), (2, 5)]),
        (4, (1..=4).flat_map(|a| (a + 1..=4).map(move |b| (a, b))).collect()),
        (5, cycle(5).collect()),
        (5, (2..=5).map(|i| (1, i)).chain([(2, 3), (3, 4), (4, 5), (5, 2)]).collect()),
        (5, (1..=2).flat_map(|a| (3..=5).map(move |b| (a, b))).collect()),
        (6, (1..=3).flat_map(|a| (4..=6).map(move |b| (a, b))).collect()),
        (6, vec![(1, 2), (2, 3), (3, 1), (4, 5), (5, 6), (6, 4), (1, 4), (2, 5), (3, 6)]),
        (
            8,
            vec![
                (1, 2), (2, 3), (3, 4), (4, 1), (5, 6), (6, 7), (7, 8), (8, 5),
                (1, 5), (2, 6), (3, 7), (4, 8),
            ],
        ),
        (8, cycle(8).chain((1..=4).map(|i| (i, i + 4))).collect()),
    ];
    raw.into_iter()
        .map(|(n, edges)| Graph::new(1..=n, edges).unwrap())
        .collect()
}

/// Unique shortest paths under `(base << 20) + 2^e`, so no two distinct
/// paths tie.
fn shortest_path_system(g: &Graph, salt: usize) -> PathSystem {
    let n = g.n();
    let labels = g.labels();
    let mut dist = vec![vec![u64::MAX / 4; n]; n];
    let mut next = vec![vec![0; n]; n];
    for i in 0..n {
        dist[i][i] = 0;
        next[i][i] = i;
    }
    for (e, (u, v)) in g.edges().into_iter().enumerate() {
        let (i, j) = (g.index_of(u).unwrap(), g.index_of(v).unwrap());
        let w = ((((e * 7 + salt * 3) % 5 + 1) as u64) << 20) + (1 << e);
        dist[i][j] = w;
        dist[j][i] = w;
        next[i][j] = j;
        next[j][i] = i;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if dist[i][k] + dist[k][j] < dist[i][j] {
                    dist[i][j] = dist[i][k] + dist[k][j];
                    next[i][j] = next[i][k];
                }
            }
        }
    }
    let mut paths = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut path = vec![labels[i]];
            let mut at = i;
            while at != j {
                at = next[at][j];
                path.push(labels[at]);
            }
            paths.push(path);
        }
    }
    PathSystem::new(g.clone(), paths).unwrap()
}

fn simple_paths(g: &Graph, at: Vertex, to: Vertex, path: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
    if at == to {
        out.push(path.clone());
        return;
    }
    for z in g.neighbors(at).unwrap() {
        if !path.contains(&z) {
            path.push(z);
            simple_paths(g, z, to, path, out);
            path.pop();
        }
    }
}

/// Counts pairs whose chosen path is beaten by some simple path.
fn metric_violations(g: &Graph, ps: &PathSystem, witness: &[Rational]) -> usize {
    let edges = g.edges();
    let weight = |path: &[Vertex]| -> Rational {
        path.windows(2)
            .map(|s| {
                let e = (s[0].min(s[1]), s[0].max(s[1]));
                witness[edges.binary_search(&e).unwrap()].clone()
            })
            .sum()
    };
    let labels = g.labels();
    let mut violations = 0;
    for (a, &u) in labels.iter().enumerate() {
        for &v in &labels[a + 1..] {
            let chosen = weight(&ps.path(u, v).unwrap());
            let mut all = Vec::new();
            simple_paths(g, u, v, &mut vec![u], &mut all);
            if all.iter().any(|q| weight(q) < chosen) {
                violations += 1;
            }
        }
    }
    violations
}

fn oracle_soundness() -> Outcome {
    let mut systems: Vec<PathSystem> = fixture_graphs()
        .iter()
        .flat_map(|g| (0..2).map(move |salt| shortest_path_system(g, salt)))
        .collect();
    for text in [
        include_str!("fixtures/wagner_1.txt"),
        include_str!("fixtures/wagner_2.txt"),
    ] {
        systems.push(PathSystem::from_text(text).unwrap());
    }
    let (mut feasible, mut infeasible, mut violations) = (0, 0, 0);
    for ps in &systems {
        let g = ps.graph();
        assert!(g.n() <= 8);
        let sys = build_metrizability_system(g, ps).unwrap();
        match is_metrizable(g, ps).unwrap() {
            Verdict::Feasible { witness } => {
                feasible += 1;
                violations += metric_violations(g, ps, &witness);
            }
            v @ Verdict::Infeasible { .. } => {
                infeasible += 1;
                if !verify_certificate(&sys, &v).unwrap() {
                    violations += 1;
                }
            }
        }
    }
    outcome(
        systems.len() >= 20 && violations == 0 && infeasible > 0,
        format!(
            "{} systems: {feasible} metrizable, {infeasible} certified non-metrizable, {violations} violations",
            systems.len()
        ),
    )
}

fn audit_bounds() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(pathsys_core::audit::DEFAULT_SEED);
    let mut burgess_violations = 0;
    let mut max_ratio: f64 = 0.0;
    for p in primes_up_to(199).into_iter().filter(|&p| p > 2) {
        let s = burgess_check(&field(p), 4, 200, &mut rng).unwrap();
        burgess_violations += s.violations;
        max_ratio = max_ratio.max(s.max_ratio);
    }
    let mut cn_ok = true;
    let mut cn_notes = Vec::new();
    for p in [29, 53, 101] {
        let d = common_neighbor_deviation(&field(p));
        cn_ok &= d <= lemma_bound(p);
        cn_notes.push(format!(
            "p={p} {d:.3} (<= {:.1}, improved {:.1})",
            lemma_bound(p),
            improved_bound(p)
        ));
    }
    let exceptions: Vec<u64> = primes_up_to(5000)
        .into_iter()
        .filter(|&p| p > 2 && !within_run_bound(p, field(p).max_nonresidue_run()))
        .collect();
    let t = start.elapsed();
    outcome(
        burgess_violations == 0 && cn_ok && exceptions == [13] && t < Duration::from_secs(300),
        format!(
            "Burgess violations {burgess_violations} (max ratio {max_ratio:.3}); common neighbors {}; run-bound exceptions {exceptions:?}; {t:.2?}",
            cn_notes.join(", ")
        ),
    )
}

fn strong_connectivity() -> Outcome {
    let mut pass = true;
    let mut connected = Vec::new();
    for p in admissible_primes(461) {
        let (gs, d) = build_reduced_system(&field(p)).unwrap();
        if d.strongly_connected().strongly_connected {
            connected.push(p);
            pass &= strong_lemma_verdict(&gs) == LemmaVerdict::InfeasibleByLemma;
        }
    }
    outcome(pass, format!("strongly connected for p in {connected:?}"))
}

type Criterion = (&'static str, fn() -> Outcome);

/// Runs without the test harness so the per-criterion lines are never captured.
fn main() {
    let criteria: [Criterion; 8] = [
        ("consistency of the Paley systems", consistency),
        ("symmetrized systems infeasible", symmetrized),
        ("direct systems infeasible", direct),
        ("irreducibility search", irreducibility),
        ("strong-connectivity lemma agreement", lemma_agreement),
        ("metrizability oracle soundness", oracle_soundness),
        ("audit bounds", audit_bounds),
        ("reduced-system strong connectivity", strong_connectivity),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let Outcome { pass, detail } = check();
        println!(
            "criterion {} {}: {} ({detail})",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            name
        );
        if !pass {
            failed.push(k + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
