//! Builders for the metrizability systems of a path system and of the
//! Paley construction.

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Zero};

use super::linsys::{int, LinearSystem, Rational, Verdict};
use super::solver::solve_feasibility;
use crate::error::{Error, Result};
use crate::graph::{Digraph, Graph};
use crate::numtheory::{require_admissible, PrimeField};
use crate::pathsys::PathSystem;
use crate::Vertex;

pub fn edge_variable(u: Vertex, v: Vertex) -> String {
    format!("w_{}_{}", u.min(v), u.max(v))
}

/// Edge-weight system whose feasibility is equivalent to metrizability.
///
/// Variables are one weight per edge with `w ≥ 1` (positivity rescaled).
/// For every ordered pair `(u, v)` and neighbor `z` of `v`,
/// `w(P_{u,z}) + w(zv) ≥ w(P_{u,v})` with `w(P_{u,u}) = 0`. Any `u`–`v` walk
/// that beats `P_{u,v}` yields, by induction on its length, a one-edge
/// extension of a chosen path that does, so these rows suffice.
pub fn build_metrizability_system(g: &Graph, ps: &PathSystem) -> Result<LinearSystem> {
    if ps.graph() != g {
        return Err(Error::Graph("path system is defined on a different graph".into()));
    }
    ps.require_consistent()?;
    let mut sys = LinearSystem::new(g.edges().into_iter().map(|(u, v)| edge_variable(u, v)))?;
    for (id, (u, v)) in g.edges().into_iter().enumerate() {
        sys.add_ge([(id, int(1))], int(1), format!("positive {{{u},{v}}}"))?;
    }
    let n = g.n();
    let path_edges = |i: usize, j: usize| -> Vec<usize> {
        ps.indices_between(i, j)
            .windows(2)
            .map(|w| g.edge_id(w[0], w[1]).expect("paths follow edges"))
            .collect()
    };
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let chosen = path_edges(u, v);
            for &z in g.neighbors_of(v) {
                let mut terms: Vec<(usize, Rational)> = path_edges(u, z)
                    .into_iter()
                    .map(|e| (e, Rational::one()))
                    .collect();
                terms.push((g.edge_id(z, v).expect("neighbor"), Rational::one()));
                terms.extend(chosen.iter().map(|&e| (e, -Rational::one())));
                sys.add_ge(
                    terms,
                    Rational::zero(),
                    format!("u={} v={} z={}", g.label(u), g.label(v), g.label(z)),
                )?;
            }
        }
    }
    Ok(sys)
}

/// Decides metrizability; a feasible witness is a metrizing weight function
/// indexed like `g.edges()`.
pub fn is_metrizable(g: &Graph, ps: &PathSystem) -> Result<Verdict> {
    Ok(solve_feasibility(&build_metrizability_system(g, ps)?))
}

/// Representative of the class `{a, −a}`: the smaller of the two.
fn class_rep(pf: &PrimeField, a: u64) -> u64 {
    a.min(pf.neg(a))
}

/// Translation-averaged system: one weight per residue class `{a, −a}`.
///
/// Rows: `x ≥ 1`; `x_b + x_c ≥ 2x_a` for residues with `2a = b + c`, `b ≠ c`,
/// `2a ∉ {3, −3}`; and `x_b + x_c ≥ 3x_1` for residues with `b + c = 3`.
/// Rows identical after aliasing are kept once.
pub fn build_symmetrized_system(pf: &PrimeField) -> Result<LinearSystem> {
    require_admissible(pf)?;
    let p = pf.p();
    let reps: Vec<u64> = pf
        .residues()
        .iter()
        .copied()
        .filter(|&a| class_rep(pf, a) == a)
        .collect();
    let mut sys = LinearSystem::new(reps.iter().map(|a| format!("x_{a}")))?;
    let var: BTreeMap<u64, usize> = reps.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let class = |a: u64| var[&class_rep(pf, a)];

    for (i, a) in reps.iter().enumerate() {
        sys.add_ge([(i, int(1))], int(1), format!("positive x_{a}"))?;
    }
    let mut seen = HashSet::new();
    let (three, minus_three) = (3 % p, pf.neg(3));
    for &a in pf.residues() {
        let two_a = pf.mul(2, a);
        if two_a == three || two_a == minus_three {
            continue;
        }
        for &b in pf.residues() {
            let c = pf.sub(two_a, b);
            if b >= c || !pf.is_residue(c) {
                continue;
            }
            let terms = [(class(b), int(1)), (class(c), int(1)), (class(a), int(-2))];
            if seen.insert(normalized_key(&terms)) {
                sys.add_ge(terms, int(0), format!("midpoint a={a} b={b} c={c}"))?;
            }
        }
    }
    for &b in pf.residues() {
        let c = pf.sub(three, b);
        if b > c || !pf.is_residue(c) {
            continue;
        }
        let terms = [(class(b), int(1)), (class(c), int(1)), (class(1), int(-3))];
        if seen.insert(normalized_key(&terms)) {
            sys.add_ge(terms, int(0), format!("three-step b={b} c={c}"))?;
        }
    }
    Ok(sys)
}

fn normalized_key(terms: &[(usize, Rational)]) -> Vec<(usize, Rational)> {
    let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
    for (j, c) in terms {
        *merged.entry(*j).or_insert_with(Rational::zero) += c;
    }
    merged.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// One inequality `coefficient · x_lhs ≤ x_rhs.0 + x_rhs.1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inequality {
    pub coefficient: Rational,
    pub lhs: usize,
    pub rhs: (usize, usize),
}

/// A system of inequalities `a_m x_i ≤ x_j + x_k` with every `a_m ≥ 2`,
/// over variables carrying vertex labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralSystem {
    labels: Vec<Vertex>,
    inequalities: Vec<Inequality>,
}

impl GeneralSystem {
    pub fn new(labels: Vec<Vertex>, inequalities: Vec<Inequality>) -> Result<Self> {
        let distinct: HashSet<&Vertex> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::MalformedSystem("duplicate variable label".into()));
        }
        let two = int(2);
        for (index, ineq) in inequalities.iter().enumerate() {
            if ineq.coefficient < two {
                return Err(Error::CoefficientBelowTwo {
                    index,
                    coefficient: ineq.coefficient.to_string(),
                });
            }
            let n = labels.len();
            if ineq.lhs >= n || ineq.rhs.0 >= n || ineq.rhs.1 >= n {
                return Err(Error::MalformedSystem(format!(
                    "inequality {index} references an undeclared variable"
                )));
            }
        }
        Ok(Self { labels, inequalities })
    }

    pub fn labels(&self) -> &[Vertex] {
        &self.labels
    }

    pub fn inequalities(&self) -> &[Inequality] {
        &self.inequalities
    }

    pub fn variable_of(&self, label: Vertex) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Each inequality `a x_i ≤ x_j + x_k` contributes arcs `i → j`, `i → k`.
    pub fn digraph(&self) -> Digraph {
        let mut d = Digraph::new(self.labels.iter().copied()).expect("distinct labels");
        for ineq in &self.inequalities {
            let from = self.labels[ineq.lhs];
            for to in [ineq.rhs.0, ineq.rhs.1] {
                d.add_arc(from, self.labels[to]).expect("declared");
            }
        }
        d
    }

    /// Canonical form with positivity rescaled to `x ≥ 1`.
    pub fn to_linear_system(&self) -> LinearSystem {
        let mut sys = LinearSystem::new(self.labels.iter().map(|l| format!("x_{l}")))
            .expect("distinct labels");
        for (j, l) in self.labels.iter().enumerate() {
            sys.add_ge([(j, int(1))], int(1), format!("positive x_{l}"))
                .expect("declared");
        }
        for (m, ineq) in self.inequalities.iter().enumerate() {
            sys.add_ge(
                [
                    (ineq.rhs.0, int(1)),
                    (ineq.rhs.1, int(1)),
                    (ineq.lhs, -ineq.coefficient.clone()),
                ],
                int(0),
                format!("inequality {m}"),
            )
            .expect("declared");
        }
        sys
    }
}

/// Verdict of the strong-connectivity lemma.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaVerdict {
    /// Strongly connected with some coefficient above 2.
    InfeasibleByLemma,
    /// Strongly connected with every coefficient equal to 2: the constant
    /// assignment is the only solution up to scaling.
    FeasibleAllEqual,
    /// Digraph not strongly connected; exact solving is needed.
    Inconclusive,
}

/// In a strongly connected system a maximal variable propagates equality
/// along every arc, so feasibility forces all coefficients to be 2.
pub fn strong_lemma_verdict(gs: &GeneralSystem) -> LemmaVerdict {
    if !gs.digraph().strongly_connected().strongly_connected {
        return LemmaVerdict::Inconclusive;
    }
    let two = int(2);
    if gs.inequalities.iter().all(|i| i.coefficient == two) {
        LemmaVerdict::FeasibleAllEqual
    } else {
        LemmaVerdict::InfeasibleByLemma
    }
}

/// The subsystem over `R' = R \ {3/2, −3/2}` without identifying `x_a` and
/// `x_{−a}`, together with its digraph.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pf: PrimeField,
    system: GeneralSystem,
    digraph: Digraph,
    members: HashSet<u64>,
    // arc -> index of the first inequality generating it
    arc_source: BTreeMap<(Vertex, Vertex), usize>,
}

/// Two arcs `a → β → b` of the reduced digraph and their generating inequalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoStep {
    pub via: Vertex,
    pub arcs: [(Vertex, Vertex); 2],
    pub inequalities: [usize; 2],
}

impl ReducedSystem {
    pub fn build(pf: &PrimeField) -> Result<Self> {
        require_admissible(pf)?;
        let excluded = [pf.div(3, 2), pf.neg(pf.div(3, 2))];
        let members_sorted: Vec<u64> = pf
            .residues()
            .iter()
            .copied()
            .filter(|a| !excluded.contains(a))
            .collect();
        let members: HashSet<u64> = members_sorted.iter().copied().collect();
        let var: BTreeMap<u64, usize> = members_sorted
            .iter()
            .enumerate()
            .map(|(i, &a)| (a, i))
            .collect();

        let mut inequalities = Vec::new();
        for &a in &members_sorted {
            let two_a = pf.mul(2, a);
            for &b in &members_sorted {
                let c = pf.sub(two_a, b);
                if b < c && members.contains(&c) {
                    inequalities.push(Inequality {
                        coefficient: int(2),
                        lhs: var[&a],
                        rhs: (var[&b], var[&c]),
                    });
                }
            }
        }
        for &b in &members_sorted {
            let c = pf.sub(3, b);
            if b <= c && members.contains(&c) {
                inequalities.push(Inequality {
                    coefficient: int(3),
                    lhs: var[&1],
                    rhs: (var[&b], var[&c]),
                });
            }
        }
        let labels = members_sorted.iter().map(|&a| a as Vertex).collect();
        let system = GeneralSystem::new(labels, inequalities)?;
        let digraph = system.digraph();
        let mut arc_source = BTreeMap::new();
        for (m, ineq) in system.inequalities().iter().enumerate() {
            let from = system.labels()[ineq.lhs];
            for to in [ineq.rhs.0, ineq.rhs.1] {
                arc_source.entry((from, system.labels()[to])).or_insert(m);
            }
        }
        Ok(Self {
            pf: pf.clone(),
            system,
            digraph,
            members,
            arc_source,
        })
    }

    pub fn system(&self) -> &GeneralSystem {
        &self.system
    }

    pub fn digraph(&self) -> &Digraph {
        &self.digraph
    }

    pub fn contains(&self, a: u64) -> bool {
        self.members.contains(&a)
    }

    /// Inequality that generates arc `from → to`, if the arc exists.
    pub fn arc_source(&self, from: Vertex, to: Vertex) -> Option<usize> {
        self.arc_source.get(&(from, to)).copied()
    }

    /// A path `a → β → b` of length two.
    ///
    /// For `4a ≠ b` the candidates are `β ∈ R'` with `2a − β ∈ R'` and
    /// `2β − b ∈ R'`, i.e. `β ∈ (Γ(2a) ∩ R) \ Γ(b/2)` cut down to `R'`.
    /// When `4a = b` that set is empty and any `β ∈ R' \ {a, b}` joined to
    /// both endpoints by arcs is accepted. Returns `None` if no `β` works,
    /// which can happen for small primes.
    pub fn two_step_witness(&self, a: u64, b: u64) -> Result<Option<TwoStep>> {
        for x in [a, b] {
            if !self.contains(x) {
                return Err(Error::NotInReducedSet(x));
            }
        }
        if a == b {
            return Err(Error::CoincidentVertices(vec![a as Vertex, b as Vertex]));
        }
        let pf = &self.pf;
        let mut candidates: Vec<u64> = self.system.labels().iter().map(|&l| l as u64).collect();
        candidates.retain(|&beta| beta != a && beta != b);
        if pf.mul(4, a) != b {
            candidates.retain(|&beta| {
                let alpha = pf.sub(pf.mul(2, a), beta);
                let gamma = pf.sub(pf.mul(2, beta), b);
                self.contains(alpha) && self.contains(gamma) && alpha != beta && gamma != b
            });
        }
        let (a, b) = (a as Vertex, b as Vertex);
        Ok(candidates.into_iter().find_map(|beta| {
            let beta = beta as Vertex;
            let first = self.arc_source(a, beta)?;
            let second = self.arc_source(beta, b)?;
            Some(TwoStep {
                via: beta,
                arcs: [(a, beta), (beta, b)],
                inequalities: [first, second],
            })
        }))
    }
}

/// Builds the reduced system and its digraph.
pub fn build_reduced_system(pf: &PrimeField) -> Result<(GeneralSystem, Digraph)> {
    let reduced = ReducedSystem::build(pf)?;
    Ok((reduced.system, reduced.digraph))
}

/// Two-step path in the reduced digraph from `a` to `b`.
pub fn two_step_witness(pf: &PrimeField, a: u64, b: u64) -> Result<Option<TwoStep>> {
    ReducedSystem::build(pf)?.two_step_witness(a, b)
}
