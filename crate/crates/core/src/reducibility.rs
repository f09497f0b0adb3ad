//! Reductions of path systems: bipartitions `(A, B)` such that the path
//! between two vertices on the same side stays on that side.
//!
//! Irreducibility is decided by exhaustive search. The default strategy
//! pins the smallest vertex to one side, fixes the smallest vertex of the
//! other side as a seed, and alternates closure propagation with branching.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::pathsys::PathSystem;
use crate::Vertex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub a: BTreeSet<Vertex>,
    pub b: BTreeSet<Vertex>,
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: &BTreeSet<Vertex>| {
            s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        };
        write!(f, "{{{}}} / {{{}}}", list(&self.a), list(&self.b))
    }
}

/// Outcome of [`verify_reduction`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionCheck {
    Valid,
    /// The sides are empty, overlap, or miss a vertex.
    NotBipartition(String),
    /// `P_{u,v}` has both ends on one side but passes through `escapee`.
    Escapes { u: Vertex, v: Vertex, escapee: Vertex },
}

impl ReductionCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, ReductionCheck::Valid)
    }

    pub fn violating_pair(&self) -> Option<(Vertex, Vertex)> {
        match self {
            ReductionCheck::Escapes { u, v, .. } => Some((*u, *v)),
            _ => None,
        }
    }
}

/// Checks every condition of a reduction; pairs are scanned in increasing
/// label order and the first escaping one is reported.
pub fn verify_reduction(
    ps: &PathSystem,
    a: &BTreeSet<Vertex>,
    b: &BTreeSet<Vertex>,
) -> ReductionCheck {
    let g = ps.graph();
    if a.is_empty() || b.is_empty() {
        return ReductionCheck::NotBipartition("a side is empty".into());
    }
    if let Some(v) = a.intersection(b).next() {
        return ReductionCheck::NotBipartition(format!("{v} is on both sides"));
    }
    if let Some(v) = a.iter().chain(b).find(|&&v| !g.contains(v)) {
        return ReductionCheck::NotBipartition(format!("unknown vertex {v}"));
    }
    if let Some(&v) = g.labels().iter().find(|v| !a.contains(v) && !b.contains(v)) {
        return ReductionCheck::NotBipartition(format!("{v} is on neither side"));
    }
    let side: Vec<bool> = g.labels().iter().map(|v| a.contains(v)).collect();
    let n = g.n();
    for i in 0..n {
        for j in i + 1..n {
            if side[i] != side[j] {
                continue;
            }
            if let Some(&k) = ps.canonical_indices(i, j).iter().find(|&&k| side[k] != side[i]) {
                return ReductionCheck::Escapes {
                    u: g.label(i),
                    v: g.label(j),
                    escapee: g.label(k),
                };
            }
        }
    }
    ReductionCheck::Valid
}

/// Interior vertices of every stored path, by vertex index.
struct Interiors {
    n: usize,
    inner: Vec<Vec<usize>>,
}

impl Interiors {
    fn new(ps: &PathSystem) -> Self {
        let n = ps.n();
        let mut inner = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let path = ps.canonical_indices(i, j);
                let mid = path[1..path.len() - 1].to_vec();
                inner[j * n + i] = mid.clone();
                inner[i * n + j] = mid;
            }
        }
        Self { n, inner }
    }

    fn between(&self, i: usize, j: usize) -> &[usize] {
        &self.inner[i * self.n + j]
    }
}

/// Partial assignment of vertex indices to sides, closed under paths.
#[derive(Clone)]
struct State {
    side: Vec<Option<Side>>,
    members: [Vec<usize>; 2],
}

impl State {
    fn new(n: usize) -> Self {
        Self {
            side: vec![None; n],
            members: [Vec::new(), Vec::new()],
        }
    }

    fn slot(side: Side) -> usize {
        match side {
            Side::A => 0,
            Side::B => 1,
        }
    }

    /// Puts `v` on `side` and closes; `Err` names a vertex forced onto both.
    fn assign(&mut self, v: usize, side: Side, paths: &Interiors) -> std::result::Result<(), usize> {
        let mut queue = vec![v];
        while let Some(x) = queue.pop() {
            match self.side[x] {
                Some(s) if s == side => continue,
                Some(_) => return Err(x),
                None => {}
            }
            self.side[x] = Some(side);
            for &y in &self.members[Self::slot(side)] {
                for &z in paths.between(x, y) {
                    match self.side[z] {
                        Some(s) if s == side => {}
                        Some(_) => return Err(z),
                        None => queue.push(z),
                    }
                }
            }
            self.members[Self::slot(side)].push(x);
        }
        Ok(())
    }

    fn first_undecided(&self) -> Option<usize> {
        self.side.iter().position(Option::is_none)
    }
}

/// Result of [`closure_propagate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Closure {
    Fixpoint {
        a: BTreeSet<Vertex>,
        b: BTreeSet<Vertex>,
        undecided: BTreeSet<Vertex>,
    },
    /// Some vertex is forced onto both sides.
    Conflict { vertex: Vertex },
}

/// Smallest supersets of `a` and `b` closed under taking paths between
/// vertices of the same side, or the conflict that prevents them.
pub fn closure_propagate(
    ps: &PathSystem,
    a: &BTreeSet<Vertex>,
    b: &BTreeSet<Vertex>,
) -> Result<Closure> {
    if let Some(&v) = a.intersection(b).next() {
        return Err(Error::Overlap(v));
    }
    let g = ps.graph();
    let paths = Interiors::new(ps);
    let mut state = State::new(g.n());
    for (set, side) in [(a, Side::A), (b, Side::B)] {
        for &v in set {
            let i = g.require_index(v)?;
            if let Err(k) = state.assign(i, side, &paths) {
                return Ok(Closure::Conflict { vertex: g.label(k) });
            }
        }
    }
    let collect = |want: Option<Side>| -> BTreeSet<Vertex> {
        (0..g.n())
            .filter(|&i| state.side[i] == want)
            .map(|i| g.label(i))
            .collect()
    };
    Ok(Closure::Fixpoint {
        a: collect(Some(Side::A)),
        b: collect(Some(Side::B)),
        undecided: collect(None),
    })
}

/// Settings shared by all search strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of explored branches.
    pub budget: u64,
    /// Side that receives the smallest vertex.
    pub pinned: Side,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            budget: 100_000_000,
            pinned: Side::A,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found { reduction: Reduction, branches: u64 },
    /// The search space was exhausted without finding a reduction.
    CertifiedNone { branches: u64 },
}

impl SearchOutcome {
    pub fn reduction(&self) -> Option<&Reduction> {
        match self {
            SearchOutcome::Found { reduction, .. } => Some(reduction),
            SearchOutcome::CertifiedNone { .. } => None,
        }
    }

    pub fn branches(&self) -> u64 {
        match self {
            SearchOutcome::Found { branches, .. } | SearchOutcome::CertifiedNone { branches } => {
                *branches
            }
        }
    }
}

/// A complete decision procedure for reducibility.
pub trait ReductionSearch: Send + Sync {
    fn name(&self) -> &'static str;
    fn search(&self, ps: &PathSystem, options: &SearchOptions) -> Result<SearchOutcome>;
}

fn reduction_from(ps: &PathSystem, on_a: impl Fn(usize) -> bool) -> Reduction {
    let g = ps.graph();
    let (a, b) = (0..g.n()).partition::<Vec<_>, _>(|&i| on_a(i));
    Reduction {
        a: a.into_iter().map(|i| g.label(i)).collect(),
        b: b.into_iter().map(|i| g.label(i)).collect(),
    }
}

fn require_two(ps: &PathSystem) -> Result<()> {
    if ps.n() < 2 {
        return Err(Error::TooFewVertices(ps.n()));
    }
    Ok(())
}

/// Propagation with depth-first branching.
#[derive(Debug, Default, Clone, Copy)]
pub struct Propagate;

struct Dfs<'a> {
    paths: &'a Interiors,
    budget: u64,
    branches: u64,
}

impl Dfs<'_> {
    fn explore(&mut self, state: State) -> Result<Option<State>> {
        self.branches += 1;
        if self.branches > self.budget {
            return Err(Error::BudgetExhausted { budget: self.budget });
        }
        let Some(v) = state.first_undecided() else {
            return Ok(Some(state));
        };
        for side in [Side::A, Side::B] {
            let mut next = state.clone();
            if next.assign(v, side, self.paths).is_ok() {
                if let Some(done) = self.explore(next)? {
                    return Ok(Some(done));
                }
            }
        }
        Ok(None)
    }
}

impl ReductionSearch for Propagate {
    fn name(&self) -> &'static str {
        "propagate"
    }

    fn search(&self, ps: &PathSystem, options: &SearchOptions) -> Result<SearchOutcome> {
        require_two(ps)?;
        let paths = Interiors::new(ps);
        let pinned = options.pinned;
        let mut dfs = Dfs {
            paths: &paths,
            budget: options.budget,
            branches: 0,
        };
        // The seed is the smallest vertex off the pinned side, so every
        // vertex below it joins the pinned side.
        for seed in 1..ps.n() {
            let mut state = State::new(ps.n());
            let closed = (0..seed)
                .try_for_each(|v| state.assign(v, pinned, &paths))
                .and_then(|()| state.assign(seed, pinned.other(), &paths));
            if closed.is_err() {
                dfs.branches += 1;
                continue;
            }
            if let Some(done) = dfs.explore(state)? {
                let reduction = reduction_from(ps, |i| done.side[i] == Some(Side::A));
                return Ok(SearchOutcome::Found {
                    reduction,
                    branches: dfs.branches,
                });
            }
        }
        Ok(SearchOutcome::CertifiedNone {
            branches: dfs.branches,
        })
    }
}

/// Plain enumeration of every bipartition; only for small systems.
#[derive(Debug, Default, Clone, Copy)]
pub struct Enumerate;

pub const ENUMERATE_MAX_VERTICES: usize = 24;

impl ReductionSearch for Enumerate {
    fn name(&self) -> &'static str {
        "enumerate"
    }

    fn search(&self, ps: &PathSystem, options: &SearchOptions) -> Result<SearchOutcome> {
        require_two(ps)?;
        let n = ps.n();
        if n > ENUMERATE_MAX_VERTICES {
            return Err(Error::Graph(format!(
                "enumeration is limited to {ENUMERATE_MAX_VERTICES} vertices, got {n}"
            )));
        }
        let paths = Interiors::new(ps);
        let mut branches = 0;
        // bit i set: vertex i + 1 is off the pinned side
        for mask in 1u64..(1 << (n - 1)) {
            branches += 1;
            if branches > options.budget {
                return Err(Error::BudgetExhausted {
                    budget: options.budget,
                });
            }
            let off = |i: usize| i > 0 && mask >> (i - 1) & 1 == 1;
            let closed = (0..n).all(|i| {
                (i + 1..n)
                    .filter(|&j| off(i) == off(j))
                    .all(|j| paths.between(i, j).iter().all(|&k| off(k) == off(i)))
            });
            if closed {
                let on_a = |i: usize| off(i) == (options.pinned == Side::B);
                return Ok(SearchOutcome::Found {
                    reduction: reduction_from(ps, on_a),
                    branches,
                });
            }
        }
        Ok(SearchOutcome::CertifiedNone { branches })
    }
}

pub const DEFAULT_SEARCH: &str = "propagate";

fn registry() -> [&'static dyn ReductionSearch; 2] {
    [&Propagate, &Enumerate]
}

pub fn search_names() -> Vec<&'static str> {
    registry().iter().map(|s| s.name()).collect()
}

pub fn search_strategy(name: &str) -> Result<&'static dyn ReductionSearch> {
    registry()
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| Error::UnknownStrategy {
            kind: "reduction search",
            name: name.into(),
        })
}

/// Exhaustive search with the default strategy and budget.
pub fn find_reduction(ps: &PathSystem) -> Result<SearchOutcome> {
    Propagate.search(ps, &SearchOptions::default())
}

/// Translates a reduction of a path system on `F_p` by every `x` and
/// verifies each image; on a translation-invariant system all must pass.
pub fn translates_are_reductions(ps: &PathSystem, reduction: &Reduction) -> Result<bool> {
    let p = ps.field_order()?;
    let shift = |s: &BTreeSet<Vertex>, x: u64| -> BTreeSet<Vertex> {
        s.iter().map(|&v| ((v as u64 + x) % p) as Vertex).collect()
    };
    Ok((0..p).all(|x| {
        verify_reduction(ps, &shift(&reduction.a, x), &shift(&reduction.b, x)).is_valid()
    }))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::graph::Graph;
    use crate::numtheory::PrimeField;
    use crate::pathsys::{build_paley_system, petersen_fixture};

    fn set(v: impl IntoIterator<Item = Vertex>) -> BTreeSet<Vertex> {
        v.into_iter().collect()
    }

    /// Oracle: every bipartition, checked against the definition directly.
    fn brute_force_has_reduction(ps: &PathSystem) -> bool {
        let labels = ps.graph().labels().to_vec();
        let n = labels.len();
        (1u64..(1 << n) - 1).any(|mask| {
            let a = set((0..n).filter(|i| mask >> i & 1 == 1).map(|i| labels[i]));
            let b = set((0..n).filter(|i| mask >> i & 1 == 0).map(|i| labels[i]));
            let within = |s: &BTreeSet<Vertex>| {
                s.iter().all(|&u| {
                    s.iter()
                        .all(|&v| u == v || ps.path(u, v).unwrap().iter().all(|x| s.contains(x)))
                })
            };
            within(&a) && within(&b)
        })
    }

    #[test]
    fn petersen_figure_partition() {
        let (_, ps) = petersen_fixture();
        assert!(verify_reduction(&ps, &set(1..=5), &set(6..=10)).is_valid());
    }

    #[test]
    fn petersen_singleton_side() {
        let (_, ps) = petersen_fixture();
        let check = verify_reduction(&ps, &set([1]), &set(2..=10));
        let Some((u, v)) = check.violating_pair() else {
            panic!("expected an escaping pair, got {check:?}")
        };
        assert!(ps.path(u, v).unwrap().contains(&1));
        // the long path (2,1,6,8) is one of the violations
        assert!(ps.path(2, 8).unwrap().contains(&1));
        // earlier in label order, P_{2,5} = (2,1,5) already escapes
        assert_eq!((u, v), (2, 5));
    }

    #[test]
    fn malformed_bipartitions() {
        let (_, ps) = petersen_fixture();
        assert!(matches!(
            verify_reduction(&ps, &set([]), &set(1..=10)),
            ReductionCheck::NotBipartition(_)
        ));
        assert!(!verify_reduction(&ps, &set(1..=5), &set(5..=10)).is_valid());
        assert!(!verify_reduction(&ps, &set(1..=4), &set(6..=10)).is_valid());
        assert!(!verify_reduction(&ps, &set(1..=5), &set(6..=11)).is_valid());
    }

    #[test]
    fn closure_examples() {
        let pf = PrimeField::new(29).unwrap();
        let ps = build_paley_system(&pf).unwrap();
        let Closure::Fixpoint { a, .. } = closure_propagate(&ps, &set([0, 3]), &set([])).unwrap()
        else {
            panic!("no conflict expected")
        };
        assert!(a.is_superset(&set([0, 1, 2, 3])));

        let (_, petersen) = petersen_fixture();
        assert_eq!(
            closure_propagate(&petersen, &set([4]), &set([])).unwrap(),
            Closure::Fixpoint {
                a: set([4]),
                b: set([]),
                undecided: set((1..=10).filter(|&v| v != 4)),
            }
        );
        assert_eq!(
            closure_propagate(&petersen, &set([2, 8]), &set([1])).unwrap(),
            Closure::Conflict { vertex: 1 }
        );
        assert!(matches!(
            closure_propagate(&petersen, &set([2]), &set([2])),
            Err(Error::Overlap(2))
        ));
        assert!(matches!(
            closure_propagate(&petersen, &set([42]), &set([])),
            Err(Error::UnknownVertex(42))
        ));
    }

    #[test]
    fn petersen_is_reducible() {
        let (_, ps) = petersen_fixture();
        for name in search_names() {
            let outcome = search_strategy(name).unwrap().search(&ps, &SearchOptions::default()).unwrap();
            let r = outcome.reduction().expect("Petersen fixture is reducible");
            assert!(verify_reduction(&ps, &r.a, &r.b).is_valid(), "{name}");
            assert!(r.a.contains(&1));
        }
    }

    #[test]
    fn paley_29_is_irreducible() {
        let ps = build_paley_system(&PrimeField::new(29).unwrap()).unwrap();
        let outcome = find_reduction(&ps).unwrap();
        assert!(matches!(outcome, SearchOutcome::CertifiedNone { branches } if branches > 0));
        let swapped = Propagate
            .search(&ps, &SearchOptions { pinned: Side::B, ..Default::default() })
            .unwrap();
        assert!(swapped.reduction().is_none());
    }

    #[test]
    fn budget_is_enforced() {
        let ps = build_paley_system(&PrimeField::new(29).unwrap()).unwrap();
        let tight = SearchOptions { budget: 3, ..Default::default() };
        assert!(matches!(
            Propagate.search(&ps, &tight),
            Err(Error::BudgetExhausted { budget: 3 })
        ));
    }

    #[test]
    fn too_few_vertices() {
        let g = Graph::new([7], []).unwrap();
        let ps = PathSystem::new(g, Vec::<Vec<Vertex>>::new()).unwrap();
        assert!(matches!(find_reduction(&ps), Err(Error::TooFewVertices(1))));
    }

    #[test]
    fn four_cycle_with_bent_paths() {
        let g = Graph::new(1..=4, [(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap();
        let ps = PathSystem::new(
            g,
            [vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 1], vec![1, 2, 3], vec![2, 3, 4]],
        )
        .unwrap();
        let outcome = find_reduction(&ps).unwrap();
        assert_eq!(outcome.reduction().is_some(), brute_force_has_reduction(&ps));
    }

    #[test]
    fn translated_reductions() {
        // On the 5-cycle labelled by F_5 every pair of adjacent vertices is
        // a side of a reduction, and so are all its translates.
        let pf = PrimeField::new(5).unwrap();
        let g = crate::graph::paley_graph(&pf).unwrap();
        let ps = PathSystem::new(
            g,
            (0..5u32).flat_map(|a| [vec![a, (a + 1) % 5], vec![a, (a + 1) % 5, (a + 2) % 5]]),
        )
        .unwrap();
        let r = find_reduction(&ps).unwrap().reduction().cloned().unwrap();
        assert!(translates_are_reductions(&ps, &r).unwrap());
    }

    /// Random path systems: each pair gets a random simple path of the
    /// complete graph, forced to be valid but not necessarily consistent.
    fn random_system() -> impl Strategy<Value = PathSystem> {
        (2usize..=8).prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            proptest::collection::vec(proptest::collection::vec(0..n, 0..3), pairs).prop_map(
                move |middles| {
                    let edges = (0..n as Vertex)
                        .flat_map(|u| (u + 1..n as Vertex).map(move |v| (u, v)));
                    let g = Graph::new(0..n as Vertex, edges).unwrap();
                    let mut it = middles.into_iter();
                    let mut paths = Vec::new();
                    for u in 0..n {
                        for v in u + 1..n {
                            let mut path = vec![u as Vertex];
                            for m in it.next().unwrap() {
                                if m != u && m != v && !path.contains(&(m as Vertex)) {
                                    path.push(m as Vertex);
                                }
                            }
                            path.push(v as Vertex);
                            paths.push(path);
                        }
                    }
                    PathSystem::new(g, paths).unwrap()
                },
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn strategies_match_brute_force(ps in random_system()) {
            let expected = brute_force_has_reduction(&ps);
            for name in search_names() {
                for pinned in [Side::A, Side::B] {
                    let options = SearchOptions { pinned, ..Default::default() };
                    let outcome = search_strategy(name).unwrap().search(&ps, &options).unwrap();
                    prop_assert_eq!(outcome.reduction().is_some(), expected);
                    if let Some(r) = outcome.reduction() {
                        prop_assert!(verify_reduction(&ps, &r.a, &r.b).is_valid());
                        let smallest = ps.graph().label(0);
                        let pinned_side = if pinned == Side::A { &r.a } else { &r.b };
                        prop_assert!(pinned_side.contains(&smallest));
                    }
                }
            }
        }

        #[test]
        fn closure_is_monotone_and_idempotent(
            ps in random_system(),
            picks in proptest::collection::vec((0usize..8, any::<bool>()), 0..4),
        ) {
            let labels = ps.graph().labels().to_vec();
            let (mut a, mut b) = (BTreeSet::new(), BTreeSet::new());
            for (i, on_a) in picks {
                let v = labels[i % labels.len()];
                if !a.contains(&v) && !b.contains(&v) {
                    if on_a { a.insert(v); } else { b.insert(v); }
                }
            }
            if let Closure::Fixpoint { a: a1, b: b1, undecided } = closure_propagate(&ps, &a, &b).unwrap() {
                prop_assert!(a1.is_superset(&a) && b1.is_superset(&b));
                prop_assert_eq!(a1.len() + b1.len() + undecided.len(), labels.len());
                let again = closure_propagate(&ps, &a1, &b1).unwrap();
                prop_assert_eq!(again, Closure::Fixpoint { a: a1, b: b1, undecided });
            }
        }
    }
}
