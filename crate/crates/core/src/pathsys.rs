//! Path systems: one simple path per unordered pair of distinct vertices.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{paley_graph, petersen_graph, Graph};
use crate::numtheory::{require_admissible, PrimeField};
use crate::Vertex;

/// A total path system on a graph.
///
/// Paths are stored per unordered pair, oriented from the endpoint with the
/// smaller label to the one with the larger label. `P_{u,v}` and `P_{v,u}`
/// are the same object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSystem {
    graph: Graph,
    // indexed by i * n + j for vertex indices i < j
    paths: Vec<Vec<usize>>,
}

/// First consistency failure in canonical pair order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: Vec<Vertex>,
    pub x: Vertex,
    pub y: Vertex,
    pub subpath: Vec<Vertex>,
    pub stored: Vec<Vertex>,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "subpath {:?} of {:?} between {} and {} differs from stored path {:?}",
            self.subpath, self.path, self.x, self.y, self.stored
        )
    }
}

impl PathSystem {
    /// Validates and assembles a total path system. Each path may be given
    /// in either orientation.
    pub fn new(graph: Graph, paths: impl IntoIterator<Item = Vec<Vertex>>) -> Result<Self> {
        let n = graph.n();
        let mut slots: Vec<Option<Vec<usize>>> = vec![None; n * n];
        for path in paths {
            let (i, j, indices) = validate_path(&graph, &path)?;
            let slot = &mut slots[i * n + j];
            if slot.is_some() {
                return Err(Error::DuplicatePair(graph.label(i), graph.label(j)));
            }
            *slot = Some(indices);
        }
        let mut paths = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                match slots[i * n + j].take() {
                    Some(p) => paths[i * n + j] = p,
                    None => return Err(Error::MissingPair(graph.label(i), graph.label(j))),
                }
            }
        }
        Ok(Self { graph, paths })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn pair_count(&self) -> usize {
        let n = self.n();
        n * n.saturating_sub(1) / 2
    }

    /// Stored path between vertex indices, oriented from `i` to `j`.
    /// Returns an empty slice when `i == j`.
    pub(crate) fn indices_between(&self, i: usize, j: usize) -> std::borrow::Cow<'_, [usize]> {
        use std::borrow::Cow;
        match i.cmp(&j) {
            std::cmp::Ordering::Less => Cow::Borrowed(&self.paths[i * self.n() + j]),
            std::cmp::Ordering::Greater => {
                let mut p = self.paths[j * self.n() + i].clone();
                p.reverse();
                Cow::Owned(p)
            }
            std::cmp::Ordering::Equal => Cow::Borrowed(&[]),
        }
    }

    /// Stored path for `i < j`, oriented from `i`.
    pub(crate) fn canonical_indices(&self, i: usize, j: usize) -> &[usize] {
        debug_assert!(i < j);
        &self.paths[i * self.n() + j]
    }

    /// `P_{u,v}` traversed from `u` to `v`.
    pub fn path(&self, u: Vertex, v: Vertex) -> Result<Vec<Vertex>> {
        let i = self.graph.require_index(u)?;
        let j = self.graph.require_index(v)?;
        if i == j {
            return Err(Error::CoincidentVertices(vec![u, v]));
        }
        Ok(self.to_labels(&self.indices_between(i, j)))
    }

    /// All stored paths in canonical pair order, smaller endpoint first.
    pub fn paths(&self) -> impl Iterator<Item = Vec<Vertex>> + '_ {
        let n = self.n();
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .map(move |(i, j)| self.to_labels(&self.paths[i * n + j]))
    }

    fn to_labels(&self, indices: &[usize]) -> Vec<Vertex> {
        indices.iter().map(|&k| self.graph.label(k)).collect()
    }

    /// Copy with `P_{u,v}` replaced; the new path is validated against the graph.
    pub fn with_path(&self, path: Vec<Vertex>) -> Result<Self> {
        let (i, j, indices) = validate_path(&self.graph, &path)?;
        let mut out = self.clone();
        let n = self.n();
        out.paths[i * n + j] = indices;
        Ok(out)
    }

    /// Checks that every subpath of every stored path is itself stored.
    /// Returns the first violation in canonical pair order.
    pub fn find_inconsistency(&self) -> Option<Violation> {
        let n = self.n();
        for i in 0..n {
            for j in i + 1..n {
                let path = &self.paths[i * n + j];
                let k = path.len() - 1;
                for s in 0..k {
                    for t in s + 1..=k {
                        if s == 0 && t == k {
                            continue;
                        }
                        let sub = &path[s..=t];
                        let stored = self.indices_between(path[s], path[t]);
                        if sub != &*stored {
                            return Some(Violation {
                                path: self.to_labels(path),
                                x: self.graph.label(path[s]),
                                y: self.graph.label(path[t]),
                                subpath: self.to_labels(sub),
                                stored: self.to_labels(&stored),
                            });
                        }
                    }
                }
            }
        }
        None
    }

    pub fn is_consistent(&self) -> bool {
        self.find_inconsistency().is_none()
    }

    pub(crate) fn require_consistent(&self) -> Result<()> {
        match self.find_inconsistency() {
            None => Ok(()),
            Some(v) => Err(Error::Inconsistent(v.to_string())),
        }
    }

    /// The field order `p` when the vertex labels are exactly `0..p` for an odd prime `p`.
    pub fn field_order(&self) -> Result<u64> {
        let n = self.n() as u64;
        let labelled = self
            .graph
            .labels()
            .iter()
            .enumerate()
            .all(|(i, &l)| l as usize == i);
        if !labelled {
            return Err(Error::NotFieldLabelled(
                "labels are not 0..n".to_string(),
            ));
        }
        PrimeField::new(n)
            .map(|pf| pf.p())
            .map_err(|e| Error::NotFieldLabelled(e.to_string()))
    }

    /// Invariance under every translation `a ↦ a + x` of `F_p`.
    pub fn check_cyclic_symmetry(&self) -> Result<bool> {
        let p = self.field_order()? as usize;
        for i in 0..p {
            for j in i + 1..p {
                let path = &self.paths[i * p + j];
                for x in 1..p {
                    let shifted: Vec<usize> = path.iter().map(|&a| (a + x) % p).collect();
                    let (a, b) = (shifted[0], shifted[shifted.len() - 1]);
                    if shifted != *self.indices_between(a, b) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// The path system on `G[s]`, provided no path between vertices of `s` leaves `s`.
    pub fn restrict(&self, s: &BTreeSet<Vertex>) -> Result<PathSystem> {
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        let members: Vec<usize> = s
            .iter()
            .map(|&v| self.graph.require_index(v))
            .collect::<Result<_>>()?;
        let mut inside = vec![false; self.n()];
        for &i in &members {
            inside[i] = true;
        }
        let mut kept = Vec::new();
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                let path = self.canonical_indices(i, j);
                if let Some(&out) = path.iter().find(|&&k| !inside[k]) {
                    return Err(Error::PathEscapes {
                        u: self.graph.label(i),
                        v: self.graph.label(j),
                        escapee: self.graph.label(out),
                    });
                }
                kept.push(self.to_labels(path));
            }
        }
        PathSystem::new(self.graph.induced_subgraph(s)?, kept)
    }

    /// Serializes to the line-oriented `pathsystem v1` format.
    pub fn to_text(&self) -> String {
        let mut out = String::from("pathsystem v1\n");
        let labels = self.graph.labels();
        let _ = write!(out, "vertices {} labels", labels.len());
        for l in labels {
            let _ = write!(out, " {l}");
        }
        out.push('\n');
        for (u, v) in self.graph.edges() {
            let _ = writeln!(out, "edge {u} {v}");
        }
        for path in self.paths() {
            let _ = write!(out, "path {} {} :", path[0], path[path.len() - 1]);
            for v in &path {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the `pathsystem v1` format. Every error carries a line number.
    pub fn from_text(text: &str) -> Result<PathSystem> {
        let mut header_seen = false;
        let mut labels: Option<Vec<Vertex>> = None;
        let mut edges = Vec::new();
        let mut paths: Vec<(usize, Vec<Vertex>)> = Vec::new();
        let mut last_line = 0;

        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            last_line = line_no;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let keyword = words.next().unwrap_or_default();
            if !header_seen {
                if keyword != "pathsystem" || words.next() != Some("v1") || words.next().is_some() {
                    return Err(Error::parse(line_no, "expected header `pathsystem v1`"));
                }
                header_seen = true;
                continue;
            }
            match keyword {
                "vertices" => {
                    if labels.is_some() {
                        return Err(Error::parse(line_no, "duplicate `vertices` line"));
                    }
                    let count: usize = parse_number(words.next(), line_no, "vertex count")?;
                    if words.next() != Some("labels") {
                        return Err(Error::parse(line_no, "expected `labels` after vertex count"));
                    }
                    let ls: Vec<Vertex> = words
                        .map(|w| parse_number(Some(w), line_no, "label"))
                        .collect::<Result<_>>()?;
                    if ls.len() != count {
                        return Err(Error::parse(
                            line_no,
                            format!("declared {count} vertices but listed {}", ls.len()),
                        ));
                    }
                    labels = Some(ls);
                }
                "edge" => {
                    let u: Vertex = parse_number(words.next(), line_no, "edge endpoint")?;
                    let v: Vertex = parse_number(words.next(), line_no, "edge endpoint")?;
                    if words.next().is_some() {
                        return Err(Error::parse(line_no, "trailing tokens after edge"));
                    }
                    edges.push((line_no, u, v));
                }
                "path" => {
                    let u: Vertex = parse_number(words.next(), line_no, "path endpoint")?;
                    let v: Vertex = parse_number(words.next(), line_no, "path endpoint")?;
                    if words.next() != Some(":") {
                        return Err(Error::parse(line_no, "expected `:` after path endpoints"));
                    }
                    let body: Vec<Vertex> = words
                        .map(|w| parse_number(Some(w), line_no, "path vertex"))
                        .collect::<Result<_>>()?;
                    if body.first() != Some(&u) || body.last() != Some(&v) {
                        return Err(Error::parse(
                            line_no,
                            format!("path body does not run from {u} to {v}"),
                        ));
                    }
                    paths.push((line_no, body));
                }
                other => {
                    return Err(Error::parse(line_no, format!("unknown directive `{other}`")));
                }
            }
        }

        if !header_seen {
            return Err(Error::parse(last_line.max(1), "missing header `pathsystem v1`"));
        }
        let labels =
            labels.ok_or_else(|| Error::parse(last_line, "missing `vertices` line"))?;
        let mut graph_edges = Vec::with_capacity(edges.len());
        let mut seen_edges = BTreeSet::new();
        for &(line_no, u, v) in &edges {
            if !seen_edges.insert((u.min(v), u.max(v))) {
                return Err(Error::parse(line_no, format!("duplicate edge {{{u},{v}}}")));
            }
            graph_edges.push((u, v));
        }
        let graph = Graph::new(labels, graph_edges).map_err(|e| {
            let line = edges.first().map_or(last_line, |e| e.0);
            Error::parse(line, e.to_string())
        })?;
        let n = graph.n();
        let mut seen = vec![false; n * n];
        for (line_no, body) in &paths {
            let (i, j, _) =
                validate_path(&graph, body).map_err(|e| Error::parse(*line_no, e.to_string()))?;
            if std::mem::replace(&mut seen[i * n + j], true) {
                return Err(Error::parse(
                    *line_no,
                    format!("pair {{{},{}}} has more than one path", graph.label(i), graph.label(j)),
                ));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if !seen[i * n + j] {
                    return Err(Error::parse(
                        last_line,
                        format!("pair {{{},{}}} has no path", graph.label(i), graph.label(j)),
                    ));
                }
            }
        }
        PathSystem::new(graph, paths.into_iter().map(|(_, p)| p))
    }
}

fn parse_number<T: std::str::FromStr>(word: Option<&str>, line: usize, what: &str) -> Result<T> {
    let word = word.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    word.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{word}`")))
}

/// Returns `(i, j, indices)` with `i < j` the endpoint indices and the path
/// oriented from `i`.
fn validate_path(graph: &Graph, path: &[Vertex]) -> Result<(usize, usize, Vec<usize>)> {
    let invalid = |reason: &str| Error::InvalidPath {
        path: path.to_vec(),
        reason: reason.to_string(),
    };
    if path.len() < 2 {
        return Err(invalid("fewer than two vertices"));
    }
    let mut indices: Vec<usize> = path
        .iter()
        .map(|&v| graph.require_index(v))
        .collect::<Result<_>>()?;
    let distinct: BTreeSet<usize> = indices.iter().copied().collect();
    if distinct.len() != indices.len() {
        return Err(invalid("repeated vertex"));
    }
    if let Some(w) = indices.windows(2).find(|w| !graph.adjacent(w[0], w[1])) {
        return Err(invalid(&format!(
            "{{{},{}}} is not an edge",
            graph.label(w[0]),
            graph.label(w[1])
        )));
    }
    let (first, last) = (indices[0], indices[indices.len() - 1]);
    if first > last {
        indices.reverse();
    }
    Ok((first.min(last), first.max(last), indices))
}

/// The translation-invariant path system on the Paley graph `G_p`:
/// residue differences are edges, difference `3` walks `a, a+1, a+2, a+3`,
/// and every other nonresidue difference goes through the midpoint.
pub fn build_paley_system(pf: &PrimeField) -> Result<PathSystem> {
    require_admissible(pf)?;
    let p = pf.p();
    let graph = paley_graph(pf)?;
    let mut paths = Vec::with_capacity((p * (p - 1) / 2) as usize);
    for a in 0..p {
        for b in a + 1..p {
            let d = b - a;
            let path = if pf.is_residue(d) {
                vec![a, b]
            } else if d == 3 {
                vec![a, a + 1, a + 2, b]
            } else if d == p - 3 {
                // b + 3 = a: the pair is covered by the difference-3 rule read from b
                vec![b, pf.add(b, 1), pf.add(b, 2), a]
            } else {
                vec![a, pf.div(pf.add(a, b), 2), b]
            };
            paths.push(path.into_iter().map(|v| v as Vertex).collect());
        }
    }
    PathSystem::new(graph, paths)
}

/// Exceptional pairs of the Petersen fixture and their rerouted paths.
///
/// The five paths are read off the colored edges of the reference drawing
/// (the surrounding text does not list them); every other nonadjacent pair
/// uses its unique path of length two.
pub const PETERSEN_EXCEPTIONS: [[Vertex; 4]; 5] = [
    [2, 1, 6, 8],
    [1, 5, 10, 7],
    [3, 2, 7, 9],
    [4, 3, 8, 10],
    [5, 4, 9, 6],
];

/// Consistent, non-metrizable, reducible path system on the Petersen graph.
pub fn petersen_fixture() -> (Graph, PathSystem) {
    let graph = petersen_graph();
    let exceptional = |u: Vertex, v: Vertex| {
        PETERSEN_EXCEPTIONS.iter().find(|p| {
            (p[0] == u && p[3] == v) || (p[0] == v && p[3] == u)
        })
    };
    let mut paths = Vec::new();
    for u in 1..=10 {
        for v in u + 1..=10 {
            if graph.has_edge(u, v) {
                paths.push(vec![u, v]);
            } else if let Some(p) = exceptional(u, v) {
                paths.push(p.to_vec());
            } else {
                let nu = graph.neighbors(u).expect("vertex");
                let nv = graph.neighbors(v).expect("vertex");
                let mid = *nu.intersection(&nv).next().expect("diameter two");
                paths.push(vec![u, mid, v]);
            }
        }
    }
    let ps = PathSystem::new(graph.clone(), paths).expect("well-formed fixture");
    (graph, ps)
}
