//! Simple undirected graphs with labelled vertices, and directed graphs
//! with strong-connectivity analysis.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::numtheory::PrimeField;
use crate::Vertex;

const NO_EDGE: u32 = u32::MAX;

/// Undirected simple graph. Vertices carry stable labels; internally they
/// are addressed by their position in the ascending label order.
#[derive(Debug, Clone)]
pub struct Graph {
    labels: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    adjacency: Vec<Vec<usize>>,
    edge_ids: Vec<u32>,
    edges: Vec<(usize, usize)>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds a graph; labels may come in any order but must be distinct.
    pub fn new(
        labels: impl IntoIterator<Item = Vertex>,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self> {
        let mut labels: Vec<Vertex> = labels.into_iter().collect();
        labels.sort_unstable();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Graph(format!("duplicate vertex label {}", w[0])));
        }
        let n = labels.len();
        let index: HashMap<Vertex, usize> =
            labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let mut pairs = BTreeSet::new();
        for (u, v) in edges {
            let i = *index.get(&u).ok_or(Error::UnknownVertex(u))?;
            let j = *index.get(&v).ok_or(Error::UnknownVertex(v))?;
            if i == j {
                return Err(Error::Graph(format!("self-loop at {u}")));
            }
            if !pairs.insert((i.min(j), i.max(j))) {
                return Err(Error::Graph(format!("parallel edge {{{u},{v}}}")));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut edge_ids = vec![NO_EDGE; n * n];
        let edges: Vec<(usize, usize)> = pairs.into_iter().collect();
        for (id, &(i, j)) in edges.iter().enumerate() {
            adjacency[i].push(j);
            adjacency[j].push(i);
            edge_ids[i * n + j] = id as u32;
            edge_ids[j * n + i] = id as u32;
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Self {
            labels,
            index,
            adjacency,
            edge_ids,
            edges,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Vertex labels, ascending.
    pub fn labels(&self) -> &[Vertex] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Vertex {
        self.labels[i]
    }

    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub(crate) fn require_index(&self, v: Vertex) -> Result<usize> {
        self.index_of(v).ok_or(Error::UnknownVertex(v))
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.index.contains_key(&v)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as label pairs `(u, v)` with `u < v`, in canonical order.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        self.edges
            .iter()
            .map(|&(i, j)| (self.labels[i], self.labels[j]))
            .collect()
    }

    /// Edges as index pairs; the position in this slice is the edge id.
    pub fn edge_indices(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_id(&self, i: usize, j: usize) -> Option<usize> {
        match self.edge_ids[i * self.n() + j] {
            NO_EDGE => None,
            id => Some(id as usize),
        }
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.edge_ids[i * self.n() + j] != NO_EDGE
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        match (self.index_of(u), self.index_of(v)) {
            (Some(i), Some(j)) => self.adjacent(i, j),
            _ => false,
        }
    }

    /// Neighbor indices of vertex index `i`, ascending.
    pub fn neighbors_of(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn neighbors(&self, v: Vertex) -> Result<BTreeSet<Vertex>> {
        let i = self.require_index(v)?;
        Ok(self.adjacency[i].iter().map(|&j| self.labels[j]).collect())
    }

    pub fn degree(&self, v: Vertex) -> Result<usize> {
        Ok(self.adjacency[self.require_index(v)?].len())
    }

    /// `(Γ(x) ∩ Γ(y)) \ Γ(z)` for pairwise distinct `x`, `y`, `z`.
    pub fn common_neighbors_excluding(
        &self,
        x: Vertex,
        y: Vertex,
        z: Vertex,
    ) -> Result<BTreeSet<Vertex>> {
        if x == y || y == z || x == z {
            return Err(Error::CoincidentVertices(vec![x, y, z]));
        }
        let (xi, yi, zi) = (
            self.require_index(x)?,
            self.require_index(y)?,
            self.require_index(z)?,
        );
        Ok(self.adjacency[xi]
            .iter()
            .filter(|&&w| self.adjacent(w, yi) && !self.adjacent(w, zi))
            .map(|&w| self.labels[w])
            .collect())
    }

    /// Subgraph induced on `s`, keeping labels.
    pub fn induced_subgraph(&self, s: &BTreeSet<Vertex>) -> Result<Graph> {
        for &v in s {
            self.require_index(v)?;
        }
        let edges = self
            .edges()
            .into_iter()
            .filter(|(u, v)| s.contains(u) && s.contains(v));
        Graph::new(s.iter().copied(), edges)
    }
}

/// Paley graph on `F_p`: `a ~ b` iff `a − b` is a nonzero square.
///
/// Requires `p ≡ 1 (mod 4)` so that the relation is symmetric.
pub fn paley_graph(pf: &PrimeField) -> Result<Graph> {
    let p = pf.p();
    if p % 4 != 1 {
        return Err(Error::AsymmetricResidues { p });
    }
    let mut edges = Vec::new();
    for a in 0..p {
        for b in a + 1..p {
            if pf.is_residue(b - a) {
                edges.push((a as Vertex, b as Vertex));
            }
        }
    }
    Graph::new((0..p).map(|a| a as Vertex), edges)
}

/// Petersen graph on 1..=10: outer cycle 1..5, spokes `i ~ i+5`, inner
/// pentagram 6-8-10-7-9-6.
pub fn petersen_graph() -> Graph {
    let mut edges = vec![(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)];
    edges.extend((1..=5).map(|i| (i, i + 5)));
    edges.extend([(6, 8), (8, 10), (10, 7), (7, 9), (9, 6)]);
    Graph::new(1..=10, edges).expect("well-formed fixture")
}

/// Directed graph on labelled vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    labels: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    successors: Vec<BTreeSet<usize>>,
}

/// Strongly connected components, each sorted, ordered by smallest label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccReport {
    pub strongly_connected: bool,
    pub components: Vec<Vec<Vertex>>,
}

impl Digraph {
    pub fn new(labels: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let mut labels: Vec<Vertex> = labels.into_iter().collect();
        labels.sort_unstable();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Graph(format!("duplicate vertex label {}", w[0])));
        }
        let index = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let successors = vec![BTreeSet::new(); labels.len()];
        Ok(Self {
            labels,
            index,
            successors,
        })
    }

    pub fn add_arc(&mut self, from: Vertex, to: Vertex) -> Result<()> {
        let i = *self.index.get(&from).ok_or(Error::UnknownVertex(from))?;
        let j = *self.index.get(&to).ok_or(Error::UnknownVertex(to))?;
        self.successors[i].insert(j);
        Ok(())
    }

    pub fn labels(&self) -> &[Vertex] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn has_arc(&self, from: Vertex, to: Vertex) -> bool {
        match (self.index.get(&from), self.index.get(&to)) {
            (Some(&i), Some(&j)) => self.successors[i].contains(&j),
            _ => false,
        }
    }

    pub fn arc_count(&self) -> usize {
        self.successors.iter().map(BTreeSet::len).sum()
    }

    pub fn arcs(&self) -> Vec<(Vertex, Vertex)> {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(i, succ)| succ.iter().map(move |&j| (i, j)))
            .map(|(i, j)| (self.labels[i], self.labels[j]))
            .collect()
    }

    pub fn successors(&self, v: Vertex) -> Result<Vec<Vertex>> {
        let i = *self.index.get(&v).ok_or(Error::UnknownVertex(v))?;
        Ok(self.successors[i].iter().map(|&j| self.labels[j]).collect())
    }

    /// Tarjan's algorithm, iterative so deep digraphs cannot overflow the stack.
    pub fn strongly_connected(&self) -> SccReport {
        let n = self.n();
        let succ: Vec<Vec<usize>> = self
            .successors
            .iter()
            .map(|s| s.iter().copied().collect())
            .collect();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut next_index = 0;
        let mut components: Vec<Vec<Vertex>> = Vec::new();

        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            // (vertex, position in its successor list)
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                if let Some(&w) = succ[v].get(*pos) {
                    *pos += 1;
                    if index[w] == usize::MAX {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        component.push(self.labels[w]);
                        if w == v {
                            break;
                        }
                    }
                    component.sort_unstable();
                    components.push(component);
                }
            }
        }
        components.sort_by_key(|c| c[0]);
        SccReport {
            strongly_connected: components.len() <= 1,
            components,
        }
    }
}
