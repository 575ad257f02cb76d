//! Strict digraphs on dense vertex indices.
//!
//! A [`Digraph`] has no loops and no parallel arcs; the opposite pair
//! `(u, v)`, `(v, u)` is allowed. Values are immutable once built.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub tail: VertexId,
    pub head: VertexId,
}

impl Arc {
    pub const fn new(tail: VertexId, head: VertexId) -> Self {
        Arc { tail, head }
    }

    pub fn reversed(self) -> Self {
        Arc::new(self.head, self.tail)
    }
}

impl From<(VertexId, VertexId)> for Arc {
    fn from((tail, head): (VertexId, VertexId)) -> Self {
        Arc::new(tail, head)
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.tail, self.head)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeProfile {
    pub in_deg: usize,
    pub out_deg: usize,
    pub total: usize,
}

impl DegreeProfile {
    fn new(in_deg: usize, out_deg: usize) -> Self {
        DegreeProfile {
            in_deg,
            out_deg,
            total: in_deg + out_deg,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<Arc>,
    matrix: Vec<bool>,
    out: Vec<Vec<VertexId>>,
    inc: Vec<Vec<VertexId>>,
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Digraph")
            .field("n", &self.n)
            .field("arcs", &self.arcs.iter().map(|a| (a.tail, a.head)).collect::<Vec<_>>())
            .finish()
    }
}

impl Digraph {
    /// Builds a strict digraph, rejecting loops, duplicates and out-of-range endpoints.
    pub fn new<I, A>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = A>,
        A: Into<Arc>,
    {
        let mut set = BTreeSet::new();
        for a in arcs {
            let a = a.into();
            check_vertex(n, a.tail)?;
            check_vertex(n, a.head)?;
            if a.tail == a.head {
                return Err(Error::Loop(a.tail));
            }
            if !set.insert(a) {
                return Err(Error::DuplicateArc(a.tail, a.head));
            }
        }
        Ok(Self::from_sorted(n, set.into_iter().collect()))
    }

    /// Like [`Digraph::new`] but collapses duplicate arcs instead of failing.
    pub fn from_arcs_dedup<I, A>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = A>,
        A: Into<Arc>,
    {
        let set: BTreeSet<Arc> = arcs.into_iter().map(Into::into).collect();
        Self::new(n, set)
    }

    fn from_sorted(n: usize, arcs: Vec<Arc>) -> Self {
        let mut matrix = vec![false; n * n];
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for a in &arcs {
            matrix[a.tail * n + a.head] = true;
            out[a.tail].push(a.head);
            inc[a.head].push(a.tail);
        }
        // arcs are sorted by (tail, head), so out-lists are sorted already
        for l in &mut inc {
            l.sort_unstable();
        }
        Digraph {
            n,
            arcs,
            matrix,
            out,
            inc,
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted(n, Vec::new())
    }

    /// The complete digraph K*_n with all n(n-1) arcs.
    pub fn complete(n: usize) -> Self {
        let arcs = (0..n)
            .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| Arc::new(u, v)))
            .collect();
        Self::from_sorted(n, arcs)
    }

    /// Directed cycle 0 -> 1 -> ... -> n-1 -> 0 (n >= 2).
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 2, "a directed cycle needs at least two vertices");
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle arcs are valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Arcs in lexicographic (tail, head) order.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.n
    }

    pub fn has_arc(&self, tail: VertexId, head: VertexId) -> bool {
        tail < self.n && head < self.n && self.matrix[tail * self.n + head]
    }

    /// Out-neighbours in increasing order.
    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.out[v]
    }

    /// In-neighbours in increasing order.
    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.inc[v]
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        check_vertex(self.n, v)
    }

    pub fn check_vertex_set(&self, set: &[VertexId]) -> Result<()> {
        set.iter().try_for_each(|&v| self.check_vertex(v))
    }

    pub fn degree_profile(&self, v: VertexId) -> Result<DegreeProfile> {
        self.check_vertex(v)?;
        Ok(DegreeProfile::new(self.inc[v].len(), self.out[v].len()))
    }

    /// d(v) = d⁻(v) + d⁺(v); panics on an out-of-range vertex.
    pub fn degree(&self, v: VertexId) -> usize {
        self.inc[v].len() + self.out[v].len()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.inc[v].len()
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out[v].len()
    }

    /// Degrees of `v` counting only neighbours inside `within`; `v` itself never counts.
    pub fn restricted_degree(&self, v: VertexId, within: &[VertexId]) -> Result<DegreeProfile> {
        self.check_vertex(v)?;
        self.check_vertex_set(within)?;
        let set: BTreeSet<VertexId> = within.iter().copied().filter(|&w| w != v).collect();
        let out_deg = set.iter().filter(|&&w| self.has_arc(v, w)).count();
        let in_deg = set.iter().filter(|&&w| self.has_arc(w, v)).count();
        Ok(DegreeProfile::new(in_deg, out_deg))
    }

    /// δ⁰(D) = min over vertices of min(d⁺, d⁻).
    pub fn min_semi_degree(&self) -> Result<usize> {
        self.vertices()
            .map(|v| self.in_degree(v).min(self.out_degree(v)))
            .min()
            .ok_or_else(|| Error::input("minimum semi-degree of the empty digraph"))
    }

    /// `[u, v]` is an arc in either orientation.
    pub fn are_adjacent(&self, u: VertexId, v: VertexId) -> Result<bool> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::input(format!("adjacency of {u} with itself")));
        }
        Ok(self.adjacent(u, v))
    }

    pub(crate) fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.has_arc(u, v) || self.has_arc(v, u)
    }

    pub fn is_semicomplete(&self) -> bool {
        self.vertices()
            .all(|u| (u + 1..self.n).all(|v| self.adjacent(u, v)))
    }

    /// Subdigraph induced by `keep`, reindexed in increasing order of original index.
    pub fn induced(&self, keep: &[VertexId]) -> Result<SubDigraph> {
        self.check_vertex_set(keep)?;
        let original: Vec<VertexId> = keep.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let mut index = vec![None; self.n];
        for (new, &old) in original.iter().enumerate() {
            index[old] = Some(new);
        }
        let arcs = self
            .arcs
            .iter()
            .filter_map(|a| Some(Arc::new(index[a.tail]?, index[a.head]?)))
            .collect();
        Ok(SubDigraph {
            digraph: Self::from_sorted(original.len(), arcs),
            original,
        })
    }

    /// Subdigraph whose arcs are `arcs` and whose vertices are their endpoints.
    pub fn arc_induced(&self, arcs: &[Arc]) -> Result<SubDigraph> {
        let mut set = BTreeSet::new();
        for &a in arcs {
            if !self.has_arc(a.tail, a.head) {
                return Err(Error::MissingArc(a.tail, a.head));
            }
            set.insert(a);
        }
        let original: Vec<VertexId> = set
            .iter()
            .flat_map(|a| [a.tail, a.head])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut index = vec![usize::MAX; self.n];
        for (new, &old) in original.iter().enumerate() {
            index[old] = new;
        }
        let mut mapped: Vec<Arc> = set
            .iter()
            .map(|a| Arc::new(index[a.tail], index[a.head]))
            .collect();
        mapped.sort_unstable();
        Ok(SubDigraph {
            digraph: Self::from_sorted(original.len(), mapped),
            original,
        })
    }

    /// Union over the common universe `0..max(n1, n2)`.
    pub fn union(&self, other: &Digraph) -> Digraph {
        let n = self.n.max(other.n);
        let set: BTreeSet<Arc> = self.arcs.iter().chain(&other.arcs).copied().collect();
        Self::from_sorted(n, set.into_iter().collect())
    }

    /// Copy of this digraph with extra arcs; existing arcs are kept once.
    pub fn with_arcs<I: IntoIterator<Item = Arc>>(&self, extra: I) -> Result<Digraph> {
        Self::from_arcs_dedup(self.n, self.arcs.iter().copied().chain(extra))
    }

    pub fn underlying_graph(&self) -> UndirectedGraph {
        let edges = self
            .arcs
            .iter()
            .map(|a| (a.tail.min(a.head), a.tail.max(a.head)))
            .collect::<BTreeSet<_>>();
        UndirectedGraph::from_sorted(self.n, edges.into_iter().collect())
    }
}

fn check_vertex(n: usize, v: VertexId) -> Result<()> {
    if v < n {
        Ok(())
    } else {
        Err(Error::VertexOutOfRange { vertex: v, n })
    }
}

/// An induced or arc-induced subdigraph with its vertex map back into the parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubDigraph {
    pub digraph: Digraph,
    /// `original[new] = old`, increasing.
    pub original: Vec<VertexId>,
}

impl SubDigraph {
    pub fn to_original(&self, v: VertexId) -> VertexId {
        self.original[v]
    }

    pub fn from_original(&self, v: VertexId) -> Option<VertexId> {
        self.original.binary_search(&v).ok()
    }
}

/// Simple undirected graph; edges stored as `(min, max)` pairs in sorted order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    adj: Vec<Vec<VertexId>>,
}

impl UndirectedGraph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            check_vertex(n, u)?;
            check_vertex(n, v)?;
            if u == v {
                return Err(Error::Loop(u));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::DuplicateArc(u, v));
            }
        }
        Ok(Self::from_sorted(n, set.into_iter().collect()))
    }

    fn from_sorted(n: usize, edges: Vec<(VertexId, VertexId)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        UndirectedGraph { n, edges, adj }
    }

    pub fn complete(n: usize) -> Self {
        Digraph::complete(n).underlying_graph()
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Subgraph induced by `keep`, returned in the original index space.
    pub fn restricted_to(&self, keep: &[VertexId]) -> UndirectedGraph {
        let mut mask = vec![false; self.n];
        for &v in keep {
            mask[v] = true;
        }
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| mask[u] && mask[v])
            .collect();
        Self::from_sorted(self.n, edges)
    }
}
