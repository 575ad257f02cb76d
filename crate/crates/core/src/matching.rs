//! Maximum matchings in general graphs (Edmonds' blossom search), augmenting
//! paths, and the structure forced on the unmatched vertices of `H = D⟨S⟩`
//! when the minimum semi-degree reaches the matching number.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::digraph::{Arc, Digraph, UndirectedGraph, VertexId};
use crate::error::{Error, Result};

/// Pairwise vertex-disjoint edges, stored as sorted `(min, max)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Matching {
    edges: Vec<(VertexId, VertexId)>,
}

impl Matching {
    pub fn empty() -> Self {
        Matching::default()
    }

    /// Checks that every pair is an edge of `g` and that pairs are disjoint.
    pub fn new<I>(g: &UndirectedGraph, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut used = BTreeSet::new();
        let mut edges = Vec::new();
        for (u, v) in pairs {
            if !g.has_edge(u, v) {
                return Err(Error::input(format!("{{{u}, {v}}} is not an edge")));
            }
            if !used.insert(u) || !used.insert(v) {
                return Err(Error::input(format!("edge {{{u}, {v}}} shares a vertex")));
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        Ok(Matching { edges })
    }

    fn from_mate(mate: &[Option<VertexId>]) -> Self {
        let edges = mate
            .iter()
            .enumerate()
            .filter_map(|(u, &m)| m.filter(|&v| u < v).map(|v| (u, v)))
            .collect();
        Matching { edges }
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn covered(&self) -> BTreeSet<VertexId> {
        self.edges.iter().flat_map(|&(u, v)| [u, v]).collect()
    }

    pub fn mate_of(&self, v: VertexId) -> Option<VertexId> {
        self.edges.iter().find_map(|&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }

    fn mate_vector(&self, n: usize) -> Vec<Option<VertexId>> {
        let mut mate = vec![None; n];
        for &(u, v) in &self.edges {
            mate[u] = Some(v);
            mate[v] = Some(u);
        }
        mate
    }

    /// The lexicographically smallest arc of `h` realizing each matched pair.
    pub fn witness_arcs(&self, h: &Digraph) -> Result<Vec<Arc>> {
        self.edges
            .iter()
            .map(|&(u, v)| {
                if h.has_arc(u, v) {
                    Ok(Arc::new(u, v))
                } else if h.has_arc(v, u) {
                    Ok(Arc::new(v, u))
                } else {
                    Err(Error::MissingArc(u, v))
                }
            })
            .collect()
    }

    /// Whether this is a matching of `g` at all.
    pub fn is_matching_of(&self, g: &UndirectedGraph) -> bool {
        Matching::new(g, self.edges.iter().copied()).is_ok()
    }
}

struct Blossom<'a> {
    g: &'a UndirectedGraph,
    mate: Vec<Option<VertexId>>,
    parent: Vec<Option<VertexId>>,
    base: Vec<VertexId>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
}

impl<'a> Blossom<'a> {
    fn new(g: &'a UndirectedGraph, mate: Vec<Option<VertexId>>) -> Self {
        let n = g.vertex_count();
        Blossom {
            g,
            mate,
            parent: vec![None; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
        }
    }

    fn lca(&self, mut a: VertexId, mut b: VertexId) -> VertexId {
        let mut on_path = vec![false; self.base.len()];
        loop {
            a = self.base[a];
            on_path[a] = true;
            match self.mate[a] {
                Some(m) => a = self.parent[m].expect("outer vertex has a tree parent"),
                None => break,
            }
        }
        loop {
            b = self.base[b];
            if on_path[b] {
                return b;
            }
            let m = self.mate[b].expect("walk reaches the root");
            b = self.parent[m].expect("outer vertex has a tree parent");
        }
    }

    fn mark_path(&mut self, mut v: VertexId, b: VertexId, mut child: VertexId) {
        while self.base[v] != b {
            let m = self.mate[v].expect("blossom path alternates");
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[m]] = true;
            self.parent[v] = Some(child);
            child = m;
            v = self.parent[m].expect("outer vertex has a tree parent");
        }
    }

    /// Grows an alternating tree from `root`; returns the free vertex reached.
    fn search(&mut self, root: VertexId) -> Option<VertexId> {
        let n = self.base.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = None);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &to in self.g.neighbors(v) {
                if self.base[v] == self.base[to] || self.mate[v] == Some(to) {
                    continue;
                }
                let to_is_outer = to == root || self.mate[to].is_some_and(|m| self.parent[m].is_some());
                if to_is_outer {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to].is_none() {
                    self.parent[to] = Some(v);
                    match self.mate[to] {
                        None => return Some(to),
                        Some(m) => {
                            self.used[m] = true;
                            queue.push_back(m);
                        }
                    }
                }
            }
        }
        None
    }

    /// Alternating path from the free vertex `end` back to the tree root.
    fn path_to_root(&self, end: VertexId) -> Vec<VertexId> {
        let mut path = vec![end];
        let mut v = end;
        loop {
            let pv = self.parent[v].expect("tree parent");
            path.push(pv);
            match self.mate[pv] {
                Some(next) => {
                    path.push(next);
                    v = next;
                }
                None => break,
            }
        }
        path
    }

    fn augment(&mut self, path: &[VertexId]) {
        for pair in path.chunks(2) {
            self.mate[pair[0]] = Some(pair[1]);
            self.mate[pair[1]] = Some(pair[0]);
        }
    }

    fn find_any(&mut self) -> Option<Vec<VertexId>> {
        for root in 0..self.base.len() {
            if self.mate[root].is_none() {
                if let Some(end) = self.search(root) {
                    return Some(self.path_to_root(end));
                }
            }
        }
        None
    }
}

/// An `M`-augmenting path of `g`, listed from one free endpoint to the other.
///
/// `None` exactly when `m` is a maximum matching.
pub fn find_augmenting_path(g: &UndirectedGraph, m: &Matching) -> Result<Option<Vec<VertexId>>> {
    if !m.is_matching_of(g) {
        return Err(Error::input("M is not a matching of G"));
    }
    let mut b = Blossom::new(g, m.mate_vector(g.vertex_count()));
    Ok(b.find_any().map(|mut p| {
        p.reverse();
        p
    }))
}

/// A maximum-cardinality matching of `g`.
pub fn maximum_matching(g: &UndirectedGraph) -> Matching {
    let n = g.vertex_count();
    let mut b = Blossom::new(g, vec![None; n]);
    for root in 0..n {
        if b.mate[root].is_none() {
            if let Some(end) = b.search(root) {
                let path = b.path_to_root(end);
                b.augment(&path);
            }
        }
    }
    Matching::from_mate(&b.mate)
}

/// α′(D⟨S⟩).
pub fn matching_number_digraph(d: &Digraph, s: &[VertexId]) -> Result<usize> {
    if s.is_empty() {
        return Err(Error::input("S must be nonempty"));
    }
    let h = d.induced(s)?;
    Ok(maximum_matching(&h.digraph.underlying_graph()).size())
}

fn unmatched_vertices(h: &Digraph, m: &Matching) -> Vec<VertexId> {
    let covered = m.covered();
    h.vertices().filter(|v| !covered.contains(v)).collect()
}

fn check_matching_of_digraph(h: &Digraph, m: &Matching) -> Result<UndirectedGraph> {
    let g = h.underlying_graph();
    if !m.is_matching_of(&g) {
        return Err(Error::Precondition("M is not a matching of H".into()));
    }
    Ok(g)
}

/// With every unmatched vertex of degree at least `2m - 1` in `h`, one
/// unmatched vertex of degree at least `2m + 1` forces an augmenting path.
///
/// `x` must be exactly the unmatched vertices. Returns whether the forced
/// conclusion holds on this instance (vacuously `true` when no vertex reaches
/// `2m + 1`). Unmet hypotheses are reported as [`Error::Precondition`].
pub fn augmenting_degree_check(h: &Digraph, m: &Matching, x: &[VertexId]) -> Result<bool> {
    let g = check_matching_of_digraph(h, m)?;
    let size = m.size();
    if size == 0 {
        return Err(Error::Precondition("matching must be nonempty".into()));
    }
    let expected = unmatched_vertices(h, m);
    let given: Vec<VertexId> = x.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if given != expected {
        return Err(Error::Precondition("X must be exactly the unmatched vertices".into()));
    }
    if given.len() < 2 {
        return Err(Error::Precondition("need at least two unmatched vertices".into()));
    }
    if let Some(&low) = given.iter().find(|&&v| h.degree(v) + 1 < 2 * size) {
        return Err(Error::Precondition(format!(
            "unmatched vertex {low} has degree {} < 2m - 1 = {}",
            h.degree(low),
            2 * size - 1
        )));
    }
    if given.iter().any(|&v| h.degree(v) > 2 * size) {
        Ok(find_augmenting_path(&g, m)?.is_some())
    } else {
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeLabel {
    pub edge: (VertexId, VertexId),
    /// Endpoint joined to every unmatched vertex by arcs in both directions.
    pub v_e: VertexId,
    /// Endpoint with no unmatched neighbour.
    pub u_e: VertexId,
}

/// Two unmatched vertices whose sides form disjoint complete digraphs K*_{m+1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoCliqueSplit {
    pub x: VertexId,
    pub x_prime: VertexId,
    pub m_x: Vec<(VertexId, VertexId)>,
    pub m_x_prime: Vec<(VertexId, VertexId)>,
    /// `V(M_x) ∪ {x}`
    pub side_a: Vec<VertexId>,
    /// `V(M_x') ∪ {x'}`
    pub side_b: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnmatchedStructure {
    pub m: usize,
    /// `X = V(H) - V(M)`
    pub unmatched: Vec<VertexId>,
    /// Populated in the general case.
    pub labels: Vec<EdgeLabel>,
    /// `{u(e)}`; populated in the general case.
    pub independent_set: Vec<VertexId>,
    pub special_case: Option<TwoCliqueSplit>,
}

/// Matched edges with at least one endpoint adjacent to `x`.
pub fn edges_seen_by(h: &Digraph, m: &Matching, x: VertexId) -> Vec<(VertexId, VertexId)> {
    m.edges()
        .iter()
        .copied()
        .filter(|&(a, b)| h.adjacent(a, x) || h.adjacent(b, x))
        .collect()
}

/// Whether `|X| = 2` and one of the unmatched vertices sees exactly `m/2` matched edges.
pub fn two_clique_case(h: &Digraph, m: &Matching) -> Option<(VertexId, VertexId)> {
    let x = unmatched_vertices(h, m);
    if x.len() != 2 || m.size() == 0 {
        return None;
    }
    let half = |v| 2 * edges_seen_by(h, m, v).len() == m.size();
    (half(x[0]) || half(x[1])).then_some((x[0], x[1]))
}

fn both_ways(h: &Digraph, a: VertexId, b: VertexId) -> bool {
    h.has_arc(a, b) && h.has_arc(b, a)
}

fn violation(msg: String) -> Error {
    Error::LemmaViolation(msg)
}

/// Structure of a maximum matching `m` of `h` when `δ⁰(h) >= |m| > 0` and at
/// least two vertices are unmatched.
///
/// Every unmatched vertex has in- and out-degree exactly `m`. Then either the
/// two-vertex special case splits `h` into two complete digraphs on `m + 1`
/// vertices with no arcs between them, or every matched edge `e` has an
/// endpoint `v(e)` joined both ways to all unmatched vertices while the other
/// endpoint `u(e)` sees none of them; the `u(e)` form an independent set
/// joined both ways to every `v(e')`.
///
/// Unmet hypotheses give [`Error::Precondition`]; a hypothesis-satisfying
/// instance without the structure gives [`Error::LemmaViolation`].
pub fn analyze_unmatched_structure(h: &Digraph, m: &Matching) -> Result<UnmatchedStructure> {
    let g = check_matching_of_digraph(h, m)?;
    let size = m.size();
    if size == 0 {
        return Err(Error::Precondition("matching must be nonempty".into()));
    }
    if find_augmenting_path(&g, m)?.is_some() {
        return Err(Error::Precondition("M is not maximum".into()));
    }
    let unmatched = unmatched_vertices(h, m);
    if unmatched.len() < 2 {
        return Err(Error::Precondition("need at least two unmatched vertices".into()));
    }
    let delta = h.min_semi_degree()?;
    if delta < size {
        return Err(Error::Precondition(format!("minimum semi-degree {delta} < m = {size}")));
    }

    for &x in &unmatched {
        if h.in_degree(x) != size || h.out_degree(x) != size {
            return Err(violation(format!(
                "unmatched vertex {x} has semi-degrees ({}, {}), expected {size}",
                h.in_degree(x),
                h.out_degree(x)
            )));
        }
    }

    if let Some((x, x_prime)) = two_clique_case(h, m) {
        let m_x = edges_seen_by(h, m, x);
        let m_x_prime = edges_seen_by(h, m, x_prime);
        let side = |edges: &[(VertexId, VertexId)], apex: VertexId| {
            let mut s: Vec<VertexId> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
            s.push(apex);
            s.sort_unstable();
            s
        };
        let split = TwoCliqueSplit {
            side_a: side(&m_x, x),
            side_b: side(&m_x_prime, x_prime),
            x,
            x_prime,
            m_x,
            m_x_prime,
        };
        check_split(h, size, &split)?;
        return Ok(UnmatchedStructure {
            m: size,
            unmatched,
            labels: Vec::new(),
            independent_set: Vec::new(),
            special_case: Some(split),
        });
    }

    let mut labels = Vec::with_capacity(size);
    for &(a, b) in m.edges() {
        let a_all = unmatched.iter().all(|&x| both_ways(h, a, x));
        let b_all = unmatched.iter().all(|&x| both_ways(h, b, x));
        let (v_e, u_e) = match (a_all, b_all) {
            (true, false) => (a, b),
            (false, true) => (b, a),
            (true, true) => {
                return Err(violation(format!("both ends of {{{a}, {b}}} see every unmatched vertex")))
            }
            (false, false) => {
                return Err(violation(format!(
                    "no end of {{{a}, {b}}} is joined both ways to every unmatched vertex"
                )))
            }
        };
        if let Some(&x) = unmatched.iter().find(|&&x| h.adjacent(u_e, x)) {
            return Err(violation(format!("u(e) = {u_e} is adjacent to unmatched vertex {x}")));
        }
        labels.push(EdgeLabel { edge: (a, b), v_e, u_e });
    }
    let structure = UnmatchedStructure {
        m: size,
        independent_set: labels.iter().map(|l| l.u_e).collect(),
        unmatched,
        labels,
        special_case: None,
    };
    structure.validate(h)?;
    Ok(structure)
}

fn check_split(h: &Digraph, size: usize, split: &TwoCliqueSplit) -> Result<()> {
    for side in [&split.side_a, &split.side_b] {
        if side.len() != size + 1 {
            return Err(violation(format!("side {side:?} has {} vertices, expected {}", side.len(), size + 1)));
        }
        for &a in side.iter() {
            for &b in side.iter() {
                if a != b && !h.has_arc(a, b) {
                    return Err(violation(format!("side {side:?} misses arc ({a}, {b})")));
                }
            }
        }
    }
    for &a in &split.side_a {
        if split.side_b.contains(&a) {
            return Err(violation(format!("vertex {a} lies on both sides")));
        }
        for &b in &split.side_b {
            if h.adjacent(a, b) {
                return Err(violation(format!("cross arc between {a} and {b}")));
            }
        }
    }
    Ok(())
}

impl UnmatchedStructure {
    /// Re-checks every claimed property by direct arc inspection.
    pub fn validate(&self, h: &Digraph) -> Result<()> {
        for &x in &self.unmatched {
            if h.in_degree(x) != self.m || h.out_degree(x) != self.m {
                return Err(violation(format!("unmatched vertex {x} is not of semi-degree m")));
            }
        }
        if let Some(split) = &self.special_case {
            return check_split(h, self.m, split);
        }
        if self.labels.len() != self.m {
            return Err(violation("one label per matched edge expected".into()));
        }
        for l in &self.labels {
            for &x in &self.unmatched {
                if !both_ways(h, l.v_e, x) {
                    return Err(violation(format!("v(e) = {} not joined both ways to {x}", l.v_e)));
                }
                if h.adjacent(l.u_e, x) {
                    return Err(violation(format!("u(e) = {} adjacent to {x}", l.u_e)));
                }
            }
            if h.in_degree(l.u_e) != self.m || h.out_degree(l.u_e) != self.m {
                return Err(violation(format!("u(e) = {} is not of semi-degree m", l.u_e)));
            }
            for other in &self.labels {
                if !both_ways(h, l.u_e, other.v_e) {
                    return Err(violation(format!(
                        "u(e) = {} not joined both ways to v(e') = {}",
                        l.u_e, other.v_e
                    )));
                }
            }
        }
        for (i, &a) in self.independent_set.iter().enumerate() {
            for &b in &self.independent_set[i + 1..] {
                if h.adjacent(a, b) {
                    return Err(violation(format!("{{u(e)}} not independent: {a} ~ {b}")));
                }
            }
        }
        Ok(())
    }
}
