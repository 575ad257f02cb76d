//! Ditrails, closed ditrails and the exact searches over them.
//!
//! Two independent oracles decide whether a closed ditrail passes through
//! every vertex of a set `W`:
//!
//! * [`closed_ditrail_through`] extends a trail arc by arc from the smallest
//!   vertex of `W`, pruning on reachability over unused arcs;
//! * [`closed_ditrail_through_subsets`] branches over arc subsets looking for
//!   a balanced, connected subdigraph that meets `W`, then reads an Euler
//!   circuit off it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::connectivity::strong_components;
use crate::digraph::{Arc, Digraph, VertexId};
use crate::error::{Error, Result};
use crate::search::{Budget, Meter, Search};

/// A directed trail `v0 v1 ... vk`; arcs pairwise distinct. `k = 0` is allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Ditrail {
    vertices: Vec<VertexId>,
}

impl Ditrail {
    pub fn new(d: &Digraph, vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::input("a ditrail needs at least one vertex"));
        }
        d.check_vertex_set(&vertices)?;
        let mut seen = BTreeSet::new();
        for w in vertices.windows(2) {
            if !d.has_arc(w[0], w[1]) {
                return Err(Error::MissingArc(w[0], w[1]));
            }
            if !seen.insert((w[0], w[1])) {
                return Err(Error::input(format!("arc ({}, {}) repeated in ditrail", w[0], w[1])));
            }
        }
        Ok(Ditrail { vertices })
    }

    pub fn trivial(v: VertexId) -> Self {
        Ditrail { vertices: vec![v] }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn initial(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn terminal(&self) -> VertexId {
        *self.vertices.last().expect("nonempty")
    }

    /// Number of arcs.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_closed(&self) -> bool {
        self.len() >= 2 && self.initial() == self.terminal()
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.vertices.windows(2).map(|w| Arc::new(w[0], w[1]))
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.vertices.iter().copied().collect()
    }
}

/// A closed ditrail stored cyclically: arcs `c[i] -> c[(i + 1) % k]`, `k >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClosedDitrail {
    cycle: Vec<VertexId>,
}

impl ClosedDitrail {
    /// From a closed walk `v0 v1 ... vk` with `vk == v0`, checked against `d`.
    pub fn from_walk(d: &Digraph, walk: Vec<VertexId>) -> Result<Self> {
        let t = Ditrail::new(d, walk)?;
        if !t.is_closed() {
            return Err(Error::input("walk is not a closed ditrail of length >= 2"));
        }
        let mut cycle = t.vertices;
        cycle.pop();
        Ok(ClosedDitrail { cycle })
    }

    /// From the cyclic vertex order `v0 ... v(k-1)` (the closing arc is implied).
    pub fn from_cycle(d: &Digraph, mut cycle: Vec<VertexId>) -> Result<Self> {
        if let Some(&first) = cycle.first() {
            cycle.push(first);
        }
        Self::from_walk(d, cycle)
    }

    fn from_walk_unchecked(mut walk: Vec<VertexId>) -> Self {
        debug_assert!(walk.len() >= 3 && walk.first() == walk.last());
        walk.pop();
        ClosedDitrail { cycle: walk }
    }

    /// Cyclic vertex order, without repeating the first vertex.
    pub fn cyclic_vertices(&self) -> &[VertexId] {
        &self.cycle
    }

    /// `v0 v1 ... vk v0`.
    pub fn closed_sequence(&self) -> Vec<VertexId> {
        let mut s = self.cycle.clone();
        s.push(self.cycle[0]);
        s
    }

    pub fn arc_count(&self) -> usize {
        self.cycle.len()
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        let k = self.cycle.len();
        (0..k).map(move |i| Arc::new(self.cycle[i], self.cycle[(i + 1) % k]))
    }

    pub fn arc_set(&self) -> BTreeSet<Arc> {
        self.arcs().collect()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.cycle.contains(&v)
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.cycle.iter().copied().collect()
    }

    pub fn covers(&self, s: &[VertexId]) -> bool {
        s.iter().all(|&v| self.contains(v))
    }

    pub fn count_in(&self, s: &[VertexId]) -> usize {
        self.vertex_set().iter().filter(|v| s.contains(v)).count()
    }

    /// The same circuit started at the first occurrence of `v`.
    pub fn rotated_to(&self, v: VertexId) -> Option<ClosedDitrail> {
        let pos = self.cycle.iter().position(|&x| x == v)?;
        let mut cycle = self.cycle[pos..].to_vec();
        cycle.extend_from_slice(&self.cycle[..pos]);
        Some(ClosedDitrail { cycle })
    }

    /// Whether every vertex appears once (a dicycle).
    pub fn is_dicycle(&self) -> bool {
        self.vertex_set().len() == self.cycle.len()
    }

    /// Walk along the circuit from position `from` until the first later
    /// occurrence of `to`; the whole circuit when `to` equals the vertex at `from`.
    pub fn segment_from(&self, from: usize, to: VertexId) -> Option<Vec<VertexId>> {
        let k = self.cycle.len();
        let mut seg = vec![self.cycle[from]];
        for step in 1..=k {
            let v = self.cycle[(from + step) % k];
            seg.push(v);
            if v == to {
                return Some(seg);
            }
        }
        None
    }

    pub fn positions_of(&self, v: VertexId) -> Vec<usize> {
        (0..self.cycle.len()).filter(|&i| self.cycle[i] == v).collect()
    }
}

/// `Q[y, x]` followed by the `(x, y)`-ditrail `t`, starting from the
/// occurrence of `y` at `y_pos` in `q`.
pub(crate) fn splice_at(q: &ClosedDitrail, t: &Ditrail, y_pos: usize) -> Result<ClosedDitrail> {
    let x = t.initial();
    let y = t.terminal();
    if q.cycle.get(y_pos) != Some(&y) {
        return Err(Error::input(format!("position {y_pos} of Q is not vertex {y}")));
    }
    let seg = if x == y {
        let k = q.cycle.len();
        (0..=k).map(|i| q.cycle[(y_pos + i) % k]).collect()
    } else {
        q.segment_from(y_pos, x)
            .ok_or_else(|| Error::input(format!("vertex {x} is not on Q")))?
    };
    let seg_arcs: BTreeSet<Arc> = seg.windows(2).map(|w| Arc::new(w[0], w[1])).collect();
    if let Some(a) = t.arcs().find(|a| seg_arcs.contains(a)) {
        return Err(Error::Splice(format!("arc {a} used by both trails")));
    }
    if t.is_empty() && x != y {
        return Err(Error::Splice("empty ditrail between distinct vertices".into()));
    }
    let mut walk = seg;
    walk.extend_from_slice(&t.vertices()[1..]);
    Ok(ClosedDitrail::from_walk_unchecked(walk))
}

/// Closes `Q[y, x]` with the `(x, y)`-ditrail `t`.
///
/// `x` and `y` are read off `t`. When `x == y` the whole of `Q` (rotated to
/// `x`) is kept and `t` is a closed detour at `x`.
pub fn splice(q: &ClosedDitrail, t: &Ditrail, x: VertexId, y: VertexId) -> Result<ClosedDitrail> {
    if t.initial() != x || t.terminal() != y {
        return Err(Error::input(format!(
            "ditrail runs from {} to {}, expected ({x}, {y})",
            t.initial(),
            t.terminal()
        )));
    }
    if !q.contains(x) {
        return Err(Error::input(format!("vertex {x} is not on Q")));
    }
    let y_pos = q
        .positions_of(y)
        .first()
        .copied()
        .ok_or_else(|| Error::input(format!("vertex {y} is not on Q")))?;
    splice_at(q, t, y_pos)
}

/// An arc subset with the two facts Euler circuits need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedSubdigraph {
    arcs: Vec<Arc>,
    balanced: bool,
    connected: bool,
}

impl BalancedSubdigraph {
    pub fn new(arcs: Vec<Arc>) -> Self {
        let mut arcs = arcs;
        arcs.sort_unstable();
        arcs.dedup();
        let mut excess: BTreeMap<VertexId, i64> = BTreeMap::new();
        for a in &arcs {
            *excess.entry(a.tail).or_default() += 1;
            *excess.entry(a.head).or_default() -= 1;
        }
        let balanced = excess.values().all(|&e| e == 0);
        let connected = arcs_connected(&arcs);
        BalancedSubdigraph {
            arcs,
            balanced,
            connected,
        }
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_balanced(&self) -> bool {
        self.balanced
    }

    /// The underlying graph of the arc-induced subdigraph is connected.
    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.arcs.iter().flat_map(|a| [a.tail, a.head]).collect()
    }
}

fn arcs_connected(arcs: &[Arc]) -> bool {
    let verts: Vec<VertexId> = arcs
        .iter()
        .flat_map(|a| [a.tail, a.head])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if verts.is_empty() {
        return true;
    }
    let idx = |v: VertexId| verts.binary_search(&v).expect("endpoint");
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut parts = verts.len();
    for a in arcs {
        let (ra, rb) = (find(&mut parent, idx(a.tail)), find(&mut parent, idx(a.head)));
        if ra != rb {
            parent[ra] = rb;
            parts -= 1;
        }
    }
    parts == 1
}

/// Euler circuit of a nonempty, balanced, connected arc set, starting at `start`.
pub fn hierholzer(b: &BalancedSubdigraph, start: VertexId) -> Result<ClosedDitrail> {
    if b.arcs.is_empty() {
        return Err(Error::Contract("empty arc set has no Euler circuit".into()));
    }
    if !b.balanced {
        return Err(Error::Contract("arc set is not balanced".into()));
    }
    if !b.connected {
        return Err(Error::Contract("arc set is not connected".into()));
    }
    let mut succ: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for a in &b.arcs {
        succ.entry(a.tail).or_default().push(a.head);
    }
    if !succ.contains_key(&start) {
        return Err(Error::Contract(format!("vertex {start} is not incident to the arc set")));
    }
    // consume the smallest head first
    for list in succ.values_mut() {
        list.reverse();
    }
    let mut stack = vec![start];
    let mut circuit = Vec::with_capacity(b.arcs.len() + 1);
    while let Some(&v) = stack.last() {
        match succ.get_mut(&v).and_then(Vec::pop) {
            Some(w) => stack.push(w),
            None => circuit.push(stack.pop().expect("nonempty")),
        }
    }
    circuit.reverse();
    Ok(ClosedDitrail::from_walk_unchecked(circuit))
}

/// Arc ids grouped by endpoint, restricted to an allowed subset.
struct ArcTable {
    out: Vec<Vec<(VertexId, usize)>>,
    inc: Vec<Vec<(VertexId, usize)>>,
    arc_total: usize,
}

impl ArcTable {
    fn new(d: &Digraph, allowed: impl Fn(Arc) -> bool) -> Self {
        let n = d.vertex_count();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (id, &a) in d.arcs().iter().enumerate() {
            if allowed(a) {
                out[a.tail].push((a.head, id));
                inc[a.head].push((a.tail, id));
            }
        }
        ArcTable {
            out,
            inc,
            arc_total: d.arc_count(),
        }
    }

    /// Vertices reachable from `from` over unused arcs.
    fn forward(&self, from: VertexId, used: &[bool]) -> Vec<bool> {
        self.reach(from, used, &self.out)
    }

    /// Vertices that reach `to` over unused arcs.
    fn backward(&self, to: VertexId, used: &[bool]) -> Vec<bool> {
        self.reach(to, used, &self.inc)
    }

    fn reach(&self, root: VertexId, used: &[bool], lists: &[Vec<(VertexId, usize)>]) -> Vec<bool> {
        let mut seen = vec![false; lists.len()];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for &(w, id) in &lists[u] {
                if !used[id] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Shortest nonempty dipath from `from` to `to` over unused arcs,
    /// or the empty path when `from == to` and `allow_empty`.
    fn return_path(&self, from: VertexId, to: VertexId, used: &[bool], allow_empty: bool) -> Option<Vec<VertexId>> {
        if from == to && allow_empty {
            return Some(vec![from]);
        }
        let n = self.out.len();
        let mut prev: Vec<Option<VertexId>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &(w, id) in &self.out[u] {
                if used[id] {
                    continue;
                }
                if w == to {
                    let mut path = vec![to, u];
                    let mut cur = u;
                    while let Some(p) = prev[cur] {
                        path.push(p);
                        cur = p;
                    }
                    path.reverse();
                    return Some(path);
                }
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some(u);
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

enum Step {
    Found,
    Fail,
    Exhausted,
}

fn normalize_set(d: &Digraph, w: &[VertexId], what: &str) -> Result<Vec<VertexId>> {
    if w.is_empty() {
        return Err(Error::input(format!("{what} must be nonempty")));
    }
    d.check_vertex_set(w)?;
    Ok(w.iter().copied().collect::<BTreeSet<_>>().into_iter().collect())
}

struct ClosedTrailDfs<'a> {
    table: &'a ArcTable,
    used: Vec<bool>,
    target: Vec<bool>,
    visits: Vec<u32>,
    remaining: usize,
    start: VertexId,
    path: Vec<VertexId>,
}

impl ClosedTrailDfs<'_> {
    fn enter(&mut self, v: VertexId) {
        if self.target[v] && self.visits[v] == 0 {
            self.remaining -= 1;
        }
        self.visits[v] += 1;
        self.path.push(v);
    }

    fn leave(&mut self, v: VertexId) {
        self.path.pop();
        self.visits[v] -= 1;
        if self.target[v] && self.visits[v] == 0 {
            self.remaining += 1;
        }
    }

    fn dfs(&mut self, v: VertexId, meter: &mut Meter) -> Step {
        if !meter.tick() {
            return Step::Exhausted;
        }
        if self.remaining == 0 {
            let allow_empty = self.path.len() > 1;
            return match self.table.return_path(v, self.start, &self.used, allow_empty) {
                Some(back) => {
                    self.path.extend_from_slice(&back[1..]);
                    Step::Found
                }
                None => Step::Fail,
            };
        }
        let fwd = self.table.forward(v, &self.used);
        if !fwd[self.start] {
            return Step::Fail;
        }
        let bwd = self.table.backward(self.start, &self.used);
        for u in 0..self.target.len() {
            if self.target[u] && self.visits[u] == 0 && !(fwd[u] && bwd[u]) {
                return Step::Fail;
            }
        }
        let table = self.table;
        for &(h, id) in &table.out[v] {
            if self.used[id] {
                continue;
            }
            self.used[id] = true;
            self.enter(h);
            match self.dfs(h, meter) {
                Step::Found => return Step::Found,
                Step::Exhausted => return Step::Exhausted,
                Step::Fail => {}
            }
            self.leave(h);
            self.used[id] = false;
        }
        Step::Fail
    }
}

/// Exact search for a closed ditrail through every vertex of `w` (DFS oracle).
///
/// Starts at the smallest vertex of `w` and tries arcs in (tail, head)
/// order, so the witness is deterministic.
pub fn closed_ditrail_through(d: &Digraph, w: &[VertexId], budget: Budget) -> Result<Search<ClosedDitrail>> {
    closed_ditrail_through_metered(d, w, &mut Meter::new(budget))
}

pub fn closed_ditrail_through_metered(
    d: &Digraph,
    w: &[VertexId],
    meter: &mut Meter,
) -> Result<Search<ClosedDitrail>> {
    let w = normalize_set(d, w, "W")?;
    if !meter.tick() {
        return Ok(Search::Exhausted);
    }
    // closed ditrails live inside one strong component
    let scc = strong_components(d);
    let comp = scc.component_of[w[0]];
    if w.iter().any(|&v| scc.component_of[v] != comp) || scc.component_size(comp) < 2 {
        return Ok(Search::Absent);
    }
    let table = ArcTable::new(d, |a| scc.component_of[a.tail] == comp && scc.component_of[a.head] == comp);
    let n = d.vertex_count();
    let mut target = vec![false; n];
    for &v in &w {
        target[v] = true;
    }
    let mut dfs = ClosedTrailDfs {
        table: &table,
        used: vec![false; table.arc_total],
        target,
        visits: vec![0; n],
        remaining: w.len(),
        start: w[0],
        path: Vec::new(),
    };
    dfs.enter(w[0]);
    Ok(match dfs.dfs(w[0], meter) {
        Step::Found => Search::Found(ClosedDitrail::from_walk_unchecked(dfs.path)),
        Step::Fail => Search::Absent,
        Step::Exhausted => Search::Exhausted,
    })
}

struct SubsetSearch<'a> {
    arcs: &'a [Arc],
    include: Vec<bool>,
    excess: Vec<i64>,
    undecided: Vec<usize>,
    touched: Vec<usize>,
    target: &'a [VertexId],
}

impl SubsetSearch<'_> {
    fn feasible(&self, v: VertexId) -> bool {
        self.excess[v].unsigned_abs() as usize <= self.undecided[v]
    }

    fn go(&mut self, i: usize, meter: &mut Meter) -> Option<Search<Vec<Arc>>> {
        if !meter.tick() {
            return Some(Search::Exhausted);
        }
        if self.target.iter().any(|&t| self.touched[t] == 0 && self.undecided[t] == 0) {
            return None;
        }
        if i == self.arcs.len() {
            if self.excess.iter().any(|&e| e != 0) {
                return None;
            }
            let chosen: Vec<Arc> = (0..self.arcs.len())
                .filter(|&j| self.include[j])
                .map(|j| self.arcs[j])
                .collect();
            if chosen.is_empty() || !arcs_connected(&chosen) {
                return None;
            }
            return Some(Search::Found(chosen));
        }
        let a = self.arcs[i];
        self.undecided[a.tail] -= 1;
        self.undecided[a.head] -= 1;
        // include
        self.include[i] = true;
        self.excess[a.tail] += 1;
        self.excess[a.head] -= 1;
        self.touched[a.tail] += 1;
        self.touched[a.head] += 1;
        if self.feasible(a.tail) && self.feasible(a.head) {
            if let Some(r) = self.go(i + 1, meter) {
                return Some(r);
            }
        }
        self.include[i] = false;
        self.excess[a.tail] -= 1;
        self.excess[a.head] += 1;
        self.touched[a.tail] -= 1;
        self.touched[a.head] -= 1;
        // exclude
        if self.feasible(a.tail) && self.feasible(a.head) {
            if let Some(r) = self.go(i + 1, meter) {
                return Some(r);
            }
        }
        self.undecided[a.tail] += 1;
        self.undecided[a.head] += 1;
        None
    }
}

/// Exact search by arc subsets: a connected balanced subdigraph meeting all
/// of `w`, traversed by [`hierholzer`]. Independent of the DFS oracle; meant
/// for small arc counts.
pub fn closed_ditrail_through_subsets(
    d: &Digraph,
    w: &[VertexId],
    budget: Budget,
) -> Result<Search<ClosedDitrail>> {
    let w = normalize_set(d, w, "W")?;
    let n = d.vertex_count();
    let mut undecided = vec![0; n];
    for a in d.arcs() {
        undecided[a.tail] += 1;
        undecided[a.head] += 1;
    }
    let mut search = SubsetSearch {
        arcs: d.arcs(),
        include: vec![false; d.arc_count()],
        excess: vec![0; n],
        undecided,
        touched: vec![0; n],
        target: &w,
    };
    let mut meter = Meter::new(budget);
    match search.go(0, &mut meter) {
        None => Ok(Search::Absent),
        Some(Search::Exhausted) => Ok(Search::Exhausted),
        Some(Search::Absent) => Ok(Search::Absent),
        Some(Search::Found(arcs)) => {
            let b = BalancedSubdigraph::new(arcs);
            hierholzer(&b, w[0]).map(Search::Found)
        }
    }
}

pub fn is_closed_trailable(d: &Digraph, s: &[VertexId], budget: Budget) -> Result<Search<ClosedDitrail>> {
    closed_ditrail_through(d, s, budget)
}

/// Whether `d` has a spanning closed ditrail. Digraphs with fewer than two
/// vertices have none.
pub fn is_supereulerian(d: &Digraph, budget: Budget) -> Result<Search<ClosedDitrail>> {
    if d.vertex_count() < 2 {
        return Ok(Search::Absent);
    }
    let all: Vec<VertexId> = d.vertices().collect();
    closed_ditrail_through(d, &all, budget)
}

/// Nonadjacent pair of `s` lying on a common closed ditrail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictWitness {
    pub u: VertexId,
    pub v: VertexId,
    pub trail: ClosedDitrail,
}

/// Whether some nonadjacent pair of `s` lies on a closed ditrail of `d`.
///
/// Pairs are tried in lexicographic order. `Absent` means no pair works
/// (including when `s` has no nonadjacent pair at all).
pub fn is_s_strictly_strong(d: &Digraph, s: &[VertexId], budget: Budget) -> Result<Search<StrictWitness>> {
    let s = normalize_set(d, s, "S")?;
    if s.len() < 2 {
        return Err(Error::input("S-strict strength needs |S| >= 2"));
    }
    let mut meter = Meter::new(budget);
    if !meter.tick() {
        return Ok(Search::Exhausted);
    }
    let mut inconclusive = false;
    for (i, &u) in s.iter().enumerate() {
        for &v in &s[i + 1..] {
            if d.adjacent(u, v) {
                continue;
            }
            match closed_ditrail_through_metered(d, &[u, v], &mut meter)? {
                Search::Found(trail) => return Ok(Search::Found(StrictWitness { u, v, trail })),
                Search::Absent => {}
                Search::Exhausted => inconclusive = true,
            }
            if meter.exhausted() {
                return Ok(Search::Exhausted);
            }
        }
    }
    Ok(if inconclusive { Search::Exhausted } else { Search::Absent })
}

struct CycleDfs<'a> {
    d: &'a Digraph,
    target: Vec<bool>,
    on_path: Vec<bool>,
    remaining: usize,
    start: VertexId,
    path: Vec<VertexId>,
}

impl CycleDfs<'_> {
    fn dfs(&mut self, v: VertexId, meter: &mut Meter) -> Step {
        if !meter.tick() {
            return Step::Exhausted;
        }
        if self.remaining == 0 && self.path.len() >= 2 && self.d.has_arc(v, self.start) {
            return Step::Found;
        }
        // every missing target and the start must be reachable through fresh vertices
        let n = self.d.vertex_count();
        let mut seen = vec![false; n];
        seen[v] = true;
        let mut stack = vec![v];
        let mut back = false;
        while let Some(u) = stack.pop() {
            for &w in self.d.out_neighbors(u) {
                if w == self.start {
                    back = true;
                }
                if !seen[w] && !self.on_path[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if !back || (0..n).any(|u| self.target[u] && !self.on_path[u] && !seen[u]) {
            return Step::Fail;
        }
        for &w in self.d.out_neighbors(v) {
            if self.on_path[w] {
                continue;
            }
            self.on_path[w] = true;
            self.path.push(w);
            if self.target[w] {
                self.remaining -= 1;
            }
            match self.dfs(w, meter) {
                Step::Found => return Step::Found,
                Step::Exhausted => return Step::Exhausted,
                Step::Fail => {}
            }
            if self.target[w] {
                self.remaining += 1;
            }
            self.path.pop();
            self.on_path[w] = false;
        }
        Step::Fail
    }
}

/// Exact search for a dicycle (distinct vertices) through every vertex of `s`.
pub fn dicycle_through(d: &Digraph, s: &[VertexId], budget: Budget) -> Result<Search<ClosedDitrail>> {
    dicycle_through_metered(d, s, &mut Meter::new(budget))
}

pub fn dicycle_through_metered(d: &Digraph, s: &[VertexId], meter: &mut Meter) -> Result<Search<ClosedDitrail>> {
    let s = normalize_set(d, s, "S")?;
    if !meter.tick() {
        return Ok(Search::Exhausted);
    }
    let n = d.vertex_count();
    let mut target = vec![false; n];
    for &v in &s {
        target[v] = true;
    }
    let mut on_path = vec![false; n];
    on_path[s[0]] = true;
    let mut dfs = CycleDfs {
        d,
        target,
        on_path,
        remaining: s.len() - 1,
        start: s[0],
        path: vec![s[0]],
    };
    Ok(match dfs.dfs(s[0], meter) {
        Step::Found => Search::Found(ClosedDitrail { cycle: dfs.path }),
        Step::Fail => Search::Absent,
        Step::Exhausted => Search::Exhausted,
    })
}

struct SpanDfs<'a> {
    table: &'a ArcTable,
    used: Vec<bool>,
    target: Vec<bool>,
    visits: Vec<u32>,
    remaining: usize,
    end: VertexId,
    path: Vec<VertexId>,
}

impl SpanDfs<'_> {
    fn dfs(&mut self, v: VertexId, meter: &mut Meter) -> Step {
        if !meter.tick() {
            return Step::Exhausted;
        }
        if self.remaining == 0 && v == self.end {
            return Step::Found;
        }
        let fwd = self.table.forward(v, &self.used);
        if !fwd[self.end] || (0..fwd.len()).any(|u| self.target[u] && self.visits[u] == 0 && !fwd[u]) {
            return Step::Fail;
        }
        let table = self.table;
        for &(h, id) in &table.out[v] {
            if self.used[id] {
                continue;
            }
            self.used[id] = true;
            if self.visits[h] == 0 {
                self.remaining -= 1;
            }
            self.visits[h] += 1;
            self.path.push(h);
            match self.dfs(h, meter) {
                Step::Found => return Step::Found,
                Step::Exhausted => return Step::Exhausted,
                Step::Fail => {}
            }
            self.path.pop();
            self.visits[h] -= 1;
            if self.visits[h] == 0 {
                self.remaining += 1;
            }
            self.used[id] = false;
        }
        Step::Fail
    }
}

/// Exact search for a `(from, to)`-ditrail whose vertex set is exactly `vertex_set`.
pub fn ditrail_with_vertex_set(
    d: &Digraph,
    from: VertexId,
    to: VertexId,
    vertex_set: &[VertexId],
    budget: Budget,
) -> Result<Search<Ditrail>> {
    let set = normalize_set(d, vertex_set, "vertex set")?;
    if set.binary_search(&from).is_err() || set.binary_search(&to).is_err() {
        return Err(Error::input("trail endpoints must belong to the vertex set"));
    }
    let mut meter = Meter::new(budget);
    if !meter.tick() {
        return Ok(Search::Exhausted);
    }
    let n = d.vertex_count();
    let mut target = vec![false; n];
    for &v in &set {
        target[v] = true;
    }
    let inside = target.clone();
    let table = ArcTable::new(d, |a| inside[a.tail] && inside[a.head]);
    let mut visits = vec![0; n];
    visits[from] = 1;
    let mut dfs = SpanDfs {
        table: &table,
        used: vec![false; table.arc_total],
        target,
        visits,
        remaining: set.len() - 1,
        end: to,
        path: vec![from],
    };
    Ok(match dfs.dfs(from, &mut meter) {
        Step::Found => Search::Found(Ditrail { vertices: dfs.path }),
        Step::Fail => Search::Absent,
        Step::Exhausted => Search::Exhausted,
    })
}

/// Degree bound for a vertex that cannot be threaded into a trail.
///
/// With `T` a `(u1, uh)`-ditrail: when no `(u1, uh)`-ditrail has vertex set
/// `V(T) ∪ {x}`, then `d_T(x) <= |V(T)|`. Returns whether that implication
/// holds on this instance (the premise is decided exactly).
pub fn insertion_degree_bound_holds(d: &Digraph, t: &Ditrail, x: VertexId) -> Result<bool> {
    d.check_vertex(x)?;
    let on_t = t.vertex_set();
    let mut set: Vec<VertexId> = on_t.iter().copied().collect();
    set.push(x);
    let premise = ditrail_with_vertex_set(d, t.initial(), t.terminal(), &set, Budget::unlimited())?.is_absent();
    if !premise {
        return Ok(true);
    }
    let within: Vec<VertexId> = on_t.into_iter().collect();
    let deg = d.restricted_degree(x, &within)?.total;
    Ok(deg <= within.len())
}
