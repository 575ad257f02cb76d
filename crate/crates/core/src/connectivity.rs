//! Strong components, the S-strong predicate and arc-strong connectivity.

use std::collections::VecDeque;

use crate::digraph::{Digraph, VertexId};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccDecomposition {
    /// Component index per vertex; components are numbered in reverse
    /// topological order of the condensation (sinks first).
    pub component_of: Vec<usize>,
    pub component_count: usize,
}

impl SccDecomposition {
    pub fn same_component(&self, u: VertexId, v: VertexId) -> bool {
        self.component_of[u] == self.component_of[v]
    }

    pub fn members(&self, c: usize) -> Vec<VertexId> {
        (0..self.component_of.len())
            .filter(|&v| self.component_of[v] == c)
            .collect()
    }

    pub fn component_size(&self, c: usize) -> usize {
        self.component_of.iter().filter(|&&x| x == c).count()
    }
}

/// Tarjan's algorithm with an explicit stack.
pub fn strong_components(d: &Digraph) -> SccDecomposition {
    const UNSEEN: usize = usize::MAX;
    let n = d.vertex_count();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut component_of = vec![UNSEEN; n];
    let mut next_index = 0;
    let mut count = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (vertex, position in its out-list)
        let mut call: Vec<(VertexId, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let succ = d.out_neighbors(v);
            if *pos < succ.len() {
                let w = succ[*pos];
                *pos += 1;
                if index[w] == UNSEEN {
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
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component_of[w] = count;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }

    SccDecomposition {
        component_of,
        component_count: count,
    }
}

pub fn is_strong(d: &Digraph) -> bool {
    d.vertex_count() >= 1 && strong_components(d).component_count == 1
}

/// All vertices of `s` lie in a single strong component of `d`.
pub fn is_s_strong(d: &Digraph, s: &[VertexId]) -> Result<bool> {
    if s.is_empty() {
        return Err(Error::input("S must be nonempty"));
    }
    d.check_vertex_set(s)?;
    let scc = strong_components(d);
    Ok(s.iter().all(|&v| scc.same_component(s[0], v)))
}

/// Unit-capacity residual network for repeated s-t max-flow calls.
struct UnitFlow {
    head: Vec<VertexId>,
    cap: Vec<u32>,
    adj: Vec<Vec<usize>>,
}

impl UnitFlow {
    fn new(d: &Digraph) -> Self {
        let n = d.vertex_count();
        let mut head = Vec::with_capacity(2 * d.arc_count());
        let mut cap = Vec::with_capacity(2 * d.arc_count());
        let mut adj = vec![Vec::new(); n];
        for a in d.arcs() {
            adj[a.tail].push(head.len());
            head.push(a.head);
            cap.push(1);
            adj[a.head].push(head.len());
            head.push(a.tail);
            cap.push(0);
        }
        UnitFlow { head, cap, adj }
    }

    fn reset(&mut self) {
        for (i, c) in self.cap.iter_mut().enumerate() {
            *c = if i % 2 == 0 { 1 } else { 0 };
        }
    }

    /// Max flow from `s` to `t`, stopping early once `limit` is reached.
    fn max_flow(&mut self, s: VertexId, t: VertexId, limit: usize) -> usize {
        self.reset();
        let n = self.adj.len();
        let mut flow = 0;
        let mut via = vec![usize::MAX; n];
        while flow < limit {
            via.iter_mut().for_each(|e| *e = usize::MAX);
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &e in &self.adj[u] {
                    let w = self.head[e];
                    if self.cap[e] > 0 && !seen[w] {
                        seen[w] = true;
                        via[w] = e;
                        queue.push_back(w);
                    }
                }
            }
            if !seen[t] {
                break;
            }
            let mut v = t;
            while v != s {
                let e = via[v];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                v = self.head[e ^ 1];
            }
            flow += 1;
        }
        flow
    }
}

/// λ(D): the minimum number of arcs whose removal leaves D non-strong.
///
/// Uses flows between vertex 0 and every other vertex in both directions;
/// every arc cut separates 0 from some vertex in one of the two directions.
pub fn arc_strong_connectivity(d: &Digraph) -> Result<usize> {
    let n = d.vertex_count();
    if n < 2 {
        return Err(Error::input("arc-strong connectivity needs at least two vertices"));
    }
    let mut net = UnitFlow::new(d);
    let mut best = (0..n).map(|v| d.out_degree(v).min(d.in_degree(v))).min().unwrap_or(0);
    for v in 1..n {
        if best == 0 {
            break;
        }
        best = best.min(net.max_flow(0, v, best));
        best = best.min(net.max_flow(v, 0, best));
    }
    Ok(best)
}
