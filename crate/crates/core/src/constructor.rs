//! Best-effort assembly of a closed ditrail through S from local moves:
//! external-path splicing, 2-cycle absorption and two-clique bridging.
//!
//! The moves are not complete. When they stall, the exact oracle decides,
//! and every trail handed out has been re-checked by the validator.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::connectivity::strong_components;
use crate::digraph::{Arc, Digraph, VertexId};
use crate::error::{Error, Result};
use crate::matching::{analyze_unmatched_structure, maximum_matching, two_clique_case};
use crate::search::{Budget, Meter, Search};
use crate::trails::{closed_ditrail_through_metered, splice_at, ClosedDitrail, Ditrail};
use crate::validator;

/// Above this many vertices the minimal external path pair is chosen greedily.
pub const EXACT_PATH_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    Initial,
    ExternalPath,
    TwoCycle,
    Bridge,
    Fallback,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoveRecord {
    #[serde(rename = "move")]
    pub kind: MoveKind,
    pub parameters: BTreeMap<&'static str, Vec<VertexId>>,
    pub trail_len: usize,
    /// Set when a greedy choice replaced an exact minimisation.
    pub approximate: bool,
}

/// The current closed ditrail together with the target set and the move log.
#[derive(Clone, Debug)]
pub struct AugmentationState {
    s: Vec<VertexId>,
    q: ClosedDitrail,
    moves: Vec<MoveRecord>,
}

impl AugmentationState {
    pub fn new(d: &Digraph, s: &[VertexId], q: ClosedDitrail) -> Result<Self> {
        let s = normalize(d, s)?;
        if !validator::validate_closed_trail(d, &q.closed_sequence()) {
            return Err(Error::input("Q is not a closed ditrail of D"));
        }
        let trail_len = q.arc_count();
        let mut params = BTreeMap::new();
        params.insert("trail", q.closed_sequence());
        Ok(AugmentationState {
            s,
            q,
            moves: vec![MoveRecord {
                kind: MoveKind::Initial,
                parameters: params,
                trail_len,
                approximate: false,
            }],
        })
    }

    pub fn trail(&self) -> &ClosedDitrail {
        &self.q
    }

    pub fn s(&self) -> &[VertexId] {
        &self.s
    }

    pub fn covered(&self) -> Vec<VertexId> {
        self.s.iter().copied().filter(|&v| self.q.contains(v)).collect()
    }

    pub fn pending(&self) -> Vec<VertexId> {
        self.s.iter().copied().filter(|&v| !self.q.contains(v)).collect()
    }

    pub fn coverage(&self) -> usize {
        self.q.count_in(&self.s)
    }

    pub fn moves(&self) -> &[MoveRecord] {
        &self.moves
    }

    fn accept(
        &mut self,
        d: &Digraph,
        q: ClosedDitrail,
        kind: MoveKind,
        parameters: BTreeMap<&'static str, Vec<VertexId>>,
        approximate: bool,
    ) -> Result<()> {
        if !validator::validate_closed_trail(d, &q.closed_sequence()) {
            return Err(Error::Contract(format!("{kind:?} produced an invalid trail {:?}", q.closed_sequence())));
        }
        let before = self.coverage();
        let after = q.count_in(&self.s);
        if after <= before {
            return Err(Error::Contract(format!("{kind:?} did not increase coverage ({before} -> {after})")));
        }
        self.moves.push(MoveRecord {
            kind,
            parameters,
            trail_len: q.arc_count(),
            approximate,
        });
        self.q = q;
        Ok(())
    }
}

fn normalize(d: &Digraph, s: &[VertexId]) -> Result<Vec<VertexId>> {
    if s.is_empty() {
        return Err(Error::input("S must be nonempty"));
    }
    d.check_vertex_set(s)?;
    Ok(s.iter().copied().collect::<BTreeSet<_>>().into_iter().collect())
}

/// Shortest dicycle through `v`, preferring lexicographically smaller successors.
fn shortest_dicycle_through(d: &Digraph, v: VertexId) -> Option<Vec<VertexId>> {
    let n = d.vertex_count();
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &w in d.out_neighbors(v) {
        if w != v && parent[w] == usize::MAX {
            parent[w] = v;
            queue.push_back(w);
        }
    }
    while let Some(u) = queue.pop_front() {
        if d.has_arc(u, v) {
            let mut cycle = vec![u];
            let mut c = u;
            while parent[c] != v {
                c = parent[c];
                cycle.push(c);
            }
            cycle.push(v);
            cycle.reverse();
            return Some(cycle);
        }
        for &w in d.out_neighbors(u) {
            if w != v && parent[w] == usize::MAX {
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    None
}

/// A closed ditrail meeting S, from the shortest dicycles through S-vertices;
/// the one meeting the most of S wins, then the shorter, then the earlier seed.
pub fn initial_trail(d: &Digraph, s: &[VertexId]) -> Result<ClosedDitrail> {
    let s = normalize(d, s)?;
    let mut best: Option<(usize, usize, Vec<VertexId>)> = None;
    for &v in &s {
        let Some(cycle) = shortest_dicycle_through(d, v) else {
            continue;
        };
        let hits = cycle.iter().filter(|c| s.binary_search(c).is_ok()).count();
        let better = match &best {
            None => true,
            Some((h, len, _)) => hits > *h || (hits == *h && cycle.len() < *len),
        };
        if better {
            best = Some((hits, cycle.len(), cycle));
        }
    }
    match best {
        Some((_, _, cycle)) => ClosedDitrail::from_cycle(d, cycle),
        None => Err(Error::ConstructionImpossible("no closed ditrail meets S".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MoveOutcome {
    Applied,
    Failed(String),
}

/// Shortest `(s, y)`-dipaths for every `y` on Q, interior off Q, avoiding `forbidden`.
fn paths_back_to_q(
    d: &Digraph,
    on_q: &[bool],
    s: VertexId,
    forbidden: &BTreeSet<Arc>,
) -> Vec<Vec<VertexId>> {
    let n = d.vertex_count();
    let mut parent = vec![usize::MAX; n];
    let mut reached_q = vec![false; n];
    let mut ends = Vec::new();
    let mut queue = VecDeque::from([s]);
    parent[s] = s;
    while let Some(u) = queue.pop_front() {
        for &w in d.out_neighbors(u) {
            if forbidden.contains(&Arc::new(u, w)) {
                continue;
            }
            if on_q[w] {
                if !reached_q[w] {
                    reached_q[w] = true;
                    let mut path = vec![w, u];
                    let mut c = u;
                    while c != s {
                        c = parent[c];
                        path.push(c);
                    }
                    path.reverse();
                    ends.push(path);
                }
            } else if parent[w] == usize::MAX {
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    ends
}

/// All `(x, s)`-dipaths with `x` on Q, interior off Q, at most `max_arcs` arcs.
fn paths_from_q(
    d: &Digraph,
    on_q: &[bool],
    s: VertexId,
    max_arcs: usize,
    meter: &mut Meter,
) -> Option<Vec<Vec<VertexId>>> {
    fn go(
        d: &Digraph,
        on_q: &[bool],
        rev: &mut Vec<VertexId>,
        on_path: &mut [bool],
        max_arcs: usize,
        out: &mut Vec<Vec<VertexId>>,
        meter: &mut Meter,
    ) -> bool {
        if !meter.tick() {
            return false;
        }
        let c = *rev.last().unwrap();
        for &p in d.in_neighbors(c) {
            if on_q[p] {
                let mut path = rev.clone();
                path.push(p);
                path.reverse();
                out.push(path);
            } else if !on_path[p] && rev.len() < max_arcs {
                on_path[p] = true;
                rev.push(p);
                let ok = go(d, on_q, rev, on_path, max_arcs, out, meter);
                rev.pop();
                on_path[p] = false;
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    let mut on_path = vec![false; d.vertex_count()];
    on_path[s] = true;
    let mut out = Vec::new();
    go(d, on_q, &mut vec![s], &mut on_path, max_arcs, &mut out, meter).then_some(out)
}

/// The single shortest `(x, s)`-dipath from Q, by backward search.
fn shortest_path_from_q(d: &Digraph, on_q: &[bool], s: VertexId) -> Option<Vec<VertexId>> {
    let n = d.vertex_count();
    let mut next = vec![usize::MAX; n];
    next[s] = s;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &p in d.in_neighbors(u) {
            if on_q[p] {
                let mut path = vec![p, u];
                let mut c = u;
                while c != s {
                    c = next[c];
                    path.push(c);
                }
                return Some(path);
            }
            if next[p] == usize::MAX {
                next[p] = u;
                queue.push_back(p);
            }
        }
    }
    None
}

struct Candidate {
    p1: Vec<VertexId>,
    p2: Vec<VertexId>,
}

impl Candidate {
    fn arcs(&self) -> usize {
        self.p1.len() + self.p2.len() - 2
    }

    fn key(&self) -> (usize, VertexId, VertexId, &[VertexId], &[VertexId]) {
        (self.arcs(), self.p1[0], *self.p2.last().unwrap(), &self.p1, &self.p2)
    }
}

fn arc_set(path: &[VertexId]) -> BTreeSet<Arc> {
    path.windows(2).map(|w| Arc::new(w[0], w[1])).collect()
}

/// Splices the first candidate that raises coverage; `Ok(false)` when none does.
fn try_candidates(
    d: &Digraph,
    state: &mut AugmentationState,
    s: VertexId,
    mut cands: Vec<Candidate>,
    approximate: bool,
) -> Result<bool> {
    cands.sort_by(|a, b| a.key().cmp(&b.key()));
    let before = state.coverage();
    for c in cands {
        let mut walk = c.p1.clone();
        walk.extend_from_slice(&c.p2[1..]);
        let Ok(t) = Ditrail::new(d, walk) else {
            continue;
        };
        let y = t.terminal();
        for pos in state.q.positions_of(y) {
            let Ok(r) = splice_at(&state.q, &t, pos) else {
                continue;
            };
            if r.count_in(&state.s) > before {
                let overlap: Vec<VertexId> = c.p1[1..c.p1.len() - 1]
                    .iter()
                    .copied()
                    .filter(|v| c.p2[1..c.p2.len() - 1].contains(v))
                    .collect();
                let mut params = BTreeMap::new();
                params.insert("s", vec![s]);
                params.insert("p1", c.p1.clone());
                params.insert("p2", c.p2.clone());
                params.insert("overlap", overlap);
                state.accept(d, r, MoveKind::ExternalPath, params, approximate)?;
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn external_path_for(d: &Digraph, state: &mut AugmentationState, s: VertexId, meter: &mut Meter) -> Result<MoveOutcome> {
    let n = d.vertex_count();
    let mut on_q = vec![false; n];
    for &v in state.q.cyclic_vertices() {
        on_q[v] = true;
    }
    if n > EXACT_PATH_LIMIT {
        let Some(p1) = shortest_path_from_q(d, &on_q, s) else {
            return Ok(MoveOutcome::Failed(format!("no dipath from Q to {s}")));
        };
        let cands = paths_back_to_q(d, &on_q, s, &arc_set(&p1))
            .into_iter()
            .map(|p2| Candidate { p1: p1.clone(), p2 })
            .collect();
        return Ok(if try_candidates(d, state, s, cands, true)? {
            MoveOutcome::Applied
        } else {
            MoveOutcome::Failed(format!("greedy dipath pair through {s} does not raise coverage"))
        });
    }
    // exact: grow the total length until a minimal pair raises coverage
    let mut any_p1 = false;
    for total in 2..=2 * n {
        let Some(p1s) = paths_from_q(d, &on_q, s, total - 1, meter) else {
            return Ok(MoveOutcome::Failed("budget exhausted".into()));
        };
        any_p1 |= !p1s.is_empty();
        let mut cands = Vec::new();
        for p1 in p1s {
            for p2 in paths_back_to_q(d, &on_q, s, &arc_set(&p1)) {
                let c = Candidate { p1: p1.clone(), p2 };
                if c.arcs() == total {
                    cands.push(c);
                }
            }
        }
        if try_candidates(d, state, s, cands, false)? {
            return Ok(MoveOutcome::Applied);
        }
        if !any_p1 && total > n {
            break;
        }
    }
    Ok(MoveOutcome::Failed(if any_p1 {
        format!("no dipath pair through {s} raises coverage")
    } else {
        format!("no dipath from Q to {s}")
    }))
}

/// Threads the first pending vertex it can through an `(x, y)`-ditrail
/// meeting Q only in `x` and `y`, built from a minimal pair of dipaths
/// `x -> s` and `s -> y`. Failure leaves the state untouched.
pub fn augment_via_external_path(d: &Digraph, state: &mut AugmentationState, meter: &mut Meter) -> Result<MoveOutcome> {
    let mut reasons = Vec::new();
    for s in state.pending() {
        match external_path_for(d, state, s, meter)? {
            MoveOutcome::Applied => return Ok(MoveOutcome::Applied),
            MoveOutcome::Failed(r) => reasons.push(r),
        }
        if meter.exhausted() {
            break;
        }
    }
    Ok(MoveOutcome::Failed(if reasons.is_empty() {
        "nothing pending".into()
    } else {
        reasons.join("; ")
    }))
}

/// Adds the detour `w -> x -> w` at `w` on Q.
pub fn absorb_two_cycle(d: &Digraph, state: &mut AugmentationState, x: VertexId, w: VertexId) -> Result<()> {
    d.check_vertex(x)?;
    d.check_vertex(w)?;
    if state.q.contains(x) {
        return Err(Error::MoveInapplicable(format!("{x} already lies on Q")));
    }
    let Some(&pos) = state.q.positions_of(w).first() else {
        return Err(Error::MoveInapplicable(format!("{w} is not on Q")));
    };
    if !d.has_arc(x, w) || !d.has_arc(w, x) {
        return Err(Error::MoveInapplicable(format!("{x} and {w} are not joined both ways")));
    }
    let t = Ditrail::new(d, vec![w, x, w])?;
    let r = splice_at(&state.q, &t, pos)?;
    if r.count_in(&state.s) <= state.coverage() {
        return Err(Error::MoveInapplicable(format!("{x} is not in S")));
    }
    let mut params = BTreeMap::new();
    params.insert("x", vec![x]);
    params.insert("w", vec![w]);
    state.accept(d, r, MoveKind::TwoCycle, params, false)
}

fn spanning_route(side: &[VertexId], from: VertexId, to: VertexId) -> Vec<VertexId> {
    let mut route = vec![from];
    route.extend(side.iter().copied().filter(|&v| v != from && v != to));
    route.push(to);
    route
}

/// Replaces the parts of Q inside two disjoint complete digraphs of equal
/// order by spanning ditrails of each, keeping the two connecting stretches
/// of Q between them.
pub fn bridge_components(
    d: &Digraph,
    state: &mut AugmentationState,
    comp_a: &[VertexId],
    comp_b: &[VertexId],
) -> Result<()> {
    let a: Vec<VertexId> = comp_a.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let b: Vec<VertexId> = comp_b.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    d.check_vertex_set(&a)?;
    d.check_vertex_set(&b)?;
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Precondition("components need m >= 1".into()));
    }
    if a.len() != b.len() {
        return Err(Error::Precondition("components differ in order".into()));
    }
    for side in [&a, &b] {
        for &u in side.iter() {
            for &v in side.iter() {
                if u != v && !d.has_arc(u, v) {
                    return Err(Error::Precondition(format!("component {side:?} misses arc ({u}, {v})")));
                }
            }
        }
    }
    if a.iter().any(|&u| b.iter().any(|&v| u == v || d.adjacent(u, v))) {
        return Err(Error::Precondition("components overlap or are joined".into()));
    }

    let cyc = state.q.cyclic_vertices();
    let k = cyc.len();
    // 1 = A, 2 = B, 0 = elsewhere
    let label = |p: usize| {
        let v = cyc[p % k];
        if a.binary_search(&v).is_ok() {
            1
        } else if b.binary_search(&v).is_ok() {
            2
        } else {
            0
        }
    };
    if !(0..k).any(|p| label(p) == 1) || !(0..k).any(|p| label(p) == 2) {
        return Err(Error::MoveInapplicable("Q does not visit both components".into()));
    }
    let next_labelled = |p: usize| (1..=k).map(|step| p + step).find(|&t| label(t) != 0).unwrap();
    let leave_a = (0..k)
        .find(|&p| label(p) == 1 && label(next_labelled(p)) == 2)
        .expect("Q alternates between the components");
    let enter_b = next_labelled(leave_a);
    let mut leave_b = enter_b;
    while label(next_labelled(leave_b)) == 2 {
        leave_b = next_labelled(leave_b);
    }
    let enter_a = next_labelled(leave_b);

    let at = |p: usize| cyc[p % k];
    let mut walk: Vec<VertexId> = (leave_a..=enter_b).map(at).collect();
    walk.extend_from_slice(&spanning_route(&b, at(enter_b), at(leave_b))[1..]);
    walk.extend((leave_b + 1..=enter_a).map(at));
    walk.extend_from_slice(&spanning_route(&a, at(enter_a), at(leave_a))[1..]);
    let r = ClosedDitrail::from_walk(d, walk)
        .map_err(|e| Error::Contract(format!("bridged walk is not a closed ditrail: {e}")))?;
    if r.count_in(&state.s) <= state.coverage() {
        return Err(Error::MoveInapplicable("bridging does not raise coverage".into()));
    }
    let mut params = BTreeMap::new();
    params.insert("component_a", a.clone());
    params.insert("component_b", b.clone());
    params.insert("junctions", vec![at(leave_a), at(enter_b), at(leave_b), at(enter_a)]);
    state.accept(d, r, MoveKind::Bridge, params, false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionStatus {
    Success,
    CertifiedImpossible,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub status: ConstructionStatus,
    pub trail: Option<ClosedDitrail>,
    pub moves: Vec<MoveRecord>,
    /// Whether the exact oracle had to finish the job.
    pub fallback_used: bool,
    pub expansions: u64,
    pub exhausted: bool,
}

/// The two cliques of H = D⟨S⟩ when a maximum matching leaves exactly two
/// vertices unmatched in the split configuration, in original labels.
fn two_clique_sides(d: &Digraph, s: &[VertexId]) -> Option<(Vec<VertexId>, Vec<VertexId>)> {
    let h = d.induced(s).ok()?;
    let m = maximum_matching(&h.digraph.underlying_graph());
    if m.size() == 0 || h.digraph.min_semi_degree().ok()? < m.size() {
        return None;
    }
    two_clique_case(&h.digraph, &m)?;
    let split = analyze_unmatched_structure(&h.digraph, &m).ok()?.special_case?;
    let map = |side: &[VertexId]| side.iter().map(|&v| h.to_original(v)).collect::<Vec<_>>();
    Some((map(&split.side_a), map(&split.side_b)))
}

/// Seeds Q with a closed ditrail through one vertex of each side, then bridges.
fn try_bridge(d: &Digraph, s: &[VertexId], meter: &mut Meter) -> Result<Option<AugmentationState>> {
    let Some((a, b)) = two_clique_sides(d, s) else {
        return Ok(None);
    };
    for &u in &a {
        for &v in &b {
            match closed_ditrail_through_metered(d, &[u, v], meter)? {
                Search::Found(q) => {
                    let mut state = AugmentationState::new(d, s, q)?;
                    return Ok(match bridge_components(d, &mut state, &a, &b) {
                        Ok(()) => Some(state),
                        Err(Error::MoveInapplicable(_)) => Some(state),
                        Err(e) => return Err(e),
                    });
                }
                Search::Exhausted => return Ok(None),
                Search::Absent => {}
            }
        }
    }
    Ok(None)
}

fn two_cycle_step(d: &Digraph, state: &mut AugmentationState) -> Result<bool> {
    let on_q: Vec<VertexId> = state.q.vertex_set().into_iter().collect();
    for x in state.pending() {
        if let Some(&w) = on_q.iter().find(|&&w| d.has_arc(x, w) && d.has_arc(w, x)) {
            absorb_two_cycle(d, state, x, w)?;
            return Ok(true);
        }
    }
    Ok(false)
}

/// Builds a closed ditrail through all of `s`: moves first, exact oracle on stall.
pub fn construct(d: &Digraph, s: &[VertexId], budget: Budget) -> Result<Construction> {
    let s = normalize(d, s)?;
    let mut meter = Meter::new(budget);
    let finish = |status, trail, moves, fallback_used, meter: &Meter| Construction {
        status,
        trail,
        moves,
        fallback_used,
        expansions: meter.expansions(),
        exhausted: meter.exhausted(),
    };

    let seeded = try_bridge(d, &s, &mut meter)?;
    let mut state = match seeded {
        Some(st) => st,
        None => match initial_trail(d, &s) {
            Ok(q) => AugmentationState::new(d, &s, q)?,
            Err(Error::ConstructionImpossible(_)) => {
                // no S-vertex lies in a nontrivial strong component
                let scc = strong_components(d);
                debug_assert!(s.iter().all(|&v| scc.component_size(scc.component_of[v]) < 2));
                return Ok(finish(ConstructionStatus::CertifiedImpossible, None, Vec::new(), false, &meter));
            }
            Err(e) => return Err(e),
        },
    };

    while !state.pending().is_empty() && meter.tick() {
        if two_cycle_step(d, &mut state)? {
            continue;
        }
        match augment_via_external_path(d, &mut state, &mut meter)? {
            MoveOutcome::Applied => continue,
            MoveOutcome::Failed(_) => break,
        }
    }

    if state.pending().is_empty() {
        let q = state.q.clone();
        check_output(d, &s, &q)?;
        return Ok(finish(ConstructionStatus::Success, Some(q), state.moves, false, &meter));
    }

    let mut moves = state.moves;
    match closed_ditrail_through_metered(d, &s, &mut meter)? {
        Search::Found(q) => {
            check_output(d, &s, &q)?;
            let mut params = BTreeMap::new();
            params.insert("trail", q.closed_sequence());
            moves.push(MoveRecord {
                kind: MoveKind::Fallback,
                parameters: params,
                trail_len: q.arc_count(),
                approximate: false,
            });
            Ok(finish(ConstructionStatus::Success, Some(q), moves, true, &meter))
        }
        Search::Absent => Ok(finish(ConstructionStatus::CertifiedImpossible, None, moves, true, &meter)),
        Search::Exhausted => Ok(finish(ConstructionStatus::Inconclusive, None, moves, true, &meter)),
    }
}

fn check_output(d: &Digraph, s: &[VertexId], q: &ClosedDitrail) -> Result<()> {
    let seq = q.closed_sequence();
    if validator::validate_closed_trail(d, &seq) && s.iter().all(|v| seq.contains(v)) {
        Ok(())
    } else {
        Err(Error::Contract(format!("constructed trail {seq:?} rejected by validator")))
    }
}
