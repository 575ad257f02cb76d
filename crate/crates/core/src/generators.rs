//! Seeded instance generation: plain random digraphs, hypothesis-targeted
//! sampling with arc-addition repair, and a search for instances sitting one
//! below the degree-sum threshold that are not closed-trailable.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::connectivity::{is_strong, strong_components};
use crate::digraph::{Digraph, VertexId};
use crate::error::{Error, Result};
use crate::format::write_instance;
use crate::matching::maximum_matching;
use crate::search::{Budget, Search};
use crate::theorems::{self, TheoremId};
use crate::trails::closed_ditrail_through;

/// Structural template for targeted sampling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// Mix of the templates below that suit the hypothesis.
    #[default]
    Any,
    /// Independent arcs with probability `p`, then repair.
    Random,
    /// S induces a complete bipartite biorientation.
    Bipartite,
    /// S induces two disjoint complete digraphs joined only through vertices outside S.
    TwoClique,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenSpec {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub hypothesis: Option<TheoremId>,
    /// Arc additions allowed per attempt.
    pub repair_budget: usize,
    pub shape: Shape,
}

impl GenSpec {
    pub fn new(n: usize, p: f64, seed: u64) -> Self {
        GenSpec {
            n,
            p,
            seed,
            hypothesis: None,
            repair_budget: 4 * n * n,
            shape: Shape::Any,
        }
    }

    fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::input("n must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::input(format!("arc probability {} is not in [0, 1]", self.p)));
        }
        Ok(())
    }
}

/// Mutable arc matrix used while building and repairing.
#[derive(Clone, Debug)]
struct Draft {
    n: usize,
    adj: Vec<Vec<bool>>,
}

impl Draft {
    fn empty(n: usize) -> Self {
        Draft {
            n,
            adj: vec![vec![false; n]; n],
        }
    }

    fn random(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Self {
        let mut d = Draft::empty(n);
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_bool(p) {
                    d.adj[u][v] = true;
                }
            }
        }
        d
    }

    fn add(&mut self, u: VertexId, v: VertexId) -> bool {
        let fresh = u != v && !self.adj[u][v];
        if fresh {
            self.adj[u][v] = true;
        }
        fresh
    }

    fn both_ways(&mut self, u: VertexId, v: VertexId) {
        self.add(u, v);
        self.add(v, u);
    }

    fn build(&self) -> Digraph {
        let arcs = (0..self.n).flat_map(|u| (0..self.n).filter(move |&v| self.adj[u][v]).map(move |v| (u, v)));
        Digraph::new(self.n, arcs).expect("draft holds a strict digraph")
    }
}

/// Each ordered pair becomes an arc independently with probability `p`.
pub fn random_digraph(spec: &GenSpec) -> Result<Digraph> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(Draft::random(spec.n, spec.p, &mut rng).build())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SamplerStats {
    pub attempts: u64,
    pub emitted: u64,
    /// Repair ran out of arc additions.
    pub repair_exhausted: u64,
    /// Built instance failed the checker.
    pub rejected: u64,
}

/// Stream of `(D, S)` pairs passing the checker for `spec.hypothesis`.
///
/// Ends after `patience` consecutive failed attempts.
pub struct Sampler {
    spec: GenSpec,
    hypothesis: TheoremId,
    rng: ChaCha8Rng,
    stats: SamplerStats,
    patience: u64,
    check_budget: Budget,
}

/// Starts a targeted stream. `spec.hypothesis` overrides `hypothesis` when set.
pub fn sample_satisfying(hypothesis: TheoremId, spec: &GenSpec) -> Result<Sampler> {
    spec.check()?;
    Ok(Sampler {
        hypothesis: spec.hypothesis.unwrap_or(hypothesis),
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        spec: spec.clone(),
        stats: SamplerStats::default(),
        patience: 2_000,
        check_budget: Budget::limited(2_000_000),
    })
}

impl Sampler {
    pub fn with_patience(mut self, patience: u64) -> Self {
        self.patience = patience;
        self
    }

    pub fn stats(&self) -> SamplerStats {
        self.stats
    }

    pub fn emission_rate(&self) -> f64 {
        if self.stats.attempts == 0 {
            0.0
        } else {
            self.stats.emitted as f64 / self.stats.attempts as f64
        }
    }

    fn attempt(&mut self) -> Result<Option<(Digraph, Vec<VertexId>)>> {
        self.stats.attempts += 1;
        let n = self.spec.n;
        let built = match self.hypothesis {
            TheoremId::DegreeSum | TheoremId::Cyclability => {
                let threshold = match self.hypothesis {
                    TheoremId::DegreeSum => (2 * n).saturating_sub(3),
                    _ => (2 * n).saturating_sub(1),
                };
                let k = self.rng.gen_range(1..=n);
                let s = random_subset(&mut self.rng, n, k);
                let mut draft = Draft::random(n, self.spec.p, &mut self.rng);
                repair_degree_sum(&mut draft, &s, threshold, self.spec.repair_budget, &mut self.rng).then_some((draft, s))
            }
            TheoremId::SupereulerianDegree => {
                let s: Vec<VertexId> = (0..n).collect();
                let mut draft = Draft::random(n, self.spec.p, &mut self.rng);
                let threshold = (2 * n).saturating_sub(3);
                repair_degree_sum(&mut draft, &s, threshold, self.spec.repair_budget, &mut self.rng).then_some((draft, s))
            }
            TheoremId::LambdaMatching => self.lambda_candidate(),
            TheoremId::SemidegreeMatching | TheoremId::SemidegreeMatchingRefined => self.semidegree_candidate(),
        };
        let Some((draft, s)) = built else {
            self.stats.repair_exhausted += 1;
            return Ok(None);
        };
        let d = draft.build();
        if theorems::check(&d, &s, self.hypothesis, self.check_budget)?.holds {
            self.stats.emitted += 1;
            Ok(Some((d, s)))
        } else {
            self.stats.rejected += 1;
            Ok(None)
        }
    }

    fn pick_shape(&mut self, options: &[Shape]) -> Shape {
        match self.spec.shape {
            Shape::Any => *options.choose(&mut self.rng).unwrap(),
            s => s,
        }
    }

    fn lambda_candidate(&mut self) -> Option<(Draft, Vec<VertexId>)> {
        let n = self.spec.n;
        let all: Vec<VertexId> = (0..n).collect();
        if n < 2 {
            return None;
        }
        let mut draft = match self.pick_shape(&[Shape::Random, Shape::Bipartite]) {
            Shape::Bipartite => {
                let a = self.rng.gen_range(1..=n / 2);
                let mut order = all.clone();
                order.shuffle(&mut self.rng);
                let mut d = Draft::random(n, self.spec.p * 0.25, &mut self.rng);
                for &u in &order[..a] {
                    for &v in &order[a..] {
                        d.both_ways(u, v);
                    }
                }
                d
            }
            _ => Draft::random(n, self.spec.p, &mut self.rng),
        };
        let mut budget = self.spec.repair_budget;
        loop {
            let d = draft.build();
            if !is_strong(&d) {
                if !make_s_strong(&mut draft, &all, &mut budget, &mut self.rng) {
                    return None;
                }
                continue;
            }
            let lambda = crate::connectivity::arc_strong_connectivity(&d).ok()?;
            let alpha = maximum_matching(&d.underlying_graph()).size();
            if lambda >= alpha {
                return Some((draft, all));
            }
            // raise λ at a vertex of minimum semi-degree
            let v = (0..n).min_by_key(|&v| d.in_degree(v).min(d.out_degree(v))).unwrap();
            let missing: Vec<(VertexId, VertexId)> = (0..n)
                .filter(|&w| w != v)
                .flat_map(|w| [(v, w), (w, v)])
                .filter(|&(a, b)| !draft.adj[a][b])
                .collect();
            let Some(&(a, b)) = missing.choose(&mut self.rng) else {
                return None;
            };
            if budget == 0 {
                return None;
            }
            budget -= 1;
            draft.add(a, b);
        }
    }

    fn semidegree_candidate(&mut self) -> Option<(Draft, Vec<VertexId>)> {
        let n = self.spec.n;
        let mut shapes = vec![Shape::Random, Shape::Bipartite];
        if n >= 7 {
            shapes.push(Shape::TwoClique);
        }
        match self.pick_shape(&shapes) {
            Shape::TwoClique => {
                let m = if n >= 11 && self.rng.gen_bool(0.5) { 4 } else { 2 };
                two_clique_draft(n, m, self.spec.p, &mut self.rng)
            }
            Shape::Bipartite => {
                if n < 3 {
                    return None;
                }
                let k = self.rng.gen_range(3..=n);
                let s = random_subset(&mut self.rng, n, k);
                let a = self.rng.gen_range(1..=k / 2);
                let mut draft = Draft::random(n, self.spec.p, &mut self.rng);
                for (i, &u) in s.iter().enumerate() {
                    for &v in &s[i + 1..] {
                        draft.adj[u][v] = false;
                        draft.adj[v][u] = false;
                    }
                }
                let mut order = s.clone();
                order.shuffle(&mut self.rng);
                for &u in &order[..a] {
                    for &v in &order[a..] {
                        draft.both_ways(u, v);
                    }
                }
                Some((draft, s))
            }
            _ => {
                if n < 2 {
                    return None;
                }
                let k = self.rng.gen_range(2..=n);
                let s = random_subset(&mut self.rng, n, k);
                let mut draft = Draft::random(n, self.spec.p, &mut self.rng);
                repair_semidegree(&mut draft, &s, self.spec.repair_budget, &mut self.rng).then_some((draft, s))
            }
        }
    }
}

impl Iterator for Sampler {
    type Item = (Digraph, Vec<VertexId>);

    fn next(&mut self) -> Option<Self::Item> {
        for _ in 0..self.patience {
            match self.attempt() {
                Ok(Some(inst)) => return Some(inst),
                Ok(None) => {}
                Err(_) => return None,
            }
        }
        None
    }
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<VertexId> {
    let mut v: Vec<VertexId> = (0..n).collect();
    v.shuffle(rng);
    v.truncate(k);
    v.sort_unstable();
    v
}

/// Adds arcs until `s` lies in one strong component, or a lone vertex of `s`
/// lies on a dicycle. `false` when the budget runs out first.
fn make_s_strong(draft: &mut Draft, s: &[VertexId], budget: &mut usize, rng: &mut ChaCha8Rng) -> bool {
    loop {
        let d = draft.build();
        let scc = strong_components(&d);
        let done = if s.len() == 1 {
            scc.component_size(scc.component_of[s[0]]) >= 2
        } else {
            s.iter().all(|&v| scc.same_component(s[0], v))
        };
        if done {
            return true;
        }
        if *budget == 0 || draft.n < 2 {
            return false;
        }
        *budget -= 1;
        if s.len() == 1 {
            let others: Vec<VertexId> = (0..draft.n).filter(|&w| w != s[0]).collect();
            let w = *others.choose(rng).unwrap();
            if !draft.add(s[0], w) {
                draft.add(w, s[0]);
            }
            continue;
        }
        // join a pair of S-vertices from different components
        let pairs: Vec<(VertexId, VertexId)> = s
            .iter()
            .flat_map(|&u| s.iter().map(move |&v| (u, v)))
            .filter(|&(u, v)| u != v && !scc.same_component(u, v) && !draft.adj[u][v])
            .collect();
        match pairs.choose(rng) {
            Some(&(u, v)) => {
                draft.add(u, v);
            }
            None => return false,
        }
    }
}

/// Repairs toward S-strong with every nonadjacent S-pair at degree sum `>= threshold`.
fn repair_degree_sum(
    draft: &mut Draft,
    s: &[VertexId],
    threshold: usize,
    mut budget: usize,
    rng: &mut ChaCha8Rng,
) -> bool {
    loop {
        if !make_s_strong(draft, s, &mut budget, rng) {
            return false;
        }
        let d = draft.build();
        let worst = nonadjacent_pairs(&d, s)
            .into_iter()
            .filter(|&(u, v)| d.degree(u) + d.degree(v) < threshold)
            .min_by_key(|&(u, v)| (d.degree(u) + d.degree(v), u, v));
        let Some((u, v)) = worst else {
            return true;
        };
        if budget == 0 {
            return false;
        }
        budget -= 1;
        if rng.gen_bool(0.25) {
            // exempt the pair
            if rng.gen_bool(0.5) {
                draft.add(u, v);
            } else {
                draft.add(v, u);
            }
            continue;
        }
        let end = if rng.gen_bool(0.5) { u } else { v };
        let options: Vec<(VertexId, VertexId)> = (0..draft.n)
            .filter(|&w| w != u && w != v)
            .flat_map(|w| [(end, w), (w, end)])
            .filter(|&(a, b)| !draft.adj[a][b])
            .collect();
        match options.choose(rng) {
            Some(&(a, b)) => {
                draft.add(a, b);
            }
            None => {
                draft.add(u, v);
            }
        }
    }
}

/// Adds arcs inside S until `δ⁰(D⟨S⟩) >= α′(D⟨S⟩) > 0`.
fn repair_semidegree(draft: &mut Draft, s: &[VertexId], mut budget: usize, rng: &mut ChaCha8Rng) -> bool {
    loop {
        let d = draft.build();
        let Ok(h) = d.induced(s) else {
            return false;
        };
        let alpha = maximum_matching(&h.digraph.underlying_graph()).size();
        let Ok(delta) = h.digraph.min_semi_degree() else {
            return false;
        };
        if alpha > 0 && delta >= alpha {
            return true;
        }
        if budget == 0 {
            return false;
        }
        budget -= 1;
        let v = (0..s.len())
            .min_by_key(|&i| h.digraph.in_degree(i).min(h.digraph.out_degree(i)))
            .unwrap();
        let out_short = h.digraph.out_degree(v) <= h.digraph.in_degree(v);
        let options: Vec<VertexId> = (0..s.len())
            .filter(|&w| w != v && if out_short { !h.digraph.has_arc(v, w) } else { !h.digraph.has_arc(w, v) })
            .collect();
        let Some(&w) = options.choose(rng) else {
            return false;
        };
        let (a, b) = if out_short { (v, w) } else { (w, v) };
        draft.add(s[a], s[b]);
    }
}

fn nonadjacent_pairs(d: &Digraph, s: &[VertexId]) -> Vec<(VertexId, VertexId)> {
    let mut out = Vec::new();
    for (i, &u) in s.iter().enumerate() {
        for &v in &s[i + 1..] {
            if !d.has_arc(u, v) && !d.has_arc(v, u) {
                out.push((u, v));
            }
        }
    }
    out
}

/// Two disjoint `K*_{m+1}` forming S, joined through one or two outside
/// vertices, with random arcs elsewhere that leave D⟨S⟩ untouched.
fn two_clique_draft(n: usize, m: usize, p: f64, rng: &mut ChaCha8Rng) -> Option<(Draft, Vec<VertexId>)> {
    if n < 2 * m + 3 {
        return None;
    }
    let mut order: Vec<VertexId> = (0..n).collect();
    order.shuffle(rng);
    let (side_a, rest) = order.split_at(m + 1);
    let (side_b, outside) = rest.split_at(m + 1);
    let mut draft = Draft::random(n, p, rng);
    let mut s: Vec<VertexId> = side_a.iter().chain(side_b).copied().collect();
    s.sort_unstable();
    for &u in &s {
        for &v in &s {
            if u != v {
                draft.adj[u][v] = false;
            }
        }
    }
    for side in [side_a, side_b] {
        for &u in side {
            for &v in side {
                draft.add(u, v);
            }
        }
    }
    let x = *side_a.choose(rng).unwrap();
    let x_prime = *side_b.choose(rng).unwrap();
    if outside.len() >= 2 && rng.gen_bool(0.5) {
        let (z1, z2) = (outside[0], outside[1]);
        for (a, b) in [(x, z1), (z1, x_prime), (x_prime, z2), (z2, x)] {
            draft.add(a, b);
        }
    } else if rng.gen_bool(0.9) {
        let z = outside[0];
        for (a, b) in [(x, z), (z, x_prime), (x_prime, z), (z, x)] {
            draft.add(a, b);
        }
    }
    Some((draft, s))
}

/// A forced two-clique instance on `n` vertices with cliques of order `m + 1`.
pub fn two_clique_instance(n: usize, m: usize, p: f64, seed: u64) -> Result<(Digraph, Vec<VertexId>)> {
    if m == 0 || m % 2 == 1 {
        return Err(Error::input("m must be even and positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    two_clique_draft(n, m, p, &mut rng)
        .map(|(d, s)| (d.build(), s))
        .ok_or_else(|| Error::input(format!("need n >= {} for m = {m}", 2 * m + 3)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TightnessFinding {
    pub n: usize,
    pub s: Vec<VertexId>,
    pub min_pair_sum: usize,
    /// Instance text with an `S:` line.
    pub instance: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HuntStats {
    pub attempts: u64,
    /// Attempts landing exactly on `2n - 4`.
    pub on_boundary: u64,
    pub oracle_exhausted: u64,
    pub closed_trailable: u64,
    pub rejected_by_audit: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HuntReport {
    pub findings: Vec<TightnessFinding>,
    pub stats: HuntStats,
}

/// Minimum degree sum over nonadjacent S-pairs, if any.
fn min_pair_sum(d: &Digraph, s: &[VertexId]) -> Option<usize> {
    nonadjacent_pairs(d, s)
        .into_iter()
        .map(|(u, v)| d.degree(u) + d.degree(v))
        .min()
}

/// Searches for S-strong instances whose minimum nonadjacent S-pair degree
/// sum is exactly `2n - 4` and where S is not closed-trailable. `budget`
/// counts sampling attempts. Finds nothing does not mean nothing exists.
pub fn hunt_tightness(n_range: RangeInclusive<usize>, budget: u64, seed: u64) -> HuntReport {
    let mut report = HuntReport::default();
    let (lo, hi) = (*n_range.start().max(&2), *n_range.end());
    if lo > hi {
        return report;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        report.stats.attempts += 1;
        let n = rng.gen_range(lo..=hi);
        let k = rng.gen_range(2..=n);
        let s = random_subset(&mut rng, n, k);
        let p = rng.gen_range(0.2..0.8);
        let mut draft = Draft::random(n, p, &mut rng);
        let boundary = 2 * n - 4;
        if !repair_degree_sum(&mut draft, &s, boundary, 4 * n * n, &mut rng) {
            continue;
        }
        let d = draft.build();
        if min_pair_sum(&d, &s) != Some(boundary) {
            continue;
        }
        report.stats.on_boundary += 1;
        match closed_ditrail_through(&d, &s, Budget::limited(5_000_000)) {
            Ok(Search::Absent) => {}
            Ok(Search::Found(_)) => {
                report.stats.closed_trailable += 1;
                continue;
            }
            _ => {
                report.stats.oracle_exhausted += 1;
                continue;
            }
        }
        if !audit(&d, &s, boundary) {
            report.stats.rejected_by_audit += 1;
            continue;
        }
        let instance = write_instance(&d, Some(&s));
        if report.findings.iter().any(|f| f.instance == instance) {
            continue;
        }
        report.findings.push(TightnessFinding {
            n,
            s,
            min_pair_sum: boundary,
            instance,
        });
    }
    report
}

/// Independent recheck of a would-be finding.
fn audit(d: &Digraph, s: &[VertexId], boundary: usize) -> bool {
    let scc = strong_components(d);
    let s_strong = s.iter().all(|&v| scc.same_component(s[0], v));
    let below = theorems::check_degree_sum_closed_trailable(d, s).map(|r| !r.holds).unwrap_or(false);
    s_strong && below && min_pair_sum(d, s) == Some(boundary)
}
