//! Acceptance campaigns. Each criterion prints one PASS/FAIL line; the
//! process exits nonzero if any criterion fails.
//!
//! Reference values come from brute-force oracles defined in this file
//! (arc-subset enumeration, exhaustive matching, trail enumeration), not from
//! the library searches they check.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use ditrail_cli::run_args;
use ditrail_core::constructor::{construct, ConstructionStatus, MoveRecord};
use ditrail_core::format::{digraph_sha256, parse_instance, write_instance};
use ditrail_core::generators::{random_digraph, sample_satisfying, two_clique_instance, GenSpec, Shape};
use ditrail_core::matching::{analyze_unmatched_structure, find_augmenting_path, maximum_matching, Matching};
use ditrail_core::theorems::{self, check, verify_certificate, TheoremId, Verification};
use ditrail_core::trails::{closed_ditrail_through, closed_ditrail_through_subsets, hierholzer, BalancedSubdigraph};
use ditrail_core::validator::{validate_certificate, validate_closed_trail};
use ditrail_core::{Arc, Budget, Digraph, Ditrail, UndirectedGraph, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

// ---------- brute-force references ----------

fn brute_matching_number(g: &UndirectedGraph) -> usize {
    fn go(edges: &[(usize, usize)], used: &mut [bool], i: usize) -> usize {
        if i == edges.len() {
            return 0;
        }
        let skip = go(edges, used, i + 1);
        let (u, v) = edges[i];
        if used[u] || used[v] {
            return skip;
        }
        used[u] = true;
        used[v] = true;
        let take = 1 + go(edges, used, i + 1);
        used[u] = false;
        used[v] = false;
        skip.max(take)
    }
    go(g.edges(), &mut vec![false; g.vertex_count()], 0)
}

/// Balanced and weakly connected, by direct counting over the chosen arcs.
fn mask_is_connected_balanced(n: usize, arcs: &[Arc], mask: u32) -> bool {
    let chosen: Vec<Arc> = (0..arcs.len()).filter(|i| mask >> i & 1 == 1).map(|i| arcs[i]).collect();
    if chosen.is_empty() {
        return false;
    }
    let mut bal = vec![0i32; n];
    for a in &chosen {
        bal[a.tail] += 1;
        bal[a.head] -= 1;
    }
    if bal.iter().any(|&b| b != 0) {
        return false;
    }
    let touched: BTreeSet<usize> = chosen.iter().flat_map(|a| [a.tail, a.head]).collect();
    let start = *touched.iter().next().unwrap();
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for a in &chosen {
            for (p, q) in [(a.tail, a.head), (a.head, a.tail)] {
                if p == u && seen.insert(q) {
                    stack.push(q);
                }
            }
        }
    }
    seen == touched
}

/// Whether some connected balanced arc subset touches all of `w`.
fn brute_closed_trailable(d: &Digraph, w: &[VertexId]) -> bool {
    let arcs = d.arcs();
    (1..1u32 << arcs.len()).any(|mask| {
        w.iter().all(|&v| (0..arcs.len()).any(|i| mask >> i & 1 == 1 && (arcs[i].tail == v || arcs[i].head == v)))
            && mask_is_connected_balanced(d.vertex_count(), arcs, mask)
    })
}

/// A `(from, to)`-ditrail whose vertex set is exactly `set`, by plain enumeration.
fn brute_spanning_ditrail(d: &Digraph, from: VertexId, to: VertexId, set: &BTreeSet<VertexId>) -> bool {
    fn go(
        d: &Digraph,
        v: VertexId,
        to: VertexId,
        set: &BTreeSet<VertexId>,
        used: &mut BTreeSet<(usize, usize)>,
        seen: &mut BTreeMap<VertexId, usize>,
    ) -> bool {
        if v == to && seen.len() == set.len() {
            return true;
        }
        for &w in d.out_neighbors(v) {
            if !set.contains(&w) || used.contains(&(v, w)) {
                continue;
            }
            used.insert((v, w));
            *seen.entry(w).or_default() += 1;
            if go(d, w, to, set, used, seen) {
                return true;
            }
            let c = seen.get_mut(&w).unwrap();
            *c -= 1;
            if *c == 0 {
                seen.remove(&w);
            }
            used.remove(&(v, w));
        }
        false
    }
    let mut seen = BTreeMap::from([(from, 1)]);
    go(d, from, to, set, &mut BTreeSet::new(), &mut seen)
}

fn random_digraph_rng(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Digraph {
    let arcs = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| u != v)
        .filter(|_| rng.gen_bool(p))
        .collect::<Vec<_>>();
    Digraph::new(n, arcs).unwrap()
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> UndirectedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    UndirectedGraph::new(n, edges).unwrap()
}

// ---------- campaigns ----------

struct Campaign {
    instances: Vec<(TheoremId, Digraph, Vec<VertexId>, u64)>,
}

fn sample(h: TheoremId, n: usize, p: f64, seed: u64, shape: Shape, take: usize) -> Vec<(TheoremId, Digraph, Vec<VertexId>, u64)> {
    let mut spec = GenSpec::new(n, p, seed);
    spec.shape = shape;
    sample_satisfying(h, &spec)
        .unwrap()
        .take(take)
        .map(|(d, s)| (h, d, s, seed))
        .collect()
}

fn degree_sum_campaign() -> Campaign {
    let mut instances = Vec::new();
    for n in 3..=9 {
        for (k, p) in [0.2, 0.4, 0.6].into_iter().enumerate() {
            instances.extend(sample(TheoremId::DegreeSum, n, p, 1000 + 10 * n as u64 + k as u64, Shape::Any, 25));
        }
    }
    Campaign { instances }
}

fn semidegree_campaign() -> Campaign {
    let mut instances = Vec::new();
    for n in 3..=9 {
        for (k, p) in [0.3, 0.5].into_iter().enumerate() {
            let seed = 2000 + 10 * n as u64 + k as u64;
            instances.extend(sample(TheoremId::SemidegreeMatching, n, p, seed, Shape::Any, 20));
            instances.extend(sample(TheoremId::SemidegreeMatchingRefined, n, p, seed + 5, Shape::Any, 20));
        }
    }
    for n in 7..=9 {
        instances.extend(sample(TheoremId::SemidegreeMatching, n, 0.3, 3000 + n as u64, Shape::TwoClique, 10));
        instances.extend(sample(TheoremId::SemidegreeMatchingRefined, n, 0.3, 3100 + n as u64, Shape::TwoClique, 10));
    }
    Campaign { instances }
}

/// Verifies every instance; returns (certified, violations, inconclusive, checker-rejected).
fn verify_all(c: &Campaign) -> (usize, usize, usize, usize) {
    let (mut ok, mut bad, mut unknown, mut rejected) = (0, 0, 0, 0);
    for (h, d, s, _) in &c.instances {
        let r = check(d, s, *h, Budget::unlimited()).unwrap();
        if !r.holds {
            rejected += 1;
            continue;
        }
        match verify_certificate(d, s, &r, Budget::unlimited()).unwrap() {
            Verification::Certified(cert) => {
                let target = theorems::conclusion_set(d, s, *h);
                if validate_certificate(d, &target, &cert) {
                    ok += 1;
                } else {
                    bad += 1;
                }
            }
            Verification::Violation(v) => {
                eprintln!("THEOREM-VIOLATION {}:\n{}", v.theorem, v.instance);
                bad += 1;
            }
            Verification::Inconclusive => unknown += 1,
        }
    }
    (ok, bad, unknown, rejected)
}

fn criterion_1(c: &Campaign) -> Verdict {
    let total = c.instances.len();
    let (ok, bad, unknown, rejected) = verify_all(c);
    let sizes: BTreeSet<usize> = c.instances.iter().map(|(_, _, s, _)| s.len()).collect();
    let with_pairs = c
        .instances
        .iter()
        .filter(|(_, d, s, _)| {
            s.iter().enumerate().any(|(i, &u)| s[i + 1..].iter().any(|&v| !d.has_arc(u, v) && !d.has_arc(v, u)))
        })
        .count();
    let n_ok = c.instances.iter().all(|(_, d, _, _)| (3..=9).contains(&d.vertex_count()));
    verdict(
        total >= 500 && ok == total && bad == 0 && unknown == 0 && rejected == 0 && n_ok && sizes.len() >= 5,
        format!(
            "{ok}/{total} certified, {bad} violations, {unknown} inconclusive; |S| sizes {sizes:?}; {with_pairs} with a nonadjacent S-pair"
        ),
    )
}

fn special_case(d: &Digraph, s: &[VertexId]) -> bool {
    theorems::check_semidegree_matching(d, s, Budget::unlimited())
        .map(|r| r.refined.diagnostics.two_clique_case == Some(true))
        .unwrap_or(false)
}

fn criterion_2(c: &Campaign) -> Verdict {
    let total = c.instances.len();
    let (ok, bad, unknown, rejected) = verify_all(c);
    let special = c.instances.iter().filter(|(_, d, s, _)| special_case(d, s)).count();
    let n_ok = c.instances.iter().all(|(_, d, _, _)| d.vertex_count() <= 9);
    // larger cliques need more than nine vertices: run them on the side
    let mut big_ok = 0;
    let mut big_total = 0;
    for seed in 0..10u64 {
        let n = 11 + (seed % 2) as usize;
        let (d, s) = two_clique_instance(n, 4, 0.3, 4000 + seed).unwrap();
        let r = theorems::check_semidegree_matching(&d, &s, Budget::unlimited()).unwrap();
        if !r.refined.holds {
            continue;
        }
        big_total += 1;
        if special_case(&d, &s)
            && verify_certificate(&d, &s, &r.refined, Budget::unlimited()).unwrap().certificate().is_some()
        {
            big_ok += 1;
        }
    }
    verdict(
        total >= 500 && ok == total && bad == 0 && unknown == 0 && rejected == 0 && special >= 50 && n_ok && big_ok == big_total,
        format!(
            "{ok}/{total} certified, {bad} violations, {unknown} inconclusive; {special} two-clique instances with m = 2 (n <= 9); m = 4 at n = 11..12: {big_ok}/{big_total}"
        ),
    )
}

fn criterion_3() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    let mut degree_holding = Vec::new();
    for h in [TheoremId::SupereulerianDegree, TheoremId::LambdaMatching] {
        let mut c = Campaign { instances: Vec::new() };
        for n in 2..=9 {
            for (k, p) in [0.3, 0.6].into_iter().enumerate() {
                c.instances.extend(sample(h, n, p, 5000 + 10 * n as u64 + k as u64 + h as u64 * 100, Shape::Any, 20));
            }
        }
        let total = c.instances.len();
        let (ok, bad, unknown, _) = verify_all(&c);
        pass &= total >= 300 && ok == total && bad == 0 && unknown == 0;
        parts.push(format!("{h}: {ok}/{total}"));
        if h == TheoremId::SupereulerianDegree {
            degree_holding.extend(c.instances.into_iter().map(|(_, d, _, _)| d));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..300 {
        let n = rng.gen_range(2..=9);
        let p = rng.gen_range(0.3..0.95);
        degree_holding.push(random_digraph_rng(&mut rng, n, p));
    }
    let mut specialized = 0;
    let mut broken = 0;
    for d in &degree_holding {
        if theorems::check_supereulerian_degree(d).unwrap().holds {
            specialized += 1;
            let all: Vec<VertexId> = d.vertices().collect();
            if !theorems::check_degree_sum_closed_trailable(d, &all).unwrap().holds {
                broken += 1;
            }
        }
    }
    pass &= broken == 0;
    parts.push(format!("specialization holds on {}/{specialized}", specialized - broken));
    verdict(pass, parts.join("; "))
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let (mut samples, mut agree, mut trails_ok, mut exhaustive, mut exhaustive_ok, mut euler_ok, mut euler_total) =
        (0, 0, 0, 0, 0, 0, 0);
    let mut trails_total = 0;
    while samples < 300 {
        let n = rng.gen_range(2..=6);
        let p = rng.gen_range(0.15..0.6);
        let d = random_digraph_rng(&mut rng, n, p);
        if d.arc_count() > 14 {
            continue;
        }
        samples += 1;
        let k = rng.gen_range(1..=n);
        let mut w: Vec<VertexId> = (0..n).collect();
        w.shuffle(&mut rng);
        w.truncate(k);
        let a = closed_ditrail_through(&d, &w, Budget::unlimited()).unwrap();
        let b = closed_ditrail_through_subsets(&d, &w, Budget::unlimited()).unwrap();
        if a.decided() == b.decided() && a.decided().is_some() {
            agree += 1;
        }
        for t in [a.clone().found(), b.found()].into_iter().flatten() {
            trails_total += 1;
            if validate_closed_trail(&d, &t.closed_sequence()) && t.covers(&w) {
                trails_ok += 1;
            }
        }
        if d.arc_count() <= 12 {
            exhaustive += 1;
            if brute_closed_trailable(&d, &w) == a.is_found() {
                exhaustive_ok += 1;
            }
            // every connected balanced subset is one closed ditrail using exactly its arcs
            let arcs = d.arcs();
            for mask in 1..1u32 << arcs.len() {
                if !mask_is_connected_balanced(n, arcs, mask) {
                    continue;
                }
                euler_total += 1;
                let chosen: Vec<Arc> = (0..arcs.len()).filter(|i| mask >> i & 1 == 1).map(|i| arcs[i]).collect();
                let b = BalancedSubdigraph::new(chosen.clone());
                if let Ok(t) = hierholzer(&b, chosen[0].tail) {
                    if validate_closed_trail(&d, &t.closed_sequence())
                        && t.arc_set() == chosen.iter().copied().collect::<BTreeSet<_>>()
                    {
                        euler_ok += 1;
                    }
                }
            }
        }
    }
    verdict(
        agree == samples && trails_ok == trails_total && exhaustive_ok == exhaustive && euler_ok == euler_total && exhaustive > 0,
        format!(
            "oracles agree {agree}/{samples}; trails valid {trails_ok}/{trails_total}; subset equivalence {exhaustive_ok}/{exhaustive} (|A| <= 12); Euler traversals {euler_ok}/{euler_total}"
        ),
    )
}

fn random_matching(rng: &mut ChaCha8Rng, g: &UndirectedGraph) -> Matching {
    let mut used = vec![false; g.vertex_count()];
    let mut pairs = Vec::new();
    let mut edges = g.edges().to_vec();
    edges.shuffle(rng);
    for (u, v) in edges {
        if !used[u] && !used[v] && rng.gen_bool(0.6) {
            used[u] = true;
            used[v] = true;
            pairs.push((u, v));
        }
    }
    Matching::new(g, pairs).unwrap()
}

fn is_augmenting(g: &UndirectedGraph, m: &Matching, path: &[usize]) -> bool {
    let distinct: BTreeSet<_> = path.iter().collect();
    let covered = m.covered();
    path.len() >= 2
        && path.len() % 2 == 0
        && distinct.len() == path.len()
        && !covered.contains(&path[0])
        && !covered.contains(path.last().unwrap())
        && path.windows(2).enumerate().all(|(i, w)| {
            g.has_edge(w[0], w[1]) && m.edges().contains(&(w[0].min(w[1]), w[0].max(w[1]))) == (i % 2 == 1)
        })
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let (mut equal, mut berge) = (0, 0);
    let total = 400;
    for _ in 0..total {
        let n = rng.gen_range(1..=10);
        let p = rng.gen_range(0.1..0.9);
        let g = random_graph(&mut rng, n, p);
        let best = brute_matching_number(&g);
        let m = maximum_matching(&g);
        if m.is_matching_of(&g) && m.size() == best {
            equal += 1;
        }
        let partial = random_matching(&mut rng, &g);
        let ok = match find_augmenting_path(&g, &partial).unwrap() {
            Some(p) => partial.size() < best && is_augmenting(&g, &partial, &p),
            None => partial.size() == best,
        };
        if ok {
            berge += 1;
        }
    }
    verdict(
        equal == total && berge == total,
        format!("blossom = exhaustive on {equal}/{total}; Berge equivalence on {berge}/{total}"),
    )
}

/// H on `2m + x` vertices with the matching `{(0,1), (2,3), ...}` forced in.
fn lemma_sample(rng: &mut ChaCha8Rng, m: usize, x: usize, p: f64) -> (Digraph, Matching) {
    let n = 2 * m + x;
    let mut arcs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                arcs.insert((u, v));
            }
        }
    }
    for i in 0..m {
        if !arcs.contains(&(2 * i + 1, 2 * i)) {
            arcs.insert((2 * i, 2 * i + 1));
        }
    }
    let h = Digraph::new(n, arcs).unwrap();
    let m = Matching::new(&h.underlying_graph(), (0..m).map(|i| (2 * i, 2 * i + 1))).unwrap();
    (h, m)
}

/// Structured H meeting the semi-degree hypothesis: complete bipartite
/// biorientation between `m` hubs and `m + x` others, plus random hub-hub arcs.
fn bipartite_lemma_sample(rng: &mut ChaCha8Rng, m: usize, x: usize) -> Digraph {
    let n = 2 * m + x;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let (hubs, rest) = order.split_at(m);
    let mut arcs = BTreeSet::new();
    for &a in hubs {
        for &b in rest {
            arcs.insert((a, b));
            arcs.insert((b, a));
        }
        for &c in hubs {
            if a != c && rng.gen_bool(0.5) {
                arcs.insert((a, c));
            }
        }
    }
    Digraph::new(n, arcs).unwrap()
}

fn two_clique_h(m: usize) -> Digraph {
    let side = m + 1;
    let arcs = (0..2 * side)
        .flat_map(|u| (0..2 * side).map(move |v| (u, v)))
        .filter(|&(u, v)| u != v && u / side == v / side);
    Digraph::new(2 * side, arcs).unwrap()
}

/// Independent re-check of the unmatched-vertex structure.
fn structure_holds(h: &Digraph, m: &Matching) -> bool {
    let size = m.size();
    let covered = m.covered();
    let x: Vec<usize> = h.vertices().filter(|v| !covered.contains(v)).collect();
    if !x.iter().all(|&v| h.in_degree(v) == size && h.out_degree(v) == size) {
        return false;
    }
    let adjacent = |a: usize, b: usize| h.has_arc(a, b) || h.has_arc(b, a);
    let both = |a: usize, b: usize| h.has_arc(a, b) && h.has_arc(b, a);
    let seen = |v: usize| m.edges().iter().filter(|&&(a, b)| adjacent(a, v) || adjacent(b, v)).count();
    if x.len() == 2 && (2 * seen(x[0]) == size || 2 * seen(x[1]) == size) {
        let side = |v: usize| {
            let mut s: Vec<usize> = m
                .edges()
                .iter()
                .filter(|&&(a, b)| adjacent(a, v) || adjacent(b, v))
                .flat_map(|&(a, b)| [a, b])
                .collect();
            s.push(v);
            s
        };
        let (a, b) = (side(x[0]), side(x[1]));
        let clique = |s: &[usize]| s.len() == size + 1 && s.iter().all(|&u| s.iter().all(|&v| u == v || h.has_arc(u, v)));
        let cross = a.iter().any(|&u| b.iter().any(|&v| u == v || adjacent(u, v)));
        return clique(&a) && clique(&b) && !cross;
    }
    let mut labels = Vec::new();
    for &(a, b) in m.edges() {
        let a_all = x.iter().all(|&v| both(a, v));
        let b_all = x.iter().all(|&v| both(b, v));
        let (ve, ue) = match (a_all, b_all) {
            (true, false) => (a, b),
            (false, true) => (b, a),
            _ => return false,
        };
        if x.iter().any(|&v| adjacent(ue, v)) {
            return false;
        }
        labels.push((ve, ue));
    }
    labels.iter().all(|&(_, ue)| {
        h.in_degree(ue) == size
            && h.out_degree(ue) == size
            && labels.iter().all(|&(ve2, ue2)| both(ue, ve2) && (ue == ue2 || !adjacent(ue, ue2)))
    })
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    // augmenting-path degree lemma
    let (mut pre31, mut forced31, mut ok31) = (0, 0, 0);
    let mut tries = 0;
    while pre31 < 300 && tries < 200_000 {
        tries += 1;
        let m = rng.gen_range(1..=4);
        let x = rng.gen_range(2..=4);
        let p = rng.gen_range(0.4..0.95);
        let (h, _) = lemma_sample(&mut rng, m, x, p);
        let xs: Vec<usize> = (2 * m..2 * m + x).collect();
        if xs.iter().any(|&v| h.degree(v) + 1 < 2 * m) {
            continue;
        }
        pre31 += 1;
        let forcing = xs.iter().any(|&v| h.degree(v) > 2 * m);
        if forcing {
            forced31 += 1;
            if brute_matching_number(&h.underlying_graph()) > m {
                ok31 += 1;
            }
        } else {
            ok31 += 1;
        }
    }
    // unmatched-structure lemma
    let (mut pre32, mut ok32, mut special, mut general) = (0, 0, 0, 0);
    let mut tries = 0;
    while pre32 < 300 && tries < 200_000 {
        tries += 1;
        let m = rng.gen_range(1..=4);
        let x = rng.gen_range(2..=4);
        let h = match tries % 3 {
            0 => bipartite_lemma_sample(&mut rng, m, x),
            1 if m % 2 == 0 => two_clique_h(m),
            _ => {
                let p = rng.gen_range(0.5..0.95);
                lemma_sample(&mut rng, m, x, p).0
            }
        };
        let g = h.underlying_graph();
        let mat = maximum_matching(&g);
        let size = mat.size();
        let unmatched = h.vertex_count() - 2 * size;
        if size == 0 || size > 4 || !(2..=4).contains(&unmatched) || h.min_semi_degree().unwrap() < size {
            continue;
        }
        pre32 += 1;
        let library = analyze_unmatched_structure(&h, &mat);
        if library.is_ok() && structure_holds(&h, &mat) {
            ok32 += 1;
            if library.unwrap().special_case.is_some() {
                special += 1;
            } else {
                general += 1;
            }
        }
    }
    verdict(
        pre31 >= 300 && ok31 == pre31 && pre32 >= 300 && ok32 == pre32 && special > 0 && general > 0,
        format!(
            "degree lemma {ok31}/{pre31} ({forced31} with a forcing vertex); structure lemma {ok32}/{pre32} ({special} two-clique, {general} labelled)"
        ),
    )
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut samples, mut premise, mut ok) = (0, 0, 0);
    while samples < 400 {
        let n = rng.gen_range(3..=6);
        let p = rng.gen_range(0.2..0.8);
        let d = random_digraph_rng(&mut rng, n, p);
        // random ditrail by a walk that never reuses an arc
        let mut walk = vec![rng.gen_range(0..n)];
        let mut used = BTreeSet::new();
        let len = rng.gen_range(1..=2 * n);
        for _ in 0..len {
            let v = *walk.last().unwrap();
            let options: Vec<usize> = d.out_neighbors(v).iter().copied().filter(|&w| !used.contains(&(v, w))).collect();
            let Some(&w) = options.choose(&mut rng) else { break };
            used.insert((v, w));
            walk.push(w);
        }
        if walk.len() < 2 {
            continue;
        }
        let on_t: BTreeSet<usize> = walk.iter().copied().collect();
        let off: Vec<usize> = (0..n).filter(|v| !on_t.contains(v)).collect();
        let Some(&x) = off.choose(&mut rng) else { continue };
        samples += 1;
        let t = Ditrail::new(&d, walk.clone()).unwrap();
        let mut set = on_t.clone();
        set.insert(x);
        let exists = brute_spanning_ditrail(&d, walk[0], *walk.last().unwrap(), &set);
        let d_t = on_t.iter().filter(|&&u| d.has_arc(x, u)).count() + on_t.iter().filter(|&&u| d.has_arc(u, x)).count();
        let library = ditrail_core::trails::insertion_degree_bound_holds(&d, &t, x).unwrap();
        let truth = exists || d_t <= on_t.len();
        if !exists {
            premise += 1;
        }
        if truth && library {
            ok += 1;
        }
    }
    verdict(
        ok == samples && premise > 0,
        format!("bound holds on {ok}/{samples} samples ({premise} with no spanning ditrail)"),
    )
}

fn logs(c: &Campaign) -> Vec<Vec<MoveRecord>> {
    c.instances
        .iter()
        .map(|(_, d, s, _)| construct(d, s, Budget::unlimited()).unwrap().moves)
        .collect()
}

fn criterion_8(c1: &Campaign, c2: &Campaign) -> Verdict {
    let (mut success, mut total, mut fallback) = (0, 0, 0);
    let mut move_counts: BTreeMap<String, usize> = BTreeMap::new();
    for c in [c1, c2] {
        for (_, d, s, _) in &c.instances {
            total += 1;
            let out = construct(d, s, Budget::unlimited()).unwrap();
            if out.status == ConstructionStatus::Success {
                let t = out.trail.unwrap();
                if validate_closed_trail(d, &t.closed_sequence()) && t.covers(s) {
                    success += 1;
                }
            }
            fallback += out.fallback_used as usize;
            for m in &out.moves {
                *move_counts.entry(serde_json::to_value(m.kind).unwrap().as_str().unwrap().to_string()).or_default() += 1;
            }
        }
    }
    // regenerate from the same seeds and replay
    let replay_same = logs(&degree_sum_campaign()) == logs(c1) && logs(&semidegree_campaign()) == logs(c2);
    verdict(
        success == total && replay_same,
        format!(
            "{success}/{total} constructed ({fallback} finished by the exact oracle); replay identical: {replay_same}; moves {move_counts:?}"
        ),
    )
}

fn report_valid(schema: &jsonschema::Validator, stdout: &str) -> bool {
    stdout.lines().all(|l| serde_json::from_str::<Value>(l).map(|v| schema.is_valid(&v)).unwrap_or(false))
}

fn criterion_9(c1: &Campaign) -> Verdict {
    let schema_text =
        fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json")).unwrap();
    let schema = jsonschema::validator_for(&serde_json::from_str(&schema_text).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();

    // gen -> parse round trip
    let mut round_trips = 0;
    for seed in 0..100u64 {
        let d = random_digraph(&GenSpec::new(1 + (seed % 9) as usize, 0.4, seed)).unwrap();
        let text = write_instance(&d, None);
        let back = parse_instance(&text).unwrap();
        if back.digraph == d && digraph_sha256(&back.digraph) == digraph_sha256(&d) && write_instance(&back.digraph, None) == text {
            round_trips += 1;
        }
    }
    let gen_a = run_args(["ditrail", "gen", "--n", "8", "--p", "0.3", "--seed", "9", "--hypothesis", "degree-sum"], None);
    let gen_b = run_args(["ditrail", "gen", "--n", "8", "--p", "0.3", "--seed", "9", "--hypothesis", "degree-sum"], None);
    let gen_stable = gen_a.stdout == gen_b.stdout
        && parse_instance(&gen_a.stdout)
            .map(|i| write_instance(&i.digraph, i.s.as_deref()) == gen_a.stdout)
            .unwrap_or(false);

    // byte-identical reports over campaign instances, every subcommand
    let mut files = Vec::new();
    for (i, (_, d, s, _)) in c1.instances.iter().step_by(10).enumerate() {
        let p = dir.path().join(format!("i{i:03}.txt"));
        fs::write(&p, write_instance(d, Some(s))).unwrap();
        files.push(p.display().to_string());
    }
    let mut identical = 0;
    let mut valid = 0;
    let mut runs = 0;
    for sub in [vec!["check", "--verify"], vec!["oracle"], vec!["construct"]] {
        let mut args = vec!["ditrail".to_string()];
        args.extend(sub.iter().map(|s| s.to_string()));
        args.extend(files.iter().cloned());
        let a = run_args(args.clone(), None);
        let b = run_args(args.clone(), None);
        let mut par = args.clone();
        par.extend(["--jobs".to_string(), "4".to_string()]);
        let c = run_args(par, None);
        runs += 1;
        if a == b && a.stdout == c.stdout && a.code == 0 {
            identical += 1;
        }
        if report_valid(&schema, &a.stdout) {
            valid += 1;
        }
    }
    let hunt = run_args(["ditrail", "hunt", "--attempts", "200", "--seed", "3"], None);
    let gen_dir = dir.path().join("gen");
    let gen_many = run_args(
        [
            "ditrail",
            "gen",
            "--n",
            "6",
            "--count",
            "5",
            "--hypothesis",
            "lambda-matching",
            "--out-dir",
            gen_dir.to_str().unwrap(),
        ],
        None,
    );
    let others_valid = report_valid(&schema, &hunt.stdout) && report_valid(&schema, &gen_many.stdout);
    verdict(
        round_trips == 100 && gen_stable && identical == runs && valid == runs && others_valid,
        format!(
            "round trips {round_trips}/100; seeded gen stable: {gen_stable}; identical reports {identical}/{runs} subcommands over {} files; schema-valid {valid}/{runs} (+hunt/gen: {others_valid})",
            files.len()
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let c1 = degree_sum_campaign();
    let c2 = semidegree_campaign();
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict + '_>)> = vec![
        ("degree-sum soundness", Box::new(|| criterion_1(&c1))),
        ("semi-degree/matching soundness", Box::new(|| criterion_2(&c2))),
        ("supereulerian specializations", Box::new(criterion_3)),
        ("oracle cross-validation", Box::new(criterion_4)),
        ("matching correctness", Box::new(criterion_5)),
        ("unmatched-vertex lemmas", Box::new(criterion_6)),
        ("insertion degree bound", Box::new(criterion_7)),
        ("constructor completeness", Box::new(|| criterion_8(&c1, &c2))),
        ("determinism and I/O", Box::new(|| criterion_9(&c1))),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = f();
        failed += !v.pass as usize;
        println!(
            "criterion {} [{name}]: {} ({}) [{:.1}s]",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
