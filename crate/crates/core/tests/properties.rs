use std::collections::BTreeSet;

use ditrail_core::connectivity::{arc_strong_connectivity, is_s_strong, is_strong, strong_components};
use ditrail_core::format::{digraph_sha256, parse_instance, write_instance};
use ditrail_core::theorems::{check_degree_sum_closed_trailable, check_supereulerian_degree};
use ditrail_core::trails::{
    closed_ditrail_through, closed_ditrail_through_subsets, hierholzer, splice, BalancedSubdigraph,
};
use ditrail_core::validator::validate_closed_trail;
use ditrail_core::{Arc, Budget, ClosedDitrail, Digraph, Ditrail};
use proptest::prelude::*;

fn digraph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let arcs = (0..n)
                .flat_map(|u| (0..n).map(move |v| (u, v)))
                .filter(|&(u, v)| u != v && bits[u * n + v]);
            Digraph::new(n, arcs).unwrap()
        })
    })
}

fn with_subset(max_n: usize) -> impl Strategy<Value = (Digraph, Vec<usize>)> {
    digraph(max_n).prop_flat_map(|d| {
        let n = d.vertex_count();
        proptest::collection::btree_set(0..n, 1..=n).prop_map(move |s| (d.clone(), s.into_iter().collect()))
    })
}

fn reach(d: &Digraph, from: usize) -> Vec<bool> {
    let mut seen = vec![false; d.vertex_count()];
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        for &w in d.out_neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// min over proper nonempty X of the arcs leaving X.
fn brute_lambda(d: &Digraph) -> usize {
    let n = d.vertex_count();
    (1..(1u32 << n) - 1)
        .map(|mask| {
            d.arcs()
                .iter()
                .filter(|a| mask >> a.tail & 1 == 1 && mask >> a.head & 1 == 0)
                .count()
        })
        .min()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn instance_text_round_trips((d, s) in with_subset(7)) {
        let text = write_instance(&d, Some(&s));
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back.digraph, &d);
        prop_assert_eq!(back.s.as_deref(), Some(&s[..]));
        prop_assert_eq!(write_instance(&back.digraph, back.s.as_deref()), text);
        prop_assert_eq!(digraph_sha256(&back.digraph), digraph_sha256(&d));
    }

    #[test]
    fn components_agree_with_reachability(d in digraph(7)) {
        let scc = strong_components(&d);
        let r: Vec<Vec<bool>> = d.vertices().map(|v| reach(&d, v)).collect();
        for u in d.vertices() {
            for v in d.vertices() {
                prop_assert_eq!(scc.same_component(u, v), r[u][v] && r[v][u]);
            }
        }
        prop_assert_eq!(is_strong(&d), d.vertices().all(|v| r[0][v] && r[v][0]));
    }

    #[test]
    fn s_strong_matches_pairwise_reachability((d, s) in with_subset(7)) {
        let expected = s.iter().all(|&u| {
            let r = reach(&d, u);
            s.iter().all(|&v| r[v])
        });
        prop_assert_eq!(is_s_strong(&d, &s).unwrap(), expected);
    }

    #[test]
    fn lambda_matches_cut_enumeration(d in digraph(6)) {
        prop_assume!(d.vertex_count() >= 2);
        prop_assert_eq!(arc_strong_connectivity(&d).unwrap(), brute_lambda(&d));
    }

    #[test]
    fn closed_trail_oracles_agree((d, s) in with_subset(5)) {
        prop_assume!(d.arc_count() <= 14);
        let a = closed_ditrail_through(&d, &s, Budget::unlimited()).unwrap();
        let b = closed_ditrail_through_subsets(&d, &s, Budget::unlimited()).unwrap();
        prop_assert_eq!(a.decided(), b.decided());
        for t in [a.found(), b.found()].into_iter().flatten() {
            prop_assert!(validate_closed_trail(&d, &t.closed_sequence()));
            prop_assert!(t.covers(&s));
        }
    }

    #[test]
    fn hierholzer_traverses_every_arc_once(d in digraph(6)) {
        // arcs inside strong components, whenever they happen to be balanced and connected
        let scc = strong_components(&d);
        let inside: Vec<Arc> = d
            .arcs()
            .iter()
            .copied()
            .filter(|a| scc.same_component(a.tail, a.head))
            .collect();
        let b = BalancedSubdigraph::new(inside.clone());
        if b.is_balanced() && b.is_connected() && !inside.is_empty() {
            let t = hierholzer(&b, inside[0].tail).unwrap();
            prop_assert_eq!(t.arc_set(), inside.iter().copied().collect::<BTreeSet<_>>());
            prop_assert_eq!(t.arc_count(), inside.len());
        }
    }

    #[test]
    fn adding_arcs_inside_s_keeps_degree_sum_hypothesis((d, s) in with_subset(7), pick in any::<prop::sample::Index>()) {
        let before = check_degree_sum_closed_trailable(&d, &s).unwrap();
        prop_assume!(before.holds);
        let missing: Vec<Arc> = s
            .iter()
            .flat_map(|&u| s.iter().map(move |&v| Arc::new(u, v)))
            .filter(|a| a.tail != a.head && !d.has_arc(a.tail, a.head))
            .collect();
        prop_assume!(!missing.is_empty());
        let extra = missing[pick.index(missing.len())];
        let bigger = d.with_arcs([extra]).unwrap();
        prop_assert!(check_degree_sum_closed_trailable(&bigger, &s).unwrap().holds);
    }

    #[test]
    fn whole_vertex_set_specialization(d in digraph(7)) {
        prop_assume!(d.vertex_count() >= 2);
        let all: Vec<usize> = d.vertices().collect();
        if check_supereulerian_degree(&d).unwrap().holds {
            prop_assert!(check_degree_sum_closed_trailable(&d, &all).unwrap().holds);
        }
    }
}

#[test]
fn splice_detour_at_repeated_vertex_keeps_all_arcs() {
    let d = Digraph::complete(4);
    let q = ClosedDitrail::from_walk(&d, vec![0, 1, 0, 2, 0]).unwrap();
    let t = Ditrail::new(&d, vec![0, 3, 0]).unwrap();
    let r = splice(&q, &t, 0, 0).unwrap();
    assert_eq!(r.arc_count(), 6);
    assert!(validate_closed_trail(&d, &r.closed_sequence()));
}
