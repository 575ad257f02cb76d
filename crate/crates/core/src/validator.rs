//! Definition-level re-checks of every artifact the searches produce.
//!
//! Nothing here calls into the trail, matching or theorem code: each check
//! is a direct reading of the definition against the digraph's arc set.

use crate::digraph::{Digraph, UndirectedGraph, VertexId};
use crate::theorems::{Certificate, WitnessKind};
use crate::format::digraph_sha256;

/// `vertices` is a walk of `d` that never repeats an arc.
pub fn validate_trail(d: &Digraph, vertices: &[VertexId]) -> bool {
    if vertices.is_empty() || vertices.iter().any(|&v| v >= d.vertex_count()) {
        return false;
    }
    let steps: Vec<(VertexId, VertexId)> = vertices.windows(2).map(|w| (w[0], w[1])).collect();
    for (i, &(a, b)) in steps.iter().enumerate() {
        if !d.has_arc(a, b) {
            return false;
        }
        if steps[..i].contains(&(a, b)) {
            return false;
        }
    }
    true
}

/// `v0 v1 ... vk` with `vk == v0`, at least two arcs, no repeated arc.
pub fn validate_closed_trail(d: &Digraph, closed: &[VertexId]) -> bool {
    closed.len() >= 3 && closed.first() == closed.last() && validate_trail(d, closed)
}

/// Closed trail whose vertices (apart from the closing repeat) are distinct.
pub fn validate_dicycle(d: &Digraph, closed: &[VertexId]) -> bool {
    if !validate_closed_trail(d, closed) {
        return false;
    }
    let body = &closed[..closed.len() - 1];
    body.iter().enumerate().all(|(i, v)| !body[..i].contains(v))
}

/// Pairs are edges of `g` and pairwise vertex-disjoint.
pub fn validate_matching(g: &UndirectedGraph, pairs: &[(VertexId, VertexId)]) -> bool {
    let mut seen: Vec<VertexId> = Vec::new();
    for &(u, v) in pairs {
        if u == v || !g.has_edge(u, v) || seen.contains(&u) || seen.contains(&v) {
            return false;
        }
        seen.push(u);
        seen.push(v);
    }
    true
}

/// The witness is a closed ditrail (or dicycle) of `d` through all of `s`,
/// and the certificate names this digraph.
pub fn validate_certificate(d: &Digraph, s: &[VertexId], c: &Certificate) -> bool {
    if c.digraph_sha256 != digraph_sha256(d) {
        return false;
    }
    let shape_ok = match c.kind {
        WitnessKind::ClosedDitrail => validate_closed_trail(d, &c.vertices),
        WitnessKind::Dicycle => validate_dicycle(d, &c.vertices),
    };
    shape_ok && c.arc_count + 1 == c.vertices.len() && s.iter().all(|v| c.vertices.contains(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trail_checks() {
        let d = Digraph::complete(3);
        assert!(validate_closed_trail(&d, &[0, 1, 0]));
        assert!(validate_closed_trail(&d, &[0, 1, 2, 0, 2, 1, 0]));
        assert!(!validate_closed_trail(&d, &[0, 1, 0, 1, 0]));
        assert!(!validate_closed_trail(&d, &[0]));
        assert!(!validate_closed_trail(&d, &[0, 1, 2]));
        assert!(!validate_trail(&Digraph::cycle(3), &[0, 2]));
        assert!(!validate_trail(&d, &[0, 5]));
        assert!(validate_dicycle(&d, &[0, 1, 2, 0]));
        assert!(!validate_dicycle(&d, &[0, 1, 0, 2, 0]));
    }

    #[test]
    fn matching_checks() {
        let g = UndirectedGraph::complete(4);
        assert!(validate_matching(&g, &[(0, 1), (2, 3)]));
        assert!(!validate_matching(&g, &[(0, 1), (1, 2)]));
        assert!(!validate_matching(&UndirectedGraph::new(3, [(0, 1)]).unwrap(), &[(1, 2)]));
    }

    #[test]
    fn certificate_checks() {
        let d = Digraph::complete(2);
        let cert = Certificate {
            theorem: crate::theorems::TheoremId::DegreeSum,
            digraph_sha256: digraph_sha256(&d),
            s: vec![0, 1],
            kind: WitnessKind::ClosedDitrail,
            vertices: vec![0, 1, 0],
            arc_count: 2,
        };
        assert!(validate_certificate(&d, &[0, 1], &cert));
        let missing = Digraph::new(3, [(0, 1), (1, 0)]).unwrap();
        let cert3 = Certificate {
            digraph_sha256: digraph_sha256(&missing),
            ..cert.clone()
        };
        assert!(!validate_certificate(&missing, &[0, 1, 2], &cert3));
        assert!(!validate_certificate(&missing, &[0, 1], &cert));
    }
}
