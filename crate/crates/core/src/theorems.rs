//! Hypothesis checkers for the sufficient conditions, and certificate
//! verification that ties a holding hypothesis to an oracle-found witness.
//!
//! Conditions covered:
//!
//! | id                            | hypothesis                                              | conclusion            |
//! |-------------------------------|---------------------------------------------------------|-----------------------|
//! | `degree-sum`                  | S-strong, `d(u)+d(v) >= 2n-3` on nonadjacent S-pairs    | S closed-trailable    |
//! | `cyclability`                 | S-strong, `d(u)+d(v) >= 2n-1` on nonadjacent S-pairs    | S cyclable            |
//! | `supereulerian-degree`        | strong, `d(u)+d(v) >= 2n-3` on nonadjacent pairs        | D supereulerian       |
//! | `lambda-matching`             | strong, `λ(D) >= α′(D)`                                 | D supereulerian       |
//! | `semidegree-matching`         | S-strictly strong, `δ⁰(D⟨S⟩) >= α′(D⟨S⟩) > 0`           | S closed-trailable    |
//! | `semidegree-matching-refined` | `δ⁰(H) >= m > 0`, S-strictly strong only in the two-clique case | S closed-trailable |
//!
//! `n` is always `|V(D)|`, never `|S|`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::connectivity::{arc_strong_connectivity, is_strong, strong_components};
use crate::digraph::{Digraph, VertexId};
use crate::error::{Error, Result};
use crate::format::{digraph_sha256, write_instance};
use crate::matching::{maximum_matching, two_clique_case};
use crate::search::{Budget, Meter, Search};
use crate::trails::{closed_ditrail_through_metered, dicycle_through_metered, is_s_strictly_strong, ClosedDitrail};
use crate::validator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    DegreeSum,
    Cyclability,
    SupereulerianDegree,
    LambdaMatching,
    SemidegreeMatching,
    SemidegreeMatchingRefined,
}

impl TheoremId {
    pub const ALL: [TheoremId; 6] = [
        TheoremId::DegreeSum,
        TheoremId::Cyclability,
        TheoremId::SupereulerianDegree,
        TheoremId::LambdaMatching,
        TheoremId::SemidegreeMatching,
        TheoremId::SemidegreeMatchingRefined,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::DegreeSum => "degree-sum",
            TheoremId::Cyclability => "cyclability",
            TheoremId::SupereulerianDegree => "supereulerian-degree",
            TheoremId::LambdaMatching => "lambda-matching",
            TheoremId::SemidegreeMatching => "semidegree-matching",
            TheoremId::SemidegreeMatchingRefined => "semidegree-matching-refined",
        }
    }

    /// Whether the conclusion concerns all of V(D) rather than S.
    pub fn spans_all_vertices(self) -> bool {
        matches!(self, TheoremId::SupereulerianDegree | TheoremId::LambdaMatching)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::input(format!("unknown theorem id {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairSum {
    pub u: VertexId,
    pub v: VertexId,
    pub sum: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StrictDiagnostics {
    /// `None` when the search ran out of budget.
    pub holds: Option<bool>,
    pub pair: Option<(VertexId, VertexId)>,
    pub witness: Option<Vec<VertexId>>,
}

/// Every quantity a verdict depends on. Fields a checker does not use stay `None`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub n: usize,
    pub s_size: usize,
    pub threshold: Option<usize>,
    pub strong: Option<bool>,
    pub s_strong: Option<bool>,
    pub nonadjacent_pairs: Option<usize>,
    pub min_pair: Option<PairSum>,
    pub failing_pair: Option<PairSum>,
    pub min_semi_degree: Option<usize>,
    pub matching_number: Option<usize>,
    pub lambda: Option<usize>,
    pub strictly_strong: Option<StrictDiagnostics>,
    pub two_clique_case: Option<bool>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub id: TheoremId,
    pub holds: bool,
    pub diagnostics: Diagnostics,
}

fn normalized(d: &Digraph, s: &[VertexId]) -> Result<Vec<VertexId>> {
    if s.is_empty() {
        return Err(Error::input("S must be nonempty"));
    }
    d.check_vertex_set(s)?;
    let mut v = s.to_vec();
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

/// Scan of the nonadjacent pairs of `s` against a degree-sum threshold.
struct PairScan {
    count: usize,
    min_pair: Option<PairSum>,
    failing_pair: Option<PairSum>,
}

fn scan_pairs(d: &Digraph, s: &[VertexId], threshold: usize) -> PairScan {
    let mut scan = PairScan {
        count: 0,
        min_pair: None,
        failing_pair: None,
    };
    for (i, &u) in s.iter().enumerate() {
        for &v in &s[i + 1..] {
            if d.adjacent(u, v) {
                continue;
            }
            scan.count += 1;
            let p = PairSum {
                u,
                v,
                sum: d.degree(u) + d.degree(v),
            };
            if scan.min_pair.is_none_or(|m| p.sum < m.sum) {
                scan.min_pair = Some(p);
            }
            if p.sum < threshold && scan.failing_pair.is_none() {
                scan.failing_pair = Some(p);
            }
        }
    }
    scan
}

/// S-strong, with a lone vertex additionally required to sit in a
/// nontrivial strong component (no closed ditrail passes it otherwise).
fn s_strong_for_closed(d: &Digraph, s: &[VertexId], diag: &mut Diagnostics) -> bool {
    let scc = strong_components(d);
    let together = s.iter().all(|&v| scc.same_component(s[0], v));
    if s.len() == 1 {
        let nontrivial = scc.component_size(scc.component_of[s[0]]) >= 2;
        diag.notes.push(format!(
            "|S| = 1: S-strong is vacuous; also requiring a nontrivial strong component at {} ({})",
            s[0],
            if nontrivial { "present" } else { "absent" }
        ));
        return nontrivial;
    }
    together
}

fn degree_condition(d: &Digraph, s: &[VertexId], id: TheoremId, threshold: usize) -> HypothesisReport {
    let mut diag = Diagnostics {
        n: d.vertex_count(),
        s_size: s.len(),
        threshold: Some(threshold),
        ..Default::default()
    };
    let s_strong = s_strong_for_closed(d, s, &mut diag);
    diag.s_strong = Some(s_strong);
    let scan = scan_pairs(d, s, threshold);
    diag.nonadjacent_pairs = Some(scan.count);
    diag.min_pair = scan.min_pair;
    diag.failing_pair = scan.failing_pair;
    if scan.count == 0 {
        diag.notes.push("no nonadjacent pair in S: degree condition holds vacuously".into());
    }
    HypothesisReport {
        id,
        holds: s_strong && scan.failing_pair.is_none(),
        diagnostics: diag,
    }
}

/// S-strong and `d(u) + d(v) >= 2n - 3` for all nonadjacent `u, v` in S.
pub fn check_degree_sum_closed_trailable(d: &Digraph, s: &[VertexId]) -> Result<HypothesisReport> {
    let s = normalized(d, s)?;
    let threshold = (2 * d.vertex_count()).saturating_sub(3);
    Ok(degree_condition(d, &s, TheoremId::DegreeSum, threshold))
}

/// S-strong and `d(u) + d(v) >= 2n - 1` for all nonadjacent `u, v` in S.
pub fn check_cyclability(d: &Digraph, s: &[VertexId]) -> Result<HypothesisReport> {
    let s = normalized(d, s)?;
    let threshold = (2 * d.vertex_count()).saturating_sub(1);
    Ok(degree_condition(d, &s, TheoremId::Cyclability, threshold))
}

/// Strong and `d(u) + d(v) >= 2n - 3` for all nonadjacent `u, v`.
pub fn check_supereulerian_degree(d: &Digraph) -> Result<HypothesisReport> {
    let n = d.vertex_count();
    if n < 2 {
        return Err(Error::input("need at least two vertices"));
    }
    let all: Vec<VertexId> = d.vertices().collect();
    let mut report = degree_condition(d, &all, TheoremId::SupereulerianDegree, 2 * n - 3);
    let strong = is_strong(d);
    report.diagnostics.strong = Some(strong);
    report.holds &= strong;
    Ok(report)
}

/// Strong and `λ(D) >= α′(D)`.
pub fn check_supereulerian_lambda(d: &Digraph) -> Result<HypothesisReport> {
    let n = d.vertex_count();
    if n < 2 {
        return Err(Error::input("need at least two vertices"));
    }
    let lambda = arc_strong_connectivity(d)?;
    let alpha = maximum_matching(&d.underlying_graph()).size();
    let strong = lambda >= 1;
    let diag = Diagnostics {
        n,
        s_size: n,
        strong: Some(strong),
        lambda: Some(lambda),
        matching_number: Some(alpha),
        ..Default::default()
    };
    Ok(HypothesisReport {
        id: TheoremId::LambdaMatching,
        holds: strong && lambda >= alpha,
        diagnostics: diag,
    })
}

/// Both readings of the semi-degree / matching-number condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemidegreeReports {
    pub corollary: HypothesisReport,
    pub refined: HypothesisReport,
}

fn strict_diagnostics(d: &Digraph, s: &[VertexId], budget: Budget) -> Result<StrictDiagnostics> {
    if s.len() < 2 {
        return Ok(StrictDiagnostics {
            holds: Some(false),
            ..Default::default()
        });
    }
    Ok(match is_s_strictly_strong(d, s, budget)? {
        Search::Found(w) => StrictDiagnostics {
            holds: Some(true),
            pair: Some((w.u, w.v)),
            witness: Some(w.trail.closed_sequence()),
        },
        Search::Absent => StrictDiagnostics {
            holds: Some(false),
            ..Default::default()
        },
        Search::Exhausted => StrictDiagnostics::default(),
    })
}

/// `δ⁰(D⟨S⟩) >= α′(D⟨S⟩) > 0`, with S-strict strength required always
/// (corollary reading) or only when a maximum matching of `D⟨S⟩` leaves two
/// unmatched vertices one of which sees exactly `m/2` matched edges
/// (refined reading). `budget` bounds the strict-strength search.
pub fn check_semidegree_matching(d: &Digraph, s: &[VertexId], budget: Budget) -> Result<SemidegreeReports> {
    let s = normalized(d, s)?;
    let h = d.induced(&s)?;
    let delta = h.digraph.min_semi_degree()?;
    let m = maximum_matching(&h.digraph.underlying_graph());
    let alpha = m.size();
    let degree_ok = alpha > 0 && delta >= alpha;
    let special = degree_ok && two_clique_case(&h.digraph, &m).is_some();

    let strict = strict_diagnostics(d, &s, budget)?;
    let strict_holds = strict.holds == Some(true);

    let mut base = Diagnostics {
        n: d.vertex_count(),
        s_size: s.len(),
        min_semi_degree: Some(delta),
        matching_number: Some(alpha),
        strictly_strong: Some(strict.clone()),
        two_clique_case: Some(special),
        ..Default::default()
    };
    if alpha == 0 {
        base.notes.push("matching number is 0".into());
    }
    if strict.holds.is_none() {
        base.notes.push("S-strict strength undetermined within budget".into());
    }

    let corollary = HypothesisReport {
        id: TheoremId::SemidegreeMatching,
        holds: degree_ok && strict_holds,
        diagnostics: base.clone(),
    };
    let mut refined_diag = base;
    if degree_ok && !special {
        refined_diag
            .notes
            .push("two-clique case absent: S-strict strength not required".into());
    }
    let refined = HypothesisReport {
        id: TheoremId::SemidegreeMatchingRefined,
        holds: degree_ok && (!special || strict_holds),
        diagnostics: refined_diag,
    };
    Ok(SemidegreeReports { corollary, refined })
}

/// Runs the checker for `id`. Whole-digraph conditions ignore `s`.
pub fn check(d: &Digraph, s: &[VertexId], id: TheoremId, budget: Budget) -> Result<HypothesisReport> {
    match id {
        TheoremId::DegreeSum => check_degree_sum_closed_trailable(d, s),
        TheoremId::Cyclability => check_cyclability(d, s),
        TheoremId::SupereulerianDegree => check_supereulerian_degree(d),
        TheoremId::LambdaMatching => check_supereulerian_lambda(d),
        TheoremId::SemidegreeMatching => Ok(check_semidegree_matching(d, s, budget)?.corollary),
        TheoremId::SemidegreeMatchingRefined => Ok(check_semidegree_matching(d, s, budget)?.refined),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    ClosedDitrail,
    Dicycle,
}

/// An oracle-found witness for a conclusion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub theorem: TheoremId,
    pub digraph_sha256: String,
    pub s: Vec<VertexId>,
    pub kind: WitnessKind,
    /// `v0 v1 ... vk v0`
    pub vertices: Vec<VertexId>,
    pub arc_count: usize,
}

impl Certificate {
    pub fn new(theorem: TheoremId, d: &Digraph, s: &[VertexId], kind: WitnessKind, trail: &ClosedDitrail) -> Self {
        Certificate {
            theorem,
            digraph_sha256: digraph_sha256(d),
            s: s.to_vec(),
            kind,
            vertices: trail.closed_sequence(),
            arc_count: trail.arc_count(),
        }
    }
}

/// A holding hypothesis whose conclusion the exact oracle refuted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremViolation {
    pub theorem: TheoremId,
    pub instance: String,
    pub s: Vec<VertexId>,
    pub report: HypothesisReport,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Certified(Certificate),
    Violation(Box<TheoremViolation>),
    Inconclusive,
}

impl Verification {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verification::Certified(c) => Some(c),
            _ => None,
        }
    }
}

/// The set a conclusion is about: S, or V(D) for the whole-digraph conditions.
pub fn conclusion_set(d: &Digraph, s: &[VertexId], id: TheoremId) -> Vec<VertexId> {
    if id.spans_all_vertices() {
        d.vertices().collect()
    } else {
        let mut v = s.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Confirms the conclusion of a holding `report` with the exact oracle.
pub fn verify_certificate(d: &Digraph, s: &[VertexId], report: &HypothesisReport, budget: Budget) -> Result<Verification> {
    verify_certificate_metered(d, s, report, &mut Meter::new(budget))
}

pub fn verify_certificate_metered(
    d: &Digraph,
    s: &[VertexId],
    report: &HypothesisReport,
    meter: &mut Meter,
) -> Result<Verification> {
    if !report.holds {
        return Err(Error::input(format!("hypothesis of {} does not hold; nothing to verify", report.id)));
    }
    let target = conclusion_set(d, s, report.id);
    if target.is_empty() {
        return Err(Error::input("S must be nonempty"));
    }
    let (kind, outcome) = if report.id == TheoremId::Cyclability {
        (WitnessKind::Dicycle, dicycle_through_metered(d, &target, meter)?)
    } else {
        (WitnessKind::ClosedDitrail, closed_ditrail_through_metered(d, &target, meter)?)
    };
    match outcome {
        Search::Found(trail) => {
            let cert = Certificate::new(report.id, d, &target, kind, &trail);
            if !validator::validate_certificate(d, &target, &cert) {
                return Err(Error::Contract(format!("oracle witness rejected by validator: {:?}", cert.vertices)));
            }
            Ok(Verification::Certified(cert))
        }
        Search::Absent => Ok(Verification::Violation(Box::new(TheoremViolation {
            theorem: report.id,
            instance: write_instance(d, Some(&target)),
            s: target,
            report: report.clone(),
        }))),
        Search::Exhausted => Ok(Verification::Inconclusive),
    }
}
