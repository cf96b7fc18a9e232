//! Freeness and saturation verdicts, and the `H_vw` witness structure.
//!
//! A graph `G` is saturated for a profile when it does not contain the clique
//! union but `G + uv` does for every non-edge `uv`. Once `G` is known to be
//! free, any copy in `G + uv` must use `uv`, so each non-edge is decided by an
//! edge-constrained search.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::CliqueProfile;
use crate::embed::{self, Embedding, EmbeddingError, SearchBudget, SearchOutcome};
use crate::graph::{Graph, GraphError, VertexSet};

/// Three-valued answer for budgeted decisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Yes,
    No,
    Undecided,
}

impl Answer {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Answer::Yes
        } else {
            Answer::No
        }
    }

    /// `Some(bool)` when decided.
    pub fn decided(self) -> Option<bool> {
        match self {
            Answer::Yes => Some(true),
            Answer::No => Some(false),
            Answer::Undecided => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SaturationStatus {
    Saturated,
    NotSaturated,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// The graph already contains the union.
    ContainsH { parts: Vec<VertexSet> },
    /// Adding `uv` does not create a copy.
    NonEdgeFails { u: usize, v: usize },
    /// The budget ran out, on the given non-edge or on the freeness check.
    Undecided { pair: Option<(usize, usize)> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturationVerdict {
    pub status: SaturationStatus,
    pub is_free: bool,
    pub is_saturated: bool,
    pub violation: Option<Violation>,
}

impl SaturationVerdict {
    fn new(is_free: bool, violation: Option<Violation>) -> Self {
        let status = match violation {
            None => SaturationStatus::Saturated,
            Some(Violation::Undecided { .. }) => SaturationStatus::Undecided,
            Some(_) => SaturationStatus::NotSaturated,
        };
        SaturationVerdict {
            status,
            is_free,
            is_saturated: violation.is_none(),
            violation,
        }
    }

    pub fn answer(&self) -> Answer {
        match self.status {
            SaturationStatus::Saturated => Answer::Yes,
            SaturationStatus::NotSaturated => Answer::No,
            SaturationStatus::Undecided => Answer::Undecided,
        }
    }
}

/// Fault injection for exercising the verification harness.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Tests each non-edge against `G` instead of `G + uv`.
    IgnoreAddedEdge,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SaturationOptions {
    pub budget: SearchBudget,
    #[doc(hidden)]
    pub mutation: Option<Mutation>,
}

pub fn is_free(g: &Graph, profile: &CliqueProfile, budget: SearchBudget) -> Answer {
    match embed::find_embedding(g, profile, budget) {
        SearchOutcome::Found(_) => Answer::No,
        SearchOutcome::NotFound => Answer::Yes,
        SearchOutcome::BudgetExhausted => Answer::Undecided,
    }
}

pub fn is_saturated(g: &Graph, profile: &CliqueProfile, budget: SearchBudget) -> SaturationVerdict {
    check_saturation(
        g,
        profile,
        &SaturationOptions {
            budget,
            mutation: None,
        },
    )
}

/// Saturation check; non-edges are examined in parallel on the current rayon pool.
///
/// The first failing non-edge in lexicographic order is reported. When no
/// non-edge fails but some search ran out of budget, the verdict is undecided.
pub fn check_saturation(g: &Graph, profile: &CliqueProfile, opts: &SaturationOptions) -> SaturationVerdict {
    match embed::find_embedding(g, profile, opts.budget) {
        SearchOutcome::Found(e) => {
            return SaturationVerdict::new(
                false,
                Some(Violation::ContainsH {
                    parts: e.into_parts(),
                }),
            )
        }
        SearchOutcome::BudgetExhausted => {
            return SaturationVerdict::new(false, Some(Violation::Undecided { pair: None }));
        }
        SearchOutcome::NotFound => {}
    }

    let non_edges = g.non_edges();
    let first_undecided = AtomicUsize::new(usize::MAX);
    let failing = non_edges.par_iter().enumerate().find_first(|&(i, &(u, v))| {
        match non_edge_outcome(g, profile, u, v, opts) {
            SearchOutcome::Found(_) => false,
            SearchOutcome::NotFound => true,
            SearchOutcome::BudgetExhausted => {
                first_undecided.fetch_min(i, Ordering::Relaxed);
                false
            }
        }
    });
    let violation = match failing {
        Some((_, &(u, v))) => Some(Violation::NonEdgeFails { u, v }),
        None => match first_undecided.into_inner() {
            usize::MAX => None,
            i => Some(Violation::Undecided {
                pair: Some(non_edges[i]),
            }),
        },
    };
    SaturationVerdict::new(true, violation)
}

fn non_edge_outcome(g: &Graph, profile: &CliqueProfile, u: usize, v: usize, opts: &SaturationOptions) -> SearchOutcome {
    if opts.mutation == Some(Mutation::IgnoreAddedEdge) {
        return embed::find_embedding(g, profile, opts.budget);
    }
    let h = g.add_edge(u, v).expect("non-edges are valid vertex pairs");
    embed::find_embedding_with_edge(&h, profile, u, v, opts.budget).expect("uv is an edge of G + uv")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("the witness structure needs a profile with at least two parts")]
    TooFewParts,
    #[error("the graph has no vertices")]
    EmptyGraph,
    #[error("w = {w} must lie outside N(v) ∪ {{v}} for v = {v}")]
    BadW { v: usize, w: usize },
    #[error("no copy of the union uses the added edge {{{v}, {w}}} with the other parts avoiding N(v)")]
    NotFound { v: usize, w: usize },
    #[error("search budget exhausted while extracting the witness for w = {w}")]
    BudgetExhausted { w: usize },
    #[error("invalid witness embedding: {0}")]
    Embedding(#[from] EmbeddingError),
    #[error("witness parts meet S ∪ {{v, w}}")]
    NotAvoiding,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The copy `H_vw` of `K_p2 ∪ ... ∪ K_pt` that appears once `vw` is added,
/// sitting outside `S ∪ {v, w}` where `S = N(v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessHvw {
    pub v: usize,
    pub w: usize,
    pub s: VertexSet,
    pub h_parts: Embedding,
}

impl WitnessHvw {
    /// Assembles and validates a witness from its parts.
    pub fn new(g: &Graph, profile: &CliqueProfile, v: usize, w: usize, h_parts: Embedding) -> Result<Self, WitnessError> {
        g.require_vertex(v)?;
        g.require_vertex(w)?;
        let tail = profile.tail().ok_or(WitnessError::TooFewParts)?;
        let s = *g.neighbors(v);
        if w == v || s.contains(w) {
            return Err(WitnessError::BadW { v, w });
        }
        h_parts.verify(g, &tail)?;
        let mut blocked = s;
        blocked.insert(v);
        blocked.insert(w);
        if !h_parts.vertices().is_disjoint(&blocked) {
            return Err(WitnessError::NotAvoiding);
        }
        Ok(WitnessHvw { v, w, s, h_parts })
    }

    /// The vertex set `V(H_vw)`.
    pub fn vertices(&self) -> VertexSet {
        self.h_parts.vertices()
    }
}

/// Extracts `H_vw` for the lowest-index minimum-degree vertex `v`.
///
/// Searches `G + vw` for a copy with `v, w` inside a `K_p1` part and the
/// remaining parts outside `N(v)`, then drops that part.
pub fn extract_witness(
    g: &Graph,
    profile: &CliqueProfile,
    w: usize,
    budget: SearchBudget,
) -> Result<WitnessHvw, WitnessError> {
    if profile.len() < 2 {
        return Err(WitnessError::TooFewParts);
    }
    let v = g.min_degree_vertex().ok_or(WitnessError::EmptyGraph)?;
    g.require_vertex(w)?;
    if w == v || g.has_edge(v, w) {
        return Err(WitnessError::BadW { v, w });
    }
    let h = g.add_edge(v, w)?;
    let s = *g.neighbors(v);
    let report = embed::search_with_pair_in(&h, profile, (v, w), 0, &s, budget.max_nodes());
    match report.outcome {
        SearchOutcome::Found(e) => {
            let mut parts = e.into_parts();
            let host = parts
                .iter()
                .position(|p| p.contains(v))
                .expect("forced part contains v");
            parts.remove(host);
            WitnessHvw::new(g, profile, v, w, Embedding::new(parts))
        }
        SearchOutcome::NotFound => Err(WitnessError::NotFound { v, w }),
        SearchOutcome::BudgetExhausted => Err(WitnessError::BudgetExhausted { w }),
    }
}

/// Every `u ∉ S ∪ {v}` adjacent to `w` lies in `V(H_vw)`.
pub fn check_lemma2_part2(g: &Graph, witness: &WitnessHvw) -> bool {
    offending_neighbors(g, witness).is_empty()
}

/// Neighbours of `w` outside `S ∪ {v}` that the witness misses.
pub fn offending_neighbors(g: &Graph, witness: &WitnessHvw) -> Vec<usize> {
    let mut outside = g.neighbors(witness.w).difference(&witness.s);
    outside.remove(witness.v);
    outside.difference(&witness.vertices()).to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_h;
    use crate::embed::naive_contains;

    fn prof(parts: &[usize]) -> CliqueProfile {
        CliqueProfile::new(parts.to_vec()).unwrap()
    }

    fn budget() -> SearchBudget {
        SearchBudget::default()
    }

    #[test]
    fn freeness_examples() {
        let g = Graph::complete(4).unwrap().disjoint_union(&Graph::empty(3).unwrap()).unwrap();
        assert_eq!(is_free(&g, &prof(&[2, 3]), budget()), Answer::Yes);
        assert_eq!(is_free(&Graph::complete(5).unwrap(), &prof(&[2, 3]), budget()), Answer::No);
        let (h, _) = build_h(15, &prof(&[2, 2, 3])).unwrap();
        assert_eq!(is_free(&h, &prof(&[2, 2, 3]), budget()), Answer::No);
        assert!(naive_contains(&h, &prof(&[2, 2, 3])));
    }

    #[test]
    fn saturated_constructions() {
        let (g, _) = build_h(7, &prof(&[2, 3])).unwrap();
        let verdict = is_saturated(&g, &prof(&[2, 3]), budget());
        assert_eq!(verdict.status, SaturationStatus::Saturated);
        assert!(verdict.is_free && verdict.is_saturated && verdict.violation.is_none());

        let (g, _) = build_h(12, &prof(&[2, 2, 2])).unwrap();
        assert!(is_saturated(&g, &prof(&[2, 2, 2]), budget()).is_saturated);
    }

    #[test]
    fn empty_graph_is_not_saturated() {
        let verdict = is_saturated(&Graph::empty(6).unwrap(), &prof(&[2, 2]), budget());
        assert_eq!(verdict.status, SaturationStatus::NotSaturated);
        assert!(verdict.is_free);
        assert_eq!(verdict.violation, Some(Violation::NonEdgeFails { u: 0, v: 1 }));
    }

    #[test]
    fn containing_graph_reports_embedding() {
        let verdict = is_saturated(&Graph::complete(5).unwrap(), &prof(&[2, 3]), budget());
        assert!(!verdict.is_free && !verdict.is_saturated);
        assert!(matches!(verdict.violation, Some(Violation::ContainsH { .. })));
        let json = serde_json::to_string(&verdict).unwrap();
        assert!(json.starts_with(r#"{"status":"not_saturated","is_free":false"#));
    }

    #[test]
    fn undecided_when_budget_runs_out() {
        let (g, _) = build_h(40, &prof(&[4, 4, 8, 12])).unwrap();
        let verdict = is_saturated(&g, &prof(&[4, 4, 8, 12]), SearchBudget::new(3).unwrap());
        assert_eq!(verdict.status, SaturationStatus::Undecided);
        assert!(!verdict.is_saturated);
    }

    #[test]
    fn mutation_breaks_saturation() {
        let (g, _) = build_h(7, &prof(&[2, 3])).unwrap();
        let opts = SaturationOptions {
            budget: budget(),
            mutation: Some(Mutation::IgnoreAddedEdge),
        };
        assert_eq!(check_saturation(&g, &prof(&[2, 3]), &opts).status, SaturationStatus::NotSaturated);
    }

    #[test]
    fn saturated_graph_rederived_without_shortcut() {
        let profile = prof(&[2, 3, 3]);
        let (g, _) = build_h(11, &profile).unwrap();
        assert!(is_saturated(&g, &profile, budget()).is_saturated);
        assert!(!naive_contains(&g, &profile));
        for (u, v) in g.non_edges().into_iter().step_by(3).take(20) {
            let h = g.add_edge(u, v).unwrap();
            assert!(embed::find_embedding(&h, &profile, budget()).is_found());
            assert!(naive_contains(&h, &profile));
        }
    }

    #[test]
    fn witness_on_small_construction() {
        let profile = prof(&[2, 3]);
        let (g, layout) = build_h(7, &profile).unwrap();
        // v = 4, the first isolated vertex.
        let w = 6;
        let wit = extract_witness(&g, &profile, w, budget()).unwrap();
        assert_eq!(wit.v, 4);
        assert!(wit.s.is_empty());
        let part = wit.h_parts.parts()[0];
        assert_eq!(part.len(), 3);
        assert!(part.is_subset(&layout.cliques[0]));
        assert!(check_lemma2_part2(&g, &wit));
    }

    #[test]
    fn witness_uses_one_edge_per_triangle() {
        let profile = prof(&[2, 2, 2]);
        let (g, layout) = build_h(12, &profile).unwrap();
        let wit = extract_witness(&g, &profile, 11, budget()).unwrap();
        assert_eq!(wit.h_parts.parts().len(), 2);
        for (part, block) in wit.h_parts.parts().iter().zip(&layout.cliques) {
            assert_eq!(part.len(), 2);
            assert!(part.is_subset(block));
        }
        // w inside a triangle block: both block neighbours must be covered.
        let w = layout.cliques[0].first().unwrap();
        let wit = extract_witness(&g, &profile, w, budget()).unwrap();
        assert!(check_lemma2_part2(&g, &wit));
        assert!(g.neighbors(w).is_subset(&wit.vertices()));
    }

    #[test]
    fn witness_preconditions() {
        let profile = prof(&[2, 3]);
        let g = Graph::complete(4).unwrap().disjoint_union(&Graph::empty(3).unwrap()).unwrap();
        let v = g.min_degree_vertex().unwrap();
        assert_eq!(
            extract_witness(&g, &profile, v, budget()),
            Err(WitnessError::BadW { v, w: v })
        );
        assert_eq!(extract_witness(&g, &prof(&[3]), 5, budget()), Err(WitnessError::TooFewParts));
        // No triangle survives outside the added edge.
        let g = Graph::empty(5).unwrap();
        assert_eq!(
            extract_witness(&g, &profile, 1, budget()),
            Err(WitnessError::NotFound { v: 0, w: 1 })
        );
    }

    #[test]
    fn lemma2_part2_detects_uncovered_neighbour() {
        // K3 ∪ K3 ∪ K2: v = 6 (degree 1), S = {7}, w = 0.
        let k3 = Graph::complete(3).unwrap();
        let g = k3
            .disjoint_union(&k3)
            .unwrap()
            .disjoint_union(&Graph::complete(2).unwrap())
            .unwrap();
        let profile = prof(&[2, 2]);
        let h = Embedding::new(vec![[3, 4].into_iter().collect()]);
        let wit = WitnessHvw::new(&g, &profile, 6, 0, h).unwrap();
        assert!(!check_lemma2_part2(&g, &wit));
        assert_eq!(offending_neighbors(&g, &wit), vec![1, 2]);

        let bad = Embedding::new(vec![[6, 7].into_iter().collect()]);
        assert_eq!(WitnessHvw::new(&g, &profile, 6, 0, bad), Err(WitnessError::NotAvoiding));
    }
}
