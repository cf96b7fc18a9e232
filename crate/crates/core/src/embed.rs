//! Exact search for a vertex-disjoint union of cliques `K_p1 ∪ ... ∪ K_pt`.
//!
//! Parts are filled largest first. Before each part the remaining pool is
//! peeled down to the vertices whose degree inside the pool can support a
//! clique of that order, and a counting bound rejects pools that cannot host
//! the remaining parts at all. Within a part the engine branches on the
//! lowest admissible vertex (include, then exclude); parts of equal order are
//! ordered by their minimum vertex.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::CliqueProfile;
use crate::graph::{Graph, GraphError, VertexSet};

/// Default node limit for a single search.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("a search budget must allow at least one node")]
pub struct ZeroBudget;

/// Maximum number of branching nodes one search may expand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    max_nodes: u64,
}

impl SearchBudget {
    pub fn new(max_nodes: u64) -> Result<Self, ZeroBudget> {
        if max_nodes == 0 {
            return Err(ZeroBudget);
        }
        Ok(SearchBudget { max_nodes })
    }

    pub fn max_nodes(&self) -> u64 {
        self.max_nodes
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: DEFAULT_BUDGET,
        }
    }
}

/// Disjoint vertex sets; `parts[i]` is a clique of order `p_i` of the profile it answers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Embedding {
    parts: Vec<VertexSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("embedding has {found} parts but the profile has {expected}")]
    PartCount { expected: usize, found: usize },
    #[error("part {index} has {found} vertices, expected {expected}")]
    PartSize {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("parts {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("part {index} contains the non-adjacent pair {u},{v}")]
    NotClique { index: usize, u: usize, v: usize },
    #[error("part {index} contains vertex {vertex} outside the host graph")]
    OutOfRange { index: usize, vertex: usize },
}

impl Embedding {
    pub fn new(parts: Vec<VertexSet>) -> Self {
        Embedding { parts }
    }

    pub fn parts(&self) -> &[VertexSet] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<VertexSet> {
        self.parts
    }

    /// Union of all parts.
    pub fn vertices(&self) -> VertexSet {
        self.parts
            .iter()
            .fold(VertexSet::new(), |acc, p| acc.union(p))
    }

    /// Part containing `v`, if any.
    pub fn part_of(&self, v: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(v))
    }

    /// Checks every invariant against `g` using plain edge lookups.
    pub fn verify(&self, g: &Graph, profile: &CliqueProfile) -> Result<(), EmbeddingError> {
        let sizes = profile.parts();
        if sizes.len() != self.parts.len() {
            return Err(EmbeddingError::PartCount {
                expected: sizes.len(),
                found: self.parts.len(),
            });
        }
        for (index, (part, &size)) in self.parts.iter().zip(sizes).enumerate() {
            let members = part.to_vec();
            if members.len() != size {
                return Err(EmbeddingError::PartSize {
                    index,
                    expected: size,
                    found: members.len(),
                });
            }
            if let Some(&vertex) = members.iter().find(|&&v| v >= g.order()) {
                return Err(EmbeddingError::OutOfRange { index, vertex });
            }
            for (a, &u) in members.iter().enumerate() {
                for &v in &members[a + 1..] {
                    if !g.has_edge(u, v) {
                        return Err(EmbeddingError::NotClique { index, u, v });
                    }
                }
            }
        }
        for i in 0..self.parts.len() {
            for j in i + 1..self.parts.len() {
                if !self.parts[i].is_disjoint(&self.parts[j]) {
                    return Err(EmbeddingError::Overlap(i, j));
                }
            }
        }
        Ok(())
    }

    /// Orders parts of equal order by their minimum vertex.
    fn normalize(&mut self, profile: &CliqueProfile) {
        let sizes = profile.parts();
        let mut start = 0;
        while start < sizes.len() {
            let end = start + sizes[start..].iter().take_while(|&&p| p == sizes[start]).count();
            self.parts[start..end].sort_by_key(|p| p.first());
            start = end;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Embedding),
    NotFound,
    BudgetExhausted,
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        match self {
            SearchOutcome::Found(e) => Some(e),
            _ => None,
        }
    }
}

/// Outcome plus the number of nodes expanded to reach it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    pub nodes: u64,
}

pub fn find_embedding(g: &Graph, profile: &CliqueProfile, budget: SearchBudget) -> SearchOutcome {
    search(g, profile, budget).outcome
}

/// [`find_embedding`] with node accounting.
pub fn search(g: &Graph, profile: &CliqueProfile, budget: SearchBudget) -> SearchReport {
    search_avoiding(g, profile, &VertexSet::new(), budget)
}

/// Searches only among vertices outside `avoid`.
pub fn search_avoiding(
    g: &Graph,
    profile: &CliqueProfile,
    avoid: &VertexSet,
    budget: SearchBudget,
) -> SearchReport {
    let mut engine = Engine::new(g, profile, None, budget.max_nodes);
    let outcome = engine.run(*avoid, VertexSet::new());
    SearchReport {
        outcome,
        nodes: engine.nodes,
    }
}

/// Finds an embedding with `u` and `v` inside one part. `uv` must be an edge of `g`.
///
/// `NotFound` means no embedding uses `uv`; `g` may still contain the union elsewhere.
pub fn find_embedding_with_edge(
    g: &Graph,
    profile: &CliqueProfile,
    u: usize,
    v: usize,
    budget: SearchBudget,
) -> Result<SearchOutcome, GraphError> {
    g.require_edge(u, v)?;
    let sizes = profile.parts();
    let mut remaining = budget.max_nodes;
    let mut exhausted = false;
    for index in 0..sizes.len() {
        if index > 0 && sizes[index] == sizes[index - 1] {
            continue;
        }
        if remaining == 0 {
            exhausted = true;
            break;
        }
        let report = search_with_pair_in(g, profile, (u, v), index, &VertexSet::new(), remaining);
        match report.outcome {
            SearchOutcome::Found(e) => return Ok(SearchOutcome::Found(e)),
            SearchOutcome::BudgetExhausted => {
                exhausted = true;
                break;
            }
            SearchOutcome::NotFound => remaining = remaining.saturating_sub(report.nodes),
        }
    }
    Ok(if exhausted {
        SearchOutcome::BudgetExhausted
    } else {
        SearchOutcome::NotFound
    })
}

/// Embedding in which `pair` lies inside the part answering `profile.parts()[index]`.
/// The other parts additionally avoid `tail_avoid`. The caller guarantees the pair is an edge.
pub(crate) fn search_with_pair_in(
    g: &Graph,
    profile: &CliqueProfile,
    pair: (usize, usize),
    index: usize,
    tail_avoid: &VertexSet,
    max_nodes: u64,
) -> SearchReport {
    let mut engine = Engine::new(g, profile, Some((pair, index)), max_nodes);
    let outcome = engine.run(VertexSet::new(), *tail_avoid);
    SearchReport {
        outcome,
        nodes: engine.nodes,
    }
}

struct Slot {
    size: usize,
    /// Index of the profile part this slot answers.
    index: usize,
    /// Same order as the previous slot; its minimum vertex must exceed the previous one's.
    chained: bool,
}

enum Step {
    Found,
    NotFound,
    Exhausted,
}

struct Engine<'g> {
    g: &'g Graph,
    profile: &'g CliqueProfile,
    slots: Vec<Slot>,
    forced: Option<(usize, usize)>,
    /// Excluded from every slot after the forced one.
    tail_avoid: VertexSet,
    /// Per slot: `(order, vertices needed)` pairs of the counting bound over the remaining slots.
    bounds: Vec<Vec<(usize, usize)>>,
    chosen: Vec<VertexSet>,
    nodes: u64,
    max_nodes: u64,
}

impl<'g> Engine<'g> {
    fn new(
        g: &'g Graph,
        profile: &'g CliqueProfile,
        forced: Option<((usize, usize), usize)>,
        max_nodes: u64,
    ) -> Self {
        let sizes = profile.parts();
        let mut order: Vec<usize> = (0..sizes.len()).rev().collect();
        if let Some((_, index)) = forced {
            order.retain(|&i| i != index);
            order.insert(0, index);
        }
        let slots: Vec<Slot> = order
            .iter()
            .enumerate()
            .map(|(k, &index)| Slot {
                size: sizes[index],
                index,
                chained: k > 0
                    && !(forced.is_some() && k == 1)
                    && sizes[order[k - 1]] == sizes[index],
            })
            .collect();
        let bounds = (0..slots.len())
            .map(|k| {
                let mut rest: Vec<usize> = slots[k..].iter().map(|s| s.size).collect();
                rest.sort_unstable_by(|a, b| b.cmp(a));
                let mut out: Vec<(usize, usize)> = Vec::new();
                let mut acc = 0;
                for (i, &s) in rest.iter().enumerate() {
                    acc += s;
                    if rest.get(i + 1) != Some(&s) {
                        out.push((s, acc));
                    }
                }
                out
            })
            .collect();
        Engine {
            g,
            profile,
            chosen: vec![VertexSet::new(); slots.len()],
            slots,
            forced: forced.map(|(pair, _)| pair),
            tail_avoid: VertexSet::new(),
            bounds,
            nodes: 0,
            max_nodes,
        }
    }

    fn run(&mut self, avoid: VertexSet, tail_avoid: VertexSet) -> SearchOutcome {
        self.tail_avoid = tail_avoid;
        match self.fill(0, avoid, None) {
            Step::Found => {
                let mut parts = vec![VertexSet::new(); self.slots.len()];
                for (slot, part) in self.slots.iter().zip(&self.chosen) {
                    parts[slot.index] = *part;
                }
                let mut e = Embedding::new(parts);
                e.normalize(self.profile);
                debug_assert_eq!(e.verify(self.g, self.profile), Ok(()));
                SearchOutcome::Found(e)
            }
            Step::NotFound => SearchOutcome::NotFound,
            Step::Exhausted => SearchOutcome::BudgetExhausted,
        }
    }

    fn fill(&mut self, k: usize, used: VertexSet, prev_min: Option<usize>) -> Step {
        if k == self.slots.len() {
            return Step::Found;
        }
        let g = self.g;
        let mut pool = g.vertices().difference(&used);
        if k > 0 && self.forced.is_some() {
            pool = pool.difference(&self.tail_avoid);
        }
        let degrees: Vec<(usize, usize)> = pool
            .iter()
            .map(|v| (v, g.neighbors(v).intersection_len(&pool)))
            .collect();
        for &(size, needed) in &self.bounds[k] {
            let support = degrees.iter().filter(|&&(_, d)| d + 1 >= size).count();
            if support < needed {
                return Step::NotFound;
            }
        }

        let size = self.slots[k].size;
        let mut cand: VertexSet = degrees
            .iter()
            .filter(|&&(_, d)| d + 1 >= size)
            .map(|&(v, _)| v)
            .collect();
        peel(g, &mut cand, size - 1);

        let mut part = VertexSet::new();
        let mut need = size;
        if k == 0 {
            if let Some((u, v)) = self.forced {
                if !cand.contains(u) || !cand.contains(v) {
                    return Step::NotFound;
                }
                part.insert(u);
                part.insert(v);
                need -= 2;
                cand = cand.intersection(g.neighbors(u)).intersection(g.neighbors(v));
            }
        }
        if self.slots[k].chained {
            if let Some(min) = prev_min {
                cand = cand.above(min);
            }
        }
        self.grow(k, part, need, cand, used)
    }

    fn grow(&mut self, k: usize, part: VertexSet, need: usize, mut cand: VertexSet, used: VertexSet) -> Step {
        if need == 0 {
            self.chosen[k] = part;
            return self.fill(k + 1, used.union(&part), part.first());
        }
        while cand.len() >= need {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Step::Exhausted;
            }
            let c = cand.first().expect("candidate set is non-empty");
            let mut grown = part;
            grown.insert(c);
            let next = cand.intersection(self.g.neighbors(c));
            match self.grow(k, grown, need - 1, next, used) {
                Step::NotFound => cand.remove(c),
                other => return other,
            }
        }
        Step::NotFound
    }
}

/// Shrinks `set` to its vertices with at least `min_degree` neighbours inside it.
fn peel(g: &Graph, set: &mut VertexSet, min_degree: usize) {
    loop {
        let weak: VertexSet = set
            .iter()
            .filter(|&v| g.neighbors(v).intersection_len(set) < min_degree)
            .collect();
        if weak.is_empty() {
            return;
        }
        *set = set.difference(&weak);
    }
}

/// Brute-force containment test: tries every choice of disjoint vertex subsets
/// of the profile's orders and checks each for completeness.
pub fn naive_contains(g: &Graph, profile: &CliqueProfile) -> bool {
    let mut found = false;
    naive_walk(g, profile.parts(), &VertexSet::new(), &mut |_| {
        found = true;
        false
    });
    found
}

/// Every embedding avoiding `avoid`, up to `limit` results, in enumeration order.
pub fn naive_embeddings(
    g: &Graph,
    profile: &CliqueProfile,
    avoid: &VertexSet,
    limit: usize,
) -> Vec<Embedding> {
    let mut out = Vec::new();
    if limit == 0 {
        return out;
    }
    naive_walk(g, profile.parts(), avoid, &mut |parts| {
        out.push(Embedding::new(parts.to_vec()));
        out.len() < limit
    });
    out
}

fn naive_walk(
    g: &Graph,
    sizes: &[usize],
    avoid: &VertexSet,
    visit: &mut dyn FnMut(&[VertexSet]) -> bool,
) {
    let mut used = vec![false; g.order()];
    for v in avoid.iter().filter(|&v| v < g.order()) {
        used[v] = true;
    }
    let mut parts = Vec::with_capacity(sizes.len());
    naive_part(g, sizes, &mut used, &mut parts, visit);
}

// Returns false once the visitor asks to stop.
fn naive_part(
    g: &Graph,
    sizes: &[usize],
    used: &mut [bool],
    parts: &mut Vec<VertexSet>,
    visit: &mut dyn FnMut(&[VertexSet]) -> bool,
) -> bool {
    let Some(&size) = sizes.get(parts.len()) else {
        return visit(parts);
    };
    let free: Vec<usize> = (0..g.order()).filter(|&v| !used[v]).collect();
    if free.len() < size {
        return true;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        let subset: Vec<usize> = idx.iter().map(|&i| free[i]).collect();
        let complete = subset
            .iter()
            .enumerate()
            .all(|(a, &u)| subset[a + 1..].iter().all(|&v| g.has_edge(u, v)));
        if complete {
            for &v in &subset {
                used[v] = true;
            }
            parts.push(subset.iter().copied().collect());
            let keep_going = naive_part(g, sizes, used, parts, visit);
            parts.pop();
            for &v in &subset {
                used[v] = false;
            }
            if !keep_going {
                return false;
            }
        }
        // Next combination in lexicographic order.
        let mut i = size;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if idx[i] != i + free.len() - size {
                break;
            }
            if i == 0 {
                return true;
            }
        }
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
