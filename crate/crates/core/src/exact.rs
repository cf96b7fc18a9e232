//! Brute-force `sat(n, H)` for small `n`.
//!
//! Graphs are enumerated as edge subsets, deduplicated by an exact canonical
//! form, and tested for saturation level by level in increasing edge count.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::{binom2, CliqueProfile};
use crate::embed::SearchBudget;
use crate::graph::Graph;
use crate::graph6::emit_graph6;
use crate::saturation::{is_saturated, Answer, SaturationStatus};

/// Largest order accepted by [`canonical_form`].
pub const CANON_MAX: usize = 10;
/// Largest order accepted by the built-in enumerator.
pub const ENUM_MAX: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("canonical forms are limited to {CANON_MAX} vertices, got {0}")]
    TooLargeForCanon(usize),
    #[error("built-in enumeration is limited to {ENUM_MAX} vertices, got {0}; supply a graph6 stream")]
    TooLargeForEnumeration(usize),
    #[error("{m} edges do not fit in a graph on {n} vertices")]
    TooManyEdges { n: usize, m: usize },
    #[error("a saturation check at {m} edges ran out of budget")]
    Undecided { m: usize },
}

/// Upper-triangle adjacency bits (column order `x01, x02, x12, x03, ...`)
/// under the lexicographically smallest admissible labelling.
///
/// The first bit of the string is the most significant bit of `bits`, so
/// comparing forms of the same order compares the bit strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm {
    n: u8,
    bits: u64,
}

impl CanonicalForm {
    pub fn order(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn bit_string(&self) -> String {
        let len = binom2(self.order()) as usize;
        (0..len)
            .map(|k| if self.bits >> (len - 1 - k) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// The graph in canonical labelling.
    pub fn to_graph(&self) -> Graph {
        let n = self.order();
        let len = binom2(n) as usize;
        let mut edges = Vec::new();
        let mut k = 0;
        for j in 1..n {
            for i in 0..j {
                if self.bits >> (len - 1 - k) & 1 == 1 {
                    edges.push((i, j));
                }
                k += 1;
            }
        }
        Graph::from_edges(n, &edges).expect("canonical form decodes to a simple graph")
    }
}

/// Exact canonical form by branch-and-bound over vertex orderings.
///
/// Vertices are coloured by degree, refined by the multiset of neighbour
/// colours until stable, and only orderings listing colour classes in
/// increasing colour are searched; the minimum bit string among those is the
/// form. Members of a twin class (equal open or closed neighbourhoods) are
/// placed in index order only, since swapping twins is an automorphism.
pub fn canonical_form(g: &Graph) -> Result<CanonicalForm, ExactError> {
    let n = g.order();
    if n > CANON_MAX {
        return Err(ExactError::TooLargeForCanon(n));
    }
    let adj: Vec<u16> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u16, |acc, u| acc | 1 << u))
        .collect();
    Ok(canon_small(&adj))
}

fn canon_small(adj: &[u16]) -> CanonicalForm {
    let n = adj.len();
    let len = n * n.saturating_sub(1) / 2;
    let colour = refine_colours(adj);
    let mut slot_colour = colour.clone();
    slot_colour.sort_unstable();

    // Predecessor mask: each vertex may be placed only after its smaller twins.
    let mut twin_before = vec![0u16; n];
    for v in 0..n {
        for u in 0..v {
            let open = adj[u] == adj[v];
            let closed = adj[u] | 1 << u == adj[v] | 1 << v;
            if open || closed {
                twin_before[v] |= 1 << u;
            }
        }
    }

    let mut state = Canon {
        adj,
        colour: &colour,
        slot_colour: &slot_colour,
        twin_before: &twin_before,
        len,
        best: u64::MAX,
        placed: Vec::with_capacity(n),
    };
    state.dfs(0, 0);
    let bits = if len == 0 { 0 } else { state.best };
    CanonicalForm { n: n as u8, bits }
}

fn refine_colours(adj: &[u16]) -> Vec<u32> {
    let n = adj.len();
    let mut colour: Vec<u32> = adj.iter().map(|a| a.count_ones()).collect();
    let mut classes = {
        let mut c = colour.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    loop {
        let signatures: Vec<(u32, Vec<u32>)> = (0..n)
            .map(|v| {
                let mut around: Vec<u32> = (0..n).filter(|&u| adj[v] >> u & 1 == 1).map(|u| colour[u]).collect();
                around.sort_unstable();
                (colour[v], around)
            })
            .collect();
        let mut distinct = signatures.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() == classes {
            return colour;
        }
        classes = distinct.len();
        colour = signatures
            .iter()
            .map(|s| distinct.binary_search(s).expect("signature present") as u32)
            .collect();
    }
}

struct Canon<'a> {
    adj: &'a [u16],
    colour: &'a [u32],
    slot_colour: &'a [u32],
    twin_before: &'a [u16],
    len: usize,
    best: u64,
    placed: Vec<usize>,
}

impl Canon<'_> {
    fn dfs(&mut self, placed_mask: u16, prefix: u64) {
        let k = self.placed.len();
        if k == self.adj.len() {
            if prefix < self.best {
                self.best = prefix;
            }
            return;
        }
        let prefix_len = k * (k + 1) / 2;
        let mut options: Vec<(u64, usize)> = (0..self.adj.len())
            .filter(|&v| {
                placed_mask >> v & 1 == 0
                    && self.colour[v] == self.slot_colour[k]
                    && self.twin_before[v] & !placed_mask == 0
            })
            .map(|v| {
                let column = self
                    .placed
                    .iter()
                    .fold(0u64, |acc, &u| acc << 1 | (self.adj[u] >> v & 1) as u64);
                (prefix << k | column, v)
            })
            .collect();
        options.sort_unstable();
        for (next, v) in options {
            if self.best != u64::MAX && next > self.best >> (self.len - prefix_len) {
                break;
            }
            self.placed.push(v);
            self.dfs(placed_mask | 1 << v, next);
            self.placed.pop();
        }
    }
}

fn slot_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in 1..n {
        for i in 0..j {
            out.push((i, j));
        }
    }
    out
}

/// One representative per isomorphism class of graphs with `n` vertices and
/// `m` edges, in canonical labelling, sorted by canonical form.
pub fn enumerate_graphs(n: usize, m: usize) -> Result<Vec<Graph>, ExactError> {
    Ok(enumerate_forms(n, m)?.iter().map(CanonicalForm::to_graph).collect())
}

fn enumerate_forms(n: usize, m: usize) -> Result<Vec<CanonicalForm>, ExactError> {
    if n > ENUM_MAX {
        return Err(ExactError::TooLargeForEnumeration(n));
    }
    let pairs = slot_pairs(n);
    let slots = pairs.len();
    if m > slots {
        return Err(ExactError::TooManyEdges { n, m });
    }
    if m == 0 {
        return Ok(vec![canon_small(&vec![0u16; n])]);
    }
    let forms: BTreeSet<CanonicalForm> = (0..=slots - m)
        .into_par_iter()
        .map(|first| {
            let mut seen = HashSet::new();
            let mut chosen: Vec<usize> = (first..first + m).collect();
            loop {
                let mut adj = vec![0u16; n];
                for &s in &chosen {
                    let (i, j) = pairs[s];
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
                seen.insert(canon_small(&adj));
                if !advance_tail(&mut chosen, slots) {
                    break;
                }
            }
            seen
        })
        .reduce(HashSet::new, |mut a, b| {
            a.extend(b);
            a
        })
        .into_iter()
        .collect();
    Ok(forms.into_iter().collect())
}

// Next combination keeping chosen[0] fixed.
fn advance_tail(chosen: &mut [usize], slots: usize) -> bool {
    let m = chosen.len();
    let mut i = m;
    while i > 1 {
        i -= 1;
        if chosen[i] < slots - (m - i) {
            chosen[i] += 1;
            for j in i + 1..m {
                chosen[j] = chosen[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Outcome of a `sat(n, H)` computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatResult {
    pub n: usize,
    pub profile: CliqueProfile,
    /// Smallest edge count of a saturated graph, when one was found within the cap.
    pub sat_value: Option<u64>,
    /// Every saturated class at `sat_value` edges, as canonical graph6.
    pub extremal_graphs: Vec<String>,
    /// True when the minimum was reached; false when the edge cap was hit first.
    pub exhausted: bool,
    /// The union has more vertices than `n`, so only `K_n` is (vacuously) saturated.
    pub degenerate: bool,
}

/// `sat(n, profile)` by enumerating every class with `m = 0, 1, ..., m_cap` edges.
pub fn sat_number(n: usize, profile: &CliqueProfile, m_cap: usize, budget: SearchBudget) -> Result<SatResult, ExactError> {
    if n > ENUM_MAX {
        return Err(ExactError::TooLargeForEnumeration(n));
    }
    if let Some(result) = degenerate_result(n, profile)? {
        return Ok(result);
    }
    let top = m_cap.min(binom2(n) as usize);
    let levels = (0..=top).map(|m| enumerate_graphs(n, m).map(|gs| (m, gs)));
    scan_levels(n, profile, levels, budget)
}

/// `sat(n, profile)` over an externally supplied list of graphs.
///
/// The list must contain at least one representative of every class with `n`
/// vertices and at most `m_cap` edges for the result to be the true minimum.
/// Graphs of other orders are ignored; isomorphic duplicates are merged when
/// `n <= CANON_MAX`.
pub fn sat_number_from_graphs(
    n: usize,
    profile: &CliqueProfile,
    m_cap: usize,
    graphs: &[Graph],
    budget: SearchBudget,
) -> Result<SatResult, ExactError> {
    if let Some(result) = degenerate_result(n, profile)? {
        return Ok(result);
    }
    let top = m_cap.min(binom2(n) as usize);
    let mut by_size: Vec<Vec<Graph>> = vec![Vec::new(); top + 1];
    let mut seen = HashSet::new();
    for g in graphs.iter().filter(|g| g.order() == n && g.size() <= top) {
        let (key, rep) = if n <= CANON_MAX {
            let form = canonical_form(g)?;
            (emit_graph6(&form.to_graph()), form.to_graph())
        } else {
            (emit_graph6(g), g.clone())
        };
        if seen.insert(key) {
            by_size[rep.size()].push(rep);
        }
    }
    for level in &mut by_size {
        level.sort_by_cached_key(emit_graph6);
    }
    let levels = by_size.into_iter().enumerate().map(Ok);
    scan_levels(n, profile, levels, budget)
}

fn degenerate_result(n: usize, profile: &CliqueProfile) -> Result<Option<SatResult>, ExactError> {
    if profile.total() <= n {
        return Ok(None);
    }
    let k = Graph::complete(n).map_err(|_| ExactError::TooLargeForEnumeration(n))?;
    Ok(Some(SatResult {
        n,
        profile: profile.clone(),
        sat_value: Some(binom2(n)),
        extremal_graphs: vec![emit_graph6(&k)],
        exhausted: true,
        degenerate: true,
    }))
}

fn scan_levels(
    n: usize,
    profile: &CliqueProfile,
    levels: impl Iterator<Item = Result<(usize, Vec<Graph>), ExactError>>,
    budget: SearchBudget,
) -> Result<SatResult, ExactError> {
    for level in levels {
        let (m, graphs) = level?;
        let answers: Vec<Answer> = graphs
            .par_iter()
            .map(|g| is_saturated(g, profile, budget).answer())
            .collect();
        if answers.contains(&Answer::Undecided) {
            return Err(ExactError::Undecided { m });
        }
        let extremal: Vec<String> = graphs
            .iter()
            .zip(&answers)
            .filter(|(_, &a)| a == Answer::Yes)
            .map(|(g, _)| emit_graph6(g))
            .collect();
        if !extremal.is_empty() {
            return Ok(SatResult {
                n,
                profile: profile.clone(),
                sat_value: Some(m as u64),
                extremal_graphs: extremal,
                exhausted: true,
                degenerate: false,
            });
        }
    }
    Ok(SatResult {
        n,
        profile: profile.clone(),
        sat_value: None,
        extremal_graphs: Vec::new(),
        exhausted: false,
        degenerate: false,
    })
}

/// Saturated and of minimum size among saturated graphs of the same order.
pub fn is_extremal(g: &Graph, profile: &CliqueProfile, budget: SearchBudget) -> Result<Answer, ExactError> {
    match is_saturated(g, profile, budget).status {
        SaturationStatus::NotSaturated => return Ok(Answer::No),
        SaturationStatus::Undecided => return Ok(Answer::Undecided),
        SaturationStatus::Saturated => {}
    }
    match sat_number(g.order(), profile, g.size(), budget) {
        Ok(result) => Ok(Answer::from_bool(result.sat_value == Some(g.size() as u64))),
        Err(ExactError::Undecided { .. }) => Ok(Answer::Undecided),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph6::parse_graph6;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn profile(s: &str) -> CliqueProfile {
        s.parse().unwrap()
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for k in 0..n {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..=k).map(move |i| {
                        let mut q = p.clone();
                        q.insert(i, k);
                        q
                    })
                })
                .collect();
        }
        out
    }

    fn brute_isomorphic(a: &Graph, b: &Graph) -> bool {
        a.order() == b.order()
            && a.size() == b.size()
            && permutations(a.order()).iter().any(|p| a.permute(p) == *b)
    }

    // Minimum over all labellings, as a string of graph6 column-order bits.
    fn brute_canonical(g: &Graph, perms: &[Vec<usize>]) -> String {
        perms
            .iter()
            .map(|p| {
                let h = g.permute(p);
                let n = h.order();
                let mut s = String::new();
                for j in 1..n {
                    for i in 0..j {
                        s.push(if h.has_edge(i, j) { '1' } else { '0' });
                    }
                }
                s
            })
            .min()
            .unwrap()
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
        let mut edges = Vec::new();
        for v in 1..n {
            for u in 0..v {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn census_small_orders() {
        let counts = |n: usize| -> usize {
            (0..=binom2(n) as usize)
                .map(|m| enumerate_graphs(n, m).unwrap().len())
                .sum()
        };
        assert_eq!(counts(1), 1);
        assert_eq!(counts(2), 2);
        assert_eq!(counts(3), 4);
        assert_eq!(counts(4), 11);
        assert_eq!(counts(5), 34);
        assert_eq!(counts(6), 156);
    }

    #[test]
    fn census_matches_permutation_dedup() {
        for n in 1..=5 {
            let perms = permutations(n);
            let slots = slot_pairs(n);
            let mut brute = BTreeSet::new();
            for mask in 0u32..1 << slots.len() {
                let edges: Vec<_> = (0..slots.len())
                    .filter(|&k| mask >> k & 1 == 1)
                    .map(|k| slots[k])
                    .collect();
                let g = Graph::from_edges(n, &edges).unwrap();
                brute.insert((g.size(), brute_canonical(&g, &perms)));
            }
            for m in 0..=slots.len() {
                let reps = enumerate_graphs(n, m).unwrap();
                let ours: BTreeSet<String> = reps.iter().map(|g| brute_canonical(g, &perms)).collect();
                assert_eq!(ours.len(), reps.len(), "duplicate class at n={n} m={m}");
                let theirs: BTreeSet<String> = brute
                    .iter()
                    .filter(|(size, _)| *size == m)
                    .map(|(_, s)| s.clone())
                    .collect();
                assert_eq!(ours, theirs, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn canonical_form_is_exact_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..=7);
            let a = random_graph(&mut rng, n, 0.5);
            let b = if rng.gen_bool(0.5) {
                let mut perm: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    perm.swap(i, rng.gen_range(0..=i));
                }
                a.permute(&perm)
            } else {
                random_graph(&mut rng, n, 0.5)
            };
            let same = canonical_form(&a).unwrap() == canonical_form(&b).unwrap();
            assert_eq!(same, brute_isomorphic(&a, &b));
        }
    }

    #[test]
    fn canonical_form_is_a_relabelling() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let perms: Vec<_> = (0..=6).map(permutations).collect();
        for _ in 0..100 {
            let n = rng.gen_range(1..=6);
            let density = rng.gen();
            let g = random_graph(&mut rng, n, density);
            let form = canonical_form(&g).unwrap();
            assert!(form.bit_string() >= brute_canonical(&g, &perms[n]));
            assert!(brute_isomorphic(&form.to_graph(), &g));
        }
    }

    #[test]
    fn canonical_form_handles_ten_vertices() {
        let petersen = parse_graph6(b"IheA@GUAo").unwrap();
        let mut perm: Vec<usize> = (0..10).rev().collect();
        perm.swap(2, 7);
        let a = canonical_form(&petersen).unwrap();
        let b = canonical_form(&petersen.permute(&perm)).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            canonical_form(&Graph::empty(11).unwrap()),
            Err(ExactError::TooLargeForCanon(11))
        );
    }

    #[test]
    fn small_forms() {
        let form = canonical_form(&Graph::empty(4).unwrap()).unwrap();
        assert_eq!(form.bit_string(), "000000");
        assert_ne!(
            canonical_form(&Graph::path(3).unwrap()),
            canonical_form(&Graph::complete(3).unwrap())
        );
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(canonical_form(&c5), canonical_form(&c5.permute(&[0, 2, 4, 1, 3])));
    }

    #[test]
    fn enumeration_limits() {
        assert_eq!(enumerate_graphs(9, 3), Err(ExactError::TooLargeForEnumeration(9)));
        assert_eq!(enumerate_graphs(3, 4), Err(ExactError::TooManyEdges { n: 3, m: 4 }));
        assert_eq!(enumerate_graphs(0, 0).unwrap().len(), 1);
    }

    #[test]
    fn triangle_saturation_is_a_star() {
        for n in 4..=8 {
            let r = sat_number(n, &profile("3"), binom2(n) as usize, SearchBudget::default()).unwrap();
            assert_eq!(r.sat_value, Some(n as u64 - 1), "n={n}");
            assert!(r.exhausted && !r.degenerate);
            let star = join_with_independent(1, n - 1);
            let star = emit_graph6(&canonical_form(&star).unwrap().to_graph());
            assert_eq!(r.extremal_graphs, vec![star]);
        }
    }

    #[test]
    fn two_edges_on_five_vertices() {
        let r = sat_number(5, &profile("2,2"), 10, SearchBudget::default()).unwrap();
        assert_eq!(r.sat_value, Some(3));
        let k3 = Graph::complete(3).unwrap().disjoint_union(&Graph::empty(2).unwrap()).unwrap();
        let k3 = emit_graph6(&canonical_form(&k3).unwrap().to_graph());
        assert!(r.extremal_graphs.contains(&k3));
    }

    #[test]
    fn degenerate_and_capped() {
        let r = sat_number(4, &profile("3,3"), 6, SearchBudget::default()).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.sat_value, Some(6));
        assert_eq!(r.extremal_graphs, vec!["C~".to_string()]);
        let r = sat_number(6, &profile("3"), 3, SearchBudget::default()).unwrap();
        assert_eq!(r.sat_value, None);
        assert!(!r.exhausted);
    }

    #[test]
    fn stream_agrees_with_enumeration() {
        let p = profile("2,3");
        let mut stream: Vec<Graph> = (0..=10).flat_map(|m| enumerate_graphs(5, m).unwrap()).collect();
        // Relabelled duplicates and graphs of other orders are ignored.
        let extra: Vec<Graph> = stream.iter().map(|g| g.permute(&[4, 3, 2, 1, 0])).collect();
        stream.extend(extra);
        stream.push(Graph::complete(4).unwrap());
        stream.reverse();
        let a = sat_number(5, &p, 10, SearchBudget::default()).unwrap();
        let b = sat_number_from_graphs(5, &p, 10, &stream, SearchBudget::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn result_independent_of_worker_count() {
        let p = profile("2,3");
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| sat_number(7, &p, 21, SearchBudget::default()).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn extremality() {
        let b = SearchBudget::default();
        assert_eq!(is_extremal(&Graph::cycle(5).unwrap(), &profile("2,2"), b), Ok(Answer::No));
        let star = join_with_independent(1, 4);
        assert_eq!(is_extremal(&star, &profile("3"), b), Ok(Answer::Yes));
        assert_eq!(is_extremal(&Graph::complete(5).unwrap(), &profile("3"), b), Ok(Answer::No));
    }

    fn join_with_independent(core: usize, independent: usize) -> Graph {
        Graph::complete(core)
            .unwrap()
            .join(&Graph::empty(independent).unwrap())
            .unwrap()
    }
}
