//! The candidate extremal graphs `H(n; p1, ..., pt)` and the closed forms around them.
//!
//! `H(n; p1, ..., pt)` is a clique on `p1 - 2` vertices joined to the disjoint
//! union of cliques of orders `p2 + 1, ..., pt + 1` and an independent set that
//! fills the graph up to `n` vertices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexSet, MAX_VERTICES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("a clique profile needs at least one part")]
    Empty,
    #[error("clique order {0} is below 2")]
    PartTooSmall(usize),
    #[error("cannot parse clique order {0:?}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("the construction needs at least two parts, got {0}")]
    TooFewParts(usize),
    #[error("this predicate is defined for exactly four parts, got {0}")]
    NotFourParts(usize),
    #[error("n = {n} is too small for the profile: at least {needed} vertices are required")]
    OrderTooSmall { n: usize, needed: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Clique orders `p1 <= p2 <= ... <= pt` of the forbidden union `K_p1 ∪ ... ∪ K_pt`.
///
/// Parts are sorted on construction; duplicates are kept.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct CliqueProfile {
    parts: Vec<usize>,
}

impl CliqueProfile {
    pub fn new(mut parts: Vec<usize>) -> Result<Self, ProfileError> {
        if parts.is_empty() {
            return Err(ProfileError::Empty);
        }
        if let Some(&p) = parts.iter().find(|&&p| p < 2) {
            return Err(ProfileError::PartTooSmall(p));
        }
        parts.sort_unstable();
        Ok(CliqueProfile { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of cliques `t`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `p1`, the smallest clique order.
    pub fn smallest(&self) -> usize {
        self.parts[0]
    }

    /// `p1 + ... + pt`.
    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// The profile `(p2, ..., pt)` left after removing the smallest clique.
    pub fn tail(&self) -> Option<CliqueProfile> {
        (self.parts.len() > 1).then(|| CliqueProfile {
            parts: self.parts[1..].to_vec(),
        })
    }

    /// Smallest `n` for which `H(n; profile)` exists: the independent block is empty.
    pub fn min_order(&self) -> usize {
        (self.total() + self.len()).saturating_sub(3)
    }
}

impl TryFrom<Vec<usize>> for CliqueProfile {
    type Error = ProfileError;
    fn try_from(parts: Vec<usize>) -> Result<Self, ProfileError> {
        Self::new(parts)
    }
}

impl From<CliqueProfile> for Vec<usize> {
    fn from(p: CliqueProfile) -> Vec<usize> {
        p.parts
    }
}

impl FromStr for CliqueProfile {
    type Err = ProfileError;

    /// Comma-separated clique orders, e.g. `4,4,8,12`.
    fn from_str(s: &str) -> Result<Self, ProfileError> {
        let parts = s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<usize>().map_err(|_| ProfileError::Parse(p.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(parts)
    }
}

impl fmt::Display for CliqueProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        f.write_str(&items.join(","))
    }
}

/// Block structure of a built `H(n; profile)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HLayout {
    /// The `(p1 - 2)`-clique joined to everything else.
    pub s: VertexSet,
    /// Cliques of orders `p2 + 1, ..., pt + 1`, in profile order.
    pub cliques: Vec<VertexSet>,
    pub independent: VertexSet,
}

pub(crate) fn binom2(k: usize) -> u64 {
    let k = k as u64;
    k * k.saturating_sub(1) / 2
}

fn check_order(n: usize, profile: &CliqueProfile) -> Result<(), ConstructionError> {
    if profile.len() < 2 {
        return Err(ConstructionError::TooFewParts(profile.len()));
    }
    let needed = profile.min_order();
    if n < needed {
        return Err(ConstructionError::OrderTooSmall { n, needed });
    }
    if n > MAX_VERTICES {
        return Err(GraphError::TooManyVertices(n).into());
    }
    Ok(())
}

/// Builds `H(n; profile)`.
///
/// Vertex order: the join core first, then the clique blocks in profile
/// order, then the independent block.
pub fn build_h(n: usize, profile: &CliqueProfile) -> Result<(Graph, HLayout), ConstructionError> {
    check_order(n, profile)?;
    let parts = profile.parts();
    let core = parts[0] - 2;
    let mut body = Graph::empty(0)?;
    let mut cliques = Vec::with_capacity(parts.len() - 1);
    let mut offset = core;
    for &p in &parts[1..] {
        body = body.disjoint_union(&Graph::complete(p + 1)?)?;
        cliques.push(VertexSet::range(offset, offset + p + 1));
        offset += p + 1;
    }
    let independent = n - offset;
    body = body.disjoint_union(&Graph::empty(independent)?)?;
    let g = Graph::complete(core)?.join(&body)?;
    let layout = HLayout {
        s: VertexSet::full(core),
        cliques,
        independent: VertexSet::range(offset, n),
    };
    Ok((g, layout))
}

/// Direct edge count of `H(n; profile)`:
/// `C(p1-2, 2) + (p1-2)(n-p1+2) + Σ_{i>=2} C(pi+1, 2)`.
pub fn edge_count_h(n: usize, profile: &CliqueProfile) -> Result<u64, ConstructionError> {
    check_order(n, profile)?;
    let core = profile.smallest() - 2;
    let rest: u64 = profile.parts()[1..].iter().map(|&p| binom2(p + 1)).sum();
    Ok(binom2(core) + (core * (n - core)) as u64 + rest)
}

/// The published four-clique expression `(p1-2)(n-p1+2) + Σ_{i>=2} C(pi+1, 2)`,
/// which differs from [`edge_count_h`] by `C(p1-2, 2)`.
pub fn published_edge_expression(n: usize, profile: &CliqueProfile) -> Result<u64, ConstructionError> {
    Ok(edge_count_h(n, profile)? - binom2(profile.smallest() - 2))
}

/// For every `2 <= i <= t-1`: `p_{i+1} - p_i >= p1` or `p_{i+1} = p_i`.
/// Vacuously true for `t <= 2`.
pub fn theorem2_condition(profile: &CliqueProfile) -> bool {
    let parts = profile.parts();
    let p1 = parts[0];
    parts
        .iter()
        .skip(1)
        .zip(parts.iter().skip(2))
        .all(|(&a, &b)| b == a || b - a >= p1)
}

/// Lower bound `3(p1-2) + Σ_{i>=2} pi(pi+1)` that `n` must strictly exceed.
pub fn order_bound(profile: &CliqueProfile) -> usize {
    let parts = profile.parts();
    3 * (parts[0] - 2) + parts[1..].iter().map(|p| p * (p + 1)).sum::<usize>()
}

/// Hypotheses of the four-clique theorem: gaps `p_{i+1} - p_i >= p1` for
/// `i = 2, 3`, `4 <= p1 <= p2`, and `n > 3(p1-2) + Σ_{i>=2} pi(pi+1)`.
pub fn theorem1_condition(n: usize, profile: &CliqueProfile) -> Result<bool, ConstructionError> {
    let p = profile.parts();
    if p.len() != 4 {
        return Err(ConstructionError::NotFourParts(p.len()));
    }
    let gaps = p[2] - p[1] >= p[0] && p[3] - p[2] >= p[0];
    Ok(gaps && p[0] >= 4 && n > order_bound(profile))
}

/// Closed forms for `sat(n, K_p1 ∪ ... ∪ K_pt)` known from the literature:
/// a single clique, `t` equal cliques, and the four-clique theorem.
pub fn sat_formula_known(n: usize, profile: &CliqueProfile) -> Option<u64> {
    let parts = profile.parts();
    let p = parts[0];
    if parts.len() == 1 {
        if n < p {
            return None;
        }
        return Some(((p - 2) * (n - p + 2)) as u64 + binom2(p - 2));
    }
    if n < profile.min_order() || n > MAX_VERTICES {
        return None;
    }
    if parts.iter().all(|&q| q == p) {
        let t = parts.len() as u64;
        return Some(((p - 2) * (n - p + 2)) as u64 + binom2(p - 2) + (t - 1) * binom2(p + 1));
    }
    if parts.len() == 4 && theorem1_condition(n, profile).unwrap_or(false) {
        return edge_count_h(n, profile).ok();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prof(parts: &[usize]) -> CliqueProfile {
        CliqueProfile::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn profile_parsing_sorts() {
        let p: CliqueProfile = "12,4,8,4".parse().unwrap();
        assert_eq!(p.parts(), &[4, 4, 8, 12]);
        assert_eq!(p.to_string(), "4,4,8,12");
        assert_eq!("".parse::<CliqueProfile>(), Err(ProfileError::Empty));
        assert_eq!("1,3".parse::<CliqueProfile>(), Err(ProfileError::PartTooSmall(1)));
        assert!(matches!("3,x".parse::<CliqueProfile>(), Err(ProfileError::Parse(_))));
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "[4,4,8,12]");
        assert!(serde_json::from_str::<CliqueProfile>("[1]").is_err());
    }

    #[test]
    fn small_constructions() {
        let (g, layout) = build_h(7, &prof(&[2, 3])).unwrap();
        assert_eq!(g.size(), 6);
        assert!(layout.s.is_empty());
        assert_eq!(layout.cliques[0].to_vec(), vec![0, 1, 2, 3]);
        assert_eq!(layout.independent.to_vec(), vec![4, 5, 6]);
        let k4 = Graph::complete(4).unwrap();
        assert_eq!(g, k4.disjoint_union(&Graph::empty(3).unwrap()).unwrap());

        let (g, _) = build_h(10, &prof(&[3, 3])).unwrap();
        assert_eq!(g.size(), 15);
    }

    #[test]
    fn four_part_construction() {
        let profile = prof(&[4, 4, 8, 12]);
        let (g, layout) = build_h(40, &profile).unwrap();
        assert_eq!(g.order(), 40);
        let sizes: Vec<usize> = std::iter::once(layout.s.len())
            .chain(layout.cliques.iter().map(VertexSet::len))
            .chain(std::iter::once(layout.independent.len()))
            .collect();
        assert_eq!(sizes, vec![2, 5, 9, 13, 11]);
        assert_eq!(g.size(), 201);
        assert_eq!(edge_count_h(40, &profile).unwrap(), 201);
    }

    #[test]
    fn edge_counts() {
        let profile = prof(&[4, 4, 8, 12]);
        assert_eq!(edge_count_h(255, &profile).unwrap(), 631);
        assert_eq!(published_edge_expression(255, &profile).unwrap(), 630);
        assert_eq!(edge_count_h(7, &prof(&[2, 3])).unwrap(), 6);
        assert_eq!(edge_count_h(10, &prof(&[5])), Err(ConstructionError::TooFewParts(1)));
        assert_eq!(
            build_h(3, &prof(&[2, 3])).unwrap_err(),
            ConstructionError::OrderTooSmall { n: 3, needed: 4 }
        );
    }

    #[test]
    fn layout_structure() {
        for parts in [vec![2, 2], vec![3, 5, 5], vec![4, 4, 8, 12], vec![5, 6, 11]] {
            let profile = prof(&parts);
            for extra in [0, 1, 6] {
                let n = profile.min_order() + extra;
                let (g, layout) = build_h(n, &profile).unwrap();
                let mut seen = layout.s.union(&layout.independent);
                for c in &layout.cliques {
                    assert!(seen.is_disjoint(c));
                    seen = seen.union(c);
                    assert!(g.is_clique(c));
                }
                assert_eq!(seen, g.vertices());
                assert_eq!(g.edges_within(&layout.independent), 0);
                for s in &layout.s {
                    assert_eq!(g.degree(s), n - 1);
                }
                if !layout.independent.is_empty() {
                    let min = g.degrees().into_iter().min().unwrap();
                    assert_eq!(min, profile.smallest() - 2);
                }
                assert_eq!(g.size() as u64, edge_count_h(n, &profile).unwrap());
            }
        }
    }

    #[test]
    fn theorem2_examples() {
        assert!(!theorem2_condition(&prof(&[2, 2, 3])));
        assert!(theorem2_condition(&prof(&[2, 2, 2])));
        assert!(theorem2_condition(&prof(&[4, 4, 8, 12])));
        assert!(theorem2_condition(&prof(&[3, 7])));
        assert!(!theorem2_condition(&prof(&[2, 3, 4])));
        assert!(theorem2_condition(&prof(&[2, 3, 5])));
    }

    #[test]
    fn theorem2_monotone_only_in_gap_branch() {
        // Growing the last part keeps the condition when the gap is already large
        // enough, and can break it from the equality branch.
        let base = prof(&[3, 4, 7]);
        assert!(theorem2_condition(&base));
        assert!(theorem2_condition(&prof(&[3, 4, 8])));
        assert!(theorem2_condition(&prof(&[3, 4, 4])));
        assert!(!theorem2_condition(&prof(&[3, 4, 5])));
    }

    #[test]
    fn theorem1_examples() {
        let profile = prof(&[4, 4, 8, 12]);
        assert_eq!(order_bound(&profile), 254);
        assert_eq!(theorem1_condition(255, &profile), Ok(true));
        assert_eq!(theorem1_condition(254, &profile), Ok(false));
        assert_eq!(theorem1_condition(1000, &prof(&[3, 3, 7, 11])), Ok(false));
        assert_eq!(
            theorem1_condition(1000, &prof(&[4, 8, 12])),
            Err(ConstructionError::NotFourParts(3))
        );
    }

    #[test]
    fn known_formulas() {
        assert_eq!(sat_formula_known(6, &prof(&[3])), Some(5));
        assert_eq!(sat_formula_known(9, &prof(&[3, 3])), Some(14));
        assert_eq!(sat_formula_known(5, &prof(&[2, 2])), Some(3));
        assert_eq!(sat_formula_known(10, &prof(&[2, 5])), None);
        assert_eq!(sat_formula_known(255, &prof(&[4, 4, 8, 12])), Some(631));
        assert_eq!(sat_formula_known(254, &prof(&[4, 4, 8, 12])), None);
    }
}
