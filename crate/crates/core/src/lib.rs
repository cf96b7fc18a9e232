//! Exact tools for saturation numbers of disjoint unions of cliques.
//!
//! The crate builds the candidate extremal graphs `H(n; p1, ..., pt)`, decides
//! whether a graph contains `K_p1 ∪ ... ∪ K_pt`, decides saturation, computes
//! `sat(n, H)` by exhaustive enumeration for small `n`, and checks the
//! structural properties that saturated graphs of this family must satisfy.

pub mod constructions;
pub mod embed;
pub mod exact;
pub mod graph;
pub mod graph6;
pub mod saturation;
pub mod suite;
pub mod verify;

pub use constructions::{build_h, edge_count_h, CliqueProfile, HLayout};
pub use exact::{canonical_form, enumerate_graphs, is_extremal, sat_number, CanonicalForm, SatResult};
pub use embed::{find_embedding, find_embedding_with_edge, Embedding, SearchBudget, SearchOutcome};
pub use graph::{Graph, GraphError, VertexSet, MAX_VERTICES};
pub use graph6::{emit_graph6, parse_graph6};
pub use saturation::{extract_witness, is_free, is_saturated, Answer, SaturationVerdict, WitnessHvw};
