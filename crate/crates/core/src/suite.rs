//! The desk acceptance suite: construction identities, the saturation grid,
//! one large saturation run, known small values, oracle agreement and
//! witness-overlap checks.
//!
//! Every sample is drawn from a fixed seed before any parallel work, and
//! reports carry no timings, so output is identical for any worker count.

use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::constructions::{
    build_h, published_edge_expression, sat_formula_known, theorem2_condition, CliqueProfile,
};
use crate::embed::{find_embedding, naive_contains, SearchBudget, SearchOutcome};
use crate::exact::{canonical_form, sat_number, sat_number_from_graphs, SatResult};
use crate::graph::{Graph, VertexSet};
use crate::graph6::emit_graph6;
use crate::saturation::{check_saturation, extract_witness, is_free, Answer, Mutation, SaturationOptions, SaturationStatus};
use crate::verify::{intersection_matrix, verify_theorem2_with};

#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    /// Worker threads; 0 uses the ambient rayon pool.
    pub workers: usize,
    pub budget: SearchBudget,
    #[doc(hidden)]
    pub mutation: Option<Mutation>,
    /// Graphs on nine vertices covering every class up to 14 edges.
    pub stream9: Option<Vec<Graph>>,
}

impl SuiteOptions {
    fn saturation(&self) -> SaturationOptions {
        SaturationOptions {
            budget: self.budget,
            mutation: self.mutation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub skipped: bool,
    pub summary: Value,
}

impl CriterionResult {
    fn new(id: u8, name: &str, passed: bool, summary: Value) -> Self {
        CriterionResult {
            id,
            name: name.to_string(),
            passed,
            skipped: false,
            summary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn new(criteria: Vec<CriterionResult>) -> Self {
        SuiteReport {
            suite: "desk".to_string(),
            passed: criteria.iter().all(|c| c.passed),
            criteria,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite report serializes")
    }
}

/// A criterion runner, by id and name.
pub type Criterion = (u8, &'static str, fn(&SuiteOptions) -> CriterionResult);

pub const DESK_CRITERIA: [Criterion; 6] = [
    (1, "edge_count_identity", edge_count_identity),
    (2, "saturation_iff_grid", saturation_iff_grid),
    (3, "large_instance_saturation", large_instance_saturation),
    (4, "known_sat_values", known_sat_values),
    (5, "oracle_equivalence", oracle_equivalence),
    (6, "construction_tightness", construction_tightness),
];

/// Runs `f` on a pool with `workers` threads, or inline when `workers` is 0.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
        .install(f)
}

pub fn run_desk(opts: &SuiteOptions) -> SuiteReport {
    with_workers(opts.workers, || {
        SuiteReport::new(DESK_CRITERIA.iter().map(|(_, _, run)| run(opts)).collect())
    })
}

/// Sorted profiles with `len` parts drawn from `lo..=hi`.
pub fn profiles(len: usize, lo: usize, hi: usize) -> Vec<CliqueProfile> {
    fn go(len: usize, lo: usize, hi: usize, prefix: &mut Vec<usize>, out: &mut Vec<CliqueProfile>) {
        if prefix.len() == len {
            out.push(CliqueProfile::new(prefix.clone()).expect("parts are at least 2"));
            return;
        }
        let start = prefix.last().copied().unwrap_or(lo);
        for p in start..=hi {
            prefix.push(p);
            go(len, lo, hi, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(len, lo, hi, &mut Vec::new(), &mut out);
    out
}

fn choose2(k: usize) -> u64 {
    (k * k.saturating_sub(1) / 2) as u64
}

fn direct_edge_formula(n: usize, p: &[usize]) -> u64 {
    let core = p[0] - 2;
    choose2(core) + (core * (n - p[0] + 2)) as u64 + p[1..].iter().map(|&q| choose2(q + 1)).sum::<u64>()
}

pub fn edge_count_identity(_: &SuiteOptions) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut instances = Vec::new();
    for t in 2..=4 {
        for p in profiles(t, 2, 13) {
            let lo = p.min_order();
            for offset in (0..64).choose_multiple(&mut rng, 5) {
                instances.push((lo + offset, p.clone()));
            }
        }
    }
    let rows: Vec<(u64, u64, u64)> = instances
        .par_iter()
        .map(|(n, p)| {
            let (g, _) = build_h(*n, p).expect("admissible order");
            let published = published_edge_expression(*n, p).expect("admissible order");
            (g.size() as u64, direct_edge_formula(*n, p.parts()), published)
        })
        .collect();
    let mismatches = rows.iter().filter(|(e, direct, _)| e != direct).count();
    let published_differs = rows.iter().filter(|(e, _, published)| e != published).count();
    let witness = CliqueProfile::new(vec![4, 4, 8, 12]).expect("valid profile");
    let (g, _) = build_h(255, &witness).expect("admissible order");
    CriterionResult::new(
        1,
        "edge_count_identity",
        mismatches == 0,
        json!({
            "instances": rows.len(),
            "mismatches": mismatches,
            "published_expression_differs": published_differs,
            "example": {
                "n": 255,
                "profile": witness.to_string(),
                "edges": g.size(),
                "direct": direct_edge_formula(255, witness.parts()),
                "published": published_edge_expression(255, &witness).expect("admissible order"),
                "missing_term": choose2(2),
            },
        }),
    )
}

pub fn saturation_iff_grid(opts: &SuiteOptions) -> CriterionResult {
    let mut instances = Vec::new();
    for t in 2..=3 {
        for p in profiles(t, 2, 5) {
            let lo = p.min_order();
            for n in [lo, lo + 2, lo + 5].into_iter().filter(|&n| n <= 16) {
                instances.push((n, p.clone()));
            }
        }
    }
    let sat = opts.saturation();
    let outcomes: Vec<(bool, bool, Value)> = instances
        .par_iter()
        .map(|(n, p)| {
            let r = verify_theorem2_with(*n, p, &sat).expect("constructible");
            let observed = json!({ "n": n, "profile": p.to_string(), "observed": r.details[0].observed });
            (r.conclusion_holds, r.undecided, observed)
        })
        .collect();
    let mismatches: Vec<&Value> = outcomes.iter().filter(|(ok, _, _)| !ok).map(|(_, _, v)| v).collect();
    let undecided = outcomes.iter().filter(|(_, u, _)| *u).count();
    let saturated = instances.iter().filter(|(_, p)| theorem2_condition(p)).count();
    CriterionResult::new(
        2,
        "saturation_iff_grid",
        mismatches.is_empty(),
        json!({
            "instances": instances.len(),
            "condition_true": saturated,
            "mismatches": mismatches.len(),
            "undecided": undecided,
            "first_mismatches": mismatches.iter().take(5).collect::<Vec<_>>(),
        }),
    )
}

pub fn large_instance_saturation(opts: &SuiteOptions) -> CriterionResult {
    let p = CliqueProfile::new(vec![4, 4, 8, 12]).expect("valid profile");
    let sat = opts.saturation();
    let run = |n: usize| {
        let (g, _) = build_h(n, &p).expect("admissible order");
        (g.size(), check_saturation(&g, &p, &sat).status)
    };
    let (edges, status) = run(255);
    let mut summary = json!({
        "n": 255,
        "profile": p.to_string(),
        "edges": edges,
        "expected_edges": 631,
        "status": status,
        "fallback": Value::Null,
    });
    let mut passed = edges == 631 && status == SaturationStatus::Saturated;
    if status == SaturationStatus::Undecided {
        let (fallback_edges, fallback_status) = run(60);
        summary["fallback"] = json!({ "n": 60, "edges": fallback_edges, "status": fallback_status });
        passed = edges == 631 && fallback_status == SaturationStatus::Saturated;
    }
    CriterionResult::new(3, "large_instance_saturation", passed, summary)
}

fn canonical_g6(g: &Graph) -> String {
    emit_graph6(&canonical_form(g).expect("small graph").to_graph())
}

fn star_like(core: usize, rest: usize) -> Graph {
    Graph::complete(core)
        .and_then(|k| k.join(&Graph::empty(rest)?))
        .expect("small graph")
}

pub fn known_sat_values(opts: &SuiteOptions) -> CriterionResult {
    let b = opts.budget;
    let triangle = CliqueProfile::new(vec![3]).expect("valid profile");
    let two_edges = CliqueProfile::new(vec![2, 2]).expect("valid profile");
    let mut cases = Vec::new();
    let mut all = true;
    for n in [5usize, 6] {
        let r = sat_number(n, &triangle, 15, b).expect("small instance decides");
        let formula = (n - 1) as u64;
        let extremal = canonical_g6(&star_like(1, n - 1));
        let ok = r.sat_value == Some(formula)
            && sat_formula_known(n, &triangle) == Some(formula)
            && r.extremal_graphs.contains(&extremal);
        all &= ok;
        cases.push(json!({ "case": format!("sat({n},(3))"), "expected": formula, "result": r, "passed": ok }));
    }
    let r = sat_number(5, &two_edges, 10, b).expect("small instance decides");
    let ok = r.sat_value == Some(3);
    all &= ok;
    cases.push(json!({ "case": "sat(5,(2,2))", "expected": 3, "result": r, "passed": ok }));

    let double_triangle = CliqueProfile::new(vec![3, 3]).expect("valid profile");
    let expected = sat_formula_known(9, &double_triangle).expect("equal parts");
    let mut skipped = false;
    match &opts.stream9 {
        Some(graphs) => {
            let r: Result<SatResult, _> = sat_number_from_graphs(9, &double_triangle, expected as usize, graphs, b);
            let ok = matches!(&r, Ok(r) if r.sat_value == Some(expected));
            all &= ok;
            cases.push(json!({ "case": "sat(9,(3,3))", "expected": expected, "result": r.ok(), "passed": ok }));
        }
        None => {
            skipped = true;
            cases.push(json!({
                "case": "sat(9,(3,3))",
                "expected": expected,
                "skipped": "no nine-vertex graph6 stream supplied; built-in enumeration stops at eight vertices",
            }));
        }
    }
    let mut result = CriterionResult::new(4, "known_sat_values", all, json!({ "cases": cases }));
    result.skipped = skipped;
    result
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        for u in 0..v {
            if rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("valid edges")
}

pub fn oracle_equivalence(opts: &SuiteOptions) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples: Vec<(Graph, CliqueProfile)> = (0..500)
        .map(|_| {
            let n = rng.gen_range(1..=10);
            let density = rng.gen_range(0.2..0.95);
            let g = random_graph(&mut rng, n, density);
            let t = rng.gen_range(1..=3);
            let parts = (0..t).map(|_| rng.gen_range(2..=4)).collect();
            (g, CliqueProfile::new(parts).expect("parts are at least 2"))
        })
        .collect();
    let results: Vec<(bool, bool)> = samples
        .par_iter()
        .map(|(g, p)| {
            let expected = naive_contains(g, p);
            match find_embedding(g, p, opts.budget) {
                SearchOutcome::Found(_) => (expected, true),
                SearchOutcome::NotFound => (!expected, false),
                SearchOutcome::BudgetExhausted => (false, false),
            }
        })
        .collect();
    let disagreements = results.iter().filter(|(agree, _)| !agree).count();
    let contained = results.iter().filter(|(_, found)| *found).count();
    CriterionResult::new(
        5,
        "oracle_equivalence",
        disagreements == 0,
        json!({ "pairs": samples.len(), "disagreements": disagreements, "containing": contained }),
    )
}

struct TightnessCase {
    profile: CliqueProfile,
    n: usize,
    outside_edges: u64,
    expected: u64,
    star: Option<StarOutcome>,
}

struct StarOutcome {
    free: Answer,
    pairs: usize,
    failures: Vec<Value>,
}

pub fn construction_tightness(opts: &SuiteOptions) -> CriterionResult {
    let all = profiles(4, 2, 13);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    // Pair seeds are fixed up front so sampling does not depend on scheduling.
    let seeds: Vec<u64> = all.iter().map(|_| rng.gen()).collect();
    let cases: Vec<TightnessCase> = all
        .par_iter()
        .zip(&seeds)
        .map(|(p, &seed)| tightness_case(p, seed, opts.budget))
        .collect();
    let equality_failures: Vec<Value> = cases
        .iter()
        .filter(|c| c.outside_edges != c.expected)
        .map(|c| json!({ "profile": c.profile.to_string(), "n": c.n, "edges": c.outside_edges, "expected": c.expected }))
        .collect();
    let stars: Vec<(&TightnessCase, &StarOutcome)> = cases.iter().filter_map(|c| c.star.as_ref().map(|s| (c, s))).collect();
    let star_pairs: usize = stars.iter().map(|(_, s)| s.pairs).sum();
    let star_failures: Vec<Value> = stars
        .iter()
        .flat_map(|(c, s)| s.failures.iter().map(move |f| json!({ "profile": c.profile.to_string(), "failure": f })))
        .collect();
    let not_free = stars.iter().filter(|(_, s)| s.free != Answer::Yes).count();
    CriterionResult::new(
        6,
        "construction_tightness",
        equality_failures.is_empty() && star_failures.is_empty() && not_free == 0,
        json!({
            "profiles": cases.len(),
            "equality_failures": equality_failures.len(),
            "first_equality_failures": equality_failures.iter().take(5).collect::<Vec<_>>(),
            "overlap_instances": stars.len(),
            "overlap_pairs": star_pairs,
            "overlap_failures": star_failures.len(),
            "first_overlap_failures": star_failures.iter().take(5).collect::<Vec<_>>(),
            "overlap_instances_not_free": not_free,
        }),
    )
}

fn tightness_case(p: &CliqueProfile, seed: u64, budget: SearchBudget) -> TightnessCase {
    // Two independent vertices make the minimum-degree vertex one of them.
    let n = p.min_order() + 2;
    let (g, layout) = build_h(n, p).expect("admissible order");
    let v = g.min_degree_vertex().expect("non-empty");
    let s = *g.neighbors(v);
    let outside = VertexSet::full(n).difference(&s);
    let outside_edges = g.edges_within(&outside) as u64;
    let expected = p.parts()[1..].iter().map(|&q| choose2(q + 1)).sum();
    let star = theorem2_condition(p).then(|| {
        debug_assert!(layout.independent.contains(v));
        overlap_checks(&g, p, v, &s, seed, budget)
    });
    TightnessCase {
        profile: p.clone(),
        n,
        outside_edges,
        expected,
        star,
    }
}

fn overlap_checks(g: &Graph, p: &CliqueProfile, v: usize, s: &VertexSet, seed: u64, budget: SearchBudget) -> StarOutcome {
    let free = is_free(g, p, budget);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates = g.vertices().difference(s);
    candidates.remove(v);
    let mut failures = Vec::new();
    let pairs = 50;
    for _ in 0..pairs {
        let w = candidates.iter().choose(&mut rng).expect("candidates exist");
        let outcome = extract_witness(g, p, w, budget).map_err(|e| e.to_string()).and_then(|vw| {
            let x = vw.vertices().iter().choose(&mut rng).expect("witness is non-empty");
            let m = intersection_matrix(g, p, &vw, x, budget).map_err(|e| e.to_string())?;
            let report = m.lemma_star(p).map_err(|e| e.to_string())?;
            Ok((x, m, report))
        });
        match outcome {
            Ok((_, _, r)) if r.premises_hold && r.conclusion_holds => {}
            Ok((x, m, r)) => failures.push(json!({ "w": w, "x": x, "l": m.l, "details": r.details })),
            Err(e) => failures.push(json!({ "w": w, "error": e })),
        }
    }
    StarOutcome { free, pairs, failures }
}
