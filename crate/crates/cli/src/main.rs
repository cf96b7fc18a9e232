use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cliquesat::constructions::{build_h, edge_count_h, CliqueProfile};
use cliquesat::embed::{find_embedding, find_embedding_with_edge, SearchBudget, SearchOutcome, DEFAULT_BUDGET};
use cliquesat::exact::{sat_number, sat_number_from_graphs, ExactError, SatResult};
use cliquesat::graph::Graph;
use cliquesat::graph6::{emit_graph6, parse_graph6_lines};
use cliquesat::saturation::{
    check_saturation, extract_witness, Mutation, SaturationOptions, SaturationStatus,
};
use cliquesat::suite::{with_workers, CriterionResult, SuiteOptions, SuiteReport, DESK_CRITERIA};
use cliquesat::verify::{
    check_lemma1, check_lemma2, check_lemma3, check_lemma6, lemma_star_for_pair, verify_theorem2, LemmaReport,
};

const EXIT_YES: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_UNDECIDED: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "cliquesat", version, about = "Saturation numbers of disjoint unions of cliques")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "CLIQUESAT_WORKERS", default_value_t = 0)]
    workers: usize,
    /// Node limit for each search.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the extremal construction H(n; profile).
    Construct {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        profile: CliqueProfile,
        #[arg(long, value_enum, default_value_t = Format::Graph6)]
        format: Format,
        /// Emit JSON with the graph6 string and the block layout.
        #[arg(long)]
        layout: bool,
    },
    /// Search each graph for a copy of the clique union.
    Check {
        #[command(flatten)]
        input: GraphInput,
        /// Require the copy to use this edge, as `u,v`.
        #[arg(long, value_parser = parse_pair)]
        edge: Option<(usize, usize)>,
    },
    /// Decide whether each graph is saturated.
    Saturated {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, hide = true, value_enum)]
        mutation: Option<MutationArg>,
    },
    /// Exact sat(n, profile) by exhaustive search.
    Satnum {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        profile: CliqueProfile,
        /// Largest edge count to try.
        #[arg(long)]
        m_cap: Option<usize>,
        /// graph6 file with the candidate graphs, for orders beyond the built-in enumerator.
        #[arg(long)]
        stream: Option<PathBuf>,
    },
    /// Run a structural checker on one instance, or the whole desk suite.
    Verify(VerifyArgs),
    /// Run a named acceptance suite.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct GraphInput {
    /// graph6 file, one graph per line.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    profile: CliqueProfile,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, required_unless_present = "suite", conflicts_with = "suite")]
    lemma: Option<Lemma>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    profile: Option<CliqueProfile>,
    #[arg(long)]
    w: Option<usize>,
    #[arg(long)]
    x: Option<usize>,
    /// graph6 file whose first graph replaces H(n; profile).
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    suite: Option<String>,
    #[command(flatten)]
    suite_args: SuiteExtras,
}

#[derive(Args)]
struct SuiteArgs {
    name: String,
    #[command(flatten)]
    extras: SuiteExtras,
}

#[derive(Args)]
struct SuiteExtras {
    /// graph6 stream of nine-vertex graphs for the sat(9,(3,3)) case.
    #[arg(long)]
    stream9: Option<PathBuf>,
    #[arg(long, hide = true, value_enum)]
    mutation: Option<MutationArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Graph6,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    IgnoreAddedEdge,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Self {
        match m {
            MutationArg::IgnoreAddedEdge => Mutation::IgnoreAddedEdge,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Lemma {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    #[value(name = "6")]
    Six,
    Star,
    Thm2,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected u,v, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

type Outcome = Result<u8, Usage>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_YES });
        }
    };
    if cli.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
            .expect("global pool is configured once");
    }
    let budget = SearchBudget::new(cli.budget).expect("budget range is validated by clap");
    let code = match run(cli.command, budget, cli.workers) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    };
    ExitCode::from(code)
}

fn run(command: Command, budget: SearchBudget, workers: usize) -> Outcome {
    match command {
        Command::Construct {
            n,
            profile,
            format,
            layout,
        } => construct(n, &profile, format, layout),
        Command::Check { input, edge } => check(&input, edge, budget),
        Command::Saturated { input, mutation } => saturated(&input, mutation, budget),
        Command::Satnum {
            n,
            profile,
            m_cap,
            stream,
        } => satnum(n, &profile, m_cap, stream.as_deref(), budget),
        Command::Verify(args) => match &args.suite {
            Some(name) => suite(name, &args.suite_args, budget, workers),
            None => verify(&args, budget),
        },
        Command::Suite(args) => suite(&args.name, &args.extras, budget, workers),
    }
}

fn print_json(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string(value).expect("output serializes"));
}

fn read_graphs(path: &Path) -> Result<Vec<Graph>, Usage> {
    let text = fs::read_to_string(path).map_err(|e| Usage(format!("--graph {}: {e}", path.display())))?;
    let graphs = parse_graph6_lines(&text)
        .map_err(|(line, e)| Usage(format!("{}:{line}: {e}", path.display())))?;
    if graphs.is_empty() {
        return Err(Usage(format!("{}: no graphs", path.display())));
    }
    Ok(graphs)
}

/// Worst code over several verdicts: undecided beats negative beats affirmative.
fn combine(codes: impl IntoIterator<Item = u8>) -> u8 {
    codes.into_iter().fold(EXIT_YES, |acc, c| match (acc, c) {
        (EXIT_UNDECIDED, _) | (_, EXIT_UNDECIDED) => EXIT_UNDECIDED,
        (EXIT_NO, _) | (_, EXIT_NO) => EXIT_NO,
        _ => EXIT_YES,
    })
}

fn construct(n: usize, profile: &CliqueProfile, format: Format, layout: bool) -> Outcome {
    let (g, blocks) = build_h(n, profile)?;
    let text = match format {
        Format::Graph6 => emit_graph6(&g),
        Format::Dot => g.to_dot(),
    };
    if layout {
        print_json(&json!({ "graph": text, "edges": g.size(), "layout": blocks }));
    } else {
        println!("{}", text.trim_end());
    }
    Ok(EXIT_YES)
}

fn check(input: &GraphInput, edge: Option<(usize, usize)>, budget: SearchBudget) -> Outcome {
    let mut codes = Vec::new();
    for g in read_graphs(&input.graph)? {
        let outcome = match edge {
            Some((u, v)) => find_embedding_with_edge(&g, &input.profile, u, v, budget)
                .map_err(|e| Usage(format!("--edge {u},{v}: {e}")))?,
            None => find_embedding(&g, &input.profile, budget),
        };
        let (value, code) = match outcome {
            SearchOutcome::Found(e) => (json!({ "result": "found", "parts": e.parts() }), EXIT_YES),
            SearchOutcome::NotFound => (json!({ "result": "not_found" }), EXIT_NO),
            SearchOutcome::BudgetExhausted => (json!({ "result": "budget_exhausted" }), EXIT_UNDECIDED),
        };
        print_json(&value);
        codes.push(code);
    }
    Ok(combine(codes))
}

fn saturated(input: &GraphInput, mutation: Option<MutationArg>, budget: SearchBudget) -> Outcome {
    let opts = SaturationOptions {
        budget,
        mutation: mutation.map(Mutation::from),
    };
    let mut codes = Vec::new();
    for g in read_graphs(&input.graph)? {
        let verdict = check_saturation(&g, &input.profile, &opts);
        print_json(&verdict);
        codes.push(match verdict.status {
            SaturationStatus::Saturated => EXIT_YES,
            SaturationStatus::NotSaturated => EXIT_NO,
            SaturationStatus::Undecided => EXIT_UNDECIDED,
        });
    }
    Ok(combine(codes))
}

fn satnum(n: usize, profile: &CliqueProfile, m_cap: Option<usize>, stream: Option<&Path>, budget: SearchBudget) -> Outcome {
    let cap = m_cap.unwrap_or(n * n.saturating_sub(1) / 2);
    let result: Result<SatResult, ExactError> = match stream {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Usage(format!("--stream {}: {e}", path.display())))?;
            let graphs = parse_graph6_lines(&text)
                .map_err(|(line, e)| Usage(format!("{}:{line}: {e}", path.display())))?;
            sat_number_from_graphs(n, profile, cap, &graphs, budget)
        }
        None => sat_number(n, profile, cap, budget),
    };
    match result {
        Ok(r) => {
            print_json(&r);
            Ok(if r.sat_value.is_some() { EXIT_YES } else { EXIT_NO })
        }
        Err(ExactError::Undecided { m }) => {
            print_json(&json!({ "n": n, "profile": profile, "undecided_at_edges": m }));
            Ok(EXIT_UNDECIDED)
        }
        Err(e) => Err(Usage(e.to_string())),
    }
}

fn verify(args: &VerifyArgs, budget: SearchBudget) -> Outcome {
    let lemma = args.lemma.expect("clap requires --lemma without --suite");
    let profile = args.profile.clone().ok_or_else(|| Usage("--profile is required".into()))?;
    let g = match (&args.graph, args.n) {
        (Some(path), _) => read_graphs(path)?.swap_remove(0),
        (None, Some(n)) => build_h(n, &profile)?.0,
        (None, None) => return Err(Usage("--n or --graph is required".into())),
    };
    let n = g.order();
    let v = g.min_degree_vertex().ok_or_else(|| Usage("the graph has no vertices".into()))?;
    // Default w: the highest vertex outside N[v].
    let default_w = || {
        let mut outside = g.vertices().difference(g.neighbors(v));
        outside.remove(v);
        outside.last()
    };
    let pick_w = || {
        args.w
            .or_else(default_w)
            .ok_or_else(|| Usage("no vertex outside N[v]; pass --w".into()))
    };
    let report: LemmaReport = match lemma {
        Lemma::One => {
            let bound = edge_count_h(n, &profile).unwrap_or(u64::MAX);
            check_lemma1(&g, &profile, bound, budget)?
        }
        Lemma::Two => check_lemma2(&g, &profile, pick_w()?, budget)?,
        Lemma::Three => {
            let witness = extract_witness(&g, &profile, pick_w()?, budget)?;
            check_lemma3(&g, &profile, &witness, budget)?
        }
        Lemma::Six => check_lemma6(&g, &profile, budget)?,
        Lemma::Star => {
            let w = pick_w()?;
            let x = match args.x {
                Some(x) => x,
                None => extract_witness(&g, &profile, w, budget)?
                    .vertices()
                    .first()
                    .ok_or_else(|| Usage("empty witness; pass --x".into()))?,
            };
            lemma_star_for_pair(&g, &profile, w, x, budget)?
        }
        Lemma::Thm2 => {
            let n = args.n.ok_or_else(|| Usage("--n is required for thm2".into()))?;
            verify_theorem2(n, &profile, budget)?
        }
    };
    print_json(&report);
    Ok(if report.undecided {
        EXIT_UNDECIDED
    } else if report.conclusion_holds {
        EXIT_YES
    } else {
        EXIT_NO
    })
}

fn suite(name: &str, extras: &SuiteExtras, budget: SearchBudget, workers: usize) -> Outcome {
    if name != "desk" {
        return Err(Usage(format!("unknown suite {name:?}; available: desk")));
    }
    let stream9 = match &extras.stream9 {
        Some(path) => Some(read_graphs(path)?),
        None => None,
    };
    let opts = SuiteOptions {
        workers,
        budget,
        mutation: extras.mutation.map(Mutation::from),
        stream9,
    };
    let results: Vec<CriterionResult> = with_workers(workers, || {
        DESK_CRITERIA
            .iter()
            .map(|(id, name, run)| {
                let start = Instant::now();
                let result = run(&opts);
                let status = match (result.passed, result.skipped) {
                    (false, _) => "FAIL",
                    (true, true) => "PASS (partly skipped)",
                    (true, false) => "PASS",
                };
                eprintln!("{id:>2}  {name:<28} {status:<22} {:>8.2}s", start.elapsed().as_secs_f64());
                result
            })
            .collect()
    });
    let report = SuiteReport::new(results);
    println!("{}", report.to_json());
    Ok(if report.passed { EXIT_YES } else { EXIT_NO })
}
