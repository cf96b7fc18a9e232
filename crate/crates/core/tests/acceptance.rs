use std::process::ExitCode;
use std::time::{Duration, Instant};

use cliquesat::graph6::parse_graph6_lines;
use cliquesat::suite::{run_desk, with_workers, CriterionResult, SuiteOptions, SuiteReport, DESK_CRITERIA};

fn limit(id: u8) -> Duration {
    Duration::from_secs(match id {
        1 => 1,
        2 => 120,
        3 => 600,
        4 => 300,
        5 => 60,
        6 => 300,
        _ => 600,
    })
}

fn note(c: &CriterionResult) -> String {
    let s = &c.summary;
    match c.id {
        1 => format!(
            "{} instances, {} mismatches; published expression differs on {} (n=255: direct {}, published {})",
            s["instances"], s["mismatches"], s["published_expression_differs"], s["example"]["direct"], s["example"]["published"]
        ),
        2 => format!("{} instances, {} mismatches, {} undecided", s["instances"], s["mismatches"], s["undecided"]),
        3 => format!("n=255 e={} status={} fallback={}", s["edges"], s["status"], s["fallback"]),
        4 => s["cases"]
            .as_array()
            .map(|cases| {
                cases
                    .iter()
                    .map(|case| match case.get("skipped") {
                        Some(reason) => format!("{} skipped ({})", case["case"], reason),
                        None => format!("{}={}", case["case"], case["result"]["sat_value"]),
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .unwrap_or_default(),
        5 => format!("{} pairs, {} disagreements", s["pairs"], s["disagreements"]),
        6 => format!(
            "{} profiles, {} equality failures; {} overlap instances, {} pairs, {} failures",
            s["profiles"], s["equality_failures"], s["overlap_instances"], s["overlap_pairs"], s["overlap_failures"]
        ),
        _ => String::new(),
    }
}

fn main() -> ExitCode {
    let stream9 = std::env::var_os("CLIQUESAT_STREAM9").map(|path| {
        let text = std::fs::read_to_string(&path).expect("readable graph6 stream");
        parse_graph6_lines(&text).expect("valid graph6 stream")
    });
    let base = SuiteOptions {
        stream9,
        ..SuiteOptions::default()
    };

    let mut ok = true;
    let mut results = Vec::new();
    with_workers(1, || {
        for (id, _, run) in DESK_CRITERIA {
            let start = Instant::now();
            let result = run(&base);
            let elapsed = start.elapsed();
            let in_time = elapsed <= limit(id);
            let passed = result.passed && in_time;
            ok &= passed;
            println!(
                "{} criterion {} {} ({:.2}s, limit {}s): {}",
                if passed { "PASS" } else { "FAIL" },
                id,
                result.name,
                elapsed.as_secs_f64(),
                limit(id).as_secs(),
                note(&result)
            );
            results.push(result);
        }
    });

    let single = SuiteReport::new(results).to_json();
    let start = Instant::now();
    let parallel = run_desk(&SuiteOptions { workers: 8, ..base }).to_json();
    let identical = single == parallel;
    ok &= identical;
    println!(
        "{} criterion 7 determinism ({:.2}s): suite JSON with 1 and 8 workers {}",
        if identical { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64(),
        if identical { "byte-identical" } else { "differs" }
    );

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
