//! Acceptance criteria A1-A10, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach the terminal.

use std::process::Command;
use std::time::{Duration, Instant};

use curvfunc::report::SuiteOutcome;
use curvfunc::verify;

const SEED: u64 = 7;

struct Criterion {
    id: &'static str,
    title: &'static str,
    suites: &'static [&'static str],
    budget: Duration,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: "A1",
        title: "Einstein criticality of round spheres",
        suites: &["einstein-criticality"],
        budget: Duration::from_secs(5),
    },
    Criterion {
        id: "A2",
        title: "Gauss-Bonnet integrals",
        suites: &["gauss-bonnet"],
        budget: Duration::from_secs(1),
    },
    Criterion {
        id: "A3",
        title: "product criticality at t = -1/2",
        suites: &["product-criticality", "f-half-spectrum"],
        budget: Duration::from_secs(5),
    },
    Criterion {
        id: "A4",
        title: "Berger landscape",
        suites: &["berger-landscape"],
        budget: Duration::from_secs(120),
    },
    Criterion {
        id: "A5",
        title: "rigidity for t < -1/2",
        suites: &["t-main"],
        budget: Duration::from_secs(120),
    },
    Criterion {
        id: "A6",
        title: "inequality suites",
        suites: &["prop-est", "prop-est2", "cubic-bound"],
        budget: Duration::from_secs(10),
    },
    Criterion {
        id: "A7",
        title: "identity suites",
        suites: &["cotton-identity", "weitzenbock"],
        budget: Duration::from_secs(30),
    },
    Criterion {
        id: "A8",
        title: "gradient check",
        suites: &["gradient-check"],
        budget: Duration::from_secs(30),
    },
    Criterion {
        id: "A9",
        title: "scale invariance",
        suites: &["scale-invariance"],
        budget: Duration::from_secs(5),
    },
];

fn run_suites(names: &[&str]) -> (Vec<SuiteOutcome>, Duration) {
    let start = Instant::now();
    let mut out = Vec::new();
    for name in names {
        out.extend(verify::run(name, SEED).expect("known suite"));
    }
    (out, start.elapsed())
}

fn verify_report() -> (Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_curvfunc"))
        .args(["verify", "--suite", "all", "--seed", &SEED.to_string()])
        .output()
        .expect("spawn curvfunc");
    (out.stdout, out.status.code())
}

fn main() {
    let mut failed = Vec::new();
    for c in CRITERIA {
        let (outcomes, elapsed) = run_suites(c.suites);
        let bad: Vec<String> = outcomes
            .iter()
            .filter(|o| !o.passed)
            .map(|o| format!("{} ({} of {} violated)", o.name, o.violations, o.trials))
            .collect();
        let slow = elapsed > c.budget;
        let pass = bad.is_empty() && !slow;
        let mut note = format!("{:.2}s / {}s", elapsed.as_secs_f64(), c.budget.as_secs());
        if !bad.is_empty() {
            note.push_str(&format!("; failing: {}", bad.join(", ")));
        }
        if slow {
            note.push_str("; over time budget");
        }
        println!(
            "{} {}: {} [{}]",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            note
        );
        if !pass {
            failed.push(c.id);
        }
    }

    let start = Instant::now();
    let (a, code_a) = verify_report();
    let (b, code_b) = verify_report();
    let pass = a == b && !a.is_empty() && code_a == Some(0) && code_b == Some(0);
    println!(
        "{} A10: byte-identical verify reports [{} bytes, exit {:?}/{:?}, {:.2}s]",
        if pass { "PASS" } else { "FAIL" },
        a.len(),
        code_a,
        code_b,
        start.elapsed().as_secs_f64()
    );
    if !pass {
        failed.push("A10");
    }

    if !failed.is_empty() {
        eprintln!("failed criteria: {}", failed.join(", "));
        std::process::exit(1);
    }
}
