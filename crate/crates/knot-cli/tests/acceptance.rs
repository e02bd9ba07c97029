//! Acceptance gate for the command-line front end: golden stdout for the
//! documented example invocations and a well-formed stats report.

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

fn report(label: &str, name: &str, budget: Duration, body: impl FnOnce()) {
    let started = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = started.elapsed();
    match outcome {
        Err(cause) => {
            println!("{label} FAIL {name}");
            resume_unwind(cause);
        }
        Ok(()) => {
            assert!(
                elapsed <= budget,
                "{label} FAIL {name}: took {elapsed:?}, budget {budget:?}"
            );
            println!("{label} PASS {name} ({elapsed:?} within {budget:?})");
        }
    }
}

fn run_capture(argv: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = knot_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const STATS_KEYS: [&str; 8] = [
    "command",
    "params",
    "outputs_emitted",
    "allocations",
    "forces",
    "nodes",
    "tests",
    "elapsed_ms",
];

#[test]
fn criterion_11_cli_golden_files() {
    report("criterion 11", "cli golden files", Duration::from_secs(1), || {
        let cases: [(&[&str], &str); 3] = [
            (
                &["knot", "hamming", "--count", "11"],
                "1\n2\n3\n4\n5\n6\n8\n9\n10\n12\n15\n",
            ),
            (&["knot", "queens", "4", "--count-only"], "2\n"),
            (&["knot", "perms", "3", "--limit", "1"], "1 2 3\n"),
        ];
        for (argv, want) in cases {
            let (code, out, err) = run_capture(argv);
            assert_eq!(code, 0, "{argv:?} failed: {err}");
            assert_eq!(out, want, "stdout of {argv:?}");
            assert!(err.is_empty(), "unexpected stderr from {argv:?}: {err}");
        }

        let (code, out, err) = run_capture(&["knot", "hamming", "--count", "11", "--stats"]);
        assert_eq!(code, 0);
        assert_eq!(out, cases[0].1, "--stats must not disturb stdout");
        let report: serde_json::Value =
            serde_json::from_str(err.trim()).expect("stderr is one JSON object");
        for key in STATS_KEYS {
            assert!(report.get(key).is_some(), "stats report lacks {key}");
        }
        assert_eq!(report["command"], "hamming");
        assert_eq!(report["outputs_emitted"], 11);
    });
}
