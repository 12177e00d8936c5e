use std::io::Write;

use ccv::suite::{run_suite, SuiteParams, SuiteReport};

// Pinned per criterion: (suite, corpus size or max random size, fuel, seed).
const PINNED: [(&str, Option<usize>, Option<usize>, Option<u64>); 9] = [
    ("sight-decrease", Some(7), None, None),
    ("mu-termination", Some(7), Some(100_000), None),
    ("simulation", Some(6), Some(30), None),
    ("coherence", Some(10), Some(500), Some(1)),
    ("sn-equivalence", None, Some(20_000), None),
    ("typed-sn", None, Some(20_000), None),
    ("sn-typeable", Some(7), Some(20_000), None),
    ("cps-agreement", Some(6), Some(500), None),
    ("five-places", None, None, None),
];

fn report(r: &SuiteReport) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{}", r.line());
    for e in &r.examples {
        let _ = writeln!(err, "    {e}");
    }
}

#[test]
fn acceptance_criteria() {
    let mut failing = Vec::new();
    for (name, size, fuel, seed) in PINNED {
        let r = run_suite(name, &SuiteParams { size, fuel, seed }).expect(name);
        report(&r);
        if !r.pass {
            failing.push(format!("criterion {} ({name})", r.criterion));
        }
    }
    assert!(failing.is_empty(), "failing: {failing:?}");
}

#[test]
fn corpus_parameters_are_reported() {
    let r = run_suite("coherence", &SuiteParams { size: Some(6), fuel: Some(200), seed: Some(7) }).unwrap();
    assert_eq!(r.params["count"], 1000);
    assert_eq!(r.params["seed"], 7);
    assert_eq!(r.params["max_size"], 6);
    assert!(run_suite("no-such-suite", &SuiteParams::default()).is_err());
}
